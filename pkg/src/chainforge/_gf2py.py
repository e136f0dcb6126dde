"""Bit-packed GF(2) linear algebra on Python ints (pure fallback backend).

Rows are ints with bit j = column j.  An augmented right-hand-side bit is
kept at position ncols during solves; the lsb-driven elimination never picks
it as a pivot before all unknown columns are exhausted, so a row reduced to
the bare rhs bit certifies inconsistency.
"""

from __future__ import annotations


def _eliminate(rows):
    """Reduce rows to an echelon set; returns {pivot column: row}."""
    pivots: dict[int, int] = {}
    for row in rows:
        cur = row
        while cur:
            col = (cur & -cur).bit_length() - 1
            piv = pivots.get(col)
            if piv is None:
                pivots[col] = cur
                break
            cur ^= piv
    return pivots


def rank(rows, ncols: int) -> int:
    return len(_eliminate(rows))


def _back_substitute(pivots, ncols, free_bits):
    x = free_bits
    for col in sorted((c for c in pivots if c < ncols), reverse=True):
        row = pivots[col]
        val = (row >> ncols) & 1
        val ^= (row & x).bit_count() & 1
        if val:
            x |= 1 << col
    return x


def solve(rows, ncols: int, rhs) -> int | None:
    """One solution bitmask of A x = b over GF(2), or None."""
    aug = [r | (b << ncols) for r, b in zip(rows, rhs)]
    pivots = _eliminate(aug)
    if ncols in pivots:
        return None
    return _back_substitute(pivots, ncols, 0)


def solve_full(rows, ncols: int, rhs):
    """(particular solution or None, nullspace basis) for A x = b."""
    aug = [r | (b << ncols) for r, b in zip(rows, rhs)]
    pivots = _eliminate(aug)
    if ncols in pivots:
        particular = None
        del pivots[ncols]
    else:
        particular = _back_substitute(pivots, ncols, 0)
    basis = []
    pivot_cols = set(pivots)
    # Null vectors: one free column set to 1, rhs treated as zero.  Rows have
    # their lsb at the pivot column, so descending back-substitution only ever
    # sees already-decided bits.
    stripped = {c: row & ~(1 << ncols) for c, row in pivots.items()}
    cols_desc = sorted(stripped, reverse=True)
    for f in range(ncols):
        if f in pivot_cols:
            continue
        x = 1 << f
        for col in cols_desc:
            if (stripped[col] & x).bit_count() & 1:
                x |= 1 << col
        basis.append(x)
    return particular, basis


def nullspace(rows, ncols: int):
    return solve_full(rows, ncols, [0] * len(rows))[1]
