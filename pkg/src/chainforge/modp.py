"""Dense linear algebra over GF(p) for odd primes (small systems only;
the p = 2 path uses the bit-packed solver instead)."""

from __future__ import annotations


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def solve_full(rows, rhs, p: int):
    """RREF solve of A x = b over GF(p), p prime.

    rows: list of coefficient lists (ints, any residues); rhs: ints.
    Returns (particular solution or None, nullspace basis as lists).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime; exact mod-p elimination needs a field")
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [[v % p for v in row] + [rhs[i] % p] for i, row in enumerate(rows)]
    pivots = []  # (row, col)
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if aug[i][c]), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        inv = pow(aug[r][c], p - 2, p)
        aug[r] = [(v * inv) % p for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(a - f * b) % p for a, b in zip(aug[i], aug[r])]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n]:
            return None, _nullspace(aug, pivots, n, p)
    x = [0] * n
    for pr, pc in pivots:
        x[pc] = aug[pr][n]
    return x, _nullspace(aug, pivots, n, p)


def _nullspace(aug, pivots, n, p):
    pivot_cols = {c for _, c in pivots}
    basis = []
    for f in range(n):
        if f in pivot_cols:
            continue
        vec = [0] * n
        vec[f] = 1
        for pr, pc in pivots:
            if aug[pr][f]:
                vec[pc] = (-aug[pr][f]) % p
        basis.append(vec)
    return basis
