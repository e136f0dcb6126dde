"""Dense two-phase simplex over exact rationals.

Self-contained on purpose: flat-norm instances are desk scale and the branch
and bound wrapper needs exact optimal values, which float LP codes cannot
certify.  The objective row is carried in the tableau; Dantzig pricing with a
Bland fallback after an iteration budget guarantees termination.
"""

from __future__ import annotations

from fractions import Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Infeasible(RuntimeError):
    pass


class Unbounded(RuntimeError):
    pass


def solve_lp(costs, rows):
    """Minimize costs . x subject to rows and x >= 0.

    rows is a list of (coeffs, sense, rhs) with sense one of '<=', '>=', '=='.
    Returns (optimal value, x) as exact Fractions.
    """
    n = len(costs)
    costs = [Fraction(c) for c in costs]

    norm_rows = []
    for coeffs, sense, rhs in rows:
        coeffs = [Fraction(c) for c in coeffs]
        rhs = Fraction(rhs)
        if len(coeffs) != n:
            raise ValueError("row length does not match number of variables")
        if rhs < 0:
            coeffs = [-c for c in coeffs]
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        norm_rows.append((coeffs, sense, rhs))

    m = len(norm_rows)
    slack_of_row: dict[int, int] = {}
    art_of_row: dict[int, int] = {}
    nxt = n
    for i, (_, s, _) in enumerate(norm_rows):
        if s != "==":
            slack_of_row[i] = nxt
            nxt += 1
    first_art = nxt
    for i, (_, s, _) in enumerate(norm_rows):
        if s in ("==", ">="):
            art_of_row[i] = nxt
            nxt += 1
    total = nxt

    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    for i, (coeffs, sense, rhs) in enumerate(norm_rows):
        row = coeffs + [_ZERO] * (total - n) + [rhs]
        if i in slack_of_row:
            row[slack_of_row[i]] = _ONE if sense == "<=" else -_ONE
        if i in art_of_row:
            row[art_of_row[i]] = _ONE
            basis.append(art_of_row[i])
        else:
            basis.append(slack_of_row[i])
        tableau.append(row)

    frozen: set[int] = set()
    if art_of_row:
        phase1 = [_ZERO] * total + [_ZERO]
        for j in art_of_row.values():
            phase1[j] = _ONE
        obj = _price_out(phase1, tableau, basis)
        _optimize(tableau, basis, obj, frozen)
        if -obj[-1] != 0:
            raise Infeasible("linear program has no feasible point")
        _drive_out_artificials(tableau, basis, first_art)
        frozen = set(range(first_art, total))

    obj = _price_out(costs + [_ZERO] * (total - n) + [_ZERO], tableau, basis)
    _optimize(tableau, basis, obj, frozen)
    x = [_ZERO] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tableau[i][-1]
    return -obj[-1], x


def _price_out(obj, tableau, basis):
    """Make the objective row reduced with respect to the current basis."""
    obj = list(obj)
    for i, b in enumerate(basis):
        f = obj[b]
        if f:
            row = tableau[i]
            for j, v in enumerate(row):
                if v:
                    obj[j] -= f * v
    return obj


def _optimize(tableau, basis, obj, frozen):
    m = len(tableau)
    width = len(obj) - 1
    bland_after = 4 * (m + width) + 32
    iteration = 0
    while True:
        iteration += 1
        entering = None
        if iteration < bland_after:
            best = _ZERO
            for j in range(width):
                v = obj[j]
                if v < best and j not in frozen:
                    entering, best = j, v
        else:
            for j in range(width):
                if obj[j] < 0 and j not in frozen:
                    entering = j
                    break
        if entering is None:
            return
        leaving, best_ratio = None, None
        for i in range(m):
            a = tableau[i][entering]
            if a > 0:
                ratio = tableau[i][-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leaving])
                ):
                    leaving, best_ratio = i, ratio
        if leaving is None:
            raise Unbounded("objective is unbounded below")
        _pivot(tableau, basis, obj, leaving, entering)


def _pivot(tableau, basis, obj, row, col):
    pr = tableau[row]
    pv = pr[col]
    if pv != 1:
        inv = 1 / pv
        tableau[row] = pr = [c * inv for c in pr]
    for target in tableau:
        if target is not pr and target[col]:
            f = target[col]
            for j, v in enumerate(pr):
                if v:
                    target[j] -= f * v
    f = obj[col]
    if f:
        for j, v in enumerate(pr):
            if v:
                obj[j] -= f * v
    basis[row] = col


def _drive_out_artificials(tableau, basis, first_art):
    """Pivot basic artificials (at value 0 after phase one) onto real columns;
    drop rows that became identically zero."""
    for i in range(len(basis) - 1, -1, -1):
        if basis[i] < first_art:
            continue
        col = next((j for j in range(first_art) if tableau[i][j] != 0), None)
        if col is None:
            del tableau[i]
            del basis[i]
        else:
            dummy = [_ZERO] * len(tableau[i])
            _pivot(tableau, basis, dummy, i, col)
