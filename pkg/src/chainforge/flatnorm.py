"""Mass, mass mod p, localized mass measures, and flat norms as exact
optimization problems with witness decompositions.

The flat norm minimizes mass(T - dS) + mass(S) over chains S one dimension
up.  Exact mode runs branch and bound with the rational LP relaxation as the
bound; relaxed mode returns the LP value itself.  The mod-p variant searches
S with coefficients reduced to [-p//2, p//2]: for fixed S the optimal pair
(R, Q) is the coefficientwise reduction of T - dS and the quotient it leaves,
so no explicit Q search is needed in exact mode.

Values are complex-relative: the minimization ranges over chains of the
given complex, not over an enclosing space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from chainforge import lp
from chainforge.complexes import (
    Chain,
    InvariantViolation,
    boundary_faces,
    reduce_coefficient,
)


def mass(chain: Chain) -> Fraction:
    """Weighted l1 norm of the coefficients."""
    K = chain.complex
    return sum((K.weight(s) * abs(c) for s, c in chain.coeffs.items()), Fraction(0))


def mass_p(chain: Chain, p: int) -> Fraction:
    """Mass after coefficientwise reduction mod p; always <= mass."""
    if p < 2:
        raise ValueError("modulus must be an integer >= 2")
    if chain.modulus == p:
        return mass(chain)
    return mass(chain.reduce_mod(p))


@dataclass(frozen=True)
class MassMeasure:
    """Per-simplex nonnegative mass contributions weight * |coefficient|.

    Restriction to a simplex subset is additive, which is the discrete form
    of the localized mass measure.
    """

    complex: object
    dim: int
    contributions: dict

    @classmethod
    def of_chain(cls, chain: Chain, p: int | None = None) -> "MassMeasure":
        if p is not None and chain.modulus != p:
            chain = chain.reduce_mod(p)
        K = chain.complex
        contr = {s: K.weight(s) * abs(c) for s, c in chain.coeffs.items()}
        return cls(K, chain.dim, contr)

    def total(self) -> Fraction:
        return sum(self.contributions.values(), Fraction(0))

    def restrict(self, simplices) -> "MassMeasure":
        keep = set(simplices)
        return MassMeasure(
            self.complex, self.dim,
            {s: m for s, m in self.contributions.items() if s in keep},
        )

    def ball(self, metric, center: int, radius) -> Fraction:
        """Measure of the open ball: simplices with all vertices strictly
        within the radius (the max-vertex sublevel rule)."""
        radius = Fraction(radius)
        tot = Fraction(0)
        for s, m in self.contributions.items():
            if max(metric.d(v, center) for v in s) < radius:
                tot += m
        return tot

    def support(self) -> frozenset:
        return frozenset(self.contributions)


@dataclass
class FlatDecomposition:
    """Witness (R, S, Q, value) certifying a flat-norm value: T = R + dS,
    plus pQ for the mod-p norm, with value = mass(R) + mass(S)."""

    value: Fraction
    R: Chain
    S: Chain
    Q: Chain | None = None
    relaxed: bool = False
    p: int | None = None
    meta: dict = field(default_factory=dict)

    def verify(self, T: Chain) -> None:
        residual = T - self.R - self.S.boundary() if self.S else T - self.R
        if self.Q is not None:
            residual = residual - self.Q.scale(self.p)
        if not residual.is_zero():
            raise InvariantViolation("decomposition does not reproduce the chain")
        if mass(self.R) + mass(self.S) != self.value:
            raise InvariantViolation("decomposition value does not match its masses")


def _variable_layout(T: Chain):
    K = T.complex
    k = T.dim
    taus = list(K.simplices(k + 1))
    sigma_set = set(T.coeffs)
    for t in taus:
        for f, _ in boundary_faces(t):
            sigma_set.add(f)
    sigmas = sorted(sigma_set)
    return sigmas, taus


def _lp_rows(T, sigmas, taus, extra_bounds):
    """Balance rows r+ - r- + D(s+ - s-) = T, a box on each |s|, and any
    branching bounds.  Variable order: r+, r-, s+, s-."""
    K = T.complex
    a, b = len(sigmas), len(taus)
    sig_pos = {s: i for i, s in enumerate(sigmas)}
    costs = (
        [K.weight(s) for s in sigmas] * 2 + [K.weight(t) for t in taus] * 2
    )
    nvars = 2 * a + 2 * b
    rows = []
    col_of_tau_plus = 2 * a
    col_of_tau_minus = 2 * a + b
    coef_rows = [[Fraction(0)] * nvars for _ in range(a)]
    for i in range(a):
        coef_rows[i][i] = Fraction(1)
        coef_rows[i][a + i] = Fraction(-1)
    for ti, t in enumerate(taus):
        for f, sign in boundary_faces(t):
            i = sig_pos[f]
            coef_rows[i][col_of_tau_plus + ti] += sign
            coef_rows[i][col_of_tau_minus + ti] -= sign
    total_mass = mass(T)
    for i, s in enumerate(sigmas):
        rows.append((coef_rows[i], "==", Fraction(T.coeffs.get(s, 0))))
    for ti, t in enumerate(taus):
        # |s_t| <= mass(T)/w(t): any larger S already costs more than S = 0.
        box = total_mass / K.weight(t)
        brow = [Fraction(0)] * nvars
        brow[col_of_tau_plus + ti] = Fraction(1)
        brow[col_of_tau_minus + ti] = Fraction(1)
        rows.append((brow, "<=", box))
    for ti, sense, bound in extra_bounds:
        brow = [Fraction(0)] * nvars
        brow[col_of_tau_plus + ti] = Fraction(1)
        brow[col_of_tau_minus + ti] = Fraction(-1)
        rows.append((brow, sense, Fraction(bound)))
    return costs, rows


def _lp_solution_chains(T, sigmas, taus, x):
    a, b = len(sigmas), len(taus)
    s_coeffs = {}
    for ti, t in enumerate(taus):
        v = x[2 * a + ti] - x[2 * a + b + ti]
        if v:
            s_coeffs[t] = int(v) if v.denominator == 1 else v
    S = Chain(T.complex, T.dim + 1, s_coeffs)
    R = T - S.boundary() if s_coeffs else T
    return R, S


def flat_norm(T: Chain, mode: str = "exact") -> FlatDecomposition:
    """Flat norm min mass(R) + mass(S) over T = R + dS.

    Exact mode restricts S to integers (branch and bound over the LP
    relaxation); relaxed mode solves the LP with real coefficients, so its
    value is never above the exact one.  S = 0 is always feasible.
    """
    if mode not in ("exact", "relaxed"):
        raise ValueError(f"unknown mode {mode!r}")
    if T.modulus is not None:
        raise ValueError("flat_norm expects an integer chain; see flat_norm_mod_p")
    sigmas, taus = _variable_layout(T)
    if not taus or T.is_zero():
        S = Chain.zero(T.complex, T.dim + 1)
        dec = FlatDecomposition(mass(T), T, S, relaxed=(mode == "relaxed"))
        dec.verify(T)
        return dec

    costs, base_rows = _lp_rows(T, sigmas, taus, [])
    if mode == "relaxed":
        value, x = lp.solve_lp(costs, base_rows)
        R, S = _lp_solution_chains(T, sigmas, taus, x)
        dec = FlatDecomposition(mass(R) + mass(S), R, S, relaxed=True)
        if dec.value != value:
            raise InvariantViolation("LP value does not match witness masses")
        dec.verify(T)
        return dec

    # Branch and bound on the s variables.
    best_value = mass(T)
    best_S: dict = {}
    a, b = len(sigmas), len(taus)
    stack: list[list] = [[]]
    while stack:
        bounds = stack.pop()
        costs, rows = _lp_rows(T, sigmas, taus, bounds)
        try:
            value, x = lp.solve_lp(costs, rows)
        except lp.Infeasible:
            continue
        if value >= best_value:
            continue
        s_vals = [x[2 * a + ti] - x[2 * a + b + ti] for ti in range(b)]
        frac_ti = None
        worst = Fraction(0)
        for ti, v in enumerate(s_vals):
            if v.denominator != 1:
                f = v - v.__floor__()
                dist = min(f, 1 - f)
                if dist > worst:
                    frac_ti, worst = ti, dist
        if frac_ti is None:
            best_value = value
            best_S = {taus[ti]: int(v) for ti, v in enumerate(s_vals) if v}
            continue
        v = s_vals[frac_ti]
        stack.append(bounds + [(frac_ti, "<=", v.__floor__())])
        stack.append(bounds + [(frac_ti, ">=", v.__floor__() + 1)])

    S = Chain(T.complex, T.dim + 1, best_S)
    R = T - S.boundary() if best_S else T
    dec = FlatDecomposition(mass(R) + mass(S), R, S, relaxed=False)
    if dec.value != best_value:
        raise InvariantViolation("branch-and-bound value does not match witness")
    dec.verify(T)
    return dec


def flat_norm_mod_p(T: Chain, p: int, mode: str = "exact") -> FlatDecomposition:
    """Flat norm mod p: min mass(R) + mass(S) over T = R + dS + pQ.

    Exact mode searches integer S with coefficients in [-p//2, p//2] (any
    optimum can be brought into that box by moving p-multiples into Q) and
    reads off R as the coefficientwise reduction of T - dS.  Relaxed mode is
    an LP diagnostic: the smaller of the LP relaxations at Q = 0 and at the
    canonical quotient Q0 = (T - T^p)/p; unlike the integer-coefficient case
    it may exceed the exact value, since a real relaxation cannot model
    coefficient reduction.
    """
    if p < 2:
        raise ValueError("modulus must be an integer >= 2")
    if mode not in ("exact", "relaxed"):
        raise ValueError(f"unknown mode {mode!r}")
    if T.modulus is not None:
        if T.modulus != p:
            raise ValueError("chain is reduced with a different modulus")
        T = T.lift()

    if mode == "relaxed":
        Tp = T.reduce_mod(p).lift()
        dec0 = flat_norm(T, "relaxed")
        if Tp == T:
            best, Q = dec0, Chain.zero(T.complex, T.dim)
        else:
            dec1 = flat_norm(Tp, "relaxed")
            if dec1.value < dec0.value:
                Q0 = (T - Tp).scale(Fraction(1, p))
                q_int = {s: int(c) for s, c in Q0.coeffs.items()}
                best, Q = dec1, Chain(T.complex, T.dim, q_int)
            else:
                best, Q = dec0, Chain.zero(T.complex, T.dim)
        dec = FlatDecomposition(best.value, best.R, best.S, Q, relaxed=True, p=p)
        dec.verify(T)
        return dec

    value, s_coeffs = _search_modp(T, p)
    S = Chain(T.complex, T.dim + 1, s_coeffs)
    diff = T - S.boundary() if s_coeffs else T
    R = diff.reduce_mod(p).lift()
    Qc = {s: (c - R.coeffs.get(s, 0)) // p for s, c in diff.coeffs.items()}
    Q = Chain(T.complex, T.dim, Qc)
    dec = FlatDecomposition(mass(R) + mass(S), R, S, Q, relaxed=False, p=p)
    if dec.value != value:
        raise InvariantViolation("mod-p search value does not match witness")
    dec.verify(T)
    return dec


def _search_modp(T: Chain, p: int):
    """Depth-first search over reduced S coefficients with exact pruning."""
    K = T.complex
    k = T.dim
    taus = list(K.simplices(k + 1))
    sigma_set = set(T.coeffs)
    for t in taus:
        for f, _ in boundary_faces(t):
            sigma_set.add(f)
    sigmas = sorted(sigma_set)
    sig_pos = {s: i for i, s in enumerate(sigmas)}
    w_sig = [K.weight(s) for s in sigmas]
    w_tau = [K.weight(t) for t in taus]
    residual = [T.coeffs.get(s, 0) for s in sigmas]

    inc = [
        [(sig_pos[f], sign) for f, sign in boundary_faces(t)]
        for t in taus
    ]
    last_touch = [-1] * len(sigmas)
    for ti, fs in enumerate(inc):
        for si, _ in fs:
            last_touch[si] = ti
    closes = [[] for _ in taus]
    base = Fraction(0)
    for si, lt in enumerate(last_touch):
        if lt >= 0:
            closes[lt].append(si)
        else:
            base += w_sig[si] * abs(reduce_coefficient(residual[si], p))

    half = p // 2
    values = sorted(range(-half, half + 1), key=lambda v: (abs(v), -v))
    best_value = mass_p(T, p)
    best_s: dict = {}
    chosen = [0] * len(taus)

    def close_cost(ti):
        return sum(
            (w_sig[si] * abs(reduce_coefficient(residual[si], p)) for si in closes[ti]),
            Fraction(0),
        )

    def dfs(ti, cur):
        nonlocal best_value, best_s
        if cur >= best_value:
            return
        if ti == len(taus):
            best_value = cur
            best_s = {taus[i]: v for i, v in enumerate(chosen) if v}
            return
        for v in values:
            cost = cur + w_tau[ti] * abs(v)
            if cost >= best_value:
                continue
            chosen[ti] = v
            if v:
                for si, sign in inc[ti]:
                    residual[si] -= sign * v
            cost += close_cost(ti)
            if cost < best_value:
                dfs(ti + 1, cost)
            if v:
                for si, sign in inc[ti]:
                    residual[si] += sign * v
        chosen[ti] = 0

    if taus:
        dfs(0, base)
    return best_value, best_s
