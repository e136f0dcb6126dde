"""Ball coverings, cycle decomposition, cone and isoperimetric fillings, and
the exact filling radius / filling volume mod p.

The ambient stand-in for a Banach neighborhood is a Rips-type filtration:
a candidate simplex enters the r-neighborhood of a cycle's support once all
its vertices are within r of the support and all its pairwise distances are
at most 2r (sup-norm balls have the Helly property, so the nerve of the
r-balls is exactly this flag condition).  Every certificate re-verifies its
boundary identity before being returned.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction

from chainforge import gf2, modp
from chainforge.complexes import Chain, InvariantViolation, boundary_faces
from chainforge.flatnorm import MassMeasure, mass, mass_p
from chainforge.slicing import VertexFunction, restrict, slice_chain

CONSTANTS_POLICY = {
    "gamma_k": "empirical-envelope (no numeric value asserted)",
    "C_k": "empirical-envelope (no numeric value asserted)",
    "c_n": "empirical-envelope (no numeric value asserted)",
}


class Infeasible(RuntimeError):
    """The requested filling does not exist in the ambient complex."""


class SliceSearchError(RuntimeError):
    """No vanishing slice radius exists; the discretization is too coarse."""


# ---------------------------------------------------------------------------
# Ball covering


@dataclass(frozen=True)
class BallCover:
    """Centers y_i and radii r_i with the three covering properties:

    (a) mu(B_{r_i}(y_i)) >= F r_i while mu(B_s(y_i)) < F s for every s > r_i,
    (b) the doubled balls B_{2 r_i}(y_i) are pairwise disjoint,
    (c) 5 sum_i mu(B_{r_i}(y_i)) >= mu(total).
    """

    centers: tuple
    radii: tuple
    measure: MassMeasure
    F: Fraction

    def verify(self, metric) -> None:
        mu, F = self.measure, self.F
        covered = Fraction(0)
        for y, r in zip(self.centers, self.radii):
            got = mu.ball(metric, y, r)
            if got < F * r:
                raise InvariantViolation(f"ball at {y} violates mu(B_r) >= F r")
            if _admissible_radius(mu, metric, y, F) != r:
                raise InvariantViolation(f"radius at {y} is not maximal for (a)")
            covered += got
        for i in range(len(self.centers)):
            for j in range(i + 1, len(self.centers)):
                lhs = metric.d(self.centers[i], self.centers[j])
                if lhs < 2 * self.radii[i] + 2 * self.radii[j]:
                    raise InvariantViolation("doubled balls are not disjoint")
        if 5 * covered < mu.total():
            raise InvariantViolation("covering misses more than 4/5 of the measure")


def _admissible_radius(mu: MassMeasure, metric, center: int, F: Fraction):
    """Largest s with mu(B_s(center)) >= F s, exactly, or None.

    mu(B_s) is a left-continuous step function of s jumping just past each
    distinct max-vertex distance, so the admissible set is a finite union of
    half-open intervals and its supremum is attained.
    """
    by_dist: dict[Fraction, Fraction] = {}
    for s, m in mu.contributions.items():
        d = max(metric.d(v, center) for v in s)
        by_dist[d] = by_dist.get(d, Fraction(0)) + m
    thresholds = sorted(by_dist)
    best = None
    cum = Fraction(0)
    for i, d in enumerate(thresholds):
        cum += by_dist[d]
        upper = thresholds[i + 1] if i + 1 < len(thresholds) else None
        cand = cum / F
        if upper is not None and cand > upper:
            cand = upper
        if cand > d and (best is None or cand > best):
            best = cand
    return best


def cover_balls(mu: MassMeasure, metric, F=Fraction(1, 2)) -> BallCover:
    """Greedy Vitali-style covering realizing properties (a), (b), (c).

    Candidates are all vertices with an admissible radius, processed in
    decreasing radius; a candidate is kept when its doubled ball misses all
    kept doubled balls.  Every rejected candidate's ball then sits inside a
    kept 5r-ball, which yields (c) with the factor 5 exactly.
    """
    F = Fraction(F)
    if F <= 0:
        raise ValueError("F must be positive")
    if not mu.contributions:
        raise ValueError("measure is zero")
    K = mu.complex
    r_of = {}
    for y in K.vertices():
        r = _admissible_radius(mu, metric, y, F)
        if r is not None:
            r_of[y] = r
    for s in sorted(mu.contributions):
        anchor = s[0]
        reach = max(metric.d(v, anchor) for v in s)
        if anchor not in r_of or r_of[anchor] <= reach:
            raise ValueError(
                f"no admissible radius at atom {s}: F={F} is too large for this measure"
            )
    chosen: list[tuple[int, Fraction]] = []
    for y in sorted(r_of, key=lambda v: (-r_of[v], v)):
        ry = r_of[y]
        if all(metric.d(y, c) >= 2 * ry + 2 * rc for c, rc in chosen):
            chosen.append((y, ry))
    cover = BallCover(
        centers=tuple(y for y, _ in chosen),
        radii=tuple(r for _, r in chosen),
        measure=mu,
        F=F,
    )
    cover.verify(metric)
    return cover


# ---------------------------------------------------------------------------
# Cycle decomposition


@dataclass(frozen=True)
class CyclePiece:
    center: int
    radius: Fraction  # the slice radius eta_i
    chain: Chain


@dataclass(frozen=True)
class Decomposition:
    pieces: tuple
    remainder: Chain
    rounds: int
    round_masses: tuple = ()  # remaining mass entering each round, then final

    def total_piece_mass(self) -> Fraction:
        return sum((mass(p.chain) for p in self.pieces), Fraction(0))


def _require_cycle(L: Chain, p: int) -> Chain:
    if p < 2:
        raise ValueError("modulus must be an integer >= 2")
    if L.modulus is None:
        L = L.reduce_mod(p)
    elif L.modulus != p:
        raise ValueError("chain is reduced with a different modulus")
    if L.dim >= 1 and not L.is_cycle_mod(p):
        raise ValueError("chain is not a cycle mod p")
    return L


def decompose_cycle(
    L: Chain,
    p: int,
    metric=None,
    max_rounds: int = 64,
    rel_tol: Fraction = Fraction(1, 10**9),
) -> Decomposition:
    """Split a cycle mod p into pieces supported in small balls.

    Each round covers the remaining mass with cover_balls(F=1/2), slices each
    ball at a radius eta in (r, 2r) where the distance-function slice
    vanishes mod p, and peels off the restrictions.  Each piece is a cycle
    with diam(supp) <= 8 mass_p; each round removes at least a fifth of the
    remaining mass; piece and remainder masses add up exactly.
    """
    if L.dim < 1:
        raise ValueError("decomposition needs chains of dimension >= 1")
    L = _require_cycle(L, p)
    metric = metric or L.complex.metric or L.complex.path_metric()
    total = mass(L)
    current = L
    pieces: list[CyclePiece] = []
    rounds = 0
    round_masses = [total]
    while current.coeffs and rounds < max_rounds and mass(current) >= rel_tol * total:
        rounds += 1
        before = mass(current)
        mu = MassMeasure.of_chain(current)
        cover = cover_balls(mu, metric, Fraction(1, 2))
        round_pieces = []
        for y, r in zip(cover.centers, cover.radii):
            u = VertexFunction.distance_from(current.complex, y, metric)
            eta = _vanishing_slice_radius(current, u, r, 2 * r, p)
            if eta is None:
                raise SliceSearchError(
                    f"no vanishing slice in ({r}, {2 * r}) around vertex {y}; "
                    "refine the complex (e.g. a finer Rips scale)"
                )
            piece = restrict(current, u, eta)
            if piece.dim >= 1 and not piece.is_cycle_mod(p):
                raise InvariantViolation("piece is not a cycle mod p")
            diam = _support_diameter(piece, metric)
            if diam > 8 * mass(piece):
                raise InvariantViolation("piece violates diam <= 8 mass_p")
            round_pieces.append(CyclePiece(y, eta, piece))
        for piece in round_pieces:
            current = current - piece.chain
        pieces.extend(round_pieces)
        peeled = sum((mass(pc.chain) for pc in round_pieces), Fraction(0))
        if mass(current) + peeled != before:
            raise InvariantViolation("mass is not conserved by the decomposition")
        if 5 * mass(current) > 4 * before:
            raise InvariantViolation("round removed less than 1/5 of the mass")
        round_masses.append(mass(current))
    return Decomposition(tuple(pieces), current, rounds, tuple(round_masses))


def _vanishing_slice_radius(T: Chain, u: VertexFunction, lo, hi, p: int):
    crit = sorted({u.values[v] for s in T.coeffs for v in s if lo < u.values[v] < hi})
    cuts = [lo, *crit, hi]
    for a, b in zip(cuts, cuts[1:]):
        eta = (a + b) / 2
        if slice_chain(T, u, eta).is_zero():
            return eta
    return None


def _support_diameter(chain: Chain, metric) -> Fraction:
    verts = chain.vertex_support()
    return max(
        (metric.d(a, b) for i, a in enumerate(verts) for b in verts[i + 1 :]),
        default=Fraction(0),
    )


# ---------------------------------------------------------------------------
# Fillings


def cone_fill(L: Chain, apex: int) -> Chain:
    """Join every simplex of the cycle to the apex.

    Needs apex * s in the complex for every s in the support; the boundary of
    the result reproduces L (mod p for reduced chains, exactly for integer
    cycles).
    """
    K = L.complex
    if not K.has_simplex((apex,)):
        raise ValueError(f"apex {apex} is not a vertex of the complex")
    acc: dict = {}
    for s, c in L.coeffs.items():
        if apex in s:
            continue
        pos = sum(1 for v in s if v < apex)
        cone = tuple(sorted(s + (apex,)))
        if not K.has_simplex(cone):
            raise ValueError(f"missing cone simplex over {s} (apex {apex})")
        sign = -1 if pos % 2 else 1
        acc[cone] = acc.get(cone, 0) + sign * c
    T = Chain(K, L.dim + 1, acc, L.modulus)
    check = T.boundary() - L
    if L.modulus is None:
        if not check.is_zero():
            raise InvariantViolation("cone boundary does not reproduce the cycle")
    elif not all(c % L.modulus == 0 for c in check.lift().coeffs.values()):
        raise InvariantViolation("cone boundary does not reproduce the cycle mod p")
    return T


@dataclass
class FillingCertificate:
    """A filling T of the cycle L with dT = L mod p, its mass data, and the
    neighborhood radius of supp(L) containing supp(T) (None when the ambient
    carries no metric)."""

    cycle: Chain
    filling: Chain
    p: int
    radius: Fraction | None
    mass_ratio: float
    meta: dict = field(default_factory=lambda: {"constants": dict(CONSTANTS_POLICY)})

    def verify(self) -> None:
        diff = self.filling.boundary().lift() - self.cycle.lift()
        if any(c % self.p for c in diff.coeffs.values()):
            raise InvariantViolation("certificate filling does not bound the cycle mod p")


def _mass_ratio(T: Chain, L: Chain, p: int) -> float:
    mL = mass_p(L.lift(), p) if L.coeffs else Fraction(0)
    if mL == 0:
        return 0.0
    k = L.dim
    return float(mass_p(T.lift(), p)) / float(mL) ** ((k + 1) / k)


def neighborhood_value(simplex, metric, dist_to_support) -> Fraction:
    """Filtration value at which a simplex joins the r-neighborhood of a
    support: all vertices within r, all pairwise distances within 2r."""
    value = max(dist_to_support[v] for v in simplex)
    for i, a in enumerate(simplex):
        for b in simplex[i + 1 :]:
            half = metric.d(a, b) / 2
            if half > value:
                value = half
    return value


def _distances_to_support(complex, metric, support_vertices):
    sv = list(support_vertices)
    return {
        v: min(metric.d(v, w) for w in sv) if sv else Fraction(0)
        for v in complex.vertices()
    }


def chain_neighborhood_radius(T: Chain, L: Chain, metric) -> Fraction:
    if not T.coeffs:
        return Fraction(0)
    dist = _distances_to_support(T.complex, metric, L.vertex_support())
    return max(neighborhood_value(s, metric, dist) for s in T.coeffs)


def isoperimetric_fill(L: Chain, p: int, metric=None) -> FillingCertificate:
    """Fill by decomposing into ball-supported pieces and coning each piece
    at its covering center.  The certificate's mass_ratio is the empirical
    isoperimetric constant for this instance; no universal value is claimed.
    """
    L = _require_cycle(L, p)
    metric = metric or L.complex.metric or L.complex.path_metric()
    if L.is_zero():
        cert = FillingCertificate(
            L, Chain.zero(L.complex, L.dim + 1, p), p, Fraction(0), 0.0
        )
        cert.verify()
        return cert
    decomp = decompose_cycle(L, p, metric)
    if decomp.remainder.coeffs:
        raise InvariantViolation("decomposition left a nonzero remainder")
    T = Chain.zero(L.complex, L.dim + 1, p)
    for piece in decomp.pieces:
        T = T + cone_fill(piece.chain, piece.center)
    cert = FillingCertificate(
        L, T, p, chain_neighborhood_radius(T, L, metric), _mass_ratio(T, L, p)
    )
    cert.meta["pieces"] = len(decomp.pieces)
    cert.meta["rounds"] = decomp.rounds
    cert.verify()
    return cert


# ---------------------------------------------------------------------------
# Filling radius and filling volume


def _gf2_system(ambient, k, taus, L: Chain):
    """Rows of the GF(2) system dT = L over the given (k+1)-simplices."""
    tau_pos = {t: i for i, t in enumerate(taus)}
    row_of: dict = {}
    for t in taus:
        for f, _ in boundary_faces(t):
            row_of[f] = row_of.get(f, 0) | (1 << tau_pos[t])
    for s in L.coeffs:
        row_of.setdefault(s, 0)
    sigmas = sorted(row_of)
    rows = [row_of[s] for s in sigmas]
    rhs = [abs(L.coeffs.get(s, 0)) % 2 for s in sigmas]
    return rows, rhs


def filling_radius(L: Chain, ambient, profile: bool = False):
    """Smallest neighborhood radius of supp(L) in which L bounds mod 2.

    Returns (r*, certificate).  Candidate radii are the finitely many values
    where the neighborhood subcomplex changes; solvability is monotone in r,
    so a binary search over the sorted candidates finds the infimum exactly,
    and it is attained.
    """
    p = 2
    if L.modulus is None:
        L = L.reduce_mod(p)
    elif L.modulus != p:
        raise ValueError("filling radius is computed mod 2")
    if L.dim >= 1 and not L.is_cycle_mod(p):
        raise ValueError("chain is not a cycle mod 2")
    metric = ambient.metric or ambient.path_metric()
    k = L.dim
    taus = list(ambient.simplices(k + 1))
    dist = _distances_to_support(ambient, metric, L.vertex_support())
    tagged = sorted(
        ((neighborhood_value(t, metric, dist), t) for t in taus),
        key=lambda pair: (pair[0], pair[1]),
    )
    values = [v for v, _ in tagged]
    ordered = [t for _, t in tagged]
    candidates = sorted({Fraction(0), *values})

    trace = []

    def attempt(r):
        n = bisect.bisect_right(values, r)
        prefix = ordered[:n]
        rows, rhs = _gf2_system(ambient, k, prefix, L)
        sol = gf2.solve(rows, len(prefix), rhs)
        if profile:
            trace.append({"radius": r, "simplices": n, "solvable": sol is not None})
        return sol

    if L.is_zero():
        cert = FillingCertificate(L, Chain.zero(ambient, k + 1, p), p, Fraction(0), 0.0)
        cert.verify()
        if profile:
            cert.meta["profile"] = [{"radius": Fraction(0), "simplices": 0, "solvable": True}]
        return Fraction(0), cert

    lo, hi = 0, len(candidates) - 1
    solutions: dict[int, int] = {}
    top = attempt(candidates[hi])
    if top is None:
        raise Infeasible("cycle not null-homologous mod 2 in ambient")
    solutions[hi] = top
    while lo < hi:
        mid = (lo + hi) // 2
        sol = attempt(candidates[mid])
        if sol is None:
            lo = mid + 1
        else:
            solutions[mid] = sol
            hi = mid
    r_star = candidates[hi]
    n = bisect.bisect_right(values, r_star)
    T = _bits_to_chain(ambient, ordered[:n], solutions[hi], k + 1, p)
    cert = FillingCertificate(L, T, p, r_star, _mass_ratio(T, L, p))
    if profile:
        cert.meta["profile"] = trace
    cert.verify()
    return r_star, cert


def _bits_to_chain(ambient, taus, bits: int, dim: int, p: int) -> Chain:
    coeffs = {}
    b = bits
    while b:
        i = (b & -b).bit_length() - 1
        b &= b - 1
        coeffs[taus[i]] = 1
    return Chain(ambient, dim, coeffs, p)


def filling_volume(
    L: Chain,
    p: int = 2,
    mode: str = "exact",
    exact_cap: int = 22,
    metric=None,
) -> FillingCertificate:
    """Minimal filling mass mod p.

    Exact mode minimizes mass_p(T) over all solutions of dT = L mod p by a
    branch-and-bound walk over the nullspace of the boundary system (p = 2
    bit-packed; odd primes via dense elimination).  Greedy mode returns the
    isoperimetric certificate instead.
    """
    if mode == "greedy":
        return isoperimetric_fill(L, p, metric)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    L = _require_cycle(L, p)
    ambient = L.complex
    if metric is None:
        metric = ambient.metric
    if metric is None:
        try:
            metric = ambient.path_metric()
        except ValueError:
            metric = None  # purely combinatorial ambient: no radius report
    k = L.dim
    taus = list(ambient.simplices(k + 1))
    weights = [ambient.weight(t) for t in taus]

    if L.is_zero():
        cert = FillingCertificate(L, Chain.zero(ambient, k + 1, p), p, Fraction(0), 0.0)
        cert.verify()
        return cert

    if p == 2:
        rows, rhs = _gf2_system(ambient, k, taus, L)
        particular, basis = gf2.solve_full(rows, len(taus), rhs)
        if particular is None:
            raise Infeasible("cycle not null-homologous mod 2 in ambient")
        if len(basis) > exact_cap:
            raise ValueError(
                f"nullspace dimension {len(basis)} exceeds exact_cap={exact_cap}; "
                "use mode='greedy'"
            )
        best_bits = _min_weight_gf2(particular, basis, weights)
        T = _bits_to_chain(ambient, taus, best_bits, k + 1, p)
    else:
        tau_pos = {t: i for i, t in enumerate(taus)}
        row_index: dict = {}
        for t in taus:
            for f, _ in boundary_faces(t):
                row_index.setdefault(f, len(row_index))
        for s in L.coeffs:
            row_index.setdefault(s, len(row_index))
        rows = [[0] * len(taus) for _ in row_index]
        for t in taus:
            for f, sign in boundary_faces(t):
                rows[row_index[f]][tau_pos[t]] += sign
        rhs = [0] * len(row_index)
        for s, c in L.coeffs.items():
            rhs[row_index[s]] = c
        particular, basis = modp.solve_full(rows, rhs, p)
        if particular is None:
            raise Infeasible(f"cycle not null-homologous mod {p} in ambient")
        if len(basis) * math.log2(p) > exact_cap:
            raise ValueError(
                f"coset of size {p}^{len(basis)} exceeds exact_cap; use mode='greedy'"
            )
        best = _min_weight_modp(particular, basis, weights, p)
        T = Chain(ambient, k + 1, {taus[i]: c for i, c in enumerate(best) if c % p}, p)

    radius = chain_neighborhood_radius(T, L, metric) if metric is not None else None
    cert = FillingCertificate(L, T, p, radius, _mass_ratio(T, L, p))
    cert.verify()
    return cert


def _weight_of_bits(bits: int, weights) -> Fraction:
    total = Fraction(0)
    while bits:
        i = (bits & -bits).bit_length() - 1
        bits &= bits - 1
        total += weights[i]
    return total


def _flip_delta(vec: int, flip: int, weights) -> Fraction:
    """Weight change of vec ^ flip relative to vec."""
    delta = Fraction(0)
    bits = flip
    while bits:
        i = (bits & -bits).bit_length() - 1
        bits &= bits - 1
        delta += -weights[i] if (vec >> i) & 1 else weights[i]
    return delta


def _min_weight_gf2(particular: int, basis, weights):
    """Minimum-weight vector in particular + span(basis) over GF(2).

    Greedy warm start, then depth-first branch and bound: the suffix bound
    discounts the full weight of every coordinate that remaining basis
    vectors could still clear.
    """
    current = particular
    improved = True
    while improved:
        improved = False
        for b in basis:
            if _flip_delta(current, b, weights) < 0:
                current ^= b
                improved = True
    best_bits = current
    best_weight = _weight_of_bits(current, weights)

    d = len(basis)
    reach = [_weight_of_bits(b, weights) for b in basis]
    suffix = [Fraction(0)] * (d + 1)
    for i in range(d - 1, -1, -1):
        suffix[i] = suffix[i + 1] + reach[i]

    def dfs(i, vec, weight):
        nonlocal best_bits, best_weight
        if weight - suffix[i] >= best_weight:
            return
        if i == d:
            if weight < best_weight:
                best_bits, best_weight = vec, weight
            return
        w_flipped = weight + _flip_delta(vec, basis[i], weights)
        # Explore the cheaper branch first.
        if w_flipped < weight:
            dfs(i + 1, vec ^ basis[i], w_flipped)
            dfs(i + 1, vec, weight)
        else:
            dfs(i + 1, vec, weight)
            dfs(i + 1, vec ^ basis[i], w_flipped)

    dfs(0, particular, _weight_of_bits(particular, weights))
    return best_bits


def _min_weight_modp(particular, basis, weights, p: int):
    """Exhaustive coset walk over GF(p); sizes are capped by the caller."""
    from chainforge.complexes import reduce_coefficient

    def wt(vec):
        return sum(
            (weights[i] * abs(reduce_coefficient(c, p)) for i, c in enumerate(vec) if c % p),
            Fraction(0),
        )

    best = list(particular)
    best_w = wt(best)
    stack = [(0, list(particular))]
    while stack:
        i, vec = stack.pop()
        if i == len(basis):
            w = wt(vec)
            if w < best_w:
                best, best_w = vec, w
            continue
        for c in range(p):
            nxt = [(v + c * b) % p for v, b in zip(vec, basis[i])] if c else list(vec)
            stack.append((i + 1, nxt))
    return best
