"""Mod-2 fundamental classes, systoles of triangulated surfaces, and the
inequality-chain verification harness.

The systole here is the shortest Z_2-homologically-nontrivial edge cycle in
the mesh graph: a lower bound for the homotopy systole that agrees with it
on tori and the projective plane.  Nontriviality is read off from cocycle
signatures, and shortest representatives come from Dijkstra runs in the
signature covering graph.
"""

from __future__ import annotations

import heapq
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from chainforge import gf2
from chainforge.complexes import Chain, InvariantViolation, WeightedComplex
from chainforge.filling import CONSTANTS_POLICY, filling_radius, filling_volume
from chainforge.flatnorm import mass
from chainforge.metric import build_rips, kuratowski_embed, maximal_epsilon_net


def thread_budget() -> int:
    env = os.environ.get("CHAINFORGE_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


class ClosedManifoldComplex:
    """A weighted complex whose every ridge lies in exactly two facets
    (closed pseudo-manifold) with a connected facet adjacency graph."""

    def __init__(self, complex: WeightedComplex):
        self.complex = complex
        self.n = complex.dim
        if self.n < 1:
            raise ValueError("need a complex of dimension at least 1")
        self.incidence = self._check_closed()
        self._check_connected()

    def _check_closed(self):
        counts: dict = {s: 0 for s in self.complex.simplices(self.n - 1)}
        for top in self.complex.simplices(self.n):
            for i in range(len(top)):
                counts[top[:i] + top[i + 1 :]] += 1
        bad = [s for s, c in counts.items() if c != 2]
        if bad:
            raise ValueError(
                f"not a closed pseudo-manifold: {len(bad)} ridge(s) with incidence != 2, "
                f"e.g. {bad[:5]}"
            )
        return counts

    def _check_connected(self):
        tops = self.complex.simplices(self.n)
        if not tops:
            raise ValueError("no top-dimensional simplices")
        by_ridge: dict = {}
        for i, top in enumerate(tops):
            for j in range(len(top)):
                by_ridge.setdefault(top[:j] + top[j + 1 :], []).append(i)
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in range(len(tops[i])):
                for nb in by_ridge[tops[i][:j] + tops[i][j + 1 :]]:
                    if nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
        if len(seen) != len(tops):
            raise ValueError("facet adjacency graph is not connected")

    def volume(self) -> Fraction:
        return sum(
            (self.complex.weight(s) for s in self.complex.simplices(self.n)),
            Fraction(0),
        )


def fundamental_class(M: ClosedManifoldComplex) -> Chain:
    """Every top simplex with coefficient 1 mod 2; boundary verified zero.

    Canonical: no orientation choice enters mod 2.
    """
    K = M.complex
    cls = Chain(K, M.n, {s: 1 for s in K.simplices(M.n)}, 2)
    if not cls.boundary().is_zero():
        raise InvariantViolation("fundamental class has nonzero boundary mod 2")
    return cls


# ---------------------------------------------------------------------------
# Z_2 homology signatures for edge cycles


class EdgeSignatures:
    """Cocycle functionals separating H_1(.; Z_2).

    sig(cycle) is zero exactly on cycles that bound; it is computed per edge
    and accumulated by xor, so any closed walk gets a well-defined signature.
    """

    def __init__(self, complex: WeightedComplex):
        self.complex = complex
        edges = list(complex.simplices(1))
        self.edges = edges
        self.edge_pos = {e: i for i, e in enumerate(edges)}
        ne = len(edges)
        verts = complex.vertices()
        vpos = {v: i for i, v in enumerate(verts)}
        vertex_rows = [0] * len(verts)
        for i, (a, b) in enumerate(edges):
            vertex_rows[vpos[a]] |= 1 << i
            vertex_rows[vpos[b]] |= 1 << i
        cycle_basis = gf2.nullspace(vertex_rows, ne)
        tri_rows = []
        for t in complex.simplices(2):
            bits = 0
            for j in range(3):
                bits |= 1 << self.edge_pos[t[:j] + t[j + 1 :]]
            tri_rows.append(bits)
        cocycles = gf2.nullspace(tri_rows, ne)
        # Keep cocycles that are independent as functionals on the cycle space.
        target = len(cycle_basis) - gf2.rank(tri_rows, ne)
        chosen = []
        span_by_msb: dict[int, int] = {}
        for y in cocycles:
            fingerprint = 0
            for j, z in enumerate(cycle_basis):
                if (y & z).bit_count() & 1:
                    fingerprint |= 1 << j
            if _xor_basis_insert(span_by_msb, fingerprint):
                chosen.append(y)
                if len(chosen) == target:
                    break
        if len(chosen) != target:
            raise InvariantViolation("could not separate H_1 with cocycle functionals")
        self.functionals = chosen
        self.betti = target

    def edge_signature(self, edge) -> int:
        i = self.edge_pos[tuple(edge)]
        sig = 0
        for j, y in enumerate(self.functionals):
            if (y >> i) & 1:
                sig |= 1 << j
        return sig

    def cycle_signature(self, chain: Chain) -> int:
        bits = 0
        for e, c in chain.coeffs.items():
            if c % 2:
                bits |= 1 << self.edge_pos[e]
        sig = 0
        for j, y in enumerate(self.functionals):
            if (y & bits).bit_count() & 1:
                sig |= 1 << j
        return sig


def _xor_basis_insert(basis_by_msb: dict, v: int) -> bool:
    """Insert into an xor basis keyed by highest set bit; False if dependent."""
    while v:
        msb = v.bit_length() - 1
        if msb not in basis_by_msb:
            basis_by_msb[msb] = v
            return True
        v ^= basis_by_msb[msb]
    return False


@dataclass
class SystoleReport:
    sys: Fraction | None = None  # None encodes +infinity (trivial H_1)
    witness: Chain | None = None
    fillrad: Fraction | None = None
    fillvol: Fraction | None = None
    vol: Fraction | None = None
    epsilon: Fraction | None = None
    ratios: dict = field(default_factory=dict)
    passes: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    meta: dict = field(default_factory=lambda: {"constants": dict(CONSTANTS_POLICY)})


def systole(M: ClosedManifoldComplex) -> SystoleReport:
    """Shortest Z_2-nontrivial edge cycle of a closed surface mesh.

    Exhaustive over basepoints: a Dijkstra run in the signature covering
    graph per vertex.  Reports sys = None (infinity) when H_1(.; Z_2) = 0.
    """
    if M.n != 2:
        raise ValueError("systole computation expects a closed surface (n = 2)")
    return _systole_graph(M.complex)


def _systole_graph(K: WeightedComplex) -> SystoleReport:
    sigs = EdgeSignatures(K)
    report = SystoleReport()
    if sigs.betti == 0:
        return report
    verts = K.vertices()
    vpos = {v: i for i, v in enumerate(verts)}
    adj: list[list[tuple[int, Fraction, int]]] = [[] for _ in verts]
    for e in K.simplices(1):
        a, b = vpos[e[0]], vpos[e[1]]
        w = K.weight(e)
        sig = sigs.edge_signature(e)
        adj[a].append((b, w, sig))
        adj[b].append((a, w, sig))
    sheets = 1 << len(sigs.functionals)

    best: tuple[Fraction, int] | None = None
    best_path = None
    for src in range(len(verts)):
        dist: dict[tuple[int, int], Fraction] = {(src, 0): Fraction(0)}
        parent: dict[tuple[int, int], tuple] = {}
        heap = [(Fraction(0), src, 0)]
        while heap:
            d, v, sheet = heapq.heappop(heap)
            if dist.get((v, sheet)) != d:
                continue
            if best is not None and d >= best[0]:
                continue
            for u, w, sig in adj[v]:
                nd = d + w
                key = (u, sheet ^ sig)
                if key not in dist or nd < dist[key]:
                    dist[key] = nd
                    parent[key] = (v, sheet, (verts[v], verts[u]))
                    heapq.heappush(heap, (nd, u, sheet ^ sig))
        for sheet in range(1, sheets):
            d = dist.get((src, sheet))
            if d is not None and (best is None or d < best[0]):
                best = (d, sheet)
                path = []
                key = (src, sheet)
                while key != (src, 0):
                    v, s, edge = parent[key]
                    path.append(edge)
                    key = (v, s)
                best_path = path

    if best is None:
        return report
    coeffs: dict = {}
    for a, b in best_path:
        e = (a, b) if a < b else (b, a)
        coeffs[e] = coeffs.get(e, 0) + 1
    witness = Chain(K, 1, coeffs, 2)
    if witness.dim >= 1 and not witness.boundary().is_zero():
        raise InvariantViolation("systole witness is not a cycle mod 2")
    if sigs.cycle_signature(witness) == 0:
        raise InvariantViolation("systole witness has trivial signature")
    report.sys = best[0]
    report.witness = witness
    return report


def systole_by_enumeration(K: WeightedComplex, cap: int = 22):
    """Independent oracle: enumerate the whole cycle space and take the
    lightest element with nonzero signature.  Only for small complexes."""
    sigs = EdgeSignatures(K)
    if sigs.betti == 0:
        return None
    edges = sigs.edges
    verts = K.vertices()
    vpos = {v: i for i, v in enumerate(verts)}
    vertex_rows = [0] * len(verts)
    for i, (a, b) in enumerate(edges):
        vertex_rows[vpos[a]] |= 1 << i
        vertex_rows[vpos[b]] |= 1 << i
    basis = gf2.nullspace(vertex_rows, len(edges))
    if len(basis) > cap:
        raise ValueError(f"cycle space dimension {len(basis)} exceeds cap {cap}")
    weights = [K.weight(e) for e in edges]

    def wt(bits):
        total = Fraction(0)
        while bits:
            i = (bits & -bits).bit_length() - 1
            bits &= bits - 1
            total += weights[i]
        return total

    def sig_of(bits):
        s = 0
        for j, y in enumerate(sigs.functionals):
            if (y & bits).bit_count() & 1:
                s |= 1 << j
        return s

    best = None
    for mask in range(1, 1 << len(basis)):
        vec = 0
        m = mask
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            vec ^= basis[j]
        if sig_of(vec) and (best is None or wt(vec) < best):
            best = wt(vec)
    return best


# ---------------------------------------------------------------------------
# The inequality-chain harness


def _mesh_epsilon(K: WeightedComplex) -> Fraction:
    longest = max((K.weight(e) for e in K.simplices(1)), default=Fraction(0))
    return longest / 2


def verify_chain(
    M: ClosedManifoldComplex,
    epsilon=None,
    fillvol_mode: str = "auto",
    max_simplices: int = 500_000,
) -> SystoleReport:
    """Compute Sys, FillRad, FillVol and Vol and the ratios of the
    inequality chain Sys <= 6 FillRad <= Const FillVol^(1/(n+1)) <= Const
    Vol^(1/n).

    Only the first leg gets a pass/fail (with the 24 epsilon net slack); the
    middle constants are existence-only, so those legs are reported as bare
    ratios.  The ambient for the filling legs is the full-scale Rips complex
    over the Kuratowski image of the mesh path metric.
    """
    K = M.complex
    n = M.n
    report = SystoleReport()
    report.vol = M.volume()

    t0 = time.monotonic()
    metric = K.path_metric()
    report.timings["metric"] = time.monotonic() - t0

    eps_used = Fraction(epsilon) if epsilon is not None else None
    net = maximal_epsilon_net(metric, eps_used) if eps_used else list(range(metric.n))
    embedding = kuratowski_embed(metric, net)
    slack_eps = max(eps_used or Fraction(0), _mesh_epsilon(K))
    report.epsilon = slack_eps

    def sys_leg():
        if n == 1:
            # A closed connected 1-manifold is a circle; its only nontrivial
            # class is the whole loop.
            return _systole_graph(K)
        return systole(M)

    def fill_leg():
        space = embedding.as_metric_space()
        ambient = build_rips(
            space,
            scale=space.diameter(),
            max_dim=n + 1,
            max_simplices=max_simplices,
        )
        L = Chain(ambient, n, {s: 1 for s in K.simplices(n)}, 2)
        r_star, cert = filling_radius(L, ambient)
        mode = fillvol_mode
        if mode == "auto":
            mode = "exact" if len(ambient.simplices(n + 1)) <= 2000 else "greedy"
        if mode == "greedy":
            vol_cert = filling_volume(L, 2, mode="greedy")
        else:
            try:
                vol_cert = filling_volume(L, 2, mode="exact")
            except ValueError:
                mode = "greedy"
                vol_cert = filling_volume(L, 2, mode="greedy")
        return r_star, cert, vol_cert, mode

    with ThreadPoolExecutor(max_workers=thread_budget()) as pool:
        sys_future = pool.submit(sys_leg)
        fill_future = pool.submit(fill_leg)
        t1 = time.monotonic()
        sys_report = sys_future.result()
        report.timings["systole"] = time.monotonic() - t1
        r_star, cert, vol_cert, used_mode = fill_future.result()
        report.timings["filling"] = time.monotonic() - t1

    report.sys = sys_report.sys
    report.witness = sys_report.witness
    report.fillrad = r_star
    report.fillvol = mass(vol_cert.filling)
    report.meta["fillvol_mode"] = used_mode
    report.meta["fillrad_certificate_radius"] = cert.radius

    vol = report.vol
    fv = report.fillvol
    report.ratios = {
        "sys_over_6fillrad": _safe_ratio(report.sys, 6 * r_star),
        "6fillrad_over_fillvol_root": _safe_ratio(
            6 * r_star, _float_root(fv, n + 1)
        ),
        "fillvol_root_over_vol_root": (
            _float_root(fv, n + 1) / _float_root(vol, n)
            if fv and vol
            else None
        ),
        "fillrad_over_vol_root": _safe_ratio(r_star, _float_root(vol, n)),
    }
    if report.sys is not None:
        report.passes["sys_le_6fillrad_plus_slack"] = (
            report.sys <= 6 * r_star + 24 * slack_eps
        )
    return report


def _float_root(x, k: int):
    if x is None:
        return None
    return float(x) ** (1.0 / k) if x > 0 else 0.0


def _safe_ratio(a, b):
    if a is None or b is None:
        return None
    fb = float(b)
    if fb == 0.0:
        return None
    return float(a) / fb


def orientable(M: ClosedManifoldComplex) -> bool:
    """2-color facet orientations across shared ridges; orientable iff
    globally consistent."""
    if M.n != 2:
        raise ValueError("orientability check implemented for surfaces")
    tops = M.complex.simplices(2)
    by_edge: dict = {}
    for i, t in enumerate(tops):
        for j in range(3):
            by_edge.setdefault(t[:j] + t[j + 1 :], []).append(i)
    orient = {0: 1}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(3):
            edge = tops[i][:j] + tops[i][j + 1 :]
            for nb in by_edge[edge]:
                if nb == i:
                    continue
                # Consistent orientations traverse a shared edge oppositely;
                # with canonical vertex orders, compare the face signs.
                si = _edge_sign(tops[i], edge)
                sn = _edge_sign(tops[nb], edge)
                needed = -orient[i] if si == sn else orient[i]
                if nb not in orient:
                    orient[nb] = needed
                    stack.append(nb)
                elif orient[nb] != needed:
                    return False
    return True


def _edge_sign(triangle, edge) -> int:
    missing = next(v for v in triangle if v not in edge)
    return -1 if triangle.index(missing) % 2 else 1


def loewner_check(M: ClosedManifoldComplex) -> dict:
    """Torus inequality Sys^2 <= (2/sqrt(3)) Area, compared exactly via
    3 Sys^4 <= 4 Area^2 with a 2^-48 relative tolerance absorbing weight
    quantization at the extremal (equality) case."""
    if M.n != 2:
        raise ValueError("Loewner check expects a surface")
    euler = (
        len(M.complex.simplices(0))
        - len(M.complex.simplices(1))
        + len(M.complex.simplices(2))
    )
    if euler != 0 or not orientable(M):
        raise ValueError("Loewner check expects a torus (Euler 0, orientable)")
    rep = systole(M)
    if rep.sys is None:
        raise ValueError("torus must have nontrivial H_1")
    area = M.volume()
    lhs = 3 * rep.sys**4
    rhs = 4 * area**2
    tol = Fraction(1, 2**48)
    passed = lhs <= rhs * (1 + tol)
    ratio = float(rep.sys**2) / (2.0 / math.sqrt(3.0) * float(area))
    return {
        "sys": rep.sys,
        "area": area,
        "sys_squared": rep.sys**2,
        "bound": "2/sqrt(3) * area",
        "ratio": ratio,
        "passes": passed,
        "witness": rep.witness,
    }
