"""Deterministic test-instance generators: sampled circles, flat and
hexagonal tori, the 6-vertex projective plane, a Klein bottle, wheels, and
seeded random complexes.

Generation is byte-reproducible: a fixed seed yields identical files.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction

from chainforge import io
from chainforge.complexes import Chain, WeightedComplex
from chainforge.metric import FiniteMetricSpace
from chainforge.rationals import rational_sqrt

SQRT2 = rational_sqrt(Fraction(2))
EQUILATERAL_AREA = rational_sqrt(Fraction(3, 16))  # unit side


def circle_metric(n: int, circumference=None) -> FiniteMetricSpace:
    """n points evenly spaced on a circle, arc-length distances."""
    C = Fraction(circumference) if circumference is not None else Fraction(n)
    step = C / n
    dist = [
        [step * min(abs(i - j), n - abs(i - j)) for j in range(n)]
        for i in range(n)
    ]
    return FiniteMetricSpace(dist)


def circle_complex(n: int, circumference=None) -> WeightedComplex:
    """The n-gon as a 1-complex with its arc metric attached."""
    metric = circle_metric(n, circumference)
    edges = [tuple(sorted((i, (i + 1) % n))) for i in range(n)]
    step = metric.d(0, 1)
    weights = {e: step for e in edges}
    return WeightedComplex(
        {0: [(i,) for i in range(n)], 1: sorted(edges)}, weights=weights, metric=metric
    )


def circle_cycle(K: WeightedComplex) -> Chain:
    return Chain(K, 1, {e: 1 for e in K.simplices(1)}, 2)


def flat_torus(kx: int, ky: int | None = None) -> WeightedComplex:
    """Unit square grid torus, squares split along a diagonal.

    Axis edges have length 1, diagonals sqrt(2), triangles area 1/2.
    """
    ky = ky or kx
    if kx < 3 or ky < 3:
        raise ValueError("torus grid needs at least 3 cells per direction")

    def vid(i, j):
        return (i % kx) * ky + (j % ky)

    return _grid_surface(kx, ky, vid)


def klein_bottle(k: int = 4) -> WeightedComplex:
    """k x k grid with an orientation-reversing horizontal wrap."""
    if k < 4:
        raise ValueError("Klein grid needs at least 4 cells per direction")

    def vid(i, j):
        if i >= k:
            i -= k
            j = -j
        return (i % k) * k + (j % k)

    return _grid_surface(k, k, vid)


def _grid_surface(kx, ky, vid) -> WeightedComplex:
    triangles = set()
    weights = {}
    half = Fraction(1, 2)
    for i in range(kx):
        for j in range(ky):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i, j + 1), vid(i + 1, j + 1)
            for tri in ((a, b, d), (a, c, d)):
                tri_s = tuple(sorted(tri))
                if len(set(tri_s)) != 3:
                    raise ValueError("degenerate grid triangle; enlarge the grid")
                triangles.add(tri_s)
                weights[tri_s] = half
            for e in ((a, b), (a, c), (b, d), (c, d)):
                weights[tuple(sorted(e))] = Fraction(1)
            weights[tuple(sorted((a, d)))] = SQRT2
    K = WeightedComplex.from_simplices(sorted(triangles), weights=weights)
    return K


def hex_torus(k: int) -> WeightedComplex:
    """Equilateral triangulation of the flat hexagonal torus: all edges unit,
    all triangles equilateral.  The Loewner-extremal metric."""
    if k < 3:
        raise ValueError("hexagonal torus needs k >= 3")

    def vid(i, j):
        return (i % k) * k + (j % k)

    triangles = set()
    weights = {}
    for i in range(k):
        for j in range(k):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)
            for tri in ((a, b, c), (b, c, d)):
                tri_s = tuple(sorted(tri))
                triangles.add(tri_s)
                weights[tri_s] = EQUILATERAL_AREA
            for e in ((a, b), (a, c), (b, c), (b, d), (c, d)):
                weights[tuple(sorted(e))] = Fraction(1)
    return WeightedComplex.from_simplices(sorted(triangles), weights=weights)


RP2_FACES = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5),
]


def rp2_minimal() -> WeightedComplex:
    """The 6-vertex projective plane with unit edges: the smallest closed
    nonorientable surface, and the motivating mod-2 example."""
    weights = {}
    for f in RP2_FACES:
        weights[f] = EQUILATERAL_AREA
        for i in range(3):
            weights[f[:i] + f[i + 1 :]] = Fraction(1)
    return WeightedComplex.from_simplices(RP2_FACES, weights=weights)


def tetrahedron_sphere() -> WeightedComplex:
    """Boundary of the right tetrahedron, with coordinates (an S^2)."""
    coords = {0: (0, 0, 0), 1: (1, 0, 0), 2: (0, 1, 0), 3: (0, 0, 1)}
    faces = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    return WeightedComplex.from_simplices(faces, coords=coords)


def wheel_complex(n: int = 6) -> WeightedComplex:
    """Rim n-gon with unit edges plus a hub at unit distance from every rim
    vertex; triangles hub-i-(i+1).  Hub is vertex n."""
    hub = n
    triangles = [tuple(sorted((i, (i + 1) % n, hub))) for i in range(n)]
    weights = {}
    for t in triangles:
        weights[t] = EQUILATERAL_AREA
        for i in range(3):
            weights[t[:i] + t[i + 1 :]] = Fraction(1)
    K = WeightedComplex.from_simplices(triangles, weights=weights)
    return K


def wheel_rim_cycle(K: WeightedComplex, n: int = 6) -> Chain:
    edges = [tuple(sorted((i, (i + 1) % n))) for i in range(n)]
    return Chain(K, 1, {e: 1 for e in edges}, 2)


# ---------------------------------------------------------------------------
# Seeded randomness


def rng_for(seed: int) -> random.Random:
    return random.Random(seed)


def random_points_metric(rng: random.Random, n: int, box: int = 12) -> FiniteMetricSpace:
    """Distinct random rational points in a square, sup-norm distances."""
    pts = set()
    while len(pts) < n:
        pts.add((Fraction(rng.randint(0, 4 * box), 4), Fraction(rng.randint(0, 4 * box), 4)))
    return FiniteMetricSpace.from_coords(sorted(pts))


def random_complex(
    rng: random.Random,
    n_vertices: int = 6,
    n_triangles: int = 4,
    n_extra_edges: int = 3,
    max_dim: int = 2,
) -> WeightedComplex:
    """Small random complex with random positive rational weights."""
    tops = set()
    if max_dim >= 2:
        while len(tops) < n_triangles:
            tops.add(tuple(sorted(rng.sample(range(n_vertices), 3))))
    edges = set()
    while len(edges) < n_extra_edges:
        edges.add(tuple(sorted(rng.sample(range(n_vertices), 2))))
    simplices = sorted(tops) + sorted(edges) + [(v,) for v in range(n_vertices)]
    K = WeightedComplex.from_simplices(simplices)
    weights = {}
    for k in range(1, K.dim + 1):
        for s in K.simplices(k):
            weights[s] = Fraction(rng.randint(1, 8), 2)
    return WeightedComplex(
        {k: K.simplices(k) for k in range(K.dim + 1)}, weights=weights
    )


def random_chain(
    rng: random.Random,
    K: WeightedComplex,
    dim: int,
    max_coeff: int = 4,
    density: float = 0.7,
) -> Chain:
    coeffs = {}
    for s in K.simplices(dim):
        if rng.random() < density:
            c = rng.randint(1, max_coeff) * rng.choice((1, -1))
            coeffs[s] = c
    return Chain(K, dim, coeffs)


def random_vertex_function(rng: random.Random, K: WeightedComplex):
    return {v: Fraction(rng.randint(-12, 12), rng.randint(1, 3)) for v in K.vertices()}


# ---------------------------------------------------------------------------
# Corpus directory


def generate_corpus(
    seed: int,
    outdir,
    circle_sizes=(12, 24, 48),
    torus_sizes=(3, 4, 5, 6),
    n_random: int = 3,
) -> dict:
    """Write the instance files used by the harness; returns the manifest.

    Deterministic: the same seed writes byte-identical files.
    """
    import os

    os.makedirs(outdir, exist_ok=True)
    rng = rng_for(seed)
    files = {}

    def emit_json(name, data):
        path = os.path.join(outdir, name)
        with open(path, "w") as fh:
            fh.write(json.dumps(io.json_ready(data), indent=2, sort_keys=True) + "\n")
        files[name] = io.sha256_file(path)

    for n in circle_sizes:
        K = circle_complex(n)
        io.write_metric_csv(os.path.join(outdir, f"circle{n}.csv"), K.metric)
        files[f"circle{n}.csv"] = io.sha256_file(os.path.join(outdir, f"circle{n}.csv"))
        emit_json(f"circle{n}.complex.json", io.complex_to_json(K))
        emit_json(f"circle{n}.cycle.json", io.chain_to_json(circle_cycle(K)))

    for k in torus_sizes:
        K = flat_torus(k)
        emit_json(f"torus{k}x{k}.json", io.complex_to_json(K))
        fc = Chain(K, 2, {s: 1 for s in K.simplices(2)}, 2)
        emit_json(f"torus{k}x{k}.fclass.json", io.chain_to_json(fc))

    emit_json("hextorus4.json", io.complex_to_json(hex_torus(4)))
    emit_json("rp2.json", io.complex_to_json(rp2_minimal()))
    emit_json("klein4.json", io.complex_to_json(klein_bottle(4)))
    emit_json("wheel6.json", io.complex_to_json(wheel_complex(6)))

    sphere = tetrahedron_sphere()
    io.write_off(os.path.join(outdir, "sphere.off"), sphere)
    files["sphere.off"] = io.sha256_file(os.path.join(outdir, "sphere.off"))

    for i in range(n_random):
        K = random_complex(rng, n_vertices=6, n_triangles=4)
        emit_json(f"random{i}.complex.json", io.complex_to_json(K))
        T = random_chain(rng, K, 1)
        emit_json(f"random{i}.chain.json", io.chain_to_json(T))

    manifest_path = os.path.join(outdir, "manifest.json")
    with open(manifest_path, "w") as fh:
        fh.write(json.dumps({"seed": seed, "files": files}, indent=2, sort_keys=True) + "\n")
    return {"seed": seed, "files": files}
