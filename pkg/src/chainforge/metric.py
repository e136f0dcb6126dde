"""Finite metric spaces, separated nets, sup-norm distance embeddings and
Vietoris-Rips ambient complexes.

Distances are exact rationals throughout; no float ever enters an invariant
check.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from chainforge.complexes import WeightedComplex


class BudgetExceeded(RuntimeError):
    """A generated complex would exceed the configured simplex budget."""


class FiniteMetricSpace:
    """Symmetric rational distance matrix with zero diagonal.

    Validates symmetry, positivity off the diagonal, and the triangle
    inequality for every triple.
    """

    def __init__(self, dist, validate: bool = True):
        self.dist = tuple(tuple(Fraction(x) for x in row) for row in dist)
        self.n = len(self.dist)
        if validate:
            self._validate()

    def _validate(self):
        n, d = self.n, self.dist
        for i in range(n):
            if len(d[i]) != n:
                raise ValueError("distance matrix is not square")
            if d[i][i] != 0:
                raise ValueError(f"nonzero diagonal at {i}")
            for j in range(i + 1, n):
                if d[i][j] != d[j][i]:
                    raise ValueError(f"asymmetric at ({i},{j})")
                if d[i][j] <= 0:
                    raise ValueError(f"nonpositive distance at ({i},{j})")
        for i in range(n):
            for j in range(i + 1, n):
                dij = d[i][j]
                for k in range(n):
                    if dij > d[i][k] + d[k][j]:
                        raise ValueError(f"triangle inequality fails for ({i},{j},{k})")

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    def diameter(self) -> Fraction:
        return max((self.dist[i][j] for i in range(self.n) for j in range(i + 1, self.n)), default=Fraction(0))

    def min_positive(self) -> Fraction:
        return min((self.dist[i][j] for i in range(self.n) for j in range(i + 1, self.n)), default=Fraction(0))

    @classmethod
    def from_coords(cls, points, norm: str = "linf") -> "FiniteMetricSpace":
        pts = [tuple(Fraction(x) for x in p) for p in points]
        if norm == "linf":
            dist = [[max((abs(a - b) for a, b in zip(p, q)), default=Fraction(0)) for q in pts] for p in pts]
        elif norm == "l1":
            dist = [[sum(abs(a - b) for a, b in zip(p, q)) for q in pts] for p in pts]
        else:
            raise ValueError(f"unsupported norm {norm!r} (rational norms only)")
        return cls(dist)


def shortest_path_distances(complex: WeightedComplex):
    """All-pairs shortest paths along weighted edges (exact Dijkstra)."""
    verts = complex.vertices()
    pos = {v: i for i, v in enumerate(verts)}
    adj: list[list[tuple[int, Fraction]]] = [[] for _ in verts]
    for (a, b) in complex.simplices(1):
        w = complex.weight((a, b))
        adj[pos[a]].append((pos[b], w))
        adj[pos[b]].append((pos[a], w))
    n = len(verts)
    dist = [[None] * n for _ in range(n)]
    for src in range(n):
        row = dist[src]
        row[src] = Fraction(0)
        heap = [(Fraction(0), src)]
        while heap:
            du, u = heapq.heappop(heap)
            if row[u] is not None and du > row[u]:
                continue
            for v, w in adj[u]:
                nd = du + w
                if row[v] is None or nd < row[v]:
                    row[v] = nd
                    heapq.heappush(heap, (nd, v))
        if any(x is None for x in row):
            raise ValueError("edge graph is not connected; path metric undefined")
    return dist


def maximal_epsilon_net(space: FiniteMetricSpace, epsilon) -> list[int]:
    """Maximal epsilon-separated net, greedy in index order from point 0.

    Postconditions hold exactly: net points are pairwise >= epsilon apart and
    every point lies strictly within epsilon of the net.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    net: list[int] = []
    for i in range(space.n):
        if all(space.d(i, q) >= epsilon for q in net):
            net.append(i)
    return net


@dataclass(frozen=True)
class Embedding:
    """Distance-function coordinates ``coords(x)[q] = d(x, q)`` indexed by a
    net, compared in the sup norm."""

    space: FiniteMetricSpace
    net: tuple[int, ...]
    coords: dict[int, tuple[Fraction, ...]]

    def sup_dist(self, x: int, y: int) -> Fraction:
        return max(abs(a - b) for a, b in zip(self.coords[x], self.coords[y]))

    def as_metric_space(self) -> FiniteMetricSpace:
        n = self.space.n
        dist = [[self.sup_dist(i, j) if i != j else Fraction(0) for j in range(n)] for i in range(n)]
        return FiniteMetricSpace(dist)


def kuratowski_embed(space: FiniteMetricSpace, net=None) -> Embedding:
    """Embed into sup-norm coordinates by distances to the net points.

    1-Lipschitz exactly; with the full net it is an isometry.
    """
    if net is None:
        net = list(range(space.n))
    net = tuple(net)
    if not net:
        raise ValueError("net must be nonempty")
    coords = {x: tuple(space.d(x, q) for q in net) for x in range(space.n)}
    return Embedding(space, net, coords)


def distortion(emb: Embedding) -> tuple[Fraction, Fraction]:
    """(expansion, contraction) = extreme ratios image distance / distance.

    Expansion is always <= 1; 1/contraction is the bi-Lipschitz constant.
    Degenerate spaces (fewer than two points) report (1, 1).
    """
    n = emb.space.n
    if n < 2:
        return Fraction(1), Fraction(1)
    ratios = [
        emb.sup_dist(i, j) / emb.space.d(i, j)
        for i in range(n)
        for j in range(i + 1, n)
    ]
    return max(ratios), min(ratios)


def build_rips(
    source,
    scale,
    max_dim: int,
    max_simplices: int = 500_000,
    lazy_weights: bool = True,
) -> WeightedComplex:
    """Vietoris-Rips complex at the given scale (pairwise distance <= scale).

    ``source`` is a FiniteMetricSpace or an Embedding (whose sup-norm metric
    is then used).  The metric rides along on the complex; weights use the
    Cayley-Menger volume with the diam**k/k! fallback.
    """
    scale = Fraction(scale)
    if scale <= 0:
        raise ValueError("scale must be positive")
    if max_dim < 1:
        raise ValueError("max_dim must be at least 1")
    space = source.as_metric_space() if isinstance(source, Embedding) else source
    n = space.n
    d = space.dist
    neighbors = [0] * n  # bitmask of higher-index neighbors
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] <= scale:
                neighbors[i] |= 1 << j

    simplices: dict[int, list] = {0: [(i,) for i in range(n)]}
    count = n
    frontier = [((i,), neighbors[i]) for i in range(n)]
    for k in range(1, max_dim + 1):
        level = []
        next_frontier = []
        for s, common in frontier:
            mask = common
            while mask:
                j = (mask & -mask).bit_length() - 1
                mask &= mask - 1
                t = s + (j,)
                level.append(t)
                count += 1
                if count > max_simplices:
                    raise BudgetExceeded(
                        f"Rips complex exceeds budget of {max_simplices} simplices "
                        f"(at least {count} at dimension {k})"
                    )
                if k < max_dim:
                    next_frontier.append((t, common & neighbors[j]))
        if not level:
            break
        simplices[k] = level
        frontier = next_frontier
    return WeightedComplex(simplices, metric=space, lazy_weights=lazy_weights)
