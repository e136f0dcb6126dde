"""Weighted simplicial complexes and sparse chains over Z or Z_p.

Simplices are strictly increasing vertex tuples (the canonical orientation);
boundary signs come from the alternating face sum, push-forward signs from
permutation parity.  Chain coefficients are exact ints (or Fractions for
relaxed optimization witnesses); mod-p chains store the representative of
smallest absolute value in [-p//2, p//2], ties at +p/2 for even p.

All types are immutable after construction and every operation is pure, so
values can be shared freely across threads.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping

from chainforge.rationals import cayley_menger_volume2, rational_sqrt

Simplex = tuple[int, ...]


class InvariantViolation(RuntimeError):
    """A certified postcondition failed on re-verification."""


def check_simplex(simplex) -> Simplex:
    s = tuple(int(v) for v in simplex)
    if any(a >= b for a, b in zip(s, s[1:])):
        raise ValueError(f"simplex vertices must be strictly increasing: {s}")
    return s


def boundary_faces(s: Simplex) -> list[tuple[Simplex, int]]:
    """Faces of s with alternating signs: [(s minus vertex i, (-1)**i)]."""
    return [(s[:i] + s[i + 1 :], -1 if i % 2 else 1) for i in range(len(s))]


def reduce_coefficient(m: int, p: int) -> int:
    """Representative of m mod p with smallest |value|; tie at p/2 goes to +p/2."""
    r = m % p
    return r - p if 2 * r > p else r


class WeightedComplex:
    """Finite simplicial complex with positive rational simplex weights.

    Weights are the k-dimensional volumes; every 0-simplex has weight 1.
    When ``coords`` are given, weights default to Cayley-Menger volumes; with
    only a metric the Cayley-Menger value is used when it is a positive
    Euclidean volume and falls back to diam(s)**k / k! otherwise.  Pass
    ``lazy_weights=True`` to defer weight computation until first use (large
    ambient complexes whose weights are rarely touched).
    """

    def __init__(
        self,
        simplices_by_dim: Mapping[int, Iterable[Simplex]],
        weights: Mapping[Simplex, Fraction] | None = None,
        coords: Mapping[int, tuple] | None = None,
        metric=None,
        lazy_weights: bool = False,
    ):
        by_dim: dict[int, tuple[Simplex, ...]] = {}
        for k in sorted(simplices_by_dim):
            sims = sorted({check_simplex(s) for s in simplices_by_dim[k]})
            if any(len(s) != k + 1 for s in sims):
                raise ValueError(f"dimension-{k} list contains wrong-size simplices")
            if sims:
                by_dim[k] = tuple(sims)
        self._by_dim = by_dim
        self._index = {k: {s: i for i, s in enumerate(v)} for k, v in by_dim.items()}
        self.coords = (
            {int(v): tuple(Fraction(x) for x in pt) for v, pt in coords.items()}
            if coords
            else None
        )
        self.metric = metric
        self._check_closure()
        self._weights: dict[Simplex, Fraction] = {}
        self._path_metric = None
        self._cofaces: dict[int, dict] = {}
        if weights:
            for s, w in weights.items():
                s = check_simplex(s)
                w = Fraction(w)
                if w <= 0:
                    raise ValueError(f"weight of {s} must be positive, got {w}")
                if len(s) == 1 and w != 1:
                    raise ValueError("0-simplices must have weight exactly 1")
                self._weights[s] = w
        if not lazy_weights:
            for k, sims in by_dim.items():
                for s in sims:
                    self.weight(s)

    @classmethod
    def from_simplices(cls, simplices, **kwargs) -> "WeightedComplex":
        """Build from arbitrary simplices, closing downward over faces."""
        closed: dict[int, set[Simplex]] = {}
        stack = [check_simplex(s) for s in simplices]
        seen = set(stack)
        while stack:
            s = stack.pop()
            closed.setdefault(len(s) - 1, set()).add(s)
            if len(s) > 1:
                for f, _ in boundary_faces(s):
                    if f not in seen:
                        seen.add(f)
                        stack.append(f)
        return cls({k: sorted(v) for k, v in closed.items()}, **kwargs)

    def _check_closure(self):
        for k, sims in self._by_dim.items():
            if k == 0:
                continue
            below = self._index.get(k - 1, {})
            for s in sims:
                for f, _ in boundary_faces(s):
                    if f not in below:
                        raise ValueError(f"face {f} of {s} missing (not downward closed)")

    # -- basic queries ----------------------------------------------------

    @property
    def dim(self) -> int:
        return max(self._by_dim) if self._by_dim else -1

    @property
    def n_vertices(self) -> int:
        return len(self._by_dim.get(0, ()))

    def vertices(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self._by_dim.get(0, ()))

    def simplices(self, k: int) -> tuple[Simplex, ...]:
        return self._by_dim.get(k, ())

    def has_simplex(self, s: Simplex) -> bool:
        return tuple(s) in self._index.get(len(s) - 1, {})

    def simplex_index(self, k: int) -> dict[Simplex, int]:
        return self._index.get(k, {})

    def cofaces(self, k: int) -> dict[Simplex, list[tuple[Simplex, int]]]:
        """Map from k-simplex to [(coface, boundary sign of this face)]."""
        if k not in self._cofaces:
            table: dict[Simplex, list] = {s: [] for s in self.simplices(k)}
            for t in self.simplices(k + 1):
                for f, sign in boundary_faces(t):
                    table[f].append((t, sign))
            self._cofaces[k] = table
        return self._cofaces[k]

    # -- weights -----------------------------------------------------------

    def weight(self, s: Simplex) -> Fraction:
        s = tuple(s)
        w = self._weights.get(s)
        if w is None:
            if not self.has_simplex(s):
                raise KeyError(f"{s} is not a simplex of this complex")
            w = self._compute_weight(s)
            if w <= 0:
                raise ValueError(f"computed weight of {s} is not positive")
            self._weights[s] = w
        return w

    def _compute_weight(self, s: Simplex) -> Fraction:
        k = len(s) - 1
        if k == 0:
            return Fraction(1)
        if self.coords is not None:
            sq = _coord_sq_dists(self.coords, s)
            vol2 = cayley_menger_volume2(sq)
            if vol2 <= 0:
                raise ValueError(f"degenerate simplex {s}: nonpositive squared volume")
            return rational_sqrt(vol2)
        if self.metric is not None:
            d = self.metric.d
            if k == 1:
                return d(s[0], s[1])
            sq = [[d(a, b) ** 2 for b in s] for a in s]
            vol2 = cayley_menger_volume2(sq)
            if vol2 > 0:
                return rational_sqrt(vol2)
            diam = max(d(a, b) for i, a in enumerate(s) for b in s[i + 1 :])
            return diam**k / factorial(k)
        return Fraction(1)

    def path_metric(self):
        """Shortest-path metric on vertices along weighted edges (cached)."""
        if self._path_metric is None:
            from chainforge.metric import FiniteMetricSpace, shortest_path_distances

            dist = shortest_path_distances(self)
            self._path_metric = FiniteMetricSpace(dist)
        return self._path_metric

    def __repr__(self):
        counts = ", ".join(f"{k}:{len(v)}" for k, v in sorted(self._by_dim.items()))
        return f"WeightedComplex({counts})"


def _coord_sq_dists(coords, s):
    pts = [coords[v] for v in s]
    return [
        [sum((a - b) ** 2 for a, b in zip(p, q)) for q in pts]
        for p in pts
    ]


class Chain:
    """Sparse k-chain: simplex -> nonzero coefficient.

    ``modulus=None`` is an integer (or, for relaxed LP witnesses, rational)
    chain; ``modulus=p`` stores reduced residues in [-p//2, p//2].
    """

    __slots__ = ("complex", "dim", "coeffs", "modulus")

    def __init__(self, complex: WeightedComplex, dim: int, coeffs: Mapping, modulus=None):
        if modulus is not None and modulus < 2:
            raise ValueError("modulus must be an integer >= 2")
        clean: dict[Simplex, object] = {}
        index = complex.simplex_index(dim)
        for s, c in coeffs.items():
            s = tuple(s)
            if s not in index:
                raise ValueError(f"{s} is not a {dim}-simplex of the complex")
            if modulus is not None:
                c = reduce_coefficient(int(c), modulus)
            if c:
                clean[s] = c
        self.complex = complex
        self.dim = dim
        self.coeffs = clean
        self.modulus = modulus

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, complex, dim, modulus=None):
        return cls(complex, dim, {}, modulus)

    @classmethod
    def single(cls, complex, s, coeff=1, modulus=None):
        s = tuple(s)
        return cls(complex, len(s) - 1, {s: coeff}, modulus)

    # -- algebra -----------------------------------------------------------

    def _compatible(self, other: "Chain"):
        if self.complex is not other.complex:
            raise ValueError("chains live on different complexes")
        if self.dim != other.dim:
            raise ValueError("chains have different dimensions")
        if self.modulus != other.modulus:
            raise ValueError("chains have different moduli")

    def __add__(self, other: "Chain") -> "Chain":
        self._compatible(other)
        acc = dict(self.coeffs)
        for s, c in other.coeffs.items():
            acc[s] = acc.get(s, 0) + c
        return Chain(self.complex, self.dim, acc, self.modulus)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __neg__(self) -> "Chain":
        return Chain(self.complex, self.dim, {s: -c for s, c in self.coeffs.items()}, self.modulus)

    def scale(self, n) -> "Chain":
        return Chain(self.complex, self.dim, {s: n * c for s, c in self.coeffs.items()}, self.modulus)

    def __eq__(self, other):
        return (
            isinstance(other, Chain)
            and self.complex is other.complex
            and self.dim == other.dim
            and self.modulus == other.modulus
            and self.coeffs == other.coeffs
        )

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> frozenset:
        return frozenset(self.coeffs)

    def vertex_support(self) -> tuple[int, ...]:
        verts = set()
        for s in self.coeffs:
            verts.update(s)
        return tuple(sorted(verts))

    # -- the operators -----------------------------------------------------

    def boundary(self) -> "Chain":
        if self.dim == 0:
            raise ValueError("no boundary in dimension 0")
        acc: dict[Simplex, object] = {}
        for s, c in self.coeffs.items():
            for f, sign in boundary_faces(s):
                acc[f] = acc.get(f, 0) + sign * c
        return Chain(self.complex, self.dim - 1, acc, self.modulus)

    def reduce_mod(self, p: int) -> "Chain":
        if p < 2:
            raise ValueError("modulus must be an integer >= 2")
        if self.modulus is not None and self.modulus != p:
            raise ValueError("chain already reduced with a different modulus")
        for c in self.coeffs.values():
            if not isinstance(c, int):
                raise ValueError("reduction requires integer coefficients")
        return Chain(self.complex, self.dim, self.coeffs, p)

    def lift(self) -> "Chain":
        """The same coefficients viewed as an integer chain."""
        return Chain(self.complex, self.dim, self.coeffs, None)

    def is_cycle_mod(self, p: int | None = None) -> bool:
        if self.dim == 0:
            return False
        b = self.boundary()
        if p is None:
            p = self.modulus
        if p is None:
            return b.is_zero()
        return all(c % p == 0 for c in b.coeffs.values())

    def __repr__(self):
        mod = f" mod {self.modulus}" if self.modulus else ""
        return f"Chain(dim={self.dim}{mod}, {len(self.coeffs)} simplices)"


def boundary(chain: Chain) -> Chain:
    return chain.boundary()


def reduce_mod_p(chain: Chain, p: int) -> Chain:
    return chain.reduce_mod(p)


class SimplicialMap:
    """Vertex map between complexes sending simplices to (possibly
    degenerate) simplices of the target."""

    def __init__(self, source: WeightedComplex, target: WeightedComplex, vertex_map: Mapping[int, int]):
        self.source = source
        self.target = target
        self.vertex_map = dict(vertex_map)
        for v in source.vertices():
            if v not in self.vertex_map:
                raise ValueError(f"vertex {v} has no image")
        for k in range(source.dim + 1):
            for s in source.simplices(k):
                image = tuple(sorted({self.vertex_map[v] for v in s}))
                if not target.has_simplex(image):
                    raise ValueError(f"map is not simplicial: image {image} of {s} missing")

    def image(self, s: Simplex) -> tuple[Simplex, int] | None:
        """(sorted image, permutation sign), or None when degenerate."""
        raw = [self.vertex_map[v] for v in s]
        if len(set(raw)) != len(raw):
            return None
        order = sorted(range(len(raw)), key=raw.__getitem__)
        sign = _permutation_sign(order)
        return tuple(raw[i] for i in order), sign

    def expansion(self, s: Simplex) -> Fraction | None:
        """weight(image)/weight(s) for nondegenerate images."""
        img = self.image(s)
        if img is None:
            return None
        return self.target.weight(img[0]) / self.source.weight(s)

    def max_expansion(self, k: int) -> Fraction:
        ratios = [self.expansion(s) for s in self.source.simplices(k)]
        ratios = [r for r in ratios if r is not None]
        return max(ratios, default=Fraction(0))


def _permutation_sign(order) -> int:
    seen = [False] * len(order)
    sign = 1
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def pushforward(f: SimplicialMap, chain: Chain) -> Chain:
    """Push a chain through a simplicial map; degenerate images drop out."""
    if chain.complex is not f.source:
        raise ValueError("chain does not live on the source complex")
    acc: dict[Simplex, object] = {}
    for s, c in chain.coeffs.items():
        img = f.image(s)
        if img is None:
            continue
        t, sign = img
        acc[t] = acc.get(t, 0) + sign * c
    return Chain(f.target, chain.dim, acc, chain.modulus)
