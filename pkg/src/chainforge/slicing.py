"""Restriction of chains to sublevel sets and the slice operator.

A simplex lies in {u < r} when every vertex does (max-vertex rule, which
keeps sublevel sets closed under faces; that closure is what makes the
boundary anti-commutation identity exact).  At critical values of r the
restriction uses the strict inequality; the spectrum reports half-open
validity intervals between consecutive critical values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from chainforge.complexes import Chain, WeightedComplex
from chainforge.flatnorm import mass, mass_p


@dataclass(frozen=True)
class VertexFunction:
    """Real values on vertices with the Lipschitz constant over edges."""

    values: dict
    lip: Fraction

    @classmethod
    def on(cls, complex: WeightedComplex, values) -> "VertexFunction":
        vals = {int(v): Fraction(x) for v, x in values.items()}
        for v in complex.vertices():
            if v not in vals:
                raise ValueError(f"function undefined on vertex {v}")
        lip = Fraction(0)
        for (a, b) in complex.simplices(1):
            slope = abs(vals[a] - vals[b]) / complex.weight((a, b))
            if slope > lip:
                lip = slope
        return cls(vals, lip)

    @classmethod
    def distance_from(cls, complex: WeightedComplex, basepoint: int, metric=None) -> "VertexFunction":
        metric = metric or complex.metric or complex.path_metric()
        return cls.on(complex, {v: metric.d(v, basepoint) for v in complex.vertices()})

    def __call__(self, v: int) -> Fraction:
        return self.values[v]


def restrict(T: Chain, u: VertexFunction, r) -> Chain:
    """Subchain on simplices whose vertices all satisfy u < r."""
    r = Fraction(r)
    kept = {
        s: c
        for s, c in T.coeffs.items()
        if all(u.values[v] < r for v in s)
    }
    return Chain(T.complex, T.dim, kept, T.modulus)


def slice_chain(T: Chain, u: VertexFunction, r) -> Chain:
    """d(T restricted to {u<r}) minus (dT) restricted to {u<r}.

    One dimension down, supported on simplices crossing the level.
    """
    if T.dim == 0:
        raise ValueError("no slices in dimension 0")
    return restrict(T, u, r).boundary() - restrict(T.boundary(), u, r)


@dataclass(frozen=True)
class SliceSpectrum:
    """All distinct slices as r sweeps the critical values, with the
    coarea-style diagnostic sum(interval length * slice mass)."""

    entries: tuple  # of (lo, hi, slice chain)
    weighted_mass: Fraction
    lip_mass_bound: Fraction

    def ratio(self) -> Fraction | None:
        if self.lip_mass_bound == 0:
            return None
        return self.weighted_mass / self.lip_mass_bound


def slice_spectrum(T: Chain, u: VertexFunction, p: int | None = None) -> SliceSpectrum:
    if T.dim == 0:
        raise ValueError("no slices in dimension 0")
    if p is None:
        p = T.modulus

    def m(chain):
        return mass_p(chain, p) if p else mass(chain)

    critical = sorted({u.values[v] for s in T.coeffs for v in s})
    entries = []
    weighted = Fraction(0)
    for lo, hi in zip(critical, critical[1:]):
        mid = (lo + hi) / 2
        piece = slice_chain(T, u, mid)
        if piece.is_zero():
            continue
        entries.append((lo, hi, piece))
        weighted += (hi - lo) * m(piece)
    return SliceSpectrum(tuple(entries), weighted, u.lip * m(T))


def restriction_bound_diagnostic(T: Chain, u: VertexFunction, p: int, lo, hi) -> dict:
    """Integral of F_p(T restricted to {u < r}) over [lo, hi] against the
    reference (hi - lo + Lip(u)) F_p(T).

    A logged diagnostic, not an assertion: the sublevel discretization can
    break the sharp constant, so callers report the ratio instead of
    checking it.  The integrand is piecewise constant between critical
    values, so the integral is an exact finite sum.
    """
    from chainforge.flatnorm import flat_norm_mod_p

    lo, hi = Fraction(lo), Fraction(hi)
    if hi < lo:
        raise ValueError("empty integration range")
    critical = sorted({u.values[v] for s in T.coeffs for v in s})
    cuts = sorted({lo, hi, *(c for c in critical if lo < c < hi)})
    integral = Fraction(0)
    for a, b in zip(cuts, cuts[1:]):
        piece = restrict(T, u, (a + b) / 2)
        integral += (b - a) * flat_norm_mod_p(piece.lift(), p).value
    reference = (hi - lo + u.lip) * flat_norm_mod_p(T.lift(), p).value
    return {
        "integral": integral,
        "reference": reference,
        "ratio": None if reference == 0 else integral / reference,
    }
