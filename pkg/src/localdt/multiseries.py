"""Multivariate power series in s_1, s_2, ... truncated by weighted degree.

The monomial ``prod s_i^{g_i}`` has weight ``sum i * g_i``.  Exponent vectors
are stored as tuples of length ``bound`` so that ``g[i-1]`` is the exponent of
``s_i``.  Exp and Log are implemented here independently of the univariate
code in :mod:`localdt.motivic`; the strata computation relies on that
independence for its cross-check against the univariate route.
"""

from __future__ import annotations

from typing import Iterator, Mapping

from .errors import NonzeroConstantTerm, NotUnital, OrderMismatch
from .motivic import ONE, MotivicSeries, MotivicWeight, WeightLike, as_weight

Monomial = tuple[int, ...]


def weighted_degree(mono: Monomial) -> int:
    return sum((i + 1) * g for i, g in enumerate(mono))


class MultiSeries:
    __slots__ = ("bound", "coeffs")

    def __init__(self, coeffs: Mapping[Monomial, WeightLike], bound: int):
        if bound < 0:
            raise ValueError("bound must be non-negative")
        self.bound = bound
        clean: dict[Monomial, MotivicWeight] = {}
        for mono, w in coeffs.items():
            mono = tuple(mono) + (0,) * (bound - len(mono))
            if len(mono) > bound and any(mono[bound:]):
                continue
            mono = mono[:bound]
            if weighted_degree(mono) > bound:
                continue
            w = as_weight(w)
            if not w.is_zero():
                clean[mono] = clean.get(mono, MotivicWeight()) + w
        self.coeffs = {m: w for m, w in clean.items() if not w.is_zero()}

    @classmethod
    def one(cls, bound: int) -> MultiSeries:
        return cls({(0,) * bound: ONE}, bound)

    @classmethod
    def variable(cls, i: int, coeff: WeightLike, bound: int) -> MultiSeries:
        """``coeff * s_i`` (1-based ``i``)."""
        mono = [0] * bound
        if 1 <= i <= bound:
            mono[i - 1] = 1
            return cls({tuple(mono): coeff}, bound)
        return cls({}, bound)

    @property
    def unit(self) -> Monomial:
        return (0,) * self.bound

    def __getitem__(self, mono: Monomial) -> MotivicWeight:
        mono = tuple(mono) + (0,) * (self.bound - len(mono))
        return self.coeffs.get(mono, MotivicWeight())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self.bound == other.bound and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        body = ", ".join(f"{m}: {w}" for m, w in sorted(self.coeffs.items()))
        return f"MultiSeries({{{body}}}, bound={self.bound})"

    def _check(self, other: MultiSeries) -> None:
        if other.bound != self.bound:
            raise OrderMismatch(f"bounds differ: {self.bound} vs {other.bound}")

    def __add__(self, other: MultiSeries) -> MultiSeries:
        self._check(other)
        out = dict(self.coeffs)
        for m, w in other.coeffs.items():
            out[m] = out.get(m, MotivicWeight()) + w
        return MultiSeries(out, self.bound)

    def __neg__(self) -> MultiSeries:
        return MultiSeries({m: -w for m, w in self.coeffs.items()}, self.bound)

    def __sub__(self, other: MultiSeries) -> MultiSeries:
        return self + (-other)

    def __mul__(self, other: MultiSeries | WeightLike) -> MultiSeries:
        if not isinstance(other, MultiSeries):
            x = as_weight(other)
            return MultiSeries({m: w * x for m, w in self.coeffs.items()}, self.bound)
        self._check(other)
        out: dict[Monomial, MotivicWeight] = {}
        for m1, w1 in self.coeffs.items():
            d1 = weighted_degree(m1)
            for m2, w2 in other.coeffs.items():
                if d1 + weighted_degree(m2) > self.bound:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, MotivicWeight()) + w1 * w2
        return MultiSeries(out, self.bound)

    __rmul__ = __mul__

    def terms_by_degree(self) -> Iterator[tuple[Monomial, MotivicWeight]]:
        return iter(sorted(self.coeffs.items(), key=lambda kv: (weighted_degree(kv[0]), kv[0])))

    def adams(self, k: int) -> MultiSeries:
        return MultiSeries(
            {tuple(k * g for g in m): w.adams(k) for m, w in self.coeffs.items()}, self.bound
        )

    def specialize_variables(self) -> MotivicSeries:
        """Substitute ``s_i := t^i``."""
        coeffs = [MotivicWeight() for _ in range(self.bound + 1)]
        for m, w in self.coeffs.items():
            d = weighted_degree(m)
            coeffs[d] = coeffs[d] + w
        return MotivicSeries(coeffs, self.bound)


def _factor(mono: Monomial, half: int, c: int, bound: int) -> MultiSeries:
    """``(1 - L^{half/2} s^mono)^{-c}`` via the generalized binomial series."""
    deg = weighted_degree(mono)
    out: dict[Monomial, WeightLike] = {(0,) * bound: ONE}
    binom = 1
    j = 1
    while j * deg <= bound:
        binom = binom * (c + j - 1) // j
        if binom == 0:
            break
        out[tuple(j * g for g in mono)] = MotivicWeight.monomial(j * half, binom)
        j += 1
    return MultiSeries(out, bound)


def multi_exp(f: MultiSeries) -> MultiSeries:
    if f.unit in f.coeffs:
        raise NonzeroConstantTerm("Exp needs a series without constant term")
    result = MultiSeries.one(f.bound)
    for mono, w in f.terms_by_degree():
        for half, c in w.items():
            result = result * _factor(mono, half, c, f.bound)
    return result


def multi_log(g: MultiSeries) -> MultiSeries:
    if not g[g.unit].is_one():
        raise NotUnital("Log needs constant term 1")
    h = g
    out: dict[Monomial, MotivicWeight] = {}
    for degree in range(1, g.bound + 1):
        pending = sorted(m for m in h.coeffs if weighted_degree(m) == degree)
        for mono in pending:
            w = h[mono]
            if w.is_zero():
                continue
            out[mono] = w
            for half, c in w.items():
                h = h * _factor(mono, half, -c, g.bound)
    return MultiSeries(out, g.bound)


def multi_power(A: MultiSeries, x: WeightLike) -> MultiSeries:
    return multi_exp(multi_log(A) * as_weight(x))
