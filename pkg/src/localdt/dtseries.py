"""Motivic DT generating functions of Hilbert schemes of points on local toric surfaces.

The punctual kernel ``K(t) = L^{-3/2} t / ((1 - L^{1/2} t)(1 - L^{-1/2} t))``
is normalized so that the generating function of ``omega_S`` is
``Exp([omega_S] K(t))`` with ``[omega_S] = L [S]``.  Stratum classes are
computed from a multivariate power structure in :mod:`localdt.multiseries`,
which never calls the univariate Exp/Log.
"""

from __future__ import annotations

import threading
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .errors import NonIntegral, OutOfRange, PartitionExceedsOrder
from .motivic import (
    L,
    L_HALF,
    L_MINUS_HALF,
    ONE,
    ZERO,
    MotivicSeries,
    MotivicWeight,
    WeightLike,
    as_weight,
    lefschetz_poly,
    plethystic_exp,
    power_pow,
    series_inverse,
)
from .multiseries import MultiSeries, multi_power

EULER_POINT = -1


@dataclass(frozen=True)
class SurfaceKind:
    """``P2`` or the Hirzebruch surface ``Fn(k)``."""

    tag: str
    k: int = 0

    def __post_init__(self) -> None:
        if self.tag not in ("P2", "Fn"):
            raise ValueError(f"unknown surface {self.tag!r}")
        if self.k < 0:
            raise ValueError("Hirzebruch parameter must be non-negative")

    @classmethod
    def parse(cls, text: str) -> SurfaceKind:
        t = text.strip().lower()
        if t == "p2":
            return cls("P2")
        if t.startswith("fn:"):
            return cls("Fn", int(t[3:]))
        raise ValueError(f"cannot parse surface {text!r}")

    @property
    def euler_characteristic(self) -> int:
        return 3 if self.tag == "P2" else 4

    def __str__(self) -> str:
        return "p2" if self.tag == "P2" else f"fn:{self.k}"


P2 = SurfaceKind("P2")


def Fn(k: int) -> SurfaceKind:
    return SurfaceKind("Fn", k)


def surface_class(kind: SurfaceKind) -> MotivicWeight:
    if kind.tag == "P2":
        return lefschetz_poly([1, 1, 1])
    return lefschetz_poly([1, 2, 1])


def threefold_class(kind: SurfaceKind) -> MotivicWeight:
    return L * surface_class(kind)


C3_CLASS = lefschetz_poly([0, 0, 0, 1])


@dataclass(frozen=True)
class Partition:
    """Support multiplicities ``{i: gamma_i}``: ``gamma_i`` clusters of length ``i``."""

    multiplicities: tuple[tuple[int, int], ...]

    def __init__(self, multiplicities: Mapping[int, int]):
        clean = tuple(sorted((int(i), int(g)) for i, g in multiplicities.items() if g))
        for i, g in clean:
            if i < 1 or g < 1:
                raise ValueError("partition multiplicities must be positive")
        object.__setattr__(self, "multiplicities", clean)

    @classmethod
    def from_parts(cls, parts: Sequence[int]) -> Partition:
        counts: dict[int, int] = {}
        for p in parts:
            counts[p] = counts.get(p, 0) + 1
        return cls(counts)

    @property
    def size(self) -> int:
        return sum(i * g for i, g in self.multiplicities)

    def as_dict(self) -> dict[int, int]:
        return dict(self.multiplicities)

    def parts(self) -> list[int]:
        return sorted((i for i, g in self.multiplicities for _ in range(g)), reverse=True)

    def monomial(self, bound: int) -> tuple[int, ...]:
        mono = [0] * bound
        for i, g in self.multiplicities:
            mono[i - 1] = g
        return tuple(mono)


def partitions(n: int, largest: int | None = None) -> Iterator[Partition]:
    """All partitions of ``n``, largest part first."""

    def rec(rem: int, top: int) -> Iterator[list[int]]:
        if rem == 0:
            yield []
            return
        for p in range(min(rem, top), 0, -1):
            for rest in rec(rem - p, p):
                yield [p] + rest

    for parts in rec(n, n if largest is None else largest):
        yield Partition.from_parts(parts)


def punctual_kernel(order: int) -> MotivicSeries:
    """``L^{-3/2} t / ((1 - L^{1/2} t)(1 - L^{-1/2} t))`` modulo ``t^{order+1}``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    denom = MotivicSeries([ONE, -(L_HALF + L_MINUS_HALF), ONE], order)
    numer = MotivicSeries.monomial(MotivicWeight.monomial(-3), 1, order)
    return numer * series_inverse(denom)


class _PunctualCache:
    """Write-once store of the longest punctual series computed so far."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._series: MotivicSeries | None = None

    def get(self, order: int) -> MotivicSeries:
        with self._lock:
            if self._series is None or self._series.order < order:
                self._series = plethystic_exp(punctual_kernel(order))
            return self._series.truncate(order)


_punctual = _PunctualCache()


def punctual_series(order: int) -> MotivicSeries:
    """``Exp(K(t)) = sum_n [Hilb^n(C^3)_0] t^n``."""
    return _punctual.get(order)


def hilb_series_closed(kind: SurfaceKind, order: int) -> MotivicSeries:
    return plethystic_exp(punctual_kernel(order) * threefold_class(kind))


def hilb_series_power(x: WeightLike, order: int) -> MotivicSeries:
    """Power structure ``punctual_series^x``."""
    return power_pow(punctual_series(order), as_weight(x))


def c3_series(order: int) -> MotivicSeries:
    return hilb_series_power(C3_CLASS, order)


def strata_generating_function(x: WeightLike, bound: int) -> MultiSeries:
    """``Exp(x Log(1 + sum_i F_i s_i))`` with ``F_i`` the punctual classes."""
    return _strata_gf(as_weight(x), bound)


@lru_cache(maxsize=32)
def _strata_gf(x: MotivicWeight, bound: int) -> MultiSeries:
    F = punctual_series(bound)
    base = MultiSeries.one(bound)
    for i in range(1, bound + 1):
        base = base + MultiSeries.variable(i, F[i], bound)
    return multi_power(base, as_weight(x))


def strata_class(x: WeightLike, gamma: Partition, order: int,
                 _gf: MultiSeries | None = None) -> MotivicWeight:
    """Coefficient of ``prod s_i^{gamma_i}`` in :func:`strata_generating_function`."""
    if gamma.size > order:
        raise PartitionExceedsOrder(f"partition of {gamma.size} exceeds order {order}")
    gf = _gf if _gf is not None else strata_generating_function(x, order)
    return gf[gamma.monomial(order)]


def strata_classes(x: WeightLike, n: int, order: int | None = None) -> list[tuple[Partition, MotivicWeight]]:
    order = n if order is None else order
    if n > order:
        raise PartitionExceedsOrder(f"n = {n} exceeds order {order}")
    gf = strata_generating_function(x, order) if n > 0 else None
    if n == 0:
        return [(Partition({}), ONE)]
    return [(g, strata_class(x, g, order, gf)) for g in partitions(n)]


def strata_sum(x: WeightLike, n: int, order: int | None = None) -> MotivicWeight:
    total = ZERO
    for _, w in strata_classes(x, n, order):
        total = total + w
    return total


PLANE_PARTITION_MAX = 12


def plane_partitions(n: int) -> int:
    """Count plane partitions of ``n`` by enumerating non-increasing height arrays."""
    if not 0 <= n <= PLANE_PARTITION_MAX:
        raise OutOfRange(f"brute force enumeration supports 0 <= n <= {PLANE_PARTITION_MAX}")

    # Fill rows top to bottom; each row is a non-increasing sequence bounded
    # entrywise by the row above.
    def rows(rem: int, above: tuple[int, ...]) -> int:
        if rem == 0:
            return 1
        total = 0
        for row in _bounded_rows(rem, above):
            total += rows(rem - sum(row), row)
        return total

    return rows(n, (n,) * n) if n else 1


def _bounded_rows(rem: int, above: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Non-empty non-increasing positive rows with ``row[j] <= above[j]`` and sum ``<= rem``."""

    def rec(j: int, cap: int, left: int) -> Iterator[tuple[int, ...]]:
        if j >= len(above):
            return
        for v in range(min(cap, above[j], left), 0, -1):
            yield (v,)
            for tail in rec(j + 1, v, left - v):
                yield (v,) + tail

    yield from rec(0, rem, rem)


def macmahon_power(chi: int, order: int) -> list[int]:
    """Coefficients of ``M(t)^chi`` by convolving the plane-partition counts."""
    if chi < 1 or not 0 <= order <= 10:
        raise OutOfRange("macmahon_power needs chi >= 1 and 0 <= order <= 10")
    pp = [plane_partitions(k) for k in range(order + 1)]
    out = [1] + [0] * order
    for _ in range(chi):
        out = [sum(out[j] * pp[k - j] for j in range(k + 1)) for k in range(order + 1)]
    return out


def euler_specialize_series(f: MotivicSeries) -> list[int]:
    """Evaluate at ``L^{1/2} = -1``; every value must be an integer."""
    out = []
    for n, w in enumerate(f.coeffs):
        v = w.evaluate(Fraction(EULER_POINT))
        if v.denominator != 1:
            raise NonIntegral(f"coefficient {n} specializes to {v}")
        out.append(int(v))
    return out


@dataclass(frozen=True)
class EulerCheck:
    label: str
    chi: int
    specialized: tuple[int, ...]
    expected: tuple[int, ...]
    convention: str  # "(-1)^n" or "(-1)^(n+1)" for n >= 1, or "none"

    @property
    def passed(self) -> bool:
        return self.convention != "none"


def euler_check(f: MotivicSeries, chi: int, label: str = "") -> EulerCheck:
    """Compare the Euler specialization of ``f`` with ``(-1)^n [t^n] M(t)^chi``.

    A uniform flip of the sign of ``t`` is recorded as the alternative
    convention rather than reported as a failure.
    """
    spec = euler_specialize_series(f)
    mac = macmahon_power(chi, f.order)
    signed = [(-1) ** n * m for n, m in enumerate(mac)]
    if spec == signed:
        conv = "(-1)^n"
    elif spec == mac:
        conv = "unsigned"
    else:
        conv = "none"
    return EulerCheck(label, chi, tuple(spec), tuple(signed), conv)


def strata_report(x: WeightLike, n: int, order: int | None = None) -> dict[str, object]:
    order = max(n, 1) if order is None else order
    classes = strata_classes(x, n, order)
    total = ZERO
    for _, w in classes:
        total = total + w
    series_coeff = hilb_series_power(x, order)[n]
    return {
        "n": n,
        "strata": [
            {"gamma": {str(i): g for i, g in gamma.multiplicities}, "class": w.to_json()}
            for gamma, w in classes
        ],
        "total": total.to_json(),
        "residual": (total - series_coeff).to_json(),
    }
