"""Exact arithmetic in Z[L^{1/2}, L^{-1/2}] and truncated power series over it.

A :class:`MotivicWeight` stores half-exponents: the key ``a`` stands for
``L^{a/2}``.  A :class:`MotivicSeries` is a power series in ``t`` truncated
modulo ``t^{order+1}``.  The plethystic exponential is computed with the
product formula so that no rational numbers ever appear.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import DivisionByZero, NonzeroConstantTerm, NotUnital, OrderMismatch

SERIES_VAR = "t"


class MotivicWeight:
    """Laurent polynomial in ``L^{1/2}`` with integer coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, int] = {}
        for a, c in items:
            if not isinstance(a, int) or not isinstance(c, int):
                raise TypeError("half-exponents and coefficients must be int")
            acc[a] = acc.get(a, 0) + c
        self._terms = {a: c for a, c in sorted(acc.items()) if c != 0}
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[int, int]) -> MotivicWeight:
        obj = cls.__new__(cls)
        obj._terms = {a: terms[a] for a in sorted(terms) if terms[a] != 0}
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, half_exp: int, coeff: int = 1) -> MotivicWeight:
        return cls._raw({half_exp: coeff})

    @classmethod
    def const(cls, c: int) -> MotivicWeight:
        return cls._raw({0: c})

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[int, int]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return self._terms == {0: 1}

    def min_half_exp(self) -> int:
        return min(self._terms)

    def max_half_exp(self) -> int:
        return max(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = MotivicWeight.const(other)
        if not isinstance(other, MotivicWeight):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"MotivicWeight({render_weight(self)!r})"

    def __str__(self) -> str:
        return render_weight(self)

    def __neg__(self) -> MotivicWeight:
        return MotivicWeight._raw({a: -c for a, c in self._terms.items()})

    def __add__(self, other: WeightLike) -> MotivicWeight:
        other = as_weight(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            out[a] = out.get(a, 0) + c
        return MotivicWeight._raw(out)

    __radd__ = __add__

    def __sub__(self, other: WeightLike) -> MotivicWeight:
        return self + (-as_weight(other))

    def __rsub__(self, other: WeightLike) -> MotivicWeight:
        return as_weight(other) - self

    def __mul__(self, other: WeightLike) -> MotivicWeight:
        other = as_weight(other)
        out: dict[int, int] = {}
        for a, c in self._terms.items():
            for b, d in other._terms.items():
                out[a + b] = out.get(a + b, 0) + c * d
        return MotivicWeight._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> MotivicWeight:
        if k < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials can be raised to negative powers")
            (a, c), = self._terms.items()
            if c not in (1, -1):
                raise ValueError("monomial with non-unit coefficient is not invertible")
            return MotivicWeight._raw({a * k: c ** (-k)})
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def adams(self, k: int) -> MotivicWeight:
        return MotivicWeight._raw({k * a: c for a, c in self._terms.items()})

    def evaluate(self, half_value: Fraction | int) -> Fraction:
        """Evaluate exactly at ``L^{1/2} = half_value``."""
        v = Fraction(half_value)
        if v == 0 and any(a < 0 for a in self._terms):
            raise DivisionByZero("L^{1/2} = 0 meets a negative exponent")
        return sum((c * v**a for a, c in self._terms.items()), Fraction(0))

    def to_json(self) -> list[dict[str, object]]:
        return [{"halfL": a, "coeff": str(c)} for a, c in self._terms.items()]

    @classmethod
    def from_json(cls, terms: Sequence[Mapping[str, object]]) -> MotivicWeight:
        return cls((int(t["halfL"]), int(str(t["coeff"]))) for t in terms)


WeightLike = Union[MotivicWeight, int]


def as_weight(x: WeightLike) -> MotivicWeight:
    if isinstance(x, MotivicWeight):
        return x
    if isinstance(x, int):
        return MotivicWeight.const(x)
    raise TypeError(f"cannot interpret {x!r} as a motivic weight")


ZERO = MotivicWeight._raw({})
ONE = MotivicWeight._raw({0: 1})
L_HALF = MotivicWeight._raw({1: 1})
L_MINUS_HALF = MotivicWeight._raw({-1: 1})
L = MotivicWeight._raw({2: 1})


def weight_mul(a: MotivicWeight, b: MotivicWeight) -> MotivicWeight:
    return a * b


def lefschetz_poly(coeffs: Sequence[int]) -> MotivicWeight:
    """``coeffs[i]`` is the coefficient of ``L^i`` (integer powers only)."""
    return MotivicWeight((2 * i, c) for i, c in enumerate(coeffs))


class MotivicSeries:
    """Power series in ``t`` with :class:`MotivicWeight` coefficients, exact mod ``t^{order+1}``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Sequence[WeightLike], order: int):
        if order < 0:
            raise ValueError("order must be non-negative")
        padded = [as_weight(c) for c in coeffs[: order + 1]]
        padded.extend(ZERO for _ in range(order + 1 - len(padded)))
        self.order = order
        self.coeffs: tuple[MotivicWeight, ...] = tuple(padded)

    @classmethod
    def zero(cls, order: int) -> MotivicSeries:
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> MotivicSeries:
        return cls([ONE], order)

    @classmethod
    def monomial(cls, coeff: WeightLike, degree: int, order: int) -> MotivicSeries:
        coeffs: list[WeightLike] = [ZERO] * (order + 1)
        if degree <= order:
            coeffs[degree] = coeff
        return cls(coeffs, order)

    def __getitem__(self, n: int) -> MotivicWeight:
        return self.coeffs[n]

    def __len__(self) -> int:
        return self.order + 1

    def __iter__(self) -> Iterator[MotivicWeight]:
        return iter(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MotivicSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        return f"MotivicSeries({render_series(self)!r}, order={self.order})"

    def is_unital(self) -> bool:
        return self.coeffs[0].is_one()

    def monomials(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(n, a, c)`` for every nonzero term ``c L^{a/2} t^n``."""
        for n, w in enumerate(self.coeffs):
            for a, c in w.items():
                yield n, a, c

    def truncate(self, order: int) -> MotivicSeries:
        if order > self.order:
            raise OrderMismatch(f"cannot extend a series known to order {self.order} to {order}")
        return MotivicSeries(self.coeffs, order)

    def _check(self, other: MotivicSeries) -> None:
        if other.order != self.order:
            raise OrderMismatch(f"orders differ: {self.order} vs {other.order}")

    def __neg__(self) -> MotivicSeries:
        return MotivicSeries([-c for c in self.coeffs], self.order)

    def __add__(self, other: MotivicSeries) -> MotivicSeries:
        self._check(other)
        return MotivicSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __sub__(self, other: MotivicSeries) -> MotivicSeries:
        self._check(other)
        return MotivicSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __mul__(self, other: MotivicSeries | WeightLike) -> MotivicSeries:
        if not isinstance(other, MotivicSeries):
            w = as_weight(other)
            return MotivicSeries([c * w for c in self.coeffs], self.order)
        self._check(other)
        N = self.order
        out = [ZERO] * (N + 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j in range(N + 1 - i):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return MotivicSeries(out, N)

    def __rmul__(self, other: WeightLike) -> MotivicSeries:
        return self * other

    def __pow__(self, k: int) -> MotivicSeries:
        if k < 0:
            return series_inverse(self) ** (-k)
        result = MotivicSeries.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def to_json(self) -> dict[str, object]:
        return {
            "var": SERIES_VAR,
            "order": self.order,
            "coefficients": [
                {"n": n, "terms": w.to_json()} for n, w in enumerate(self.coeffs)
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc: Mapping[str, object]) -> MotivicSeries:
        if doc.get("var", SERIES_VAR) != SERIES_VAR:
            raise ValueError(f"unexpected series variable {doc.get('var')!r}")
        order = int(doc["order"])  # type: ignore[arg-type]
        coeffs = [ZERO] * (order + 1)
        for entry in doc["coefficients"]:  # type: ignore[union-attr]
            n = int(entry["n"])
            if not 0 <= n <= order:
                raise ValueError(f"coefficient index {n} outside 0..{order}")
            coeffs[n] = coeffs[n] + MotivicWeight.from_json(entry["terms"])
        return cls(coeffs, order)

    @classmethod
    def loads(cls, text: str) -> MotivicSeries:
        return cls.from_json(json.loads(text))


def adams(k: int, f: MotivicSeries) -> MotivicSeries:
    """Adams operation: ``L^{a/2} t^n -> L^{ka/2} t^{kn}``."""
    if k < 1:
        raise ValueError("Adams operations are indexed by k >= 1")
    out = [ZERO] * (f.order + 1)
    for n, w in enumerate(f.coeffs):
        if k * n <= f.order and not w.is_zero():
            out[k * n] = w.adams(k)
    return MotivicSeries(out, f.order)


def series_inverse(g: MotivicSeries) -> MotivicSeries:
    if not g.is_unital():
        raise NotUnital("only series with constant term 1 are inverted")
    N = g.order
    inv = [ONE] + [ZERO] * N
    for n in range(1, N + 1):
        acc = ZERO
        for k in range(1, n + 1):
            if not g.coeffs[k].is_zero() and not inv[n - k].is_zero():
                acc = acc + g.coeffs[k] * inv[n - k]
        inv[n] = -acc
    return MotivicSeries(inv, N)


def _binomial_factor(u_half: int, degree: int, c: int, order: int) -> list[tuple[int, MotivicWeight]]:
    """Sparse terms of ``(1 - L^{u/2} t^degree)^{-c}`` up to ``t^order``.

    Uses the generalized binomial series, valid for every integer ``c``.
    """
    terms = [(0, ONE)]
    binom = 1
    j = 1
    while j * degree <= order:
        binom = binom * (c + j - 1) // j
        if binom == 0:
            break
        terms.append((j * degree, MotivicWeight._raw({j * u_half: binom})))
        j += 1
    return terms


def _apply_factor(coeffs: list[MotivicWeight], factor: list[tuple[int, MotivicWeight]]) -> list[MotivicWeight]:
    N = len(coeffs) - 1
    out = list(coeffs)
    for i, a in enumerate(coeffs):
        if a.is_zero():
            continue
        for d, w in factor[1:]:
            if i + d > N:
                break
            out[i + d] = out[i + d] + a * w
    return out


def plethystic_exp(f: MotivicSeries) -> MotivicSeries:
    """``Exp(f) = prod_{n,a} (1 - L^{a/2} t^n)^{-c_{n,a}}`` truncated at ``f.order``."""
    if not f.coeffs[0].is_zero():
        raise NonzeroConstantTerm("Exp needs a series without constant term")
    N = f.order
    coeffs = [ONE] + [ZERO] * N
    for n, a, c in f.monomials():
        coeffs = _apply_factor(coeffs, _binomial_factor(a, n, c, N))
    return MotivicSeries(coeffs, N)


def plethystic_log(g: MotivicSeries) -> MotivicSeries:
    """Inverse of :func:`plethystic_exp`, by stripping one degree at a time."""
    if not g.is_unital():
        raise NotUnital("Log needs a series with constant term 1")
    N = g.order
    h = list(g.coeffs)
    log = [ZERO] * (N + 1)
    for n in range(1, N + 1):
        w = h[n]
        if w.is_zero():
            continue
        log[n] = w
        for a, c in w.items():
            h = _apply_factor(h, _binomial_factor(a, n, -c, N))
    return MotivicSeries(log, N)


def power_pow(A: MotivicSeries, x: WeightLike) -> MotivicSeries:
    """Power structure ``A(t)^x = Exp(x * Log A)``."""
    return plethystic_exp(plethystic_log(A) * as_weight(x))


def specialize(f: MotivicSeries, value: Fraction | int) -> list[Fraction]:
    """Evaluate every coefficient exactly at ``L^{1/2} = value``."""
    return [w.evaluate(value) for w in f.coeffs]


def _render_lpow(half: int) -> str:
    if half == 0:
        return ""
    if half == 2:
        return "L"
    if half % 2 == 0:
        k = half // 2
        return f"L^{k}" if k > 0 else f"L^{{{k}}}"
    return f"L^{{{half}/2}}"


def _render_poly(terms: list[tuple[int, int]]) -> str:
    """Render terms in descending exponent order; ``terms`` are ``(half, coeff)``."""
    parts: list[str] = []
    for half, c in sorted(terms, reverse=True):
        mono = _render_lpow(half)
        if mono:
            mag = "" if abs(c) == 1 else str(abs(c))
            body = mag + mono
        else:
            body = str(abs(c))
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append(sign + body)
    return "".join(parts)


def render_weight(w: MotivicWeight) -> str:
    """Plain rendering, factoring out the lowest power of ``L^{1/2}`` when that leaves integer powers of L.

    >>> render_weight(MotivicWeight({-1: 1, 1: 1, 3: 1}))
    'L^{-1/2}(L^2+L+1)'
    """
    if w.is_zero():
        return "0"
    terms = list(w.items())
    if len(terms) == 1:
        return _render_poly(terms)
    low = w.min_half_exp()
    if low == 0 or any((a - low) % 2 for a, _ in terms):
        return _render_poly(terms)
    shifted = [(a - low, c) for a, c in terms]
    return f"{_render_lpow(low)}({_render_poly(shifted)})"


def render_series(f: MotivicSeries) -> str:
    parts: list[str] = []
    for n, w in enumerate(f.coeffs):
        if w.is_zero():
            continue
        text = render_weight(w)
        compound = len(w.terms) > 1 and not text.endswith(")")
        if n == 0:
            piece = text
        else:
            tpow = "t" if n == 1 else f"t^{n}"
            if text == "1":
                piece = tpow
            elif text == "-1":
                piece = "-" + tpow
            else:
                piece = f"({text}) {tpow}" if compound else f"{text} {tpow}"
        if parts and piece.startswith("-"):
            parts.append("- " + piece[1:])
        elif parts:
            parts.append("+ " + piece)
        else:
            parts.append(piece)
    return " ".join(parts) if parts else "0"
