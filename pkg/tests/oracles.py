"""Independent reference computations used to derive frozen expected values.

Nothing here calls into the product-formula code paths of the package: series
are plain lists of ``{half_exponent: Fraction}`` dicts.
"""

from __future__ import annotations

from fractions import Fraction

from localdt.motivic import MotivicSeries, MotivicWeight

Poly = dict[int, Fraction]


def padd(a: Poly, b: Poly, k: Fraction | int = 1) -> Poly:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, Fraction(0)) + k * c
    return {e: c for e, c in out.items() if c}


def pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


def from_weight(w: MotivicWeight) -> Poly:
    return {a: Fraction(c) for a, c in w.items()}


def to_weight(p: Poly) -> MotivicWeight:
    assert all(c.denominator == 1 for c in p.values()), p
    return MotivicWeight({a: int(c) for a, c in p.items()})


def series_to_lists(f: MotivicSeries) -> list[Poly]:
    return [from_weight(w) for w in f.coeffs]


def lists_to_series(coeffs: list[Poly]) -> MotivicSeries:
    return MotivicSeries([to_weight(p) for p in coeffs], len(coeffs) - 1)


def exp_by_logarithm(f: MotivicSeries) -> MotivicSeries:
    """``exp(sum_k psi_k(f) / k)`` with rational intermediates.

    Uses ``n E_n = sum_{m=1}^n m S_m E_{n-m}`` for ``E = exp(S)``.
    """
    N = f.order
    S: list[Poly] = [{} for _ in range(N + 1)]
    for n, a, c in f.monomials():
        k = 1
        while n * k <= N:
            S[n * k] = padd(S[n * k], {a * k: Fraction(c, k)})
            k += 1
    E: list[Poly] = [{0: Fraction(1)}] + [{} for _ in range(N)]
    for n in range(1, N + 1):
        acc: Poly = {}
        for m in range(1, n + 1):
            acc = padd(acc, pmul(S[m], E[n - m]), m)
        E[n] = {e: c / n for e, c in acc.items()}
    return lists_to_series(E)


def geometric_product(factors: list[tuple[int, int]], order: int) -> MotivicSeries:
    """Expand ``prod 1/(1 - L^{a/2} t^n)`` over ``(a, n)`` in ``factors`` (with repetition)."""
    out: list[Poly] = [{0: Fraction(1)}] + [{} for _ in range(order)]
    for a, n in factors:
        nxt = [dict(p) for p in out]
        # multiply by 1/(1 - u t^n): c_k += u c_{k-n}, ascending in k
        for k in range(n, order + 1):
            nxt[k] = padd(nxt[k], pmul({a: Fraction(1)}, nxt[k - n]))
        out = nxt
    return lists_to_series(out)


def c3_product(order: int) -> MotivicSeries:
    """``prod_{m >= 1} prod_{i=0}^{m-1} (1 - L^{2 - m/2 + i} t^m)^{-1}``."""
    factors = [(4 - m + 2 * i, m) for m in range(1, order + 1) for i in range(m)]
    return geometric_product(factors, order)


def positive_exp(f: MotivicSeries) -> MotivicSeries:
    """Exp of a series with non-negative integer coefficients, as a product of geometric series."""
    factors = []
    for n, a, c in f.monomials():
        assert c > 0
        factors.extend([(a, n)] * c)
    return geometric_product(factors, f.order)


def macmahon_product(order: int) -> list[int]:
    """``prod_{m>=1} (1 - t^m)^{-m}`` by repeated geometric-series multiplication."""
    out = [1] + [0] * order
    for m in range(1, order + 1):
        for _ in range(m):
            for k in range(m, order + 1):
                out[k] += out[k - m]
    return out
