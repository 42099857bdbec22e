"""Numeric checks on the commuting variety.

Elements of the square of the commutator ideal vanish to second order on
commuting tuples: both the value and the gradient are zero there.  Points are
sampled as ``G D G^{-1}`` with a shared random ``G`` and random diagonal
``D``.  Gradients are computed analytically with the rules

* ``d tr(A M B) / dM = (B A)^T``
* ``d (a I + b M)^{-1} = -b (a I + b M)^{-1} dM (a I + b M)^{-1}``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CheckFailed, IllConditioned, SingularMatrix
from .nctrace import TracePoly

COND_BOUND = 1e4
MAX_RESAMPLES = 50


@dataclass(frozen=True)
class Letter:
    """A plain matrix symbol, or the inverse ``(shift I + scale M)^{-1}`` of an affine image."""

    symbol: str
    inverse: bool = False
    shift: Fraction = Fraction(0)
    scale: Fraction = Fraction(1)


NumericTerm = tuple[complex, tuple[Letter, ...]]


@dataclass
class MatrixPoint:
    n: int
    assignments: dict[str, np.ndarray]
    seed: int | None = None

    def __getitem__(self, name: str) -> np.ndarray:
        return self.assignments[name]


def _rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_commuting_point(n: int, seed: int, names: Sequence[str] = ("X", "Y", "Z")) -> MatrixPoint:
    """Simultaneously diagonalizable matrices ``G D_k G^{-1}``, one per name."""
    if n < 1:
        raise ValueError("matrix size must be at least 1")
    rng = _rng(seed)
    for _ in range(MAX_RESAMPLES):
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if np.linalg.cond(G) < COND_BOUND:
            break
    else:
        raise IllConditioned("could not draw a well-conditioned change of basis")
    Ginv = np.linalg.inv(G)
    mats = {}
    for name in names:
        # distinct entries with modulus in [0.5, 1.5]: nonzero, hence invertible
        mod = rng.uniform(0.5, 1.5, n)
        arg = rng.uniform(0, 2 * np.pi, n)
        D = mod * np.exp(1j * arg)
        mats[name] = G @ np.diag(D) @ Ginv
    return MatrixPoint(n, mats, seed)


def random_commuting_triple(n: int, seed: int, with_p: bool = False) -> MatrixPoint:
    names = ("X", "Y", "Z", "P") if with_p else ("X", "Y", "Z")
    return random_commuting_point(n, seed, names)


def random_generic_point(n: int, seed: int, names: Sequence[str]) -> MatrixPoint:
    """Independent Gaussian matrices (generically non-commuting)."""
    rng = _rng(seed)
    mats = {name: (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(n) for name in names}
    return MatrixPoint(n, mats, seed)


def tracepoly_terms(tp: TracePoly) -> list[NumericTerm]:
    out: list[NumericTerm] = []
    for w, c in tp.items():
        letters = tuple(Letter(s.name, inverse=e < 0) for s, e in w.letters())
        out.append((complex(c), letters))
    return out


@dataclass
class Evaluation:
    value: complex
    gradient: dict[str, np.ndarray]
    scale: float

    @property
    def gradient_norm(self) -> float:
        return float(np.sqrt(sum(np.linalg.norm(g) ** 2 for g in self.gradient.values())))


def _letter_matrix(letter: Letter, pt: MatrixPoint, cache: dict[Letter, np.ndarray]) -> np.ndarray:
    if letter in cache:
        return cache[letter]
    M = pt[letter.symbol]
    if letter.inverse:
        A = float(letter.shift) * np.eye(pt.n) + float(letter.scale) * M
        if np.linalg.cond(A) > 1e12:
            raise SingularMatrix(f"{letter} is numerically singular")
        M = np.linalg.inv(A)
    cache[letter] = M
    return M


def evaluate_terms(terms: Sequence[NumericTerm], pt: MatrixPoint) -> Evaluation:
    cache: dict[Letter, np.ndarray] = {}
    eye = np.eye(pt.n, dtype=complex)
    value = 0j
    grads: dict[str, np.ndarray] = {}
    scale = 0.0
    for c, letters in terms:
        mats = [_letter_matrix(l, pt, cache) for l in letters]
        prefix = [eye]
        for M in mats:
            prefix.append(prefix[-1] @ M)
        suffix = [eye]
        for M in reversed(mats):
            suffix.append(M @ suffix[-1])
        suffix.reverse()
        value += c * np.trace(prefix[-1])
        mag = abs(c) * float(np.prod([np.linalg.norm(M, 2) for M in mats])) if mats else abs(c) * pt.n
        scale = max(scale, mag)
        for j, (l, M) in enumerate(zip(letters, mats)):
            BA = suffix[j + 1] @ prefix[j]
            if l.inverse:
                contrib = -float(l.scale) * (M @ BA @ M).T
            else:
                contrib = BA.T
            g = grads.setdefault(l.symbol, np.zeros((pt.n, pt.n), dtype=complex))
            g += c * contrib
    return Evaluation(complex(value), grads, max(scale, 1e-300))


def eval_and_gradient(tp: TracePoly, pt: MatrixPoint) -> Evaluation:
    return evaluate_terms(tracepoly_terms(tp), pt)


@dataclass
class CheckReport:
    name: str
    trials: int
    tol: float
    max_value_residual: float = 0.0
    max_gradient_residual: float = 0.0
    value_failures: list[int] = field(default_factory=list)
    gradient_failures: list[int] = field(default_factory=list)
    extra: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.value_failures and not self.gradient_failures

    def to_json(self) -> dict[str, object]:
        return {
            "name": self.name,
            "trials": self.trials,
            "tol": self.tol,
            "passed": self.passed,
            "max_value_residual": self.max_value_residual,
            "max_gradient_residual": self.max_gradient_residual,
            "value_failures": len(self.value_failures),
            "gradient_failures": len(self.gradient_failures),
            **self.extra,
        }


def _record(report: CheckReport, ev: Evaluation, seed: int) -> None:
    rv = abs(ev.value) / ev.scale
    rg = ev.gradient_norm / ev.scale
    report.max_value_residual = max(report.max_value_residual, rv)
    report.max_gradient_residual = max(report.max_gradient_residual, rg)
    if rv > report.tol:
        report.value_failures.append(seed)
    if rg > report.tol:
        report.gradient_failures.append(seed)


def _raise_if_failed(report: CheckReport) -> None:
    if not report.passed:
        seed = (report.value_failures or report.gradient_failures)[0]
        raise CheckFailed(
            f"{report.name}: residual above tol={report.tol:g} "
            f"(value {report.max_value_residual:.3e}, gradient {report.max_gradient_residual:.3e})",
            seed=seed,
        )


def second_order_check(tp: TracePoly, n: int, trials: int, tol: float = 1e-8, seed: int = 0,
                       raise_on_failure: bool = True, name: str | None = None) -> CheckReport:
    """Check that ``tp`` and its gradient vanish at random commuting points.

    Trial ``k`` uses seed ``seed + k``; a :class:`CheckFailed` carries the first
    failing seed.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    report = CheckReport(name or str(tp), trials, tol)
    names = sorted({s.name for s in tp.symbols()} | {"X", "Y", "Z"})
    terms = tracepoly_terms(tp)
    for k in range(trials):
        pt = random_commuting_point(n, seed + k, names)
        _record(report, evaluate_terms(terms, pt), seed + k)
    if raise_on_failure:
        _raise_if_failed(report)
    return report


def fn_gluing_terms(eps: Fraction) -> list[NumericTerm]:
    """``tr([X1', X2'] P') - tr([X1, X2] P)`` under ``(X1, X2 R^{-1}, R^2 P)``, ``R = 1 + eps X2``.

    Coefficients are combined exactly before conversion, so ``eps = 0`` gives
    the empty sum.
    """
    eps = Fraction(eps)
    x1, x2, p = Letter("X1"), Letter("X2"), Letter("P")
    q = Letter("X2", inverse=True, shift=Fraction(1), scale=eps)
    qs: tuple[Letter, ...] = () if eps == 0 else (q,)
    r2 = [(Fraction(1), ()), (2 * eps, (x2,)), (eps * eps, (x2, x2))]
    acc: dict[tuple[Letter, ...], Fraction] = {}

    def add(c: Fraction, word: tuple[Letter, ...]) -> None:
        acc[word] = acc.get(word, Fraction(0)) + c

    for c, tail in r2:
        add(c, (x1, x2) + qs + tail + (p,))
        add(-c, (x2,) + qs + (x1,) + tail + (p,))
    add(Fraction(-1), (x1, x2, p))
    add(Fraction(1), (x2, x1, p))
    return [(complex(float(c)), w) for w, c in acc.items() if c != 0]


def fn_gluing_certificate_terms(eps: Fraction) -> list[NumericTerm]:
    """``eps * tr((1 + eps X2)^{-1} [X1, X2] [X2, P])``, the closed form of the gluing difference."""
    eps = Fraction(eps)
    if eps == 0:
        return []
    q = Letter("X2", inverse=True, shift=Fraction(1), scale=eps)
    x1, x2, p = Letter("X1"), Letter("X2"), Letter("P")
    e = complex(float(eps))
    out: list[NumericTerm] = []
    for s1, c1 in ((1, (x1, x2)), (-1, (x2, x1))):
        for s2, c2 in ((1, (x2, p)), (-1, (p, x2))):
            out.append((e * s1 * s2, (q,) + c1 + c2))
    return out


def fn_gluing_check(n: int, eps: Fraction | float, trials: int, tol: float = 1e-8, seed: int = 0,
                    raise_on_failure: bool = True) -> CheckReport:
    """Value and gradient of the F_n gluing difference at random commuting ``(X1, X2, P)``.

    Draws where ``1 + eps X2`` is ill-conditioned are resampled.  The report's
    ``closed_form_residual`` compares the difference against its closed form
    at generic, non-commuting points.
    """
    eps = Fraction(eps).limit_denominator(10**9) if isinstance(eps, float) else Fraction(eps)
    report = CheckReport(f"fn_gluing(eps={eps})", trials, tol)
    terms = fn_gluing_terms(eps)
    names = ("X1", "X2", "P")
    draw = seed
    for k in range(trials):
        for _ in range(MAX_RESAMPLES):
            pt = random_commuting_point(n, draw, names)
            draw += 1
            R = np.eye(n) + float(eps) * pt["X2"]
            if np.linalg.cond(R) < COND_BOUND:
                break
        else:
            raise IllConditioned(f"1 + eps X2 stayed ill-conditioned (eps={eps})")
        _record(report, evaluate_terms(terms, pt), draw - 1)
    cert = fn_gluing_certificate_terms(eps)
    worst = 0.0
    for k in range(min(trials, 20)):
        pt = random_generic_point(n, seed + 10_000 + k, names)
        a = evaluate_terms(terms, pt) if terms else None
        b = evaluate_terms(cert, pt) if cert else None
        va = a.value if a else 0j
        vb = b.value if b else 0j
        sc = max(a.scale if a else 0.0, b.scale if b else 0.0, 1.0)
        worst = max(worst, abs(va - vb) / sc)
    report.extra["closed_form_residual"] = worst
    if worst > tol:
        report.value_failures.append(-1)
    if raise_on_failure:
        _raise_if_failed(report)
    return report
