from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from localdt.errors import CheckFailed
from localdt.nctrace import X, Y, Z, TracePoly, gluing_difference, potential
from localdt.numeric import (
    Letter,
    MatrixPoint,
    eval_and_gradient,
    evaluate_terms,
    fn_gluing_check,
    fn_gluing_terms,
    random_commuting_point,
    random_commuting_triple,
    random_generic_point,
    second_order_check,
)

tr = TracePoly.tr


def numeric_gradient(tp: TracePoly, pt: MatrixPoint, name: str, h: float = 1e-6) -> np.ndarray:
    """Central differences of the holomorphic trace polynomial, entry by entry."""
    n = pt.n
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n))
            E[i, j] = h
            plus = MatrixPoint(n, {**pt.assignments, name: pt[name] + E})
            minus = MatrixPoint(n, {**pt.assignments, name: pt[name] - E})
            out[i, j] = (eval_and_gradient(tp, plus).value - eval_and_gradient(tp, minus).value) / (2 * h)
    return out


class TestSampling:
    def test_scalars(self):
        pt = random_commuting_triple(1, seed=3)
        assert pt["X"].shape == (1, 1)

    @pytest.mark.parametrize("seed", range(10))
    def test_commuting(self, seed):
        pt = random_commuting_triple(3, seed)
        Xm, Ym = pt["X"], pt["Y"]
        comm = np.linalg.norm(Xm @ Ym - Ym @ Xm)
        assert comm <= 1e-12 * np.linalg.norm(Xm) * np.linalg.norm(Ym)
        assert abs(np.linalg.det(Xm)) > 0

    def test_reproducible(self):
        a, b = random_commuting_point(3, 11), random_commuting_point(3, 11)
        assert all(np.array_equal(a[k], b[k]) for k in a.assignments)


class TestEvaluation:
    def test_trace_of_identity(self):
        pt = MatrixPoint(2, {"X": np.eye(2)})
        assert eval_and_gradient(tr(X), pt).value == 2

    def test_gradient_of_bilinear(self):
        pt = random_generic_point(3, 0, ["X", "Y"])
        ev = eval_and_gradient(tr(X, Y), pt)
        assert np.allclose(ev.gradient["X"], pt["Y"].T)

    @pytest.mark.parametrize("tp", [tr((X, -1), Y, (X, 2), Z), gluing_difference(2), tr(X, Y, X, Z)])
    def test_gradient_matches_finite_differences(self, tp):
        pt = random_generic_point(3, 5, ["X", "Y", "Z"])
        pt.assignments["X"] = pt["X"] + 3 * np.eye(3)  # keep X well away from singular
        ev = eval_and_gradient(tp, pt)
        for name in ("X", "Y", "Z"):
            assert np.allclose(ev.gradient[name], numeric_gradient(tp, pt, name), atol=1e-6)

    def test_shifted_inverse_letter(self):
        pt = random_generic_point(2, 1, ["X2"])
        q = Letter("X2", inverse=True, shift=Fraction(1), scale=Fraction(1, 2))
        ev = evaluate_terms([(1.0, (q,))], pt)
        expected = np.trace(np.linalg.inv(np.eye(2) + 0.5 * pt["X2"]))
        assert np.isclose(ev.value, expected)

    def test_potential_vanishes_to_first_order(self):
        pt = random_commuting_triple(3, 7)
        ev = eval_and_gradient(potential(), pt)
        assert abs(ev.value) / ev.scale < 1e-12
        assert ev.gradient_norm / ev.scale < 1e-12


class TestSecondOrder:
    @pytest.mark.parametrize("f", [0, 1, 2])
    def test_gluing_differences_pass(self, f):
        rep = second_order_check(gluing_difference(f), 3, 50, 1e-8, seed=0)
        assert rep.passed and rep.max_gradient_residual < 1e-8

    def test_negative_control_fails(self):
        rep = second_order_check(tr(X, Y, Z), 3, 50, 1e-8, seed=0, raise_on_failure=False)
        assert len(rep.gradient_failures) >= 45
        with pytest.raises(CheckFailed) as exc:
            second_order_check(tr(X, Y, Z), 3, 5, 1e-8, seed=40)
        assert exc.value.seed == 40

    def test_zero_polynomial(self):
        rep = second_order_check(TracePoly(), 2, 5)
        assert rep.passed and rep.max_value_residual == 0 and rep.max_gradient_residual == 0

    def test_single_matrix_size(self):
        assert second_order_check(gluing_difference(0), 1, 10).passed

    def test_bad_tolerance(self):
        with pytest.raises(ValueError):
            second_order_check(potential(), 2, 1, tol=0)

    def test_report_json(self):
        doc = second_order_check(potential(), 2, 3).to_json()
        assert doc["passed"] is True and doc["trials"] == 3


class TestFnGluing:
    def test_eps_zero_is_identically_zero(self):
        assert fn_gluing_terms(Fraction(0)) == []
        assert fn_gluing_check(3, 0, 5).passed

    @pytest.mark.parametrize("eps", [Fraction(1, 4), Fraction(1, 2), Fraction(1)])
    def test_passes(self, eps):
        rep = fn_gluing_check(3, eps, 50, 1e-8, seed=1)
        assert rep.passed
        assert rep.extra["closed_form_residual"] < 1e-10

    def test_not_identically_zero(self):
        # the difference is nonzero off the commuting locus
        pt = random_generic_point(3, 2, ["X1", "X2", "P"])
        assert abs(evaluate_terms(fn_gluing_terms(Fraction(1, 2)), pt).value) > 1e-3

    def test_near_singular_draws_are_resampled(self):
        # eps = -1 makes 1 + eps X2 close to singular whenever X2 has an eigenvalue near 1
        rep = fn_gluing_check(2, Fraction(-1), 30, 1e-8, seed=0)
        assert rep.passed
