import math

import numpy as np
import pytest

from detconvex import detcalculus, linalg
from detconvex.detcalculus import (
    builtin_corpus,
    condition_lhs_diag,
    condition_lhs_full,
    fd_first_directional,
    fd_second_directional,
    fd_second_directional_with_step,
    g_grad_form,
    g_hess_form,
    g_value,
    oracle_sweep,
)
from detconvex.errors import DegenerateDirectionError, DimensionError, DomainError, ParameterError
from detconvex.linalg import PosDefMatrix, SymMatrix, frob_inner, random_posdef, random_sym
from detconvex.scalarfun import FamilyA, LogFamily, parse

LOG_RANGE = (math.log(0.1), math.log(10.0))
NEG_LN = LogFamily(c=-1.0, d=0.0)
IDENT = parse("s")


def _samples(n, count, seed):
    seeds = np.random.SeedSequence(seed).generate_state(2 * count, dtype=np.uint64)
    for i in range(count):
        yield (
            random_posdef(n, LOG_RANGE, int(seeds[2 * i])),
            random_sym(n, 1.0, int(seeds[2 * i + 1])),
        )


class TestGValue:
    def test_neg_ln_at_identity(self):
        assert g_value(NEG_LN, PosDefMatrix.from_diag([1.0, 1.0, 1.0])) == 0.0

    def test_neg_ln_at_det_two(self):
        c = PosDefMatrix.from_diag([1.0, 1.0, 2.0])
        assert g_value(NEG_LN, c) == -math.log(2.0)

    def test_identity_function_gives_det(self):
        c = random_posdef(4, LOG_RANGE, seed=2)
        assert g_value(IDENT, c) == c.det


class TestGradForm:
    def test_neg_ln_identity_direction(self):
        for n in (2, 3, 5):
            c = PosDefMatrix.from_diag(np.ones(n))
            h = SymMatrix.identity(n)
            assert g_grad_form(NEG_LN, c, h) == -float(n)

    def test_linear_in_direction_zero(self):
        c = random_posdef(3, LOG_RANGE, seed=4)
        assert g_grad_form(NEG_LN, c, SymMatrix.zero(3)) == 0.0

    def test_det_derivative_unit(self):
        c = PosDefMatrix.from_diag([1.0, 1.0, 1.0])
        h = SymMatrix.from_diag([1.0, 0.0, 0.0])
        assert g_grad_form(IDENT, c, h) == 1.0

    def test_matches_first_differences(self):
        for f in (NEG_LN, IDENT, FamilyA(a=0.5, c=-1.0, d=0.0, n=3)):
            for c, h in _samples(3, 40, seed=11):
                analytic = g_grad_form(f, c, h)
                fd = fd_first_directional(f, c, h)
                assert abs(analytic - fd) <= 1e-6 * max(1.0, abs(analytic))

    def test_dimension_mismatch(self):
        c = random_posdef(3, LOG_RANGE, seed=4)
        with pytest.raises(DimensionError):
            g_grad_form(NEG_LN, c, SymMatrix.identity(2))


class TestHessForm:
    def test_neg_ln_two_dims(self):
        c = PosDefMatrix.from_diag([1.0, 1.0])
        assert g_hess_form(NEG_LN, c, SymMatrix.identity(2)) == 2.0

    def test_slope_witness_value(self):
        c = PosDefMatrix.from_diag([1.0, 1.0, 2.0])
        h = SymMatrix.from_diag([1.0, -1.0, 0.0])
        assert g_hess_form(IDENT, c, h) == -4.0

    def test_limiting_family_annihilates_extremal_direction(self):
        f = FamilyA(a=0.0, c=-3.0, d=3.0, n=3)
        s, k = 2.0, 1.5
        c = PosDefMatrix.from_diag(np.full(3, s ** (1.0 / 3.0)))
        h = SymMatrix.from_diag(np.full(3, k * s ** (-1.0 / 3.0)))
        analytic = g_hess_form(f, c, h)
        assert abs(analytic) <= 1e-12
        assert abs(fd_second_directional(f, c, h)) <= 1e-4

    def test_quadratic_homogeneity(self):
        f = FamilyA(a=0.75, c=-2.0, d=1.0, n=3)
        for c, h in _samples(3, 25, seed=21):
            base = g_hess_form(f, c, h)
            for t in (-2.0, 0.5, 3.0):
                scaled = g_hess_form(f, c, SymMatrix(t * h.a))
                assert abs(scaled - t * t * base) <= 1e-12 * max(1.0, abs(scaled))

    def test_even_in_direction(self):
        c = random_posdef(4, LOG_RANGE, seed=31)
        h = random_sym(4, 1.0, seed=32)
        assert g_hess_form(NEG_LN, c, h) == g_hess_form(NEG_LN, c, SymMatrix(-h.a))


class TestConditionForms:
    def test_full_neg_ln_identity(self):
        c = PosDefMatrix.from_diag([1.0, 1.0, 1.0])
        assert condition_lhs_full(NEG_LN, c, SymMatrix.identity(3)) == 3.0

    def test_full_slope_witness(self):
        c = PosDefMatrix.from_diag([1.0, 1.0, 2.0])
        h = SymMatrix.from_diag([1.0, -1.0, 0.0])
        assert condition_lhs_full(IDENT, c, h) == -2.0

    def test_full_zero_direction(self):
        c = random_posdef(3, LOG_RANGE, seed=5)
        assert condition_lhs_full(NEG_LN, c, SymMatrix.zero(3)) == 0.0

    def test_diag_matches_full_at_identity_frame(self):
        assert condition_lhs_diag(NEG_LN, np.ones(3), SymMatrix.identity(3)) == 3.0

    def test_diag_extremal_direction_value(self):
        # f(s) = -s at s=1, k=1, n=3 collapses to 3*(3*0 + 2*(-1)) = -6
        val = condition_lhs_diag(parse("-s"), np.ones(3), SymMatrix.identity(3))
        assert val == -6.0

    def test_diag_zero_direction(self):
        assert condition_lhs_diag(NEG_LN, np.array([0.5, 2.0]), np.zeros((2, 2))) == 0.0

    def test_diag_rejects_bad_entries(self):
        with pytest.raises(ParameterError):
            condition_lhs_diag(NEG_LN, np.array([1.0, -0.5]), np.eye(2))

    def test_identity_with_hess_form(self):
        for n in (2, 3, 5):
            corpus = builtin_corpus(n)
            for i, (c, h) in enumerate(_samples(n, 60, seed=40 + n)):
                f = corpus[i % len(corpus)]
                full = condition_lhs_full(f, c, h)
                hess = g_hess_form(f, c, h)
                assert abs(full * c.det - hess) <= 1e-12 * max(1.0, abs(hess))

    def test_neg_ln_collapses_to_cross_term(self):
        for c, h in _samples(4, 40, seed=51):
            cross = frob_inner(h.a @ c.inverse.a, c.inverse.a @ h.a)
            hess = g_hess_form(NEG_LN, c, h)
            assert abs(hess - cross) <= 1e-10 * max(1.0, abs(cross))


class TestFdOracles:
    def test_explicit_step_example(self):
        c = PosDefMatrix.from_diag([1.0, 1.0])
        fd = fd_second_directional(NEG_LN, c, SymMatrix.identity(2), step=1e-4)
        assert abs(fd - 2.0) <= 1e-6

    def test_zero_direction_exact(self):
        c = random_posdef(3, LOG_RANGE, seed=6)
        assert fd_second_directional(NEG_LN, c, SymMatrix.zero(3)) == 0.0

    def test_slope_witness_fd(self):
        c = PosDefMatrix.from_diag([1.0, 1.0, 2.0])
        h = SymMatrix.from_diag([1.0, -1.0, 0.0])
        fd = fd_second_directional(IDENT, c, h)
        assert abs(fd - (-4.0)) <= 1e-5 * 4.0

    def test_step_halves_until_admissible(self):
        c = PosDefMatrix.from_diag([1e-3, 1.0])
        h = SymMatrix.identity(2)
        fd, h_used = fd_second_directional_with_step(IDENT, c, h, step=1.0)
        assert h_used < 1e-3
        assert abs(fd - g_hess_form(IDENT, c, h)) <= 1e-5

    def test_halving_cap_reported(self):
        c = PosDefMatrix.from_diag([1.0, 1.0])
        with pytest.raises(DegenerateDirectionError):
            fd_second_directional(NEG_LN, c, SymMatrix.identity(2), step=float("inf"))

    def test_rejects_non_positive_step(self):
        c = PosDefMatrix.from_diag([1.0, 1.0])
        with pytest.raises(ParameterError):
            fd_second_directional(NEG_LN, c, SymMatrix.identity(2), step=0.0)


class TestOracleSweep:
    def test_tolerances_hold_on_sample(self):
        res = oracle_sweep(3, 200, seed=9)
        assert res.skipped == 0
        assert res.max_hess_disc <= 1e-5
        assert res.max_grad_disc <= 1e-6
        assert res.all_agree
        assert all(s.agreeing for s in res.samples)

    def test_deterministic(self):
        a = oracle_sweep(2, 50, seed=77)
        b = oracle_sweep(2, 50, seed=77)
        assert a.max_hess_disc == b.max_hess_disc
        assert a.max_grad_disc == b.max_grad_disc

    def test_explicit_function_list(self):
        res = oracle_sweep(2, 40, seed=13, functions=[NEG_LN])
        assert res.max_hess_disc <= 1e-5

    def test_rejects_empty(self):
        with pytest.raises(ParameterError):
            oracle_sweep(3, 0, seed=1)

    def test_domain_failures_counted_not_fatal(self):
        # defined only above det = 5, so most draws are skipped
        partial = parse("ln(s-5)")
        res = oracle_sweep(3, 60, seed=3, functions=[partial])
        assert res.skipped > 0
        assert res.skipped + len(res.samples) == 60
