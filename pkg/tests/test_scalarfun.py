import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detconvex.errors import DomainError, NonFiniteError, ParameterError, ParseError, UnknownIdentifierError
from detconvex.scalarfun import (
    Add,
    FamilyA,
    LogFamily,
    Ln,
    Negate,
    NeoHookeVolumetric,
    PowerLaw,
    Variable,
    eval_jet,
    family_f_a,
    parse,
)


class TestParser:
    def test_negated_log_shape(self):
        assert parse("-ln(s)") == Negate(Ln(Variable()))

    def test_power_right_associative(self):
        assert eval_jet(parse("2^3^2"), 1.5).v == 512.0

    def test_additive_left_associative(self):
        for s in (0.5, 2.0, 4.0):
            assert eval_jet(parse("1 - s + s"), s).v == 1.0

    def test_unary_minus_binds_looser_than_power(self):
        assert eval_jet(parse("-s^2"), 3.0).v == -9.0

    def test_unary_minus_in_products_and_exponents(self):
        assert eval_jet(parse("2*-s"), 3.0).v == -6.0
        assert eval_jet(parse("2^-1"), 1.0).v == 0.5

    def test_whitespace_insignificant(self):
        assert parse(" 1 -  s + s ") == parse("1-s+s")

    def test_parentheses(self):
        assert eval_jet(parse("(1+s)*(1-s)"), 0.5).v == 0.75

    @pytest.mark.parametrize(
        "text,offset",
        [("", 0), ("1 +", 3), ("(1+s", 4), ("1 @ 2", 2), ("ln s", 3), ("1..2", 2)],
    )
    def test_syntax_errors_carry_offset(self, text, offset):
        with pytest.raises(ParseError) as exc:
            parse(text)
        assert exc.value.offset == offset

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError) as exc:
            parse("s + t")
        assert exc.value.offset == 4

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse("1 + 2 )")


class TestEvalJet:
    def test_negated_log_jet(self):
        jet = eval_jet(parse("-ln(s)"), 2.0)
        assert jet.v == -math.log(2.0)
        assert jet.d1 == -0.5
        assert jet.d2 == 0.25

    def test_linear_power_law(self):
        jet = eval_jet(PowerLaw(c=1.0, p=1.0, d=0.0), 5.0)
        assert (jet.v, jet.d1, jet.d2) == (5.0, 1.0, 0.0)

    def test_family_limiting_branch_jet(self):
        jet = eval_jet(FamilyA(a=0.0, c=-3.0, d=3.0, n=3), 1.0)
        assert jet.v == 0.0
        assert jet.d1 == -1.0
        assert abs(jet.d2 - 2.0 / 3.0) <= 1e-15
        # cross-check the second derivative against central differences
        h = 1e-5
        fd2 = (
            eval_jet(FamilyA(a=0.0, c=-3.0, d=3.0, n=3), 1.0 + h).v
            - 2.0 * jet.v
            + eval_jet(FamilyA(a=0.0, c=-3.0, d=3.0, n=3), 1.0 - h).v
        ) / (h * h)
        assert abs(jet.d2 - fd2) <= 1e-4

    @pytest.mark.parametrize("s", [1e-2, 0.7, 1.0, 13.0, 1e2])
    def test_pos_part_domain_only(self, s):
        assert eval_jet(parse("sqrt(s)"), s).v == math.sqrt(s)

    @pytest.mark.parametrize("s", [0.0, -1.0])
    def test_non_positive_point_rejected(self, s):
        with pytest.raises(DomainError):
            eval_jet(parse("s"), s)

    def test_log_domain(self):
        with pytest.raises(DomainError):
            eval_jet(parse("ln(s-2)"), 1.0)

    def test_sqrt_domain(self):
        with pytest.raises(DomainError):
            eval_jet(parse("sqrt(s-2)"), 1.0)

    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            eval_jet(parse("1/(s-1)"), 1.0)

    def test_zero_to_negative_power(self):
        with pytest.raises(DomainError):
            eval_jet(parse("(s-s)^-1"), 1.0)

    def test_negative_base_fractional_power(self):
        with pytest.raises(DomainError):
            eval_jet(parse("(0-s)^(1/2)"), 1.0)

    def test_negative_base_integer_power_ok(self):
        jet = eval_jet(parse("(s-2)^2"), 1.0)
        assert jet.v == 1.0 and jet.d1 == -2.0 and jet.d2 == 2.0

    def test_overflow_reported(self):
        with pytest.raises(NonFiniteError):
            eval_jet(parse("exp(exp(s))"), 100.0)

    def test_jet_linearity_exact(self):
        for text in ("s^2 - 3*s + 1", "-ln(s)", "sqrt(s^2+1)"):
            e = parse(text)
            doubled = Add(e, e)
            for s in (0.3, 1.0, 7.5):
                one = eval_jet(e, s)
                two = eval_jet(doubled, s)
                assert (two.v, two.d1, two.d2) == (2 * one.v, 2 * one.d1, 2 * one.d2)

    def test_log_exp_identity(self):
        e = parse("ln(exp(s))")
        for s in np.geomspace(1e-2, 1e2, 20):
            jet = eval_jet(e, float(s))
            assert abs(jet.v - s) <= 1e-12 * (1.0 + s)
            assert abs(jet.d1 - 1.0) <= 1e-12
            assert abs(jet.d2) <= 1e-12

    @given(
        st.floats(-3.0, 3.0),
        st.floats(-2.0, 2.0),
        st.floats(0.05, 20.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_power_law_jets_match_central_differences(self, c, p, s):
        f = PowerLaw(c=c, p=p, d=0.5)
        jet = eval_jet(f, s)
        h = 1e-5 * max(1.0, s)
        vp, vm = eval_jet(f, s + h).v, eval_jet(f, s - h).v
        fd1 = (vp - vm) / (2 * h)
        fd2 = (vp - 2 * jet.v + vm) / (h * h)
        assert abs(jet.d1 - fd1) <= 1e-6 * max(1.0, abs(jet.d1))
        assert abs(jet.d2 - fd2) <= 1e-4 * max(1.0, abs(jet.d2))


class TestFamilies:
    @pytest.mark.parametrize(
        "f",
        [
            PowerLaw(c=-1.0, p=0.5, d=0.0),
            PowerLaw(c=2.0, p=-0.5, d=1.0),
            LogFamily(c=-2.0, d=0.5),
            NeoHookeVolumetric(mu=1.5),
            FamilyA(a=0.0, c=-1.0, d=0.0, n=3),
            FamilyA(a=1.0 / 3.0, c=-1.0, d=0.0, n=3),
            FamilyA(a=1.0, c=-2.0, d=1.0, n=3),
        ],
        ids=lambda f: type(f).__name__ + getattr(f, "branch", ""),
    )
    def test_family_jets_match_central_differences(self, f):
        for s in np.geomspace(1e-2, 1e2, 50):
            s = float(s)
            h = 1e-5 * max(1.0, s)
            jet = eval_jet(f, s)
            vp, vm = eval_jet(f, s + h).v, eval_jet(f, s - h).v
            fd1 = (vp - vm) / (2 * h)
            fd2 = (vp - 2 * jet.v + vm) / (h * h)
            assert abs(jet.d1 - fd1) <= 1e-6 * max(1.0, abs(jet.d1))
            assert abs(jet.d2 - fd2) <= 1e-4 * max(1.0, abs(jet.d2))

    def test_log_branch_reproduces_neg_ln(self):
        fam = family_f_a(1.0 / 3.0, -1.0, 0.0, 3)
        assert fam.branch == "log"
        for s in (0.2, 1.0, 9.0):
            assert abs(eval_jet(fam, s).v - (-math.log(s))) <= 1e-15

    def test_power_branch_values(self):
        fam = family_f_a(0.0, -3.0, 3.0, 3)
        assert eval_jet(fam, 1.0).v == 0.0
        assert eval_jet(fam, 8.0).v == -3.0

    def test_inverted_branch_values(self):
        fam = family_f_a(2.0 / 3.0, -3.0, -3.0, 3)
        assert fam.branch == "inverted-power"
        assert abs(eval_jet(fam, 8.0).v - (-1.5)) <= 1e-14

    def test_branch_point_tolerance(self):
        assert FamilyA(a=1.0 / 3.0 + 5e-13, c=-1.0, d=0.0, n=3).branch == "log"
        assert FamilyA(a=1.0 / 3.0 + 1e-6, c=-1.0, d=0.0, n=3).branch == "inverted-power"

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            family_f_a(-0.1, -1.0, 0.0, 3)
        with pytest.raises(ParameterError):
            family_f_a(0.5, 0.1, 0.0, 3)
        with pytest.raises(ParameterError):
            NeoHookeVolumetric(mu=0.0)

    def test_neo_hooke_is_scaled_neg_ln(self):
        f = NeoHookeVolumetric(mu=2.5)
        jet = eval_jet(f, 3.0)
        assert jet.v == -2.5 * math.log(3.0)
        assert jet.d1 == -2.5 / 3.0
        assert jet.d2 == 2.5 / 9.0

    def test_log_family(self):
        jet = eval_jet(LogFamily(c=-2.0, d=1.0), 2.0)
        assert jet.v == 1.0 - 2.0 * math.log(2.0)
        assert jet.d1 == -1.0
