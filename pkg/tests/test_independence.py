"""Tests for marginals, independence checks, overlap, and factorizability."""

from fractions import Fraction
from itertools import product

import pytest

from onticbench.independence import (
    JointResponseTable,
    analyze_independence,
    check_factorizability,
    check_full_independence,
    check_local_independence,
    check_preparation_independence,
    classical_overlap,
    marginalize,
    product_state,
    single_factor_marginals,
)
from onticbench.numerics import HALF, ONE, QSqrt2, QUARTER, ZERO
from onticbench.ontology import EpistemicState, Factor, OnticSpace
from onticbench.scenarios import (
    PREP_ORDER,
    SHARED_FACTOR,
    build_toy_nlhv_model,
    subsystem_states,
)


def q(rat, irr=0):
    return QSqrt2(Fraction(rat), Fraction(irr))


SIXTEENTH = q(Fraction(1, 16))
THREE_SIXTEENTHS = q(Fraction(3, 16))

A = OnticSpace((Factor("a", ("a1", "a2")),))
B = OnticSpace((Factor("b", ("b1", "b2")),))


def state_a(w1, w2):
    return EpistemicState(A, {("a1",): w1, ("a2",): w2})


def state_b(w1, w2):
    return EpistemicState(B, {("b1",): w1, ("b2",): w2})


class TestProductAndMarginals:
    def test_product_weights_multiply(self):
        joint = product_state(state_a(HALF, HALF), state_b(QUARTER, HALF + QUARTER))
        assert joint.weight(("a1", "b2")) == HALF * (HALF + QUARTER)
        assert joint.space.factor_names == ("a", "b")

    def test_product_requires_disjoint_factors(self):
        with pytest.raises(ValueError):
            product_state(state_a(ONE, ZERO), state_a(ONE, ZERO))

    def test_marginalize_inverts_product(self):
        mu = state_a(QUARTER, HALF + QUARTER)
        nu = state_b(HALF, HALF)
        joint = product_state(mu, nu)
        assert marginalize(joint, ("a",)) == mu
        assert marginalize(joint, ("b",)) == nu

    def test_marginalize_sums_weights(self):
        space = OnticSpace((Factor("a", ("a1", "a2")), Factor("b", ("b1", "b2"))))
        joint = EpistemicState(
            space, {("a1", "b1"): HALF, ("a1", "b2"): QUARTER, ("a2", "b1"): QUARTER}
        )
        assert marginalize(joint, ("a",)).weight(("a1",)) == HALF + QUARTER

    def test_marginalize_unknown_factor(self):
        with pytest.raises(ValueError):
            marginalize(state_a(ONE, ZERO), ("c",))


class TestPreparationIndependence:
    def test_product_passes(self):
        mu = state_a(HALF, HALF)
        nu = state_b(QUARTER, HALF + QUARTER)
        assert check_preparation_independence(product_state(mu, nu), mu, nu).ok

    def test_correlated_fails_with_first_counterexample(self):
        space = OnticSpace((Factor("a", ("a1", "a2")), Factor("b", ("b1", "b2"))))
        joint = EpistemicState(space, {("a1", "b1"): HALF, ("a2", "b2"): HALF})
        mu = marginalize(joint, ("a",))
        nu = marginalize(joint, ("b",))
        verdict = check_preparation_independence(joint, mu, nu)
        assert not verdict.ok
        point, joint_w, product_w = verdict.witnesses[0]
        assert point == ("a1", "b1")
        assert (joint_w, product_w) == (HALF, QUARTER)

    def test_factor_order_enforced(self):
        mu = state_a(ONE, ZERO)
        nu = state_b(ONE, ZERO)
        joint = product_state(mu, nu)
        with pytest.raises(ValueError):
            check_preparation_independence(joint, nu, mu)


@pytest.fixture(scope="module")
def preps():
    return build_toy_nlhv_model().preparations


class TestToyModelIndependence:
    """The composite coin states: locally independent, not all fully independent."""

    def test_marginal_identity(self, preps):
        # dropping the shared factor turns each nu_ab into nu_a x nu_b
        subs1 = subsystem_states("lambda1")
        subs2 = subsystem_states("lambda2")
        pairs = {
            "nu00": ("nu0", "nu0"),
            "nu0+": ("nu0", "nu+"),
            "nu+0": ("nu+", "nu0"),
            "nu++": ("nu+", "nu+"),
        }
        for label, (left, right) in pairs.items():
            reduced = marginalize(preps[label], ("lambda1", "lambda2"))
            assert reduced == product_state(subs1[left], subs2[right])

    def test_local_independence_holds_everywhere(self, preps):
        subs1 = subsystem_states("lambda1")
        subs2 = subsystem_states("lambda2")
        pairs = {
            "nu00": ("nu0", "nu0"),
            "nu0+": ("nu0", "nu+"),
            "nu+0": ("nu+", "nu0"),
            "nu++": ("nu+", "nu+"),
        }
        for label, (left, right) in pairs.items():
            verdict = check_local_independence(
                preps[label], subs1[left], subs2[right], (SHARED_FACTOR,)
            )
            assert verdict.ok, label

    def test_full_independence_split(self, preps):
        expected = {"nu00": True, "nu0+": False, "nu+0": False, "nu++": True}
        for label, should_pass in expected.items():
            assert check_full_independence(preps[label]).ok is should_pass, label

    def test_mixed_state_correlation_value(self, preps):
        # at (HH, HH, 2) the joint weight is 1/4 but the marginals multiply to 1/16
        point = ("HH", "HH", "2")
        joint = preps["nu0+"]
        marginals = single_factor_marginals(joint)
        prod = ONE
        for coord, marginal in zip(point, marginals):
            prod = prod * marginal.weight((coord,))
        assert joint.weight(point) == QUARTER
        assert prod == SIXTEENTH
        assert joint.weight(point) != prod

    def test_full_independence_witness_is_first_point(self, preps):
        verdict = check_full_independence(preps["nu0+"])
        point, joint_w, product_w = verdict.witnesses[0]
        assert point == ("HH", "HH", "1")
        assert (joint_w, product_w) == (ZERO, THREE_SIXTEENTHS)

    def test_analyze_report(self, preps):
        report = analyze_independence(preps, (SHARED_FACTOR,))
        for label in PREP_ORDER:
            state = report.states[label]
            # the accessible marginal is a product for every state
            assert state.prep_independent.ok
            assert state.locally_independent.ok
            assert state.fully_independent.ok is (label in ("nu00", "nu++"))
        assert all(v == QUARTER for v in report.overlaps.values())


class TestClassicalOverlap:
    def test_subsystem_overlap(self):
        subs = subsystem_states()
        assert classical_overlap(subs["nu0"], subs["nu+"]) == HALF

    def test_symmetric(self):
        subs = subsystem_states()
        assert classical_overlap(subs["nu+"], subs["nu0"]) == HALF

    def test_self_overlap_is_one(self):
        subs = subsystem_states()
        assert classical_overlap(subs["nu0"], subs["nu0"]) == ONE

    def test_disjoint_supports(self):
        assert classical_overlap(state_a(ONE, ZERO), state_a(ZERO, ONE)) == ZERO

    def test_spaces_must_match(self):
        with pytest.raises(ValueError):
            classical_overlap(state_a(ONE, ZERO), state_b(ONE, ZERO))


def uniform_table(point, settings):
    # p(a, b) = 1/4 for all four outcome pairs, independent of everything
    return {
        (a, b, point, sa, sb): QUARTER
        for a, b in product((1, 2), repeat=2)
        for sa in settings
        for sb in settings
    }


class TestFactorizability:
    POINT = ("p",)
    SPACE_POINTS = (("p",),)
    SETTINGS = ("s0", "s1")

    def table(self, entries):
        return JointResponseTable(2, 2, self.SPACE_POINTS, self.SETTINGS, self.SETTINGS, entries)

    def test_product_table_passes(self):
        table = self.table(uniform_table(self.POINT, self.SETTINGS))
        assert check_factorizability(table).ok

    def test_pr_box_fails_outcome_independence(self):
        # perfectly correlated unless both settings are s1, then anticorrelated
        entries = {}
        for sa, sb in product(self.SETTINGS, repeat=2):
            flip = sa == "s1" and sb == "s1"
            for a, b in product((1, 2), repeat=2):
                correlated = (a == b) != flip
                entries[(a, b, self.POINT, sa, sb)] = HALF if correlated else ZERO
        verdict = check_factorizability(self.table(entries))
        assert not verdict.ok
        assert any("outcome independence" in f for f in verdict.failures)

    def test_setting_dependent_marginal_fails_parameter_independence(self):
        # A's marginal leaks B's setting choice
        entries = {}
        for sa, sb in product(self.SETTINGS, repeat=2):
            p_a1 = QUARTER if sb == "s1" else HALF
            for a, b in product((1, 2), repeat=2):
                pa = p_a1 if a == 1 else ONE - p_a1
                entries[(a, b, self.POINT, sa, sb)] = pa * HALF
        verdict = check_factorizability(self.table(entries))
        assert not verdict.ok
        assert any("parameter independence" in f for f in verdict.failures)

    def test_rows_must_normalize(self):
        entries = uniform_table(self.POINT, self.SETTINGS)
        entries[(1, 1, self.POINT, "s0", "s0")] = HALF
        with pytest.raises(ValueError):
            self.table(entries)
