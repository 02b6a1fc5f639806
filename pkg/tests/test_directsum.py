"""Direct-sum composite: block probability rule, commutation, no-signaling,
conditioning, and the local effect-span deficit."""

import numpy as np
import pytest

from optheory.directsum import (
    DSumBipartite,
    DSumLocalOp,
    DSumModel,
    DSumState,
    ds_commutation_defect,
    ds_completeness_defect,
    ds_compose_joint,
    ds_condition,
    ds_identity,
    ds_joint_prob,
    ds_local_effect_span,
    ds_local_prob,
    ds_nosig_check,
    ds_random_action,
    ds_random_local_op,
)
from optheory.framework import Action, IncompleteAction, prob
from optheory.quantum import KrausOp, apply_quantum_op
from optheory.sampling import ginibre_state, haar_isometry_blocks, trial_rng

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def block_state(w_plus=0.6, seed=60, d1=2, d2=2):
    rng = trial_rng(seed)
    return DSumState(
        w_plus * ginibre_state(rng, d1), (1.0 - w_plus) * ginibre_state(rng, d2)
    )


def tp_channel(rng, d):
    return KrausOp(haar_isometry_blocks(rng, d, 2))


class TestLocalProb:
    def test_identity(self):
        assert ds_local_prob(block_state(), ds_identity(1, 2)) == pytest.approx(1.0)

    def test_trace_preserving_block_with_p_zero(self):
        omega = block_state(w_plus=0.6)
        a = DSumLocalOp(1, tp_channel(trial_rng(61), 2), 0.0)
        assert ds_local_prob(omega, a) == pytest.approx(0.6, abs=1e-12)

    def test_annihilated_block(self):
        omega = block_state(w_plus=0.6)
        a = DSumLocalOp(1, KrausOp([np.zeros((2, 2))]), 1.0)
        assert ds_local_prob(omega, a) == pytest.approx(0.4, abs=1e-12)

    def test_side2_mirror(self):
        omega = block_state(w_plus=0.6)
        b = DSumLocalOp(2, tp_channel(trial_rng(62), 2), 0.0)
        assert ds_local_prob(omega, b) == pytest.approx(0.4, abs=1e-12)

    def test_dim_mismatch(self):
        omega = block_state(d1=2, d2=3, seed=63)
        with pytest.raises(ValueError):
            ds_local_prob(omega, DSumLocalOp(1, KrausOp([np.eye(3)]), 0.5))


class TestJointProb:
    def test_identities(self):
        omega = block_state()
        assert ds_joint_prob(omega, ds_identity(1, 2), ds_identity(2, 2)) == pytest.approx(1.0)

    def test_deterministic_side1_is_invisible(self):
        # p = 1 with a trace-preserving block: exactly the deterministic case,
        # so the joint probability must equal the probe's own probability.
        omega = block_state()
        a = DSumLocalOp(1, tp_channel(trial_rng(64), 2), 1.0)
        for k in range(10):
            b = ds_random_local_op(trial_rng(65, k), 2, 2)
            assert ds_joint_prob(omega, a, b) == pytest.approx(
                ds_local_prob(omega, b), abs=1e-12
            )

    def test_order_swap(self):
        omega = block_state()
        for k in range(20):
            rng = trial_rng(66, k)
            a = ds_random_local_op(rng, 1, 2)
            b = ds_random_local_op(rng, 2, 2)
            # Evaluate the composite in both orders, independently of the formula.
            def prob_of(blocks):
                plus, minus = blocks
                return float(
                    np.trace(apply_quantum_op(plus, omega.rho_plus)).real
                    + np.trace(apply_quantum_op(minus, omega.rho_minus)).real
                )

            ab = prob_of(ds_compose_joint(a, b, 2, 2))
            ba = prob_of(ds_compose_joint(b, a, 2, 2))
            formula = ds_joint_prob(omega, a, b)
            assert abs(ab - ba) <= 1e-12
            assert formula == pytest.approx(ab, abs=1e-12)

    def test_same_side_rejected(self):
        with pytest.raises(ValueError):
            ds_joint_prob(block_state(), ds_identity(1, 2), ds_identity(1, 2))


class TestCommutation:
    @pytest.mark.parametrize("dims", [(2, 2), (2, 3)])
    def test_random_pairs_commute_exactly(self, dims):
        d1, d2 = dims
        for k in range(50):
            rng = trial_rng(67, k)
            a = ds_random_local_op(rng, 1, d1)
            b = ds_random_local_op(rng, 2, d2)
            assert ds_commutation_defect(a, b, d1, d2) <= 1e-12


class TestCondition:
    def test_identity_fixes_state(self):
        omega = block_state()
        out = ds_condition(omega, ds_identity(1, 2))
        assert np.allclose(out.rho_plus, omega.rho_plus, atol=1e-14)
        assert np.allclose(out.rho_minus, omega.rho_minus, atol=1e-14)

    def test_p_zero_concentrates_on_plus_block(self):
        omega = block_state(w_plus=0.6)
        a = DSumLocalOp(1, tp_channel(trial_rng(68), 2), 0.0)
        out = ds_condition(omega, a)
        assert np.trace(out.rho_plus).real == pytest.approx(1.0, abs=1e-12)
        assert np.abs(out.rho_minus).max() <= 1e-15

    def test_quotient_formula(self):
        # Conditioning must reproduce the ratio of joint to local probability.
        for k in range(50):
            rng = trial_rng(69, k)
            omega = DSumModel(2, 2).random_state(rng).payload
            a = ds_random_local_op(rng, 1, 2)
            b = ds_random_local_op(rng, 2, 2)
            norm = ds_local_prob(omega, a)
            if norm <= 1e-6:
                continue
            conditioned = ds_condition(omega, a)
            assert ds_local_prob(conditioned, b) == pytest.approx(
                ds_joint_prob(omega, a, b) / norm, abs=1e-10
            )

    def test_zero_probability(self):
        omega = block_state(w_plus=1.0 - 1e-15, seed=70)
        a = DSumLocalOp(1, KrausOp([np.zeros((2, 2))]), 1.0)
        with pytest.raises(ValueError):
            ds_condition(omega, a)


class TestNoSignaling:
    def test_identity_action(self):
        report = ds_nosig_check(
            block_state(), [ds_identity(1, 2)], [ds_random_local_op(trial_rng(71), 2, 2)]
        )
        assert report.max_defect == pytest.approx(0.0, abs=1e-15)

    def test_projective_action(self):
        action = [DSumLocalOp(1, KrausOp([P0]), 0.5), DSumLocalOp(1, KrausOp([P1]), 0.5)]
        assert ds_completeness_defect(action, 2) <= 1e-15
        probes = [ds_random_local_op(trial_rng(72, k), 2, 2) for k in range(5)]
        report = ds_nosig_check(block_state(), action, probes)
        assert report.passed and report.max_defect <= 1e-12

    def test_random_actions(self):
        for k in range(30):
            rng = trial_rng(73, k)
            omega = DSumModel(2, 2).random_state(rng).payload
            action = ds_random_action(rng, 1, 2, int(rng.integers(2, 5)))
            probes = [ds_random_local_op(rng, 2, 2) for _ in range(3)]
            report = ds_nosig_check(omega, action, probes, tol=1e-10)
            assert report.passed

    def test_incomplete_action_rejected(self):
        bad = [DSumLocalOp(1, KrausOp([P0]), 0.5)]
        with pytest.raises(IncompleteAction):
            ds_nosig_check(block_state(), bad, [ds_identity(2, 2)])


class TestEffectSpan:
    @pytest.mark.parametrize(
        "d1,d2,expected", [(1, 1, 2), (2, 2, 8), (2, 3, 13)]
    )
    def test_span_deficit(self, d1, d2, expected):
        samples = max(4 * (d1 + d2) ** 2, 16)
        rank = ds_local_effect_span(d1, d2, samples, seed=3)
        assert rank == expected
        assert rank < (d1 + d2) ** 2

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            ds_local_effect_span(2, 2, 8)


class TestBlockStateType:
    def test_validation(self):
        with pytest.raises(ValueError):
            DSumState(np.diag([0.5, 0.5]), np.diag([0.5, 0.5]))  # total trace 2
        with pytest.raises(ValueError):
            DSumState(np.diag([1.5, 0.0]), np.diag([-0.5, 0.0]))  # negative block

    def test_json_roundtrip(self):
        omega = block_state(seed=74)
        again = DSumState.from_json(omega.to_json())
        assert np.allclose(again.rho_plus, omega.rho_plus, atol=1e-15)
        assert np.allclose(again.rho_minus, omega.rho_minus, atol=1e-15)


class TestBipartiteAdapter:
    def test_canonical_embedding_preserves_completeness(self):
        bip = DSumBipartite(2, 2)
        rng = trial_rng(75)
        action = bip.left.random_action(rng, 3)
        embedded = Action([bip.embed_left(t) for t in action.transformations])
        assert embedded.completeness_defect() <= 1e-10

    def test_identity_embeds_to_identity(self):
        bip = DSumBipartite(2, 3)
        emb = bip.embed_left(bip.left.identity())
        omega = bip.joint.random_state(trial_rng(76))
        assert prob(omega, emb) == pytest.approx(1.0, abs=1e-12)
