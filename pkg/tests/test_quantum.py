"""Quantum model: operations, instruments, reductions, and the verifiers."""

import numpy as np
import pytest

from optheory.linalg import min_eig_herm, partial_trace, tensor
from optheory.quantum import (
    IncompleteInstrument,
    Instrument,
    KrausOp,
    NotSelective,
    QuantumBipartite,
    QuantumModel,
    apply_quantum_op,
    k_operator,
    local_embed,
    local_state,
    minimal_ic_povm,
    quantum_no_signaling_check,
    reduced_positivity_min_eig,
    singlet_state,
    steering_witness,
    trace_biconditional_check,
    x_instrument,
    z_instrument,
)
from optheory.sampling import (
    ginibre_positive,
    ginibre_state,
    haar_isometry_blocks,
    random_pure_state,
    trial_rng,
)

I2 = np.eye(2)
P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def random_op(rng, d):
    blocks = haar_isometry_blocks(rng, d, 3)
    return KrausOp(blocks[: int(rng.integers(1, 3))], check=False)


class TestApply:
    def test_identity(self):
        rng = trial_rng(40)
        rho = ginibre_state(rng, 3)
        assert np.allclose(apply_quantum_op(KrausOp([np.eye(3)]), rho), rho)

    def test_projector_on_maximally_mixed(self):
        out = apply_quantum_op(KrausOp([P0]), I2 / 2)
        assert np.trace(out).real == pytest.approx(0.5)
        assert np.allclose(out, P0 / 2)

    def test_positivity_preserved(self):
        for k in range(30):
            rng = trial_rng(41, k)
            rho = ginibre_state(rng, 3)
            out = apply_quantum_op(random_op(rng, 3), rho)
            assert min_eig_herm(out) >= -1e-10

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            apply_quantum_op(KrausOp([P0]), np.eye(3))


class TestKOperator:
    def test_trace_preserving_channel(self):
        blocks = haar_isometry_blocks(trial_rng(42), 2, 3)
        assert np.allclose(k_operator(KrausOp(blocks)), I2, atol=1e-12)

    def test_scaled_identity(self):
        assert np.allclose(k_operator(KrausOp([np.sqrt(0.3) * I2])), 0.3 * I2, atol=1e-14)

    def test_trace_pairing(self):
        for k in range(25):
            rng = trial_rng(43, k)
            m = random_op(rng, 2)
            rho = ginibre_state(rng, 2)
            via_apply = np.trace(apply_quantum_op(m, rho)).real
            via_k = np.trace(k_operator(m) @ rho).real
            assert abs(via_apply - via_k) <= 1e-12

    def test_rejects_trace_increasing(self):
        with pytest.raises(ValueError):
            KrausOp([1.2 * I2])


class TestLocalEmbed:
    def test_identity_embeds_to_identity(self):
        emb = local_embed(KrausOp([I2]), 3, side=1)
        assert np.allclose(emb.kraus[0], np.eye(6))

    @pytest.mark.parametrize("d", [2, 3])
    def test_opposite_sides_commute(self, d):
        for k in range(10):
            rng = trial_rng(44, k)
            a = local_embed(random_op(rng, d), d, side=1)
            b = local_embed(random_op(rng, d), d, side=2)
            rho = ginibre_state(rng, d * d)
            ab = apply_quantum_op(a, apply_quantum_op(b, rho))
            ba = apply_quantum_op(b, apply_quantum_op(a, rho))
            assert np.abs(ab - ba).max() <= 1e-12

    def test_projector_weight_on_singlet(self):
        emb = local_embed(KrausOp([P0]), 2, side=1)
        out = apply_quantum_op(emb, singlet_state())
        assert np.trace(out).real == pytest.approx(0.5, abs=1e-14)


class TestLocalState:
    def test_product(self):
        rng = trial_rng(45)
        rho = ginibre_state(rng, 2)
        sigma = ginibre_state(rng, 3)
        assert np.allclose(local_state(tensor(rho, sigma), 2, 3, keep=2), sigma, atol=1e-12)

    def test_singlet_is_maximally_mixed(self):
        assert np.allclose(local_state(singlet_state(), 2, 2, keep=2), I2 / 2, atol=1e-14)

    def test_weight_preserved(self):
        for k in range(10):
            rng = trial_rng(46, k)
            r = ginibre_positive(rng, 6)
            for keep in (1, 2):
                assert np.trace(local_state(r, 2, 3, keep)).real == pytest.approx(
                    np.trace(r).real, abs=1e-10
                )


class TestReducedPositivity:
    def test_identity_filter(self):
        rng = trial_rng(47)
        r = ginibre_positive(rng, 4)
        low = reduced_positivity_min_eig(np.eye(2), r, 2, 2)
        assert low == pytest.approx(min_eig_herm(partial_trace(r, 2, 2, side=1)), abs=1e-12)
        assert low >= 0.0

    def test_rank_one_case(self):
        r = np.zeros((4, 4), dtype=complex)
        r[0, 0] = 1.0  # |00><00|
        low = reduced_positivity_min_eig(P0, r, 2, 2)
        assert low == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2), (3, 3)])
    def test_random_pairs(self, dims):
        d1, d2 = dims
        for k in range(60):
            rng = trial_rng(48, k)
            a = ginibre_positive(rng, d1)
            r = ginibre_positive(rng, d1 * d2)
            assert reduced_positivity_min_eig(a, r, d1, d2) >= -1e-10

    def test_rejects_non_psd(self):
        with pytest.raises(ValueError):
            reduced_positivity_min_eig(np.diag([1.0, -1.0]), np.eye(4), 2, 2)


class TestInstruments:
    def test_haar_instrument_complete(self):
        inst = QuantumModel(3).random_instrument(trial_rng(49), 4)
        assert inst.completeness_defect() <= 1e-12

    def test_incomplete_rejected(self):
        with pytest.raises(IncompleteInstrument):
            Instrument([KrausOp([np.sqrt(0.9) * I2], check=False)])


class TestQuantumNoSignaling:
    def test_singlet_z_and_x(self):
        rho = singlet_state()
        for inst in (z_instrument(), x_instrument()):
            report = quantum_no_signaling_check(rho, inst, 2, 2, tol=1e-12)
            assert report.passed and report.max_defect <= 1e-12
            after = sum(
                partial_trace(
                    apply_quantum_op(local_embed(op, 2, side=1), rho), 2, 2, side=1
                )
                for op in inst.outcomes
            )
            assert np.abs(after - I2 / 2).max() <= 1e-12

    def test_trivial_instrument(self):
        rng = trial_rng(50)
        rho = ginibre_state(rng, 4)
        inst = Instrument([KrausOp([I2])])
        report = quantum_no_signaling_check(rho, inst, 2, 2)
        assert report.max_defect == pytest.approx(0.0, abs=1e-15)

    def test_random_instruments(self):
        model = QuantumModel(2)
        for k in range(40):
            rng = trial_rng(51, k)
            rho = ginibre_state(rng, 6)
            inst = model.random_instrument(rng, int(rng.integers(2, 5)))
            report = quantum_no_signaling_check(rho, inst, 2, 3, tol=1e-10)
            assert report.passed, report.max_defect

    def test_mutant_rejected(self):
        mutant = Instrument([KrausOp([np.sqrt(0.9) * I2], check=False)], check=False)
        with pytest.raises(IncompleteInstrument):
            quantum_no_signaling_check(singlet_state(), mutant, 2, 2)


class TestTraceBiconditional:
    def test_passes_and_is_not_vacuous(self):
        report = trace_biconditional_check(trials=90, d1=2, d2=2, seed=5)
        assert report.passed
        assert report.details["trace_preserved_cases"] > 10

    def test_other_dims(self):
        report = trace_biconditional_check(trials=60, d1=2, d2=3, seed=6)
        assert report.passed


class TestSteering:
    def test_singlet_projector_steers_without_signaling(self):
        report = steering_witness(singlet_state(), KrausOp([P0]), 2, 2)
        w = report.witness
        assert w["conditional_distance"] == pytest.approx(1.0, abs=1e-10)
        assert w["average_defect"] <= 1e-12
        assert w["outcome_probability"] == pytest.approx(0.5, abs=1e-12)

    def test_product_state_is_not_steered(self):
        rng = trial_rng(52)
        sigma = ginibre_state(rng, 2)
        rho = tensor(I2 / 2, sigma)
        report = steering_witness(rho, KrausOp([P0]), 2, 2)
        assert report.witness["conditional_distance"] <= 1e-12

    def test_entangled_states_generically_steer(self):
        steered = 0
        for k in range(10):
            rng = trial_rng(53, k)
            rho = random_pure_state(rng, 4)
            outcome = KrausOp([random_pure_state(rng, 2)], check=False)
            try:
                report = steering_witness(rho, outcome, 2, 2)
            except NotSelective:
                continue
            if report.witness["conditional_distance"] > 1e-3:
                steered += 1
        assert steered >= 1

    def test_trace_preserving_outcome_rejected(self):
        with pytest.raises(NotSelective):
            steering_witness(singlet_state(), KrausOp([I2]), 2, 2)


class TestModelInterface:
    def test_complement_effect(self):
        model = QuantumModel(2)
        t = model.operation([np.sqrt(0.3) * I2], "weak")
        comp = model.complement(t)
        assert np.allclose(k_operator(comp.payload), 0.7 * I2, atol=1e-12)

    def test_superoperator_distance_ignores_kraus_gauge(self):
        model = QuantumModel(2)
        # Same channel, two Kraus decompositions: {P0, P1} and its rotation
        # by the unitary mixing matrix [[1,1],[1,-1]]/sqrt(2).
        t1 = model.operation([P0, P1])
        t2 = model.operation([(P0 + P1) / np.sqrt(2), (P0 - P1) / np.sqrt(2)])
        assert model.transformation_distance(t1, t2) <= 1e-14

    def test_state_validation(self):
        model = QuantumModel(2)
        with pytest.raises(ValueError):
            model.state(np.diag([1.2, -0.2]))
        with pytest.raises(ValueError):
            model.state(np.diag([0.7, 0.7]))
        normalized = model.state(np.diag([0.7, 0.7]), normalize=True)
        assert normalized.weight == pytest.approx(1.0)


class TestICPovm:
    @pytest.mark.parametrize("d,expected", [(2, 4), (3, 9), (4, 16)])
    def test_complete_and_full_rank(self, d, expected):
        effects = minimal_ic_povm(d)
        assert len(effects) == expected
        assert np.abs(sum(effects) - np.eye(d)).max() <= 1e-9
        from optheory.linalg import span_rank

        assert span_rank(list(effects)) == expected

    def test_qubit_tetrahedron_overlaps(self):
        effects = minimal_ic_povm(2)
        # Tr[E_i E_j] = (1 + s_i . s_j)/8: 1/4 on the diagonal and, since
        # tetrahedron directions have s_i . s_j = -1/3, 1/12 off-diagonal.
        for i in range(4):
            for j in range(4):
                expected = 1.0 / 4.0 if i == j else 1.0 / 12.0
                got = np.trace(effects[i] @ effects[j]).real
                assert got == pytest.approx(expected, abs=1e-12)


def test_bipartite_embed_roundtrip():
    bip = QuantumBipartite(2, 3)
    rng = trial_rng(54)
    t = bip.left.random_transformation(rng)
    emb = bip.embed_left(t)
    rho = ginibre_state(rng, 6)
    direct = apply_quantum_op(local_embed(t.payload, 3, side=1), rho)
    assert np.allclose(apply_quantum_op(emb.payload, rho), direct, atol=1e-14)
