"""Acceptance gate: every headline numerical claim at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.  Each check prints its verdict before asserting, so the table is
complete even when something fails.
"""

import time
from itertools import product

import numpy as np
import pytest

from optheory.boxes import (
    OPTIMAL_CHSH_ANGLES,
    chsh_value,
    classical_chsh_max,
    is_nosignaling_box,
    pr_box,
    singlet_box,
)
from optheory.cli import main
from optheory.directsum import (
    DSumBipartite,
    DSumModel,
    ds_commutation_defect,
    ds_condition,
    ds_joint_prob,
    ds_local_prob,
    ds_nosig_check,
    ds_random_action,
    ds_random_local_op,
)
from optheory.framework import (
    ClassicalBipartite,
    ClassicalModel,
    model_invariant_suite,
)
from optheory.linalg import partial_trace, trace_norm
from optheory.quantum import (
    KrausOp,
    QuantumBipartite,
    QuantumModel,
    apply_quantum_op,
    local_embed,
    quantum_no_signaling_check,
    reduced_positivity_min_eig,
    singlet_state,
    steering_witness,
    trace_biconditional_check,
    x_instrument,
    z_instrument,
)
from optheory.sampling import ginibre_positive, ginibre_state, trial_rng
from optheory.tomography import (
    dimension_identity_check,
    local_observability_audit,
    minimal_ic_observable,
    product_observable,
)


def _verdict(num: int, description: str, passed: bool, detail: str = "") -> None:
    line = f"[criterion {num:2d}] {'PASS' if passed else 'FAIL'}  {description}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert passed, line


def test_criterion_1_reduced_positivity():
    start = time.monotonic()
    worst = np.inf
    for d1, d2 in product((2, 3), repeat=2):
        for k in range(500):
            rng = trial_rng(101, k)
            a = ginibre_positive(rng, d1)
            r = ginibre_positive(rng, d1 * d2)
            worst = min(worst, reduced_positivity_min_eig(a, r, d1, d2))
    elapsed = time.monotonic() - start
    _verdict(
        1,
        "reduced positivity over 500 pairs at each (d1,d2) in {2,3}^2",
        worst >= -1e-10 and elapsed < 5.0,
        f"min eig {worst:.2e}, {elapsed:.2f}s",
    )


def test_criterion_2_trace_biconditional():
    start = time.monotonic()
    reports = [
        trace_biconditional_check(trials=200, d1=2, d2=2, seed=102),
        trace_biconditional_check(trials=200, d1=2, d2=3, seed=103),
    ]
    elapsed = time.monotonic() - start
    exercised = sum(r.details["trace_preserved_cases"] for r in reports)
    _verdict(
        2,
        "trace preserved iff remote reduction fixed, 200+200 random pairs",
        all(r.passed for r in reports) and exercised > 100 and elapsed < 10.0,
        f"worst violation {max(r.max_defect for r in reports):.2e}, "
        f"{exercised} trace-preserving cases, {elapsed:.2f}s",
    )


def test_criterion_3_instrument_no_signaling():
    model = QuantumModel(2)
    worst = 0.0
    for k in range(200):
        rng = trial_rng(104, k)
        rho = ginibre_state(rng, 4)
        inst = model.random_instrument(rng, int(rng.integers(2, 5)))
        report = quantum_no_signaling_check(rho, inst, 2, 2, tol=1e-10)
        worst = max(worst, report.max_defect)
    singlet_defect = 0.0
    rho = singlet_state()
    for inst in (z_instrument(), x_instrument()):
        after = sum(
            partial_trace(apply_quantum_op(local_embed(op, 2, side=1), rho), 2, 2, side=1)
            for op in inst.outcomes
        )
        singlet_defect = max(singlet_defect, float(np.abs(after - np.eye(2) / 2).max()))
    _verdict(
        3,
        "complete instruments leave the remote reduction fixed (200 states)",
        worst <= 1e-10 and singlet_defect <= 1e-12,
        f"random defect {worst:.2e}, singlet z/x defect {singlet_defect:.2e}",
    )


def test_criterion_4_steering_contrast():
    report = steering_witness(singlet_state(), KrausOp([np.diag([1.0, 0.0])]), 2, 2)
    w = report.witness
    _verdict(
        4,
        "selective outcome steers the singlet remote state; average does not",
        abs(w["conditional_distance"] - 1.0) <= 1e-10 and w["average_defect"] <= 1e-10,
        f"conditional distance {w['conditional_distance']:.12f}, "
        f"average defect {w['average_defect']:.2e}",
    )


def test_criterion_5_direct_sum_model():
    worst_commute = 0.0
    for k in range(200):
        rng = trial_rng(105, k)
        a = ds_random_local_op(rng, 1, 2)
        b = ds_random_local_op(rng, 2, 2)
        worst_commute = max(worst_commute, ds_commutation_defect(a, b, 2, 2))
    worst_nosig = 0.0
    worst_quotient = 0.0
    for k in range(100):
        rng = trial_rng(106, k)
        omega = DSumModel(2, 2).random_state(rng).payload
        action = ds_random_action(rng, 1, 2, int(rng.integers(2, 5)))
        probes = [ds_random_local_op(rng, 2, 2) for _ in range(3)]
        worst_nosig = max(worst_nosig, ds_nosig_check(omega, action, probes).max_defect)
        a = ds_random_local_op(rng, 1, 2)
        b = probes[0]
        norm = ds_local_prob(omega, a)
        if norm > 1e-6:
            lhs = ds_local_prob(ds_condition(omega, a), b)
            rhs = ds_joint_prob(omega, a, b) / norm
            worst_quotient = max(worst_quotient, abs(lhs - rhs))
    _verdict(
        5,
        "block composite: commutation, no-signaling, conditioning quotient",
        worst_commute <= 1e-12 and worst_nosig <= 1e-10 and worst_quotient <= 1e-10,
        f"commute {worst_commute:.2e}, nosig {worst_nosig:.2e}, "
        f"quotient {worst_quotient:.2e}",
    )


def test_criterion_6_dimension_identity():
    cases = [
        (QuantumBipartite(2, 2), 15, 16),
        (QuantumBipartite(2, 3), 35, 36),
        (ClassicalBipartite(2, 2), 3, 4),
    ]
    ok = True
    summary = []
    for bip, expected_adm, expected_outcomes in cases:
        report = dimension_identity_check(bip, seed=107)
        d = report.details
        obs = product_observable(
            minimal_ic_observable(bip.left), minimal_ic_observable(bip.right), bip
        )
        case_ok = (
            report.passed
            and d["adm_joint"] == expected_adm == d["formula"]
            and len(obs) == expected_outcomes
        )
        ok = ok and case_ok
        summary.append(f"{d['adm_joint']}={d['formula']}")
    _verdict(
        6,
        "composite affine dimension identity, exact integers",
        ok,
        "; ".join(summary),
    )


def test_criterion_7_local_observability_discrimination():
    quantum = local_observability_audit(QuantumBipartite(2, 2), seed=108)
    classical = local_observability_audit(ClassicalBipartite(2, 2), seed=108)
    dsum22 = local_observability_audit(DSumBipartite(2, 2), seed=108)
    dsum23 = local_observability_audit(DSumBipartite(2, 3), seed=108)
    ok = (
        quantum.passed
        and quantum.details["rank"] == 16
        and classical.passed
        and classical.details["rank"] == 4
        and not dsum22.passed
        and dsum22.details["rank"] == 8
        and dsum22.details["ambient_effect_dim"] == 16
        and not dsum23.passed
        and dsum23.details["rank"] == 13
        and dsum23.details["ambient_effect_dim"] == 25
    )
    _verdict(
        7,
        "local observability: tensor passes, direct sum fails at block rank",
        ok,
        f"quantum 16/16, classical 4/4, dsum {dsum22.details['rank']}/16 "
        f"and {dsum23.details['rank']}/25",
    )


def test_criterion_8_chsh_landmarks():
    classical = classical_chsh_max()
    pr = pr_box()
    quantum = chsh_value(singlet_box(OPTIMAL_CHSH_ANGLES))
    ok = (
        classical == 2.0
        and chsh_value(pr) == 4.0
        and is_nosignaling_box(pr, tol=0.0)
        and abs(quantum - 2.0 * np.sqrt(2.0)) <= 1e-9
    )
    _verdict(
        8,
        "CHSH landmarks: classical 2, singlet 2*sqrt(2), extremal box 4",
        ok,
        f"classical {classical}, quantum {quantum:.10f}, extremal {chsh_value(pr)}",
    )


def test_criterion_9_framework_invariants_everywhere():
    reports = [
        model_invariant_suite(model, seed=109, trials=60, outcomes=3, tol=1e-9)
        for model in (ClassicalModel(2), QuantumModel(2), DSumModel(2, 2))
    ]
    worst = max(r.max_defect for r in reports)
    _verdict(
        9,
        "Bayes chain, linearity, distributivity, monoid, completeness x3 models",
        all(r.passed for r in reports),
        f"worst defect {worst:.2e}",
    )


def test_criterion_10_mutants_rejected(capsys):
    code_instrument = main(
        ["--suite", "quantum-nosig", "--fixture", "mutant-instrument", "--trials", "5"]
    )
    code_box = main(["--suite", "boxworld", "--box", "signaling-box"])
    capsys.readouterr()
    with capsys.disabled():
        _verdict(
            10,
            "mutant fixtures rejected with exit code 1",
            code_instrument == 1 and code_box == 1,
            f"instrument exit {code_instrument}, box exit {code_box}",
        )


def test_trace_norm_sanity():
    # Shared metric of the acceptance checks: trace norm of a Hermitian
    # difference equals the sum of absolute eigenvalues.
    rng = trial_rng(110)
    a = ginibre_state(rng, 3)
    b = ginibre_state(rng, 3)
    eigs = np.linalg.eigvalsh(a - b)
    assert trace_norm(a - b) == pytest.approx(np.abs(eigs).sum(), abs=1e-12)
