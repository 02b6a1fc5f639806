"""Command-line suite runner with deterministic seeding and JSON reports.

Exit codes: 0 when every check passes (expected failures matching
expectation included), 1 on an unexpected violation, 2 on usage errors.
Identical flags produce byte-identical JSON except the timestamp field.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from .boxes import (
    OPTIMAL_CHSH_ANGLES,
    chsh_value,
    classical_chsh_max,
    is_nosignaling_box,
    pr_box,
    singlet_box,
)
from .directsum import (
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
from .framework import (
    ClassicalBipartite,
    ClassicalModel,
    IncompleteAction,
    commutation_defect,
    model_invariant_suite,
    no_signaling_check,
)
from .quantum import (
    IncompleteInstrument,
    QuantumBipartite,
    QuantumModel,
    quantum_no_signaling_check,
    reduced_positivity_min_eig,
    singlet_state,
    trace_biconditional_check,
    x_instrument,
    z_instrument,
)
from .report import VerificationReport, combine_reports
from .sampling import ginibre_positive, ginibre_state, trial_rng
from .tomography import audit_rows

SUITES = ("opcore", "quantum-nosig", "lemma", "dsum", "tomo-audit", "boxworld", "all")


class UsageError(ValueError):
    """Invalid suite configuration."""


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    seed: int = 0
    trials: int = 100
    d1: int = 2
    d2: int = 2
    outcomes: int = 2
    tol: float = 1e-8
    json_path: str | None = None
    fixture: str | None = None
    box: str | None = None

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r}; choose from {SUITES}")
        if self.seed < 0:
            raise UsageError("seed must be a nonnegative integer")
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if not (2 <= self.d1 <= 6 and 2 <= self.d2 <= 6):
            raise UsageError("d1 and d2 must lie in [2, 6]")
        if not (1 <= self.outcomes <= 16):
            raise UsageError("outcomes must lie in [1, 16]")
        if self.tol <= 0:
            raise UsageError("tol must be positive")


def exit_code(report: VerificationReport) -> int:
    """0 when the report matches expectation, 1 otherwise."""
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _run_opcore(cfg: SuiteConfig) -> VerificationReport:
    """Generic framework invariants on all three models, plus the implication
    "embedded local transformations commute, hence no signaling"."""
    models = [ClassicalModel(cfg.d1), QuantumModel(cfg.d1), DSumModel(cfg.d1, cfg.d2)]
    reports = [
        model_invariant_suite(
            m, seed=cfg.seed, trials=cfg.trials, outcomes=max(cfg.outcomes, 2), tol=1e-9
        )
        for m in models
    ]
    composites = [
        ClassicalBipartite(cfg.d1, cfg.d2),
        QuantumBipartite(cfg.d1, cfg.d2),
        DSumBipartite(cfg.d1, cfg.d2),
    ]
    nosig_trials = max(cfg.trials // 5, 5)
    for bip in composites:
        worst_commute = 0.0
        worst_nosig = 0.0
        for k in range(nosig_trials):
            rng = trial_rng(cfg.seed, k)
            worst_commute = max(
                worst_commute,
                commutation_defect(
                    bip, bip.left.random_transformation(rng), bip.right.random_transformation(rng)
                ),
            )
            joint = bip.joint.random_state(rng)
            action = bip.left.random_action(rng, max(cfg.outcomes, 2))
            probes = [bip.right.random_transformation(rng) for _ in range(3)]
            rep = no_signaling_check(joint, action, bip, probes, tol=cfg.tol, seed=cfg.seed)
            worst_nosig = max(worst_nosig, rep.max_defect)
        defect = max(worst_commute, worst_nosig)
        reports.append(
            VerificationReport(
                suite=f"commutation-and-no-signaling[{bip.joint.name}]",
                seed=cfg.seed,
                trials=nosig_trials,
                max_defect=defect,
                tol=cfg.tol,
                passed=worst_commute <= 1e-10 and worst_nosig <= cfg.tol,
                details={"commutation": worst_commute, "no_signaling": worst_nosig},
            )
        )
    return combine_reports("opcore", reports)


def _run_quantum_nosig(cfg: SuiteConfig) -> VerificationReport:
    reports = []
    if cfg.fixture is not None:
        from .fixtures import load_instrument

        try:
            inst = load_instrument(cfg.fixture)
            if inst.dim != cfg.d1:
                raise UsageError(
                    f"fixture instrument acts on dimension {inst.dim}, expected {cfg.d1}"
                )
            rho = ginibre_state(trial_rng(cfg.seed, 0), cfg.d1 * cfg.d2)
            reports.append(
                quantum_no_signaling_check(rho, inst, cfg.d1, cfg.d2, tol=cfg.tol, seed=cfg.seed)
            )
        except (IncompleteInstrument, IncompleteAction, ValueError) as exc:
            if isinstance(exc, UsageError):
                raise
            reports.append(
                VerificationReport(
                    suite="quantum-no-signaling[fixture]",
                    seed=cfg.seed,
                    trials=1,
                    max_defect=float("inf"),
                    tol=cfg.tol,
                    passed=False,
                    witness={"rejected_fixture": cfg.fixture, "reason": str(exc)},
                )
            )
    else:
        model = QuantumModel(cfg.d1)
        worst = 0.0
        for k in range(cfg.trials):
            rng = trial_rng(cfg.seed, k)
            rho = ginibre_state(rng, cfg.d1 * cfg.d2)
            n_out = int(rng.integers(2, 5))
            inst = model.random_instrument(rng, n_out)
            rep = quantum_no_signaling_check(rho, inst, cfg.d1, cfg.d2, tol=cfg.tol, seed=cfg.seed)
            worst = max(worst, rep.max_defect)
        reports.append(
            VerificationReport(
                suite="quantum-no-signaling[random]",
                seed=cfg.seed,
                trials=cfg.trials,
                max_defect=worst,
                tol=cfg.tol,
                passed=worst <= cfg.tol,
            )
        )
        if cfg.d1 == 2 and cfg.d2 == 2:
            rho = singlet_state()
            for name, inst in (("z", z_instrument()), ("x", x_instrument())):
                rep = quantum_no_signaling_check(rho, inst, 2, 2, tol=1e-12, seed=cfg.seed)
                reports.append(
                    VerificationReport(
                        suite=f"quantum-no-signaling[singlet-{name}]",
                        seed=cfg.seed,
                        trials=1,
                        max_defect=rep.max_defect,
                        tol=1e-12,
                        passed=rep.passed,
                    )
                )
        reports.append(
            trace_biconditional_check(
                trials=cfg.trials, d1=cfg.d1, d2=cfg.d2, seed=cfg.seed
            )
        )
    return combine_reports("quantum-nosig", reports)


def _run_lemma(cfg: SuiteConfig) -> VerificationReport:
    """Positivity of remote reductions under local positive filters."""
    worst = 0.0
    for k in range(cfg.trials):
        rng = trial_rng(cfg.seed, k)
        a = ginibre_positive(rng, cfg.d1)
        r = ginibre_positive(rng, cfg.d1 * cfg.d2)
        low = reduced_positivity_min_eig(a, r, cfg.d1, cfg.d2)
        worst = max(worst, -min(low, 0.0))
    return VerificationReport(
        suite="lemma",
        seed=cfg.seed,
        trials=cfg.trials,
        max_defect=worst,
        tol=1e-10,
        passed=worst <= 1e-10,
    )


def _run_dsum(cfg: SuiteConfig) -> VerificationReport:
    worst_commute = 0.0
    worst_nosig = 0.0
    worst_quotient = 0.0
    for k in range(cfg.trials):
        rng = trial_rng(cfg.seed, k)
        a = ds_random_local_op(rng, 1, cfg.d1)
        b = ds_random_local_op(rng, 2, cfg.d2)
        worst_commute = max(worst_commute, ds_commutation_defect(a, b, cfg.d1, cfg.d2))

        omega = DSumModel(cfg.d1, cfg.d2).random_state(rng).payload
        action = ds_random_action(rng, 1, cfg.d1, max(cfg.outcomes, 2))
        probes = [ds_random_local_op(rng, 2, cfg.d2) for _ in range(3)]
        rep = ds_nosig_check(omega, action, probes, tol=cfg.tol, seed=cfg.seed)
        worst_nosig = max(worst_nosig, rep.max_defect)

        norm = ds_local_prob(omega, a)
        if norm > 1e-6:
            conditioned = ds_condition(omega, a)
            quotient = ds_joint_prob(omega, a, b) / norm
            worst_quotient = max(worst_quotient, abs(ds_local_prob(conditioned, b) - quotient))
    passed = worst_commute <= 1e-12 and worst_nosig <= cfg.tol and worst_quotient <= 1e-10
    return VerificationReport(
        suite="dsum",
        seed=cfg.seed,
        trials=cfg.trials,
        max_defect=max(worst_commute, worst_nosig, worst_quotient),
        tol=cfg.tol,
        passed=passed,
        details={
            "commutation": worst_commute,
            "no_signaling": worst_nosig,
            "conditioning_quotient": worst_quotient,
        },
    )


def _run_tomo_audit(cfg: SuiteConfig) -> VerificationReport:
    rows = audit_rows(cfg.d1, cfg.d2, seed=cfg.seed)
    ok = all(r["lop_ok"] and r["identity_ok"] for r in rows)
    mismatches = sum((not r["lop_ok"]) + (not r["identity_ok"]) for r in rows)
    return VerificationReport(
        suite="tomo-audit",
        seed=cfg.seed,
        trials=len(rows),
        max_defect=float(mismatches),
        tol=0.0,
        passed=ok,
        details={"rows": rows},
    )


def _run_boxworld(cfg: SuiteConfig) -> VerificationReport:
    reports = []
    if cfg.box is not None:
        from .fixtures import load_box

        try:
            box = load_box(cfg.box)
            nosig = is_nosignaling_box(box, tol=1e-10)
            reports.append(
                VerificationReport(
                    suite="boxworld[fixture]",
                    seed=cfg.seed,
                    trials=1,
                    max_defect=0.0 if nosig else 1.0,
                    tol=0.0,
                    passed=nosig,
                    witness={"box": box.to_json(), "chsh": chsh_value(box)},
                )
            )
        except ValueError as exc:
            reports.append(
                VerificationReport(
                    suite="boxworld[fixture]",
                    seed=cfg.seed,
                    trials=1,
                    max_defect=float("inf"),
                    tol=0.0,
                    passed=False,
                    witness={"rejected_fixture": cfg.box, "reason": str(exc)},
                )
            )
    else:
        classical = classical_chsh_max()
        pr = pr_box()
        quantum = singlet_box(OPTIMAL_CHSH_ANGLES)
        landmarks = {
            "classical_max": classical,
            "pr_chsh": chsh_value(pr),
            "singlet_chsh": chsh_value(quantum),
        }
        defects = [
            abs(classical - 2.0),
            abs(chsh_value(pr) - 4.0),
            0.0 if is_nosignaling_box(pr, tol=0.0) else 1.0,
            abs(chsh_value(quantum) - 2.0 * np.sqrt(2.0)),
            0.0 if is_nosignaling_box(quantum, tol=1e-10) else 1.0,
        ]
        worst = max(defects)
        reports.append(
            VerificationReport(
                suite="boxworld[landmarks]",
                seed=cfg.seed,
                trials=3,
                max_defect=worst,
                tol=1e-9,
                passed=worst <= 1e-9,
                details=landmarks,
                witness={"pr_box": pr.to_json(), "singlet_box": quantum.to_json()},
            )
        )
    return combine_reports("boxworld", reports)


_RUNNERS = {
    "opcore": _run_opcore,
    "quantum-nosig": _run_quantum_nosig,
    "lemma": _run_lemma,
    "dsum": _run_dsum,
    "tomo-audit": _run_tomo_audit,
    "boxworld": _run_boxworld,
}


def run_suite(cfg: SuiteConfig) -> VerificationReport:
    """Run one suite (or all) under a validated configuration."""
    cfg.validate()
    if cfg.suite == "all":
        return combine_reports(
            "all", [_RUNNERS[name](cfg) for name in SUITES if name != "all"]
        )
    return _RUNNERS[cfg.suite](cfg)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _print_tomo_table(rows: list[dict]) -> None:
    header = f"{'model':<18}{'adm(S)':>8}{'adm(P1)':>9}  {'local-obs':<24}{'identity':<18}"
    print(header)
    print("-" * len(header))
    for r in rows:
        lop = "pass" if r["lop_pass"] else f"FAIL ({r['lop_rank']}/{r['lop_ambient']})"
        if r["expected_failure"]:
            lop += " [expected]" if not r["lop_pass"] else " [unexpected pass]"
        ident = "pass" if r["identity_pass"] else "fail"
        if r["expected_failure"] and not r["identity_pass"]:
            ident += " [expected]"
        print(f"{r['model']:<18}{r['adm_states']:>8}{r['adm_effects']:>9}  {lop:<24}{ident:<18}")


def _print_box_table(name: str, entries: list[float]) -> None:
    table = np.asarray(entries).reshape(2, 2, 2, 2)
    print(f"{name} p(a,b|x,y):")
    for x in range(2):
        for y in range(2):
            row = "  ".join(f"{table[x, y, a, b]:6.4f}" for a in range(2) for b in range(2))
            print(f"  x={x} y={y}:  {row}")


def _emit(report: VerificationReport, cfg: SuiteConfig) -> None:
    if report.details.get("sub_reports"):
        for sub in report.details["sub_reports"]:
            verdict = "PASS" if sub["pass"] else "FAIL"
            if sub.get("expected_failure"):
                verdict += " (expected)" if not sub["pass"] else " (unexpected)"
            print(f"  {verdict:<18} {sub['suite']:<42} max_defect={sub['max_defect']:.3e}")
            if cfg.suite == "boxworld" and sub.get("details"):
                for key, value in sub["details"].items():
                    print(f"      {key} = {value:.10f}")
            if cfg.suite == "boxworld" and sub.get("witness"):
                for key, value in sub["witness"].items():
                    if isinstance(value, list) and len(value) == 16:
                        _print_box_table(key, value)
    if cfg.suite == "tomo-audit":
        _print_tomo_table(report.details["rows"])
    print(report.summary())
    if cfg.json_path:
        payload = {
            "config": {k: v for k, v in asdict(cfg).items() if k != "json_path"},
            "report": report.to_dict(),
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        with open(cfg.json_path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1)
            fh.write("\n")
        print(f"wrote {cfg.json_path}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optheory",
        description="Randomized verification suites for operational probabilistic theories.",
    )
    parser.add_argument("--suite", default="all", choices=SUITES)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--d1", type=int, default=2)
    parser.add_argument("--d2", type=int, default=2)
    parser.add_argument("--outcomes", type=int, default=2)
    parser.add_argument("--tol", type=float, default=1e-8)
    parser.add_argument("--json", dest="json_path", default=None, metavar="PATH")
    parser.add_argument(
        "--fixture",
        default=None,
        help="instrument fixture (name or JSON path) for the quantum-nosig suite",
    )
    parser.add_argument(
        "--box", default=None, help="box fixture (name or JSON path) for the boxworld suite"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    cfg = SuiteConfig(
        suite=args.suite,
        seed=args.seed,
        trials=args.trials,
        d1=args.d1,
        d2=args.d2,
        outcomes=args.outcomes,
        tol=args.tol,
        json_path=args.json_path,
        fixture=args.fixture,
        box=args.box,
    )
    try:
        report = run_suite(cfg)
    except (UsageError, FileNotFoundError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    _emit(report, cfg)
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
