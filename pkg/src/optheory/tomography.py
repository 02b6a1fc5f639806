"""Informational completeness, affine dimensions, and local observability.

An observable is informationally complete (IC) when every effect is a
linear combination of its outcomes; it is minimal when those outcomes are
linearly independent.  For a composite system, local observability asks
whether jointly measured local IC observables can be IC for the composite.
Tensor composites pass; the direct-sum composite cannot, because every
locally generated joint effect is block-diagonal.  Passing forces the
dimension identity adm(S12) = adm(S1) adm(S2) + adm(S1) + adm(S2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .framework import BipartiteModel, Effect, TheoryModel, TOL_EFFECT
from .linalg import rank_of_rows
from .report import VerificationReport
from .sampling import trial_rng


class NotInformationallyComplete(ValueError):
    """Expansion coefficients requested in an observable that is not IC."""


@dataclass(frozen=True, eq=False)
class Observable:
    """A complete measurement: effects summing to the unit effect."""

    model: TheoryModel
    effects: tuple[Effect, ...]

    def __init__(self, effects, check: bool = True):
        effs = tuple(effects)
        if not effs:
            raise ValueError("an observable needs at least one effect")
        model = effs[0].model
        if any(e.model != model for e in effs):
            raise ValueError("all effects must be bound to one model")
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "effects", effs)
        if check:
            total = reduce(model.add_effects, effs)
            defect = float(
                np.abs(
                    model.effect_coords(total) - model.effect_coords(model.unit_effect())
                ).max()
            )
            if defect > TOL_EFFECT:
                raise ValueError(f"effects do not sum to the unit: defect {defect:.3e}")

    def __len__(self) -> int:
        return len(self.effects)

    def coordinate_rows(self) -> np.ndarray:
        return np.array([self.model.effect_coords(e) for e in self.effects])


@dataclass(frozen=True, eq=False)
class ICCertificate:
    """Rank audit of an observable against its model's effect space."""

    observable: Observable
    rank: int
    effect_space_dim: int

    @property
    def informationally_complete(self) -> bool:
        return self.rank == self.effect_space_dim

    @property
    def minimal(self) -> bool:
        return self.informationally_complete and self.rank == len(self.observable)

    @property
    def coefficients_available(self) -> bool:
        return self.informationally_complete


def ic_rank(obs: Observable) -> ICCertificate:
    """Rank of the observable's effects under real-linear combinations."""
    try:
        rows = obs.coordinate_rows()
    except NotImplementedError as exc:
        raise ValueError("model does not expose dual effect coordinates") from exc
    return ICCertificate(
        observable=obs,
        rank=rank_of_rows(rows),
        effect_space_dim=obs.model.effect_dim,
    )


def expand_in_ic(effect: Effect, obs: Observable, tol: float = 1e-9) -> np.ndarray:
    """Coefficients c with effect = sum_i c_i * obs.effects[i].

    Least squares against the effect coordinates; the reconstruction
    residual must not exceed ``tol``.  Unique when the observable is
    minimal.
    """
    if effect.model != obs.model:
        raise ValueError("effect and observable belong to different models")
    cert = ic_rank(obs)
    if not cert.informationally_complete:
        raise NotInformationallyComplete(
            f"observable has rank {cert.rank} < {cert.effect_space_dim}"
        )
    rows = obs.coordinate_rows()
    target = obs.model.effect_coords(effect)
    coeffs, *_ = np.linalg.lstsq(rows.T, target, rcond=None)
    residual = float(np.abs(rows.T @ coeffs - target).max())
    if residual > tol:
        raise ValueError(f"reconstruction residual {residual:.3e} exceeds {tol:.1e}")
    return coeffs


def affine_dims(model: TheoryModel) -> tuple[int, int]:
    """(affine dimension of states, linear dimension of effects).

    The state count is one below the effect count: normalization eats one
    dimension of the duality.
    """
    return model.effect_dim - 1, model.effect_dim


def minimal_ic_observable(model: TheoryModel) -> Observable:
    return Observable(model.minimal_ic_effects())


def product_observable(o1: Observable, o2: Observable, bip: BipartiteModel) -> Observable:
    """All pairwise products of two local observables, jointly measured."""
    if o1.model != bip.left or o2.model != bip.right:
        raise ValueError("observables must be bound to the bipartite components")
    return Observable(
        [bip.product_effect(e1, e2) for e1 in o1.effects for e2 in o2.effects]
    )


def local_observability_audit(
    bip: BipartiteModel,
    seed: int = 0,
    samples: int | None = None,
    expect_failure: bool = False,
) -> VerificationReport:
    """Can local outcomes tomograph the composite?

    Computes the rank, inside the composite's ambient effect space, of the
    jointly measured product of the components' built-in minimal IC
    observables together with a batch of randomly sampled local product
    effects.  Passing means that span covers the full ambient effect space,
    i.e. some locally assembled observable is IC for the composite.
    """
    obs = product_observable(
        minimal_ic_observable(bip.left), minimal_ic_observable(bip.right), bip
    )
    product_rows = [bip.ambient_effect_coords(e) for e in obs.effects]
    ambient = bip.ambient_effect_dim
    # The sampled batch only needs to exceed every achievable rank; ambient
    # plus margin keeps the SVD cheap at the largest supported dimensions.
    n_samples = samples if samples is not None else ambient + 32
    sampled_rows = [
        bip.ambient_effect_coords(bip.random_product_effect(trial_rng(seed, k)))
        for k in range(n_samples)
    ]
    rank = rank_of_rows(np.array(product_rows + sampled_rows))
    product_rank = rank_of_rows(np.array(product_rows))
    passed = rank == ambient
    return VerificationReport(
        suite="local-observability",
        seed=seed,
        trials=len(product_rows) + n_samples,
        max_defect=float(ambient - rank),
        tol=0.0,
        passed=passed,
        expected_failure=expect_failure,
        details={
            "rank": rank,
            "ambient_effect_dim": ambient,
            "product_observable_rank": product_rank,
            "product_outcomes": len(obs),
        },
    )


def dimension_identity_check(
    bip: BipartiteModel,
    seed: int = 0,
    audit: VerificationReport | None = None,
) -> VerificationReport:
    """Integer identity between composite and component state dimensions.

    Checks adm(S12) = adm(S1) adm(S2) + adm(S1) + adm(S2) exactly, plus the
    joint product-observable outcome count (adm(S1)+1)(adm(S2)+1).  When the
    local observability audit fails the identity is not expected to hold and
    the report is flagged accordingly.
    """
    if audit is None:
        audit = local_observability_audit(bip, seed=seed)
    a1, _ = affine_dims(bip.left)
    a2, _ = affine_dims(bip.right)
    a12, _ = affine_dims(bip.joint)
    formula = a1 * a2 + a1 + a2
    obs = product_observable(
        minimal_ic_observable(bip.left), minimal_ic_observable(bip.right), bip
    )
    expected_outcomes = (a1 + 1) * (a2 + 1)
    counts_ok = len(obs) == expected_outcomes
    identity_holds = a12 == formula and counts_ok
    return VerificationReport(
        suite="dimension-identity",
        seed=seed,
        trials=1,
        max_defect=float(abs(a12 - formula)),
        tol=0.0,
        passed=identity_holds,
        expected_failure=not audit.passed,
        details={
            "adm_joint": a12,
            "adm_left": a1,
            "adm_right": a2,
            "formula": formula,
            "product_outcomes": len(obs),
            "expected_outcomes": expected_outcomes,
        },
    )


def audit_rows(d1: int, d2: int, seed: int = 0) -> list[dict]:
    """Audit table over the three composition rules at component sizes (d1, d2).

    One row per composite: classical, tensor quantum, direct sum.  Each row
    records affine dimensions of the joint model, the local observability
    verdict, and the dimension identity verdict.
    """
    from .directsum import DSumBipartite
    from .framework import ClassicalBipartite
    from .quantum import QuantumBipartite

    composites: list[tuple[str, BipartiteModel, bool]] = [
        (f"classical {d1}x{d2}", ClassicalBipartite(d1, d2), False),
        (f"quantum {d1}x{d2}", QuantumBipartite(d1, d2), False),
        (f"dsum {d1}+{d2}", DSumBipartite(d1, d2), True),
    ]
    rows = []
    for name, bip, expect_failure in composites:
        lop = local_observability_audit(bip, seed=seed, expect_failure=expect_failure)
        identity = dimension_identity_check(bip, seed=seed, audit=lop)
        adm_states, adm_effects = affine_dims(bip.joint)
        rows.append(
            {
                "model": name,
                "adm_states": adm_states,
                "adm_effects": adm_effects,
                "lop_rank": lop.details["rank"],
                "lop_ambient": lop.details["ambient_effect_dim"],
                "lop_pass": lop.passed,
                "lop_ok": lop.ok,
                "identity_pass": identity.passed,
                "identity_ok": identity.ok,
                "expected_failure": expect_failure,
            }
        )
    return rows
