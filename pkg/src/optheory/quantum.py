"""Quantum instantiation: density operators, Kraus operations, instruments.

Bipartite structure is the tensor product; local operations embed as
``M (x) I`` and the local state is the partial trace.  The verifiers at the
bottom certify, numerically, that complete local instruments never move the
remote reduced state, that trace preservation on a given joint operator is
equivalent to invariance of its reduction, and that selective outcomes may
steer the remote conditional state without signaling on average.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .framework import (
    Action,
    BipartiteModel,
    Effect,
    IncompleteAction,
    ModelMismatch,
    State,
    TheoryModel,
    TOL_EFFECT,
    Transformation,
)
from .linalg import (
    PSD_SLACK,
    as_matrix,
    hermitian_coords,
    max_eig_herm,
    min_eig_herm,
    partial_trace,
    psd_sqrt,
    require_hermitian,
    span_rank,
    tensor,
    trace_norm,
)
from .report import VerificationReport
from .sampling import (
    complex_gaussian,
    ginibre_positive,
    ginibre_state,
    haar_isometry_blocks,
    random_pure_state,
    trial_rng,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class IncompleteInstrument(IncompleteAction):
    """Trace operators of the instrument outcomes do not sum to the identity."""


class NotSelective(ValueError):
    """Steering witness requires an outcome that is trace-decreasing on the state."""


@dataclass(frozen=True, eq=False)
class KrausOp:
    """A generally trace-decreasing quantum operation in Kraus form."""

    kraus: tuple[np.ndarray, ...]

    def __init__(self, kraus, check: bool = True):
        mats = tuple(as_matrix(m) for m in kraus)
        if not mats:
            raise ValueError("a quantum operation needs at least one Kraus operator")
        shape = mats[0].shape
        if any(m.shape != shape for m in mats):
            raise ValueError("all Kraus operators must share one shape")
        object.__setattr__(self, "kraus", mats)
        if check:
            k = self.trace_operator()
            top = max_eig_herm(k)
            if top > 1.0 + TOL_EFFECT:
                raise ValueError(
                    f"sum of M^dag M has eigenvalue {top:.6f} > 1; not trace-nonincreasing"
                )

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    def trace_operator(self) -> np.ndarray:
        """K = sum_k M_k^dag M_k, the operator carrying all occurrence statistics."""
        return require_hermitian(sum(m.conj().T @ m for m in self.kraus))

    def __call__(self, rho) -> np.ndarray:
        return apply_quantum_op(self, rho)


@dataclass(frozen=True, eq=False)
class Instrument:
    """A complete quantum action: outcomes whose trace operators sum to I."""

    outcomes: tuple[KrausOp, ...]

    def __init__(self, outcomes, check: bool = True):
        ops = tuple(outcomes)
        if not ops:
            raise ValueError("an instrument needs at least one outcome")
        object.__setattr__(self, "outcomes", ops)
        if check:
            defect = self.completeness_defect()
            if defect > TOL_EFFECT:
                raise IncompleteInstrument(
                    f"instrument trace operators sum away from I: defect {defect:.3e}"
                )

    @property
    def dim(self) -> int:
        return self.outcomes[0].dim_in

    def completeness_defect(self) -> float:
        total = sum(op.trace_operator() for op in self.outcomes)
        return float(np.abs(total - np.eye(self.dim)).max())


def apply_quantum_op(m: KrausOp, rho) -> np.ndarray:
    """sum_k M_k rho M_k^dag; PSD in, PSD out, trace possibly decreased."""
    r = as_matrix(rho, square=True)
    if r.shape[0] != m.dim_in:
        raise ValueError(f"operator dim {r.shape[0]} does not match Kraus dim {m.dim_in}")
    return sum(k @ r @ k.conj().T for k in m.kraus)


def k_operator(m: KrausOp) -> np.ndarray:
    """The Hermitian K with Tr[m(rho)] = Tr[K rho] for every rho."""
    return m.trace_operator()


def local_embed(m: KrausOp, d_other: int, side: int = 1) -> KrausOp:
    """Extend a local operation to the joint space by tensoring with identity."""
    eye = np.eye(d_other)
    if side == 1:
        return KrausOp([np.kron(k, eye) for k in m.kraus], check=False)
    if side == 2:
        return KrausOp([np.kron(eye, k) for k in m.kraus], check=False)
    raise ValueError(f"side must be 1 or 2, got {side!r}")


def local_state(r, d1: int, d2: int, keep: int) -> np.ndarray:
    """Reduced operator of the kept factor; preserves the total weight."""
    if keep == 1:
        return partial_trace(r, d1, d2, side=2)
    if keep == 2:
        return partial_trace(r, d1, d2, side=1)
    raise ValueError(f"keep must be 1 or 2, got {keep!r}")


def reduced_positivity_min_eig(a, r, d1: int, d2: int) -> float:
    """Smallest eigenvalue of Tr_1[(A (x) I) R] for PSD A and R (must be >= 0).

    This is the kernel fact behind the trace-preservation equivalence: a
    positive local filter cannot push the remote reduction out of the
    positive cone.
    """
    am = require_hermitian(a)
    rm = require_hermitian(r)
    if min_eig_herm(am) < -PSD_SLACK * max(1.0, trace_norm(am)):
        raise ValueError("local operator A must be PSD")
    if min_eig_herm(rm) < -PSD_SLACK * max(1.0, trace_norm(rm)):
        raise ValueError("joint operator R must be PSD")
    reduced = partial_trace(tensor(am, np.eye(d2)) @ rm, d1, d2, side=1)
    return min_eig_herm(reduced)


def quantum_no_signaling_check(
    rho,
    inst: Instrument,
    d1: int,
    d2: int,
    tol: float = 1e-10,
    reduced_tol: float = 1e-8,
    seed: int = 0,
) -> VerificationReport:
    """Certify that an instrument on side 1 leaves side 2's reduction fixed.

    Reports (i) the trace-norm defect between the remote reduction before
    and after the averaged (completed) instrument, and (ii) for every
    outcome that happens to preserve the trace on this state, its individual
    reduced-state defect.
    """
    r = require_hermitian(rho)
    if r.shape[0] != d1 * d2:
        raise ValueError("joint state dimension does not match d1*d2")
    defect = inst.completeness_defect()
    if defect > TOL_EFFECT:
        raise IncompleteInstrument(f"instrument incomplete: defect {defect:.3e}")
    before = partial_trace(r, d1, d2, side=1)
    total_weight = float(np.trace(r).real)
    after = np.zeros_like(before)
    outcome_defects = []
    preserved_defects = []
    for op in inst.outcomes:
        out = apply_quantum_op(local_embed(op, d2, side=1), r)
        reduced = partial_trace(out, d1, d2, side=1)
        after = after + reduced
        trace_defect = abs(float(np.trace(out).real) - total_weight)
        reduced_defect = trace_norm(reduced - before)
        outcome_defects.append({"trace_defect": trace_defect, "reduced_defect": reduced_defect})
        if trace_defect <= tol:
            preserved_defects.append(reduced_defect)
    total_defect = trace_norm(after - before)
    passed = total_defect <= tol and all(d <= reduced_tol for d in preserved_defects)
    return VerificationReport(
        suite="quantum-no-signaling",
        seed=seed,
        trials=len(inst.outcomes),
        max_defect=total_defect,
        tol=tol,
        passed=passed,
        details={
            "outcomes": outcome_defects,
            "trace_preserved_outcomes": len(preserved_defects),
        },
    )


def trace_biconditional_check(
    trials: int = 200,
    d1: int = 2,
    d2: int = 2,
    seed: int = 0,
    trace_tol: float = 1e-10,
    reduced_pass_tol: float = 1e-8,
    reduced_fail_tol: float = 1e-6,
    trace_fail_tol: float = 1e-8,
) -> VerificationReport:
    """Randomized audit of the trace-preservation equivalence for local operations.

    For sampled pairs (R, M) with M acting on side 1 only: whenever the total
    trace is preserved the remote reduction must be unchanged, and whenever
    the remote reduction moved appreciably the trace must have dropped.  The
    sampler mixes generic selective operations, trace-preserving channels,
    and selective operations whose filter is aligned with the state support
    (so the trace-preserved branch is exercised nontrivially).
    """
    worst = 0.0
    preserved_cases = 0
    witness = None
    for k in range(trials):
        rng = trial_rng(seed, k)
        kind = k % 3
        if kind == 0:
            r = ginibre_positive(rng, d1 * d2)
            r /= np.trace(r).real
            blocks = haar_isometry_blocks(rng, d1, 3)
            m = KrausOp(blocks[: int(rng.integers(1, 3))], check=False)
        elif kind == 1:
            r = ginibre_state(rng, d1 * d2)
            m = KrausOp(haar_isometry_blocks(rng, d1, 2), check=False)
        else:
            rank = int(rng.integers(1, d1))
            basis = np.linalg.qr(complex_gaussian(rng, d1, d1))[0]
            p = basis[:, :rank] @ basis[:, :rank].conj().T
            g = ginibre_positive(rng, d1 * d2)
            proj = tensor(p, np.eye(d2))
            r = proj @ g @ proj
            r /= np.trace(r).real
            m = KrausOp([p], check=False)
        joint = apply_quantum_op(local_embed(m, d2, side=1), r)
        trace_defect = abs(float(np.trace(joint).real) - float(np.trace(r).real))
        reduced_defect = trace_norm(
            partial_trace(joint, d1, d2, side=1) - partial_trace(r, d1, d2, side=1)
        )
        violation = 0.0
        if trace_defect <= trace_tol:
            preserved_cases += 1
            if reduced_defect > reduced_pass_tol:
                violation = reduced_defect
        if reduced_defect > reduced_fail_tol and trace_defect <= trace_fail_tol:
            violation = max(violation, reduced_defect)
        if violation > worst:
            worst = violation
            witness = {"trial": k, "trace_defect": trace_defect, "reduced_defect": reduced_defect}
    return VerificationReport(
        suite="trace-biconditional",
        seed=seed,
        trials=trials,
        max_defect=worst,
        tol=reduced_pass_tol,
        passed=worst <= reduced_pass_tol and preserved_cases > 0,
        witness=witness,
        details={"trace_preserved_cases": preserved_cases},
    )


def steering_witness(
    rho, m: KrausOp, d1: int, d2: int, tol: float = 1e-10, seed: int = 0
) -> VerificationReport:
    """Contrast a selective outcome's remote steering with the averaged instrument.

    The conditional remote state may differ from the unconditional one (that
    is permitted, and reported), while completing ``m`` to a full instrument
    and averaging leaves the remote reduction fixed.  Informational: the
    report's defect is the averaged-instrument defect only.
    """
    r = require_hermitian(rho)
    joint = apply_quantum_op(local_embed(m, d2, side=1), r)
    weight = float(np.trace(joint).real)
    total = float(np.trace(r).real)
    if weight >= total - tol:
        raise NotSelective(
            f"outcome preserves the trace on this state ({weight:.6f} of {total:.6f})"
        )
    unconditional = partial_trace(r, d1, d2, side=1) / total
    conditional = partial_trace(joint, d1, d2, side=1) / weight
    conditional_distance = trace_norm(conditional - unconditional)

    residual = KrausOp([psd_sqrt(np.eye(d1) - m.trace_operator())], check=False)
    inst = Instrument([m, residual])
    avg = quantum_no_signaling_check(r, inst, d1, d2, tol=tol, seed=seed)
    return VerificationReport(
        suite="steering-witness",
        seed=seed,
        trials=1,
        max_defect=avg.max_defect,
        tol=tol,
        passed=avg.passed,
        witness={
            "conditional_distance": conditional_distance,
            "outcome_probability": weight / total,
            "average_defect": avg.max_defect,
        },
    )


# ---------------------------------------------------------------------------
# TheoryModel adapter
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=True)
class QuantumModel(TheoryModel):
    """Finite-dimensional quantum theory on a d-dimensional Hilbert space."""

    d: int
    name: str = field(default="quantum", compare=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("Hilbert space dimension must be positive")
        object.__setattr__(self, "name", f"quantum({self.d})")

    @property
    def state_dim(self) -> int:
        return self.d * self.d - 1

    @property
    def effect_dim(self) -> int:
        return self.d * self.d

    # -- factories ----------------------------------------------------------
    def state(self, matrix, normalize: bool = False) -> State:
        m = require_hermitian(matrix)
        if m.shape[0] != self.d:
            raise ValueError(f"state must be {self.d}x{self.d}")
        if min_eig_herm(m) < -PSD_SLACK * max(1.0, trace_norm(m)):
            raise ValueError("density operator must be PSD")
        tr = float(np.trace(m).real)
        if normalize:
            m = m / tr
        elif abs(tr - 1.0) > TOL_EFFECT:
            raise ValueError(f"density operator has trace {tr}, expected 1")
        return State(self, m)

    def operation(self, kraus, label: str = "") -> Transformation:
        op = kraus if isinstance(kraus, KrausOp) else KrausOp(kraus)
        if op.dim_in != self.d or op.dim_out != self.d:
            raise ValueError(f"operation must act on dimension {self.d}")
        return Transformation(self, op, label)

    def action_from_instrument(self, inst: Instrument, label: str = "outcome") -> Action:
        return Action(
            [Transformation(self, op, f"{label}{j}") for j, op in enumerate(inst.outcomes)]
        )

    # -- interface ----------------------------------------------------------
    def identity(self) -> Transformation:
        return Transformation(self, KrausOp([np.eye(self.d)], check=False), "identity")

    def unit_effect(self) -> Effect:
        return Effect(self, np.eye(self.d))

    def effect_of(self, t: Transformation) -> Effect:
        return Effect(self, t.payload.trace_operator())

    def apply(self, t: Transformation, s: State) -> State:
        return State(self, apply_quantum_op(t.payload, s.payload))

    def evaluate(self, e: Effect, s: State) -> float:
        return float(np.trace(e.payload @ s.payload).real)

    def compose(self, first: Transformation, then: Transformation) -> Transformation:
        kraus = [n @ m for n in then.payload.kraus for m in first.payload.kraus]
        return Transformation(self, KrausOp(kraus, check=False), "")

    def add_transformations(self, t1: Transformation, t2: Transformation) -> Transformation:
        return Transformation(
            self, KrausOp(t1.payload.kraus + t2.payload.kraus, check=False), ""
        )

    def scale_transformation(self, lam: float, t: Transformation) -> Transformation:
        root = np.sqrt(lam)
        return Transformation(
            self, KrausOp([root * k for k in t.payload.kraus], check=False), ""
        )

    def complement(self, t: Transformation) -> Transformation:
        k = t.payload.trace_operator()
        return Transformation(
            self, KrausOp([psd_sqrt(np.eye(self.d) - k)], check=False), f"~{t.label}"
        )

    def add_effects(self, e1: Effect, e2: Effect) -> Effect:
        return Effect(self, e1.payload + e2.payload)

    def effect_leq_unit(self, e: Effect, tol: float = TOL_EFFECT) -> bool:
        k = require_hermitian(e.payload)
        return min_eig_herm(k) >= -tol and max_eig_herm(k) <= 1.0 + tol

    def effect_coords(self, e: Effect) -> np.ndarray:
        return hermitian_coords(e.payload)

    def state_coords(self, s: State) -> np.ndarray:
        return hermitian_coords(s.payload)

    def scale_state_payload(self, payload, factor: float):
        return factor * payload

    def mix_states(self, s1: State, s2: State, w1: float, w2: float) -> State:
        return State(self, w1 * s1.payload + w2 * s2.payload)

    def state_distance(self, s1: State, s2: State) -> float:
        return trace_norm(s1.payload - s2.payload)

    def transformation_distance(self, t1: Transformation, t2: Transformation) -> float:
        return float(np.abs(_superoperator(t1.payload) - _superoperator(t2.payload)).max())

    def random_state(self, rng: np.random.Generator) -> State:
        return State(self, ginibre_state(rng, self.d))

    def random_pure_state(self, rng: np.random.Generator) -> State:
        return State(self, random_pure_state(rng, self.d))

    def random_transformation(self, rng: np.random.Generator) -> Transformation:
        blocks = haar_isometry_blocks(rng, self.d, 3)
        keep = int(rng.integers(1, 3))
        lam = rng.uniform(0.3, 1.0)
        kraus = [np.sqrt(lam) * b for b in blocks[:keep]]
        return Transformation(self, KrausOp(kraus, check=False), "random")

    def random_instrument(self, rng: np.random.Generator, outcomes: int) -> Instrument:
        blocks = haar_isometry_blocks(rng, self.d, outcomes)
        return Instrument([KrausOp([b], check=False) for b in blocks], check=False)

    def random_action(self, rng: np.random.Generator, outcomes: int) -> Action:
        return self.action_from_instrument(self.random_instrument(rng, outcomes))

    def minimal_ic_effects(self) -> list[Effect]:
        return [Effect(self, k) for k in minimal_ic_povm(self.d)]


def _superoperator(m: KrausOp) -> np.ndarray:
    # Row-major vec: vec(A rho A^dag) = (A (x) conj(A)) vec(rho).
    return sum(np.kron(k, k.conj()) for k in m.kraus)


@dataclass(frozen=True, eq=True)
class QuantumBipartite(BipartiteModel):
    """Tensor-product composition of two quantum systems."""

    d1: int
    d2: int

    def __post_init__(self):
        object.__setattr__(self, "left", QuantumModel(self.d1))
        object.__setattr__(self, "right", QuantumModel(self.d2))
        object.__setattr__(self, "joint", QuantumModel(self.d1 * self.d2))

    def embed_left(self, t: Transformation) -> Transformation:
        if t.model != self.left:
            raise ModelMismatch("transformation is not bound to the left component")
        return Transformation(self.joint, local_embed(t.payload, self.d2, side=1), t.label)

    def embed_right(self, t: Transformation) -> Transformation:
        if t.model != self.right:
            raise ModelMismatch("transformation is not bound to the right component")
        return Transformation(self.joint, local_embed(t.payload, self.d1, side=2), t.label)

    def product_effect(self, e_left: Effect, e_right: Effect) -> Effect:
        return Effect(self.joint, np.kron(e_left.payload, e_right.payload))

    def joint_state(self, matrix, normalize: bool = False) -> State:
        return self.joint.state(matrix, normalize=normalize)


# ---------------------------------------------------------------------------
# Built-in fixtures: singlet, Pauli instruments, IC POVMs
# ---------------------------------------------------------------------------

def singlet_state() -> np.ndarray:
    """Density matrix of (|01> - |10>)/sqrt(2)."""
    v = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2)
    return np.outer(v, v.conj())

def bloch_projectors(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto the +/- eigenstates of cos(theta) Z + sin(theta) X."""
    n = np.cos(theta) * PAULI_Z + np.sin(theta) * PAULI_X
    eye = np.eye(2)
    return (eye + n) / 2, (eye - n) / 2


def projective_instrument(theta: float) -> Instrument:
    p_plus, p_minus = bloch_projectors(theta)
    return Instrument([KrausOp([p_plus], check=False), KrausOp([p_minus], check=False)])


def z_instrument() -> Instrument:
    return projective_instrument(0.0)


def x_instrument() -> Instrument:
    return projective_instrument(np.pi / 2)


@lru_cache(maxsize=8)
def minimal_ic_povm(d: int) -> tuple[np.ndarray, ...]:
    """d^2 linearly independent effects summing to I, validated by rank.

    d=2 uses the tetrahedral construction (I + s_i . sigma)/4; d=3 the
    fiducial orbit of (0, 1, -1)/sqrt(2) under the discrete displacement
    group; other dimensions use a deterministic whitened random POVM.
    Construction is always certified: rank must equal d^2.
    """
    if d == 2:
        s = 1.0 / np.sqrt(3)
        dirs = [(s, s, s), (s, -s, -s), (-s, s, -s), (-s, -s, s)]
        effects = [
            (np.eye(2) + x * PAULI_X + y * PAULI_Y + z * PAULI_Z) / 4 for x, y, z in dirs
        ]
    elif d == 3:
        shift = np.zeros((3, 3), dtype=complex)
        for j in range(3):
            shift[(j + 1) % 3, j] = 1.0
        clock = np.diag(np.exp(2j * np.pi * np.arange(3) / 3))
        fiducial = np.array([0.0, 1.0, -1.0], dtype=complex) / np.sqrt(2)
        effects = []
        for a in range(3):
            for b in range(3):
                v = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) @ fiducial
                effects.append(np.outer(v, v.conj()) / 3)
    else:
        rng = trial_rng(0xD1CE, d)
        raw = [ginibre_positive(rng, d) for _ in range(d * d)]
        total = sum(raw)
        w, v = np.linalg.eigh(total)
        whiten = (v / np.sqrt(w)) @ v.conj().T
        effects = [whiten @ r @ whiten for r in raw]
    total = sum(effects)
    if np.abs(total - np.eye(d)).max() > 1e-9:
        raise RuntimeError(f"IC POVM construction failed completeness at d={d}")
    if span_rank(effects) != d * d:
        raise RuntimeError(f"IC POVM construction is rank-deficient at d={d}")
    out = tuple(e.copy() for e in effects)
    for e in out:
        e.flags.writeable = False
    return out
