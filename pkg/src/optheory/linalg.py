"""Dense complex/Hermitian linear-algebra kernel shared by all theory models.

Everything here operates on plain ``numpy`` arrays: Kronecker and
direct-sum composition, partial traces, symmetric eigenanalysis, PSD
testing, and real-span ranks of Hermitian operator families.  All
functions are pure and never mutate their inputs.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# Absolute tolerance on max|A - A^dag| below which a matrix counts as Hermitian.
TOL_HERM = 1e-9
# An operator counts as PSD when min eig >= -PSD_SLACK * max(1, trace norm).
PSD_SLACK = 1e-10
# Singular values below RANK_TOL * sigma_max do not contribute to span ranks.
RANK_TOL = 1e-7


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Coerce to a finite 2-D complex array, copying lazily."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermiticity_defect(a) -> float:
    """max|A - A^dag|, the absolute deviation from Hermiticity."""
    m = as_matrix(a, square=True)
    return float(np.abs(m - m.conj().T).max())


def require_hermitian(a, tol: float = TOL_HERM) -> np.ndarray:
    """Validate Hermiticity within ``tol`` and return the symmetrized matrix."""
    m = as_matrix(a, square=True)
    defect = float(np.abs(m - m.conj().T).max())
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e} > {tol:.3e}")
    return (m + m.conj().T) / 2


def tensor(a, b) -> np.ndarray:
    """Kronecker product; composite index ordering is (i*cols_b + k)."""
    return np.kron(as_matrix(a), as_matrix(b))


def direct_sum(a, b) -> np.ndarray:
    """Block-diagonal sum of two square matrices."""
    ma = as_matrix(a, square=True)
    mb = as_matrix(b, square=True)
    da, db = ma.shape[0], mb.shape[0]
    out = np.zeros((da + db, da + db), dtype=complex)
    out[:da, :da] = ma
    out[da:, da:] = mb
    return out


def partial_trace(r, d1: int, d2: int, side: int) -> np.ndarray:
    """Trace out factor ``side`` (1 or 2) of an operator on a d1*d2 space.

    The result lives on the remaining factor and has the same trace as the
    input.  The input need not be Hermitian; for Hermitian input the output
    is Hermitian up to roundoff.
    """
    m = as_matrix(r, square=True)
    if d1 <= 0 or d2 <= 0 or m.shape[0] != d1 * d2:
        raise ValueError(f"dimension mismatch: matrix is {m.shape[0]}-dim, expected {d1}*{d2}")
    t = m.reshape(d1, d2, d1, d2)
    if side == 1:
        return np.einsum("ikil->kl", t)
    if side == 2:
        return np.einsum("ikjk->ij", t)
    raise ValueError(f"side must be 1 or 2, got {side!r}")


def eigvals_herm(a, tol: float = TOL_HERM) -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix."""
    return np.linalg.eigvalsh(require_hermitian(a, tol))


def min_eig_herm(a, tol: float = TOL_HERM) -> float:
    """Smallest eigenvalue of a Hermitian matrix (validated within ``tol``)."""
    return float(eigvals_herm(a, tol)[0])


def max_eig_herm(a, tol: float = TOL_HERM) -> float:
    return float(eigvals_herm(a, tol)[-1])


def trace_norm(a) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(as_matrix(a), compute_uv=False).sum())


def is_psd(a, slack: float = PSD_SLACK) -> bool:
    """PSD test with the slack scaled by max(1, trace norm)."""
    m = require_hermitian(a)
    return min_eig_herm(m) >= -slack * max(1.0, trace_norm(m))


def psd_sqrt(a) -> np.ndarray:
    """Hermitian square root, clipping slightly negative eigenvalues to zero."""
    m = require_hermitian(a)
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


@lru_cache(maxsize=32)
def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal real basis of d x d Hermitian matrices, shape (d^2, d, d).

    Ordering is fixed for bit-for-bit reproducibility of span ranks: the d
    diagonal units E_ii first, then (E_ij + E_ji)/sqrt(2) for i < j row-major,
    then i(E_ij - E_ji)/sqrt(2) in the same order.
    """
    if d <= 0:
        raise ValueError("dimension must be positive")
    mats = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        mats.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            e[j, i] = 1.0
            mats.append(e / np.sqrt(2))
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0j
            e[j, i] = -1.0j
            mats.append(e / np.sqrt(2))
    out = np.stack(mats, axis=0)
    out.flags.writeable = False
    return out


def hermitian_coords(a) -> np.ndarray:
    """Real coordinate vector of a Hermitian matrix in ``hermitian_basis``.

    Computed entrywise (diagonal, then sqrt(2) times the real and imaginary
    upper-triangle parts) rather than by pairing against the dense basis;
    the orderings coincide.
    """
    m = require_hermitian(a)
    d = m.shape[0]
    rows, cols = np.triu_indices(d, k=1)
    upper = m[rows, cols]
    return np.concatenate(
        [m.diagonal().real, np.sqrt(2) * upper.real, np.sqrt(2) * upper.imag]
    )


def hermitian_from_coords(v, d: int) -> np.ndarray:
    vec = np.asarray(v, dtype=float)
    if vec.shape != (d * d,):
        raise ValueError(f"expected {d * d} coordinates, got shape {vec.shape}")
    return np.einsum("k,kij->ij", vec, hermitian_basis(d))


def rank_of_rows(rows, tol: float = RANK_TOL) -> int:
    """Number of singular values of a stacked row family above ``tol * sigma_max``."""
    m = np.atleast_2d(np.asarray(rows, dtype=float))
    svals = np.linalg.svd(m, compute_uv=False)
    smax = svals.max(initial=0.0)
    if smax == 0.0:
        return 0
    return int(np.sum(svals > tol * smax))


def span_rank(ops, tol: float = RANK_TOL) -> int:
    """Rank of a family of Hermitian operators under real-linear combinations.

    Each operator is vectorized in the fixed orthonormal Hermitian basis; the
    rank is the number of singular values above ``tol * sigma_max``.
    """
    ops = list(ops)
    if not ops:
        raise ValueError("span_rank of an empty operator list is undefined")
    dims = {as_matrix(o, square=True).shape[0] for o in ops}
    if len(dims) != 1:
        raise ValueError(f"operators have mixed dimensions: {sorted(dims)}")
    return rank_of_rows([hermitian_coords(o) for o in ops], tol)


def matrix_to_json(a) -> dict:
    """Serialize to {"rows", "cols", "re", "im"} with row-major entry lists."""
    m = as_matrix(a)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.ravel()],
        "im": [float(x) for x in m.imag.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = np.asarray(obj["re"], dtype=float).reshape(rows, cols)
    im = np.asarray(obj["im"], dtype=float).reshape(rows, cols)
    return as_matrix(re + 1j * im)
