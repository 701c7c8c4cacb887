"""Dense linear-algebra kernels with validated contracts.

The heavy lifting is delegated to LAPACK through numpy and scipy; this module
adds the input validation, the failure taxonomy, and the convention fixes
(sorted spectra, enforced unitarity, gap-guarded Sylvester solves) that the
rest of the package relies on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    DefectiveMatrix,
    NotHermitian,
    NotPositiveDefinite,
    ShapeMismatch,
    SingularMatrix,
    SpectraOverlap,
)

__all__ = [
    "EigenDecomposition",
    "as_matrix",
    "spectral_norm",
    "frobenius_norm",
    "operator_norm",
    "hermiticity_deviation",
    "require_hermitian",
    "hermitian_eig",
    "general_eig",
    "inverse",
    "solve",
    "inv_sqrt_posdef",
    "sqrt_posdef",
    "sylvester_solve",
    "expm",
    "pair_eigenvalues",
]


def as_matrix(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite, 2-D, complex array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _require_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value; 0.0 for an empty matrix."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def operator_norm(a: np.ndarray, kind: str = "spectral") -> float:
    """Matrix norm of the requested ``kind`` ("spectral" or "frobenius")."""
    if kind == "spectral":
        return spectral_norm(a)
    if kind == "frobenius":
        return frobenius_norm(a)
    raise ValueError(f"unknown norm kind {kind!r}")


def hermiticity_deviation(a: np.ndarray) -> float:
    """Spectral norm of the anti-hermitian part residual ``a - a^dagger``."""
    a = np.asarray(a, dtype=complex)
    return spectral_norm(a - a.conj().T)


def require_hermitian(a: np.ndarray, tol: float = 1e-10,
                      name: str = "matrix") -> np.ndarray:
    """Raise :class:`NotHermitian` unless ``a`` is hermitian within ``tol``.

    The deviation ``||a - a^dagger||`` is compared against
    ``tol * max(1, ||a||)`` so that the check is absolute for small matrices
    and relative for large ones.
    """
    dev = hermiticity_deviation(a)
    scale = max(1.0, spectral_norm(a))
    if dev > tol * scale:
        raise NotHermitian(
            f"{name} is not hermitian: deviation {dev:.3e} exceeds "
            f"{tol:.1e} * {scale:.3e}", deviation=dev)
    return a


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues and eigenvectors, column ``i`` belonging to ``values[i]``.

    For hermitian input the values are real and ascending and the vectors
    are orthonormal; otherwise the values are sorted by real part (ties by
    imaginary part) and the vectors are normalized but not orthogonal.
    """

    values: np.ndarray
    vectors: np.ndarray
    hermitian: bool


def hermitian_eig(a: np.ndarray, *, herm_tol: float = 1e-10) -> EigenDecomposition:
    """Eigendecomposition of a hermitian matrix, values ascending."""
    a = _require_square(as_matrix(a))
    require_hermitian(a, tol=herm_tol)
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare in LAPACK
        raise ConvergenceFailure(f"hermitian eigensolver failed: {exc}") from exc
    return EigenDecomposition(values=values, vectors=vectors, hermitian=True)


def general_eig(a: np.ndarray, *, cond_limit: float = 1e12) -> EigenDecomposition:
    """Eigendecomposition of a general matrix.

    Raises :class:`DefectiveMatrix` when the eigenvector matrix is too
    ill-conditioned to define a meaningful spectral decomposition.
    """
    a = _require_square(as_matrix(a))
    try:
        values, vectors = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceFailure(f"general eigensolver failed: {exc}") from exc
    sv = np.linalg.svd(vectors, compute_uv=False)
    if sv[-1] == 0.0 or sv[0] / sv[-1] > cond_limit:
        cond = np.inf if sv[-1] == 0.0 else float(sv[0] / sv[-1])
        raise DefectiveMatrix(
            f"eigenbasis condition number {cond:.3e} exceeds {cond_limit:.1e}")
    order = np.lexsort((values.imag, values.real))
    return EigenDecomposition(values=values[order], vectors=vectors[:, order],
                              hermitian=False)


def _check_invertible(a: np.ndarray, rcond_limit: float, name: str) -> None:
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] < rcond_limit:
        cond = np.inf if sv[-1] == 0.0 else float(sv[0] / sv[-1])
        raise SingularMatrix(
            f"{name} is singular to working precision "
            f"(condition {cond:.3e}, rcond limit {rcond_limit:.1e})",
            condition=cond)


def inverse(a: np.ndarray, *, rcond_limit: float = 1e-12) -> np.ndarray:
    """Matrix inverse, gated on the reciprocal condition number."""
    a = _require_square(as_matrix(a))
    _check_invertible(a, rcond_limit, "matrix")
    return np.linalg.inv(a)


def solve(a: np.ndarray, b: np.ndarray, *, rcond_limit: float = 1e-12) -> np.ndarray:
    """Solve ``a @ x = b`` with the same singularity gate as :func:`inverse`."""
    a = _require_square(as_matrix(a))
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != a.shape[0]:
        raise ShapeMismatch(
            f"right-hand side has {b.shape[0]} rows, expected {a.shape[0]}")
    _check_invertible(a, rcond_limit, "matrix")
    return np.linalg.solve(a, b)


def sqrt_posdef(a: np.ndarray, *, herm_tol: float = 1e-10) -> np.ndarray:
    """Hermitian square root of a positive definite matrix."""
    ed = hermitian_eig(a, herm_tol=herm_tol)
    if ed.values[0] <= 0.0:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {ed.values[0]:.3e} is not positive")
    root = (ed.vectors * np.sqrt(ed.values)) @ ed.vectors.conj().T
    return 0.5 * (root + root.conj().T)


def inv_sqrt_posdef(a: np.ndarray, *, herm_tol: float = 1e-10) -> np.ndarray:
    """Hermitian inverse square root of a positive definite matrix."""
    ed = hermitian_eig(a, herm_tol=herm_tol)
    if ed.values[0] <= 0.0:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {ed.values[0]:.3e} is not positive")
    root = (ed.vectors / np.sqrt(ed.values)) @ ed.vectors.conj().T
    return 0.5 * (root + root.conj().T)


def sylvester_solve(slow_op: np.ndarray, fast_op: np.ndarray, rhs: np.ndarray,
                    *, gap_tol: float = 1e-9, herm_tol: float = 1e-10) -> np.ndarray:
    """Solve ``x @ slow_op - fast_op @ x = rhs`` for hermitian operators.

    Both operators are diagonalized and the equation is divided through by
    the eigenvalue differences, so the solution exists and is unique exactly
    when the two spectra are disjoint.  :class:`SpectraOverlap` is raised
    when any eigenvalue pair comes closer than ``gap_tol``.
    """
    slow = hermitian_eig(slow_op, herm_tol=herm_tol)
    fast = hermitian_eig(fast_op, herm_tol=herm_tol)
    rhs = as_matrix(rhs, "right-hand side")
    if rhs.shape != (fast_op.shape[0], slow_op.shape[0]):
        raise ShapeMismatch(
            f"right-hand side shape {rhs.shape} does not match "
            f"({fast_op.shape[0]}, {slow_op.shape[0]})")
    denom = slow.values[None, :] - fast.values[:, None]
    gap = float(np.min(np.abs(denom))) if denom.size else np.inf
    if gap < gap_tol:
        raise SpectraOverlap(
            f"slow and fast spectra are separated by only {gap:.3e} "
            f"(required {gap_tol:.1e})", gap=gap)
    mixed = fast.vectors.conj().T @ rhs @ slow.vectors
    return fast.vectors @ (mixed / denom) @ slow.vectors.conj().T


def expm(a: np.ndarray, *, herm_tol: float = 1e-10,
         unitary_tol: float = 1e-11) -> np.ndarray:
    """Matrix exponential with spectrally exact (anti)hermitian branches.

    Hermitian and anti-hermitian inputs are exponentiated through an
    eigendecomposition, which keeps the result exactly hermitian positive
    definite or unitary up to rounding; anti-hermitian results are checked
    for unitarity.  Everything else falls back to the scaling-and-squaring
    exponential.
    """
    a = _require_square(as_matrix(a))
    n = a.shape[0]
    scale = max(1.0, spectral_norm(a))
    if spectral_norm(a - a.conj().T) <= herm_tol * scale:
        ed = hermitian_eig(a, herm_tol=np.inf)
        return (ed.vectors * np.exp(ed.values)) @ ed.vectors.conj().T
    if spectral_norm(a + a.conj().T) <= herm_tol * scale:
        # a = i*h with h hermitian, so exp(a) is unitary.
        h = -1j * a
        h = 0.5 * (h + h.conj().T)
        ed = hermitian_eig(h, herm_tol=np.inf)
        u = (ed.vectors * np.exp(1j * ed.values)) @ ed.vectors.conj().T
        defect = spectral_norm(u.conj().T @ u - np.eye(n))
        if defect > unitary_tol:
            raise ConvergenceFailure(
                f"exponential of anti-hermitian input lost unitarity "
                f"({defect:.3e} > {unitary_tol:.1e})")
        return u
    out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise ConvergenceFailure("matrix exponential overflowed")
    return out


def pair_eigenvalues(candidates: np.ndarray,
                     reference: np.ndarray) -> tuple[float, list[tuple[int, int]]]:
    """Greedy one-to-one pairing of two equally long eigenvalue lists.

    Repeatedly matches the globally closest unmatched pair and returns the
    largest paired distance together with the index pairs
    ``(candidate_index, reference_index)``.
    """
    cand = np.asarray(candidates, dtype=complex).ravel()
    ref = np.asarray(reference, dtype=complex).ravel()
    if cand.shape != ref.shape:
        raise ShapeMismatch(
            f"cannot pair {cand.size} candidates with {ref.size} references")
    dist = np.abs(cand[:, None] - ref[None, :])
    pairs: list[tuple[int, int]] = []
    worst = 0.0
    free_c = list(range(cand.size))
    free_r = list(range(ref.size))
    while free_c:
        sub = dist[np.ix_(free_c, free_r)]
        k = int(np.argmin(sub))
        i, j = divmod(k, len(free_r))
        worst = max(worst, float(sub[i, j]))
        pairs.append((free_c[i], free_r[j]))
        free_c.pop(i)
        free_r.pop(j)
    pairs.sort()
    return worst, pairs
