"""Block partition of a hermitian operator into slow and fast sectors.

A partition splits a hermitian matrix ``H`` into the slow-sector block, the
fast-sector block, and the coupling between them.  All downstream solvers
work in the partitioned ordering (slow components first); the original index
placement is kept so the full operator can be rebuilt exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrixkit
from .errors import EmptyPartition, ShapeMismatch, SingularFastBlock

__all__ = [
    "PartitionedHamiltonian",
    "CouplingScales",
    "partition_hamiltonian",
    "coupling_scales",
    "invariance_radius",
    "spectral_gap",
]


@dataclass(frozen=True)
class PartitionedHamiltonian:
    """Hermitian operator split into slow/fast blocks.

    ``slow_block`` is the p x p restriction to the slow sector,
    ``fast_block`` the q x q restriction to the fast sector, and
    ``coupling`` the q x p block mapping slow components to fast ones.
    Index tuples record where each sector lives in the original matrix.
    """

    slow_block: np.ndarray
    fast_block: np.ndarray
    coupling: np.ndarray
    slow_indices: tuple[int, ...]
    fast_indices: tuple[int, ...]

    @property
    def slow_dim(self) -> int:
        return self.slow_block.shape[0]

    @property
    def fast_dim(self) -> int:
        return self.fast_block.shape[0]

    @property
    def dim(self) -> int:
        return self.slow_dim + self.fast_dim

    @property
    def block_matrix(self) -> np.ndarray:
        """Full operator in partitioned ordering, slow components first."""
        p, q = self.slow_dim, self.fast_dim
        out = np.zeros((p + q, p + q), dtype=complex)
        out[:p, :p] = self.slow_block
        out[p:, p:] = self.fast_block
        out[p:, :p] = self.coupling
        out[:p, p:] = self.coupling.conj().T
        return out

    def reassemble(self) -> np.ndarray:
        """Rebuild the operator with every entry at its original index."""
        n = self.dim
        out = np.zeros((n, n), dtype=complex)
        slow = np.asarray(self.slow_indices)
        fast = np.asarray(self.fast_indices)
        out[np.ix_(slow, slow)] = self.slow_block
        out[np.ix_(fast, fast)] = self.fast_block
        out[np.ix_(fast, slow)] = self.coupling
        out[np.ix_(slow, fast)] = self.coupling.conj().T
        return out


def partition_hamiltonian(matrix: np.ndarray, slow_indices, *,
                          herm_tol: float = 1e-12,
                          rcond_limit: float = 1e-12) -> PartitionedHamiltonian:
    """Partition a hermitian matrix along the given slow indices.

    Parameters
    ----------
    matrix:
        Square hermitian matrix (validated to ``herm_tol``).
    slow_indices:
        Indices of the slow sector; the complement becomes the fast sector.
        Both sectors must be non-empty, and the fast block must be
        invertible to ``rcond_limit`` or :class:`SingularFastBlock` is
        raised, because every elimination formula divides by it.
    """
    h = matrixkit.as_matrix(matrix, "hamiltonian")
    if h.shape[0] != h.shape[1]:
        raise ShapeMismatch(f"hamiltonian must be square, got shape {h.shape}")
    matrixkit.require_hermitian(h, tol=herm_tol, name="hamiltonian")
    n = h.shape[0]
    slow = sorted({int(i) for i in slow_indices})
    for i in slow:
        if i < 0 or i >= n:
            raise ShapeMismatch(
                f"slow index {i} outside matrix of dimension {n}")
    fast = [i for i in range(n) if i not in set(slow)]
    if not slow or not fast:
        raise EmptyPartition(
            f"partition must leave both sectors non-empty "
            f"(slow {len(slow)}, fast {len(fast)} of {n})")
    slow_t = tuple(slow)
    fast_t = tuple(fast)
    fast_block = h[np.ix_(fast, fast)]
    sv = np.linalg.svd(fast_block, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] < rcond_limit:
        cond = np.inf if sv[-1] == 0.0 else float(sv[0] / sv[-1])
        raise SingularFastBlock(
            f"fast block is singular to working precision "
            f"(condition {cond:.3e}, rcond limit {rcond_limit:.1e})",
            condition=cond)
    return PartitionedHamiltonian(
        slow_block=h[np.ix_(slow, slow)],
        fast_block=fast_block,
        coupling=h[np.ix_(fast, slow)],
        slow_indices=slow_t,
        fast_indices=fast_t,
    )


@dataclass(frozen=True)
class CouplingScales:
    """Dimensionless strength of the slow block and of the coupling.

    ``epsilon`` is ``||fast_block^-1|| * ||slow_block||`` and
    ``epsilon_prime`` is ``||fast_block^-1|| * ||coupling||``.  When the
    contraction hypothesis ``epsilon < 1`` and
    ``epsilon_prime <= (1 - epsilon)/2`` holds, ``radius`` is the certified
    invariant-ball radius of the fixed-point map and ``radius_small`` its
    reciprocal companion root; both are ``None`` otherwise.
    """

    epsilon: float
    epsilon_prime: float
    radius: float | None
    radius_small: float | None
    spectral_gap: float


def invariance_radius(epsilon: float,
                      epsilon_prime: float) -> tuple[float, float] | None:
    """Invariant-ball radii for given coupling scales, or ``None``.

    Returns ``(radius, radius_small)`` with ``radius >= 1 >= radius_small``
    and ``radius * radius_small == 1``.  A decoupled system
    (``epsilon_prime == 0``) gets an infinite radius.
    """
    if not (0.0 <= epsilon < 1.0):
        return None
    if epsilon_prime < 0.0 or epsilon_prime > 0.5 * (1.0 - epsilon):
        return None
    if epsilon_prime == 0.0:
        return (np.inf, 0.0)
    t = (1.0 - epsilon) / (2.0 * epsilon_prime)
    large = t + np.sqrt(max(t * t - 1.0, 0.0))
    return (float(large), float(1.0 / large))


def coupling_scales(ph: PartitionedHamiltonian, *,
                    norm: str = "spectral") -> CouplingScales:
    """Coupling scales, invariant-ball radii, and slow/fast spectral gap."""
    inv_norm = matrixkit.operator_norm(matrixkit.inverse(ph.fast_block), norm)
    eps = inv_norm * matrixkit.operator_norm(ph.slow_block, norm)
    eps_prime = inv_norm * matrixkit.operator_norm(ph.coupling, norm)
    radii = invariance_radius(eps, eps_prime)
    large, small = radii if radii is not None else (None, None)
    return CouplingScales(
        epsilon=float(eps),
        epsilon_prime=float(eps_prime),
        radius=large,
        radius_small=small,
        spectral_gap=spectral_gap(ph),
    )


def spectral_gap(ph: PartitionedHamiltonian) -> float:
    """Smallest distance between slow-block and fast-block eigenvalues.

    Diagnostic only: a healthy elimination regime keeps this gap large
    compared to the coupling, but no routine enforces that.
    """
    slow = matrixkit.hermitian_eig(ph.slow_block).values
    fast = matrixkit.hermitian_eig(ph.fast_block).values
    return float(np.min(np.abs(slow[:, None] - fast[None, :])))
