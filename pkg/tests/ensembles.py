"""Seeded random instances shared by the test modules."""
from __future__ import annotations

import numpy as np

from effham.cli import LAMBDA_DEFAULTS, three_level_matrix
from effham.partition import PartitionedHamiltonian, partition_hamiltonian


def lambda_partition() -> PartitionedHamiltonian:
    """Default three-level Raman instance: two ground states, one excited."""
    matrix = three_level_matrix(**LAMBDA_DEFAULTS)
    return partition_hamiltonian(matrix, (0, 1))


def random_hermitian(rng: np.random.Generator, n: int,
                     scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = 0.5 * (a + a.conj().T)
    norm = np.linalg.norm(h, 2)
    if norm == 0.0:
        return h
    return scale * h / norm


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def gapped_fast_block(rng: np.random.Generator, q: int,
                      gap: float = 1.0) -> np.ndarray:
    """Random hermitian block with every eigenvalue at least ``gap`` away
    from zero (mixed signs), so its inverse has norm at most ``1/gap``."""
    u = random_unitary(rng, q)
    signs = rng.choice([-1.0, 1.0], size=q)
    magnitudes = gap * (1.0 + rng.uniform(0.0, 1.0, size=q))
    block = (u * (signs * magnitudes)) @ u.conj().T
    return 0.5 * (block + block.conj().T)


def make_partition(rng: np.random.Generator, p: int, q: int, eps: float,
                   eps_prime: float, gap: float = 1.0) -> PartitionedHamiltonian:
    """Random partition with the requested coupling scales, exactly.

    The slow block and coupling are rescaled so that
    ``||fast^-1|| * ||slow|| == eps`` and ``||fast^-1|| * ||coupling|| ==
    eps_prime`` up to rounding.
    """
    fast = gapped_fast_block(rng, q, gap)
    inv_norm = 1.0 / np.min(np.abs(np.linalg.eigvalsh(fast)))
    slow = random_hermitian(rng, p, scale=eps / inv_norm)
    coupling = rng.standard_normal((q, p)) + 1j * rng.standard_normal((q, p))
    cnorm = np.linalg.norm(coupling, 2)
    coupling = coupling * (eps_prime / (inv_norm * cnorm))
    return PartitionedHamiltonian(
        slow_block=slow, fast_block=fast, coupling=coupling,
        slow_indices=tuple(range(p)), fast_indices=tuple(range(p, p + q)))


def scaling_instance() -> PartitionedHamiltonian:
    """Frozen random 3+3 instance used for inverse-gap scaling tests."""
    rng = np.random.default_rng(7)
    slow = random_hermitian(rng, 3, scale=0.5)
    fast = gapped_fast_block(rng, 3, gap=4.0)
    coupling = 0.5 * (rng.standard_normal((3, 3))
                      + 1j * rng.standard_normal((3, 3)))
    return PartitionedHamiltonian(
        slow_block=slow, fast_block=fast, coupling=coupling,
        slow_indices=(0, 1, 2), fast_indices=(3, 4, 5))


def scale_fast(ph: PartitionedHamiltonian, s: float) -> PartitionedHamiltonian:
    """Same instance with the fast block multiplied by ``s``."""
    return PartitionedHamiltonian(
        slow_block=ph.slow_block, fast_block=s * ph.fast_block,
        coupling=ph.coupling, slow_indices=ph.slow_indices,
        fast_indices=ph.fast_indices)
