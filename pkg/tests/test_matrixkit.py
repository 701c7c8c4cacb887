"""Linear-algebra kernel contracts: norms, decompositions, guards."""
from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

from effham import matrixkit as mk
from effham.errors import (
    DefectiveMatrix,
    NotHermitian,
    NotPositiveDefinite,
    ShapeMismatch,
    SingularMatrix,
    SpectraOverlap,
)
from ensembles import random_hermitian


def test_norms_known_values():
    a = np.array([[3.0, 0.0], [0.0, 4.0]])
    assert mk.spectral_norm(a) == pytest.approx(4.0)
    assert mk.frobenius_norm(a) == pytest.approx(5.0)
    assert mk.operator_norm(a, "spectral") == pytest.approx(4.0)
    assert mk.operator_norm(a, "frobenius") == pytest.approx(5.0)


def test_operator_norm_rejects_unknown_kind():
    with pytest.raises(ValueError):
        mk.operator_norm(np.eye(2), "nuclear")


def test_as_matrix_validation():
    with pytest.raises(ShapeMismatch):
        mk.as_matrix(np.ones(3))
    with pytest.raises(ValueError):
        mk.as_matrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        mk.as_matrix(np.array([[1.0, np.inf * 1j], [0.0, 1.0]]))


def test_require_hermitian_reports_deviation():
    good = np.array([[1.0, 2.0 - 1j], [2.0 + 1j, -1.0]])
    mk.require_hermitian(good)
    bad = np.array([[1.0, 0.1], [0.0, 1.0]])
    with pytest.raises(NotHermitian) as info:
        mk.require_hermitian(bad)
    assert info.value.deviation == pytest.approx(0.1)


def test_hermitian_eig_sorted_and_reconstructs():
    a = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    ed = mk.hermitian_eig(a)
    assert ed.hermitian
    assert np.allclose(ed.values, [-1.0, 1.0])
    rebuilt = (ed.vectors * ed.values) @ ed.vectors.conj().T
    assert np.linalg.norm(rebuilt - a) < 1e-14


def test_hermitian_eig_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        mk.hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_general_eig_sorted_by_real_part():
    a = np.array([[2.0, 5.0], [0.0, 1.0]], dtype=complex)
    ed = mk.general_eig(a)
    assert not ed.hermitian
    assert np.allclose(ed.values, [1.0, 2.0])


def test_general_eig_rejects_defective():
    jordan = np.array([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(DefectiveMatrix):
        mk.general_eig(jordan)


def test_inverse_and_solve_agree():
    a = np.array([[2.0, 1.0], [1j, 3.0]], dtype=complex)
    b = np.array([[1.0], [2.0]], dtype=complex)
    inv = mk.inverse(a)
    assert np.linalg.norm(inv @ a - np.eye(2)) < 1e-14
    assert np.linalg.norm(mk.solve(a, b) - inv @ b) < 1e-14


def test_singular_matrix_guard():
    rank1 = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrix) as info:
        mk.inverse(rank1)
    assert info.value.condition > 1e12
    with pytest.raises(SingularMatrix):
        mk.solve(rank1, np.ones(2))


def test_solve_shape_guard():
    with pytest.raises(ShapeMismatch):
        mk.solve(np.eye(2), np.ones(3))


def test_posdef_roots():
    rng = np.random.default_rng(3)
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    a = b @ b.conj().T + 0.5 * np.eye(3)
    root = mk.sqrt_posdef(a)
    inv_root = mk.inv_sqrt_posdef(a)
    assert np.linalg.norm(root @ root - a) < 1e-12
    assert np.linalg.norm(root @ inv_root - np.eye(3)) < 1e-12
    assert np.linalg.norm(root - root.conj().T) < 1e-14


def test_posdef_roots_reject_indefinite():
    indefinite = np.diag([1.0, -0.5])
    with pytest.raises(NotPositiveDefinite):
        mk.sqrt_posdef(indefinite)
    with pytest.raises(NotPositiveDefinite):
        mk.inv_sqrt_posdef(indefinite)


def test_sylvester_solves_the_equation():
    rng = np.random.default_rng(11)
    slow = random_hermitian(rng, 2, scale=0.3)
    fast = random_hermitian(rng, 3) + 4.0 * np.eye(3)
    rhs = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    x = mk.sylvester_solve(slow, fast, rhs)
    assert np.linalg.norm(x @ slow - fast @ x - rhs) < 1e-12


def test_sylvester_rejects_overlapping_spectra():
    slow = np.array([[1.0]])
    fast = np.diag([1.0 + 1e-12, 5.0])
    with pytest.raises(SpectraOverlap) as info:
        mk.sylvester_solve(slow, fast, np.ones((2, 1)))
    assert info.value.gap < 1e-9


def test_sylvester_shape_guard():
    with pytest.raises(ShapeMismatch):
        mk.sylvester_solve(np.eye(2), 4.0 * np.eye(3), np.ones((2, 3)))


def test_expm_hermitian_branch():
    a = np.diag([0.5, -1.0]).astype(complex)
    assert np.allclose(mk.expm(a), np.diag(np.exp([0.5, -1.0])))


def test_expm_antihermitian_is_unitary():
    rng = np.random.default_rng(5)
    h = random_hermitian(rng, 4, scale=30.0)
    u = mk.expm(-1j * h)
    assert np.linalg.norm(u.conj().T @ u - np.eye(4)) < 1e-12
    # agrees with the eigenphase construction
    vals, vecs = np.linalg.eigh(h)
    direct = (vecs * np.exp(-1j * vals)) @ vecs.conj().T
    assert np.linalg.norm(u - direct) < 1e-12


def test_expm_general_matches_scipy():
    a = np.array([[0.2, 1.0], [0.0, -0.3]], dtype=complex)
    assert np.linalg.norm(mk.expm(a) - scipy.linalg.expm(a)) < 1e-13


def test_pair_eigenvalues_handles_permutations():
    ref = np.array([0.0, 1.0, 5.0])
    cand = np.array([5.0 + 1e-4, 0.0 - 2e-4, 1.0])
    worst, pairs = mk.pair_eigenvalues(cand, ref)
    assert worst == pytest.approx(2e-4)
    assert sorted(pairs) == [(0, 2), (1, 0), (2, 1)]


def test_pair_eigenvalues_shape_guard():
    with pytest.raises(ShapeMismatch):
        mk.pair_eigenvalues(np.ones(2), np.ones(3))


def test_random_hermitian_roundtrip_property():
    rng = np.random.default_rng(17)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        h = random_hermitian(rng, n, scale=float(rng.uniform(0.1, 5.0)))
        ed = mk.hermitian_eig(h)
        rebuilt = (ed.vectors * ed.values) @ ed.vectors.conj().T
        assert np.linalg.norm(rebuilt - h) < 1e-12 * max(1.0, np.linalg.norm(h))
        assert np.all(np.diff(ed.values) >= 0.0)
        u = mk.expm(-1j * h)
        assert np.linalg.norm(u.conj().T @ u - np.eye(n)) < 1e-12
