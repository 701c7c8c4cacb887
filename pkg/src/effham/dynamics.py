"""Time evolution, populations, smoothing, and secular-shift diagnostics.

Constant generators are evolved exactly (hermitian ones through a single
eigendecomposition, general ones through stepped exponentials); periodic
generators are evolved with the same midpoint-sampled piecewise-constant
scheme as the one-period propagator.  The analysis helpers extract
component populations, remove fast ripple with a moving average, and
estimate the secular time shift between two slowly oscillating signals by
pairing their interior maxima.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrixkit
from .errors import (
    IndexOutOfRange,
    InsufficientPeaks,
    NonUnitaryStep,
    ShapeMismatch,
    WindowTooSmall,
    ZeroVector,
)
from .floquet import FloquetSpec

__all__ = [
    "StateVector",
    "TimeSeries",
    "evolve_constant",
    "evolve_periodic",
    "populations",
    "low_pass",
    "interior_peak_times",
    "secular_shift",
]


def _default_labels(dim: int) -> tuple[str, ...]:
    return tuple(f"c{i}" for i in range(dim))


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes with one label per component."""

    amplitudes: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size == 0:
            raise ZeroVector("state vector has no components")
        if not np.all(np.isfinite(amps)):
            raise ValueError("state vector contains non-finite amplitudes")
        labels = tuple(self.labels) if self.labels else _default_labels(amps.size)
        if len(labels) != amps.size:
            raise ShapeMismatch(
                f"{len(labels)} labels for {amps.size} amplitudes")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class TimeSeries:
    """Sampled evolution: ``amplitudes[i]`` is the state at ``times[i]``."""

    times: np.ndarray
    amplitudes: np.ndarray
    labels: tuple[str, ...]
    generator_kind: str

    @property
    def states(self) -> list[StateVector]:
        return [StateVector(a, self.labels) for a in self.amplitudes]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.amplitudes, axis=1)


def _check_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float).ravel()
    if t.size == 0:
        raise ValueError("no sample times given")
    if not np.all(np.isfinite(t)):
        raise ValueError("sample times contain non-finite values")
    return t


def evolve_constant(matrix: np.ndarray, state: StateVector, times, *,
                    kind: str | None = None,
                    herm_tol: float = 1e-10) -> TimeSeries:
    """Evolve a state under a constant generator ``exp(-i A t)``.

    Hermitian generators are diagonalized once and sampled at arbitrary
    times; general generators are advanced with stepped exponentials, which
    requires non-decreasing times.  Norm is preserved only in the hermitian
    case.
    """
    a = matrixkit.as_matrix(matrix, "generator")
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"generator must be square, got shape {a.shape}")
    if state.dim != a.shape[0]:
        raise ShapeMismatch(
            f"state has {state.dim} components, generator acts on {a.shape[0]}")
    t = _check_times(times)
    hermitian = (matrixkit.hermiticity_deviation(a)
                 <= herm_tol * max(1.0, matrixkit.spectral_norm(a)))
    psi0 = state.amplitudes
    if hermitian:
        ed = matrixkit.hermitian_eig(0.5 * (a + a.conj().T), herm_tol=np.inf)
        coeff = ed.vectors.conj().T @ psi0
        phases = np.exp(-1j * np.outer(t, ed.values))
        amps = phases * coeff[None, :] @ ed.vectors.T
        label = kind or "hermitian_constant"
    else:
        if np.any(np.diff(t) < 0.0):
            raise ValueError(
                "non-hermitian generators require non-decreasing times")
        amps = np.empty((t.size, state.dim), dtype=complex)
        psi = matrixkit.expm(-1j * a * t[0]) @ psi0 if t[0] != 0.0 else psi0.copy()
        amps[0] = psi
        gaps = np.diff(t)
        steppers: dict[float, np.ndarray] = {}
        for i, dt in enumerate(gaps):
            if dt != 0.0:
                u = steppers.get(dt)
                if u is None:
                    u = matrixkit.expm(-1j * a * dt)
                    steppers[dt] = u
                psi = u @ psi
            amps[i + 1] = psi
        label = kind or "nonhermitian_constant"
    return TimeSeries(times=t, amplitudes=amps, labels=state.labels,
                      generator_kind=label)


def _substep_unitaries(spec: FloquetSpec, start: float, stop: float,
                       count: int) -> np.ndarray:
    h = (stop - start) / count
    mids = start + (np.arange(count) + 0.5) * h
    hams = spec.hamiltonian_at(mids)
    vals, vecs = np.linalg.eigh(hams)
    phases = np.exp(-1j * vals * h)
    return (vecs * phases[:, None, :]) @ vecs.conj().swapaxes(1, 2)


def evolve_periodic(spec: FloquetSpec, state: StateVector, times, *,
                    substeps_per_period: int = 256) -> TimeSeries:
    """Evolve a state under a periodic generator from ``t = 0``.

    Uses midpoint-sampled piecewise-constant exponentials with at least
    ``substeps_per_period`` substeps per drive period; sample times must be
    non-negative and non-decreasing.  Raises :class:`NonUnitaryStep` if the
    state norm drifts from its initial value by more than 1e-8.
    """
    if state.dim != spec.dim:
        raise ShapeMismatch(
            f"state has {state.dim} components, drive acts on {spec.dim}")
    if substeps_per_period < 1:
        raise ValueError(
            f"substeps_per_period must be positive, got {substeps_per_period}")
    t = _check_times(times)
    if t[0] < 0.0 or np.any(np.diff(t) < 0.0):
        raise ValueError("sample times must be non-negative and non-decreasing")
    nominal = spec.period / substeps_per_period
    psi = state.amplitudes.copy()
    norm0 = float(np.linalg.norm(psi))
    if norm0 == 0.0:
        raise ZeroVector("cannot evolve a zero state")
    amps = np.empty((t.size, spec.dim), dtype=complex)
    current = 0.0
    for i, target in enumerate(t):
        gap = target - current
        if gap > 0.0:
            count = int(max(1, np.ceil(gap / nominal)))
            for u in _substep_unitaries(spec, current, target, count):
                psi = u @ psi
            current = target
        amps[i] = psi
        drift = abs(float(np.linalg.norm(psi)) / norm0 - 1.0)
        if drift > 1e-8:
            raise NonUnitaryStep(
                f"norm drifted by {drift:.3e} at t = {target:g}")
    return TimeSeries(times=t, amplitudes=amps, labels=state.labels,
                      generator_kind="periodic")


def populations(series: TimeSeries, indices=None) -> np.ndarray:
    """Squared amplitude of each requested component over time."""
    dim = series.amplitudes.shape[1]
    if indices is None:
        idx = list(range(dim))
    else:
        idx = [int(i) for i in indices]
        for i in idx:
            if i < 0 or i >= dim:
                raise IndexOutOfRange(
                    f"component {i} outside state dimension {dim}")
    return np.abs(series.amplitudes[:, idx]) ** 2


def low_pass(values: np.ndarray, dt: float, window: float) -> np.ndarray:
    """Centered moving average over a time window.

    The window is converted to an odd tap count ``2 * round(window / (2 dt))
    + 1``; edges are normalized by the actual number of contributing
    samples.  Columns of a 2-D input are filtered independently.
    """
    if not dt > 0.0:
        raise ValueError(f"sampling step must be positive, got {dt}")
    half = int(round(window / (2.0 * dt)))
    if half < 1:
        raise WindowTooSmall(
            f"window {window:g} spans no full sampling step {dt:g}")
    taps = np.ones(2 * half + 1)
    arr = np.asarray(values, dtype=float)
    squeeze = arr.ndim == 1
    arr = np.atleast_2d(arr.T).T if squeeze else arr
    if arr.ndim != 2:
        raise ShapeMismatch(f"values must be 1-D or 2-D, got shape {arr.shape}")
    counts = np.convolve(np.ones(arr.shape[0]), taps, mode="same")
    out = np.empty_like(arr)
    for j in range(arr.shape[1]):
        out[:, j] = np.convolve(arr[:, j], taps, mode="same") / counts
    return out[:, 0] if squeeze else out


def _require_uniform(times: np.ndarray) -> float:
    gaps = np.diff(times)
    if gaps.size == 0 or gaps[0] <= 0.0:
        raise ValueError("need at least two increasing sample times")
    if np.max(np.abs(gaps - gaps[0])) > 1e-9 * gaps[0]:
        raise ValueError("peak analysis requires a uniform time grid")
    return float(gaps[0])


def interior_peak_times(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Times of strict interior maxima, refined by local quadratic fits."""
    v = np.asarray(values, dtype=float).ravel()
    t = _check_times(times)
    if v.size != t.size:
        raise ShapeMismatch(f"{v.size} values for {t.size} times")
    dt = _require_uniform(t)
    core = np.arange(1, v.size - 1)
    mask = (v[core] > v[core - 1]) & (v[core] > v[core + 1])
    idx = core[mask]
    if idx.size == 0:
        return np.empty(0)
    left, mid, right = v[idx - 1], v[idx], v[idx + 1]
    curvature = left - 2.0 * mid + right
    offset = np.where(curvature != 0.0,
                      0.5 * (left - right) / curvature, 0.0)
    return t[idx] + offset * dt


def secular_shift(reference: np.ndarray, candidate: np.ndarray,
                  times: np.ndarray, *, min_peaks: int = 3) -> float:
    """Mean arrival-time lead of reference maxima over candidate maxima.

    Both signals must show at least ``min_peaks`` interior maxima and the
    same number of them (:class:`InsufficientPeaks` otherwise — unequal
    counts mean the signals are not tracking the same oscillation); maxima
    are paired in order of occurrence.  A positive value means the
    candidate signal peaks early, that is, its oscillation runs fast
    against the reference.
    """
    t = _check_times(times)
    ref_peaks = interior_peak_times(reference, t)
    cand_peaks = interior_peak_times(candidate, t)
    if ref_peaks.size < min_peaks or cand_peaks.size < min_peaks:
        raise InsufficientPeaks(
            f"found {ref_peaks.size} reference and {cand_peaks.size} "
            f"candidate maxima, need {min_peaks} of each")
    if ref_peaks.size != cand_peaks.size:
        raise InsufficientPeaks(
            f"maxima counts differ ({ref_peaks.size} reference vs "
            f"{cand_peaks.size} candidate)")
    return float(np.mean(ref_peaks - cand_peaks))
