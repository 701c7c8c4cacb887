"""Command-line interface: model files in, reports and tables out.

Model files are JSON objects holding exactly one of three kinds: a dense
hermitian matrix with a slow-index list, a three-level preset (two nearly
degenerate ground states coupled to one far-detuned excited state), or a
periodic-drive spec given by Fourier components.  Reports are JSON, time
series and sweeps are CSV; every float is printed with 17 significant
digits so output is reproducible byte for byte and parses back to the
identical double.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bloch import (
    BlochEmbedding,
    adiabatic_embedding,
    iterate_bloch,
    perturbative_bloch,
)
from .dynamics import StateVector, evolve_constant, evolve_periodic, populations
from .effective import (
    adiabatic_hamiltonian,
    hermitian_effective,
    nonhermitian_effective,
    second_order_hamiltonian,
)
from .errors import ToolkitError
from .floquet import (
    FloquetSpec,
    QuasiEnergySet,
    first_order_floquet_hamiltonian,
    fold_quasienergy,
    quasi_energies_diag,
    quasi_energies_effective,
    quasi_energies_monodromy,
)
from .matrixkit import hermitian_eig
from .partition import coupling_scales, partition_hamiltonian
from .schriefferwolff import (
    embedding_from_generator,
    first_order_generator,
    sw_first_order_hamiltonian,
)

__all__ = ["main"]

PARSE_ERROR = 2
NUMERICAL_ERROR = 3


class ModelFormatError(ValueError):
    """Model file is structurally invalid."""


# ---------------------------------------------------------------------------
# deterministic serialization


def format_float(x: float) -> str:
    """Shortest-but-exact decimal: round-trips any finite double.

    Negative zero is normalized to ``0`` so conjugated entries cannot
    introduce a ``-0`` that JSON would read back as an integer.
    """
    x = float(x)
    if np.isnan(x):
        return '"nan"'
    if np.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0.0:
        return "0"
    return format(x, ".17g")


def _json_scalar(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _is_scalar(value) -> bool:
    return value is None or isinstance(
        value, (bool, int, float, str, np.integer, np.floating))


def _flat_size(value) -> int:
    if _is_scalar(value):
        return 1
    if isinstance(value, (list, tuple)):
        return sum(_flat_size(v) for v in value)
    return 10**6


def dumps_json(value, indent: int = 0) -> str:
    """Serialize with stable key order and 17-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if _is_scalar(value):
        return _json_scalar(value)
    if isinstance(value, (list, tuple)):
        items = list(value)
        if not items:
            return "[]"
        if all(_is_scalar(v) or isinstance(v, (list, tuple)) for v in items) \
                and _flat_size(items) <= 8:
            return "[" + ", ".join(dumps_json(v, 0) for v in items) + "]"
        body = ",\n".join(inner + dumps_json(v, indent + 1) for v in items)
        return "[\n" + body + "\n" + pad + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        body = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {dumps_json(v, indent + 1)}"
            for k, v in value.items())
        return "{\n" + body + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m: np.ndarray) -> list:
    arr = np.asarray(m, dtype=complex)
    return [[complex_to_json(z) for z in row] for row in arr]


def vector_to_json(v: np.ndarray) -> list:
    return [float(x) for x in np.asarray(v, dtype=float).ravel()]


def parse_complex_entry(value) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(float(value), 0.0)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                    for x in value)):
        return complex(float(value[0]), float(value[1]))
    raise ModelFormatError(
        f"expected a number or a [re, im] pair, got {value!r}")


def parse_matrix_entry(value, name: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ModelFormatError(f"{name} must be a non-empty list of rows")
    rows = []
    width = None
    for row in value:
        if not isinstance(row, list):
            raise ModelFormatError(f"{name} rows must be lists")
        parsed = [parse_complex_entry(x) for x in row]
        if width is None:
            width = len(parsed)
        elif len(parsed) != width:
            raise ModelFormatError(f"{name} rows have inconsistent lengths")
        rows.append(parsed)
    return np.asarray(rows, dtype=complex)


# ---------------------------------------------------------------------------
# model files


@dataclass
class Model:
    """Parsed model file: exactly one kind is populated."""

    kind: str
    hamiltonian: np.ndarray | None = None
    slow_indices: tuple[int, ...] = ()
    labels: tuple[str, ...] = ()
    params: dict | None = None
    floquet: FloquetSpec | None = None


def three_level_matrix(detuning: float, gap: float, rabi_a: complex,
                       rabi_b: complex) -> np.ndarray:
    """Three-level Hamiltonian: split ground doublet plus excited state.

    Ground states at -detuning/2 and +detuning/2, excited state at
    ``gap``, couplings ``rabi_a`` and ``rabi_b`` entering with the
    conventional factor 1/2.
    """
    return np.array([
        [-0.5 * detuning, 0.0, 0.5 * np.conj(rabi_a)],
        [0.0, 0.5 * detuning, 0.5 * np.conj(rabi_b)],
        [0.5 * rabi_a, 0.5 * rabi_b, gap],
    ], dtype=complex)


LAMBDA_DEFAULTS = {"detuning": -0.0175, "gap": 1.0,
                   "rabi_a": 0.4 + 0.0j, "rabi_b": 0.3 + 0.0j}
DRIVEN_QUBIT_DEFAULTS = {"drive_frequency": 10.0, "coupling": 1.0 + 0.0j,
                         "detuning": 0.0}


def lambda_model_dict(params: dict | None = None) -> dict:
    p = dict(LAMBDA_DEFAULTS)
    if params:
        unknown = set(params) - set(p)
        if unknown:
            raise ModelFormatError(
                f"unknown three-level parameters: {sorted(unknown)}")
        p.update(params)
    return {"lambda_system": {
        "detuning": float(np.real(p["detuning"])),
        "gap": float(np.real(p["gap"])),
        "rabi_a": complex_to_json(p["rabi_a"]),
        "rabi_b": complex_to_json(p["rabi_b"]),
    }}


def driven_qubit_dict(params: dict | None = None) -> dict:
    p = dict(DRIVEN_QUBIT_DEFAULTS)
    if params:
        unknown = set(params) - set(p)
        if unknown:
            raise ModelFormatError(
                f"unknown driven-qubit parameters: {sorted(unknown)}")
        p.update(params)
    g = complex(p["coupling"])
    delta = float(np.real(p["detuning"]))
    comps = {
        "-1": [[0.0, g], [0.0, 0.0]],
        "0": [[0.5 * delta, 0.0], [0.0, -0.5 * delta]],
        "1": [[0.0, 0.0], [np.conj(g), 0.0]],
    }
    return {"floquet": {
        "dim": 2,
        "drive_frequency": float(np.real(p["drive_frequency"])),
        "components": {k: [[complex_to_json(complex(x)) for x in row]
                           for row in m] for k, m in comps.items()},
    }}


def _parse_lambda(payload: dict) -> Model:
    required = {"detuning", "gap", "rabi_a", "rabi_b"}
    if not isinstance(payload, dict) or set(payload) != required:
        raise ModelFormatError(
            f"lambda_system needs exactly the keys {sorted(required)}")
    params = {
        "detuning": parse_complex_entry(payload["detuning"]).real,
        "gap": parse_complex_entry(payload["gap"]).real,
        "rabi_a": parse_complex_entry(payload["rabi_a"]),
        "rabi_b": parse_complex_entry(payload["rabi_b"]),
    }
    h = three_level_matrix(**params)
    return Model(kind="lambda_system", hamiltonian=h, slow_indices=(0, 1),
                 labels=("g_a", "g_b", "e"), params=params)


def _parse_matrix_model(payload: dict) -> Model:
    if not isinstance(payload, dict) or set(payload) != {"hamiltonian",
                                                         "slow_indices"}:
        raise ModelFormatError(
            "matrix model needs exactly the keys hamiltonian and slow_indices")
    h = parse_matrix_entry(payload["hamiltonian"], "hamiltonian")
    idx = payload["slow_indices"]
    if (not isinstance(idx, list) or not idx
            or not all(isinstance(i, int) and not isinstance(i, bool)
                       for i in idx)):
        raise ModelFormatError("slow_indices must be a non-empty integer list")
    labels = tuple(f"c{i}" for i in range(h.shape[0]))
    return Model(kind="matrix", hamiltonian=h,
                 slow_indices=tuple(int(i) for i in idx), labels=labels)


def _parse_floquet(payload: dict) -> Model:
    required = {"dim", "drive_frequency", "components"}
    if not isinstance(payload, dict) or set(payload) != required:
        raise ModelFormatError(
            f"floquet model needs exactly the keys {sorted(required)}")
    dim = payload["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ModelFormatError("floquet dim must be a positive integer")
    freq = parse_complex_entry(payload["drive_frequency"]).real
    comps_in = payload["components"]
    if not isinstance(comps_in, dict) or not comps_in:
        raise ModelFormatError(
            "floquet components must be a non-empty object keyed by harmonic")
    comps: dict[int, np.ndarray] = {}
    for key, val in comps_in.items():
        try:
            k = int(key)
        except (TypeError, ValueError):
            raise ModelFormatError(
                f"harmonic key {key!r} is not an integer") from None
        comps[k] = parse_matrix_entry(val, f"component {key}")
    spec = FloquetSpec(dim=dim, drive_frequency=freq, components=comps)
    return Model(kind="floquet", floquet=spec,
                 labels=tuple(f"c{i}" for i in range(dim)))


def model_from_dict(data) -> Model:
    if not isinstance(data, dict):
        raise ModelFormatError("model file must hold a JSON object")
    present = [k for k in ("matrix", "lambda_system", "floquet") if k in data]
    if len(present) != 1:
        raise ModelFormatError(
            f"model must contain exactly one of matrix, lambda_system, "
            f"floquet; found {present or 'none'}")
    kind = present[0]
    if kind == "matrix":
        return _parse_matrix_model(data[kind])
    if kind == "lambda_system":
        return _parse_lambda(data[kind])
    return _parse_floquet(data[kind])


def load_model(path: str) -> Model:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}") from exc
    return model_from_dict(data)


def model_to_dict(model: Model) -> dict:
    if model.kind == "matrix":
        return {"matrix": {
            "hamiltonian": matrix_to_json(model.hamiltonian),
            "slow_indices": [int(i) for i in model.slow_indices],
        }}
    if model.kind == "lambda_system":
        return lambda_model_dict(model.params)
    spec = model.floquet
    comps = {str(k): matrix_to_json(spec.components[k])
             for k in sorted(spec.components)}
    return {"floquet": {
        "dim": spec.dim,
        "drive_frequency": spec.drive_frequency,
        "components": comps,
    }}


# ---------------------------------------------------------------------------
# shared command plumbing


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="")


def _csv_line(cells) -> str:
    return ",".join(cells) + "\n"


def _fmt_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    return format(x, ".17g")


def _radius_field(value):
    if value is None:
        return None
    if np.isinf(value):
        return "inf"
    return float(value)


def _partition_model(model: Model):
    ph = partition_hamiltonian(model.hamiltonian, model.slow_indices)
    scales = coupling_scales(ph)
    print(f"epsilon = {scales.epsilon:.6g}, "
          f"epsilon_prime = {scales.epsilon_prime:.6g}, "
          f"spectral_gap = {scales.spectral_gap:.6g}", file=sys.stderr)
    if scales.radius is None:
        print("warning: contraction hypothesis violated; no certified "
              "invariant ball", file=sys.stderr)
    else:
        print(f"invariant-ball radius = {scales.radius:.6g}", file=sys.stderr)
    return ph, scales


def _solve_once(ph, method: str, order: int, tol: float):
    if method == "adiabatic":
        return adiabatic_hamiltonian(ph), adiabatic_embedding(ph)
    if method == "iterate":
        be = iterate_bloch(ph, tol=tol)
        return hermitian_effective(ph, be), be
    if method == "perturb":
        be = perturbative_bloch(ph, order)
        return hermitian_effective(ph, be), be
    if method == "sw":
        op = sw_first_order_hamiltonian(ph)
        be = embedding_from_generator(ph, first_order_generator(ph))
        return op, be
    raise ModelFormatError(f"unknown solve method {method!r}")


def _lambda_with(params: dict, name: str, value: float) -> Model:
    updated = dict(params)
    updated[name] = value
    return _parse_lambda({
        "detuning": updated["detuning"], "gap": updated["gap"],
        "rabi_a": complex_to_json(complex(updated["rabi_a"])),
        "rabi_b": complex_to_json(complex(updated["rabi_b"])),
    })


def _parse_sweep(text: str):
    parts = text.split(":")
    if len(parts) != 4:
        raise ModelFormatError("sweep must look like name:lo:hi:steps")
    name, lo, hi, steps = parts
    try:
        lo_f, hi_f, n = float(lo), float(hi), int(steps)
    except ValueError as exc:
        raise ModelFormatError(f"bad sweep bounds: {exc}") from exc
    if n < 1:
        raise ModelFormatError("sweep needs at least one step")
    return name, np.linspace(lo_f, hi_f, n)


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    model = load_model(args.model)
    if model.kind == "floquet":
        raise ModelFormatError(
            "periodic models are handled by the floquet command")
    if args.sweep:
        return _solve_sweep(args, model)
    ph, scales = _partition_model(model)
    op, be = _solve_once(ph, args.method, args.order, args.tol)
    full = hermitian_eig(model.hamiltonian).values
    report = {
        "tool": "effham",
        "version": __version__,
        "command": "solve",
        "model": model.kind,
        "method": args.method,
        "slow_dim": ph.slow_dim,
        "fast_dim": ph.fast_dim,
        "effective_hamiltonian": matrix_to_json(op.matrix),
        "hermitian": bool(op.hermitian),
        "spectrum": vector_to_json(np.real(op.spectrum())),
        "bloch_residual": float(be.residual),
        "epsilon": scales.epsilon,
        "epsilon_prime": scales.epsilon_prime,
        "radius": _radius_field(scales.radius),
        "radius_small": _radius_field(scales.radius_small),
        "spectral_gap": scales.spectral_gap,
        "full_spectrum": vector_to_json(full),
    }
    _write_text(args.out, dumps_json(report) + "\n")
    return 0


def _solve_sweep(args, model: Model) -> int:
    if model.kind != "lambda_system":
        raise ModelFormatError("solve sweeps are defined for lambda_system "
                               "models only")
    name, values = _parse_sweep(args.sweep)
    if name not in ("detuning", "gap", "rabi_a", "rabi_b"):
        raise ModelFormatError(f"unknown sweep parameter {name!r}")
    p = len(model.slow_indices)
    header = [name] + [f"eig_{i}" for i in range(p)] + [
        "bloch_residual", "epsilon", "epsilon_prime", "radius"]
    lines = [_csv_line(header)]
    for value in values:
        swept = _lambda_with(model.params, name, float(value))
        ph = partition_hamiltonian(swept.hamiltonian, swept.slow_indices)
        scales = coupling_scales(ph)
        op, be = _solve_once(ph, args.method, args.order, args.tol)
        spectrum = np.real(op.spectrum())
        cells = [_fmt_cell(value)] + [_fmt_cell(x) for x in spectrum]
        cells += [_fmt_cell(be.residual), _fmt_cell(scales.epsilon),
                  _fmt_cell(scales.epsilon_prime),
                  _fmt_cell(scales.radius)]
        lines.append(_csv_line(cells))
    _write_text(args.out, "".join(lines))
    return 0


# ---------------------------------------------------------------------------
# simulate


_GEN_PATTERN = re.compile(r"^(exact|adiabatic|second|sw|iterate(\d+)|herm(\d+))$")


def _generator_series(model: Model, token: str, psi0: np.ndarray, times):
    """Build the time series for one generator token."""
    ph = partition_hamiltonian(model.hamiltonian, model.slow_indices)
    slow_labels = tuple(model.labels[i] for i in ph.slow_indices)
    # Slow generators take the slow components of psi0 as given, unrenormalized.
    slow_state = StateVector(psi0[list(ph.slow_indices)], slow_labels)
    match = _GEN_PATTERN.match(token)
    if match is None:
        raise ModelFormatError(f"unknown generator {token!r}")
    if token == "exact":
        state = StateVector(psi0, model.labels)
        return evolve_constant(model.hamiltonian, state, times, kind="exact")
    if token == "adiabatic":
        op = adiabatic_hamiltonian(ph)
        return evolve_constant(op.matrix, slow_state, times, kind=token)
    if token == "second":
        op = second_order_hamiltonian(ph)
        return evolve_constant(op.matrix, slow_state, times, kind=token)
    if token == "sw":
        op = sw_first_order_hamiltonian(ph)
        return evolve_constant(op.matrix, slow_state, times, kind=token)
    if token.startswith("iterate"):
        sweeps = int(match.group(2))
        be = iterate_bloch(ph, tol=0.0, max_iter=sweeps,
                           require_convergence=False)
        op = nonhermitian_effective(ph, be)
        return evolve_constant(op.matrix, slow_state, times, kind=token)
    sweeps = int(match.group(3))
    be = iterate_bloch(ph, tol=0.0, max_iter=sweeps,
                       require_convergence=False)
    op = hermitian_effective(ph, be)
    return evolve_constant(op.matrix, slow_state, times, kind=token)


def _series_csv(series) -> str:
    pops = populations(series)
    norms = series.norms()
    header = ["t"] + [f"pop_{lab}" for lab in series.labels] + ["norm"]
    lines = [_csv_line(header)]
    for i, t in enumerate(series.times):
        cells = [_fmt_cell(t)] + [_fmt_cell(x) for x in pops[i]]
        cells.append(_fmt_cell(norms[i]))
        lines.append(_csv_line(cells))
    return "".join(lines)


def _parse_psi0(text: str | None, dim: int) -> np.ndarray:
    if text is None:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    try:
        vals = [complex(part.strip().replace("i", "j"))
                for part in text.split(",")]
    except ValueError as exc:
        raise ModelFormatError(f"cannot parse --psi0: {exc}") from exc
    if len(vals) != dim:
        raise ModelFormatError(
            f"--psi0 has {len(vals)} components, model needs {dim}")
    return np.asarray(vals, dtype=complex)


def cmd_simulate(args) -> int:
    model = load_model(args.model)
    if args.samples < 2:
        raise ModelFormatError("need at least two samples")
    if not args.tmax > 0.0:
        raise ModelFormatError("tmax must be positive")
    times = np.linspace(0.0, args.tmax, args.samples)
    tokens = [tok.strip() for tok in args.generators.split(",") if tok.strip()]
    if not tokens:
        raise ModelFormatError("no generators requested")
    if model.kind == "floquet":
        if tokens != ["exact"]:
            raise ModelFormatError(
                "periodic models support only the exact generator")
        psi0 = _parse_psi0(args.psi0, model.floquet.dim)
        series = evolve_periodic(model.floquet,
                                 StateVector(psi0, model.labels), times)
        chunks = {"exact": _series_csv(series)}
    else:
        dim = model.hamiltonian.shape[0]
        psi0 = _parse_psi0(args.psi0, dim)
        chunks = {}
        for token in tokens:
            series = _generator_series(model, token, psi0, times)
            chunks[token] = _series_csv(series)
    if args.out is None or args.out == "-":
        parts = []
        for token in tokens:
            parts.append(f"# generator: {token}\n")
            parts.append(chunks[token])
        sys.stdout.write("".join(parts))
    else:
        for token in tokens:
            _write_text(f"{args.out}_{token}.csv", chunks[token])
    return 0


# ---------------------------------------------------------------------------
# floquet


_PERTURB = re.compile(r"^perturb(\d+)$")


def _quasi_for(token: str, spec: FloquetSpec, steps, cutoff):
    if token == "monodromy":
        return quasi_energies_monodromy(spec, steps)
    if token == "diag":
        return quasi_energies_diag(spec, cutoff)
    if token == "adiabatic":
        return quasi_energies_effective(spec, "adiabatic", cutoff=cutoff)
    if token == "sw":
        return quasi_energies_effective(spec, "sw_first", cutoff=cutoff)
    if token == "iterate":
        return quasi_energies_effective(spec, "iterate", cutoff=cutoff)
    match = _PERTURB.match(token)
    if match:
        return quasi_energies_effective(
            spec, f"bloch_order_{int(match.group(1))}", cutoff=cutoff)
    if token == "hf1":
        h = first_order_floquet_hamiltonian(spec)
        values = fold_quasienergy(hermitian_eig(h).values,
                                  spec.drive_frequency)
        return QuasiEnergySet(values=np.sort(values), method="hf1",
                              drive_frequency=spec.drive_frequency)
    raise ModelFormatError(f"unknown quasi-energy method {token!r}")


def _scaled_spec(spec: FloquetSpec, name: str, value: float) -> FloquetSpec:
    comps = {k: m.copy() for k, m in spec.components.items()}
    freq = spec.drive_frequency
    if name == "drive_frequency":
        freq = float(value)
    elif name == "scale":
        comps = {k: (m * value if k != 0 else m.copy())
                 for k, m in spec.components.items()}
    elif name == "h0_scale":
        comps = {k: (m * value if k == 0 else m.copy())
                 for k, m in spec.components.items()}
    else:
        raise ModelFormatError(f"unknown sweep parameter {name!r}")
    return FloquetSpec(dim=spec.dim, drive_frequency=freq, components=comps)


def cmd_floquet(args) -> int:
    model = load_model(args.model)
    if model.kind != "floquet":
        raise ModelFormatError("the floquet command needs a floquet model")
    spec = model.floquet
    tokens = [tok.strip() for tok in args.methods.split(",") if tok.strip()]
    if not tokens:
        raise ModelFormatError("no methods requested")
    d = spec.dim
    if args.sweep is None:
        ref = None
        lines = [_csv_line(["method"] + [f"q_{i}" for i in range(d)]
                           + ["max_dev"])]
        for token in tokens:
            qs = _quasi_for(token, spec, args.steps, args.cutoff)
            if ref is None:
                ref = qs.values
            dev = float(np.max(np.abs(qs.values - ref)))
            cells = [token] + [_fmt_cell(x) for x in qs.values]
            cells.append(_fmt_cell(dev))
            lines.append(_csv_line(cells))
        _write_text(args.out, "".join(lines))
        return 0
    name, values = _parse_sweep(args.sweep)
    header = [name]
    for token in tokens:
        header += [f"{token}_q{i}" for i in range(d)]
        header.append(f"{token}_dev")
    lines = [_csv_line(header)]
    for value in values:
        swept = _scaled_spec(spec, name, float(value))
        cells = [_fmt_cell(value)]
        ref = None
        for token in tokens:
            qs = _quasi_for(token, swept, args.steps, args.cutoff)
            if ref is None:
                ref = qs.values
            cells += [_fmt_cell(x) for x in qs.values]
            cells.append(_fmt_cell(float(np.max(np.abs(qs.values - ref)))))
        lines.append(_csv_line(cells))
    _write_text(args.out, "".join(lines))
    return 0


# ---------------------------------------------------------------------------
# export


def _parse_overrides(pairs) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ModelFormatError(f"override {pair!r} must look like key=value")
        key, _, raw = pair.partition("=")
        try:
            out[key.strip()] = complex(raw.strip().replace("i", "j"))
        except ValueError as exc:
            raise ModelFormatError(
                f"cannot parse override {pair!r}: {exc}") from exc
    return out


def cmd_export(args) -> int:
    overrides = _parse_overrides(args.set)
    if args.preset == "lambda":
        doc = lambda_model_dict(overrides)
    elif args.preset == "driven-qubit":
        doc = driven_qubit_dict(overrides)
    else:  # pragma: no cover - argparse restricts choices
        raise ModelFormatError(f"unknown preset {args.preset!r}")
    _write_text(args.out, dumps_json(doc) + "\n")
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effham",
        description="Effective slow-sector Hamiltonians, quasi-energies, "
                    "and supporting dynamics.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser(
        "solve", help="effective Hamiltonian report for a partitioned model")
    p_solve.add_argument("model")
    p_solve.add_argument("--method", default="adiabatic",
                         choices=["adiabatic", "iterate", "perturb", "sw"])
    p_solve.add_argument("--order", type=int, default=4,
                         help="series order for --method perturb")
    p_solve.add_argument("--tol", type=float, default=1e-12,
                         help="residual tolerance for --method iterate")
    p_solve.add_argument("--sweep", default=None,
                         help="name:lo:hi:steps parameter sweep (CSV output)")
    p_solve.add_argument("--out", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_sim = sub.add_parser("simulate", help="time evolution to CSV")
    p_sim.add_argument("model")
    p_sim.add_argument("--tmax", type=float, required=True)
    p_sim.add_argument("--samples", type=int, default=2001)
    p_sim.add_argument("--psi0", default=None,
                       help="comma-separated complex amplitudes at t = 0")
    p_sim.add_argument("--generators", default="exact",
                       help="comma list: exact, adiabatic, second, sw, "
                            "iterate<k>, herm<k>")
    p_sim.add_argument("--out", default=None,
                       help="file prefix; stdout when omitted")
    p_sim.set_defaults(func=cmd_simulate)

    p_flo = sub.add_parser("floquet", help="quasi-energy table to CSV")
    p_flo.add_argument("model")
    p_flo.add_argument("--methods", default="monodromy,diag,adiabatic",
                       help="comma list: monodromy, diag, adiabatic, sw, "
                            "iterate, perturb<k>, hf1")
    p_flo.add_argument("--steps", type=int, default=None,
                       help="substeps for the one-period propagator")
    p_flo.add_argument("--cutoff", type=int, default=None,
                       help="harmonic cutoff; doubled automatically if unset")
    p_flo.add_argument("--sweep", default=None,
                       help="name:lo:hi:steps with name drive_frequency, "
                            "scale, or h0_scale")
    p_flo.add_argument("--out", default=None)
    p_flo.set_defaults(func=cmd_floquet)

    p_exp = sub.add_parser("export", help="write a preset model file")
    p_exp.add_argument("--preset", required=True,
                       choices=["lambda", "driven-qubit"])
    p_exp.add_argument("--set", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a preset parameter (repeatable)")
    p_exp.add_argument("--out", default=None)
    p_exp.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ModelFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_ERROR
    except ToolkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
