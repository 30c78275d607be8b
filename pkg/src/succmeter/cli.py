"""Batch front-end: ``succmeter <workflow> --config exp.json --out results/``.

Exit codes: 0 ok, 2 parse error, 3 validation error, 4 numerical error. On
failure a one-line JSON object ``{"error": <category>, "message": ...}`` is
printed to stderr.

Config (JSON)::

    {
      "dimension": 2,
      "state": "y+",                      # preset | {"matrix": M} | {"ket": v} | {"random_seed": 3}
      "A": "pauli-x",                     # preset | {"matrix": M} | {"basis": "fourier", "eigenvalues": [...]}
      "B": "pauli-z",
      "meter": {"epsilon1": 1.0, "epsilon2": 1.0, "sigma_q1": 1.0, "sigma_q2": 1.0},
      "workflow": "quasiprob",            # used by the ``run`` subcommand
      "epsilon_scan": [0.01, 0.1, 1, 10], # ``scan`` only
      "basis_a": "computational",         # ``reconstruct`` only
      "basis_b": "fourier"
    }
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import io as sio
from .errors import GridTooSmall, SuccMeterError, ZeroProbability
from .operators import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    OrthonormalBasis,
    SpectralDecomposition,
    computational_basis,
    fourier_basis,
    ket_projector,
    random_density,
    spectral_decompose,
    validate_density,
)
from .oracle import compare_with_analytic, refinement_change
from .reconstruction import reconstruction_report, simulate_records
from .single import (
    GaussianMeter,
    born_probabilities,
    luders_reduce,
    pointer_density,
    pointer_mean,
    reduced_state_after,
)
from .successive import (
    corr_p1q2,
    corr_q1q2,
    kirkwood,
    margenau_hill,
    quasi_probability,
    scan_epsilon,
    wigner_table,
)

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3, 4
WORKFLOWS = ("single", "quasiprob", "limits", "reconstruct", "oracle-check", "scan")


class ConfigError(Exception):
    """Malformed configuration (exit code 2)."""


@dataclass(frozen=True)
class ExperimentConfig:
    dimension: int
    rho: np.ndarray
    a: SpectralDecomposition
    b: SpectralDecomposition | None
    meter1: GaussianMeter
    meter2: GaussianMeter
    raw: dict

    @property
    def digest(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def get(self, key, default=None):
        return self.raw.get(key, default)


def _state(entry, d: int) -> np.ndarray:
    if isinstance(entry, str):
        entry = {"preset": entry}
    if not isinstance(entry, dict):
        raise ConfigError("state must be a preset name or an object")
    if "preset" in entry:
        name = entry["preset"]
        e = np.eye(d)
        if name in ("0", "1") and int(name) < d:
            return ket_projector(e[int(name)])
        if name in ("+", "-"):
            v = np.ones(d)
            if name == "-":
                v[1::2] = -1
            return ket_projector(v)
        if name in ("y+", "y-") and d == 2:
            return ket_projector([1, 1j if name == "y+" else -1j])
        if name == "mixed":
            return np.eye(d, dtype=complex) / d
        raise ConfigError(f"unknown state preset {name!r} for dimension {d}")
    if "matrix" in entry:
        return validate_density(_matrix(entry["matrix"]))
    if "ket" in entry:
        v = np.array([complex(*z) if isinstance(z, list) else complex(z) for z in entry["ket"]])
        return ket_projector(v)
    if "random_seed" in entry:
        return random_density(d, int(entry["random_seed"]))
    raise ConfigError(f"cannot interpret state {entry!r}")


def _matrix(obj) -> np.ndarray:
    try:
        return sio.matrix_from_json(obj)
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"malformed matrix: {exc}") from exc


def _basis(entry, d: int) -> OrthonormalBasis:
    if entry == "computational":
        return computational_basis(d)
    if entry == "fourier":
        return fourier_basis(d)
    if isinstance(entry, (list, dict)):
        return OrthonormalBasis(_matrix(entry))
    raise ConfigError(f"unknown basis {entry!r}")


def _observable(entry, d: int) -> SpectralDecomposition:
    paulis = {"pauli-x": SIGMA_X, "pauli-y": SIGMA_Y, "pauli-z": SIGMA_Z}
    if isinstance(entry, str):
        entry = {"preset": entry}
    if not isinstance(entry, dict):
        raise ConfigError("observable must be a preset name or an object")
    if "preset" in entry:
        name = entry["preset"]
        if name in paulis:
            if d != 2:
                raise ConfigError(f"{name} needs dimension 2")
            return spectral_decompose(paulis[name])
        if name in ("computational", "fourier"):
            return _basis(name, d).observable()
        raise ConfigError(f"unknown observable preset {name!r}")
    if "matrix" in entry:
        return spectral_decompose(_matrix(entry["matrix"]))
    if "basis" in entry:
        return _basis(entry["basis"], d).observable(entry.get("eigenvalues"))
    raise ConfigError(f"cannot interpret observable {entry!r}")


def load_config(path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return parse_config(raw)


def parse_config(raw) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        d = int(raw["dimension"])
        meter = raw.get("meter", {})
        if not isinstance(meter, dict):
            raise ConfigError("meter must be an object")
        m1 = (float(meter.get("sigma_q1", 1.0)), float(meter.get("epsilon1", 1.0)))
        m2 = (float(meter.get("sigma_q2", 1.0)), float(meter.get("epsilon2", 1.0)))
        state_spec, a_spec, b_spec = raw["state"], raw["A"], raw.get("B")
    except KeyError as exc:
        raise ConfigError(f"missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value: {exc}") from exc
    if d < 1:
        raise SuccMeterError("dimension must be positive")
    rho = validate_density(_state(state_spec, d))
    a = _observable(a_spec, d)
    b = _observable(b_spec, d) if b_spec is not None else None
    for name, obs in (("A", a), ("B", b)):
        if obs is not None and obs.dim != d:
            raise SuccMeterError(f"{name} has dimension {obs.dim}, expected {d}")
    if rho.shape[0] != d:
        raise SuccMeterError(f"state has dimension {rho.shape[0]}, expected {d}")
    return ExperimentConfig(d, rho, a, b, GaussianMeter(*m1), GaussianMeter(*m2), raw)


class Writer:
    def __init__(self, out: Path, fmt: str, cfg: ExperimentConfig):
        self.out, self.fmt, self.cfg = out, fmt, cfg
        self.written: list[str] = []

    @property
    def stamp(self) -> str:
        return f"succmeter {__version__} config_sha256={self.cfg.digest}"

    def csv(self, name: str, text_fn):
        self._write(f"{name}.csv", text_fn([self.stamp]))

    def json(self, name: str, obj):
        obj = {"tool": f"succmeter {__version__}", "config_sha256": self.cfg.digest, **obj}
        self._write(f"{name}.json", sio.dumps(obj))

    def _write(self, filename, text):
        sio.atomic_write(self.out / filename, text)
        self.written.append(str(self.out / filename))


def _need_b(cfg):
    if cfg.b is None:
        raise SuccMeterError("this workflow needs observable B")


def run_single(cfg: ExperimentConfig, w: Writer, grid: int | None = None):
    dens = pointer_density(cfg.rho, cfg.a, cfg.meter1)
    summary = {
        "epsilon": cfg.meter1.epsilon,
        "sigma_q": cfg.meter1.sigma_q,
        "pointer_mean_over_epsilon": pointer_mean(cfg.rho, cfg.a),
        "born_probabilities": born_probabilities(cfg.rho, cfg.a),
        "eigenvalues": cfg.a.eigenvalues,
        "reduced_state": reduced_state_after(cfg.rho, cfg.a, cfg.meter1),
        "luders_state": luders_reduce(cfg.rho, cfg.a),
    }
    if w.fmt == "json":
        summary["pointer_density"] = [list(r) for r in dens.rows()]
    else:
        w.csv("pointer_density", lambda c: sio.pointer_density_csv(dens, c))
    if grid:
        q, p = dens.sample_grid(grid)
        if w.fmt == "json":
            summary["pointer_samples"] = {"q": q, "p": p}
        else:
            w.csv("pointer_samples", lambda c: sio.pointer_samples_csv(q, p, c))
    w.json("single", summary)


def run_quasiprob(cfg: ExperimentConfig, w: Writer):
    _need_b(cfg)
    table = quasi_probability(cfg.rho, cfg.a, cfg.b, cfg.meter1)
    q1q2, p1q2 = corr_q1q2(table), corr_p1q2(table)
    if w.fmt == "json":
        w.json("quasiprob", {"table": sio.table_json(table), "q1q2": q1q2, "p1q2": p1q2})
    else:
        extra = [f"q1q2={sio.fmt(q1q2)}", f"p1q2={sio.fmt(p1q2)}"]
        w.csv("quasiprob", lambda c: sio.table_csv(table, c + extra))


def run_limits(cfg: ExperimentConfig, w: Writer):
    _need_b(cfg)
    tables = {
        "kirkwood": kirkwood(cfg.rho, cfg.a, cfg.b),
        "margenau_hill": margenau_hill(cfg.rho, cfg.a, cfg.b).astype(complex),
        "wigner": wigner_table(cfg.rho, cfg.a, cfg.b).astype(complex),
    }
    a_vals, b_vals = cfg.a.eigenvalues, cfg.b.eigenvalues
    if w.fmt == "json":
        w.json("limits", {
            "eigenvalues_a": a_vals,
            "eigenvalues_b": b_vals,
            **{k: [[[z.real, z.imag] for z in row] for row in v] for k, v in tables.items()},
        })
        return
    for name, t in tables.items():
        rows = [(a, b, t[n, m].real, t[n, m].imag)
                for n, a in enumerate(a_vals) for m, b in enumerate(b_vals)]
        w.csv(name, lambda c, rows=rows: sio.csv_text(["a_n", "b_m", "re", "im"], rows, c))


def run_reconstruct(cfg: ExperimentConfig, w: Writer):
    d = cfg.dimension
    basis_a = _basis(cfg.get("basis_a", "computational"), d)
    basis_b = _basis(cfg.get("basis_b", "fourier"), d)
    method = cfg.get("record_method", "analytic")
    records = simulate_records(cfg.rho, basis_a, basis_b, cfg.meter1, cfg.meter2, method=method)
    rep = reconstruction_report(records, basis_a, basis_b, cfg.meter1.epsilon,
                                cfg.meter1.sigma_q, rho_true=cfg.rho)
    w.csv("records", lambda c: sio.records_csv(records, c))
    w.json("reconstruction", {"record_method": method, "rho_true": cfg.rho, **rep})


def run_oracle_check(cfg: ExperimentConfig, w: Writer):
    _need_b(cfg)
    n = int(cfg.get("grid_points", 1024))
    rep = compare_with_analytic(cfg.rho, cfg.a, cfg.b, cfg.meter1, cfg.meter2, n_points=n)
    rep["refinement_change"] = refinement_change(cfg.rho, cfg.a, cfg.b, cfg.meter1, cfg.meter2, n)
    w.json("oracle_report", rep)


def _threads() -> int:
    cap = os.environ.get("SUCCMETER_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            raise ConfigError(f"SUCCMETER_THREADS must be an integer, got {cap!r}") from None
    return n


SCAN_COLUMNS = ["epsilon1", "a_n", "b_m", "re", "im", "q1q2", "p1q2",
                "distance_to_wigner", "distance_to_kirkwood"]


def run_scan(cfg: ExperimentConfig, w: Writer):
    _need_b(cfg)
    eps = cfg.get("epsilon_scan")
    if not isinstance(eps, list) or not eps:
        raise ConfigError("scan needs a non-empty 'epsilon_scan' list")
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        points = scan_epsilon(cfg.rho, cfg.a, cfg.b, cfg.meter1.sigma_q, eps, map_fn=pool.map)
    rows = []
    for p in points:
        for a, b, re, im in p.table.rows():
            rows.append((p.table.epsilon1, a, b, re, im, p.q1q2, p.p1q2,
                         p.distance_to_wigner, p.distance_to_kirkwood))
    if w.fmt == "json":
        w.json("scan", {"columns": SCAN_COLUMNS, "rows": rows})
    else:
        extra = [f"sigma_q1={sio.fmt(cfg.meter1.sigma_q)}"]
        w.csv("scan", lambda c: sio.csv_text(SCAN_COLUMNS, rows, c + extra))


RUNNERS = {
    "single": run_single,
    "quasiprob": run_quasiprob,
    "limits": run_limits,
    "reconstruct": run_reconstruct,
    "oracle-check": run_oracle_check,
    "scan": run_scan,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="succmeter", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"succmeter {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in (*WORKFLOWS, "run"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", type=Path, default=None)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        if name in ("single", "run"):
            sp.add_argument("--grid", type=int, default=None,
                            help="also write the pointer density sampled at this many points")
    return p


def _fail(category: str, code: int, exc: BaseException) -> int:
    print(json.dumps({"error": category, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        command = args.command
        if command == "run":
            command = cfg.get("workflow")
            if command not in RUNNERS:
                raise ConfigError(f"workflow must be one of {list(RUNNERS)}, got {command!r}")
        out = args.out or Path(cfg.get("out", "."))
        writer = Writer(out, args.format, cfg)
        if command == "single":
            run_single(cfg, writer, getattr(args, "grid", None))
        else:
            RUNNERS[command](cfg, writer)
    except ConfigError as exc:
        return _fail("parse", EXIT_PARSE, exc)
    except (ZeroProbability, GridTooSmall, np.linalg.LinAlgError, FloatingPointError) as exc:
        return _fail("numerical", EXIT_NUMERICAL, exc)
    except (SuccMeterError, ValueError) as exc:
        return _fail("validation", EXIT_VALIDATION, exc)
    print(json.dumps({"written": writer.written}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
