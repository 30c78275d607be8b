"""Serialization shared by the library and the command line.

Matrices go to JSON as ``{"dim": d, "data": [[[re, im], ...], ...]}``
(row-major). CSV files start with ``#`` comment lines carrying metadata,
followed by a header row. Floats are written with 17 significant digits so
identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .reconstruction import W11Record
from .single import PointerDensity
from .successive import QuasiProbTable


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def matrix_from_json(obj) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; also takes a bare nested list.

    Entries may be ``[re, im]`` pairs or plain real numbers.
    """
    data = obj["data"] if isinstance(obj, dict) else obj
    rows = []
    for row in data:
        out = []
        for z in row:
            if isinstance(z, (list, tuple)):
                if len(z) != 2:
                    raise ValueError(f"complex entry must be [re, im], got {z!r}")
                out.append(complex(float(z[0]), float(z[1])))
            else:
                out.append(complex(float(z)))
        rows.append(out)
    m = np.array(rows, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if isinstance(obj, dict) and "dim" in obj and int(obj["dim"]) != m.shape[0]:
        raise ValueError(f"dim field {obj['dim']} does not match data ({m.shape[0]})")
    return m


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x) and x.ndim == 2:
            return matrix_to_json(x)
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def read_csv(text: str):
    """Parse CSV text into ``(comments, header, rows)``; rows are lists of strings."""
    lines = text.splitlines()
    comments = [ln[1:].strip() for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#") and ln.strip()]
    reader = csv.reader(body)
    header = next(reader)
    return comments, header, list(reader)


def pointer_density_csv(density: PointerDensity, comments=()) -> str:
    return csv_text(["weight", "center", "width"], density.rows(), comments)


def pointer_samples_csv(q, p, comments=()) -> str:
    return csv_text(["q", "p"], zip(q, p), comments)


def table_csv(table: QuasiProbTable, comments=()) -> str:
    meta = [f"epsilon1={fmt(table.epsilon1)}", f"sigma_q1={fmt(table.sigma_q1)}"]
    return csv_text(["a_n", "b_m", "re", "im"], table.rows(), list(comments) + meta)


def table_json(table: QuasiProbTable) -> dict:
    return {
        "epsilon1": table.epsilon1,
        "sigma_q1": table.sigma_q1,
        "eigenvalues_a": table.eigenvalues_a,
        "eigenvalues_b": table.eigenvalues_b,
        "values": [[[float(z.real), float(z.imag)] for z in row] for row in table.values],
    }


def table_from_csv(text) -> QuasiProbTable:
    comments, header, rows = read_csv(text)
    meta = dict(c.split("=", 1) for c in comments if "=" in c and " " not in c)
    if header != ["a_n", "b_m", "re", "im"]:
        raise ValueError(f"unexpected header {header}")
    a_vals = sorted({float(r[0]) for r in rows}, reverse=True)
    b_vals = sorted({float(r[1]) for r in rows}, reverse=True)
    vals = np.zeros((len(a_vals), len(b_vals)), dtype=complex)
    for r in rows:
        vals[a_vals.index(float(r[0])), b_vals.index(float(r[1]))] = complex(float(r[2]), float(r[3]))
    return QuasiProbTable(vals, np.array(a_vals), np.array(b_vals),
                          float(meta["epsilon1"]), float(meta["sigma_q1"]))


RECORD_COLUMNS = ["nu", "mu", "re", "im", "epsilon1", "sigma_q1"]


def records_csv(records, comments=()) -> str:
    rows = [(r.nu, r.mu, r.value.real, r.value.imag, r.epsilon1, r.sigma_q1) for r in records]
    return csv_text(RECORD_COLUMNS, rows, comments)


def records_from_csv(text) -> list[W11Record]:
    _, header, rows = read_csv(text)
    if header != RECORD_COLUMNS:
        raise ValueError(f"unexpected header {header}")
    return [
        W11Record(int(r[0]), int(r[1]), complex(float(r[2]), float(r[3])), float(r[4]), float(r[5]))
        for r in rows
    ]
