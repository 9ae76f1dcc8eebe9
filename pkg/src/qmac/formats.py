"""Plain-text input formats and deterministic CSV/JSON emission.

Channel file::

    mac <n_senders> <|X_1|> ... <|X_n|> <|Y|>
    <p(0|x) p(1|x) ...>        one line per joint input x, row-major, sender 1 slowest

Ensemble file::

    ens <|Q|> <|X_1|> ... <|X_n|>
    <p(q=0) ... p(q=|Q|-1)>
    <p(x_1 | q=0)>             |Q| lines for sender 1, then |Q| lines for sender 2, ...

Scenario file: ``key = value`` lines. A value ``start:stop:count`` expands to a
linear grid and ``start:stop:count:log`` to a geometric one. ``#`` starts a comment.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from typing import Iterable

import numpy as np

from .capacity_region import ClassicalMac, InputEnsemble
from .errors import ValidationError

SIG_DIGITS = 12


def _content_lines(text: str) -> list:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def _ints(tokens, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ValidationError(f"{what}: expected integers, got {' '.join(tokens)!r}") from None


def _floats(line: str, n: int, what: str) -> list:
    try:
        vals = [float(t) for t in line.split()]
    except ValueError:
        raise ValidationError(f"{what}: non-numeric entry in {line!r}") from None
    if len(vals) != n:
        raise ValidationError(f"{what}: expected {n} numbers, got {len(vals)}")
    return vals


def parse_mac(text: str) -> ClassicalMac:
    lines = _content_lines(text)
    if not lines or lines[0].split()[0] != "mac":
        raise ValidationError("channel file must start with a 'mac' header")
    head = _ints(lines[0].split()[1:], "mac header")
    if len(head) < 3 or head[0] != len(head) - 2 or min(head) < 1:
        raise ValidationError("mac header must read: mac <n> <|X_1|> ... <|X_n|> <|Y|>")
    n, sizes, ny = head[0], head[1:-1], head[-1]
    rows = lines[1:]
    expected = int(np.prod(sizes))
    if len(rows) != expected:
        raise ValidationError(f"channel file has {len(rows)} rows, expected {expected}")
    table = [_floats(r, ny, f"channel row {k}") for k, r in enumerate(rows)]
    return ClassicalMac.from_rows(sizes, ny, table)


def parse_ensemble(text: str) -> InputEnsemble:
    lines = _content_lines(text)
    if not lines or lines[0].split()[0] != "ens":
        raise ValidationError("ensemble file must start with an 'ens' header")
    head = _ints(lines[0].split()[1:], "ens header")
    if len(head) < 2 or min(head) < 1:
        raise ValidationError("ens header must read: ens <|Q|> <|X_1|> ... <|X_n|>")
    nq, sizes = head[0], head[1:]
    body = lines[1:]
    expected = 1 + nq * len(sizes)
    if len(body) != expected:
        raise ValidationError(f"ensemble file has {len(body)} data lines, expected {expected}")
    q = _floats(body[0], nq, "time-sharing pmf")
    cond = []
    k = 1
    for i, size in enumerate(sizes):
        cond.append(np.array([_floats(body[k + j], size, f"sender {i + 1} pmf") for j in range(nq)]))
        k += nq
    return InputEnsemble(np.array(q), tuple(cond))


def format_mac(mac: ClassicalMac) -> str:
    head = " ".join(str(s) for s in (mac.n_senders, *mac.input_sizes, mac.output_size))
    rows = mac.table.reshape(-1, mac.output_size)
    return "\n".join([f"mac {head}"] + [" ".join(f"{v:.17g}" for v in r) for r in rows]) + "\n"


def format_ensemble(ens: InputEnsemble) -> str:
    head = " ".join(str(s) for s in (ens.q_pmf.size, *ens.input_sizes))
    lines = [f"ens {head}", " ".join(f"{v:.17g}" for v in ens.q_pmf)]
    for c in ens.cond:
        lines += [" ".join(f"{v:.17g}" for v in row) for row in c]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- scenarios and ranges

def parse_range(spec: str) -> np.ndarray:
    """``v`` -> [v]; ``a:b:n`` -> linspace; ``a:b:n:log`` -> geomspace."""
    parts = spec.strip().split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) in (3, 4):
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        else:
            raise ValueError
    except ValueError:
        raise ValidationError(f"bad range {spec!r}; use start:stop:count[:log]") from None
    if n < 1:
        raise ValidationError(f"range {spec!r}: count must be >= 1")
    if len(parts) == 4:
        if parts[3] != "log":
            raise ValidationError(f"range {spec!r}: the fourth field may only be 'log'")
        if a <= 0 or b <= 0:
            raise ValidationError(f"range {spec!r}: log spacing needs positive endpoints")
        return np.geomspace(a, b, n)
    return np.linspace(a, b, n)


def parse_scenario(text: str) -> dict:
    """Key/value map; numeric values become arrays (grids), other values stay strings."""
    out = {}
    for line in _content_lines(text):
        if "=" not in line:
            raise ValidationError(f"scenario line {line!r} is not key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValidationError(f"empty key in {line!r}")
        if key in out:
            raise ValidationError(f"duplicate key {key!r}")
        try:
            out[key] = parse_range(value)
        except ValidationError:
            if any(ch.isdigit() for ch in value) and ":" in value:
                raise
            out[key] = value
    return out


def grid_points(params: dict) -> list:
    """Cartesian product over array-valued keys, in file order (last key fastest)."""
    keys = list(params)
    axes = [params[k] if isinstance(params[k], np.ndarray) else [params[k]] for k in keys]
    return [dict(zip(keys, combo)) for combo in itertools.product(*axes)]


# ---------------------------------------------------------------- emission

def _num(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_num(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return None
        return float(f"{v:.{SIG_DIGITS}g}")
    return v


def _csv_cell(v) -> str:
    v = _num(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    return str(v)


def to_csv(rows: list, columns: Iterable[str] | None = None) -> str:
    cols = list(columns) if columns is not None else (list(rows[0]) if rows else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_csv_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def to_json(command: str, params: dict, rows: list) -> str:
    doc = {
        "command": command,
        "params": {k: _num(v) for k, v in params.items()},
        "rows": [{k: _num(v) for k, v in r.items()} for r in rows],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
