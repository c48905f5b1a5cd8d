"""System and gain files, exact serialization, and trajectory CSV.

System files are JSON documents::

    {"A": [[[-1, -2, 2.5], [1, 1, -1], [0, 1, 0]], ...],
     "B": [[[-1], [0], [1]], ...]}

Entries may be integers, plain decimals (``2.5``, quoted or not) or ratio
strings (``"5/2"``); all are converted exactly. Scientific notation is
rejected. A ``B`` entry given as a flat list is read as a single column.

Gain files use the same entry syntax::

    {"mode_kind": "md", "K": [[[0, -1, 0]], [[0, -1, "1/2"]]]}

For ``"mi"`` the ``K`` list holds one matrix (a bare matrix is accepted too).
"""

from __future__ import annotations

import csv
import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .linalg import DimensionError, Matrix, to_fraction
from .synthesis import GainSet
from .system import ModeKind, SwitchedSystem

__all__ = [
    "ParseError",
    "ShapeError",
    "parse_system",
    "loads_system",
    "dumps_system",
    "parse_gains",
    "loads_gains",
    "gains_to_dict",
    "system_to_dict",
    "system_digest",
    "frac_str",
    "matrix_to_json",
    "vector_to_json",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "check_gains",
]


class ParseError(ValueError):
    pass


class ShapeError(ParseError):
    pass


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def matrix_to_json(M: Matrix) -> list[list[str]]:
    return [[frac_str(x) for x in row] for row in M.rows]


def vector_to_json(v) -> list[str]:
    return [frac_str(x) for x in v]


def _load_json(text: str, source: str) -> Any:
    try:
        # Keep float literals as text so they convert exactly.
        return json.loads(text, parse_float=str)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _entry(value, where: str) -> Fraction:
    if isinstance(value, bool) or value is None or isinstance(value, (list, dict)):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    try:
        return to_fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def _matrix(value, where: str, column_ok: bool = False) -> Matrix:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected a list of rows")
    if column_ok and value and not isinstance(value[0], list):
        return Matrix.column([_entry(x, f"{where}[{i}]") for i, x in enumerate(value)])
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise ShapeError(f"{where}: row {i} is not a list")
        rows.append([_entry(x, f"{where}[{i}][{k}]") for k, x in enumerate(row)])
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ShapeError(f"{where}: ragged matrix (row lengths {[len(r) for r in rows]})")
    return Matrix(rows)


def loads_system(text: str, source: str = "<string>") -> SwitchedSystem:
    doc = _load_json(text, source)
    if not isinstance(doc, dict) or "A" not in doc or "B" not in doc:
        raise ParseError(f"{source}: expected an object with fields 'A' and 'B'")
    A_raw, B_raw = doc["A"], doc["B"]
    if not isinstance(A_raw, list) or not isinstance(B_raw, list) or not A_raw:
        raise ParseError(f"{source}: 'A' and 'B' must be nonempty lists of matrices")
    if len(A_raw) != len(B_raw):
        raise ShapeError(f"{source}: {len(A_raw)} A matrices but {len(B_raw)} B matrices")
    A = [_matrix(a, f"A[{j}]") for j, a in enumerate(A_raw)]
    n = A[0].nrows
    for j, a in enumerate(A):
        if a.shape != (n, n):
            raise ShapeError(f"A[{j}] has shape {a.shape}, expected {(n, n)}")
    B = []
    for j, b in enumerate(B_raw):
        if b == []:
            B.append(Matrix.zeros(n, 0))
        else:
            B.append(_matrix(b, f"B[{j}]", column_ok=True))
    for j, b in enumerate(B):
        if b.shape != (n, B[0].ncols):
            raise ShapeError(f"B[{j}] has shape {b.shape}, expected {(n, B[0].ncols)}")
    return SwitchedSystem(tuple(A), tuple(B))


def parse_system(path) -> SwitchedSystem:
    path = Path(path)
    return loads_system(path.read_text(), str(path))


def system_to_dict(sys: SwitchedSystem) -> dict:
    return {"A": [matrix_to_json(a) for a in sys.A], "B": [matrix_to_json(b) for b in sys.B]}


def dumps_system(sys: SwitchedSystem) -> str:
    return json.dumps(system_to_dict(sys), indent=1)


def system_digest(sys: SwitchedSystem) -> str:
    canon = json.dumps(system_to_dict(sys), separators=(",", ":"), sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def loads_gains(text: str, source: str = "<string>") -> GainSet:
    doc = _load_json(text, source)
    if not isinstance(doc, dict) or "K" not in doc:
        raise ParseError(f"{source}: expected an object with field 'K'")
    try:
        kind = ModeKind.parse(doc.get("mode_kind", "md"))
    except ValueError:
        raise ParseError(f"{source}: mode_kind must be 'md' or 'mi'") from None
    K = doc["K"]
    if not isinstance(K, list) or not K:
        raise ParseError(f"{source}: 'K' must be a nonempty list")
    bare = isinstance(K[0], list) and K[0] and not isinstance(K[0][0], list)
    mats = [_matrix(K, "K")] if bare else [_matrix(k, f"K[{j}]") for j, k in enumerate(K)]
    if kind is ModeKind.MI and len(mats) != 1:
        raise ShapeError(f"{source}: a mode-independent gain file holds exactly one matrix")
    return GainSet(kind, tuple(mats))


def parse_gains(path) -> GainSet:
    path = Path(path)
    return loads_gains(path.read_text(), str(path))


def gains_to_dict(gains: GainSet) -> dict:
    return {"mode_kind": gains.mode_kind.value, "K": [matrix_to_json(k) for k in gains.gains]}


def check_gains(sys: SwitchedSystem, gains: GainSet):
    """Raise ShapeError if ``gains`` cannot be applied to ``sys``."""
    try:
        gains.per_mode(sys.M)
    except DimensionError as exc:
        raise ShapeError(str(exc)) from None
    for j, K in enumerate(gains.gains):
        if K.shape != (sys.m, sys.n):
            raise ShapeError(f"K[{j}] has shape {K.shape}, expected {(sys.m, sys.n)}")


def write_trajectory_csv(traj, path) -> None:
    """One row per time step: mode (1-based; blank on the last row), decimal
    state, exact state, exact squared norm."""
    n = len(traj.x0)
    header = (
        ["t", "sigma"]
        + [f"x{i + 1}" for i in range(n)]
        + [f"x{i + 1}_exact" for i in range(n)]
        + ["norm_sq_exact"]
    )
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t, x in enumerate(traj.states):
            sigma = str(traj.sigma[t] + 1) if t < traj.steps else ""
            w.writerow(
                [t, sigma]
                + [repr(float(v)) for v in x]
                + [frac_str(v) for v in x]
                + [frac_str(sum((v * v for v in x), Fraction(0)))]
            )


def read_trajectory_csv(path) -> list[dict]:
    """Rows with exact columns parsed back to Fractions (``sigma`` 0-based or None)."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            exact = sorted(
                (k for k in row if k.startswith("x") and k.endswith("_exact")),
                key=lambda k: int(k[1:-6]),
            )
            out.append(
                {
                    "t": int(row["t"]),
                    "sigma": int(row["sigma"]) - 1 if row["sigma"] else None,
                    "x": tuple(Fraction(row[k]) for k in exact),
                    "norm_sq": Fraction(row["norm_sq_exact"]),
                }
            )
    return out
