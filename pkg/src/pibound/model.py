"""Moment models whose per-observation contributions are affine in theta.

A model is described by a JSON document::

    {
      "d_theta": 2,
      "theta_lower": [0, 0], "theta_upper": [1, 1],
      "objective": {"coeffs": [{"lit": 1}, {"col": "x"}], "const": {"lit": 0}},
      "moments": [
        {"label": "m1", "sense": "leq",
         "coeffs": [{"col": "a"}, {"lit": 0}], "const": {"col": "y"}}
      ]
    }

Each slot is either a dataset column (``{"col": name}``) or a literal
(``{"lit": value}``). Observation ``i`` contributes
``m_j(W_i, theta) = coeffs_j(W_i) @ theta + const_j(W_i)`` and the sample
moment is the weighted mean over observations. Moments are imposed as
``mean <= 0`` (``leq``) or ``mean == 0`` (``eq``); assembly moves the
constant to the right-hand side.

Measurability and envelope conditions on the moment class are assumed, not
checked: they cannot be verified from a finite sample.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .lp import MAXIMIZE, MINIMIZE, LinearProgram

Source = Union[str, float]
"""A slot source: a column name (``str``) or a literal value (``float``)."""

LOWER = "lower"
UPPER = "upper"


class ModelSpecError(ValueError):
    """Invalid model document. ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class AffineForm:
    coeffs: tuple
    const: Source = 0.0

    def columns(self) -> set:
        cols = {s for s in self.coeffs if isinstance(s, str)}
        if isinstance(self.const, str):
            cols.add(self.const)
        return cols


@dataclass(frozen=True)
class Moment:
    label: str
    sense: str
    form: AffineForm


@dataclass(frozen=True, eq=False)
class ModelSpec:
    d_theta: int
    theta_lower: np.ndarray
    theta_upper: np.ndarray
    objective: AffineForm
    moments: tuple = ()

    def __post_init__(self):
        lo = np.asarray(self.theta_lower, dtype=float).reshape(-1)
        hi = np.asarray(self.theta_upper, dtype=float).reshape(-1)
        object.__setattr__(self, "theta_lower", lo)
        object.__setattr__(self, "theta_upper", hi)
        object.__setattr__(self, "moments", tuple(self.moments))
        d = self.d_theta
        if not isinstance(d, (int, np.integer)) or d < 1:
            raise ModelSpecError("d_theta", "must be a positive integer")
        for name, arr in (("theta_lower", lo), ("theta_upper", hi)):
            if arr.size != d:
                raise ModelSpecError(name, f"has length {arr.size}, expected {d}")
            if not np.all(np.isfinite(arr)):
                raise ModelSpecError(name, "bounds must be finite")
        if np.any(lo >= hi):
            j = int(np.flatnonzero(lo >= hi)[0])
            raise ModelSpecError(f"theta_lower[{j}]", "must be strictly below theta_upper")
        if len(self.objective.coeffs) != d:
            raise ModelSpecError("objective.coeffs",
                                 f"has length {len(self.objective.coeffs)}, expected {d}")
        seen = set()
        for j, mom in enumerate(self.moments):
            if mom.sense not in ("eq", "leq"):
                raise ModelSpecError(f"moments[{j}].sense", f"unknown sense {mom.sense!r}")
            if len(mom.form.coeffs) != d:
                raise ModelSpecError(f"moments[{j}].coeffs",
                                     f"has length {len(mom.form.coeffs)}, expected {d}")
            if mom.label in seen:
                raise ModelSpecError(f"moments[{j}].label", f"duplicate label {mom.label!r}")
            seen.add(mom.label)

    def __eq__(self, other):
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return (self.d_theta == other.d_theta
                and np.array_equal(self.theta_lower, other.theta_lower)
                and np.array_equal(self.theta_upper, other.theta_upper)
                and self.objective == other.objective
                and self.moments == other.moments)

    @property
    def k(self) -> int:
        return len(self.moments)

    @property
    def labels(self) -> list:
        return [m.label for m in self.moments]

    @property
    def is_eq(self) -> np.ndarray:
        return np.array([m.sense == "eq" for m in self.moments], dtype=bool)

    def columns(self) -> set:
        cols = self.objective.columns()
        for mom in self.moments:
            cols |= mom.form.columns()
        return cols

    def check_columns(self, data: "Dataset") -> None:
        """Raise ``ModelSpecError`` naming the first column missing from ``data``."""
        for where, form in [("objective", self.objective)] + [
                (f"moments[{j}]", m.form) for j, m in enumerate(self.moments)]:
            for slot, src in enumerate(form.coeffs):
                if isinstance(src, str) and src not in data.columns:
                    raise ModelSpecError(f"{where}.coeffs[{slot}]",
                                         f"unknown column {src!r}")
            if isinstance(form.const, str) and form.const not in data.columns:
                raise ModelSpecError(f"{where}.const", f"unknown column {form.const!r}")


@dataclass(frozen=True, eq=False)
class Dataset:
    columns: Mapping[str, np.ndarray]

    def __post_init__(self):
        cols = {}
        n = None
        for name, values in self.columns.items():
            arr = np.asarray(values, dtype=float).reshape(-1)
            if n is None:
                n = arr.size
            elif arr.size != n:
                raise DatasetError(f"column {name!r} has {arr.size} rows, expected {n}")
            if not np.all(np.isfinite(arr)):
                raise DatasetError(f"column {name!r} contains missing or non-finite values")
            arr.setflags(write=False)
            cols[name] = arr
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "_n", n or 0)

    @property
    def n(self) -> int:
        return self._n

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]


def uniform_weights(n: int) -> np.ndarray:
    return np.ones(n)


def check_weights(weights, n: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size != n:
        raise ValueError(f"weights have length {w.size}, expected {n}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and nonnegative")
    if w.sum() <= 0:
        raise ValueError("weights must not all be zero")
    return w


# -- JSON -------------------------------------------------------------------

def _parse_source(obj, field: str) -> Source:
    if not isinstance(obj, dict) or len(obj) != 1 or not ({"col", "lit"} & set(obj)):
        raise ModelSpecError(field, 'expected {"col": name} or {"lit": number}')
    if "col" in obj:
        if not isinstance(obj["col"], str) or not obj["col"]:
            raise ModelSpecError(field, "column name must be a non-empty string")
        return obj["col"]
    val = obj["lit"]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ModelSpecError(field, "literal must be a finite number")
    return float(val)


def _parse_form(obj, field: str, d: int) -> AffineForm:
    if not isinstance(obj, dict):
        raise ModelSpecError(field, "expected an object")
    coeffs = obj.get("coeffs")
    if not isinstance(coeffs, list):
        raise ModelSpecError(f"{field}.coeffs", "expected a list")
    if len(coeffs) != d:
        raise ModelSpecError(f"{field}.coeffs", f"has length {len(coeffs)}, expected {d}")
    srcs = tuple(_parse_source(c, f"{field}.coeffs[{i}]") for i, c in enumerate(coeffs))
    const = _parse_source(obj.get("const", {"lit": 0.0}), f"{field}.const")
    return AffineForm(srcs, const)


def _number_list(doc, key: str):
    vals = doc.get(key)
    if not isinstance(vals, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
        raise ModelSpecError(key, "expected a list of numbers")
    return vals


def model_from_dict(doc: dict, data: Optional[Dataset] = None) -> ModelSpec:
    if not isinstance(doc, dict):
        raise ModelSpecError("<root>", "expected a JSON object")
    d = doc.get("d_theta")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise ModelSpecError("d_theta", "must be a positive integer")
    lo = _number_list(doc, "theta_lower")
    hi = _number_list(doc, "theta_upper")
    if "objective" not in doc:
        raise ModelSpecError("objective", "missing")
    objective = _parse_form(doc["objective"], "objective", d)
    raw = doc.get("moments", [])
    if not isinstance(raw, list):
        raise ModelSpecError("moments", "expected a list")
    moments = []
    for j, m in enumerate(raw):
        field = f"moments[{j}]"
        if not isinstance(m, dict):
            raise ModelSpecError(field, "expected an object")
        label = m.get("label", f"m{j + 1}")
        if not isinstance(label, str):
            raise ModelSpecError(f"{field}.label", "must be a string")
        sense = m.get("sense")
        if sense not in ("eq", "leq"):
            raise ModelSpecError(f"{field}.sense", 'must be "eq" or "leq"')
        moments.append(Moment(label, sense, _parse_form(m, field, d)))
    spec = ModelSpec(d, lo, hi, objective, tuple(moments))
    if data is not None:
        spec.check_columns(data)
    return spec


def parse_model(text: str, data: Optional[Dataset] = None) -> ModelSpec:
    """Parse and validate a JSON model document.

    When ``data`` is given, every referenced column must exist in it.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSpecError("<json>", str(exc)) from exc
    return model_from_dict(doc, data)


def _source_json(src: Source) -> dict:
    return {"col": src} if isinstance(src, str) else {"lit": float(src)}


def model_to_dict(spec: ModelSpec) -> dict:
    def form(f: AffineForm) -> dict:
        return {"coeffs": [_source_json(s) for s in f.coeffs], "const": _source_json(f.const)}

    return {
        "d_theta": int(spec.d_theta),
        "theta_lower": [float(v) for v in spec.theta_lower],
        "theta_upper": [float(v) for v in spec.theta_upper],
        "objective": form(spec.objective),
        "moments": [dict(label=m.label, sense=m.sense, **form(m.form)) for m in spec.moments],
    }


def serialize_model(spec: ModelSpec) -> str:
    return json.dumps(model_to_dict(spec), indent=2)


# -- CSV --------------------------------------------------------------------

def read_csv(source) -> Dataset:
    """Read a dataset from a path or text stream (header row, numeric cells)."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="") as fh:
            return read_csv(fh)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError("empty CSV file") from None
    header = [h.strip() for h in header]
    if len(set(header)) != len(header):
        raise DatasetError("duplicate column names in header")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DatasetError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        try:
            vals = [float(cell) for cell in row]
        except ValueError:
            raise DatasetError(f"line {lineno}: non-numeric cell") from None
        if not all(math.isfinite(v) for v in vals):
            raise DatasetError(f"line {lineno}: non-finite cell")
        rows.append(vals)
    arr = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return Dataset({h: arr[:, i] for i, h in enumerate(header)})


def write_csv(data: Dataset, target=None) -> Optional[str]:
    """Write ``data`` as CSV; returns the text when ``target`` is None."""
    names = list(data.columns)
    buf = io.StringIO() if target is None else None
    fh = buf if buf is not None else open(target, "w", newline="")
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        cols = [data.columns[c] for c in names]
        for i in range(data.n):
            writer.writerow([repr(float(c[i])) for c in cols])
    finally:
        if buf is None:
            fh.close()
    return buf.getvalue() if buf is not None else None


# -- assembly ---------------------------------------------------------------

class CompiledModel:
    """A model bound to a dataset, with index arrays for fast reassembly.

    All referenced columns are stacked into one ``(n, p)`` matrix so that a
    reweighting costs a single matrix-vector product.
    """

    def __init__(self, spec: ModelSpec, data: Dataset):
        spec.check_columns(data)
        self.spec = spec
        self.n = data.n
        names = sorted(spec.columns())
        self.names = names
        self.X = (np.column_stack([data[c] for c in names]) if names
                  else np.zeros((data.n, 0)))
        index = {c: i for i, c in enumerate(names)}
        forms = [spec.objective] + [m.form for m in spec.moments]
        d = spec.d_theta
        nf = len(forms)
        # slot table: rows are forms, columns are d coefficient slots + const
        self.is_col = np.zeros((nf, d + 1), dtype=bool)
        self.col_idx = np.zeros((nf, d + 1), dtype=int)
        self.lit = np.zeros((nf, d + 1))
        for f, form in enumerate(forms):
            for s, src in enumerate(tuple(form.coeffs) + (form.const,)):
                if isinstance(src, str):
                    self.is_col[f, s] = True
                    self.col_idx[f, s] = index[src]
                else:
                    self.lit[f, s] = float(src)
        self.is_eq = spec.is_eq

    def means(self, weights=None) -> np.ndarray:
        """Weighted means of every slot, shape ``(1 + k, d + 1)``."""
        if weights is None:
            colmeans = self.X.mean(axis=0) if self.n else np.zeros(self.X.shape[1])
        else:
            w = check_weights(weights, self.n)
            colmeans = (w @ self.X) / w.sum()
        return np.where(self.is_col, colmeans[self.col_idx] if colmeans.size else 0.0,
                        self.lit)

    def observation_values(self, theta) -> np.ndarray:
        """Per-observation ``psi(W_i, theta)`` and ``m_j(W_i, theta)``, shape ``(n, 1 + k)``."""
        theta = np.asarray(theta, dtype=float)
        d = self.spec.d_theta
        if theta.size != d:
            raise ValueError(f"theta has length {theta.size}, expected {d}")
        nf = self.is_col.shape[0]
        tfull = np.append(theta, 1.0)
        literal = (np.where(self.is_col, 0.0, self.lit) @ tfull)
        V = np.zeros((self.X.shape[1], nf))
        f_idx, s_idx = np.nonzero(self.is_col)
        np.add.at(V, (self.col_idx[f_idx, s_idx], f_idx), tfull[s_idx])
        return self.X @ V + literal

    def lp(self, weights=None, direction: str = LOWER, relaxation: float = 0.0,
           slot_means: Optional[np.ndarray] = None,
           split_eq: Optional[bool] = None) -> LinearProgram:
        spec = self.spec
        if direction not in (LOWER, UPPER):
            raise ValueError(f"direction must be {LOWER!r} or {UPPER!r}")
        if relaxation < 0:
            raise ValueError("relaxation must be nonnegative")
        S = self.means(weights) if slot_means is None else slot_means
        d = spec.d_theta
        c, c0 = S[0, :d], S[0, d]
        G, h = S[1:, :d], S[1:, d]
        A, rhs, rel, labels = constraint_rows(spec, G, h, relaxation, split_eq)
        sense = MINIMIZE if direction == LOWER else MAXIMIZE
        return LinearProgram(c, A, rhs, rel, spec.theta_lower, spec.theta_upper, sense,
                             c0, labels)


def row_map(spec: ModelSpec, relaxation: float, split_eq: Optional[bool] = None) -> tuple:
    """For each LP row: (moment index, sign applied to the moment).

    Equality moments become a ``+``/``-`` pair of rows when ``split_eq`` is
    true, which defaults to ``relaxation > 0``.
    """
    idx, sign = [], []
    split = relaxation > 0 if split_eq is None else split_eq
    for j, mom in enumerate(spec.moments):
        idx.append(j)
        sign.append(1.0)
        if mom.sense == "eq" and split:
            idx.append(j)
            sign.append(-1.0)
    return np.array(idx, dtype=int), np.array(sign)


def constraint_rows(spec: ModelSpec, G: np.ndarray, h: np.ndarray, relaxation: float,
                    split_eq: Optional[bool] = None):
    """Rows ``sign * (G_j @ theta + h_j) <= relaxation`` (or ``== 0``) in LP form."""
    idx, sign = row_map(spec, relaxation, split_eq)
    A = G[idx] * sign[:, None]
    rhs = relaxation - sign * h[idx]
    split = relaxation > 0 if split_eq is None else split_eq
    rel, labels = [], []
    for j, s in zip(idx, sign):
        mom = spec.moments[j]
        if mom.sense == "eq" and not split:
            rel.append("eq")
            labels.append(mom.label)
        else:
            rel.append("leq")
            labels.append(mom.label if s > 0 else f"{mom.label}:neg")
    return A.reshape(len(idx), spec.d_theta), rhs, tuple(rel), tuple(labels)


def build_empirical_lp(spec: ModelSpec, data: Dataset, weights=None,
                       direction: str = LOWER, relaxation: float = 0.0) -> LinearProgram:
    """Assemble the sample bounding LP for ``spec`` under ``weights``.

    ``direction="lower"`` minimizes the weighted-mean objective, ``"upper"``
    maximizes it. With ``relaxation > 0`` every moment is imposed as
    ``mean <= relaxation``; equality moments become a pair of opposite
    inequality rows first so both sides relax.
    """
    return CompiledModel(spec, data).lp(weights, direction, relaxation)


def evaluate_moments(spec: ModelSpec, data: Dataset, weights, theta) -> np.ndarray:
    """Weighted sample moments ``mean_i m_j(W_i, theta)`` for every moment ``j``."""
    cm = CompiledModel(spec, data)
    theta = np.asarray(theta, dtype=float)
    if theta.size != spec.d_theta:
        raise ValueError(f"theta has length {theta.size}, expected {spec.d_theta}")
    S = cm.means(weights)
    return S[1:, :-1] @ theta + S[1:, -1]


def simple_form(coeffs: Sequence[Source], const: Source = 0.0) -> AffineForm:
    """Convenience constructor; numbers become literals, strings columns."""
    conv = tuple(c if isinstance(c, str) else float(c) for c in coeffs)
    return AffineForm(conv, const if isinstance(const, str) else float(const))
