"""Patient record parsing, feature/target encoding and median/IQR scaling."""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

NUMERIC_FIELDS = ("age", "weight", "cd4", "cd8", "hb", "tlc")
REQUIRED_FIELDS = ("id",) + NUMERIC_FIELDS
OPTIONAL_FIELDS = ("first_identified", "regimen", "prolong")
CATEGORICAL_FIELDS = ("regimen", "prolong")
TARGETS = ("prolong", "regimen")

# role -> CSV column name
DEFAULT_SCHEMA: dict[str, str] = {name: name for name in REQUIRED_FIELDS + OPTIONAL_FIELDS}

MAX_PROTOCOL_AGE = 45


class SchemaError(ValueError):
    """A required CSV column is missing."""


class RowError(ValueError):
    """A data row could not be converted into a PatientRecord."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class PatientRecord:
    id: str
    age: int
    weight: float
    cd4: float
    cd8: float
    hb: float
    tlc: float
    first_identified: str | None = None
    regimen: str | None = None
    prolong: str | None = None

    def get(self, name: str):
        return getattr(self, name)


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    feature_names: tuple[str, ...]
    # categorical source column -> ordered levels (first level is the reference)
    levels: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"feature matrix must be 2-D, got shape {values.shape}")
        if values.shape[1] != len(self.feature_names):
            raise ValueError(
                f"{values.shape[1]} columns but {len(self.feature_names)} feature names"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("feature matrix contains non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def take(self, rows) -> "FeatureMatrix":
        return FeatureMatrix(self.values[np.asarray(rows, dtype=int)], self.feature_names, self.levels)


@dataclass(frozen=True)
class LabelVector:
    indices: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        if len(self.class_names) < 2:
            raise ValueError("need at least two classes")
        if idx.size and (idx.min() < 0 or idx.max() >= len(self.class_names)):
            raise ValueError("label index out of range")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def take(self, rows) -> "LabelVector":
        return LabelVector(self.indices[np.asarray(rows, dtype=int)], self.class_names)


@dataclass(frozen=True)
class Scaler:
    medians: np.ndarray
    iqrs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "medians", np.asarray(self.medians, dtype=float))
        object.__setattr__(self, "iqrs", np.asarray(self.iqrs, dtype=float))
        if np.any(self.iqrs < 0):
            raise ValueError("iqrs must be non-negative")

    @property
    def dim(self) -> int:
        return self.medians.shape[0]


def fixture_path() -> Path:
    """Path of the bundled 10-patient fixture."""
    return Path(str(resources.files("rbfn") / "fixtures" / "patients10.csv"))


def _parse_number(raw: str, name: str, row: int, integer: bool = False):
    text = raw.strip()
    try:
        value = float(text)
    except ValueError:
        raise RowError(row, f"column {name!r}: {raw!r} is not a number") from None
    if not math.isfinite(value):
        raise RowError(row, f"column {name!r}: non-finite value {raw!r}")
    if integer:
        if value != int(value):
            raise RowError(row, f"column {name!r}: {raw!r} is not an integer")
        return int(value)
    return value


def parse_csv(text: str | io.TextIOBase, schema: Mapping[str, str] | None = None) -> list[PatientRecord]:
    """Parse CSV text (or an open stream) into patient records.

    ``schema`` maps a field role (``"cd4"``) to its header name in the file.
    Columns not mentioned in the schema are ignored.
    """
    schema = {**DEFAULT_SCHEMA, **(schema or {})}
    stream = io.StringIO(text) if isinstance(text, str) else text
    reader = csv.reader(stream)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaError("missing header row") from None
    position = {name: i for i, name in enumerate(header)}
    for role in REQUIRED_FIELDS:
        if schema[role] not in position:
            raise SchemaError(f"missing required column {schema[role]!r}")

    records = []
    # row numbers count the header as row 1
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            row = row + [""] * (len(header) - len(row))

        def cell(role):
            return row[position[schema[role]]]

        rid = cell("id").strip()
        if not rid:
            raise RowError(row_no, "empty id")
        values = {
            name: _parse_number(cell(name), schema[name], row_no, integer=(name == "age"))
            for name in NUMERIC_FIELDS
        }
        _check_signs(values, row_no)
        optional = {}
        for role in OPTIONAL_FIELDS:
            col = schema[role]
            raw = row[position[col]].strip() if col in position else ""
            optional[role] = raw or None
        records.append(PatientRecord(id=rid, **values, **optional))
    return records


def _check_signs(values: Mapping[str, float], row_no: int) -> None:
    for name in ("age", "weight", "hb", "tlc"):
        if values[name] <= 0:
            raise RowError(row_no, f"{name} must be positive, got {values[name]}")
    for name in ("cd4", "cd8"):
        if values[name] < 0:
            raise RowError(row_no, f"{name} must be non-negative, got {values[name]}")


def read_csv(path: str | Path, schema: Mapping[str, str] | None = None) -> list[PatientRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_csv(fh, schema)


def validate_records(records: Iterable[PatientRecord], max_age: int = MAX_PROTOCOL_AGE) -> list[str]:
    """Return protocol warnings (also emitted via :mod:`warnings`).

    Over-age patients are flagged, not rejected.
    """
    issues = []
    for rec in records:
        if rec.age > max_age:
            issues.append(f"patient {rec.id}: age {rec.age} exceeds protocol maximum {max_age}")
    for msg in issues:
        warnings.warn(msg, stacklevel=2)
    return issues


def _levels_for(records: Sequence[PatientRecord], name: str) -> tuple[str, ...]:
    missing = [r.id for r in records if r.get(name) is None]
    if missing:
        raise ValueError(f"records missing categorical feature {name!r}: {', '.join(missing)}")
    return tuple(sorted({r.get(name) for r in records}))


def encode_features(
    records: Sequence[PatientRecord],
    feature_set: Sequence[str] = NUMERIC_FIELDS,
    levels: Mapping[str, Sequence[str]] | None = None,
) -> FeatureMatrix:
    """Numeric columns as-is; categorical columns as N-1 dummies.

    Pass the ``levels`` of a training matrix to encode new records consistently.
    """
    unknown = [f for f in feature_set if f not in NUMERIC_FIELDS + CATEGORICAL_FIELDS]
    if unknown:
        raise ValueError(f"unknown features: {unknown}")
    if not feature_set:
        raise ValueError("empty feature set")
    levels = {k: tuple(v) for k, v in (levels or {}).items()}
    names: list[str] = []
    columns: list[np.ndarray] = []
    for feat in feature_set:
        if feat in NUMERIC_FIELDS:
            names.append(feat)
            columns.append(np.array([float(r.get(feat)) for r in records], dtype=float))
            continue
        if feat not in levels:
            levels[feat] = _levels_for(records, feat)
        lv = levels[feat]
        observed = [r.get(feat) for r in records]
        unseen = sorted({v for v in observed if v not in lv})
        if unseen:
            raise ValueError(f"feature {feat!r}: unseen levels {unseen}; known {list(lv)}")
        for level in lv[1:]:
            names.append(f"{feat}={level}")
            columns.append(np.array([1.0 if v == level else 0.0 for v in observed]))
    values = np.column_stack(columns) if records else np.empty((0, len(names)))
    used = {k: v for k, v in levels.items() if k in feature_set}
    return FeatureMatrix(values, tuple(names), used)


def encode_labels(
    records: Sequence[PatientRecord], target: str, class_names: Sequence[str] | None = None
) -> LabelVector:
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}, got {target!r}")
    missing = [r.id for r in records if r.get(target) is None]
    if missing:
        raise ValueError(f"records missing target {target!r}: {', '.join(missing)}")
    labels = [r.get(target) for r in records]
    names = tuple(class_names) if class_names is not None else tuple(sorted(set(labels)))
    lookup = {name: i for i, name in enumerate(names)}
    unseen = sorted(set(labels) - lookup.keys())
    if unseen:
        raise ValueError(f"unknown target labels {unseen}")
    return LabelVector(np.array([lookup[l] for l in labels], dtype=int), names)


def encode(
    records: Sequence[PatientRecord],
    target: str = "prolong",
    feature_set: Sequence[str] = NUMERIC_FIELDS,
) -> tuple[FeatureMatrix, LabelVector]:
    if target in feature_set:
        raise ValueError(f"target {target!r} cannot also be a feature")
    labels = encode_labels(records, target)
    return encode_features(records, feature_set), labels


def fit_scaler(m: FeatureMatrix | np.ndarray) -> Scaler:
    """Per-column median and IQR (quartiles by linear interpolation at p*(N-1))."""
    x = np.asarray(getattr(m, "values", m), dtype=float)
    if x.shape[0] < 1:
        raise ValueError("cannot fit scaler on empty matrix")
    q1, med, q3 = np.quantile(x, [0.25, 0.5, 0.75], axis=0, method="linear")
    return Scaler(medians=med, iqrs=np.maximum(q3 - q1, 0.0))


def transform(s: Scaler, m: FeatureMatrix | np.ndarray):
    """Standardize; a zero IQR column is only centred. Returns the input's type."""
    x = np.asarray(getattr(m, "values", m), dtype=float)
    if x.ndim == 1:
        if x.shape[0] != s.dim:
            raise ValueError(f"expected {s.dim} features, got {x.shape[0]}")
    elif x.shape[1] != s.dim:
        raise ValueError(f"expected {s.dim} features, got {x.shape[1]}")
    divisor = np.where(s.iqrs > 0, s.iqrs, 1.0)
    out = (x - s.medians) / divisor
    if isinstance(m, FeatureMatrix):
        return FeatureMatrix(out, m.feature_names, m.levels)
    return out
