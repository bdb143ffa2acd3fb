"""Seeded synthetic patient cohorts and toy geometric datasets."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .dataset import FeatureMatrix, LabelVector, PatientRecord

LOW_CLASS = "<50%"
HIGH_CLASS = ">75%"
REGIMENS = ("ZLN", "ZLE", "SLN 30")  # assigned to low / middle / high TLC tertile

# spans observed in the sample table, widened slightly
RANGES = {
    "age": (20, 45),
    "weight": (30.0, 95.0),
    "cd4": (10.0, 400.0),
    "cd8": (250.0, 1600.0),
    "hb": (7.0, 13.0),
    "tlc": (500.0, 1800.0),
}

CSV_COLUMNS = ("id", "age", "weight", "cd4", "cd8", "hb", "tlc", "first_identified", "regimen", "prolong")


@dataclass(frozen=True)
class SyntheticSpec:
    n: int = 500
    seed: int = 0
    cd4_low_threshold: float = 50.0
    cd4_high_threshold: float = 100.0
    label_noise: float = 0.0
    ranges: dict = field(default_factory=lambda: dict(RANGES))

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.cd4_low_threshold < self.cd4_high_threshold:
            raise ValueError("cd4_low_threshold must be below cd4_high_threshold")
        if not 0 <= self.label_noise < 0.5:
            raise ValueError("label_noise must be in [0, 0.5)")


def prolong_label(cd4: float, low: float, high: float) -> str:
    if cd4 < low:
        return LOW_CLASS
    if cd4 > high:
        return HIGH_CLASS
    # gap between thresholds: nearer threshold wins, midpoint goes high
    return LOW_CLASS if cd4 - low < high - cd4 else HIGH_CLASS


def regimen_for(tlc: float, lo: float, hi: float) -> str:
    band = min(int(3 * (tlc - lo) / (hi - lo)), 2)
    return REGIMENS[max(band, 0)]


def generate_patients(spec: SyntheticSpec = SyntheticSpec()) -> list[PatientRecord]:
    rng = np.random.default_rng(spec.seed)
    r = spec.ranges
    n = spec.n
    age = rng.integers(r["age"][0], r["age"][1] + 1, size=n)
    weight = np.round(rng.uniform(*r["weight"], size=n), 1)
    cd4 = np.round(rng.uniform(*r["cd4"], size=n))
    cd8 = np.round(rng.uniform(*r["cd8"], size=n))
    hb = np.round(rng.uniform(*r["hb"], size=n), 1)
    tlc = np.round(rng.uniform(*r["tlc"], size=n))
    flip = rng.random(n) < spec.label_noise
    records = []
    for i in range(n):
        label = prolong_label(cd4[i], spec.cd4_low_threshold, spec.cd4_high_threshold)
        if flip[i]:
            label = HIGH_CLASS if label == LOW_CLASS else LOW_CLASS
        records.append(
            PatientRecord(
                id=f"S{i + 1:04d}",
                age=int(age[i]),
                weight=float(weight[i]),
                cd4=float(cd4[i]),
                cd8=float(cd8[i]),
                hb=float(hb[i]),
                tlc=float(tlc[i]),
                regimen=regimen_for(tlc[i], *r["tlc"]),
                prolong=label,
            )
        )
    return records


def _fmt(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return "" if v is None else str(v)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        w.writerow([_fmt(getattr(rec, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def ring_data(n: int = 500, seed: int = 0, d: int = 2) -> tuple[FeatureMatrix, LabelVector]:
    """Class 1 inside the median-radius ball, class 0 outside; not linearly separable."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    r = np.linalg.norm(x, axis=1)
    y = (r < np.median(r)).astype(int)
    return FeatureMatrix(x, tuple(f"x{i}" for i in range(d))), LabelVector(y, ("outside", "inside"))


def separable_data(n: int = 500, seed: int = 0, d: int = 2, margin: float = 0.5) -> tuple[FeatureMatrix, LabelVector]:
    """Two classes split by a random hyperplane with an empty band of width 2*margin."""
    rng = np.random.default_rng(seed)
    normal = rng.standard_normal(d)
    normal /= np.linalg.norm(normal)
    x = rng.standard_normal((n, d)) * 2.0
    side = x @ normal
    y = (side > 0).astype(int)
    x = x + np.outer(np.where(y == 1, margin, -margin), normal)
    return FeatureMatrix(x, tuple(f"x{i}" for i in range(d))), LabelVector(y, ("neg", "pos"))
