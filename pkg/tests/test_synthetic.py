import numpy as np
import pytest

from rbfn.dataset import parse_csv, validate_records
from rbfn.synthetic import (
    HIGH_CLASS,
    LOW_CLASS,
    RANGES,
    REGIMENS,
    SyntheticSpec,
    generate_patients,
    prolong_label,
    records_to_csv,
    regimen_for,
)


def test_label_rule_audit():
    recs = generate_patients(SyntheticSpec(n=500, seed=3))
    assert all(r.prolong == LOW_CLASS for r in recs if r.cd4 < 50)
    assert all(r.prolong == HIGH_CLASS for r in recs if r.cd4 > 100)


def test_mid_range_by_proximity():
    assert prolong_label(60, 50, 100) == LOW_CLASS
    assert prolong_label(90, 50, 100) == HIGH_CLASS
    assert prolong_label(75, 50, 100) == HIGH_CLASS


def test_regimen_tertiles():
    assert [regimen_for(v, 500, 1800) for v in (500, 1000, 1800)] == list(REGIMENS)


def test_single_record_in_range():
    (rec,) = generate_patients(SyntheticSpec(n=1, seed=0))
    for name, (lo, hi) in RANGES.items():
        assert lo <= getattr(rec, name) <= hi
    assert isinstance(rec.age, int)


def test_byte_identical():
    spec = SyntheticSpec(n=50, seed=11, label_noise=0.1)
    assert records_to_csv(generate_patients(spec)) == records_to_csv(generate_patients(spec))


def test_generated_csv_parses_and_validates():
    text = records_to_csv(generate_patients(SyntheticSpec(n=200, seed=2)))
    recs = parse_csv(text)
    assert len(recs) == 200
    assert validate_records(recs) == []
    assert recs == generate_patients(SyntheticSpec(n=200, seed=2))


def test_noise_flips_some_labels():
    clean = generate_patients(SyntheticSpec(n=500, seed=4))
    noisy = generate_patients(SyntheticSpec(n=500, seed=4, label_noise=0.3))
    flipped = np.mean([a.prolong != b.prolong for a, b in zip(clean, noisy)])
    assert 0.2 < flipped < 0.4


@pytest.mark.parametrize("kw", [dict(n=0), dict(label_noise=0.5), dict(cd4_low_threshold=100, cd4_high_threshold=50)])
def test_invalid_spec(kw):
    with pytest.raises(ValueError):
        SyntheticSpec(**kw)
