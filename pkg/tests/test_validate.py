"""The discrepancy report machinery."""

import json

import numpy as np
import pytest

from jetlag.monolayer import MonolayerModel, MonolayerParams
from jetlag.validate import (
    FD_RESOLVABLE_CUT,
    dynamic_range_ratio,
    run_validation,
    sample_points,
)


@pytest.fixture(scope="module")
def report():
    return run_validation(seed=0, n_points=40)


def test_deterministic_given_seed(report):
    again = run_validation(seed=0, n_points=40)
    assert report.to_json() == again.to_json()


def test_zero_unexplained(report):
    assert report.n_flagged_unexplained == 0
    assert report.passed()


def test_every_flag_carries_reason(report):
    for rec in report.records:
        if rec.verdict == "flagged":
            assert rec.explanation


def test_exact_forms_ok_at_resolvable_points(report):
    for rec in report.records:
        if rec.oracle is None or rec.quantity.endswith(("printed", "polynomial")):
            continue
        if rec.quantity.startswith(("metricity", "maxwell", "em_", "metric_")):
            continue
        assert rec.rel_err < report.tolerance, rec


def test_json_round_trips(report):
    data = json.loads(report.to_json())
    assert data["summary"]["n_flagged_unexplained"] == 0
    assert data["n_points"] == 40
    assert len(data["records"]) == len(report.records)


def test_negative_control_flags_unexplained():
    rep = run_validation(seed=0, n_points=3, negative_control=True)
    assert rep.n_flagged_unexplained > 0
    assert any(
        r.quantity.startswith("metricity") and r.verdict == "flagged" and not r.explanation
        for r in rep.records
    )


def test_resolvable_sampler():
    model = MonolayerModel(MonolayerParams())
    pts = sample_points(3, 30, resolvable_for=model)
    assert len(pts) == 30
    for pt in pts:
        assert dynamic_range_ratio(model, pt) < FD_RESOLVABLE_CUT


def test_sampler_deterministic():
    a = sample_points(7, 10)
    b = sample_points(7, 10)
    assert all(np.array_equal(x.as_array(), y.as_array()) for x, y in zip(a, b))
