import math

import numpy as np
import pytest

import twosample


def test_ks_statistic():
    raw, scale = twosample.statistic("ks", [0.0, 1.0, 2.0], [0.5, 1.5, 2.5, 3.5])
    assert raw == pytest.approx(0.5)
    assert scale == pytest.approx(math.sqrt(12 / 7))


def test_energy_on_points():
    x = np.array([[0.0, 0.0]])
    y = np.array([[3.0, 4.0]])
    raw, scale = twosample.statistic("energy", x, y)
    assert raw == pytest.approx(10.0)
    assert scale == 1.0


def test_permutation_report():
    rng = np.random.default_rng(1)
    x = rng.normal(size=40)
    y = rng.normal(loc=2.0, size=40)
    rep = twosample.test(x, y, "energy", permutations=199, seed=3)
    assert rep["reject"] is True
    assert rep["p_value"] == pytest.approx(1 / 200)
    again = twosample.test(x, y, "energy", permutations=199, seed=3)
    assert again == rep


def test_transport_lp_matches_sorted_matching():
    x = np.array([0.0, 3.0, 1.0])
    y = np.array([2.0, 5.0, 4.0])
    opt, plan = twosample.exact_transport(twosample.cost_matrix(x, y, 1.0))
    # sorted matching: |0-2| + |1-4| + |3-5|
    assert opt == pytest.approx(7.0 / 3.0)
    assert plan.sum(axis=1) == pytest.approx(np.full(3, 1 / 3))


def test_sinkhorn_between_zero_and_lp():
    rng = np.random.default_rng(5)
    cost = twosample.cost_matrix(rng.uniform(size=(6, 2)), rng.uniform(size=(5, 2)))
    opt, _ = twosample.exact_transport(cost)
    sol = twosample.sinkhorn(cost, 50.0 / cost.max())
    assert sol["converged"]
    assert opt - 1e-9 <= sol["cost"] <= cost.mean() + 1e-9


def test_curves_auc():
    out = twosample.curves([1.0, 2.0], [0.0, 3.0])
    assert out["roc"]["auc"] == pytest.approx(0.5)


def test_bridge_table_sorted():
    t = twosample.bridge_table("bridge_l2", paths=2000, grid=1024, seed=2)
    assert len(t) == 2000
    assert np.all(np.diff(t) >= 0)
    assert t.mean() == pytest.approx(1 / 6, abs=0.02)


def test_errors_surface_as_value_error():
    with pytest.raises(ValueError):
        twosample.statistic("nope", [0.0], [1.0])
    with pytest.raises(ValueError):
        twosample.test([0.0, 1.0], [2.0, 3.0], "energy", calibration="asymp")
