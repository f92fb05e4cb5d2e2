"""Two-sample tests: univariate curve statistics, transport distances,
energy distance and MMD, with permutation or Brownian-bridge calibration."""

import json

import numpy as np

from . import _core

__all__ = [
    "statistic",
    "test",
    "curves",
    "cost_matrix",
    "exact_transport",
    "sinkhorn",
    "bridge_table",
]

__version__ = "0.1.0"


def _as_sample(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def statistic(name, x, y, p=1.0, lam=0.0, gamma=None):
    """Returns (raw, scale); the calibrated value is raw * scale."""
    return _core.statistic(name, _as_sample(x), _as_sample(y), p, lam, gamma)


def test(x, y, stat="ks", *, p=1.0, lam=0.0, gamma=None, alpha=0.05,
         permutations=999, seed=0, calibration="perm", paths=100000,
         grid=2048, threads=0):
    """Runs one calibrated test and returns the report as a dict."""
    out = _core.run_test(_as_sample(x), _as_sample(y), stat, p, lam, gamma,
                         alpha, permutations, seed, calibration, paths, grid,
                         threads)
    return json.loads(out)


def curves(x, y):
    """PP, QQ, ROC and ODC curves of two 1-D samples, plus the AUC."""
    return json.loads(_core.curves(_as_sample(x), _as_sample(y)))


def cost_matrix(x, y, p=1.0):
    return _core.cost_matrix(_as_sample(x), _as_sample(y), p)


def exact_transport(cost):
    """(optimum, plan) of the uniform-marginal transport LP."""
    return _core.exact_transport(np.asarray(cost, dtype=np.float64))


def sinkhorn(cost, lam, tol=1e-9, max_iter=10000):
    return _core.sinkhorn(np.asarray(cost, dtype=np.float64), lam, tol, max_iter)


def bridge_table(kind, paths=100000, grid=2048, seed=0, threads=0):
    """Sorted Monte Carlo draws of a Brownian-bridge functional."""
    return _core.bridge_table(kind, paths, grid, seed, threads)
