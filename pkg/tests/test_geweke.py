"""Sanity checks of the joint-distribution test harness itself; the full
sampler-correctness runs live in the acceptance suite."""

import numpy as np
import pytest

from latnet.distance import DistanceHyper, DistanceModel
from latnet.geweke import (geweke_z_scores, marginal_conditional,
                           successive_conditional)


@pytest.fixture(scope="module")
def model():
    # finite prior variances so moment comparisons are meaningful
    return DistanceModel(DistanceHyper(n_dims=2, a_sigma=5, b_sigma=4,
                                       a_omega=5, b_omega=4))


def test_marginal_simulator_matches_prior_moments(model):
    draws = marginal_conditional(model, 5, 30000, seed=0)
    # sigma2 ~ inverse-gamma(5, 4): mean 1, variance 1/3
    assert draws["sigma2"].mean() == pytest.approx(1.0, abs=0.05)
    assert draws["sigma2"].var() == pytest.approx(1 / 3, abs=0.05)
    # zeta | omega2 ~ N(0, omega2), omega2 mean 1 => Var(zeta) = E[omega2] = 1
    assert draws["zeta"].mean() == pytest.approx(0.0, abs=0.05)
    assert draws["zeta"].var() == pytest.approx(1.0, abs=0.1)


def test_successive_simulator_runs(model):
    draws = successive_conditional(model, 5, 500, seed=1)
    assert draws["zeta"].shape == (500,)
    assert np.isfinite(draws["sigma2"]).all()


def test_z_scores_flag_shifted_distribution(rng):
    a = {"x": rng.standard_normal(20000)}
    b = {"x": rng.standard_normal(20000) + 0.5}
    z = geweke_z_scores(a, b)
    assert abs(z["x"]["z_mean"]) > 5


def test_z_scores_pass_identical_distribution(rng):
    a = {"x": rng.standard_normal(20000)}
    b = {"x": rng.standard_normal(20000)}
    z = geweke_z_scores(a, b)
    assert abs(z["x"]["z_mean"]) < 3
    assert abs(z["x"]["z_second"]) < 3
