import numpy as np
import pytest

from latnet import (AdaptiveScale, McmcConfig, PosteriorSamples, fit_distance,
                    gelman_rubin, rw_metropolis_step, sample_inv_gamma)
from latnet.mcmc import chain_rng, target_accept_rate


# -- config -----------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ValueError):
        McmcConfig(n_iter=0)
    with pytest.raises(ValueError):
        McmcConfig(n_iter=10, burn_in=10)
    with pytest.raises(ValueError):
        McmcConfig(n_iter=10, thin=0)


def test_config_n_stored():
    cfg = McmcConfig(n_iter=110, burn_in=10, thin=10)
    assert cfg.n_stored == 10


def test_paper_protocol_defaults():
    cfg = McmcConfig.paper_protocol()
    assert (cfg.n_iter, cfg.burn_in, cfg.thin) == (60_000, 10_000, 1)
    assert cfg.n_stored == 50_000


# -- adaptive scaling -------------------------------------------------------

def test_adaptive_scale_update_rule():
    s = AdaptiveScale(log_step=0.0, target_accept=0.44)
    s.update(True)
    assert s.log_step == pytest.approx((1 - 0.44) / 1 ** 0.6, abs=1e-15)
    s.update(False)
    assert s.log_step == pytest.approx((1 - 0.44) - 0.44 / 2 ** 0.6, abs=1e-15)


def test_target_accept_rates():
    assert target_accept_rate(1) == 0.44
    assert target_accept_rate(2) == 0.35
    assert target_accept_rate(3) == 0.234
    assert target_accept_rate(10) == 0.234


def test_adaptation_reaches_target(rng):
    # standard normal target; acceptance should settle near 0.44
    s = AdaptiveScale(log_step=np.log(50.0), target_accept=0.44)
    x = 0.0
    acc = []
    for i in range(6000):
        x, a = rw_metropolis_step(lambda v: -0.5 * v * v, x, s, rng, adapt=True)
        acc.append(a)
    assert abs(np.mean(acc[-2000:]) - 0.44) < 0.08


# -- Metropolis step --------------------------------------------------------

def test_rw_metropolis_targets_gaussian(rng):
    s = AdaptiveScale(log_step=np.log(2.4))
    x = 0.0
    xs = []
    for _ in range(40000):
        x, _ = rw_metropolis_step(lambda v: -0.5 * (v - 3.0) ** 2, x, s, rng,
                                  adapt=False)
        xs.append(x)
    xs = np.asarray(xs[2000:])
    assert abs(xs.mean() - 3.0) < 0.1
    assert abs(xs.var() - 1.0) < 0.1


def test_rw_metropolis_vector_state(rng):
    s = AdaptiveScale(log_step=0.0)
    x = np.zeros(3)
    new, acc = rw_metropolis_step(lambda v: -0.5 * v @ v, x, s, rng, adapt=False)
    assert new.shape == (3,)


def test_rw_metropolis_rejects_neg_inf_proposal(rng):
    # support (0, inf): proposals below zero must never be accepted
    def lt(v):
        return -v if v > 0 else -np.inf
    s = AdaptiveScale(log_step=np.log(5.0))
    x = 0.5
    for _ in range(500):
        x, _ = rw_metropolis_step(lt, x, s, rng, adapt=False)
        assert x > 0


def test_rw_metropolis_errors_on_bad_current(rng):
    with pytest.raises(ValueError):
        rw_metropolis_step(lambda v: float("nan"), 0.0, AdaptiveScale(), rng)


# -- inverse gamma ----------------------------------------------------------

def test_sample_inv_gamma_moments(rng):
    shape, rate = 5.0, 3.0
    x = np.array([sample_inv_gamma(shape, rate, rng) for _ in range(40000)])
    assert x.mean() == pytest.approx(rate / (shape - 1), rel=0.03)
    assert x.var() == pytest.approx(rate**2 / ((shape - 1) ** 2 * (shape - 2)),
                                    rel=0.10)


# -- Gelman-Rubin -----------------------------------------------------------

def test_gelman_rubin_oracle():
    chains = [np.array([1.0, 2.0, 3.0]), np.array([2.0, 3.0, 4.0])]
    n = 3
    x = np.stack(chains)
    w = x.var(axis=1, ddof=1).mean()
    b = n * x.mean(axis=1).var(ddof=1)
    expected = np.sqrt(((n - 1) / n * w + b / n) / w)
    assert gelman_rubin(chains) == pytest.approx(expected, abs=1e-12)


def test_gelman_rubin_near_one_for_iid(rng):
    chains = [rng.standard_normal(5000) for _ in range(4)]
    assert abs(gelman_rubin(chains) - 1.0) < 0.01


def test_gelman_rubin_detects_disjoint_chains(rng):
    chains = [rng.standard_normal(500), rng.standard_normal(500) + 10]
    assert gelman_rubin(chains) > 3


def test_gelman_rubin_errors():
    with pytest.raises(ValueError):
        gelman_rubin([np.arange(5.0)])
    with pytest.raises(ValueError):
        gelman_rubin([np.ones(10), np.ones(10)])


# -- chain driver -----------------------------------------------------------

def test_chain_rngs_independent():
    a = chain_rng(7, 0).random(5)
    b = chain_rng(7, 1).random(5)
    assert not np.allclose(a, b)
    assert np.allclose(a, chain_rng(7, 0).random(5))


def test_seed_determinism(florentine):
    cfg = McmcConfig(n_iter=120, burn_in=20, n_chains=2, seed=42)
    s1 = fit_distance(florentine, cfg=cfg)
    s2 = fit_distance(florentine, cfg=cfg)
    for c1, c2 in zip(s1.chains, s2.chains):
        assert np.array_equal(c1.log_joint, c2.log_joint)
        for k in c1.params:
            assert np.array_equal(c1.params[k], c2.params[k])


def test_thinning_and_counts(florentine):
    cfg = McmcConfig(n_iter=150, burn_in=50, thin=10, n_chains=1, seed=1)
    s = fit_distance(florentine, cfg=cfg)
    assert s.chains[0].log_joint.shape[0] == 10
    assert s.chains[0].dyad_loglik.shape == (10, s.dyads.shape[0])


def test_loglik_dtype_option(florentine):
    cfg = McmcConfig(n_iter=60, burn_in=10, n_chains=1, seed=1,
                     loglik_dtype="float32")
    s = fit_distance(florentine, cfg=cfg)
    assert s.chains[0].dyad_loglik.dtype == np.float32


def test_parallel_chains_match_serial(florentine):
    kw = dict(n_iter=100, burn_in=20, n_chains=2, seed=9)
    serial = fit_distance(florentine, cfg=McmcConfig(**kw))
    parallel = fit_distance(florentine, cfg=McmcConfig(**kw, n_jobs=2))
    for c1, c2 in zip(serial.chains, parallel.chains):
        assert np.array_equal(c1.log_joint, c2.log_joint)


def test_save_load_roundtrip(tmp_path, florentine):
    cfg = McmcConfig(n_iter=60, burn_in=10, n_chains=2, seed=3)
    s = fit_distance(florentine, cfg=cfg)
    s.save(tmp_path)
    loaded = PosteriorSamples.load(tmp_path)
    assert loaded.model == "distance"
    assert loaded.n_actors == s.n_actors
    assert np.array_equal(loaded.dyads, s.dyads)
    for c1, c2 in zip(s.chains, loaded.chains):
        for k in c1.params:
            assert np.allclose(c1.params[k], c2.params[k], atol=1e-14)
        assert np.allclose(c1.log_joint, c2.log_joint, atol=1e-14)
        assert np.allclose(c1.dyad_loglik, c2.dyad_loglik, atol=1e-14)


def test_rhat_table_keys(florentine):
    cfg = McmcConfig(n_iter=100, burn_in=20, n_chains=2, seed=3)
    s = fit_distance(florentine, cfg=cfg)
    t = s.rhat_table()
    assert {"zeta", "sigma2", "omega2", "log_joint"} <= set(t)
    assert all(np.isfinite(v) for v in t.values())
