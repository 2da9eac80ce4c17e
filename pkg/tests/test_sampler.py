import numpy as np
import pytest

from vnmlab import core_hilbert as ch
from vnmlab import probe as pr
from vnmlab import sampler as sm
from vnmlab import single_meas as sg
from vnmlab import successive_meas as sc
from vnmlab import tomography as tm
from vnmlab.errors import NegativeDensity, TooFewSamples


def _pair2():
    return ch.make_basis_pair(np.eye(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def test_sampling_reproduces_separable_gaussian_moments():
    g1 = np.linspace(-8, 8, 801)
    g2 = np.linspace(-6, 10, 801)
    d1 = np.exp(-(g1 - 1.0) ** 2 / 2)
    d2 = np.exp(-(g2 - 2.0) ** 2 / (2 * 0.25))
    dens = np.outer(d1, d2)
    samples = sm.sample_joint_density(dens, g1, g2, 200000, seed=3)
    assert abs(samples[:, 0].mean() - 1.0) < 0.02
    assert abs(samples[:, 1].mean() - 2.0) < 0.01
    assert abs(samples[:, 0].std() - 1.0) < 0.02
    assert abs(samples[:, 1].std() - 0.5) < 0.01


def test_sampling_is_reproducible_and_rejects_negative_density():
    g = np.linspace(-1, 1, 11)
    dens = np.ones((11, 11))
    a = sm.sample_joint_density(dens, g, g, 100, seed=9)
    b = sm.sample_joint_density(dens, g, g, 100, seed=9)
    assert np.array_equal(a, b)
    dens[0, 0] = -0.5
    with pytest.raises(NegativeDensity):
        sm.sample_joint_density(dens, g, g, 100, seed=9)


def test_estimate_correlation_basics():
    samples = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    est = sm.estimate_correlation(samples, "q1q2")
    prods = samples[:, 0] * samples[:, 1]
    assert est.mean == pytest.approx(prods.mean())
    assert est.std_error == pytest.approx(prods.std(ddof=1) / np.sqrt(3))
    with pytest.raises(TooFewSamples):
        sm.estimate_correlation(samples[:1])
    with pytest.raises(ValueError):
        sm.estimate_correlation(samples, "nope")


def test_momentum_position_density_first_moment_matches_closed_form():
    rho = ch.random_density(2, 44)
    a = ch.random_observable(2, 45)
    b = ch.random_observable(2, 46)
    p1 = pr.GaussianProbe(1.0)
    p2 = pr.GaussianProbe(0.8)
    eps1, eps2 = 0.9, 1.1
    pg = np.linspace(-6, 6, 1201)
    qg = np.linspace(-12, 12, 1201)
    dens = sm.momentum_position_density(rho, a, b, p1, p2, eps1, eps2, pg, qg)
    dp, dq = pg[1] - pg[0], qg[1] - qg[0]
    assert abs(dens.sum() * dp * dq - 1.0) < 1e-6
    p1q2 = float((np.outer(pg, qg) * dens).sum() * dp * dq)
    closed = eps1 * eps2 * sc.corr_pq(rho, a, b, p1, eps1)
    assert abs(p1q2 - closed) < 1e-6


def test_sampled_correlation_error_scales_with_ensemble_size():
    rho = ch.random_density(2, 50)
    bp = _pair2()
    probe = pr.GaussianProbe(1.0)
    _, err_small = sm.ensemble_tomography(rho, bp, probe, probe, 1.0, 1.0,
                                          1000, seed=1)
    _, err_large = sm.ensemble_tomography(rho, bp, probe, probe, 1.0, 1.0,
                                          16000, seed=1)
    ratio = err_small["x"].mean() / err_large["x"].mean()
    assert 2.5 < ratio < 6.5  # expect about sqrt(16) = 4


def test_ensemble_tomography_is_unbiased_within_errors():
    rho = ch.random_density(2, 60)
    bp = _pair2()
    probe = pr.GaussianProbe(1.0)
    cs, errs = sm.ensemble_tomography(rho, bp, probe, probe, 1.0, 1.0,
                                      50000, seed=4)
    exact = tm.simulate_correlations(rho, bp, probe, 1.0)
    assert np.all(np.abs(cs.x - exact.x) < 5 * errs["x"])
    assert np.all(np.abs(cs.y_tilde - exact.y_tilde) < 5 * errs["y_tilde"])


def test_ensemble_tomography_rejects_tiny_ensembles():
    rho = ch.random_density(2, 61)
    probe = pr.GaussianProbe(1.0)
    with pytest.raises(TooFewSamples):
        sm.ensemble_tomography(rho, _pair2(), probe, probe, 1.0, 1.0, 10, seed=0)
