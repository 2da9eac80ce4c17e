"""Finite-ensemble Monte Carlo emulation of the two-probe detection procedure.

Draws pointer outcomes from the tabulated joint densities (inverse-CDF over
grid cells with uniform in-cell jitter), forms sample-mean correlations with
statistical errors, and assembles a noisy CorrelationSet for the tomography
inversion.  All randomness flows from an explicit 64-bit seed; per-setting
streams are derived with SeedSequence spawn keys, so settings are
independent and the whole pipeline is reproducible.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NegativeDensity, TooFewSamples
from .probe import momentum_density, position_density
from .single_meas import two_outcome_observable
from .successive_meas import joint_pointer_density, _sandwich_traces
from .tomography import CorrelationSet

DEFAULT_CELLS = 1024


def sample_joint_density(density, q1_grid, q2_grid, n, seed):
    """Draw n (q1, q2) pairs from a non-negative 2D table by inverse CDF.

    A grid cell is picked by its cumulative weight, then the point is
    jittered uniformly inside the cell.
    """
    density = np.asarray(density, dtype=float)
    if density.min() < -1e-9:
        raise NegativeDensity(
            f"density has negative entries down to {density.min():.3e}")
    w = np.clip(density, 0.0, None).ravel()
    total = w.sum()
    if total <= 0:
        raise NegativeDensity("density has no positive mass")
    cdf = np.cumsum(w) / total
    rng = np.random.default_rng(seed)
    cells = np.searchsorted(cdf, rng.random(n), side="right")
    i1, i2 = np.unravel_index(cells, density.shape)
    d1 = q1_grid[1] - q1_grid[0]
    d2 = q2_grid[1] - q2_grid[0]
    q1 = q1_grid[i1] + (rng.random(n) - 0.5) * d1
    q2 = q2_grid[i2] + (rng.random(n) - 0.5) * d2
    return np.column_stack([q1, q2])


@dataclass(frozen=True)
class EnsembleResult:
    n_samples: int
    mean: float
    std_error: float
    seed: int


def estimate_correlation(samples, mode="q1q2", seed=0):
    """Sample mean of q1*q2 (or a single coordinate) with its standard error."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] < 2:
        raise TooFewSamples("need at least 2 samples")
    if mode == "q1q2":
        vals = samples[:, 0] * samples[:, 1]
    elif mode == "q1":
        vals = samples[:, 0]
    elif mode == "q2":
        vals = samples[:, 1]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    n = len(vals)
    return EnsembleResult(n_samples=n, mean=float(vals.mean()),
                          std_error=float(vals.std(ddof=1) / np.sqrt(n)),
                          seed=seed)


def momentum_position_density(rho, a_obs, b_obs, probe1, probe2,
                              epsilon1, epsilon2, p1_grid, q2_grid):
    """Joint density of (P1, Q2) after both couplings (Gaussian probe 1).

    In the momentum representation the first coupling only multiplies the
    probe-1 wavefunction by a phase, so the P1 marginal keeps the initial
    envelope |chi~(P1)|^2 modulated by exp(-i eps1 (a_n - a_n') P1) cross
    terms; validated against the closed-form <P1 Q2> in the test suite.
    """
    p1_grid = np.asarray(p1_grid, dtype=float)
    q2_grid = np.asarray(q2_grid, dtype=float)
    t = _sandwich_traces(rho, a_obs, b_obs)
    a = a_obs.eigenvalues
    envelope = momentum_density(probe1, p1_grid)
    dens2 = [position_density(probe2, q2_grid - epsilon2 * b)
             for b in b_obs.eigenvalues]
    out = np.zeros((len(p1_grid), len(q2_grid)), dtype=complex)
    na = len(a)
    for m in range(len(b_obs.eigenvalues)):
        probe1_part = np.zeros(len(p1_grid), dtype=complex)
        for n in range(na):
            for np_ in range(na):
                phase = np.exp(-1j * epsilon1 * (a[n] - a[np_]) * p1_grid)
                probe1_part += t[m, n, np_] * phase
        out += np.outer(probe1_part * envelope, dens2[m])
    return out.real


def _setting_seed(seed, k, mu, which):
    return np.random.SeedSequence(entropy=seed, spawn_key=(k, mu, which))


def ensemble_tomography(rho, bp, probe1, probe2, epsilon1, epsilon2,
                        n_per_setting, seed, cells=DEFAULT_CELLS):
    """Sampled correlation tables x^, y~^ for every (k, mu) projector pair.

    Independent ensembles per setting and per correlation type.  Returns the
    noisy CorrelationSet together with matching tables of standard errors.
    """
    if n_per_setting < 100:
        raise TooFewSamples("need at least 100 samples per setting")
    n_dim = bp.dim
    s1, s2 = probe1.sigma_q, probe2.sigma_q
    sp1 = probe1.sigma_p
    x = np.empty((n_dim, n_dim))
    y_tilde = np.empty((n_dim, n_dim))
    x_err = np.empty((n_dim, n_dim))
    y_err = np.empty((n_dim, n_dim))
    q1_grid = np.linspace(min(0, epsilon1) - 7 * s1,
                          max(0, epsilon1) + 7 * s1, cells)
    q2_grid = np.linspace(min(0, epsilon2) - 7 * s2,
                          max(0, epsilon2) + 7 * s2, cells)
    p1_grid = np.linspace(-8 * sp1, 8 * sp1, cells)
    for k in range(n_dim):
        a_obs = two_outcome_observable(bp.projector_k(k))
        for mu in range(n_dim):
            b_obs = two_outcome_observable(bp.projector_mu(mu))

            dens_qq = joint_pointer_density(
                rho, a_obs, b_obs, probe1, probe2,
                epsilon1, epsilon2, q1_grid, q2_grid)
            samples = sample_joint_density(
                dens_qq, q1_grid, q2_grid, n_per_setting,
                _setting_seed(seed, k, mu, 0))
            est = estimate_correlation(samples, "q1q2")
            x[mu, k] = est.mean / (epsilon1 * epsilon2)
            x_err[mu, k] = est.std_error / (epsilon1 * epsilon2)

            dens_pq = momentum_position_density(
                rho, a_obs, b_obs, probe1, probe2,
                epsilon1, epsilon2, p1_grid, q2_grid)
            samples = sample_joint_density(
                dens_pq, p1_grid, q2_grid, n_per_setting,
                _setting_seed(seed, k, mu, 1))
            est = estimate_correlation(samples, "q1q2")
            scale = epsilon1 * epsilon2 * 2 * sp1**2
            y_tilde[mu, k] = est.mean / scale
            y_err[mu, k] = est.std_error / scale

    cs = CorrelationSet(basis_pair=bp, epsilon1=epsilon1, sigma_q1=s1,
                        x=x, y_tilde=y_tilde)
    return cs, {"x": x_err, "y_tilde": y_err}
