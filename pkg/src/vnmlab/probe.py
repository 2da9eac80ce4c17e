"""One-dimensional pointer states and their characteristic functions.

A probe is either a closed-form centered Gaussian or a complex wavefunction
tabulated on a uniform grid.  The three functions of the shift variable beta
consumed by the measurement formulas are

    g(beta)            = <exp(-i beta P)>               (momentum char. fn)
    lambda(beta)       = g(beta) + 2 h(beta),
        h(beta)        = (1/beta) int chi*(Q + beta/2) Q chi(Q - beta/2) dQ
    lambda~(beta)      = lbar(beta) / lbar(0),  lbar(beta) = (1/beta) dg/dbeta

For a pure Gaussian all three coincide with g(beta) = exp(-beta^2 / 8 sigma^2).
Free evolution and momentum boosts (for the Stern-Gerlach scenario) act on
grid probes only.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryLeak, DegenerateProbe

# h(beta) and lambda~(beta) switch to their beta -> 0 limits below this.
_BETA_EPS = 1e-10


@dataclass(frozen=True)
class GaussianProbe:
    """Minimum-uncertainty Gaussian centered at Q = 0 with position spread sigma_q."""

    sigma_q: float

    def __post_init__(self):
        if self.sigma_q <= 0:
            raise ValueError("sigma_q must be > 0")

    @property
    def sigma_p(self):
        return 1.0 / (2.0 * self.sigma_q)


@dataclass(frozen=True)
class GridProbe:
    """Complex wavefunction on a uniform grid of a power-of-two size."""

    q_min: float
    q_max: float
    n_points: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = self.n_points
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError("n_points must be a power of two")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (n,):
            raise ValueError("amplitudes length must equal n_points")
        dq = (self.q_max - self.q_min) / n
        norm = np.sum(np.abs(amps) ** 2) * dq
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"wavefunction norm {norm} deviates from 1 beyond 1e-8")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dq(self):
        return (self.q_max - self.q_min) / self.n_points

    @property
    def q(self):
        return self.q_min + self.dq * np.arange(self.n_points)

    def density(self):
        return np.abs(self.amplitudes) ** 2


def gaussian_grid_probe(sigma_q, q_min, q_max, n_points, center=0.0):
    """Sample the centered Gaussian amplitude on a grid (helper for tests/CLI)."""
    dq = (q_max - q_min) / n_points
    q = q_min + dq * np.arange(n_points)
    amps = np.exp(-((q - center) ** 2) / (4 * sigma_q**2)).astype(complex)
    amps /= np.sqrt(np.sum(np.abs(amps) ** 2) * dq)
    return GridProbe(q_min, q_max, n_points, amps)


def _interp_amplitudes(probe, q_new):
    """Probe amplitude evaluated at arbitrary points, zero outside the grid."""
    q = probe.q
    re = np.interp(q_new, q, probe.amplitudes.real, left=0.0, right=0.0)
    im = np.interp(q_new, q, probe.amplitudes.imag, left=0.0, right=0.0)
    return re + 1j * im


def sigma_estimate(probe):
    """Position spread: exact for Gaussians, grid second moment otherwise."""
    if isinstance(probe, GaussianProbe):
        return probe.sigma_q
    q = probe.q
    dens = probe.density()
    dq = probe.dq
    mean = np.sum(q * dens) * dq
    var = np.sum((q - mean) ** 2 * dens) * dq
    return float(np.sqrt(max(var, 0.0)))


def mean_position(probe):
    if isinstance(probe, GaussianProbe):
        return 0.0
    return float(np.sum(probe.q * probe.density()) * probe.dq)


def check_centered(probe):
    """The lambda-function formulas assume <Q> = 0 in the initial probe state."""
    if isinstance(probe, GaussianProbe):
        return
    tol = 1e-8 * max(1.0, sigma_estimate(probe))
    m = mean_position(probe)
    if abs(m) > tol:
        raise ValueError(f"probe is not centered: <Q> = {m:.3e} exceeds {tol:.1e}")


def _fft_momentum_density(probe):
    """(k, |chi~(k)|^2, dk) of a grid probe via FFT (packet assumed contained)."""
    k = 2 * np.pi * np.fft.fftfreq(probe.n_points, d=probe.dq)
    psi_k = np.fft.fft(probe.amplitudes) * probe.dq / np.sqrt(2 * np.pi)
    dk = 2 * np.pi / (probe.n_points * probe.dq)
    return k, np.abs(psi_k) ** 2, dk


def char_g(probe, beta):
    """g(beta) = <exp(-i beta P)> = int |chi~(p)|^2 exp(-i beta p) dp."""
    if isinstance(probe, GaussianProbe):
        return complex(np.exp(-(beta**2) / (8 * probe.sigma_q**2)))
    k, dens, dk = _fft_momentum_density(probe)
    return complex(np.sum(dens * np.exp(-1j * beta * k)) * dk)


def _h_integral(probe, beta):
    q = probe.q
    left = _interp_amplitudes(probe, q + beta / 2)
    right = _interp_amplitudes(probe, q - beta / 2)
    return complex(np.trapezoid(left.conj() * q * right, dx=probe.dq)) / beta


def lambda_fn(probe, beta):
    """lambda(beta) = g(beta) + 2 h(beta); exactly 1 at beta = 0 (centered probe)."""
    if isinstance(probe, GaussianProbe):
        # h vanishes for a real centered Gaussian.
        return char_g(probe, beta)
    check_centered(probe)
    if abs(beta) < _BETA_EPS:
        return 1.0 + 0.0j
    return char_g(probe, beta) + 2.0 * _h_integral(probe, beta)


def lambda_tilde_fn(probe, beta):
    """lambda~(beta) = [(1/beta) g'(beta)] / [g''(0)]; 1 at beta = 0.

    In momentum space g'(beta) = -i int p |chi~(p)|^2 exp(-i beta p) dp and
    g''(0) = -<P^2>, so both derivatives come out of one quadrature.
    """
    if isinstance(probe, GaussianProbe):
        return char_g(probe, beta)
    check_centered(probe)
    if abs(beta) < _BETA_EPS:
        return 1.0 + 0.0j
    k, dens, dk = _fft_momentum_density(probe)
    lbar0 = -np.sum(k**2 * dens) * dk  # g''(0)
    if abs(lbar0) < 1e-12:
        raise DegenerateProbe("flat characteristic function: g''(0) ~ 0")
    dg = -1j * np.sum(k * dens * np.exp(-1j * beta * k)) * dk
    return complex((dg / beta) / lbar0)


def boost(probe, p0):
    """Multiply by the plane wave exp(i p0 q): a momentum kick of p0."""
    amps = probe.amplitudes * np.exp(1j * p0 * probe.q)
    return GridProbe(probe.q_min, probe.q_max, probe.n_points, amps)


def free_evolve(probe, mass, t):
    """Free evolution exp(-i t p^2 / 2m) applied in momentum space via FFT."""
    if mass <= 0:
        raise ValueError("mass must be > 0")
    k = 2 * np.pi * np.fft.fftfreq(probe.n_points, d=probe.dq)
    psi_k = np.fft.fft(probe.amplitudes)
    psi_k *= np.exp(-1j * t * k**2 / (2 * mass))
    amps = np.fft.ifft(psi_k)
    out = GridProbe(probe.q_min, probe.q_max, probe.n_points, amps)
    edge = np.concatenate([out.density()[:5], out.density()[-5:]])
    if edge.max() * out.dq > 1e-6:
        warnings.warn("wavepacket density has reached the grid edge", BoundaryLeak)
    return out


def position_density(probe, q_grid):
    """|chi(q)|^2 sampled on q_grid."""
    q_grid = np.asarray(q_grid, dtype=float)
    if isinstance(probe, GaussianProbe):
        s2 = probe.sigma_q**2
        return np.exp(-(q_grid**2) / (2 * s2)) / np.sqrt(2 * np.pi * s2)
    return np.abs(_interp_amplitudes(probe, q_grid)) ** 2


def amplitude_at(probe, q_grid):
    """chi(q) on arbitrary points (Gaussian closed form or grid interpolation)."""
    q_grid = np.asarray(q_grid, dtype=float)
    if isinstance(probe, GaussianProbe):
        s2 = probe.sigma_q**2
        return np.exp(-(q_grid**2) / (4 * s2)).astype(complex) / (2 * np.pi * s2) ** 0.25
    return _interp_amplitudes(probe, q_grid)


def momentum_density(probe, p_grid):
    """|chi~(p)|^2 of the initial probe; Gaussian closed form only."""
    p_grid = np.asarray(p_grid, dtype=float)
    if isinstance(probe, GaussianProbe):
        s2 = probe.sigma_p**2
        return np.exp(-(p_grid**2) / (2 * s2)) / np.sqrt(2 * np.pi * s2)
    raise NotImplementedError("momentum density is provided for Gaussian probes")
