"""State reconstruction from successive projector-pair measurements.

Forward-simulates the position-position and momentum-position correlations
x_{mu k}, y~_{mu k} over a pair of mutually non-orthogonal bases, recovers
the imaginary part y_{mu k}, and inverts the quasi-probability table
W11 = x + i y back to the density matrix.  Also provides the N = 2
three-correlation closed forms, the generalized observable transform, and
a noise-conditioning sweep.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .core_hilbert import DensityOperator, random_density
from .errors import ConditioningWarning, SingularInversion
from .probe import char_g, lambda_fn, lambda_tilde_fn, sigma_estimate


@dataclass(frozen=True)
class CorrelationSet:
    """Measured correlation tables over a basis pair.

    ``x[mu, k]`` is <Q1 Q2> / (eps1 eps2) for the setting (P_k then P_mu);
    ``y_tilde[mu, k]`` is <P1 Q2> / (2 sigma_P1^2 eps1 eps2).
    """

    basis_pair: object
    epsilon1: float
    sigma_q1: float
    x: np.ndarray
    y_tilde: np.ndarray

    def column_sums(self):
        """sum_mu x[mu, k]; equals <k|rho|k> for exact data."""
        return np.asarray(self.x).sum(axis=0)


@dataclass(frozen=True)
class LambdaPair:
    """lambda(eps1) and lambda~(eps1) of the first probe."""

    lam: complex
    lam_tilde: complex

    @classmethod
    def from_probe(cls, probe1, epsilon1):
        return cls(lam=complex(lambda_fn(probe1, epsilon1)),
                   lam_tilde=complex(lambda_tilde_fn(probe1, epsilon1)))


def g_factor(lam, k, k_prime):
    """G_{kk'} = 1 on the diagonal, lambda off it."""
    return 1.0 + 0.0j if k == k_prime else complex(lam)


def w11_forward(rho, bp, k, mu, lam):
    """W11 = Tr(rho P_k P_mu P_k) + lambda sum_{k' != k} Tr(rho P_k' P_mu P_k)."""
    vk = bp.basis_k[k]
    vmu = bp.basis_mu[mu]
    # Tr(rho P_k' P_mu P_k) = <k|rho|k'> (k'|mu)... expanded with rank-1 projectors:
    #   = (mu|k> <k|rho|k'> <k'|mu)
    total = 0.0 + 0.0j
    for kp in range(bp.dim):
        vkp = bp.basis_k[kp]
        term = (bp.overlaps[mu, k] * (vk.conj() @ rho.matrix @ vkp)
                * bp.overlaps[mu, kp].conj())
        total += term if kp == k else lam * term
    return complex(total)


def simulate_correlations(rho, bp, probe1, epsilon1):
    """Exact-expectation forward model of the correlation experiment."""
    lp = LambdaPair.from_probe(probe1, epsilon1)
    n = bp.dim
    x = np.empty((n, n))
    y_tilde = np.empty((n, n))
    for k in range(n):
        for mu in range(n):
            x[mu, k] = w11_forward(rho, bp, k, mu, lp.lam).real
            y_tilde[mu, k] = w11_forward(rho, bp, k, mu, lp.lam_tilde).imag
    return CorrelationSet(basis_pair=bp, epsilon1=epsilon1,
                         sigma_q1=sigma_estimate(probe1),
                         x=x, y_tilde=y_tilde)


def recover_y(cs, lp):
    """Imaginary part of W11 from the measured x and y~ tables."""
    prod = lp.lam * np.conj(lp.lam_tilde)
    if abs(prod.real) <= 1e-12:
        raise SingularInversion(
            "Re(lambda lambda~*) vanishes: probe gives no invertible information")
    x = np.asarray(cs.x)
    yt = np.asarray(cs.y_tilde)
    overlap2 = np.abs(cs.basis_pair.overlaps) ** 2  # |<k|mu)|^2, indexed [mu, k]
    col = x.sum(axis=0)  # sum_mu' x[mu', k]
    return (prod.imag / prod.real) * (x - overlap2 * col[np.newaxis, :]) \
        + (abs(lp.lam) ** 2 / prod.real) * yt


@dataclass(frozen=True)
class ReconstructionResult:
    """Inverted density matrix plus the pre-repair residuals."""

    matrix: np.ndarray
    pre_repair_hermiticity_residual: float
    trace_residual: float

    def as_density(self):
        """Validated DensityOperator; raises if noise broke the invariants."""
        return DensityOperator(self.matrix)


def reconstruct(cs, lp):
    """Invert the W11 table: <k|rho|k'> = sum_mu W11 / G_{kk'} * (mu|k'> / (mu|k>."""
    y = recover_y(cs, lp)
    w11 = np.asarray(cs.x) + 1j * y  # [mu, k]
    if abs(lp.lam) < 1e-3:
        warnings.warn(
            f"|lambda| = {abs(lp.lam):.2e} < 1e-3: off-diagonal elements are "
            "divided by a tiny factor and noise is strongly amplified",
            ConditioningWarning)
    n = cs.basis_pair.dim
    ov = cs.basis_pair.overlaps
    raw = np.empty((n, n), dtype=complex)
    for k in range(n):
        for kp in range(n):
            g = g_factor(lp.lam, k, kp)
            if abs(g) < 1e-12:
                raise SingularInversion("G_{kk'} = 0: off-diagonals unrecoverable")
            raw[k, kp] = np.sum(w11[:, k] / g * ov[:, kp] / ov[:, k])
    herm_res = float(np.max(np.abs(raw - raw.conj().T)))
    tr_res = float(abs(np.trace(raw) - 1.0))
    repaired = (raw + raw.conj().T) / 2
    tr = np.trace(repaired).real
    if abs(tr) < 1e-12:
        raise SingularInversion("reconstructed matrix has vanishing trace")
    repaired = repaired / tr
    return ReconstructionResult(repaired, herm_res, tr_res)


def reconstruct_n2_minimal(x_plus0, x_minus0, y_minus0, g_eps):
    """N = 2 closed form from the three independent correlations.

    Uses a Gaussian first probe (lambda = g real), the computational k-basis
    {|0>, |1>} and the mu-basis {(1, +-1)/sqrt(2)}.
    """
    if abs(g_eps) <= 1e-12:
        raise SingularInversion("g(eps1) ~ 0: off-diagonal elements unrecoverable")
    rho00 = x_plus0 + x_minus0
    rho01 = (x_plus0 - x_minus0 - 2j * y_minus0) / g_eps
    m = np.array([[rho00, rho01], [np.conj(rho01), 1.0 - rho00]])
    return ReconstructionResult(m, 0.0, 0.0)


def transform_observable(op, bp, lam):
    """O(mu, k) = sum_k' [(mu|k'> / (mu|k>] [<k'|O|k> / G_{k'k}]."""
    if abs(lam) <= 1e-12:
        raise SingularInversion("lambda ~ 0: the transform table is singular")
    op = np.asarray(op, dtype=complex)
    n = bp.dim
    ov = bp.overlaps
    # <k'|O|k> in the k-basis
    o_kk = bp.basis_k.conj() @ op @ bp.basis_k.T
    out = np.empty((n, n), dtype=complex)
    for mu in range(n):
        for k in range(n):
            acc = 0.0 + 0.0j
            for kp in range(n):
                acc += (ov[mu, kp] / ov[mu, k]) * o_kk[kp, k] \
                    / g_factor(lam, kp, k)
            out[mu, k] = acc
    return out


def expectation_via_quasi(rho, op, bp, probe1, epsilon1):
    """<O> computed by contracting the W11 table with the transform of O."""
    lam = complex(lambda_fn(probe1, epsilon1))
    table = transform_observable(op, bp, lam)
    n = bp.dim
    total = 0.0 + 0.0j
    for k in range(n):
        for mu in range(n):
            total += w11_forward(rho, bp, k, mu, lam) * table[mu, k]
    return float(total.real)


def conditioning_report(bp, probe1, epsilon1_grid, noise_level, trials, seed):
    """Mean reconstruction error vs coupling strength under additive noise.

    For each eps1, random test states are forward-simulated, their x and y~
    tables perturbed with i.i.d. zero-mean Gaussian noise, reconstructed,
    and the Frobenius errors averaged.  Deterministic in the seed.
    """
    if noise_level < 0:
        raise ValueError("noise_level must be >= 0")
    rows = []
    for i_eps, eps1 in enumerate(epsilon1_grid):
        lp = LambdaPair.from_probe(probe1, eps1)
        errors = []
        for t in range(trials):
            ss = np.random.SeedSequence(entropy=seed, spawn_key=(i_eps, t))
            child_rho, child_noise = ss.spawn(2)
            rho = random_density(bp.dim, child_rho)
            cs = simulate_correlations(rho, bp, probe1, eps1)
            rng = np.random.default_rng(child_noise)
            noisy = CorrelationSet(
                basis_pair=bp, epsilon1=eps1, sigma_q1=cs.sigma_q1,
                x=cs.x + noise_level * rng.standard_normal(cs.x.shape),
                y_tilde=cs.y_tilde
                + noise_level * rng.standard_normal(cs.y_tilde.shape))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConditioningWarning)
                rec = reconstruct(noisy, lp)
            errors.append(float(np.linalg.norm(rec.matrix - rho.matrix)))
        rows.append((float(eps1), float(np.mean(errors))))
    return rows
