"""Two-probe successive measurements.

The auxiliary tables W and W~ over the outcomes (b_m, a_n), the two
detectable correlations <Q1 Q2> and <P1 Q2> (always returned divided by
eps1 eps2), their strong/weak limits (Wigner, Kirkwood, Margenau-Hill),
same-observable repetition, the joint pointer density, and weak values.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core_hilbert import DensityOperator, born_probability
from .errors import DimensionMismatch, GridTooNarrow, OrthogonalPostselection
from .probe import (
    amplitude_at,
    lambda_fn,
    lambda_tilde_fn,
    position_density,
    sigma_estimate,
)
from .single_meas import born_weights, reduced_state_after, two_outcome_observable


@dataclass(frozen=True)
class QuasiDistribution:
    """Complex table over outcome pairs, indexed values[m, n] ~ (b_m, a_n)."""

    kind: str
    values: np.ndarray
    eigenvalues_a: np.ndarray
    eigenvalues_b: np.ndarray
    epsilon1: Optional[float] = None

    def marginal_a(self):
        """Sum over b_m; equals the Born probabilities of A for all kinds."""
        return self.values.sum(axis=0)

    def marginal_b(self):
        return self.values.sum(axis=1)

    def total(self):
        return complex(self.values.sum())


def _sandwich_traces(rho, a_obs, b_obs):
    """T[m, n, n'] = Tr[rho P_a_n' P_b_m P_a_n]."""
    if a_obs.dim != rho.dim or b_obs.dim != rho.dim:
        raise DimensionMismatch("state and observables must share one dimension")
    na, nb = len(a_obs.eigenvalues), len(b_obs.eigenvalues)
    t = np.empty((nb, na, na), dtype=complex)
    for m, pb in enumerate(b_obs.projectors):
        for n, pa_n in enumerate(a_obs.projectors):
            right = pb @ pa_n @ rho.matrix
            for np_, pa_np in enumerate(a_obs.projectors):
                t[m, n, np_] = np.trace(pa_np @ right)
    return t


def _w_table(rho, a_obs, b_obs, lam_values):
    """sum_n' lam(eps1 (a_n - a_n')) Tr[rho P_n' P_b_m P_n] for a given lam row."""
    t = _sandwich_traces(rho, a_obs, b_obs)
    return np.einsum("mnp,np->mn", t, lam_values)


def _lam_matrix(probe1, epsilon1, a_obs, fn):
    a = a_obs.eigenvalues
    return np.array([[fn(probe1, epsilon1 * (an - anp)) for anp in a] for an in a])


def w_fn(rho, a_obs, b_obs, probe1, epsilon1):
    """The position-position auxiliary table W_{b_m a_n}(eps1)."""
    lam = _lam_matrix(probe1, epsilon1, a_obs, lambda_fn)
    values = _w_table(rho, a_obs, b_obs, lam)
    return QuasiDistribution("W", values, a_obs.eigenvalues,
                             b_obs.eigenvalues, epsilon1)


def w_tilde_fn(rho, a_obs, b_obs, probe1, epsilon1):
    """The momentum-position auxiliary table W~_{b_m a_n}(eps1)."""
    lam = _lam_matrix(probe1, epsilon1, a_obs, lambda_tilde_fn)
    values = _w_table(rho, a_obs, b_obs, lam)
    return QuasiDistribution("W_tilde", values, a_obs.eigenvalues,
                             b_obs.eigenvalues, epsilon1)


def corr_qq(rho, a_obs, b_obs, probe1, epsilon1):
    """<Q1 Q2> / (eps1 eps2) = Re sum_{nm} a_n b_m W_{b_m a_n}(eps1)."""
    w = w_fn(rho, a_obs, b_obs, probe1, epsilon1)
    ab = np.outer(w.eigenvalues_b, w.eigenvalues_a)
    return float(np.sum(ab * w.values).real)


def corr_pq(rho, a_obs, b_obs, probe1, epsilon1):
    """<P1 Q2> / (eps1 eps2) = (1 / 2 sigma_Q1^2) Im sum a_n b_m W~(eps1)."""
    wt = w_tilde_fn(rho, a_obs, b_obs, probe1, epsilon1)
    ab = np.outer(wt.eigenvalues_b, wt.eigenvalues_a)
    sigma = sigma_estimate(probe1)
    return float(np.sum(ab * wt.values).imag) / (2 * sigma**2)


def wigner_joint(rho, a_obs, b_obs):
    """Strong-coupling limit: Tr[rho P_a_n P_b_m P_a_n], real and non-negative."""
    na, nb = len(a_obs.eigenvalues), len(b_obs.eigenvalues)
    values = np.empty((nb, na), dtype=complex)
    for m, pb in enumerate(b_obs.projectors):
        for n, pa in enumerate(a_obs.projectors):
            values[m, n] = np.trace(pa @ pb @ pa @ rho.matrix)
    return QuasiDistribution("Wigner", values.real.astype(complex),
                             a_obs.eigenvalues, b_obs.eigenvalues)


def kirkwood(rho, a_obs, b_obs):
    """Weak-coupling limit: Tr[rho P_b_m P_a_n], complex in general."""
    na, nb = len(a_obs.eigenvalues), len(b_obs.eigenvalues)
    values = np.empty((nb, na), dtype=complex)
    for m, pb in enumerate(b_obs.projectors):
        for n, pa in enumerate(a_obs.projectors):
            values[m, n] = np.trace(pb @ pa @ rho.matrix)
    return QuasiDistribution("Kirkwood", values,
                             a_obs.eigenvalues, b_obs.eigenvalues)


def margenau_hill(rho, a_obs, b_obs):
    """Re(Kirkwood): (1/2) Tr[rho (P_b P_a + P_a P_b)], real, may be negative."""
    k = kirkwood(rho, a_obs, b_obs)
    return QuasiDistribution("MargenauHill", k.values.real.astype(complex),
                             k.eigenvalues_a, k.eigenvalues_b)


def negativity_witness(a_obs, b_obs, m, n):
    """Minimum eigenvalue and eigenvector of S = (P_b P_a + P_a P_b) / 2.

    Negative whenever the two projectors fail to commute; feeding the
    eigenvector back as the state makes the Margenau-Hill entry (m, n)
    equal this eigenvalue.
    """
    pa = a_obs.projectors[n]
    pb = b_obs.projectors[m]
    s = (pb @ pa + pa @ pb) / 2
    evals, evecs = np.linalg.eigh(s)
    return float(evals[0]), evecs[:, 0]


def joint_pointer_density(rho, a_obs, b_obs, probe1, probe2,
                          epsilon1, epsilon2, q1_grid, q2_grid):
    """Joint density p(Q1, Q2) after both couplings, as a 2D table.

    For B = A this is the Born mixture of product peaks; for general B the
    probe-1 factor keeps coherences between a_n and a_n' (amplitude outer
    product), gated by the moment-consistency checks in the test suite.
    """
    q1_grid = np.asarray(q1_grid, dtype=float)
    q2_grid = np.asarray(q2_grid, dtype=float)
    s1, s2 = sigma_estimate(probe1), sigma_estimate(probe2)
    sh1 = epsilon1 * a_obs.eigenvalues
    sh2 = epsilon2 * b_obs.eigenvalues
    if q1_grid[0] > sh1.min() - 6 * s1 or q1_grid[-1] < sh1.max() + 6 * s1:
        raise GridTooNarrow("q1 grid does not span all shifted peaks + 6 sigma")
    if q2_grid[0] > sh2.min() - 6 * s2 or q2_grid[-1] < sh2.max() + 6 * s2:
        raise GridTooNarrow("q2 grid does not span all shifted peaks + 6 sigma")

    t = _sandwich_traces(rho, a_obs, b_obs)  # t[m, n, n'] = Tr[rho P_n' P_bm P_n]
    chi1 = [amplitude_at(probe1, q1_grid - s) for s in sh1]
    dens2 = [position_density(probe2, q2_grid - s) for s in sh2]
    out = np.zeros((len(q1_grid), len(q2_grid)), dtype=complex)
    na = len(a_obs.eigenvalues)
    for m in range(len(b_obs.eigenvalues)):
        probe1_part = np.zeros(len(q1_grid), dtype=complex)
        for n in range(na):
            for np_ in range(na):
                # Tr[P_bm P_an rho P_an' P_bm] = Tr[rho P_an' P_bm P_an]
                probe1_part += t[m, n, np_] * chi1[n] * chi1[np_].conj()
        out += np.outer(probe1_part, dens2[m])
    return out.real


def corr_coefficient(rho, a_obs, probe1, probe2, epsilon1, epsilon2):
    """Correlation coefficient of the two pointers when the same A is measured twice.

    var(A)_0 / sqrt[(var(A)_0 + (s1/eps1)^2)(var(A)_0 + (s2/eps2)^2)];
    0 for an eigenstate, -> 1 in the strong-coupling limit.
    """
    weights = born_weights(rho, a_obs)
    a = a_obs.eigenvalues
    var = float(np.sum(weights * a**2) - np.sum(weights * a) ** 2)
    if var <= 0:
        return 0.0
    r1 = (sigma_estimate(probe1) / epsilon1) ** 2
    r2 = (sigma_estimate(probe2) / epsilon2) ** 2
    return var / np.sqrt((var + r1) * (var + r2))


def weak_value(rho, a_obs, phi):
    """Tr(rho P_phi A) / Tr(rho P_phi), complex in general."""
    phi = np.asarray(phi, dtype=complex)
    phi = phi / np.linalg.norm(phi)
    p_phi = np.outer(phi, phi.conj())
    denom = np.trace(rho.matrix @ p_phi).real
    if denom <= 1e-12:
        raise OrthogonalPostselection("postselection probability underflows")
    num = np.trace(rho.matrix @ p_phi @ a_obs.matrix)
    return complex(num / denom)


def _probe_ratios(rho, a_obs, p_phi_obs, phi_proj, probe1, epsilon1):
    """(<Q1 Q2>, <P1 Q2>) each divided by eps1 <Q2>, at finite eps1."""
    qq = corr_qq(rho, a_obs, p_phi_obs, probe1, epsilon1)
    pq = corr_pq(rho, a_obs, p_phi_obs, probe1, epsilon1)
    rho_after = reduced_state_after(rho, a_obs, probe1, epsilon1)
    q2 = born_probability(rho_after, phi_proj)  # <Q2> / eps2
    if q2 <= 1e-12:
        raise OrthogonalPostselection("<Q2> underflows: near-orthogonal postselection")
    return qq / q2, pq / q2


def weak_value_from_probes(rho, a_obs, phi, probe1, epsilon1_sequence):
    """Estimate the weak value from probe correlations extrapolated to eps1 = 0.

    Evaluates <Q1 Q2> / (eps1 <Q2>) and <P1 Q2> / (eps1 <Q2>) at each coupling
    in the sequence and Richardson-extrapolates (the Gaussian error is a
    series in eps1^2).  The imaginary estimate is the momentum ratio divided
    by 2 sigma_P1^2, so both estimates target the weak value itself; the raw
    ratios are kept in the report.
    """
    phi = np.asarray(phi, dtype=complex)
    phi = phi / np.linalg.norm(phi)
    phi_proj = np.outer(phi, phi.conj())
    p_phi_obs = two_outcome_observable(phi_proj)
    sigma_p2 = 1.0 / (4.0 * sigma_estimate(probe1) ** 2)  # sigma_P1^2

    eps = list(epsilon1_sequence)
    re_vals, im_raw = [], []
    for e in eps:
        rq, rp = _probe_ratios(rho, a_obs, p_phi_obs, phi_proj, probe1, e)
        re_vals.append(rq)
        im_raw.append(rp)
    re_est = _richardson(eps, re_vals)
    im_est = _richardson(eps, im_raw) / (2 * sigma_p2)

    wv = weak_value(rho, a_obs, phi)
    report = {
        "epsilons": eps,
        "q_ratios": re_vals,
        "p_ratios": im_raw,
        "residual_re": abs(re_est - wv.real),
        "residual_im": abs(im_est - wv.imag),
    }
    return re_est, im_est, report


def _richardson(eps, vals):
    """Richardson extrapolation to 0 for a value with an eps^2 error series."""
    eps = [float(e) for e in eps]
    vals = [float(v) for v in vals]
    table = list(vals)
    n = len(table)
    order = 1
    while n > 1:
        nxt = []
        for i in range(n - 1):
            r = (eps[i] / eps[i + 1]) ** (2 * order)
            nxt.append((r * table[i + 1] - table[i]) / (r - 1))
        table = nxt
        n -= 1
        order += 1
    return table[0]
