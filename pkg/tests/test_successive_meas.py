import numpy as np
import pytest

from vnmlab import core_hilbert as ch
from vnmlab import probe as pr
from vnmlab import successive_meas as sc
from vnmlab.errors import OrthogonalPostselection


def _instance(n=3, seed=0):
    rho = ch.random_density(n, seed)
    a = ch.random_observable(n, seed + 50)
    b = ch.random_observable(n, seed + 90)
    return rho, a, b


def test_kirkwood_marginals_are_born_probabilities():
    rho, a, b = _instance()
    k = sc.kirkwood(rho, a, b)
    born_a = np.array([ch.born_probability(rho, p) for p in a.projectors])
    born_b = np.array([ch.born_probability(rho, p) for p in b.projectors])
    assert np.max(np.abs(k.marginal_a() - born_a)) < 1e-12
    assert np.max(np.abs(k.marginal_b() - born_b)) < 1e-12
    assert abs(k.total() - 1.0) < 1e-12


def test_kirkwood_order_swap_conjugates():
    rho, a, b = _instance(seed=3)
    k_ab = sc.kirkwood(rho, a, b)
    k_ba = sc.kirkwood(rho, b, a)
    assert np.max(np.abs(k_ab.values - k_ba.values.T.conj())) < 1e-12


def test_wigner_table_is_a_probability_distribution():
    rho, a, b = _instance(seed=7)
    w = sc.wigner_joint(rho, a, b)
    assert np.min(w.values.real) > -1e-12
    assert np.max(np.abs(w.values.imag)) < 1e-14
    assert abs(w.total() - 1.0) < 1e-12


def test_margenau_hill_is_real_part_of_kirkwood():
    rho, a, b = _instance(seed=12)
    mh = sc.margenau_hill(rho, a, b)
    k = sc.kirkwood(rho, a, b)
    assert np.max(np.abs(mh.values - k.values.real)) < 1e-15


def test_w_marginal_over_b_is_born_at_any_coupling():
    rho, a, b = _instance(seed=5)
    probe = pr.GaussianProbe(1.0)
    born_a = np.array([ch.born_probability(rho, p) for p in a.projectors])
    for eps1 in (0.01, 1.0, 50.0):
        w = sc.w_fn(rho, a, b, probe, eps1)
        assert np.max(np.abs(w.marginal_a() - born_a)) < 1e-12


def test_corr_qq_same_observable_equals_second_moment():
    rho, a, _ = _instance(seed=8)
    probe = pr.GaussianProbe(0.7)
    direct = float(np.trace(rho.matrix @ a.matrix @ a.matrix).real)
    assert abs(sc.corr_qq(rho, a, a, probe, 1.3) - direct) < 1e-12


def test_joint_pointer_density_moments_match_closed_forms():
    rho, a, b = _instance(n=2, seed=15)
    p1 = pr.GaussianProbe(0.9)
    p2 = pr.GaussianProbe(1.1)
    eps1, eps2 = 1.2, 0.8
    g1 = np.linspace(-12, 12, 641)
    g2 = np.linspace(-12, 12, 641)
    dens = sc.joint_pointer_density(rho, a, b, p1, p2, eps1, eps2, g1, g2)
    d1, d2 = g1[1] - g1[0], g2[1] - g2[0]
    total = dens.sum() * d1 * d2
    assert abs(total - 1.0) < 1e-6
    q1q2 = float((np.outer(g1, g2) * dens).sum() * d1 * d2)
    closed = eps1 * eps2 * sc.corr_qq(rho, a, b, p1, eps1)
    assert abs(q1q2 - closed) < 1e-6


def test_corr_coefficient_limits():
    rho, a, _ = _instance(n=2, seed=20)
    probe = pr.GaussianProbe(1.0)
    weak = sc.corr_coefficient(rho, a, probe, probe, 0.01, 0.01)
    strong = sc.corr_coefficient(rho, a, probe, probe, 1000.0, 1000.0)
    assert 0 <= weak < 0.01
    assert strong > 1 - 1e-5
    # eigenstate: no variance, no correlation
    v = np.linalg.eigh(a.matrix)[1][:, 0]
    eig_state = ch.DensityOperator(np.outer(v, v.conj()))
    assert sc.corr_coefficient(eig_state, a, probe, probe, 1.0, 1.0) < 1e-12


def test_weak_value_pure_state_oracle():
    rng = np.random.default_rng(31)
    psi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    psi /= np.linalg.norm(psi)
    phi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    phi /= np.linalg.norm(phi)
    a = ch.random_observable(3, 32)
    rho = ch.DensityOperator(np.outer(psi, psi.conj()))
    expected = (phi.conj() @ a.matrix @ psi) / (phi.conj() @ psi)
    assert abs(sc.weak_value(rho, a, phi) - expected) < 1e-12


def test_weak_value_rejects_orthogonal_postselection():
    rho = ch.DensityOperator(np.diag([1.0, 0.0]).astype(complex))
    a = ch.random_observable(2, 33)
    with pytest.raises(OrthogonalPostselection):
        sc.weak_value(rho, a, np.array([0.0, 1.0]))


def test_richardson_extrapolation_is_exact_on_even_series():
    c0, c1, c2 = 0.7, -2.0, 5.0
    eps = [0.4, 0.2, 0.1]
    vals = [c0 + c1 * e**2 + c2 * e**4 for e in eps]
    assert abs(sc._richardson(eps, vals) - c0) < 1e-12


def test_negativity_witness_eigvector_realizes_minimum():
    a = ch.random_observable(2, 40)
    b = ch.random_observable(2, 41)
    min_ev, vec = sc.negativity_witness(a, b, 0, 0)
    rho = ch.DensityOperator(np.outer(vec, vec.conj()))
    mh = sc.margenau_hill(rho, a, b)
    assert abs(mh.values[0, 0].real - min_ev) < 1e-12
