import numpy as np
import pytest

from vnmlab import core_hilbert as ch
from vnmlab.errors import MutuallyOrthogonalPair, NonHermitianInput, NotOrthonormal


def test_spectral_decompose_reconstructs_matrix():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = (g + g.conj().T) / 2
        obs = ch.spectral_decompose(h)
        assert np.max(np.abs(obs.matrix - h)) < 1e-12


def test_spectral_decompose_projector_algebra():
    obs = ch.random_observable(5, 3)
    projs = obs.projectors
    total = sum(projs)
    assert np.max(np.abs(total - np.eye(5))) < 1e-12
    for i, p in enumerate(projs):
        assert np.max(np.abs(p @ p - p)) < 1e-12
        for j, q in enumerate(projs):
            if i != j:
                assert np.max(np.abs(p @ q)) < 1e-12


def test_spectral_decompose_merges_degenerate_eigenvalues():
    obs = ch.spectral_decompose(np.diag([1.0, 1.0, 2.0]))
    assert len(obs.eigenvalues) == 2
    assert np.allclose(obs.eigenvalues, [1.0, 2.0])
    assert abs(np.trace(obs.projectors[0]).real - 2.0) < 1e-12


def test_spectral_decompose_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        ch.spectral_decompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_density_operator_rejects_bad_matrices():
    with pytest.raises(ValueError):
        ch.DensityOperator(np.array([[0.5, 0.1], [0.3, 0.5]]))  # not hermitian
    with pytest.raises(ValueError):
        ch.DensityOperator(np.eye(2))  # trace 2
    with pytest.raises(ValueError):
        ch.DensityOperator(np.diag([1.5, -0.5]))  # negative eigenvalue


def test_validate_density_reports_each_violation():
    report = ch.validate_density(np.diag([1.5, -0.5]))
    names = [name for name, _ in report]
    assert "psd" in names
    assert ch.validate_density(np.eye(3) / 3) == []


def test_random_density_is_valid_and_reproducible():
    for n in (2, 3, 5):
        rho = ch.random_density(n, seed=11)
        assert ch.validate_density(rho.matrix) == []
        again = ch.random_density(n, seed=11)
        assert np.array_equal(rho.matrix, again.matrix)


def test_basis_pair_rejects_orthogonal_pairs():
    with pytest.raises(MutuallyOrthogonalPair) as exc:
        ch.make_basis_pair(np.eye(2), np.eye(2))
    assert exc.value.k in (0, 1)


def test_basis_pair_rejects_non_orthonormal():
    with pytest.raises(NotOrthonormal):
        ch.make_basis_pair(np.array([[1.0, 1.0], [0.0, 1.0]]), ch.fourier_basis(2))


def test_fourier_basis_is_unbiased():
    for n in (2, 3, 4, 5):
        bp = ch.make_basis_pair(np.eye(n), ch.fourier_basis(n))
        assert np.max(np.abs(np.abs(bp.overlaps) - 1 / np.sqrt(n))) < 1e-12


def test_overlap_convention():
    # overlaps[mu, k] is the inner product of mu-vector with k-vector
    bp = ch.make_basis_pair(np.eye(2), np.array([[1, 1j], [1, -1j]]) / np.sqrt(2))
    assert abs(bp.overlaps[0, 1] - (-1j / np.sqrt(2))) < 1e-12


def test_born_probability_and_clamp():
    rho = ch.random_density(3, 1)
    obs = ch.random_observable(3, 2)
    total = sum(ch.born_probability(rho, p) for p in obs.projectors)
    assert abs(total - 1.0) < 1e-10
    # tiny negative roundoff is clamped to zero
    v = np.array([1.0, 0, 0])
    rho_pure = ch.DensityOperator(np.outer(v, v))
    assert ch.born_probability(rho_pure, np.diag([0.0, 1.0, 0.0])) == 0.0


def test_observable_matrix_assembly():
    obs = ch.Observable(np.array([2.0, -1.0]),
                        (np.diag([1.0, 0.0]).astype(complex),
                         np.diag([0.0, 1.0]).astype(complex)))
    assert np.allclose(obs.matrix, np.diag([2.0, -1.0]))
