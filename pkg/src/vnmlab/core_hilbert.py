"""Finite-dimensional Hilbert-space primitives.

Density operators, observables with explicit spectral structure (degeneracy
allowed), pairs of mutually non-orthogonal orthonormal bases, and random
test-instance generation.  hbar = 1 throughout the package.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    MutuallyOrthogonalPair,
    NonHermitianInput,
    NotOrthonormal,
)

HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def _as_complex_matrix(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def validate_density(matrix, tol=PSD_TOL):
    """Check the density-operator invariants, returning a list of violations.

    Each violation is a (name, residual) pair; an empty list means the matrix
    is Hermitian, unit-trace and positive semidefinite at tolerance `tol`.
    """
    m = _as_complex_matrix(matrix)
    report = []
    herm = np.max(np.abs(m - m.conj().T))
    if herm > tol:
        report.append(("hermitian", float(herm)))
    tr = abs(np.trace(m) - 1.0)
    if tr > tol:
        report.append(("trace", float(tr)))
    evals = np.linalg.eigvalsh((m + m.conj().T) / 2)
    if evals.min() < -tol:
        report.append(("psd", float(evals.min())))
    return report


@dataclass(frozen=True)
class DensityOperator:
    """An N x N Hermitian, unit-trace, PSD matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_complex_matrix(self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        bad = []
        if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
            bad.append("hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            bad.append("trace")
        if np.linalg.eigvalsh((m + m.conj().T) / 2).min() < -PSD_TOL:
            bad.append("psd")
        if bad:
            raise ValueError(f"not a valid density operator: {', '.join(bad)}")

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Observable:
    """Hermitian operator stored as distinct eigenvalues with eigenprojectors."""

    eigenvalues: np.ndarray
    projectors: tuple

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        projs = tuple(_as_complex_matrix(p) for p in self.projectors)
        for p in projs:
            p.setflags(write=False)
        object.__setattr__(self, "projectors", projs)
        if len(projs) != len(ev):
            raise DimensionMismatch("one projector per distinct eigenvalue required")

    @property
    def dim(self):
        return self.projectors[0].shape[0]

    @property
    def matrix(self):
        """Sum a_n * P_n, the Hermitian matrix this observable represents."""
        return sum(a * p for a, p in zip(self.eigenvalues, self.projectors))


@dataclass(frozen=True)
class BasisPair:
    """Two orthonormal bases |k> and |mu) with every overlap (mu|k> nonzero.

    Vectors are stored as rows; ``overlaps[mu, k]`` is (mu|k>.
    """

    basis_k: np.ndarray
    basis_mu: np.ndarray
    overlaps: np.ndarray = field(init=False)

    def __post_init__(self):
        bk = np.asarray(self.basis_k, dtype=complex)
        bm = np.asarray(self.basis_mu, dtype=complex)
        n = bk.shape[0]
        if bk.shape != (n, n) or bm.shape != (n, n):
            raise DimensionMismatch("need N vectors of dimension N in each basis")
        for name, b in (("basis_k", bk), ("basis_mu", bm)):
            gram = b.conj() @ b.T
            if np.max(np.abs(gram - np.eye(n))) > 1e-12:
                raise NotOrthonormal(f"{name} is not orthonormal within 1e-12")
        overlaps = bm.conj() @ bk.T
        idx = np.unravel_index(np.argmin(np.abs(overlaps)), overlaps.shape)
        if abs(overlaps[idx]) < 1e-10:
            raise MutuallyOrthogonalPair(k=int(idx[1]), mu=int(idx[0]),
                                         overlap=overlaps[idx])
        bk.setflags(write=False)
        bm.setflags(write=False)
        overlaps.setflags(write=False)
        object.__setattr__(self, "basis_k", bk)
        object.__setattr__(self, "basis_mu", bm)
        object.__setattr__(self, "overlaps", overlaps)

    @property
    def dim(self):
        return self.basis_k.shape[0]

    def projector_k(self, k):
        v = self.basis_k[k]
        return np.outer(v, v.conj())

    def projector_mu(self, mu):
        v = self.basis_mu[mu]
        return np.outer(v, v.conj())


def spectral_decompose(hermitian, degeneracy_tol=None):
    """Spectral decomposition with near-degenerate eigenvalues merged.

    Eigenvalues closer than `degeneracy_tol` (default 1e-8 * max |eigenvalue|)
    are grouped into a single projector.  Returns an Observable with
    eigenvalues in ascending order.
    """
    h = _as_complex_matrix(hermitian)
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise NonHermitianInput("input is not Hermitian within 1e-10")
    evals, evecs = np.linalg.eigh(h)
    if degeneracy_tol is None:
        degeneracy_tol = 1e-8 * max(1e-30, np.max(np.abs(evals)))
    groups = [[0]]
    for i in range(1, len(evals)):
        if evals[i] - evals[groups[-1][-1]] <= degeneracy_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    values = []
    projectors = []
    for g in groups:
        vecs = evecs[:, g]
        projectors.append(vecs @ vecs.conj().T)
        values.append(float(np.mean(evals[g])))
    return Observable(np.array(values), tuple(projectors))


def born_probability(rho, proj):
    """Tr(rho P), clamped to [0, 1] against roundoff."""
    p = _as_complex_matrix(proj)
    if p.shape != rho.matrix.shape:
        raise DimensionMismatch(
            f"projector shape {p.shape} does not match state dim {rho.dim}")
    val = float(np.trace(rho.matrix @ p).real)
    return min(1.0, max(0.0, val))


def random_density(n, seed):
    """Random density matrix from the Hilbert-Schmidt measure (Ginibre G G†)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = g @ g.conj().T
    m /= np.trace(m).real
    m = (m + m.conj().T) / 2
    return DensityOperator(m)


def random_observable(n, seed, scale=1.0):
    """Random nondegenerate Hermitian observable (GUE draw), for tests."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return spectral_decompose(scale * (g + g.conj().T) / 2)


def make_basis_pair(basis_k, basis_mu):
    """Build a BasisPair, validating orthonormality and mutual non-orthogonality."""
    return BasisPair(np.asarray(basis_k), np.asarray(basis_mu))


def fourier_basis(n):
    """The discrete-Fourier basis: mutually unbiased with the computational one."""
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.exp(2j * np.pi * j * k / n) / np.sqrt(n)
