"""Pointer-measurement toolkit: impulsive probe couplings, successive
measurements, quasi-probability tables and state reconstruction for
finite-dimensional systems coupled to one-dimensional Gaussian or grid
probes (hbar = 1)."""

from .core_hilbert import (
    BasisPair,
    DensityOperator,
    Observable,
    born_probability,
    fourier_basis,
    make_basis_pair,
    random_density,
    random_observable,
    spectral_decompose,
    validate_density,
)
from .errors import VnmError
from .probe import (
    GaussianProbe,
    GridProbe,
    boost,
    char_g,
    free_evolve,
    gaussian_grid_probe,
    lambda_fn,
    lambda_tilde_fn,
)
from .sampler import (
    EnsembleResult,
    ensemble_tomography,
    estimate_correlation,
    sample_joint_density,
)
from .single_meas import (
    PointerDensity,
    luders,
    pointer_charfn,
    pointer_density,
    pointer_moments,
    projector_yes_probability,
    qnd_check,
    reduced_state_after,
    two_outcome_observable,
)
from .successive_meas import (
    QuasiDistribution,
    corr_coefficient,
    corr_pq,
    corr_qq,
    joint_pointer_density,
    kirkwood,
    margenau_hill,
    negativity_witness,
    w_fn,
    w_tilde_fn,
    weak_value,
    weak_value_from_probes,
    wigner_joint,
)
from .tomography import (
    CorrelationSet,
    LambdaPair,
    ReconstructionResult,
    conditioning_report,
    reconstruct,
    reconstruct_n2_minimal,
    recover_y,
    simulate_correlations,
    transform_observable,
)

__version__ = "0.1.0"

__all__ = [
    "BasisPair", "DensityOperator", "Observable", "born_probability",
    "fourier_basis", "make_basis_pair", "random_density", "random_observable",
    "spectral_decompose", "validate_density", "VnmError",
    "GaussianProbe", "GridProbe", "boost", "char_g", "free_evolve",
    "gaussian_grid_probe", "lambda_fn", "lambda_tilde_fn",
    "EnsembleResult", "ensemble_tomography", "estimate_correlation",
    "sample_joint_density",
    "PointerDensity", "luders", "pointer_charfn", "pointer_density",
    "pointer_moments", "projector_yes_probability", "qnd_check",
    "reduced_state_after", "two_outcome_observable",
    "QuasiDistribution", "corr_coefficient", "corr_pq", "corr_qq",
    "joint_pointer_density", "kirkwood", "margenau_hill",
    "negativity_witness", "w_fn", "w_tilde_fn", "weak_value",
    "weak_value_from_probes", "wigner_joint",
    "CorrelationSet", "LambdaPair", "ReconstructionResult",
    "conditioning_report", "reconstruct", "reconstruct_n2_minimal",
    "recover_y", "simulate_correlations", "transform_observable",
]
