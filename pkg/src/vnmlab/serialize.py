"""Shared JSON representations for matrices, probes and correlation sets.

Complex matrices travel as {"dim": N, "re": [[...]], "im": [[...]]}; this
format is used by every module and by the CLI.
"""

import numpy as np


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(obj):
    n = int(obj["dim"])
    m = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    if m.shape != (n, n):
        raise ValueError(f"matrix payload shape {m.shape} does not match dim {n}")
    return m


def gaussian_probe_to_json(probe):
    return {"sigma_q": probe.sigma_q}


def grid_probe_to_json(probe):
    return {
        "q_min": probe.q_min,
        "q_max": probe.q_max,
        "n_points": probe.n_points,
        "re": probe.amplitudes.real.tolist(),
        "im": probe.amplitudes.imag.tolist(),
    }


def probe_from_json(obj):
    from .probe import GaussianProbe, GridProbe

    if "sigma_q" in obj:
        return GaussianProbe(float(obj["sigma_q"]))
    amps = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    return GridProbe(float(obj["q_min"]), float(obj["q_max"]),
                     int(obj["n_points"]), amps)


def correlation_set_to_json(cs):
    from .core_hilbert import BasisPair  # noqa: F401  (documented payload type)

    return {
        "epsilon1": cs.epsilon1,
        "sigma_q1": cs.sigma_q1,
        "x": np.asarray(cs.x).tolist(),
        "y_tilde": np.asarray(cs.y_tilde).tolist(),
        "basis_pair": {
            "basis_k": matrix_to_json(cs.basis_pair.basis_k),
            "basis_mu": matrix_to_json(cs.basis_pair.basis_mu),
        },
    }


def correlation_set_from_json(obj):
    from .core_hilbert import make_basis_pair
    from .tomography import CorrelationSet

    bp = make_basis_pair(
        matrix_from_json(obj["basis_pair"]["basis_k"]),
        matrix_from_json(obj["basis_pair"]["basis_mu"]),
    )
    return CorrelationSet(
        basis_pair=bp,
        epsilon1=float(obj["epsilon1"]),
        sigma_q1=float(obj["sigma_q1"]),
        x=np.asarray(obj["x"], dtype=float),
        y_tilde=np.asarray(obj["y_tilde"], dtype=float),
    )
