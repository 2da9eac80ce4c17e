"""Scenario runner: JSON config in, CSV/JSON artifacts out.

Invocation:
    vnm-lab run --config cfg.json --out outdir
    vnm-lab validate --config cfg.json
    vnm-lab list-scenarios

Exit codes: 0 success, 2 config error, 3 runtime error.  VNM_SEED overrides
any configured seed; VNM_THREADS is recorded in the manifest (all scenario
internals are single-process numpy).
"""

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import core_hilbert as ch
from . import probe as pr
from . import sampler as sm
from . import single_meas as sg
from . import successive_meas as sc
from . import tomography as tm
from .errors import VnmError
from .serialize import matrix_to_json


def _fmt(v):
    return f"{float(v):.17g}"


def _write_csv(path, header, rows):
    with open(path, "w") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path, obj):
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def _n2_basis_pair():
    """Computational k-basis and the (1, +-1)/sqrt(2) mu-basis."""
    bk = np.eye(2)
    bm = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    return ch.make_basis_pair(bk, bm)


def _dft_basis_pair(n):
    return ch.make_basis_pair(np.eye(n), ch.fourier_basis(n))


def _basis_pair_for(n):
    return _n2_basis_pair() if n == 2 else _dft_basis_pair(n)


# ---------------------------------------------------------------------------
# Parameter schemas: name -> (default, checker); checker returns error or None

def _positive(name):
    def check(v):
        if not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0:
            return f"{name} must be > 0"
    return check


def _nonneg(name):
    def check(v):
        if not isinstance(v, (int, float)) or isinstance(v, bool) or v < 0:
            return f"{name} must be >= 0"
    return check


def _int_min(name, lo):
    def check(v):
        if not isinstance(v, int) or isinstance(v, bool) or v < lo:
            return f"{name} must be an integer >= {lo}"
    return check


def _number_list(name):
    def check(v):
        if not isinstance(v, list) or not v or \
                any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
            return f"{name} must be a non-empty list of numbers"
    return check


def _positive_list(name):
    base = _number_list(name)

    def check(v):
        err = base(v)
        if err:
            return err
        if any(x <= 0 for x in v):
            return f"{name} entries must be > 0"
    return check


def _spinor(name):
    def check(v):
        if isinstance(v, str):
            if v not in ("+x", "-x", "+z", "-z", "+y", "-y"):
                return f"{name} must be one of +x,-x,+y,-y,+z,-z or [[re,im],[re,im]]"
            return None
        if (not isinstance(v, list) or len(v) != 2
                or any(not isinstance(c, list) or len(c) != 2 for c in v)):
            return f"{name} must be a named spinor or [[re,im],[re,im]]"
    return check


SCENARIO_PARAMS = {
    "stern-gerlach": {
        "mass": (1.0, _positive("mass")),
        "t1": (1.0, _positive("t1")),
        "epsilon": (4.0, _positive("epsilon")),
        "sigma": (0.5, _positive("sigma")),
        "spinor": ("+x", _spinor("spinor")),
        "q_min": (-60.0, None),
        "q_max": (60.0, None),
        "n_points": (8192, _int_min("n_points", 16)),
    },
    "pointer-density": {
        "weights": ([0.1, 0.2, 0.2, 0.15, 0.2, 0.05, 0.1], _positive_list("weights")),
        "eigenvalues": ([-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0],
                        _number_list("eigenvalues")),
        "epsilon": (1.0, _positive("epsilon")),
        "sigma_q": ([0.05, 1.0], _positive_list("sigma_q")),
        "n_points": (4096, _int_min("n_points", 16)),
    },
    "reduced-state": {
        "dim": (2, _int_min("dim", 2)),
        "seed": (7, _int_min("seed", 0)),
        "sigma_q": (1.0, _positive("sigma_q")),
        "epsilon_grid": ([0.1, 1.0, 10.0, 1000.0], _positive_list("epsilon_grid")),
    },
    "successive": {
        "dim": (2, _int_min("dim", 2)),
        "seed": (11, _int_min("seed", 0)),
        "sigma_q": (1.0, _positive("sigma_q")),
        "epsilon1_grid": ([0.001, 0.1, 1.0, 10.0, 1000.0],
                          _positive_list("epsilon1_grid")),
    },
    "quasi-distributions": {
        "sigma_q": (1.0, _positive("sigma_q")),
        "epsilon1_grid": ([0.001, 1.0, 1000.0], _positive_list("epsilon1_grid")),
    },
    "tomography": {
        "dim": (2, _int_min("dim", 2)),
        "seed": (3, _int_min("seed", 0)),
        "sigma_q": (1.0, _positive("sigma_q")),
        "epsilon1": (1.0, _positive("epsilon1")),
    },
    "ensemble-tomography": {
        "dim": (2, _int_min("dim", 2)),
        "seed": (1, _int_min("seed", 0)),
        "sigma_q": (1.0, _positive("sigma_q")),
        "epsilon1": (1.0, _positive("epsilon1")),
        "epsilon2": (1.0, _positive("epsilon2")),
        "n_per_setting": (10000, _int_min("n_per_setting", 100)),
    },
    "conditioning-sweep": {
        "dim": (2, _int_min("dim", 2)),
        "seed": (5, _int_min("seed", 0)),
        "sigma_q": (1.0, _positive("sigma_q")),
        "epsilon1_grid": ([0.5, 1.0, 3.0, 5.0], _positive_list("epsilon1_grid")),
        "noise_level": (1e-4, _nonneg("noise_level")),
        "trials": (50, _int_min("trials", 1)),
    },
    "transform-check": {
        "dim": (3, _int_min("dim", 2)),
        "seed": (9, _int_min("seed", 0)),
        "sigma_q": (1.0, _positive("sigma_q")),
        "epsilon1_grid": ([0.1, 1.0, 10.0], _positive_list("epsilon1_grid")),
        "n_instances": (20, _int_min("n_instances", 1)),
    },
}


class ConfigError(Exception):
    def __init__(self, errors):
        self.errors = errors
        super().__init__("; ".join(errors))


def validate_config(raw):
    """Parse and validate a JSON config, returning (config, errors)."""
    errors = []
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as e:
        return None, [f"invalid JSON: {e}"]
    if not isinstance(obj, dict):
        return None, ["config must be a JSON object"]
    for key in obj:
        if key not in ("scenario", "params"):
            errors.append(f"{key}: unknown key")
    scenario = obj.get("scenario")
    if scenario is None:
        errors.append("scenario: required")
        return None, errors
    if scenario not in SCENARIO_PARAMS:
        errors.append(f"scenario: unknown scenario {scenario!r}; "
                      f"known: {', '.join(sorted(SCENARIO_PARAMS))}")
        return None, errors
    schema = SCENARIO_PARAMS[scenario]
    params = obj.get("params", {})
    if not isinstance(params, dict):
        errors.append("params: must be an object")
        return None, errors
    merged = {}
    for name, (default, checker) in schema.items():
        value = params.get(name, default)
        if name in params and checker is not None:
            err = checker(params[name])
            if err:
                errors.append(f"params.{name}: {err}")
                continue
        merged[name] = value
    for name in params:
        if name not in schema:
            errors.append(f"params.{name}: unknown parameter")
    if errors:
        return None, errors
    env_seed = os.environ.get("VNM_SEED")
    if env_seed is not None and "seed" in merged:
        merged["seed"] = int(env_seed)
    return {"scenario": scenario, "params": merged}, []


# ---------------------------------------------------------------------------
# Scenario runners: each returns (files, summary)

def _spinor_vector(spec):
    named = {
        "+z": [1, 0], "-z": [0, 1],
        "+x": [1 / np.sqrt(2), 1 / np.sqrt(2)],
        "-x": [1 / np.sqrt(2), -1 / np.sqrt(2)],
        "+y": [1 / np.sqrt(2), 1j / np.sqrt(2)],
        "-y": [1 / np.sqrt(2), -1j / np.sqrt(2)],
    }
    if isinstance(spec, str):
        return np.asarray(named[spec], dtype=complex)
    v = np.array([c[0] + 1j * c[1] for c in spec])
    return v / np.linalg.norm(v)


def _run_stern_gerlach(p, out):
    spin = _spinor_vector(p["spinor"])
    w_plus = abs(spin[0]) ** 2
    w_minus = abs(spin[1]) ** 2
    probe0 = pr.gaussian_grid_probe(p["sigma"], p["q_min"], p["q_max"],
                                    p["n_points"])
    t1, m, eps = p["t1"], p["mass"], p["epsilon"]
    at_t1 = pr.free_evolve(probe0, m, t1)
    branch_up = pr.boost(at_t1, eps)
    branch_dn = pr.boost(at_t1, -eps)
    frames = {
        "t0": probe0.density(),
        "t1_minus": at_t1.density(),
        "t1_plus": w_plus * branch_up.density() + w_minus * branch_dn.density(),
        "t2": (w_plus * pr.free_evolve(branch_up, m, t1).density()
               + w_minus * pr.free_evolve(branch_dn, m, t1).density()),
    }
    files = []
    z = probe0.q
    for tag, dens in frames.items():
        path = os.path.join(out, f"stern_gerlach_{tag}.csv")
        _write_csv(path, "q,p", zip(z, dens))
        files.append(path)

    # Momentum branch masses after the kick.
    k = np.fft.fftshift(2 * np.pi * np.fft.fftfreq(probe0.n_points, d=probe0.dq))
    dk = k[1] - k[0]

    def mom_density(gp):
        psi_k = np.fft.fftshift(np.fft.fft(gp.amplitudes)) * gp.dq / np.sqrt(2 * np.pi)
        return np.abs(psi_k) ** 2

    dens_up = w_plus * mom_density(branch_up)
    dens_dn = w_minus * mom_density(branch_dn)
    path = os.path.join(out, "stern_gerlach_momentum.csv")
    _write_csv(path, "p_z,density", zip(k, dens_up + dens_dn))
    files.append(path)
    mass_up = float(np.sum(dens_up) * dk)
    mass_dn = float(np.sum(dens_dn) * dk)
    summary = {
        "born_weight_up": w_plus,
        "born_weight_down": w_minus,
        "branch_mass_up": mass_up,
        "branch_mass_down": mass_dn,
        "checks": {
            "branch_masses_match_born": bool(
                abs(mass_up - w_plus) < 1e-6 and abs(mass_dn - w_minus) < 1e-6),
        },
    }
    return files, summary


def _run_pointer_density(p, out):
    weights = np.asarray(p["weights"], dtype=float)
    weights = weights / weights.sum()
    a_vals = np.asarray(p["eigenvalues"], dtype=float)
    if len(a_vals) != len(weights):
        raise VnmError("weights and eigenvalues must have equal length")
    rho = ch.DensityOperator(np.diag(weights).astype(complex))
    obs = ch.spectral_decompose(np.diag(a_vals))
    eps = p["epsilon"]
    files = []
    peak_integrals = {}
    for s in p["sigma_q"]:
        probe = pr.GaussianProbe(s)
        span = (eps * a_vals.min() - 8 * s, eps * a_vals.max() + 8 * s)
        grid = np.linspace(span[0], span[1], p["n_points"])
        pd = sg.pointer_density(rho, obs, probe, eps, grid)
        path = os.path.join(out, f"pointer_density_sigma_{s}.csv")
        _write_csv(path, "q,p", zip(pd.q_grid, pd.values))
        files.append(path)
        # Per-peak masses (midpoint partition); resolved only at strong coupling.
        edges = np.concatenate([[grid[0]],
                                eps * (a_vals[:-1] + a_vals[1:]) / 2, [grid[-1]]])
        masses = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            sel = (pd.q_grid >= lo) & (pd.q_grid <= hi)
            masses.append(float(np.trapezoid(pd.values[sel], pd.q_grid[sel])))
        peak_integrals[str(s)] = masses
    mean_q, second_q = sg.pointer_moments(rho, obs,
                                          pr.GaussianProbe(p["sigma_q"][0]), eps)
    summary = {
        "born_weights": weights.tolist(),
        "peak_integrals": peak_integrals,
        "mean_q_over_eps": mean_q / eps,
        "checks": {
            "mean_matches_born_average": bool(
                abs(mean_q / eps - float(np.sum(weights * a_vals))) < 1e-10),
        },
    }
    return files, summary


def _run_reduced_state(p, out):
    rho = ch.random_density(p["dim"], p["seed"])
    obs = ch.random_observable(p["dim"], p["seed"] + 1)
    probe = pr.GaussianProbe(p["sigma_q"])
    rows = []
    for eps in p["epsilon_grid"]:
        rf = sg.reduced_state_after(rho, obs, probe, eps)
        off = rf.matrix - sum(pj @ rf.matrix @ pj for pj in obs.projectors)
        lud = sg.luders(rho, obs)
        rows.append((eps, float(np.max(np.abs(off))),
                     float(np.max(np.abs(rf.matrix - lud.matrix)))))
    path = os.path.join(out, "reduced_state.csv")
    _write_csv(path, "epsilon,offdiag_max,luders_distance", rows)
    strongest = rows[-1]
    summary = {
        "state": matrix_to_json(rho.matrix),
        "checks": {
            "luders_limit_reached": bool(strongest[2] < 1e-10
                                         or strongest[0] < 100 * p["sigma_q"]),
        },
    }
    return [path], summary


def _run_successive(p, out):
    rho = ch.random_density(p["dim"], p["seed"])
    a_obs = ch.random_observable(p["dim"], p["seed"] + 1)
    b_obs = ch.random_observable(p["dim"], p["seed"] + 2)
    probe = pr.GaussianProbe(p["sigma_q"])
    rows = []
    for eps1 in p["epsilon1_grid"]:
        rows.append((eps1,
                     sc.corr_qq(rho, a_obs, b_obs, probe, eps1),
                     sc.corr_pq(rho, a_obs, b_obs, probe, eps1),
                     sc.corr_coefficient(rho, a_obs, probe, probe, eps1, eps1)))
    path = os.path.join(out, "successive_correlations.csv")
    _write_csv(path, "epsilon1,corr_qq,corr_pq,corr_coefficient_same_obs", rows)
    mh = sc.margenau_hill(rho, a_obs, b_obs)
    ab = np.outer(mh.eigenvalues_b, mh.eigenvalues_a)
    weak_limit = float(np.sum(ab * mh.values).real)
    summary = {
        "weak_limit_corr_qq": weak_limit,
        "checks": {
            "weak_limit_matches_margenau_hill": bool(
                abs(rows[0][1] - weak_limit) < 1e-5),
        },
    }
    return [path], summary


def _mh_witness_setup():
    """The two N=2 bases whose S_11 operator has a negative eigenvalue."""
    a_obs = ch.Observable(np.array([0.0, 1.0]),
                          (np.diag([0.0, 1.0]).astype(complex),
                           np.diag([1.0, 0.0]).astype(complex)))
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    b_obs = ch.Observable(np.array([0.0, 1.0]),
                          (np.outer(minus, minus.conj()),
                           np.outer(plus, plus.conj())))
    return a_obs, b_obs


def _run_quasi_distributions(p, out):
    a_obs, b_obs = _mh_witness_setup()
    min_ev, witness = sc.negativity_witness(a_obs, b_obs, 1, 1)
    rho = ch.DensityOperator(np.outer(witness, witness.conj()))
    probe = pr.GaussianProbe(p["sigma_q"])
    files = []

    def dump(qd, tag):
        rows = []
        for m_i, b in enumerate(qd.eigenvalues_b):
            for n_i, a in enumerate(qd.eigenvalues_a):
                v = qd.values[m_i, n_i]
                rows.append((m_i, n_i, b, a, v.real, v.imag))
        path = os.path.join(out, f"quasi_{tag}.csv")
        _write_csv(path, "m,n,b_m,a_n,re,im", rows)
        files.append(path)

    for eps1 in p["epsilon1_grid"]:
        dump(sc.w_fn(rho, a_obs, b_obs, probe, eps1), f"W_eps_{eps1}")
    dump(sc.kirkwood(rho, a_obs, b_obs), "kirkwood")
    dump(sc.wigner_joint(rho, a_obs, b_obs), "wigner")
    mh = sc.margenau_hill(rho, a_obs, b_obs)
    dump(mh, "margenau_hill")
    expected = (1 - np.sqrt(2)) / 4
    summary = {
        "witness_min_eigenvalue": min_ev,
        "margenau_hill_11": float(mh.values[1, 1].real),
        "checks": {
            "negative_entry_matches_min_eigenvalue": bool(
                abs(mh.values[1, 1].real - expected) < 1e-12),
        },
    }
    return files, summary


def _run_tomography(p, out):
    bp = _basis_pair_for(p["dim"])
    rho = ch.random_density(p["dim"], p["seed"])
    probe = pr.GaussianProbe(p["sigma_q"])
    cs = tm.simulate_correlations(rho, bp, probe, p["epsilon1"])
    lp = tm.LambdaPair.from_probe(probe, p["epsilon1"])
    rec = tm.reconstruct(cs, lp)
    err = float(np.max(np.abs(rec.matrix - rho.matrix)))
    path = os.path.join(out, "correlations.json")
    from .serialize import correlation_set_to_json
    _write_json(path, correlation_set_to_json(cs))
    path2 = os.path.join(out, "reconstruction.json")
    payload = matrix_to_json(rec.matrix)
    payload["pre_repair_hermiticity_residual"] = rec.pre_repair_hermiticity_residual
    payload["trace_residual"] = rec.trace_residual
    _write_json(path2, payload)
    summary = {
        "round_trip_max_error": err,
        "checks": {"round_trip_exact": bool(err < 1e-10)},
    }
    return [path, path2], summary


def _run_ensemble_tomography(p, out):
    bp = _basis_pair_for(p["dim"])
    rho = ch.random_density(p["dim"], p["seed"])
    probe1 = pr.GaussianProbe(p["sigma_q"])
    probe2 = pr.GaussianProbe(p["sigma_q"])
    cs, errs = sm.ensemble_tomography(rho, bp, probe1, probe2,
                                      p["epsilon1"], p["epsilon2"],
                                      p["n_per_setting"], p["seed"])
    exact = tm.simulate_correlations(rho, bp, probe1, p["epsilon1"])
    lp = tm.LambdaPair.from_probe(probe1, p["epsilon1"])
    rec = tm.reconstruct(cs, lp)
    fro = float(np.linalg.norm(rec.matrix - rho.matrix))
    rows = []
    for mu in range(bp.dim):
        for k in range(bp.dim):
            rows.append((mu, k, cs.x[mu, k], exact.x[mu, k], errs["x"][mu, k],
                         cs.y_tilde[mu, k], exact.y_tilde[mu, k],
                         errs["y_tilde"][mu, k]))
    path = os.path.join(out, "ensemble_correlations.csv")
    _write_csv(path, "mu,k,x_sampled,x_exact,x_std_error,"
                     "y_tilde_sampled,y_tilde_exact,y_tilde_std_error", rows)
    summary = {
        "reconstruction_frobenius_error": fro,
        "n_per_setting": p["n_per_setting"],
        "checks": {
            "within_4_sigma": bool(all(
                abs(r[2] - r[3]) < 4 * max(r[4], 1e-12) for r in rows)),
        },
    }
    return [path], summary


def _run_conditioning_sweep(p, out):
    bp = _basis_pair_for(p["dim"])
    probe = pr.GaussianProbe(p["sigma_q"])
    table = tm.conditioning_report(bp, probe, p["epsilon1_grid"],
                                   p["noise_level"], p["trials"], p["seed"])
    path = os.path.join(out, "conditioning.csv")
    _write_csv(path, "epsilon1,mean_error", table)
    errs = [row[1] for row in table]
    summary = {
        "table": [[float(a), float(b)] for a, b in table],
        "checks": {
            "weak_coupling_advantage": bool(errs[-1] > errs[0]),
        },
    }
    return [path], summary


def _run_transform_check(p, out):
    bp = _basis_pair_for(p["dim"])
    probe = pr.GaussianProbe(p["sigma_q"])
    rows = []
    worst = 0.0
    for i in range(p["n_instances"]):
        rho = ch.random_density(p["dim"], p["seed"] + 100 + i)
        obs = ch.random_observable(p["dim"], p["seed"] + 500 + i)
        o_matrix = obs.matrix
        direct = float(np.trace(rho.matrix @ o_matrix).real)
        for eps1 in p["epsilon1_grid"]:
            via = tm.expectation_via_quasi(rho, o_matrix, bp, probe, eps1)
            resid = abs(via - direct)
            worst = max(worst, resid)
            rows.append((i, eps1, direct, via, resid))
    path = os.path.join(out, "transform_check.csv")
    _write_csv(path, "instance,epsilon1,direct_trace,via_transform,residual", rows)
    summary = {
        "max_residual": worst,
        "checks": {"transform_identity": bool(worst < 1e-9)},
    }
    return [path], summary


RUNNERS = {
    "stern-gerlach": _run_stern_gerlach,
    "pointer-density": _run_pointer_density,
    "reduced-state": _run_reduced_state,
    "successive": _run_successive,
    "quasi-distributions": _run_quasi_distributions,
    "tomography": _run_tomography,
    "ensemble-tomography": _run_ensemble_tomography,
    "conditioning-sweep": _run_conditioning_sweep,
    "transform-check": _run_transform_check,
}


def run(config, out_dir):
    """Execute a validated scenario config, returning the output manifest."""
    os.makedirs(out_dir, exist_ok=True)
    scenario = config["scenario"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        files, summary = RUNNERS[scenario](config["params"], out_dir)
    summary["scenario"] = scenario
    summary["params"] = config["params"]
    summary_path = os.path.join(out_dir, "summary.json")
    _write_json(summary_path, summary)
    manifest = {
        "scenario": scenario,
        "files": sorted(os.path.relpath(f, out_dir) for f in files)
        + ["summary.json"],
        "threads": os.environ.get("VNM_THREADS", "unset"),
    }
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


def main(argv=None):
    parser = argparse.ArgumentParser(prog="vnm-lab",
                                     description="pointer-measurement scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("--config", required=True)
    sub.add_parser("list-scenarios", help="list known scenarios")
    args = parser.parse_args(argv)

    if args.command == "list-scenarios":
        for name in sorted(SCENARIO_PARAMS):
            print(name)
        return 0

    try:
        with open(args.config) as f:
            raw = f.read()
    except OSError as e:
        print(json.dumps({"error": "config", "detail": str(e)}))
        return 2
    config, errors = validate_config(raw)
    if errors:
        print(json.dumps({"error": "config", "detail": errors}))
        return 2
    if args.command == "validate":
        print(json.dumps(config, indent=2, sort_keys=True))
        return 0

    try:
        manifest = run(config, args.out)
    except VnmError as e:
        print(json.dumps({"error": "runtime", "detail": str(e)}))
        return 3
    except Exception as e:  # noqa: BLE001 - machine-readable failure contract
        print(json.dumps({"error": "runtime",
                          "detail": f"{type(e).__name__}: {e}"}))
        return 3
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
