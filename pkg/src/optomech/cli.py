"""Command-line front end: scenario orchestration and tabular output.

Subcommands: meanfield, sweep, match, evolve, transfer, fwm, validate.
Scenario files are strict JSON (unknown keys rejected, schema_version
checked); frequencies are in Hz. Every output starts with a metadata
header (config hash, seed, calibration constants, tool version) so runs
are reproducible byte for byte. Files are written atomically.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__, calibration
from .backaction import self_consistent_frequencies
from .dynamics import (DriftDiffusion, build_diffusion, build_drift,
                       evolve_covariance, sample_covariance,
                       steady_state_covariance)
from .errors import OptomechError, ScenarioError, ValidationError
from .fullmodel import compare_reduced_full, single_mode_phonon_pair
from .fwm import integrate_fwm
from .gaussian import (GaussianState, coherent_state, join_states,
                       squeezed_state, symplectic_eigenvalues, thermal_state,
                       vacuum_state)
from .matching import find_matching_detunings
from .meanfield import solve_linear, solve_quadratic
from .model import TWO_PI, CouplingKind, SystemConfig, system_from_dict
from .noise import NoiseModel
from .transfer import (FIDELITY_CONVENTION, TransferScenario, run_transfer,
                       swap_fidelities, sweep_phase)

OUT_DIR_ENV = "OPTOMECH_OUT_DIR"
SCENARIO_VERSION = 1

_TOP_KEYS = {"schema_version", "system", "noise", "meanfield", "sweep", "match",
             "evolve", "transfer", "fwm", "seed"}


def _load_scenario(path):
    if not os.path.exists(path):
        raise ScenarioError(f"scenario file not found: {path}", path=str(path))
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}", path=str(path))
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object", path=str(path))
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}", path=str(path))
    version = data.get("schema_version", SCENARIO_VERSION)
    if version != SCENARIO_VERSION:
        raise ScenarioError(f"unsupported schema_version {version}", path=str(path))
    return data


def _config_hash(data):
    canon = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _noise_from_block(block, theta_c=None):
    """NoiseModel from a scenario block.

    "phase_from_cavity" gives theta_s relative to the cavity response
    angle theta_c, which is only known once the working detuning is;
    callers that support it pass theta_c, everything else rejects it.
    """
    if block is None:
        return NoiseModel.vacuum()
    allowed = {"kind", "N", "theta_s", "phase_from_cavity"}
    unknown = set(block) - allowed
    if unknown:
        raise ScenarioError(f"unknown noise keys: {sorted(unknown)}", field="noise")
    kind = block.get("kind", "vacuum")
    if kind == "vacuum":
        return NoiseModel.vacuum()
    if kind != "squeezed":
        raise ScenarioError(f"unknown noise kind '{kind}'", field="noise")
    if "phase_from_cavity" in block:
        if theta_c is None:
            raise ScenarioError("phase_from_cavity is only supported where the "
                                "working detuning fixes theta_c", field="noise")
        theta_s = theta_c + float(block["phase_from_cavity"])
    else:
        theta_s = float(block.get("theta_s", 0.0))
    return NoiseModel.squeezed(float(block.get("N", 0.0)), theta_s)


_STATE_KEYS = {"kind", "nbar", "x_var", "p_var", "variance_convention", "alpha"}


def _state_from_block(block) -> GaussianState:
    unknown = set(block) - _STATE_KEYS
    if unknown:
        raise ScenarioError(f"unknown state keys: {sorted(unknown)}", field="initial")
    kind = block.get("kind", "vacuum")
    if kind == "vacuum":
        return vacuum_state(1)
    if kind == "thermal":
        return thermal_state(float(block["nbar"]), 1)
    if kind == "coherent":
        re, im = block.get("alpha", [0.0, 0.0])
        return coherent_state(complex(re, im), 1)
    if kind == "squeezed":
        xv, pv = float(block["x_var"]), float(block["p_var"])
        conv = block.get("variance_convention", "vacuum_quarter")
        if conv == "vacuum_half":
            xv, pv = xv / 2.0, pv / 2.0
        elif conv != "vacuum_quarter":
            raise ScenarioError(f"unknown variance_convention '{conv}'", field="initial")
        return squeezed_state(xv, pv)
    raise ScenarioError(f"unknown state kind '{kind}'", field="initial")


def _block(data, name, required_keys=(), allowed_keys=()):
    block = data.get(name)
    if block is None:
        raise ScenarioError(f"scenario needs a '{name}' block", field=name)
    allowed = set(allowed_keys) | set(required_keys)
    unknown = set(block) - allowed
    if unknown:
        raise ScenarioError(f"unknown keys in {name}: {sorted(unknown)}", field=name)
    missing = set(required_keys) - set(block)
    if missing:
        raise ScenarioError(f"missing keys in {name}: {sorted(missing)}", field=name)
    return block


# ------------------------------------------------------------------ output

def _atomic_write(path, text):
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".optomech-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _metadata(args, data):
    return {
        "tool": "optomech",
        "version": __version__,
        "config_hash": _config_hash(data),
        "seed": args.seed,
        "c_mech": calibration.C_MECH,
        "c_opt": calibration.C_OPT,
    }


def _write_csv(path, meta, header, rows):
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(f"{v:.12g}" if isinstance(v, float) else str(v)
                           for v in row) + "\n")
    _atomic_write(path, buf.getvalue())


def _write_json(path, meta, payload):
    _atomic_write(path, json.dumps({"metadata": meta, **payload}, indent=2,
                                   sort_keys=True) + "\n")


def _out_path(args, scenario_path, command, ext):
    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    stem = os.path.splitext(os.path.basename(scenario_path))[0]
    return os.path.join(out_dir, f"{stem}_{command}.{ext}")


def _emit(args, data, scenario_path, command, header, rows, payload):
    meta = _metadata(args, data)
    if args.format == "json":
        path = _out_path(args, scenario_path, command, "json")
        _write_json(path, meta, payload)
    else:
        path = _out_path(args, scenario_path, command, "csv")
        _write_csv(path, meta, header, rows)
    print(f"wrote {path}")
    return path


# -------------------------------------------------------------- subcommands

def _cmd_meanfield(args):
    data = _load_scenario(args.scenario)
    system = system_from_dict(data["system"])
    if system.coupling_kind is CouplingKind.LINEAR:
        sols = solve_linear(system)
    else:
        sols = solve_quadratic(system)
    branches = []
    for s in sols:
        branches.append({
            "branch": s.branch,
            "delta_bar_hz": s.delta_bar / TWO_PI,
            "delta_shifted_hz": None if s.delta_shifted is None else s.delta_shifted / TWO_PI,
            "alpha_s": [s.alpha_s.real, s.alpha_s.imag],
            "n_c": s.n_c,
            "displacements": list(s.displacements),
            "stable": s.stable,
            "degenerate_family": s.degenerate_family,
        })
    rows = [(b["branch"], b["delta_bar_hz"], b["n_c"], b["stable"]) for b in branches]
    _emit(args, data, args.scenario, "meanfield",
          ["branch", "delta_bar_hz", "n_c", "stable"], rows, {"branches": branches})
    for b in branches:
        print(f"branch {b['branch']}: delta_bar = {b['delta_bar_hz']:.6g} Hz, "
              f"n_c = {b['n_c']:.6g}, stable = {b['stable']}")
    return 0


def _sweep_solution(system, delta):
    # minima systems need the (drive-independent) zero-displacement solution
    if system.coupling_kind is CouplingKind.QUADRATIC_MINIMA:
        from dataclasses import replace
        from .meanfield import MeanFieldSolution
        from .model import bare_photon_number
        n_c = bare_photon_number(system.cavity, delta)
        return MeanFieldSolution(
            alpha_s=0j, n_c=n_c, displacements=(0.0,) * system.n_modes,
            delta_bar=delta, stable=True, branch=0,
            kind=CouplingKind.QUADRATIC_MINIMA)
    return None


def _cmd_sweep(args):
    data = _load_scenario(args.scenario)
    system = system_from_dict(data["system"])
    if system.coupling_kind is CouplingKind.QUADRATIC_MAXIMA:
        raise ValidationError("sweep supports linear and quadratic-minima systems",
                              field="coupling_kind")
    block = _block(data, "sweep", required_keys=("delta_range_hz", "points"),
                   allowed_keys=("mode",))
    lo, hi = (TWO_PI * float(x) for x in block["delta_range_hz"])
    pts = int(block["points"])
    mode = block.get("mode", "weak")
    grid = np.linspace(lo, hi, pts)
    n = system.n_modes
    header = (["delta_bar_hz"]
              + [f"nu_{j}_hz" for j in range(n)]
              + [f"omega_shift_{j}_hz" for j in range(n)]
              + [f"gamma_{j}_hz" for j in range(n)]
              + [f"lambda_{j}_hz" for j in range(n)])
    rows = []
    for d in grid:
        back = self_consistent_frequencies(system, d, mode=mode,
                                           solution=_sweep_solution(system, d))
        rows.append([d / TWO_PI]
                    + [x / TWO_PI for x in back.nu]
                    + [x / TWO_PI for x in back.omega_shift]
                    + [x / TWO_PI for x in back.gamma]
                    + [x / TWO_PI for x in back.lam])
    payload = {"columns": header, "rows": rows}
    _emit(args, data, args.scenario, "sweep", header, rows, payload)
    return 0


def _cmd_match(args):
    data = _load_scenario(args.scenario)
    system = system_from_dict(data["system"])
    block = _block(data, "match", allowed_keys=("pair", "delta_range_hz", "tol_hz"))
    pair = tuple(block.get("pair", (0, 1)))
    rng = block.get("delta_range_hz")
    delta_range = None if rng is None else (TWO_PI * float(rng[0]), TWO_PI * float(rng[1]))
    tol = TWO_PI * float(block.get("tol_hz", system.cavity.kappa / TWO_PI * 1e-4))
    points = find_matching_detunings(system, pair=pair, delta_range=delta_range, tol=tol)
    header = ["delta_bar_hz", "nu_hz", "side", "location", "dominant",
              "omega_c_hz", "gamma_c_hz"]
    rows = [(p.delta_bar / TWO_PI, p.nu / TWO_PI, p.side.value, p.location.value,
             p.dominant.value, p.omega_c / TWO_PI, p.gamma_c / TWO_PI)
            for p in points]
    payload = {"match_points": [dict(zip(header, r)) for r in rows]}
    _emit(args, data, args.scenario, "match", header, rows, payload)
    if points:
        width = max(len(h) for h in header)
        print(" | ".join(h.ljust(width) for h in header))
        for r in rows:
            print(" | ".join((f"{v:+.6g}" if isinstance(v, float) else str(v)).ljust(width)
                             for v in r))
    else:
        print("no matching detunings in range")
    return 0


def _initial_states(block, n_modes):
    states = [_state_from_block(b) for b in block]
    if len(states) != n_modes:
        raise ScenarioError(f"need {n_modes} initial states", field="initial")
    return join_states(*states)


def _cmd_evolve(args):
    data = _load_scenario(args.scenario)
    system = system_from_dict(data["system"])
    noise = _noise_from_block(data.get("noise"))
    block = _block(data, "evolve",
                   required_keys=("delta_bar_hz", "initial", "t_end_s", "n_steps"),
                   allowed_keys=("variant", "matched_nu", "structure",
                                 "optical_spectrum", "output_every",
                                 "include_uncoupled", "method"))
    delta_bar = TWO_PI * float(block["delta_bar_hz"])
    variant = block.get("variant", "full")
    structure = block.get("structure", "paper_rows")
    spectrum = block.get("optical_spectrum", "carrier")
    method = block.get("method", "rk4")

    back = self_consistent_frequencies(system, delta_bar, mode="weak")
    matched = block.get("matched_nu")
    matched_nu = None
    if matched == "mean":
        matched_nu = float(np.mean(back.nu))
    elif matched is not None:
        matched_nu = TWO_PI * float(matched)
    if matched_nu is not None:
        back = self_consistent_frequencies(system, delta_bar, mode="weak",
                                           nu_override=matched_nu)
    M = build_drift(system, back, variant=variant, matched_nu=matched_nu)
    D = build_diffusion(system, back, noise, delta_bar, structure=structure,
                        optical_spectrum=spectrum)
    dd = DriftDiffusion(M=M, D=D)

    v0 = _initial_states(block["initial"], system.n_modes)
    t_end = float(block["t_end_s"])
    n_steps = int(block["n_steps"])
    t_grid = np.linspace(0.0, t_end, n_steps + 1)
    nu_max = max(back.nu)
    if method == "rk4":
        states = evolve_covariance(dd, v0, t_grid, nu_max=nu_max)
    elif method == "exact":
        states = sample_covariance(dd, v0, t_grid)
    else:
        raise ScenarioError(f"unknown method '{method}'", field="evolve")

    every = int(block.get("output_every", 1))
    n = system.n_modes
    uncoupled = []
    if block.get("include_uncoupled", False):
        for j in range(n):
            Mj = M[2 * j:2 * j + 2, 2 * j:2 * j + 2]
            Dj = D[2 * j:2 * j + 2, 2 * j:2 * j + 2]
            ddj = DriftDiffusion(M=Mj, D=Dj)
            sj0 = v0.reduced(j)
            if method == "rk4":
                uncoupled.append(evolve_covariance(ddj, sj0, t_grid, nu_max=nu_max))
            else:
                uncoupled.append(sample_covariance(ddj, sj0, t_grid))

    header = ["t_s"]
    dim = 2 * n
    for i in range(dim):
        for j in range(i, dim):
            header.append(f"V_{i}{j}")
    header += [f"symplectic_{k}" for k in range(n)]
    header += [f"V_uncoupled_X{j}" for j in range(len(uncoupled))]
    rows = []
    for idx in range(0, len(t_grid), every):
        st = states[idx]
        row = [float(t_grid[idx])]
        row += [float(st.cov[i, j]) for i in range(dim) for j in range(i, dim)]
        row += [float(x) for x in st.symplectic_eigenvalues()]
        row += [float(u[idx].cov[0, 0]) for u in uncoupled]
        rows.append(row)
    payload = {"columns": header, "rows": rows}
    _emit(args, data, args.scenario, "evolve", header, rows, payload)
    return 0


def _cmd_transfer(args):
    data = _load_scenario(args.scenario)
    system = system_from_dict(data["system"])
    block = _block(data, "transfer",
                   required_keys=("initial_mirror", "initial_bec"),
                   allowed_keys=("delta_bar_hz", "delta_range_hz", "n_swaps",
                                 "samples_per_swap", "sweep_phase", "keep_gamma"))
    mirror = _state_from_block(block["initial_mirror"])
    bec = _state_from_block(block["initial_bec"])
    kwargs = dict(
        initial_mirror=mirror, initial_bec=bec,
        keep_gamma=bool(block.get("keep_gamma", False)),
        n_swaps=int(block.get("n_swaps", 3)),
        samples_per_swap=int(block.get("samples_per_swap", 40)))
    if "delta_bar_hz" in block:
        scenario = TransferScenario(system=system,
                                    delta_bar=TWO_PI * float(block["delta_bar_hz"]),
                                    noise=NoiseModel.vacuum(), **kwargs)
    else:
        rng = block.get("delta_range_hz")
        delta_range = None if rng is None else (TWO_PI * float(rng[0]),
                                                TWO_PI * float(rng[1]))
        from .transfer import make_transfer_scenario
        scenario = make_transfer_scenario(system, NoiseModel.vacuum(),
                                          delta_range=delta_range, **kwargs)
    # the matched detuning fixes theta_c; resolve relative squeezing phases now
    noise = _noise_from_block(data.get("noise"), theta_c=scenario.theta_c)
    scenario = TransferScenario(system=scenario.system, delta_bar=scenario.delta_bar,
                                noise=noise, keep_gamma=True, **{
                                    k: kwargs[k] for k in
                                    ("initial_mirror", "initial_bec", "n_swaps",
                                     "samples_per_swap")})

    sweep_block = block.get("sweep_phase")
    if sweep_block:
        unknown = set(sweep_block) - {"N_values", "phase_points"}
        if unknown:
            raise ScenarioError(f"unknown keys in sweep_phase: {sorted(unknown)}",
                                field="sweep_phase")
        grid = np.linspace(-math.pi, math.pi, int(sweep_block.get("phase_points", 81)))
        res = sweep_phase(scenario, sweep_block.get("N_values", [0, 1, 10]),
                          phase_grid=grid, threads=args.threads)
        header = ["phase_rad"] + [f"F_N{n}" for n in res.N_values] \
            + [f"F_amp_N{n}" for n in res.N_values]
        rows = []
        for k, ph in enumerate(res.phase_grid):
            rows.append([float(ph)] + [float(res.fidelity[i, k]) for i in range(len(res.N_values))]
                        + [float(res.fidelity_amplitude[i, k]) for i in range(len(res.N_values))])
        payload = {"columns": header, "rows": rows,
                   "peak_phase": res.peak_phase, "peak_value": res.peak_value,
                   "fidelity_convention": FIDELITY_CONVENTION,
                   "delta_bar_hz": scenario.delta_bar / TWO_PI,
                   "t_swap_s": scenario.t_swap}
        _emit(args, data, args.scenario, "transfer_phase", header, rows, payload)
        for N, ph, v in zip(res.N_values, res.peak_phase, res.peak_value):
            print(f"N={N}: peak F({FIDELITY_CONVENTION}) = {v:.4f} at phase {ph:+.3f} rad")
        return 0

    result = run_transfer(scenario)
    header = (["t_s", "F_to_mirror", "F_to_bec", "F_amp_to_mirror", "F_amp_to_bec"]
              + ["var_X1", "var_P1", "var_X2", "var_P2"]
              + ["rot_var_X1", "rot_var_P1", "rot_var_X2", "rot_var_P2"])
    rows = []
    for i, t in enumerate(result.times):
        rows.append([float(t), float(result.fidelity_to_mirror[i]),
                     float(result.fidelity_to_bec[i]),
                     float(result.fidelity_amplitude_to_mirror[i]),
                     float(result.fidelity_amplitude_to_bec[i])]
                    + [float(x) for x in result.variances[i]]
                    + [float(x) for x in result.variances_corotating[i]])
    swaps = swap_fidelities(result)
    payload = {"columns": header, "rows": rows, "t_swap_s": result.t_swap,
               "swap_fidelities": [{"t_s": t, "F": f, "F_amp": fa}
                                   for t, f, fa in swaps],
               "fidelity_convention": FIDELITY_CONVENTION,
               "delta_bar_hz": scenario.delta_bar / TWO_PI,
               "omega_c_hz": scenario.omega_c / TWO_PI}
    _emit(args, data, args.scenario, "transfer", header, rows, payload)
    for t, f, fa in swaps:
        print(f"swap at t={t:.6g} s: F={f:.5f} F_amp={fa:.5f}")
    return 0


def _cmd_fwm(args):
    data = _load_scenario(args.scenario)
    system = system_from_dict(data["system"])
    noise = _noise_from_block(data.get("noise"))
    block = _block(data, "fwm",
                   required_keys=("init", "t_end_s", "n_steps"),
                   allowed_keys=("n_traj", "noise_on", "dump_trajectories"))
    sols = solve_quadratic(system)
    back = self_consistent_frequencies(system, sols[0].delta_bar, mode="weak",
                                       solution=sols[0])
    init = [complex(re, im) for re, im in block["init"]]
    t_grid = np.linspace(0.0, float(block["t_end_s"]), int(block["n_steps"]) + 1)
    seed = args.seed if args.seed is not None else int(data.get("seed", 0))
    ens = integrate_fwm(system, back, init, t_grid, noise=noise,
                        noise_on=bool(block.get("noise_on", False)),
                        n_traj=int(block.get("n_traj", 1)), seed=seed,
                        threads=args.threads)
    n = system.n_modes
    header = (["t_s"] + [f"mean_occ_{j}" for j in range(n)]
              + [f"mean_re_{j}" for j in range(n)] + [f"mean_im_{j}" for j in range(n)])
    occ = ens.mean_occupation
    amp = ens.mean_amplitude
    rows = []
    for i, t in enumerate(ens.times):
        rows.append([float(t)] + [float(x) for x in occ[i]]
                    + [float(x.real) for x in amp[i]] + [float(x.imag) for x in amp[i]])
    payload = {"columns": header, "rows": rows, "n_traj": ens.n_traj, "seed": ens.seed}
    if block.get("dump_trajectories", False):
        payload["trajectories"] = [
            [[float(b.real), float(b.imag)] for b in traj[-1]] for traj in ens.samples]
    _emit(args, data, args.scenario, "fwm", header, rows, payload)
    return 0


def _cmd_validate(args):
    result = calibration.calibrate_diffusion()
    convergence = []
    for frac in (0.1, 0.05, 0.02):
        full, red = single_mode_phonon_pair(calibration.C_MECH, calibration.C_OPT,
                                            thermal=False, g_over_kappa=frac)
        convergence.append({"g_over_kappa": frac, "phonon_full": full,
                            "phonon_reduced": red,
                            "rel_dev": abs(red - full) / abs(full)})
    payload = {
        "calibration": {
            "c_mech": result.c_mech, "c_opt": result.c_opt,
            "vacuum_rel_error": result.vacuum_rel_error,
            "thermal_rel_error": result.thermal_rel_error,
            "within_tolerance": result.within_tolerance,
            "frozen_c_mech": calibration.C_MECH,
            "frozen_c_opt": calibration.C_OPT,
            "grid": [list(r) for r in result.table],
        },
        "convergence": convergence,
        "monotone": all(convergence[i]["rel_dev"] > convergence[i + 1]["rel_dev"]
                        for i in range(len(convergence) - 1)),
    }
    meta = {"tool": "optomech", "version": __version__, "seed": args.seed,
            "c_mech": calibration.C_MECH, "c_opt": calibration.C_OPT,
            "config_hash": "validate"}
    path = os.path.join(args.out_dir or os.environ.get(OUT_DIR_ENV) or ".",
                        "validate.json")
    _write_json(path, meta, payload)
    print(f"wrote {path}")
    print(f"calibrated (c_mech, c_opt) = ({result.c_mech}, {result.c_opt}); "
          f"errors vacuum {result.vacuum_rel_error:.3%}, "
          f"thermal {result.thermal_rel_error:.3%}")
    ok = (result.c_mech == calibration.C_MECH and result.c_opt == calibration.C_OPT
          and result.within_tolerance and payload["monotone"])
    return 0 if ok else 3


def bundled_scenario(name):
    """Path of a scenario bundled with the package (fig2 ... fig8)."""
    here = os.path.dirname(os.path.abspath(__file__))
    return os.path.join(here, "scenarios", f"{name}.json")


def _resolve_scenario(arg):
    if arg and not os.path.exists(arg) and not os.path.sep in arg \
            and not arg.endswith(".json"):
        candidate = bundled_scenario(arg)
        if os.path.exists(candidate):
            return candidate
    return arg


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="optomech",
        description="Optically mediated multimode optomechanics toolkit")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed override")
    parser.add_argument("--out-dir", default=None,
                        help=f"output directory (default: ${OUT_DIR_ENV} or cwd)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--threads", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("meanfield", _cmd_meanfield), ("sweep", _cmd_sweep),
                     ("match", _cmd_match), ("evolve", _cmd_evolve),
                     ("transfer", _cmd_transfer), ("fwm", _cmd_fwm)):
        p = sub.add_parser(name)
        p.add_argument("scenario", help="scenario JSON path or bundled name")
        p.set_defaults(func=fn)
    pv = sub.add_parser("validate")
    pv.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    if hasattr(args, "scenario"):
        args.scenario = _resolve_scenario(args.scenario)
    try:
        return args.func(args)
    except OptomechError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "field", None):
            err["field"] = exc.field
        if getattr(exc, "path", None):
            err["path"] = exc.path
        print(json.dumps(err), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
