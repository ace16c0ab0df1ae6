"""Command-line front end: solve / sweep / analyze / units / oracle-compare / bench / report.

Run configurations are single JSON documents with explicit fields::

    {"model": "cauchy" | "quasirelativistic" | "nonrelativistic",
     "mass": 1.0, "potential": "harmonic" | "finite_well" | "none",
     "V0": 5.0, "a": 50.0, "dx": 0.001, "h": 0.001, "n_states": 5,
     "k_max": null, "tol": 1e-6, "window": 100, "backend": "auto"}

Exit codes: 0 success, 1 usage/config error, 2 completed with unconverged
states (results are still written and flagged).  Floating-point output uses
the shortest round-trip decimal representation.  The environment variable
``LEVYSPEC_WORKERS`` overrides the sweep worker count.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .analysis import (
    ELECTRON_COMPTON_M,
    FitResult,
    bound_state_count,
    fit_line,
    fit_power,
    operator_limit_report,
    oscillator_from_dimensional,
    oscillator_to_dimensional,
    well_unit_scales,
)
from .errors import LevySpecError
from .grid import GridFunction, make_grid
from .kernels import KernelSpec
from .operators import (
    BACKENDS,
    HamiltonianSpec,
    LocalKinetic,
    PotentialSpec,
    apply_nonlocal_batch,
    kernel_table_for,
)
from .oracle import assemble_dense, dense_eigensolve
from .propagator import SolverConfig, run_spectrum

WORKERS_ENV = "LEVYSPEC_WORKERS"


class ConfigError(LevySpecError, ValueError):
    """Malformed run configuration; carries the offending field name."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field {field!r}: {message}")


_MODELS = ("cauchy", "quasirelativistic", "nonrelativistic")
_POTENTIALS = ("harmonic", "finite_well", "none")

_DEFAULTS = {
    "mass": 0.0,
    "V0": 0.0,
    "h": 1e-3,
    "n_states": 5,
    "k_max": None,
    "tol": 1e-6,
    "window": 100,
    "backend": "auto",
}


def parse_config(doc: dict) -> tuple[SolverConfig, dict]:
    """Validate a config document; returns (SolverConfig, normalized echo)."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    known = {"model", "mass", "potential", "V0", "a", "dx", "h", "n_states", "k_max", "tol", "window", "backend"}
    for key in doc:
        if key not in known:
            raise ConfigError(key, "unknown field")
    merged = dict(_DEFAULTS)
    merged.update(doc)
    for required in ("model", "potential", "a", "dx"):
        if required not in merged:
            raise ConfigError(required, "missing required field")

    model = merged["model"]
    if model not in _MODELS:
        raise ConfigError("model", f"must be one of {_MODELS}")
    potential = merged["potential"]
    if potential not in _POTENTIALS:
        raise ConfigError("potential", f"must be one of {_POTENTIALS}")

    def _positive(name, allow_zero=False):
        value = merged[name]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(name, "must be a number")
        if value < 0 or (value == 0 and not allow_zero):
            raise ConfigError(name, "must be positive")
        return float(value)

    a = _positive("a")
    dx = _positive("dx")
    h = _positive("h")
    tol = _positive("tol")
    v0 = _positive("V0", allow_zero=True)
    mass = _positive("mass", allow_zero=True)
    n_states = merged["n_states"]
    if not isinstance(n_states, int) or isinstance(n_states, bool) or n_states < 1:
        raise ConfigError("n_states", "must be an integer >= 1")
    window = merged["window"]
    if not isinstance(window, int) or window < 1:
        raise ConfigError("window", "must be an integer >= 1")
    k_max = merged["k_max"]
    if k_max is not None and (not isinstance(k_max, int) or k_max < window):
        raise ConfigError("k_max", "must be an integer >= window (or null)")
    backend = merged["backend"]
    if backend not in BACKENDS:
        raise ConfigError("backend", f"must be one of {BACKENDS}")

    if model == "cauchy":
        kinetic = KernelSpec("cauchy")
    elif model == "quasirelativistic":
        if mass <= 0:
            raise ConfigError("mass", "quasirelativistic model requires mass > 0")
        kinetic = KernelSpec("quasirelativistic", mass=mass)
    else:
        if mass <= 0:
            raise ConfigError("mass", "nonrelativistic model requires mass > 0")
        kinetic = LocalKinetic(mass=mass)

    pot = PotentialSpec(kind=potential, v0=v0)
    try:
        grid = make_grid(a, dx)
    except LevySpecError as exc:
        raise ConfigError("a" if a <= 0 else "dx", str(exc)) from exc
    config = SolverConfig(
        hamiltonian=HamiltonianSpec(kinetic=kinetic, potential=pot),
        grid=grid,
        n_states=n_states,
        h=h,
        k_max=k_max,
        convergence_tol=tol,
        convergence_window=window,
        backend=backend,
    )
    try:
        config.validate()
    except LevySpecError as exc:
        raise ConfigError("h", str(exc)) from exc
    echo = {
        "model": model,
        "mass": mass,
        "potential": potential,
        "V0": v0,
        "a": a,
        "dx": dx,
        "h": h,
        "n_states": n_states,
        "k_max": k_max,
        "tol": tol,
        "window": window,
        "backend": backend,
    }
    return config, echo


def load_config(path: str) -> tuple[SolverConfig, dict]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", f"line {exc.lineno}: {exc.msg}") from exc
    return parse_config(doc)


def _write_energies_csv(path, result):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "E", "converged", "iterations"])
        for i, (e, flag) in enumerate(zip(result.energies, result.converged), start=1):
            writer.writerow([i, repr(float(e)), int(flag), result.iterations_used])


def _write_eigenfunctions_csv(path, result):
    x = result.config.grid.x
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x"] + [f"psi_{i}" for i in range(1, len(result.eigenfunctions) + 1)])
        columns = [f.values for f in result.eigenfunctions]
        for j in range(x.size):
            writer.writerow([repr(float(x[j]))] + [repr(float(col[j])) for col in columns])


def _write_history_csv(path, result):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        n = result.history.shape[1]
        writer.writerow(["k"] + [f"E_{i}" for i in range(1, n + 1)])
        for k, row in enumerate(result.history, start=1):
            writer.writerow([k] + [repr(float(e)) for e in row])


def run_solve(config: SolverConfig, echo: dict, out_dir: str, progress=None) -> tuple[int, dict]:
    """Execute one run and write energies/eigenfunctions/history/manifest."""
    os.makedirs(out_dir, exist_ok=True)
    timings = {}
    t0 = time.perf_counter()
    result = run_spectrum(config, progress=progress)
    timings["solve_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    outputs = {
        "energies": os.path.join(out_dir, "energies.csv"),
        "eigenfunctions": os.path.join(out_dir, "eigenfunctions.csv"),
        "history": os.path.join(out_dir, "history.csv"),
    }
    _write_energies_csv(outputs["energies"], result)
    _write_eigenfunctions_csv(outputs["eigenfunctions"], result)
    _write_history_csv(outputs["history"], result)
    timings["write_s"] = time.perf_counter() - t0

    all_converged = bool(result.converged.all())
    manifest = {
        "version": __version__,
        "config": echo,
        "grid": {
            "a": config.grid.a,
            "dx_requested": echo["dx"],
            "dx_actual": config.grid.dx,
            "n_points": config.grid.n_points,
        },
        "outputs": {k: os.path.basename(v) for k, v in outputs.items()},
        "timings": timings,
        "iterations_used": result.iterations_used,
        "all_converged": all_converged,
        "energies": [float(e) for e in result.energies],
        "converged": [bool(b) for b in result.converged],
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return (0 if all_converged else 2), manifest


def _cmd_solve(args) -> int:
    config, echo = load_config(args.config)
    progress = sys.stdout if args.progress else None
    code, manifest = run_solve(config, echo, args.out, progress=progress)
    print(f"wrote {args.out} (iterations={manifest['iterations_used']}, converged={manifest['all_converged']})")
    return code


def _sweep_values(raw: str) -> list[float]:
    values = [v for v in (s.strip() for s in raw.split(",")) if v]
    if not values:
        raise ConfigError("values", "empty sweep value list")
    return [float(v) for v in values]


def _sweep_one(task):
    base_doc, param, value, out_dir = task
    doc = dict(base_doc)
    if param == "mass":
        doc["mass"] = value
    elif param == "V0":
        doc["V0"] = value
    else:
        doc["a"] = value
    try:
        config, echo = parse_config(doc)
        code, manifest = run_solve(config, echo, out_dir)
        return value, code, manifest, None
    except LevySpecError as exc:
        return value, 1, None, str(exc)


def _cmd_sweep(args) -> int:
    try:
        with open(args.config) as fh:
            base_doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    parse_config(base_doc)  # validate the base before spawning work
    values = _sweep_values(args.values)
    os.makedirs(args.out, exist_ok=True)

    tasks = [
        (base_doc, args.param, v, os.path.join(args.out, f"run_{i:03d}"))
        for i, v in enumerate(values)
    ]
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_one, tasks))
    else:
        outcomes = [_sweep_one(t) for t in tasks]
    records = {value: (code, manifest) for value, code, manifest, _err in outcomes}
    failures = {repr(value): err for value, _code, _m, err in outcomes if err is not None}

    aggregate = os.path.join(args.out, "sweep.csv")
    with open(aggregate, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([args.param, "n", "E", "converged"])
        for value in values:
            code, manifest = records[value]
            if manifest is None:
                continue
            for i, (e, flag) in enumerate(zip(manifest["energies"], manifest["converged"]), start=1):
                writer.writerow([repr(float(value)), i, repr(e), int(flag)])
    sweep_manifest = {
        "version": __version__,
        "param": args.param,
        "values": values,
        "runs": {repr(v): {"exit": records[v][0], "dir": f"run_{i:03d}"} for i, v in enumerate(values)},
        "failures": failures,
    }
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(sweep_manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote {aggregate}")
    return 2 if any(records[v][0] == 2 for v in values) else 0


def _read_sweep_csv(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        for row in reader:
            rows.append((float(row[0]), int(row[1]), float(row[2])))
    return header[0], rows


def _fit_to_dict(fit: FitResult, names=("slope", "intercept")) -> dict:
    return {
        names[0]: fit.slope,
        names[1]: fit.intercept,
        f"{names[0]}_err": fit.slope_err,
        f"{names[1]}_err": fit.intercept_err,
        "n_points": fit.n_points,
    }


def _cmd_analyze(args) -> int:
    report: dict = {"mode": args.mode}
    if args.mode in ("line-fit", "power-fit"):
        if not args.input:
            print("error: --input sweep CSV required for fit modes", file=sys.stderr)
            return 1
        param, rows = _read_sweep_csv(args.input)
        if args.mode == "line-fit":
            # ln E_n vs ln(2m) for the selected state, across the sweep parameter
            pts = [(np.log(2.0 * p), np.log(e)) for p, n, e in rows if n == args.state and e > 0]
            if len(pts) < 2:
                print("error: not enough points for the selected state", file=sys.stderr)
                return 1
            fit = fit_line(pts)
            report["param"] = param
            report["state"] = args.state
            report["fit"] = _fit_to_dict(fit)
            # label recovered from the intercept b = ln(2n-1)
            report["recovered_label"] = (float(np.exp(fit.intercept)) + 1.0) / 2.0
        else:
            by_param: dict = {}
            for p, n, e in rows:
                by_param.setdefault(p, []).append((n, e))
            fits = {}
            for p, pts in sorted(by_param.items()):
                if len(pts) < 2:
                    continue
                fits[repr(p)] = _fit_to_dict(fit_power(pts), names=("exponent", "prefactor"))
            if not fits:
                print("error: not enough points per parameter value", file=sys.stderr)
                return 1
            report["param"] = param
            report["fits"] = fits
    elif args.mode == "count":
        if args.mass is None or args.v0 is None:
            print("error: count mode needs --mass and --v0", file=sys.stderr)
            return 1
        report["mass"] = args.mass
        report["V0"] = args.v0
        report["bound_states"] = bound_state_count(args.mass, args.v0)
    else:  # limits
        masses = _sweep_values(args.masses) if args.masses else [1.0, 0.1, 0.01]
        grid = make_grid(args.a, args.dx)
        g = GridFunction(grid, np.exp(-0.5 * grid.x**2))
        rows = operator_limit_report(masses, g)
        report["test_function"] = "exp(-x^2/2)"
        report["grid"] = {"a": args.a, "dx": args.dx}
        report["limits"] = [
            {"mass": m, "r_nr": r_nr, "r_ur": r_ur} for (m, r_nr, r_ur) in rows
        ]
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _cmd_units(args) -> int:
    report: dict = {}
    if args.b is not None:
        scales = well_unit_scales(args.b, args.compton)
        report["well"] = {
            "half_width_m": scales.half_width_m,
            "energy_unit_ev": scales.energy_unit_ev,
            "hbar_c_ev_m": scales.hbar_c_ev_m,
        }
        if scales.mass_parameter is not None:
            report["well"]["compton_wavelength_m"] = scales.compton_wavelength_m
            report["well"]["mass_parameter"] = scales.mass_parameter
    if args.osc_k is not None:
        osc: dict = {"k_ev_per_m2": args.osc_k}
        if args.to_dimensional is not None:
            osc["E_check"] = args.to_dimensional
            osc["E_ev"] = oscillator_to_dimensional(args.to_dimensional, args.osc_k)
        if args.from_dimensional is not None:
            osc["E_ev_in"] = args.from_dimensional
            osc["E_check_out"] = oscillator_from_dimensional(args.from_dimensional, args.osc_k)
        report["oscillator"] = osc
    if not report:
        print("error: nothing to convert (give --b and/or --osc-k)", file=sys.stderr)
        return 1
    print(json.dumps(report, indent=2))
    return 0


def _cmd_oracle_compare(args) -> int:
    config, echo = load_config(args.config)
    t0 = time.perf_counter()
    result = run_spectrum(config)
    dense = assemble_dense(config.hamiltonian, config.grid, backend=config.backend)
    eigenvalues, _vectors = dense_eigensolve(dense, config.n_states)
    elapsed = time.perf_counter() - t0
    rows = []
    ok = True
    for i, (e_prop, e_dense) in enumerate(zip(result.energies, eigenvalues), start=1):
        gap = abs(float(e_prop) - float(e_dense))
        allowed = max(1e-2, 5.0 * config.h * float(e_prop) ** 2)
        rows.append(
            {"n": i, "propagator": float(e_prop), "dense": float(e_dense), "gap": gap, "allowed": allowed,
             "within": gap <= allowed}
        )
        ok = ok and gap <= allowed
    report = {"version": __version__, "config": echo, "elapsed_s": elapsed, "states": rows, "all_within": ok}
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0 if ok else 2


def _cmd_bench(args) -> int:
    config, echo = load_config(args.config)
    if not isinstance(config.hamiltonian.kinetic, KernelSpec):
        print("error: bench requires a nonlocal kernel model", file=sys.stderr)
        return 1
    table = kernel_table_for(config.hamiltonian.kinetic, config.grid)
    rng = np.random.default_rng(0)
    f = rng.standard_normal((1, config.grid.n_points))
    results = {}
    for backend in ("direct", "fft"):
        apply_nonlocal_batch(table, f, backend)  # warm the plan cache
        t0 = time.perf_counter()
        for _ in range(args.repeats):
            out = apply_nonlocal_batch(table, f, backend)
        results[backend] = (time.perf_counter() - t0) / args.repeats
    ref_direct = apply_nonlocal_batch(table, f, "direct")
    ref_fft = apply_nonlocal_batch(table, f, "fft")
    scale = float(np.abs(ref_direct).max())
    report = {
        "version": __version__,
        "config": echo,
        "n_points": config.grid.n_points,
        "kernel_offsets": int(table.weights.size),
        "seconds_per_apply": results,
        "speedup": results["direct"] / results["fft"],
        "max_rel_disagreement": float(np.abs(ref_direct - ref_fft).max()) / scale,
    }
    print(json.dumps(report, indent=2))
    return 0


def _cmd_report(args) -> int:
    from .report import render_run

    written = render_run(args.run, args.out or args.run)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levyspec", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"levyspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one configuration")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--out", required=True)
    p_solve.add_argument("--progress", action="store_true", help="stream k,E_1..E_n lines to stdout")
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True, choices=("mass", "V0", "a"))
    p_sweep.add_argument("--values", required=True, help="comma-separated list")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_an = sub.add_parser("analyze", help="fits, bound-state counts and limit tables")
    p_an.add_argument("--mode", required=True, choices=("line-fit", "power-fit", "count", "limits"))
    p_an.add_argument("--input", help="sweep CSV (fit modes)")
    p_an.add_argument("--state", type=int, default=1, help="state index for line-fit")
    p_an.add_argument("--mass", type=float)
    p_an.add_argument("--v0", type=float)
    p_an.add_argument("--masses", help="comma-separated masses (limits mode)")
    p_an.add_argument("--a", type=float, default=8.0)
    p_an.add_argument("--dx", type=float, default=0.001)
    p_an.add_argument("--out")
    p_an.set_defaults(func=_cmd_analyze)

    p_units = sub.add_parser("units", help="dimensional conversions")
    p_units.add_argument("--b", type=float, help="well half-width in meters")
    p_units.add_argument("--compton", type=float, default=None,
                         help=f"reduced Compton wavelength in meters (electron: {ELECTRON_COMPTON_M})")
    p_units.add_argument("--osc-k", type=float, help="spring constant (eV/m^2)")
    p_units.add_argument("--to-dimensional", type=float, help="dimensionless oscillator energy")
    p_units.add_argument("--from-dimensional", type=float, help="oscillator energy in eV")
    p_units.set_defaults(func=_cmd_units)

    p_oc = sub.add_parser("oracle-compare", help="propagator vs dense diagonalization")
    p_oc.add_argument("--config", required=True)
    p_oc.add_argument("--out")
    p_oc.set_defaults(func=_cmd_oracle_compare)

    p_bench = sub.add_parser("bench", help="convolution backend timing")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--repeats", type=int, default=5)
    p_bench.set_defaults(func=_cmd_bench)

    p_rep = sub.add_parser("report", help="render figures for a solve output directory")
    p_rep.add_argument("--run", required=True, help="directory written by solve")
    p_rep.add_argument("--out", help="output directory (default: run directory)")
    p_rep.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except LevySpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
