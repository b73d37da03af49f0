"""Batch driver: JSON config in, machine-readable JSON report + CSV plot data out.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 invalid
input (config, parameters, flags), 3 internal/IO error.  Reports are
byte-stable for a fixed (config, seed): volatile data such as wall time
goes to stderr, never into report.json.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import herglotz, rigidity, shiftsim
from .disc import DiscGrid, default_grid, mobius_phi
from .factorization import (
    DEFAULT_T_LIST,
    FactorParams,
    pair_from_params,
    random_params,
    recover_params,
    verify_factorization,
    verify_master,
)
from .operators import im_part, matrix_from_jsonable, operator_norm

__all__ = ["main"]

EXIT_PASS, EXIT_FAIL, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2, 3

COMMANDS = ("rigidity-check", "factorize-verify", "recover-params", "herglotz-analyze", "shift-sim")

DEFAULT_TOLERANCES = {
    "rigidity-check": {"eps_holo": 1e-6, "eps_const": 1e-8},
    "factorize-verify": {"factorization": 1e-8, "master": 1e-10},
    "recover-params": {"recover": 1e-10, "residual": 1e-9},
    "herglotz-analyze": {"moment_symmetry": 1e-10},
    "shift-sim": {"conjugation": 1e-6, "lower_triangle": 1e-8, "gram": 1e-8},
}


class InvalidInput(ValueError):
    """Configuration or input data violates the documented contract."""


def _require_keys(cfg, required, optional, where):
    missing = [k for k in required if k not in cfg]
    unknown = [k for k in cfg if k not in required and k not in optional]
    if missing:
        raise InvalidInput(f"{where}: missing required field(s) {missing}")
    if unknown:
        raise InvalidInput(f"{where}: unknown field(s) {unknown}")


def _check(name, residual, tolerance):
    return {
        "name": name,
        "residual": float(residual),
        "tolerance": float(tolerance),
        "passed": bool(residual <= tolerance),
    }


def _verdict_check(name, expected, actual):
    return {"name": name, "expected": expected, "actual": actual, "passed": bool(expected == actual)}


def _load_params(cfg, where):
    if ("params" in cfg) == ("params_file" in cfg):
        raise InvalidInput(f"{where}: provide exactly one of 'params' or 'params_file'")
    data = cfg.get("params")
    if data is None:
        with open(cfg["params_file"]) as fh:
            data = json.load(fh)
    try:
        return FactorParams.from_jsonable(data)
    except ValueError as exc:
        raise InvalidInput(f"{where}: {exc}") from exc


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row) + "\n")


def _run_rigidity(cfg, grid, tols, seed, out_dir, emit_plots):
    _require_keys(cfg, ["command", "function"], ["expect_verdict"], "rigidity-check")
    try:
        F = rigidity.resolve_function(cfg["function"])
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    report = rigidity.rigidity_verdict(F, grid, eps_holo=tols["eps_holo"], eps_const=tols["eps_const"])
    expected = cfg.get("expect_verdict", rigidity.CONSTANT_CONFIRMED)
    checks = [_verdict_check("verdict", expected, report.verdict)]
    verdicts = {
        "verdict": report.verdict,
        "strip_ok": report.strip_ok,
        "holo_residual": float(report.holo_residual),
        "constancy_deviation": float(report.constancy_deviation),
    }
    artifacts = []
    if emit_plots:
        h = grid.stencil_h
        g = rigidity.g_transform(F)
        rows = [
            (float(z.real), float(z.imag), float(np.max(np.abs(rigidity.wirtinger_dbar(g, z, h)))))
            for z in grid.points()
        ]
        name = "rigidity_residuals.csv"
        _write_csv(os.path.join(out_dir, name), ["re_z", "im_z", "dbar_residual"], rows)
        artifacts.append(name)
    return checks, verdicts, artifacts


def _run_factorize(cfg, grid, tols, seed, out_dir, emit_plots):
    _require_keys(
        cfg, ["command"], ["params", "params_file", "random", "t_list"], "factorize-verify"
    )
    t_list = tuple(cfg.get("t_list", DEFAULT_T_LIST))
    if "random" in cfg:
        if "params" in cfg or "params_file" in cfg:
            raise InvalidInput("factorize-verify: 'random' excludes explicit params")
        if seed is None:
            raise InvalidInput("factorize-verify: randomized runs require --seed")
        spec = dict(cfg["random"])
        _require_keys(spec, ["dim"], ["count"], "factorize-verify.random")
        rng = np.random.default_rng(seed)
        params_list = [random_params(rng, int(spec["dim"])) for _ in range(int(spec.get("count", 1)))]
    else:
        params_list = [_load_params(cfg, "factorize-verify")]

    checks, artifacts = [], []
    worst = {"product": 0.0, "commutation": 0.0, "contractivity": 0.0, "semigroup": 0.0, "master": 0.0}
    for params in params_list:
        rep = verify_factorization(params, t_list=t_list, grid=grid)
        worst["product"] = max(worst["product"], rep.product_residual)
        worst["commutation"] = max(worst["commutation"], rep.commutation_residual)
        worst["contractivity"] = max(worst["contractivity"], rep.contractivity_excess)
        worst["semigroup"] = max(worst["semigroup"], rep.semigroup_residual)
        master_res, _ = verify_master(pair_from_params(params), grid=grid)
        worst["master"] = max(worst["master"], master_res)
    tol = tols["factorization"]
    checks.append(_check("product_identity", worst["product"], tol))
    checks.append(_check("commutation", worst["commutation"], tol))
    checks.append(_check("contractivity", worst["contractivity"], tol))
    checks.append(_check("semigroup_law", worst["semigroup"], tol))
    checks.append(_check("master_equation", worst["master"], tols["master"]))
    if emit_plots:
        from .operators import inverse_cayley

        pair = pair_from_params(params_list[0])
        eye = np.eye(params_list[0].dim)
        rows = []
        for z in grid.points():
            res = operator_norm(
                inverse_cayley(pair.psi1(z)) + inverse_cayley(pair.psi2(z)) - mobius_phi(z) * eye
            )
            rows.append((float(abs(z)), float(np.angle(z)), float(res)))
        name = "factorize_residuals.csv"
        _write_csv(os.path.join(out_dir, name), ["radius", "angle", "master_residual"], rows)
        artifacts.append(name)
    return checks, {}, artifacts


def _run_recover(cfg, grid, tols, seed, out_dir, emit_plots):
    _require_keys(cfg, ["command"], ["params", "params_file"], "recover-params")
    params = _load_params(cfg, "recover-params")
    pair = pair_from_params(params)
    recovered, residual = recover_params(pair, grid=grid)
    dev = max(
        float(np.max(np.abs(recovered.A - params.A))),
        float(np.max(np.abs(recovered.B - params.B))),
    )
    checks = [
        _check("roundtrip_params", dev, tols["recover"]),
        _check("exponential_form_residual", residual, tols["residual"]),
    ]
    return checks, {}, []


def _herglotz_function(cfg):
    if ("function" in cfg) == ("params" in cfg):
        raise InvalidInput("herglotz-analyze: provide exactly one of 'function' or 'params'")
    if "function" in cfg:
        try:
            return rigidity.resolve_function(cfg["function"])
        except ValueError as exc:
            raise InvalidInput(str(exc)) from exc
    data = cfg["params"]
    try:
        A = matrix_from_jsonable(data["A"], self_adjoint=True, name="A")
        B = matrix_from_jsonable(data["B"], self_adjoint=True, name="B")
    except (KeyError, ValueError) as exc:
        raise InvalidInput(f"herglotz-analyze params: {exc}") from exc
    return rigidity.OperatorFunction(
        A.shape[0], lambda z: herglotz.herglotz_reconstruct(B, A, z), "atom-model"
    )


def _run_herglotz(cfg, grid, tols, seed, out_dir, emit_plots):
    _require_keys(
        cfg,
        ["command"],
        ["function", "params", "r", "n_samples", "n_moments", "tol_atom", "expect_concentrated"],
        "herglotz-analyze",
    )
    h = _herglotz_function(cfg)
    r = float(cfg.get("r", herglotz.DEFAULT_R))
    N = int(cfg.get("n_samples", herglotz.DEFAULT_N))
    M = int(cfg.get("n_moments", herglotz.DEFAULT_M))
    approx, concentrated = herglotz.analyze(h, r=r, N=N, M=M, tol_atom=cfg.get("tol_atom"))
    sym = max(
        float(np.max(np.abs(approx.moment(-n) - approx.moment(n).conj().T))) for n in range(M + 1)
    )
    checks = [_check("moment_symmetry", sym, tols["moment_symmetry"])]
    expected = bool(cfg.get("expect_concentrated", True))
    checks.append(_verdict_check("concentrated_at_1", expected, concentrated))
    verdicts = {
        "concentrated": concentrated,
        "leak_mass": float(approx.leak_mass),
        "atom_norm": float(operator_norm(approx.atom_mass_at_1)),
    }
    artifacts = []
    if emit_plots:
        atom = approx.atom_mass_at_1
        rows = [
            (n, float(operator_norm(approx.moment(n))), float(operator_norm(approx.moment(n) - atom)))
            for n in range(-M, M + 1)
        ]
        name = "moment_profile.csv"
        _write_csv(os.path.join(out_dir, name), ["n", "moment_norm", "distance_to_atom"], rows)
        artifacts.append(name)
        thetas, mass = herglotz.arc_mass_profile(approx)
        name2 = "arc_mass_profile.csv"
        _write_csv(
            os.path.join(out_dir, name2),
            ["theta", "fejer_mass_norm"],
            [(float(t), float(m)) for t, m in zip(thetas, mass)],
        )
        artifacts.append(name2)
    return checks, verdicts, artifacts


def _run_shiftsim(cfg, grid, tols, seed, out_dir, emit_plots):
    _require_keys(cfg, ["command"], ["t", "order", "n_check"], "shift-sim")
    t = float(cfg.get("t", 1.0))
    order = int(cfg.get("order", 32))
    n_check = int(cfg.get("n_check", 8))
    quad = shiftsim.laguerre_quadrature(basis_order=order, breakpoints=(t,) if t > 0 else ())
    result = shiftsim.conjugation_check(t, n_check=n_check, quad=quad)
    checks = [
        _check("gram_residual", quad.gram_residual, tols["gram"]),
        _check("conjugation_elements", result.residual, tols["conjugation"]),
        _check("lower_triangle", result.lower_violation, tols["lower_triangle"]),
    ]
    verdicts = {"sign_convention": result.convention}
    artifacts = []
    if emit_plots:
        coeffs = shiftsim.taylor_varphi_t(t, order)
        name = "taylor_coefficients.csv"
        _write_csv(
            os.path.join(out_dir, name),
            ["n", "c_n"],
            [(n, float(c)) for n, c in enumerate(coeffs)],
        )
        artifacts.append(name)
    return checks, verdicts, artifacts


_RUNNERS = {
    "rigidity-check": _run_rigidity,
    "factorize-verify": _run_factorize,
    "recover-params": _run_recover,
    "herglotz-analyze": _run_herglotz,
    "shift-sim": _run_shiftsim,
}


def _parse_tol_overrides(pairs, command, base=None):
    tols = dict(base if base is not None else DEFAULT_TOLERANCES[command])
    for item in pairs or ():
        if "=" not in item:
            raise InvalidInput(f"--tol expects NAME=VALUE, got {item!r}")
        name, _, value = item.partition("=")
        if name not in tols:
            raise InvalidInput(f"unknown tolerance {name!r} for {command}; known: {sorted(tols)}")
        try:
            tols[name] = float(value)
        except ValueError as exc:
            raise InvalidInput(f"--tol {name}: {value!r} is not a number") from exc
    return tols


def _build_grid(cfg, grid_radii_flag):
    spec = dict(cfg.get("grid", {}))
    _require_keys(spec, [], ["radii", "n_angles", "stencil_h"], "grid")
    radii = spec.get("radii")
    if grid_radii_flag:
        try:
            radii = [float(v) for v in grid_radii_flag.split(",")]
        except ValueError as exc:
            raise InvalidInput(f"--grid-radii: {exc}") from exc
    kwargs = {}
    if radii is not None:
        kwargs["radii"] = tuple(radii)
    if "n_angles" in spec:
        kwargs["n_angles"] = int(spec["n_angles"])
    if "stencil_h" in spec:
        kwargs["stencil_h"] = float(spec["stencil_h"])
    try:
        return default_grid(**kwargs)
    except ValueError as exc:
        raise InvalidInput(f"grid: {exc}") from exc


def _thread_cap():
    raw = os.environ.get("HOLO_LAB_THREADS")
    if raw is None:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidInput(f"HOLO_LAB_THREADS must be an integer, got {raw!r}")
    if cap < 1:
        raise InvalidInput("HOLO_LAB_THREADS must be >= 1")
    return cap


def run(config, seed=None, out_dir=".", grid_radii=None, tol_overrides=None, emit_plots=False):
    """Execute one config and return (report dict, exit code)."""
    _thread_cap()  # validate the cap; all current kernels are single-threaded
    command = config.get("command")
    if command not in COMMANDS:
        raise InvalidInput(f"unknown command {command!r}; known: {list(COMMANDS)}")
    cfg = {k: v for k, v in config.items() if k != "grid"}
    grid = _build_grid(config, grid_radii)
    cfg_tols = dict(config.get("tolerances", {}))
    unknown = sorted(set(cfg_tols) - set(DEFAULT_TOLERANCES[command]))
    if unknown:
        raise InvalidInput(f"unknown tolerance name(s) {unknown} for {command}")
    base = dict(DEFAULT_TOLERANCES[command])
    base.update({k: float(v) for k, v in cfg_tols.items()})
    tols = _parse_tol_overrides(tol_overrides, command, base=base)  # flags beat config
    cfg.pop("tolerances", None)
    checks, verdicts, artifacts = _RUNNERS[command](cfg, grid, tols, seed, out_dir, emit_plots)
    overall = all(c["passed"] for c in checks)
    report = {
        "command": command,
        "config": config,
        "seed": seed,
        "tolerances": tols,
        "checks": checks,
        "verdicts": verdicts,
        "artifacts": sorted(artifacts),
        "overall_pass": overall,
    }
    return report, (EXIT_PASS if overall else EXIT_FAIL)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="holo-lab", description="Run a verification suite from a JSON config."
    )
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized suites")
    parser.add_argument("--out", default=".", help="output directory for report.json and CSVs")
    parser.add_argument("--grid-radii", default=None, help="comma-separated radii override")
    parser.add_argument(
        "--tol", action="append", default=None, metavar="NAME=VALUE", help="tolerance override"
    )
    parser.add_argument("--emit-plots", action="store_true", help="write CSV plot data")
    args = parser.parse_args(argv)

    start = time.monotonic()
    try:
        with open(args.config) as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise InvalidInput("config must be a JSON object")
        os.makedirs(args.out, exist_ok=True)
        report, code = run(
            config,
            seed=args.seed,
            out_dir=args.out,
            grid_radii=args.grid_radii,
            tol_overrides=args.tol,
            emit_plots=args.emit_plots,
        )
    except (InvalidInput, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"holo-lab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # internal error contract: exit 3, never a traceback
        print(f"holo-lab: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    try:
        path = os.path.join(args.out, "report.json")
        with open(path, "w") as fh:
            json.dump(report, fh, sort_keys=True, indent=2)
            fh.write("\n")
    except OSError as exc:
        print(f"holo-lab: internal error writing report: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    elapsed = time.monotonic() - start
    failing = [c["name"] for c in report["checks"] if not c["passed"]]
    status = "PASS" if not failing else f"FAIL ({', '.join(failing)})"
    print(f"holo-lab: {report['command']}: {status} [{elapsed:.2f}s] -> {path}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
