"""Command-line driver.

Commands
--------
``simulate --config run.json [--binary] [--workers K]``
    Integrate a configured run (see :mod:`savgl.config` for the schema) and
    write ``energies.csv``, snapshots and ``meta.json`` to the output
    directory.  Several ``--config`` files form a sweep run on a process pool;
    their output directories must differ.
``check-params --alpha0 --beta0 --beta2 [--identities] [--json]``
    Case, A-stability, algebraic stability and identity coefficients.
``stepsize --model --n --length --epsilon --alpha0 --beta0 --beta2 --psi [--csv F]``
    Sufficient stepsize bound from the linear stability analysis.
``dealias-test --n --seed [--constant]``
    Compare zero-padded de-aliasing against the brute-force convolution.
``check-energy --csv F [--column C] [--start S]``
    Report whether a column of an energies file is non-increasing.

Snapshots are text by default: a header ``N L time`` and N rows of N values
(``u[i, :]`` on line ``i``).  With ``--binary`` (or ``output.binary``) they
are raw little-endian float64 in row-major order with a sidecar
``<file>.json`` holding ``{n, length, time, order: "row-major"}``.

Exit codes: 0 success, 2 validation error, 3 numerical abort.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import checks, gltd, identities, spectral, stability, steppers
from .config import initial_condition, load_config
from .exceptions import ConfigError, DiscriminantNegative, GridTooLarge, NumericalAbort, \
    PreconditionViolated, SolutionBlowup, ValidationError
from .models import EnergyRecord, ModelKind, pfc_energy_lower_bound, psi_monitor
from .spectral import SpectralGrid

EXIT_OK, EXIT_VALIDATION, EXIT_ABORT = 0, 2, 3
DEALIAS_RTOL = 1e-9


def _fmt_tau(rep):
    return "Unbounded" if rep.unbounded else rep.tau_max


def _report_dict(rep, psi):
    return {
        "psi": psi,
        "tau_max": _fmt_tau(rep),
        "binding_mode": list(rep.argmax_mode) if rep.argmax_mode else None,
        "formula": rep.limiting_expression,
        "limiting_value": rep.limiting_value if math.isfinite(rep.limiting_value) else None,
        "note": "sufficient bound from the linearized test equation with the SAV ratio taken as 1",
    }


def verdict_dict(p):
    v = gltd.stability_verdict(p)
    return {
        "case": gltd.classify(p).roman,
        "a_stable": v.a_stable,
        "algebraically_stable": v.algebraically_stable.value,
        "boundary_double_root": v.boundary_double_root,
    }


def _write_meta(path, meta):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(meta, fh, indent=2, default=str)
    os.replace(tmp, path)


def run_simulation(cfg, binary=None):
    """Run ``cfg`` and write its artifacts.

    Returns the final ``meta`` dictionary.  A numerical abort is re-raised
    after ``energies.csv`` (rows up to the failing step) and ``meta.json``
    (``status: "aborted"``) are written.
    """
    params = cfg.params()
    family = cfg.family
    if family is steppers.Family.SAV and not steppers.admits_modified_energy(params):
        raise ConfigError(
            f"SAV parameters {params.triple} admit no modified energy; "
            "use A-stable parameters with a real identity")
    grid = cfg.build_grid()
    model = cfg.build_model(grid)
    if (family is steppers.Family.GSAV and model.kind is ModelKind.PFC
            and model.ctilde0 <= -pfc_energy_lower_bound(model)):
        raise ConfigError(
            f"G-SAV for PFC needs model.ctilde0 > eps^2 |Omega| / 4 = "
            f"{-pfc_energy_lower_bound(model):.6g}")
    out = cfg.output
    binary = out.binary if binary is None else binary
    os.makedirs(out.directory, exist_ok=True)
    snap_dir = os.path.join(out.directory, "snapshots")
    if out.snapshot_every:
        os.makedirs(snap_dir, exist_ok=True)
    meta_path = os.path.join(out.directory, "meta.json")

    u0 = initial_condition(cfg.ic, grid)
    psi_cfg = cfg.psi_estimate if cfg.psi_estimate is not None else psi_monitor(u0)
    meta = {
        "config": cfg.to_dict(),
        "params": {"alpha0": params.alpha0, "beta0": params.beta0,
                   "beta1": params.beta1, "beta2": params.beta2},
        "stability": verdict_dict(params),
        "family": family.value,
        # c0 is a guess unless the config sets it; flagged so runs can be compared
        "sav_shift": {"c0": model.c0, "c0_is_default": cfg.model.c0 is None,
                      "ctilde0": model.ctilde0},
        "stepsize_estimate": _report_dict(
            stability.estimate_for_model(model, params, psi_cfg), psi_cfg),
        "status": "running",
        "steps_completed": 0,
    }
    _write_meta(meta_path, meta)

    psi_max = psi_monitor(u0)
    last = 0
    try:
        with open(os.path.join(out.directory, "energies.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(EnergyRecord.FIELDS)
            for state, rec in steppers.run(model, params, u0, cfg.time.tau,
                                           cfg.time.steps, family):
                last = rec.step
                psi_max = max(psi_max, rec.psi)
                if rec.step % out.energy_every == 0:
                    if not rec.is_finite():
                        raise SolutionBlowup("non-finite diagnostics", rec.step)
                    writer.writerow([repr(float(v)) if isinstance(v, float) else v
                                     for v in rec.as_row()])
                    fh.flush()
                if out.snapshot_every and rec.step % out.snapshot_every == 0:
                    name = os.path.join(snap_dir, f"u_{rec.step:06d}" + (".bin" if binary else ".txt"))
                    spectral.write_snapshot(name, state.u_curr, grid.length, rec.time, binary)
    except NumericalAbort as exc:
        meta.update(status="aborted", steps_completed=max(last, 0),
                    abort={"type": type(exc).__name__, "step": exc.step, "message": str(exc)})
        _write_meta(meta_path, meta)
        raise
    meta.update(status="completed", steps_completed=last)
    meta["stepsize_estimate_max_psi"] = _report_dict(
        stability.estimate_for_model(model, params, psi_max), psi_max)
    _write_meta(meta_path, meta)
    return meta


def _simulate_one(path, binary):
    try:
        run_simulation(load_config(path), binary)
    except ValidationError as exc:
        return EXIT_VALIDATION, f"{path}: {exc}"
    except NumericalAbort as exc:
        return EXIT_ABORT, f"{path}: aborted: {exc}"
    return EXIT_OK, f"{path}: completed"


def cmd_simulate(args):
    binary = True if args.binary else None
    if len(args.config) == 1:
        code, msg = _simulate_one(args.config[0], binary)
        print(msg, file=sys.stderr if code else sys.stdout)
        return code
    cfgs = [load_config(p) for p in args.config]
    dirs = [os.path.abspath(c.output.directory) for c in cfgs]
    if len(set(dirs)) != len(dirs):
        raise ConfigError("sweep configs must use distinct output directories")
    with ProcessPoolExecutor(max_workers=args.workers) as pool:
        results = list(pool.map(_simulate_one, args.config, [binary] * len(cfgs)))
    for _, msg in results:
        print(msg)
    return max(code for code, _ in results)


def check_params_report(alpha0, beta0, beta2, with_identities=False):
    p = gltd.derive(alpha0, beta0, beta2)
    rep = {"alpha0": p.alpha0, "beta0": p.beta0, "beta1": p.beta1, "beta2": p.beta2,
           "kappa": p.kappa, **verdict_dict(p),
           "max_root_modulus_scan": gltd.verify_a_stability_numerically(p),
           "discriminant": identities.discriminant(p)}
    if with_identities:
        try:
            rep["identities"] = [
                {"branch": str(co.branch), **co.as_dict(),
                 "residual": identities.system_residual(p, co)}
                for co in identities.admissible_branches(p)
            ]
            w = identities.energy_weights(p)
            rep["energy_weights"] = {"w11": w.w11, "w00": w.w00, "w10": w.w10}
        except (PreconditionViolated, DiscriminantNegative) as exc:
            rep["identities"] = None
            rep["identity_error"] = f"{type(exc).__name__}: {exc}"
    return rep


def cmd_check_params(args):
    rep = check_params_report(args.alpha0, args.beta0, args.beta2, args.identities)
    if args.json:
        print(json.dumps(rep, indent=2))
        return EXIT_OK
    print(f"params  alpha0={rep['alpha0']:.6g} beta0={rep['beta0']:.6g} "
          f"beta1={rep['beta1']:.6g} beta2={rep['beta2']:.6g} kappa={rep['kappa']:.6g}")
    print(f"case    {rep['case']}")
    print(f"A-stable (sufficient inequalities): {rep['a_stable']}; "
          f"max root modulus on the left-half-plane scan: {rep['max_root_modulus_scan']:.12g}")
    print(f"algebraically stable: {rep['algebraically_stable']}")
    print(f"double root on unit circle: {rep['boundary_double_root']}")
    print(f"discriminant: {rep['discriminant']:.6g}")
    if args.identities:
        if rep["identities"] is None:
            print(f"identities: refused ({rep['identity_error']})")
        else:
            for co in rep["identities"]:
                vals = " ".join(f"{k}={co[k]:.10g}" for k in ("a", "b", "d", "c1", "c2", "c3"))
                print(f"identity {co['branch']}: {vals} (residual {co['residual']:.2e})")
            w = rep["energy_weights"]
            print(f"energy weights: w11={w['w11']:.10g} w00={w['w00']:.10g} w10={w['w10']:.10g}")
    print(json.dumps(rep))
    return EXIT_OK


def cmd_stepsize(args):
    p = gltd.derive(args.alpha0, args.beta0, args.beta2)
    if args.psi < 0.0:
        raise ValidationError("--psi must be non-negative")
    grid = SpectralGrid(args.n, args.length)
    rep = stability.estimate_on_grid(args.model, grid, args.epsilon, p, args.psi,
                                     args.convention)
    tau = "Unbounded" if rep.unbounded else f"{rep.tau_max:.6g}"
    lim = "" if not math.isfinite(rep.limiting_value) else f" limiting_value={rep.limiting_value:.6g}"
    print(f"tau_max={tau} mode={rep.argmax_mode} formula={rep.limiting_expression}{lim} "
          f"(sufficient, psi={args.psi:g})")
    if args.csv:
        xi, zeta = stability.model_test_points(args.model, grid, args.epsilon, args.psi,
                                               args.convention)
        tau_k, den, _ = stability.per_mode_bounds(p, xi, zeta)
        kk, ll = np.meshgrid(grid.k, grid.k, indexing="ij")
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "l", "xi", "zeta", "tau_max"])
            for row in zip(kk.ravel(), ll.ravel(), xi.ravel(), zeta.ravel(), tau_k.ravel()):
                w.writerow([int(row[0]), int(row[1]), repr(float(row[2])),
                            repr(float(row[3])), repr(float(row[4]))])
    return EXIT_OK


def dealias_deviation(n, seed=0, constant=False):
    """Max relative deviation between zero padding and the brute-force sum."""
    if n > spectral.BRUTE_FORCE_MAX_N:
        raise GridTooLarge(f"dealias-test limited to n <= {spectral.BRUTE_FORCE_MAX_N}")
    rng = np.random.default_rng(seed)
    u = np.full((n, n), rng.standard_normal()) if constant else rng.standard_normal((n, n))
    fast = spectral.cubic_dealiased(u)
    slow = spectral.brute_force_truncated_convolution(np.fft.fft2(u))
    scale = max(float(np.max(np.abs(slow))), 1e-300)
    return float(np.max(np.abs(fast - slow))) / scale


def cmd_dealias_test(args):
    dev = dealias_deviation(args.n, args.seed, args.constant)
    ok = dev <= DEALIAS_RTOL
    print(f"{'pass' if ok else 'FAIL'} n={args.n} seed={args.seed} max relative deviation={dev:.3e}")
    return EXIT_OK if ok else 1


def cmd_check_energy(args):
    cols = checks.read_energies(args.csv)
    if args.column not in cols:
        raise ConfigError(f"column {args.column!r} not in {args.csv}")
    rep = checks.monotone_report(cols[args.column], args.rtol, args.start)
    state = "non-increasing" if rep.ok else "NOT monotone"
    print(f"{args.column}: {state} (worst relative uptick {rep.worst:.3e} at row {rep.index}, "
          f"{rep.n_upticks} upticks)")
    return EXIT_OK if rep.ok else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="savgl", description="SAV/G-SAV gradient-flow solver")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="run configured simulations")
    sp.add_argument("--config", required=True, nargs="+")
    sp.add_argument("--binary", action="store_true", help="binary snapshots")
    sp.add_argument("--workers", type=int, default=None, help="pool size for sweeps")
    sp.set_defaults(func=cmd_simulate)

    def add_params(p):
        p.add_argument("--alpha0", type=float, required=True)
        p.add_argument("--beta0", type=float, required=True)
        p.add_argument("--beta2", type=float, required=True)

    sp = sub.add_parser("check-params", help="classify a parameter triple")
    add_params(sp)
    sp.add_argument("--identities", action="store_true")
    sp.add_argument("--json", action="store_true", help="print only JSON")
    sp.set_defaults(func=cmd_check_params)

    sp = sub.add_parser("stepsize", help="estimate a stable stepsize")
    sp.add_argument("--model", required=True, choices=["ac", "ch", "pfc"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--length", type=float, default=2.0 * math.pi)
    sp.add_argument("--epsilon", type=float, required=True)
    add_params(sp)
    sp.add_argument("--psi", type=float, required=True)
    sp.add_argument("--convention", choices=["index", "symbol"], default="index",
                    help="PFC wavenumber convention")
    sp.add_argument("--csv", help="write per-mode bounds here")
    sp.set_defaults(func=cmd_stepsize)

    sp = sub.add_parser("dealias-test", help="zero padding vs brute force")
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--constant", action="store_true", help="use a constant field")
    sp.set_defaults(func=cmd_dealias_test)

    sp = sub.add_parser("check-energy", help="monotonicity of an energies.csv column")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--column", default="modified_energy")
    sp.add_argument("--start", type=int, default=0)
    sp.add_argument("--rtol", type=float, default=1e-9)
    sp.set_defaults(func=cmd_check_energy)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalAbort as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
