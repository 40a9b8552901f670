"""Batch command-line interface.

Subcommands: build-surface, phase-shifts, paircorr, scan, arith.  Every
run is deterministic given its config and seed; outputs are CSV with a
header row and floats at 17 significant digits, or JSON for surface
descriptions.  A JSON config file supplies defaults, command-line flags
override it, and CYLSCATTER_OUTPUT_DIR overrides --output-dir.

Exit codes: 0 success, 1 usage or configuration error, 2 validation or
accuracy failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .counting import count_F, count_G, ramanujan_ratio
from .errors import AccuracyError, BranchError, ConfigurationError, DomainError, IntegrationError
from .paircorr import GaussianTestFunction, pair_correlation, parameter_scan
from .profiles import (
    FamilyParameters,
    build_family_profile,
    build_linear_model,
    profile_from_dict,
    profile_to_json,
    rational_coefficient,
    validate_profile,
)
from .radial import PhaseShiftTable, scattering_matrix, solve_phase_shift, window_indices
from .rotation import quantum_classical_check
from .wkb import profile_psi_spline

USAGE_ERROR = 1
VALIDATION_ERROR = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract reserves 2 for
    # validation failures, so remap.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _output_dir(args) -> Path:
    d = os.environ.get("CYLSCATTER_OUTPUT_DIR") or args.output_dir
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _load_profile(args):
    if getattr(args, "surface", None):
        with open(args.surface) as fh:
            return profile_from_dict(json.load(fh))
    if args.model == "linear":
        return build_linear_model(args.t)
    coef = rational_coefficient(args.rho)
    params = FamilyParameters(alpha=args.alpha, beta=args.beta)
    return build_family_profile(params, coef, r_max=args.r_max, nodes=args.nodes)


def _add_model_flags(p, with_surface=True):
    if with_surface:
        p.add_argument("--surface", help="surface description JSON from build-surface")
    p.add_argument("--model", choices=["linear", "family"], default="family")
    p.add_argument("--t", type=float, default=1.0, help="linear-model scale")
    p.add_argument("--alpha", type=float, default=-0.5)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--rho", type=float, default=0.5, help="coefficient shape parameter")
    p.add_argument("--r-max", type=float, default=1000.0)
    p.add_argument("--nodes", type=int, default=4001)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="cylscatter", description=__doc__)
    top.add_argument("--config", help="JSON file with per-subcommand defaults")
    top.add_argument("--output-dir", default=".", help="directory for output files")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-surface", help="construct and validate a surface profile")
    _add_model_flags(p, with_surface=False)
    p.add_argument("--out", default="surface.json")

    p = sub.add_parser("phase-shifts", help="phase-shift table at one energy")
    _add_model_flags(p)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--backend", choices=["exact", "wkb", "model"], default="exact")
    p.add_argument("--workers", type=int, default=1, help="process pool size for exact solves")
    p.add_argument("--out", default="phase_shifts.csv")

    p = sub.add_parser("paircorr", help="pair correlation of a phase-shift table")
    p.add_argument("--input", help="phase_shifts.csv; positive-k rows are used")
    _add_model_flags(p)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--method", choices=["fourier", "direct"], default="fourier")
    p.add_argument("--backend", choices=["exact", "wkb", "model"], default="wkb")
    p.add_argument("--out", default="paircorr.csv")

    p = sub.add_parser("scan", help="off-diagonal decay over random family parameters")
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--lams", default="100,200,400,800")
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=3)
    p.add_argument("--beta-zero", action="store_true")
    p.add_argument("--out", default="scan.csv")

    p = sub.add_parser("arith", help="divisor-sum and lattice-count diagnostics")
    p.add_argument("--n", type=int, default=10**6)
    p.add_argument("--lam", type=int, default=100)
    p.add_argument("--ell2-max", type=int, default=10)
    p.add_argument("--out", default="arith.csv")

    p = sub.add_parser("rotation", help="quantum vs classical rotation numbers")
    _add_model_flags(p)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--n-grid", type=int, default=24)
    p.add_argument("--backend", choices=["exact", "wkb"], default="exact")
    p.add_argument("--out", default="rotation.csv")
    return top


def _apply_config(top, argv):
    # pre-scan for --config so file values become defaults the flags override
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        with open(known.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cylscatter: bad config file: {exc}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)
    if not isinstance(cfg, dict):
        print("cylscatter: config must be a JSON object", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)
    flat = dict(cfg.get("common", {}))
    top.set_defaults(**{k.replace("-", "_"): v for k, v in flat.items()})
    for action in top._subparsers._group_actions[0].choices.items():
        name, sp = action
        section = cfg.get(name)
        if isinstance(section, dict):
            sp.set_defaults(**{k.replace("-", "_"): v for k, v in section.items()})


def _solve_one(payload):
    profile_dict, x, h, spw = payload
    profile = profile_from_dict(profile_dict)
    res = solve_phase_shift(profile, x, h, steps_per_wavelength=spw)
    return res.delta_fraction, res.est_error


def _cmd_build_surface(args) -> int:
    profile = _load_profile(args)
    report = validate_profile(profile)
    out = _output_dir(args) / args.out
    out.write_text(profile_to_json(profile))
    for name, ok in report.checks.items():
        print(f"{name}: {'ok' if ok else 'FAIL'}")
    if not report.passed:
        return VALIDATION_ERROR
    print(f"wrote {out}")
    return 0


def _cmd_phase_shifts(args) -> int:
    profile = _load_profile(args)
    if args.backend == "exact" and args.workers > 1:
        from .radial import _default_spw

        ks = window_indices(args.lam, args.eps)
        spw = _default_spw(args.lam)
        pdict = json.loads(profile_to_json(profile))
        payloads = [(pdict, k / args.lam, 1.0 / args.lam, spw) for k in ks]
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_solve_one, payloads))  # ordered reduction
        spl = profile_psi_spline(profile, ks[0] / args.lam * 0.999, ks[-1] / args.lam * 1.001)
        deltas = np.empty(len(ks))
        errs = np.empty(len(ks))
        for i, (k, (frac, err)) in enumerate(zip(ks, results)):
            anchor = args.lam * float(spl(k / args.lam)) + 0.25
            deltas[i] = frac + round(anchor - frac)
            errs[i] = err
        table = PhaseShiftTable(
            lam=args.lam,
            eps=args.eps,
            backend="exact",
            ks=np.concatenate([-ks[::-1], ks]),
            deltas=np.concatenate([deltas[::-1], deltas]),
            est_errors=np.concatenate([errs[::-1], errs]),
        )
    else:
        table = scattering_matrix(profile, args.lam, args.eps, backend=args.backend)
    out = _output_dir(args) / args.out
    table.write_csv(out)
    print(f"wrote {out} ({table.n_indices} indices)")
    return 0


def _read_positive_deltas(path):
    ks, deltas = [], []
    with open(path) as fh:
        for row in csv.DictReader(fh):
            k = int(row["k"])
            if k > 0:
                ks.append(k)
                deltas.append(float(row["delta"]))
    order = np.argsort(ks)
    return np.asarray(deltas, dtype=float)[order]


def _cmd_paircorr(args) -> int:
    if args.input:
        deltas = _read_positive_deltas(args.input)
    else:
        profile = _load_profile(args)
        table = scattering_matrix(profile, args.lam, args.eps, backend=args.backend)
        _, deltas = table.positive()
    f = GaussianTestFunction(args.sigma)
    res = pair_correlation(deltas, args.lam, args.eps, f, method=args.method)
    out = _output_dir(args) / args.out
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["lambda", "eps", "sigma", "method", "value", "main_term", "diagonal_term",
             "off_diagonal", "n_points", "target"]
        )
        w.writerow(
            [_fmt(args.lam), _fmt(args.eps), _fmt(args.sigma), args.method,
             _fmt(res.value), _fmt(res.main_term), _fmt(res.diagonal_term),
             _fmt(res.off_diagonal), res.n_points, _fmt(res.target)]
        )
    print(f"wrote {out} (rho = {res.value:.6f}, target = {res.target:.6f})")
    return 0


def _cmd_scan(args) -> int:
    lams = tuple(float(s) for s in str(args.lams).split(","))
    coef = rational_coefficient(args.rho)
    report = parameter_scan(
        coef,
        lams=lams,
        n_samples=args.samples,
        eps=args.eps,
        sigma=args.sigma,
        seed=args.seed,
        beta_zero=args.beta_zero,
    )
    out = _output_dir(args) / args.out
    report.write_csv(out)
    print(f"wrote {out}")
    return 0


def _cmd_arith(args) -> int:
    out = _output_dir(args) / args.out
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["quantity", "argument", "value"])
        w.writerow(["ramanujan_ratio", args.n, _fmt(ramanujan_ratio(args.n))])
        for ell2 in range(1, args.ell2_max + 1):
            w.writerow([f"count_F(lam={args.lam})", ell2, count_F(args.lam, ell2)])
        w.writerow([f"count_G(lam={args.lam})", args.ell2_max, count_G(args.lam, args.ell2_max)])
    print(f"wrote {out}")
    return 0


def _cmd_rotation(args) -> int:
    profile = _load_profile(args)
    chk = quantum_classical_check(
        profile, args.lam, eps=args.eps, n_grid=args.n_grid, backend=args.backend
    )
    out = _output_dir(args) / args.out
    chk.write_csv(out)
    print(f"wrote {out} (sup discrepancy = {chk.sup:.3e})")
    return 0


_COMMANDS = {
    "build-surface": _cmd_build_surface,
    "phase-shifts": _cmd_phase_shifts,
    "paircorr": _cmd_paircorr,
    "scan": _cmd_scan,
    "arith": _cmd_arith,
    "rotation": _cmd_rotation,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    top = build_parser()
    try:
        _apply_config(top, argv)
        args = top.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (DomainError, AccuracyError, IntegrationError, BranchError, ConfigurationError) as exc:
        print(f"cylscatter: {exc}", file=sys.stderr)
        return VALIDATION_ERROR
    except OSError as exc:
        print(f"cylscatter: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
