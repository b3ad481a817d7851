"""Command-line front end.

Six subcommands: threshold, decode, phase, certify, attack, concentration.
Single-object results are JSON, sweeps are CSV; everything stochastic takes
--seed (or the LPDECODE_SEED environment variable) and a rerun with the
same flags and seed produces byte-identical output.  Exit codes: 0 success,
1 usage error, 2 numeric or domain failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .certify import (
    ConditionQuery,
    attack_arbitrary,
    attack_fixed_sign,
    report_json,
    search_violation,
    unsigned_margin,
)
from .decoder import DecoderConfig, decode, lp_objective
from .ensemble import (
    ErrorSpec,
    SeedSpec,
    apply_decoder_success,
    floor_count,
    gaussian_matrix,
    make_instance,
    read_instance,
)
from .errors import LpdecodeError
from .harness import SweepPlan, concentration_csv, concentration_study, phase_csv, run_sweep
from .seeding import mix64
from .threshold import CurveRequest, curve, curve_csv

_ENV_SEED = "LPDECODE_SEED"


class _UsageError(Exception):
    """Bad flag combination detected after argparse; exits 1."""


def _parse_grid(text: str) -> tuple[float, ...]:
    """A float, or an inclusive start:stop:step grid.

    Endpoint test uses stop + step/2 so accumulated float error cannot drop
    the last point of grids like 0.05:0.45:0.05.
    """
    if ":" not in text:
        return (float(text),)
    parts = text.split(":")
    if len(parts) != 3:
        raise _UsageError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(v) for v in parts)
    if step <= 0:
        raise _UsageError(f"grid step must be positive, got {step}")
    if stop < start:
        raise _UsageError(f"grid stop {stop} is below start {start}")
    count = int((stop - start + step / 2) // step) + 1
    return tuple(start + i * step for i in range(count))


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(_ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _UsageError(f"{_ENV_SEED} must be an integer, got {env!r}") from None
    raise _UsageError(f"--seed is required (or set {_ENV_SEED})")


def _json_report(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


# -- subcommand handlers (each returns the output text) --


def _cmd_threshold(args) -> str:
    req = CurveRequest(
        p_min=args.p_min,
        p_max=args.p_max,
        steps=args.steps,
        with_derivative=args.derivative,
    )
    return curve_csv(curve(req, tol=args.tol))


def _cmd_decode(args) -> str:
    if args.instance is not None:
        inst = read_instance(args.instance)
        seed = args.seed if args.seed is not None else 0
    else:
        if args.m is None or args.n is None or args.rho is None:
            raise _UsageError("decode needs either --instance or all of --m/--n/--rho")
        seed = _resolve_seed(args)
        inst = make_instance(args.m, args.n, ErrorSpec(rho=args.rho), SeedSpec(seed, 0))
    cfg = DecoderConfig(p=args.p, restarts=args.restarts)
    result = decode(inst.a, inst.y, cfg, seed=SeedSpec(seed, 1))
    return _json_report(
        {
            "p": args.p,
            "m": inst.m,
            "n": inst.n,
            "rho": len(inst.support) / inst.m,
            "objective": result.objective,
            "iterations": result.iterations,
            "converged": result.converged,
            "success": apply_decoder_success(result.x_hat, inst.f, args.success_tol),
            "max_abs_error": float(np.max(np.abs(result.x_hat - inst.f))),
            "x_hat": [float(v) for v in result.x_hat],
        }
    )


def _cmd_phase(args) -> str:
    seed = _resolve_seed(args)
    plan = SweepPlan(
        m=args.m,
        n=args.n,
        p_values=_parse_grid(args.p),
        rho_values=_parse_grid(args.rho),
        trials=args.trials,
        error_regime=args.regime,
        master_seed=seed,
    )
    return phase_csv(run_sweep(plan, jobs=args.jobs))


def _cmd_certify(args) -> str:
    seed = _resolve_seed(args)
    if args.instance is not None:
        inst = read_instance(args.instance)
        a, support, signs = inst.a, inst.support, inst.signs
    else:
        if args.m is None or args.n is None:
            raise _UsageError("certify needs either --instance or --m/--n")
        a = gaussian_matrix(args.m, args.n, SeedSpec(seed, 0))
        support = signs = None
    if args.mode == "unsigned":
        if args.rho is None:
            raise _UsageError("unsigned certification needs --rho")
        query = ConditionQuery(a=a, p=args.p, mode="unsigned", rho=args.rho)
    else:
        if support is None:
            if args.rho is None:
                raise _UsageError("signed certification needs --rho or --instance")
            gen = SeedSpec(seed, 1).generator()
            k = floor_count(args.rho, a.shape[0])
            support = np.sort(gen.choice(a.shape[0], size=k, replace=False))
            signs = {int(i): int(s) for i, s in zip(support, 2 * gen.integers(0, 2, k) - 1)}
        query = ConditionQuery(a=a, p=args.p, mode="signed", support=support, signs=signs)
    report = search_violation(query, restarts=args.restarts, seed=SeedSpec(seed, 2))
    return report_json(report, query)


def _cmd_attack(args) -> str:
    seed = _resolve_seed(args)
    a = gaussian_matrix(args.m, args.n, SeedSpec(seed, 0))
    f = SeedSpec(seed, 1).generator().standard_normal(args.n)
    if args.mode == "arbitrary":
        z = SeedSpec(seed, 2).generator().standard_normal(args.n)
        e, x_alt = attack_arbitrary(a, f, args.p, args.rho, z)
        y = a @ f + e
        obj_f = lp_objective(y - a @ f, args.p)
        obj_alt = lp_objective(y - a @ x_alt, args.p)
        return _json_report(
            {
                "mode": "arbitrary",
                "p": args.p,
                "rho": args.rho,
                "m": args.m,
                "n": args.n,
                "margin": unsigned_margin(a, args.p, args.rho, z),
                "objective_f": obj_f,
                "objective_x_alt": obj_alt,
                "succeeded": bool(obj_alt <= obj_f),
            }
        )
    if not args.p < 1:
        raise _UsageError("fixed_sign attack requires p < 1")
    gen = SeedSpec(seed, 3).generator()
    k = floor_count(args.rho, args.m)
    support = np.sort(gen.choice(args.m, size=k, replace=False))
    signs = {int(i): int(s) for i, s in zip(support, 2 * gen.integers(0, 2, k) - 1)}
    query = ConditionQuery(a=a, p=args.p, mode="signed", support=support, signs=signs)
    found = search_violation(query, restarts=args.restarts, seed=SeedSpec(seed, 2))
    payload = {
        "mode": "fixed_sign",
        "p": args.p,
        "rho": args.rho,
        "m": args.m,
        "n": args.n,
        "margin": found.min_margin,
        "objective_f": None,
        "objective_x_alt": None,
        "succeeded": False,
    }
    if found.violated:
        e, x_alt = attack_fixed_sign(a, f, args.p, support, signs, found.witness)
        y = a @ f + e
        payload["objective_f"] = lp_objective(y - a @ f, args.p)
        payload["objective_x_alt"] = lp_objective(y - a @ x_alt, args.p)
        payload["succeeded"] = bool(payload["objective_x_alt"] <= payload["objective_f"])
    return _json_report(payload)


def _cmd_concentration(args) -> str:
    seed = _resolve_seed(args)
    reports = [
        concentration_study(rho, args.p, args.m, args.trials, seed=mix64(seed, i))
        for i, rho in enumerate(_parse_grid(args.rho))
    ]
    return concentration_csv(reports)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpdecode",
        description="lp-minimization decoding: thresholds, decoding, "
        "certification, attacks, and Monte Carlo sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    raw = argparse.RawDescriptionHelpFormatter

    def add(name, help_text, epilog):
        p = sub.add_parser(name, help=help_text, epilog=epilog, formatter_class=raw)
        p.add_argument("--out", help="output path (default: stdout)")
        return p

    p = add(
        "threshold",
        "recovery threshold curve rho*(p)",
        "Output schema: CSV with header p,z_star,rho_star,drho_dp;\n"
        "one row per p, drho_dp empty unless --derivative is given.",
    )
    p.add_argument("--p-min", type=float, required=True)
    p.add_argument("--p-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True, help="number of p grid points")
    p.add_argument("--derivative", action="store_true", help="include drho*/dp")
    p.add_argument("--tol", type=float, default=1e-10, help="bisection tolerance")
    p.set_defaults(handler=_cmd_threshold)

    p = add(
        "decode",
        "decode one instance (generated or loaded)",
        "Output schema: JSON with keys p,m,n,rho,objective,iterations,\n"
        "converged,success,max_abs_error,x_hat.",
    )
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--instance", help="fixture prefix (reads <prefix>.csv/.json)")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--success-tol", type=float, default=1e-4)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=_cmd_decode)

    p = add(
        "phase",
        "Monte Carlo success-rate sweep over (p, rho)",
        "Output schema: CSV with header p,rho,m,n,trials,successes,\n"
        "success_rate,mean_objective_gap,wallclock_ms (wallclock_ms is\n"
        "written as 0 so reruns are byte-identical).",
    )
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", required=True, help="value or start:stop:step grid")
    p.add_argument("--rho", required=True, help="value or start:stop:step grid")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument(
        "--regime",
        choices=("arbitrary", "fixed_sign", "adversarial"),
        default="arbitrary",
    )
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=_cmd_phase)

    p = add(
        "certify",
        "search for a null-space condition violation",
        "Output schema: JSON with keys min_margin,violated,witness,\n"
        "restarts_used,mode,p,rho.",
    )
    p.add_argument("--mode", choices=("unsigned", "signed"), required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--instance", help="fixture prefix for the matrix (and support/signs)")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=_cmd_certify)

    p = add(
        "attack",
        "construct an adversarial error pattern",
        "Output schema: JSON with keys mode,p,rho,m,n,margin,objective_f,\n"
        "objective_x_alt,succeeded (objectives null when no fixed-sign\n"
        "violation was found).",
    )
    p.add_argument("--mode", choices=("arbitrary", "fixed_sign"), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--restarts", type=int, default=8, help="violation search restarts")
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=_cmd_attack)

    p = add(
        "concentration",
        "mass-split study behind the 2/3 fixed-sign threshold",
        "Output schema: CSV with header rho,p,m,trials,ratio_Tminus,\n"
        "ratio_Tc,margin_sign.",
    )
    p.add_argument("--rho", required=True, help="value or start:stop:step grid")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=_cmd_concentration)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        text = args.handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except LpdecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def console_main() -> None:
    sys.exit(main(sys.argv[1:]))
