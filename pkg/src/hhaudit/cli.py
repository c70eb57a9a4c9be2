"""Command-line entry point: ``audit run | check-function | moments``.

Exit codes: 0 clean, 1 rederived violation or counterexample on an asserted-valid
function, 2 invalid input or config, 3 quadrature non-convergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import List, Optional

from . import kernel
from .audit import sweep
from .config import ConfigError, load_config, parse_params
from .core import DomainError
from .funcmodel import (DEFAULT_SEED, SamplingPlan, certify_alpha_log_convex,
                        certify_am_log_convex, certify_m_log_convex, from_name)
from .report import write_reports

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_QUADRATURE = 0, 1, 2, 3


def _hex(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hexadecimal seed: {text!r}") from None


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    options = cfg.options
    if args.seed is not None:
        options = dataclasses.replace(options,
                                      sampler=dataclasses.replace(options.sampler, seed=args.seed))
    strict = cfg.strict_published or args.strict_published
    result = sweep(cfg.functions, cfg.grid, options, threads=args.threads,
                   strict_published=strict)
    paths = write_reports(result, args.out_dir or cfg.out_dir, args.format or cfg.format, cfg.name)
    s = result.summary
    print(f"cells={s['cells']} rederived_violations={s['rederived_certified_violations']} "
          f"published_violations={s['published_certified_violations']} "
          f"nonconverged={s['nonconverged']}")
    for p in paths:
        print(f"wrote {p}")
    return result.exit_code


def _cert_json(cert) -> dict:
    return {"status": cert.status.value, "witness": cert.witness,
            "samples_checked": cert.samples_checked, "max_violation": cert.max_violation}


def _cmd_check(args) -> int:
    spec = from_name(args.family, parse_params(args.params, "--params"))
    plan = SamplingPlan(seed=args.seed if args.seed is not None else DEFAULT_SEED)
    certs = {
        "alpha_m": certify_am_log_convex(spec, args.alpha, args.m, args.upper, plan),
        "m": certify_m_log_convex(spec, args.m, args.upper, plan),
        "alpha": certify_alpha_log_convex(spec, args.alpha, args.upper, plan),
    }
    print(json.dumps({k: _cert_json(c) for k, c in certs.items()}, indent=1))
    return EXIT_OK if all(c.ok for c in certs.values()) else EXIT_VIOLATION


def _cmd_moments(args) -> int:
    kind = kernel.Kind(args.kind)
    out = {"kind": kind.value}
    if kind is kernel.Kind.ABS_POW:
        if args.p is None:
            raise DomainError("--p is required for abs_pow")
        out["p"] = args.p
        out["closed_form"] = kernel.moment_abs_pow(args.p)
    elif kind in (kernel.Kind.EXP, kernel.Kind.ABS_EXP):
        if args.c is None:
            raise DomainError(f"--c is required for {kind.value}")
        out["c"] = args.c
        fn = kernel.moment_exp if kind is kernel.Kind.EXP else kernel.moment_abs_exp
        out["closed_form"] = fn(args.c)
    else:
        out.update({"c": args.c, "p": args.p})
    if args.oracle or "closed_form" not in out:
        mv = kernel.moment_oracle(kind, p=args.p, c=args.c)
        out["oracle"] = mv.value
        out["oracle_error_estimate"] = mv.error_estimate
        if "closed_form" in out:
            out["relative_delta"] = abs(out["closed_form"] - mv.value) / abs(mv.value)
    print(json.dumps(out, indent=1))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="audit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="audit every cell of a sweep config")
    run.add_argument("--config", required=True)
    run.add_argument("--out-dir")
    run.add_argument("--format", choices=["csv", "json"])
    run.add_argument("--strict-published", action="store_true",
                     help="treat as-published violations as failures")
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--seed", type=_hex, help="certifier RNG seed, hexadecimal")
    run.set_defaults(func=_cmd_run)

    chk = sub.add_parser("check-function", help="run the log-convexity certifiers only")
    chk.add_argument("--family", required=True)
    chk.add_argument("--params", default="")
    chk.add_argument("--alpha", type=float, default=1.0)
    chk.add_argument("--m", type=float, default=1.0)
    chk.add_argument("--upper", type=float, required=True)
    chk.add_argument("--seed", type=_hex)
    chk.set_defaults(func=_cmd_check)

    mom = sub.add_parser("moments", help="evaluate a kernel moment")
    mom.add_argument("--kind", required=True, choices=[k.value for k in kernel.Kind])
    mom.add_argument("--c", type=float)
    mom.add_argument("--p", type=float)
    mom.add_argument("--oracle", action="store_true", help="also integrate numerically")
    mom.set_defaults(func=_cmd_moments)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
