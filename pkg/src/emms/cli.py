"""Command-line front end.

Exit codes: 0 when every check passes, 1 on a fairness or invariant
failure, 2 on a usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import experiment as ex
from .claiming import EXACT, LPT, run_bc
from .errors import EmmsError, InvariantBroken
from .instance import as_fraction
from .io import allocation_to_dict, dumps, parse_allocation, parse_instance, write_instance
from .metrics import LPT_BOUND, average_share, check_allocation, emms, extended_proportional_share, mms

OK, FAIL, USAGE = 0, 1, 2


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (TypeError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _span(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    try:
        return int(lo), int(hi or lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> ex.ExperimentConfig:
    return ex.ExperimentConfig(
        seed=args.seed,
        count=args.count,
        n_range=args.n,
        m_range=args.m,
        betas=tuple(args.beta or [Fraction(7, 10)]),
        value_range=args.values,
        strategies=tuple(getattr(args, "strategy", None) or [ex.BC_EXACT]),
        alpha=getattr(args, "alpha", None),
        cap=args.cap,
    )


def cmd_gen(args) -> int:
    config = _config(args)
    instances = list(ex.generate_random(config))
    if args.count == 1 and args.out and not Path(args.out).is_dir():
        write_instance(instances[0][2], args.out)
        return OK
    if not args.out:
        from .io import instance_to_dict

        print(dumps([instance_to_dict(inst) for _, _, inst in instances]))
        return OK
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for k, _, inst in instances:
        write_instance(inst, outdir / f"instance_{k:04d}.json")
    return OK


def cmd_emms(args) -> int:
    inst = parse_instance(args.instance)
    mode = EXACT if args.mode == "exact" else LPT_BOUND
    rows = []
    for i in range(inst.n):
        raw, scaled = mms(inst, i, args.cap)
        rows.append(
            {
                "agent": i,
                "emms": str(emms(inst, i, mode, args.cap)),
                "exact": mode == EXACT,
                "mms_raw": str(raw),
                "mms_self_scaled": str(scaled),
                "average_share": str(average_share(inst, i)),
                "extended_proportional_share": str(extended_proportional_share(inst, i)),
            }
        )
    _emit(dumps(rows), args.out)
    return OK


def _advertised_alpha(inst, strategy: str) -> Fraction:
    if strategy == ex.CUT_AND_CHOOSE:
        return Fraction(1)
    floor = min(inst.self_weight(i) for i in range(inst.n))
    return ex.strategy_factor(strategy) * floor


def cmd_allocate(args) -> int:
    inst = parse_instance(args.instance)
    allocation, inv_ok = ex.allocate(inst, args.strategy, args.cap)
    payload = allocation_to_dict(
        allocation,
        strategy=args.strategy,
        alpha=_advertised_alpha(inst, args.strategy),
        invariants_ok=inv_ok,
    )
    _emit(dumps(payload), args.out)
    return OK if inv_ok else FAIL


def cmd_verify(args) -> int:
    inst = parse_instance(args.instance)
    allocation, meta = parse_allocation(args.allocation, inst)
    alpha = args.alpha
    if alpha is None:
        alpha = as_fraction(meta["alpha"]) if "alpha" in meta else Fraction(1)
    mode = EXACT if args.mode == "exact" else LPT_BOUND
    report = check_allocation(inst, allocation, alpha, mode, args.cap)
    _emit(report.to_csv(), args.out)
    return OK if report.passed else FAIL


def cmd_trace(args) -> int:
    inst = parse_instance(args.instance)
    source = EXACT if args.mode == "exact" else LPT
    try:
        allocation, trace = run_bc(inst, source, args.cap, strict=False)
    except InvariantBroken as exc:
        print(f"invariant broken: {exc}", file=sys.stderr)
        return FAIL
    payload = trace.to_dict()
    payload["allocation"] = allocation_to_dict(allocation)
    _emit(dumps(payload), args.out)
    return OK if trace.invariants_ok else FAIL


def cmd_bench(args) -> int:
    result = ex.run_experiment(_config(args), jobs=args.jobs)
    if args.out:
        Path(args.out).write_text(result.to_csv())
    else:
        sys.stdout.write(result.to_csv())
    print(json.dumps(result.summary, indent=1), file=sys.stderr)
    return OK if result.ok else FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emms", description="Extended maximin share allocations with network externalities.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=None, help="search cap on n**m (default: $EMMS_SEARCH_CAP or 2e7)")
    sub = parser.add_subparsers(dest="command", required=True)

    def sweep_flags(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--count", type=int, default=1)
        p.add_argument("--n", type=_span, default=(2, 4), metavar="LO:HI", help="agent count range")
        p.add_argument("--m", type=_span, default=(4, 7), metavar="LO:HI", help="item count range")
        p.add_argument("--values", type=_span, default=(0, 20), metavar="LO:HI", help="integer item value range")
        p.add_argument("--beta", type=_rational, action="append", help="self-reliance floor; repeat to cycle")
        p.add_argument("--out")

    p = sub.add_parser("gen", parents=[common], help="generate seeded random instances")
    sweep_flags(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("emms", parents=[common], help="print per-agent shares")
    p.add_argument("instance")
    p.add_argument("--mode", choices=["exact", "lpt"], default="exact")
    p.add_argument("--out")
    p.set_defaults(func=cmd_emms)

    p = sub.add_parser("allocate", parents=[common], help="compute an allocation")
    p.add_argument("instance")
    p.add_argument("--strategy", choices=ex.STRATEGIES, default=ex.BC_EXACT)
    p.add_argument("--out")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("verify", parents=[common], help="check an allocation against alpha * EMMS")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--alpha", type=_rational, default=None, help="default: the alpha stored in the allocation file")
    p.add_argument("--mode", choices=["exact", "lpt"], default="exact")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trace", parents=[common], help="run bundle claiming and dump every step")
    p.add_argument("instance")
    p.add_argument("--mode", choices=["exact", "lpt"], default="exact")
    p.add_argument("--out")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("bench", parents=[common], help="seeded sweep with a CSV report")
    sweep_flags(p)
    p.add_argument("--strategy", choices=ex.STRATEGIES, action="append")
    p.add_argument("--alpha", type=_rational, default=None, help="override the per-instance beta in the bound")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench, count=100)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EmmsError, OSError) as exc:
        if isinstance(exc, InvariantBroken):
            print(f"invariant broken: {exc}", file=sys.stderr)
            return FAIL
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
