"""Command-line front end: `isomix {zoo,analyze,profile,bounds,mixing,verify}`.

Exit status: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .chain_core import chain_to_json, load_chain, proper_set
from .enumeration import DEFAULT_MAX_STATES, THREADS_ENV
from .errors import IsomixError, NoBoundaryEdge
from .gradients import INF, h_p, sandwich
from .isoperimetry import PROFILE_QUANTITIES, WINDOWS, profile, spread_record
from .spectral_mixing import exact_mixing, mixing_report, spectral_gap
from .verify import verify_chain
from .zoo import ZooSpec, schema

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(IsomixError):
    pass


def _machine(value):
    """Floats with 17 significant digits, recursively."""
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return float(f"{value:.17g}")
    if isinstance(value, dict):
        return {k: _machine(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_machine(v) for v in value]
    return value


def _dump(payload) -> str:
    return json.dumps(_machine(payload), indent=2) + "\n"


def _parse_set(text: str, n: int):
    try:
        members = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"--set expects comma-separated integers, got {text!r}") from exc
    bad = [i for i in members if not 0 <= i < n]
    if bad:
        raise UsageError(f"--set indices {bad} out of range for n={n}")
    return members


def _load(args):
    if args.chain and args.zoo:
        raise UsageError("give exactly one of --chain and --zoo")
    if args.chain:
        return load_chain(args.chain), None
    if args.zoo:
        return ZooSpec.parse(args.zoo[0], args.zoo[1:]).build()
    raise UsageError("a chain source is required: --chain FILE or --zoo FAMILY PARAMS")


def _emit(args, text: str, summary: str | None = None) -> None:
    if args.out:
        Path(args.out).write_text(text)
        if summary:
            print(summary)
    else:
        sys.stdout.write(text)


def cmd_zoo(args):
    if not args.zoo:
        _emit(args, _dump(schema()))
        return EXIT_OK
    chain, A = _load(args)
    payload = json.loads(chain_to_json(chain))
    if A is not None:
        payload["set"] = sorted(A.members)
    _emit(args, json.dumps(payload) + "\n", f"wrote {chain.n}-state chain")
    return EXIT_OK


def cmd_analyze(args):
    chain, A = _load(args)
    if args.set is not None:
        A = _parse_set(args.set, chain.n)
    if A is None:
        raise UsageError("analyze needs --set")
    S = proper_set(chain, A)
    record = spread_record(chain, S, reversed=args.reversed)
    gradients = [
        {"p": "inf" if p == INF else p, "sign": sign, "value": h_p(chain, S, p, sign).value}
        for sign in ("plus", "minus") for p in (1, 2, INF)
    ]
    sandwiches = {}
    if S.measure <= 0.5 + 1e-12:
        for sign in ("plus", "minus"):
            try:
                sandwiches[sign] = json.loads(sandwich(chain, S, sign).to_json())
            except NoBoundaryEdge as exc:
                sandwiches[sign] = {"error": str(exc)}
    payload = {"set": sorted(S.members), "size": S.measure, "spread": record.as_dict(),
               "gradients": gradients, "sandwich": sandwiches}
    if args.format == "csv":
        rows = ["quantity,value"] + [f"{k},{v:.17g}" for k, v in record.as_dict().items() if k != "reversed"]
        rows += [f"h{g['p']}_{g['sign']},{g['value']:.17g}" for g in gradients]
        _emit(args, "\n".join(rows) + "\n")
    else:
        _emit(args, _dump(payload), f"psi_plus={record.psi_plus:.6g} psi_evo={record.psi_evo:.6g}")
    return EXIT_OK


def cmd_profile(args):
    chain, _ = _load(args)
    quantity = args.quantity
    if args.reversed and quantity.startswith("psi_") and quantity != "psi_evo":
        quantity = "rev_" + quantity
    if quantity not in PROFILE_QUANTITIES:
        raise UsageError(f"unknown quantity {args.quantity!r}; choose from {', '.join(PROFILE_QUANTITIES)}")
    prof = profile(chain, quantity, args.window, max_states=args.max_states, threads=args.threads)
    if args.format == "json":
        payload = {"quantity": quantity, "over_x": prof.over_x,
                   "breakpoints": prof.breakpoints.tolist(), "values": prof.values.tolist()}
        _emit(args, _dump(payload))
    else:
        _emit(args, prof.to_csv(), f"{quantity}: {len(prof.breakpoints)} breakpoints")
    return EXIT_OK


def cmd_bounds(args):
    chain, _ = _load(args)
    report = mixing_report(chain, args.epsilon, max_states=args.max_states, threads=args.threads)
    _emit(args, report.to_json() + "\n", f"tau_exact={report.tau_exact} chi2_exact={report.chi2_exact}")
    return EXIT_OK


def cmd_mixing(args):
    chain, _ = _load(args)
    payload = {"epsilon": args.epsilon,
               "tau_exact": exact_mixing(chain, args.epsilon, "tv"),
               "chi2_exact": exact_mixing(chain, args.epsilon, "chi2")}
    if chain.reversible:
        payload["spectral"] = spectral_gap(chain).as_dict()
    _emit(args, _dump(payload))
    return EXIT_OK


def cmd_verify(args):
    chain, _ = _load(args)
    epsilons = (args.epsilon,) if args.epsilon_given else (0.25, 0.125)
    report = verify_chain(chain, epsilons=epsilons, max_states=args.max_states, threads=args.threads)
    _emit(args, report.to_json() + "\n",
          f"{report.subsets} subsets, {len(report.checks)} checks, {len(report.violations)} violations")
    return EXIT_OK if report.ok else EXIT_FAIL


COMMANDS = {
    "zoo": cmd_zoo,
    "analyze": cmd_analyze,
    "profile": cmd_profile,
    "bounds": cmd_bounds,
    "mixing": cmd_mixing,
    "verify": cmd_verify,
}


def _epsilon(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("epsilon must lie in (0, 1)")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--chain", metavar="FILE", help="chain JSON file")
    common.add_argument("--zoo", nargs="+", metavar="FAMILY_OR_PARAM",
                        help="zoo family followed by its parameters (positional or name=value)")
    common.add_argument("--set", metavar="I,J,...", help="comma-separated state indices")
    common.add_argument("--quantity", default="psi_plus", help="profile quantity")
    common.add_argument("--window", choices=WINDOWS, default=None, help="profile window override")
    common.add_argument("--epsilon", type=_epsilon, default=None, help="accuracy in (0, 1)")
    common.add_argument("--reversed", action="store_true", help="use the time-reversed chain")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default: ${THREADS_ENV} or CPU count)")
    common.add_argument("--max-states", type=int, default=None,
                        help=f"raise the enumeration limit above {DEFAULT_MAX_STATES} states")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="isomix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "zoo": "list zoo families, or export one chain as JSON",
        "analyze": "all set functionals, gradients and sandwiches for one set",
        "profile": "size profile of a quantity as CSV",
        "bounds": "mixing-time bounds report (JSON)",
        "mixing": "exact TV and chi-square mixing times",
        "verify": "check every inequality on every subset",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    args.epsilon_given = args.epsilon is not None
    if args.epsilon is None:
        args.epsilon = 0.25
    if args.format is None:
        args.format = "csv" if args.command == "profile" else "json"
    try:
        return COMMANDS[args.command](args)
    except (ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
