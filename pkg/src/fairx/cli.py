"""``fairx`` command line.

Exit status: 0 on success, 1 when the requested check fails (not optimal,
not an equilibrium, unstable, not converged, oracle mismatch), 2 on bad
input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .equilibrium import is_exchange_equilibrium, proportionalize
from .errors import FairxError
from .lex import solve_lex_optimal
from .market import Allocation, MarketGraph, fmt, to_rational
from .oracle import hall_minimum, maxmin_programming
from .sim import SimConfig, convergence_report, simulate
from .stability import DEFAULT_CAP, strong_stability_check, weak_stability_check
from .structure import redundant_links, verify_level_structure

log = logging.getLogger("fairx")


class InputError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None


def _load_market(path) -> MarketGraph:
    data = _load_json(path)
    try:
        return MarketGraph.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: expected {{'nodes': [...], 'edges': [...]}} ({exc})") from None


def _load_allocation(market, path) -> Allocation:
    data = _load_json(path)
    try:
        return Allocation.from_dict(market, data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: expected {{'flows': [...]}} ({exc})") from None


def _load_received(market, path):
    data = _load_json(path)
    table = data.get("received", data) if isinstance(data, dict) else None
    if not isinstance(table, dict):
        raise InputError(f"{path}: expected {{'received': {{id: amount}}}}")
    missing = [nid for nid in market.ids if nid not in table]
    if missing:
        raise InputError(f"{path}: no received amount for {', '.join(missing)}")
    return [to_rational(table[nid]) for nid in market.ids]


def _emit(payload, out):
    text = json.dumps(payload, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_solve(args):
    market = _load_market(args.market)
    solution = solve_lex_optimal(market)
    payload = solution.to_dict(explain=args.explain)
    if args.equilibrium:
        payload["flows"] = [
            [market.ids[i], market.ids[j], fmt(a)]
            for (i, j), a in sorted(proportionalize(market, solution).flows.items())
        ]
    payload["redundant_links"] = [list(e) for e in redundant_links(market, solution)]
    _emit(payload, args.output)
    return 0


def cmd_verify(args):
    market = _load_market(args.market)
    allocation = _load_allocation(market, args.alloc) if args.alloc else solve_lex_optimal(market).allocation
    report = verify_level_structure(market, allocation)
    _emit(report.to_dict(), args.output)
    return 0 if report.passed else 1


def cmd_equilibrium(args):
    market = _load_market(args.market)
    if args.check:
        report = is_exchange_equilibrium(market, _load_allocation(market, args.check))
        _emit(report.to_dict(), args.output)
        return 0 if report.is_equilibrium else 1
    solution = solve_lex_optimal(market)
    allocation = proportionalize(market, solution)
    report = is_exchange_equilibrium(market, allocation)
    payload = allocation.to_dict()
    payload["is_equilibrium"] = report.is_equilibrium
    _emit(payload, args.output)
    return 0 if report.is_equilibrium else 1


def cmd_stability(args):
    market = _load_market(args.market)
    received = _load_received(market, args.received)
    check = strong_stability_check if args.mode == "strong" else weak_stability_check
    verdict = check(market, received, cap=args.cap, workers=args.workers)
    _emit(verdict.to_dict(), args.output)
    return 0 if verdict.stable else 1


def cmd_simulate(args):
    market = _load_market(args.market)
    config = SimConfig(tokens=args.tokens, seed=args.seed, sample_every=args.sample_every)
    trace = simulate(market, config)
    summary = {"config": config.to_dict(), "clock": trace.clock, "final_ratios": trace.final()}
    status = 0
    if args.ref:
        report = convergence_report(trace, solve_lex_optimal(market), args.tolerance)
        summary["convergence"] = report.to_dict()
        status = 0 if report.passed else 1
    if args.csv == "-":
        sys.stdout.write(trace.to_csv())
        if args.output:
            _emit(summary, args.output)
    else:
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                fh.write(trace.to_csv())
        _emit(summary, args.output)
    return status


def cmd_oracle(args):
    market = _load_market(args.market)
    ratios = maxmin_programming(market)
    hall, _ = hall_minimum(market) if market.edges else (None, None)
    payload = {
        "ratios": {nid: fmt(v) for nid, v in zip(market.ids, ratios)},
        "hall_minimum": fmt(hall) if hall is not None else None,
    }
    status = 0
    if args.compare:
        solved = solve_lex_optimal(market).ratios
        diff = {nid: [fmt(a), fmt(b)] for nid, a, b in zip(market.ids, ratios, solved) if a != b}
        payload["matches_solver"] = not diff
        payload["differences"] = diff
        status = 0 if not diff else 1
    _emit(payload, args.output)
    return status


def build_parser():
    parser = argparse.ArgumentParser(prog="fairx", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fairx {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("market", help="market JSON file")
        p.add_argument("-o", "--output", help="write JSON here instead of stdout")
        return p

    p = common(sub.add_parser("solve", help="lex-optimal allocation and level structure"))
    p.add_argument("--explain", action="store_true", help="attach per-round cut certificates")
    p.add_argument("--equilibrium", action="store_true", help="emit the reciprocal allocation")
    p.set_defaults(func=cmd_solve)

    p = common(sub.add_parser("verify", help="structural report for an allocation"))
    p.add_argument("--alloc", help="allocation JSON (default: the solver's own)")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("equilibrium", help="check or build an exchange equilibrium"))
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--check", metavar="ALLOC", help="allocation JSON to check")
    mode.add_argument("--make", action="store_true", help="solve and rebalance into an equilibrium")
    p.set_defaults(func=cmd_equilibrium)

    p = common(sub.add_parser("stability", help="coalitional stability by enumeration"))
    p.add_argument("received", help='JSON with {"received": {id: amount}}')
    p.add_argument("--mode", choices=("strong", "weak"), default="strong")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest node count to enumerate")
    p.add_argument("--workers", type=int, default=0)
    p.set_defaults(func=cmd_stability)

    p = common(sub.add_parser("simulate", help="token-exchange dynamics with rates = endowments"))
    p.add_argument("--tokens", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-every", type=int, default=100)
    p.add_argument("--ref", action="store_true", help="compare with the lex-optimal levels")
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--csv", metavar="PATH", help="write the time,node,ratio trace ('-' for stdout)")
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("oracle", help="brute-force max-min programming reference"))
    p.add_argument("--compare", action="store_true", help="diff against the solver")
    p.set_defaults(func=cmd_oracle)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if getattr(args, "cap", DEFAULT_CAP) > DEFAULT_CAP:
        log.warning("coalition cap raised to %d; enumeration is exponential", args.cap)
    try:
        return args.func(args)
    except (InputError, FairxError, ValueError) as exc:
        print(f"fairx: error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
