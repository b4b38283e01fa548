"""Command-line interface.

Network arguments are ``.crn`` paths or ``builtin:NAME`` for a bundled
network (``example1``, ``example2``, ``adder``, ``normalizer``,
``normalizer_swapped``).

Exit codes: 0 success / certified / verified, 1 bad input, 2 not certified
or verification failed, 3 undetermined.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .composability import certify_composable
from .compose import WiringError, couple, rename_species
from .core import Crn, DomainError, MsCrc
from .corpus import builtin_text
from .dynamics import IntegrationError, IntegratorConfig, simulate
from .parser import ParseError, format_network, parse_network
from .reduction import reduce_mscrc
from .structure import UndeterminedError, structural_report
from .verify import verify_composition_numeric, verify_dynamic_computation

EXIT_OK, EXIT_INPUT, EXIT_FAIL, EXIT_UNDETERMINED = 0, 1, 2, 3

# Initial values used for the adder/normalizer demonstration figure.
DEMO_X0 = {"X1": 0.2, "X2": 0.3, "X3": 0.6, "X4": 0.1}
DEMO_Y0 = {"Y1": 0.0, "Y2": 0.0}
DEMO_Z0 = {"Z1": 0.5, "Z2": 0.5}


class CliError(Exception):
    pass


def _load(ref: str):
    try:
        if ref.startswith("builtin:"):
            return parse_network(builtin_text(ref.split(":", 1)[1]))
        return parse_network(Path(ref).read_bytes())
    except ParseError as exc:
        raise CliError(f"{ref}: {exc}") from None
    except (OSError, KeyError) as exc:
        raise CliError(f"{ref}: {exc}") from None


def _load_mscrc(ref: str) -> MsCrc:
    net = _load(ref)
    if not isinstance(net, MsCrc):
        raise CliError(f"{ref}: declare 'inputs' and/or 'outputs' to use it as an msCRC")
    return net


def _pairs(items: Optional[Sequence[str]], what: str) -> dict[str, float]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"{what}: expected NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise CliError(f"{what}: bad number in {item!r}") from None
    return out


def _renames(items: Optional[Sequence[str]]) -> dict[str, str]:
    out = {}
    for item in items or ():
        old, sep, new = item.partition("=")
        if not sep:
            raise CliError(f"--rename: expected OLD=NEW, got {item!r}")
        out[old.strip()] = new.strip()
    return out


def _config(args) -> IntegratorConfig:
    kw = {}
    for flag, key in (("rtol", "rtol"), ("atol", "atol"), ("t_end", "t_end"), ("samples", "samples")):
        value = getattr(args, flag, None)
        if value is not None:
            kw[key] = value
    try:
        return IntegratorConfig(**kw)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_analyze(args) -> int:
    net = _load(args.network)
    crn = net.crn if isinstance(net, MsCrc) else net
    try:
        report = structural_report(crn)
    except UndeterminedError as exc:
        print(json.dumps({"status": "undetermined", "detail": str(exc)}))
        return EXIT_UNDETERMINED
    _emit(report.to_json(indent=2), args.out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    reduced = reduce_mscrc(_load_mscrc(args.network))
    comments = {j: reduced.rate_comment(j) for j in range(len(reduced.base.reactions))}
    text = format_network(reduced.base, comments)
    if reduced.dropped:
        text += "# dropped (no net change on outputs): reactions " + ", ".join(map(str, reduced.dropped)) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    c1 = _load_mscrc(args.first)
    c2 = _load_mscrc(args.second)
    if args.rename:
        c2 = rename_species(c2, _renames(args.rename))
    verdict = certify_composable(c1, c2)
    _emit(verdict.to_json(indent=2), args.out)
    if verdict.certified:
        return EXIT_OK
    return EXIT_UNDETERMINED if verdict.undetermined else EXIT_FAIL


def cmd_compose(args) -> int:
    c1 = _load_mscrc(args.first)
    c2 = _load_mscrc(args.second)
    try:
        coupled = couple(c1, c2, _renames(args.rename))
    except WiringError as exc:
        raise CliError(f"cannot compose: {exc}") from None
    _emit(format_network(coupled.mscrc, coupled.provenance_comments()), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    net = _load(args.network)
    crn: Crn = net.crn if isinstance(net, MsCrc) else net
    init = _pairs(args.init, "--init")
    unknown = set(init) - set(crn.names)
    if unknown:
        raise CliError(f"--init: unknown species {sorted(unknown)}")
    s0 = np.array([init.get(s, 0.0) for s in crn.names])
    trace = simulate(crn, s0, _config(args))
    if args.out:
        Path(args.out).write_text(trace.to_csv())
        Path(args.out).with_suffix(".steady.json").write_text(trace.steady_json())
    else:
        sys.stdout.write(trace.to_csv())
        sys.stderr.write(trace.steady_json() + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    init = _pairs(args.init, "--init")
    c1 = _load_mscrc(args.first)
    if args.second is None:
        target = _pairs(args.target, "--target")
        if set(target) != set(c1.output_names):
            raise CliError(f"--target must give every output: {list(c1.output_names)}")
        x0 = {s: init.get(s, 0.0) for s in c1.input_names}
        y0 = {s: init.get(s, 0.0) for s in c1.output_names}
        report = verify_dynamic_computation(c1, x0, y0, target, args.tol, cfg)
        _emit(report.to_json(indent=2), args.out)
        return EXIT_OK if report.passed else EXIT_FAIL

    c2 = _load_mscrc(args.second)
    rename = _renames(args.rename)
    if rename:
        c2 = rename_species(c2, rename)
    known = set(c1.crn.names) | set(c2.crn.names)
    unknown = set(init) - known
    if unknown:
        raise CliError(f"--init: unknown species {sorted(unknown)}")
    x0 = {s: init.get(s, 0.0) for s in c1.input_names}
    y01 = {s: init.get(s, 0.0) for s in c1.output_names}
    y02 = {s: init.get(s, 0.0) for s in c2.output_names}
    try:
        reports = [verify_composition_numeric(c1, c2, x0, y01, y02, args.tol, cfg)]
        rng = np.random.default_rng(args.seed)
        for _ in range(args.random_runs):
            xr = {s: float(rng.uniform(0.1, 1.0)) for s in c1.input_names}
            reports.append(verify_composition_numeric(c1, c2, xr, y01, y02, args.tol, cfg))
    except WiringError as exc:
        raise CliError(f"cannot compose: {exc}") from None
    payload = reports[0].to_dict()
    if args.random_runs:
        payload["random_runs"] = [{"inputs": r.traces["c1"].states[0].tolist(), **r.to_dict()} for r in reports[1:]]
    _emit(json.dumps(payload, indent=2), args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_demo(args) -> int:
    c1 = parse_network(builtin_text("adder"))
    c2 = parse_network(builtin_text("normalizer_swapped" if args.wiring == "swapped" else "normalizer"))
    cfg = _config(args)
    verdict = certify_composable(c1, c2)
    report = verify_composition_numeric(c1, c2, DEMO_X0, DEMO_Y0, DEMO_Z0, args.tol, cfg)
    trace = report.traces["coupled"]
    csv_path = Path(args.out or "demo_trajectory.csv")
    csv_path.write_text(trace.to_csv())
    summary = {
        "wiring": args.wiring,
        "certified": verdict.certified,
        "reasons": verdict.reasons,
        "verification": report.to_dict(),
        "csv": str(csv_path),
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK if verdict.certified and report.passed else EXIT_FAIL


def _add_integrator_flags(p):
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--samples", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crncompose", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="structural report as JSON")
    p.add_argument("network")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("reduce", help="reduced system of an msCRC as .crn")
    p.add_argument("network")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("check", help="structural composability certificate")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--rename", action="append", metavar="OLD=NEW", help="rename species of the second network")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compose", help="coupled network of two msCRCs as .crn")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--rename", action="append", metavar="OLD=NEW")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("simulate", help="integrate a network; CSV trajectory plus steady-state JSON")
    p.add_argument("network")
    p.add_argument("--init", action="append", metavar="NAME=VALUE", help="initial value (default 0)")
    p.add_argument("--out", help="CSV path; the steady-state record goes next to it as .steady.json")
    _add_integrator_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="numerical check of a computation or a composition")
    p.add_argument("first")
    p.add_argument("second", nargs="?")
    p.add_argument("--init", action="append", metavar="NAME=VALUE")
    p.add_argument("--target", action="append", metavar="NAME=VALUE", help="expected output limits (single network)")
    p.add_argument("--rename", action="append", metavar="OLD=NEW")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--random-runs", type=int, default=0, help="extra runs with random inputs in [0.1, 1]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_integrator_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="adder + normalizer pipeline; writes the coupled trajectory CSV")
    p.add_argument("--wiring", choices=("printed", "swapped"), default="printed")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--out", help="CSV path (default demo_trajectory.csv)")
    _add_integrator_flags(p)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (CliError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
