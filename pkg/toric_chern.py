#!/usr/bin/env python3
"""
Toric Chern character positivity

Command-line entry point:

    analyze       classify ch_k of one fan (from a JSON file or a catalog family)
    scan          sweep a catalog family grid
    verify-paper  run every verification suite; exit 0 iff all checks pass
    export-fan    write a catalog fan in the fan JSON format

Exit codes: 0 success, 1 the input fan fails validation (or a check fails),
2 usage errors including invalid parameters and out-of-range k.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import settings
from catalog import (
    BatyrevParams,
    BundleParams,
    Example41Params,
    ProjectiveSpaceParams,
    build_family,
    canonical_family,
)
from chern import ch1_report, chern_value, classify, format_rational, hirzebruch_ch2_formula, report_to_dict
from errors import ConsistencyError, DimensionError, InvalidFanError, ParameterError, SurfaceTypeError
from fan import Fan, dump_fan, is_fano, load_fan
from scan_manager import ScanManager
from verification_manager import PaperVerificationManager

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2

BOUND_FLAGS = ["min_d", "max_d", "max_s", "max_twist", "max_a", "max_p", "max_p2", "max_bc"]


def int_list(text: str) -> Tuple[int, ...]:
    """argparse type for comma-separated integers; the empty string is the empty list."""
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_family_arguments(parser: argparse.ArgumentParser, required: bool = False) -> None:
    parser.add_argument('--family', required=required,
                        help='Catalog family: pn, kleinschmidt, example41, batyrev3')
    parser.add_argument('--d', type=int, help='Dimension')
    parser.add_argument('--s', type=int, help='Fiber P^{s-1} of a Kleinschmidt bundle')
    parser.add_argument('--a', type=int_list,
                        help='Twists: one value for example41, s-1 values for kleinschmidt')
    parser.add_argument('--p', type=int_list, help='Five block sizes p0..p4 (batyrev3)')
    parser.add_argument('--b', type=int_list, help='p3 values b_1.. (batyrev3)')
    parser.add_argument('--c', type=int_list, default=(), help='p2-1 values c_2.. (batyrev3)')


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', action='store_true', help='Debug logging')

    parser = argparse.ArgumentParser(description='Exact Chern character positivity for smooth projective toric varieties')
    subparsers = parser.add_subparsers(dest='command', required=True)

    analyze = subparsers.add_parser('analyze', parents=[common], help='Classify ch_k of one fan')
    analyze.add_argument('--fan', help='Fan JSON file (instead of --family)')
    _add_family_arguments(analyze)
    analyze.add_argument('--k', type=int_list, help='Comma-separated degrees (default 1..d)')
    analyze.add_argument('--json', action='store_true', help='Machine-readable output')
    analyze.add_argument('--values', action='store_true', help='Include every per-cone value')
    analyze.add_argument('--oracles', action='store_true',
                         help='Cross-check surface closed forms and ch_1 against the Fano test')

    scan = subparsers.add_parser('scan', parents=[common], help='Sweep a catalog family grid')
    scan.add_argument('--family', required=True, help='Catalog family: pn, kleinschmidt, example41, batyrev3')
    for bound in BOUND_FLAGS:
        scan.add_argument('--' + bound.replace('_', '-'), dest=bound, type=int, help=f'Grid bound {bound}')
    scan.add_argument('--k', type=int_list, default=(2,), help='Comma-separated degrees (default 2)')
    scan.add_argument('--workers', type=int, default=settings.WORKERS, help='Worker processes')
    scan.add_argument('--json', action='store_true', help='JSON lines followed by a summary line')
    scan.add_argument('--csv', help='Also write the records to this CSV file')

    verify = subparsers.add_parser('verify-paper', parents=[common], help='Run every verification suite')
    verify.add_argument('--json', action='store_true', help='Machine-readable records')
    verify.add_argument('--max-bc', type=int, default=3, help='Bound on b_i, c_i of the Picard-three grid')
    verify.add_argument('--max-twist', type=int, default=3, help='Bound on bundle twists')
    verify.add_argument('--workers', type=int, default=settings.VERIFY_WORKERS,
                        help='Worker processes (default: CPU count)')

    export = subparsers.add_parser('export-fan', parents=[common], help='Write a catalog fan as JSON')
    _add_family_arguments(export, required=True)
    export.add_argument('--output', help='Output file (default stdout)')

    args = parser.parse_args(argv)
    if args.command == 'analyze' and (args.fan is None) == (args.family is None):
        parser.error('analyze needs exactly one of --fan and --family')
    return args


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{name}" for name in names if getattr(args, name) is None]
    if missing:
        raise ParameterError(f"Family {args.family} needs {', '.join(missing)}")


def params_from_args(args: argparse.Namespace) -> Tuple[str, Any]:
    """Turn the family flags into a validated parameter record."""
    family = canonical_family(args.family)
    if family == "projective_space":
        _require(args, "d")
        return family, ProjectiveSpaceParams(args.d).validate()
    if family == "kleinschmidt":
        _require(args, "d", "s")
        twists = args.a if args.a is not None else (0,) * (args.s - 1)
        return family, BundleParams(args.d, args.s, tuple(twists)).validate()
    if family == "example41":
        _require(args, "d", "a")
        if len(args.a) != 1:
            raise ParameterError(f"example41 takes a single twist, got {list(args.a)}")
        return family, Example41Params(args.d, args.a[0]).validate()
    _require(args, "p", "b")
    params = BatyrevParams(tuple(args.p), tuple(args.b), tuple(args.c or ())).validate()
    return family, params.normalized()


def load_source(args: argparse.Namespace) -> Fan:
    if args.fan:
        try:
            return load_fan(args.fan)
        except OSError as e:
            raise InvalidFanError(f"Cannot read {args.fan}: {e}") from e
        except json.JSONDecodeError as e:
            raise InvalidFanError(f"Malformed JSON in {args.fan}: {e}") from e
    family, params = params_from_args(args)
    return build_family(family, params)


def run_oracles(fan: Fan) -> Dict[str, Any]:
    """Surface closed forms on every Hirzebruch-type codim-2 cone, and ch_1 against the Fano test."""
    surfaces = 0
    if fan.rank >= 2:
        for tau in fan.cones_of_dim(fan.rank - 2):
            try:
                expected = hirzebruch_ch2_formula(fan, tau)
            except SurfaceTypeError:
                continue
            surfaces += 1
            computed = chern_value(fan, 2, tau)
            if expected != computed:
                logger.error(f"Surface formula gives {expected} but engine gives {computed} on {fan.ray_names(tau)}")
                raise ConsistencyError(f"Surface formula mismatch on {fan.ray_names(tau)}")
    ch1 = ch1_report(fan)
    logger.info(f"Oracles agree on {surfaces} surfaces; ch_1 {ch1.classification}")
    return {"surfaces_checked": surfaces, "ch1_matches_fano": True}


@dataclass(frozen=True)
class AnalysisRequest:
    """A resolved `analyze` invocation: the fan plus the degrees and outputs asked for."""
    fan: Fan
    ks: Tuple[int, ...]
    as_json: bool = False
    values: bool = False
    oracles: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "AnalysisRequest":
        """Load the fan and check every k before anything is printed."""
        fan = load_source(args)
        ks = tuple(args.k) if args.k else tuple(range(1, fan.rank + 1))
        for k in ks:
            if not 1 <= k <= fan.rank:
                raise DimensionError(f"k={k} outside 1..{fan.rank}")
        return cls(fan, ks, as_json=args.json, values=args.values, oracles=args.oracles)


def cmd_analyze(args: argparse.Namespace) -> int:
    request = AnalysisRequest.from_args(args)
    fan = request.fan

    reports = [classify(fan, k) for k in request.ks]
    oracles = run_oracles(fan) if request.oracles else None
    fano = is_fano(fan)

    if request.as_json:
        payload: Dict[str, Any] = {
            "fan": {"rank": fan.rank, "num_rays": fan.num_rays, "picard_number": fan.picard_number, "fano": fano},
            "reports": [report_to_dict(fan, r, include_values=request.values) for r in reports],
        }
        if oracles is not None:
            payload["oracles"] = oracles
        print(json.dumps(payload, sort_keys=True, indent=2))
        return EXIT_OK

    print(f"Fan: d={fan.rank}, {fan.num_rays} rays, Picard number {fan.picard_number}, "
          f"{'Fano' if fano else 'not Fano'}")
    for report in reports:
        print(f"ch_{report.k}: {report.classification} (minimum {format_rational(report.min_value)} "
              f"on {{{', '.join(fan.ray_names(report.witness))}}})")
        if request.values:
            for value in report.values:
                print(f"  {{{', '.join(fan.ray_names(value.cone))}}}: {format_rational(value.value)}")
    if oracles is not None:
        print(f"Oracles: {oracles['surfaces_checked']} surfaces agree, ch_1 agrees with the Fano test")
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    bounds = {name: getattr(args, name) for name in BOUND_FLAGS if getattr(args, name) is not None}
    if not args.k or any(k < 1 for k in args.k):
        raise DimensionError(f"k must be positive, got {list(args.k)}")
    manager = ScanManager(args.family, args.k, bounds=bounds, workers=args.workers)
    records = manager.run()
    summary = manager.summary(records)

    if args.json:
        for record in records:
            print(json.dumps(record, sort_keys=True))
        print(json.dumps({"summary": summary.to_dict(orient="records")}, sort_keys=True, default=int))
    else:
        print(summary.to_string(index=False))
    if args.csv:
        manager.to_csv(records, args.csv)
    return EXIT_OK


def cmd_verify_paper(args: argparse.Namespace) -> int:
    manager = PaperVerificationManager(max_bc=args.max_bc, max_twist=args.max_twist, workers=args.workers)
    records = manager.run_all()
    failed = [r for r in records if not r.passed]

    if args.json:
        print(json.dumps({"passed": not failed, "records": [r.to_dict() for r in records]}, sort_keys=True, indent=2))
    else:
        print(manager.to_frame(records).to_string(index=False))
        print()
        print(manager.summary(records).to_string(index=False))
        print(f"\n{len(records) - len(failed)}/{len(records)} checks passed")
    return EXIT_OK if not failed else EXIT_INVALID


def cmd_export_fan(args: argparse.Namespace) -> int:
    family, params = params_from_args(args)
    text = dump_fan(build_family(family, params), args.output)
    if not args.output:
        print(text)
    return EXIT_OK


COMMANDS = {
    'analyze': cmd_analyze,
    'scan': cmd_scan,
    'verify-paper': cmd_verify_paper,
    'export-fan': cmd_export_fan,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main function to dispatch a subcommand and map library errors to exit codes."""
    try:
        args = parse_arguments(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    settings.configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (ParameterError, DimensionError) as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except (InvalidFanError, ConsistencyError) as e:
        logger.error(f"Invalid input fan: {e}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
