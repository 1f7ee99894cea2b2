"""Command-line front end.

Exit codes: 0 success, 1 parse/usage error, 2 infeasible, 3 catalogue error,
4 internal error. Every failure prints one ``ERROR(<code>): ...`` line on
stderr.
"""
from __future__ import annotations

import argparse
import logging
import secrets
import sys
from pathlib import Path
from typing import Optional, Sequence

from .catalogue import load_catalogue
from .doml import read_input_archive
from .errors import ArchiveError, CatalogueError, DomlError, IacOptError, InfeasibleError, NoCandidatesError
from .moea import AlgoParams
from .orchestrator import DEFAULT_MAX_SOLUTIONS, optimize

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_CATALOGUE, EXIT_INTERNAL = 0, 1, 2, 3, 4

log = logging.getLogger("iacopt")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _fail(EXIT_USAGE, message)
        raise SystemExit(EXIT_USAGE)


def _fail(code: int, message: str) -> int:
    print(f"ERROR({code}): " + " ".join(str(message).split()), file=sys.stderr)
    return code


def _seed(text: str) -> int:
    if text == "random":
        return secrets.randbits(64)
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer or 'random', got {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("probability must lie in [0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iacopt", description="Optimize IaC deployment configurations described in DOML.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    opt = sub.add_parser("optimize", help="optimize a DOML document against a catalogue")
    opt.add_argument("--input", required=True, type=Path, help=".doml file or .zip holding one")
    opt.add_argument("--catalogue", required=True, type=Path, help="catalogue JSON file")
    opt.add_argument("--output", type=Path, help="output path (default: <input stem>.out.doml)")
    opt.add_argument("--seed", type=_seed, default=42, help="u64 seed or 'random' (default 42)")
    opt.add_argument("--population", type=_positive)
    opt.add_argument("--generations", type=_positive)
    opt.add_argument("--crossover", type=_probability, help="crossover probability (default 0.9)")
    opt.add_argument("--mutation", type=_probability, help="per-gene mutation probability (default 1/slots)")
    opt.add_argument("--algorithm", choices=("auto", "nsga2", "nsga3"), default="auto")
    opt.add_argument("--max-solutions", type=_positive, default=DEFAULT_MAX_SOLUTIONS)
    opt.add_argument("--brute-force", action="store_true", help="exhaustive enumeration instead of evolution")
    opt.add_argument("--cost-unit", default="euro")
    opt.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def default_output(input_path: Path) -> Path:
    return input_path.with_name(input_path.stem + ".out.doml")


def run_optimize(args) -> int:
    try:
        text = read_input_archive(args.input)
    except ArchiveError as exc:
        return _fail(EXIT_USAGE, exc)
    try:
        catalogue = load_catalogue(args.catalogue)
    except CatalogueError as exc:
        return _fail(EXIT_CATALOGUE, exc)

    overrides = {
        k: v for k, v in {
            "population_size": args.population,
            "generations": args.generations,
            "crossover_prob": args.crossover,
            "mutation_prob_per_gene": args.mutation,
        }.items() if v is not None
    }
    try:
        params = AlgoParams(seed=args.seed, **overrides)
    except ValueError as exc:
        return _fail(EXIT_USAGE, exc)

    try:
        result = optimize(
            text,
            catalogue,
            params,
            algorithm=args.algorithm,
            max_solutions=args.max_solutions,
            cost_unit=args.cost_unit,
            brute_force=args.brute_force,
        )
    except DomlError as exc:
        return _fail(EXIT_USAGE, f"{args.input}:{exc}")
    except InfeasibleError as exc:
        if exc.report is not None:
            print(exc.report.summary(), file=sys.stderr)
        return _fail(EXIT_INFEASIBLE, exc)
    except NoCandidatesError as exc:
        return _fail(EXIT_INFEASIBLE, exc)
    except IacOptError as exc:
        return _fail(EXIT_USAGE, exc)

    output = args.output or default_output(args.input)
    try:
        output.write_text(result.text, encoding="utf-8")
    except OSError as exc:
        return _fail(EXIT_INTERNAL, f"cannot write {output}: {exc}")
    print(result.report.summary(), file=sys.stderr)
    print(f"output: {output}", file=sys.stderr)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    level = {0: logging.ERROR, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return run_optimize(args)
    except Exception as exc:  # last-resort mapping to the documented exit code
        log.debug("internal error", exc_info=True)
        return _fail(EXIT_INTERNAL, f"internal error: {exc!r}")


if __name__ == "__main__":
    sys.exit(main())
