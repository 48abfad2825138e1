"""Command-line front end.

Usage::

    attrsel select data.arff --target SSG_dek23
    attrsel rank data.csv --target SSG --emit csv
    attrsel pca data.arff --variance 0.95
    attrsel corr data.arff --target SSG_dek23 --emit csv
    attrsel select matrix.csv --format matrix        # precomputed correlations
    attrsel synth planted.json --out data.arff

Exit codes: 0 ok, 2 usage or unreadable input, 3 parse error, 4 semantic
error (bad target, empty analysis set), 5 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings

from . import __version__
from .cfs import DEFAULT_MERIT_THRESHOLD, Direction, Mode, greedy_stepwise
from .colstats import MissingPolicy
from .correlate import ABSOLUTE, SIGNED, CorrelationStructure, correlation_structure
from .dataset import Dataset, detect_format, parse_arff, parse_csv, to_arff, to_csv, validate_target
from .errors import ConvergenceError, EmptyAnalysisError, ParseError, SchemaError
from .pca import DEFAULT_VARIANCE_THRESHOLD, PcaMode, pca_fit
from .report import correlation_report, emit_report, pca_report, selection_report
from .synth import PlantedSpec, generate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_SEMANTIC = 4
EXIT_NUMERIC = 5

_MISSING_CHOICES = {"pairwise": MissingPolicy.PAIRWISE, "impute": MissingPolicy.IMPUTE, "drop": MissingPolicy.DROP}


class UsageError(Exception):
    pass


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1]")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input_path", nargs="?", metavar="INPUT", help="input file")
    common.add_argument("--input", dest="input_flag", metavar="PATH", help="input file (alternative to INPUT)")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker threads for correlation pairs")

    analysis = argparse.ArgumentParser(add_help=False)
    analysis.add_argument("--format", choices=("arff", "csv", "matrix"), help="input format (default: from extension)")
    analysis.add_argument("--target", help="numeric target attribute")
    analysis.add_argument("--missing", choices=tuple(_MISSING_CHOICES), default="pairwise")
    analysis.add_argument("--emit", choices=("json", "csv"), default="json")
    analysis.add_argument("--full-precision", action="store_true", help="emit floats at full precision")
    analysis.add_argument(
        "--aggregation",
        choices=(SIGNED, ABSOLUTE),
        default=SIGNED,
        help="combine nominal indicator correlations with or without their sign",
    )

    parser = argparse.ArgumentParser(prog="attrsel", description="Correlation-based attribute selection and PCA.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (("select", "greedy CFS subset selection"), ("rank", "greedy CFS ranking of all attributes")):
        p = sub.add_parser(name, parents=[common, analysis], help=helptext)
        p.add_argument("--direction", choices=("forward", "backward"), default="forward")
        p.add_argument("--merit-threshold", type=_fraction, default=DEFAULT_MERIT_THRESHOLD)

    p = sub.add_parser("pca", parents=[common, analysis], help="principal components of the numeric attributes")
    p.add_argument("--variance", type=_fraction, default=DEFAULT_VARIANCE_THRESHOLD)
    p.add_argument("--pca-mode", choices=("corr", "cov"), default="corr")

    sub.add_parser("corr", parents=[common, analysis], help="correlation matrix against the target")

    p = sub.add_parser("synth", parents=[common], help="generate a planted dataset from a JSON spec")
    p.add_argument("--format", choices=("arff", "csv"), help="output format (default: from --out extension)")
    return parser


def _input_path(args) -> str:
    if args.input_path and args.input_flag and args.input_path != args.input_flag:
        raise UsageError("give the input either positionally or with --input, not both")
    path = args.input_flag or args.input_path
    if not path:
        raise UsageError("no input file given")
    return path


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_dataset(args, text: str, fmt: str) -> Dataset:
    ds = parse_csv(text) if fmt == "csv" else parse_arff(text)
    if args.target is not None:
        ds = validate_target(ds, args.target)
    return ds


def _require_target(ds: Dataset) -> None:
    if ds.target is None:
        raise SchemaError("--target is required for this command")


def _meta(args, ds: Dataset | None) -> dict:
    meta = {"relation": ds.relation if ds is not None else None}
    meta["target"] = ds.target_name if ds is not None else args.target
    meta["rows"] = ds.n_rows if ds is not None else None
    meta["missing"] = args.missing
    meta["aggregation"] = args.aggregation
    return meta


def _run_analysis(args) -> str:
    path = _input_path(args)
    text = _read(path)
    fmt = args.format or detect_format(path)

    if fmt == "matrix":
        if args.command not in ("select", "rank", "corr"):
            raise UsageError("--format matrix is only valid for select, rank and corr")
        corr = CorrelationStructure.from_csv(text, target=args.target)
        meta = _meta(args, None)
        meta["target"] = corr.target_name
        ds = None
    else:
        ds = _load_dataset(args, text, fmt)
        meta = _meta(args, ds)
        corr = None

    policy = _MISSING_CHOICES[args.missing]
    if args.command == "pca":
        exclude = {ds.target} if ds.target is not None else set()
        attrs = [i for i, a in enumerate(ds.attributes) if a.is_numeric and i not in exclude]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = pca_fit(ds, PcaMode(args.pca_mode), args.variance, policy, attrs)
        report = pca_report(result, meta)
    else:
        if corr is None:
            _require_target(ds)
            corr = correlation_structure(ds, policy=policy, aggregation=args.aggregation, threads=args.threads)
        if corr.size == 0:
            raise EmptyAnalysisError("no attributes besides the target")
        if args.command == "corr":
            report = correlation_report(corr, meta)
        else:
            sel = greedy_stepwise(corr, Mode(args.command), Direction(args.direction), args.merit_threshold)
            report = selection_report(sel, meta)
    return emit_report(report, args.emit, args.full_precision)


def _run_synth(args) -> str:
    path = _input_path(args)
    spec = PlantedSpec.from_json(_read(path))
    ds = generate(spec)
    fmt = args.format or (detect_format(args.out) if args.out else "arff")
    return to_csv(ds) if fmt == "csv" else to_arff(ds)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = _run_synth(args) if args.command == "synth" else _run_analysis(args)
    except UsageError as exc:
        print(f"attrsel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"attrsel: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SchemaError, ValueError) as exc:
        print(f"attrsel: error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except (ConvergenceError, ArithmeticError, FloatingPointError) as exc:
        print(f"attrsel: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"attrsel: error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
