"""Command-line interface: enumerate / count / constants / ekstat /
modelcheck over the built-in monoid instances.

Exit codes: 0 success, 2 invalid configuration, 3 unsupported
subset/statistic pairing, 4 numeric failure.  Errors print one
machine-parsable line on stderr (`CODE: detail`).  Report files are
written atomically (temp file + rename).  Scientific notation for --x is
resolved through exact decimal expansion, never floating point.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from . import constants as const
from . import probmodel, sieve, stats
from .core import (
    ALL_ONES,
    ALTERNATING,
    LINEAR,
    LOG_DIVISOR,
    WeightSequence,
    indicator,
    table_weights,
)
from .errors import EmptySampleError, TheoremPairingError, UnsupportedSubsetError
from .instances import (
    MonoidInstance,
    fq_instance,
    gaussian_instance,
    integers_instance,
    p1_function_field_instance,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNSUPPORTED = 3
EXIT_NUMERIC = 4


class CliError(Exception):
    def __init__(self, code: str, detail: str, status: int):
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail
        self.status = status


def parse_x(text: str) -> int:
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise CliError("BAD_X", f"cannot parse {text!r} as a number", EXIT_INVALID)
    if value != value.to_integral_value() or value < 1:
        raise CliError("BAD_X", f"x must be a positive integer, got {text!r}", EXIT_INVALID)
    return int(value)


def parse_instance(text: str) -> MonoidInstance:
    if text == "integers":
        return integers_instance()
    if text == "gaussian":
        return gaussian_instance()
    for prefix, builder in (("fq:", fq_instance), ("p1:", p1_function_field_instance)):
        if text.startswith(prefix):
            body = text[len(prefix):]
            if not body.startswith("q="):
                raise CliError("BAD_INSTANCE", f"expected {prefix}q=<int>, got {text!r}",
                               EXIT_INVALID)
            try:
                q = int(body[2:])
                return builder(q)
            except ValueError as exc:
                raise CliError("BAD_INSTANCE", str(exc), EXIT_INVALID)
    raise CliError("BAD_INSTANCE", f"unknown instance {text!r}", EXIT_INVALID)


def parse_subset(text: str) -> sieve.SubsetSpec:
    try:
        return sieve.SubsetSpec.parse(text)
    except ValueError as exc:
        raise CliError("BAD_SUBSET", str(exc), EXIT_INVALID)


def weights_file_parse(path: str) -> WeightSequence:
    """Weights file: header `B=<dec> alpha=<dec> k=<int>`, then lines
    `k<TAB>a_k` with exact rationals (`p/q`) allowed; unlisted a_k are 0."""
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliError("BAD_WEIGHTS", str(exc), EXIT_INVALID)
    header = None
    table: dict[int, Fraction] = {}
    for ln, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            parts = dict(p.split("=", 1) for p in line.split() if "=" in p)
            if set(parts) != {"B", "alpha", "k"}:
                raise CliError("BAD_WEIGHTS",
                               f"line {ln}: header must be `B=<dec> alpha=<dec> k=<int>`",
                               EXIT_INVALID)
            try:
                header = (float(parts["B"]), float(parts["alpha"]), int(parts["k"]))
            except ValueError:
                raise CliError("BAD_WEIGHTS", f"line {ln}: bad header values", EXIT_INVALID)
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise CliError("BAD_WEIGHTS", f"line {ln}: expected `k<TAB>a_k`", EXIT_INVALID)
        try:
            idx = int(fields[0])
            table[idx] = Fraction(fields[1])
        except (ValueError, ZeroDivisionError):
            raise CliError("BAD_WEIGHTS", f"line {ln}: bad index or coefficient", EXIT_INVALID)
    if header is None:
        raise CliError("BAD_WEIGHTS", "missing header line", EXIT_INVALID)
    b, alpha, k = header
    try:
        return table_weights(f"weights:{os.path.basename(path)}", table, b, alpha, k)
    except ValueError as exc:
        raise CliError("INVALID_CERTIFICATE", str(exc), EXIT_INVALID)


def parse_statistic(text: str) -> WeightSequence:
    presets = {"omega": ALL_ONES, "bigomega": LINEAR, "logd": LOG_DIVISOR,
               "omegaT": ALTERNATING}
    if text in presets:
        return presets[text]
    if text.startswith("omega_k:"):
        try:
            return indicator(int(text.split(":", 1)[1]))
        except ValueError as exc:
            raise CliError("BAD_STAT", str(exc), EXIT_INVALID)
    if text.startswith("weights:"):
        return weights_file_parse(text.split(":", 1)[1])
    raise CliError("BAD_STAT", f"unknown statistic {text!r}", EXIT_INVALID)


def atomic_write(path: str, data: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".ekmonoid-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_report(report: dict, fmt: str, out: str | None) -> None:
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        delim = "\t" if fmt == "tsv" else ","
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter=delim, lineterminator="\n")
        for key, value in sorted(report.items()):
            if isinstance(value, (list, tuple)):
                for row in value:
                    writer.writerow([key, *(row if isinstance(row, (list, tuple)) else [row])])
            else:
                writer.writerow([key, value])
        text = buf.getvalue()
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_enumerate(args) -> dict | None:
    instance = parse_instance(args.instance)
    x = parse_x(args.x)
    spec = parse_subset(args.subset)
    lines = [f.to_line() for f in sieve.enumerate_elements(instance, x, spec, args.shards)]
    body = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        atomic_write(args.out, body)
    else:
        sys.stdout.write(body)
    return None


def cmd_count(args) -> dict:
    instance = parse_instance(args.instance)
    x = parse_x(args.x)
    spec = parse_subset(args.subset)
    n = sieve.count(instance, x, spec)
    main = sieve.count_main_term(instance, x, spec)
    formula = {"all": "linear_density", "hfree": "hfree_density",
               "hfull": "hfull_density"}[spec.effective_kind]
    return {
        "instance": instance.name,
        "x": x,
        "subset": str(spec),
        "count": n,
        "main_term": main,
        "relative_error": (n - main) / main if main else math.inf,
        "formula_id": formula,
        "computed": n,
        "predicted": main,
    }


def cmd_constants(args) -> dict:
    instance = parse_instance(args.instance)
    which = args.which
    params: dict = {}
    if which == "zeta_M":
        if args.s is None:
            raise CliError("BAD_PARAMS", "zeta_M requires --s", EXIT_INVALID)
        result = const.zeta_M(instance, args.s, args.tail, args.shards)
        params = {"s": args.s}
    elif which == "gamma_h":
        result = const.gamma_h(instance, _need_h(args), args.tail, args.shards)
        params = {"h": args.h}
    elif which == "mertens_A":
        result = const.mertens_A(instance, shards=args.shards)
        params = {}
    elif which == "c1":
        result = const.c1_constant(instance, _need_h(args), shards=args.shards)
        params = {"h": args.h}
    elif which == "L_h_r":
        if args.r is None:
            raise CliError("BAD_PARAMS", "L_h_r requires --r", EXIT_INVALID)
        result = const.L_h_r(instance, _need_h(args), args.r, args.tail, args.shards)
        params = {"h": args.h, "r": args.r}
    elif which == "d1":
        result = const.d1_constant(instance, _need_h(args), shards=args.shards)
        params = {"h": args.h}
    else:
        raise CliError("BAD_PARAMS", f"unknown constant {which!r}", EXIT_INVALID)
    return {
        "which": which,
        "params": params,
        "value": result.value,
        "truncation_norm": result.truncation_norm,
        "tail_bound": result.tail_bound,
        "tail_kind": result.tail_kind,
    }


def _need_h(args) -> int:
    if args.h is None:
        raise CliError("BAD_PARAMS", f"{args.which} requires --h", EXIT_INVALID)
    return args.h


def cmd_ekstat(args) -> dict:
    instance = parse_instance(args.instance)
    x = parse_x(args.x)
    spec = parse_subset(args.subset)
    weights = parse_statistic(args.stat)
    scores = stats.standardized_scores(instance, x, spec, weights)
    report = stats.moment_report(scores, args.rmax)
    if args.cdf_out:
        rows = stats.empirical_cdf_table(scores)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "empirical_cdf", "phi_t"])
        writer.writerows(rows)
        atomic_write(args.cdf_out, buf.getvalue())
    if args.fig_out:
        from .plotting import render_cdf_figure

        render_cdf_figure(scores, args.fig_out)
    return {
        "instance": instance.name,
        "x": x,
        "subset": str(spec),
        "stat": weights.name,
        "k_norm": scores.k_norm,
        "n_samples": report.n_samples,
        "excluded_small": scores.excluded_small,
        "ks_distance": report.ks_distance,
        "moment_table": [list(row) for row in report.moment_table],
        "raw_mean": report.raw_mean,
        "raw_variance": report.raw_variance,
        "density_weight": report.density_weight,
        "formula_id": "standardized_score_gaussian_limit",
        "computed": report.ks_distance,
        "predicted": 0.0,
    }


def cmd_modelcheck(args) -> dict:
    instance = parse_instance(args.instance)
    x = parse_x(args.x)
    spec = parse_subset(args.subset)
    conditions = probmodel.condition_check(instance, x, spec, args.beta, args.y,
                                           include_f=args.include_f)
    moments = probmodel.model_vs_truncated(instance, x, spec, args.y, args.rmax, args.beta)
    audit = probmodel.condition_a_audit(instance, x, spec, args.beta, args.sample)
    return {
        "instance": instance.name,
        "x": x,
        "subset": str(spec),
        "beta": args.beta,
        "conditions": [
            {
                "name": c.name,
                "value_at_sqrt_x": c.value_at_sqrt_x,
                "value_at_x": c.value_at_x,
                "normalizer": c.normalizer_at_x,
                "pass": c.passed,
            }
            for c in conditions
        ],
        "moment_rows": [list(row) for row in moments],
        "condition_a_max": audit,
        "condition_a_bound": math.ceil(1.0 / args.beta),
        "formula_id": "bernoulli_model_moments",
        "computed": [row[1] for row in moments],
        "predicted": [row[2] for row in moments],
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ekmonoid")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, subset=True):
        p.add_argument("--instance", required=True)
        p.add_argument("--x", required=True)
        if subset:
            p.add_argument("--subset", default="all")
        p.add_argument("--format", choices=["json", "tsv", "csv"], default="json")
        p.add_argument("--out")
        p.add_argument("--shards", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("enumerate", help="write subset elements as norm<TAB>factorization")
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("count", help="exact subset count with its predicted main term")
    common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("constants", help="evaluate an analytic constant with tail control")
    p.add_argument("--instance", required=True)
    p.add_argument("--which", required=True)
    p.add_argument("--h", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=float)
    p.add_argument("--tail", type=float, default=1e-8)
    p.add_argument("--format", choices=["json", "tsv", "csv"], default="json")
    p.add_argument("--out")
    p.add_argument("--shards", type=int, default=1)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("ekstat", help="standardized-score distribution diagnostics")
    common(p)
    p.add_argument("--stat", default="omega")
    p.add_argument("--rmax", type=int, default=4)
    p.add_argument("--cdf-out")
    p.add_argument("--fig-out")
    p.set_defaults(func=cmd_ekstat)

    p = sub.add_parser("modelcheck", help="Bernoulli model comparison and condition checks")
    common(p)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--y", type=int)
    p.add_argument("--rmax", type=int, default=4)
    p.add_argument("--sample", type=int, default=10**5)
    p.add_argument("--include-f", action="store_true")
    p.set_defaults(func=cmd_modelcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else 0
    try:
        report = args.func(args)
        if report is not None:
            emit_report(report, args.format, args.out)
        return EXIT_OK
    except CliError as exc:
        print(f"{exc.code}: {exc.detail}", file=sys.stderr)
        return exc.status
    except TheoremPairingError as exc:
        print(f"THEOREM_PAIRING: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except UnsupportedSubsetError as exc:
        print(f"UNSUPPORTED_SUBSET: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except EmptySampleError as exc:
        print(f"EMPTY_SAMPLE: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ZeroDivisionError, OverflowError, FloatingPointError) as exc:
        print(f"INVALID_CONFIG: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ArithmeticError as exc:
        print(f"NUMERIC_FAILURE: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
