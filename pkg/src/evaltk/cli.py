"""``evaltk`` command line.

Every command prints one JSON document (or CSV with ``--format csv``)
carrying the tool version, the fully resolved parameters and the result.
Exit codes: 0 ok, 2 domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import enum
import functools
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .calibration import Calibrator, e_to_p, jeffreys_table, round_trip, validate_calibrator
from .combination import combine_report, p_average_counterexample, sequential_product
from .datasplit import BernoulliDataset, derandomized_e, reproducibility_report
from .space import (
    DEFAULT_TOL,
    DomainError,
    FiniteSpace,
    RandomVariable,
    expectation,
    is_e_variable,
    is_p_variable,
    p_excess,
)
from .testing import (
    HypothesisPair,
    likelihood_ratio_e,
    log_optimality_check,
    np_p_variable,
    p_uniformity_check,
)


class Status(enum.Enum):
    OK = 0
    DOMAIN_ERROR = 2
    IO_ERROR = 3


@dataclass
class CommandResult:
    status: Status
    payload: dict
    csv_rows: list[list] | None = field(default=None, repr=False)

    @property
    def exit_code(self) -> int:
        return self.status.value


def _round(x, precision: int):
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return None
        return float(f"{x:.{precision}g}")
    if isinstance(x, dict):
        return {k: _round(v, precision) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v, precision) for v in x]
    return _round(float(x), precision)


def _read_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _parse_number(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise DomainError(f"not a number: {s!r}") from None


def _need_seed(args) -> int:
    if args.seed is None:
        raise DomainError("--seed is required for randomized computations")
    return args.seed


# each command returns (result dict, csv rows or None)

def cmd_calibrate(args):
    cal = Calibrator.parse(args.cal)
    e = cal(args.p)
    return {"e": e}, [["p", "e"], [args.p, e]]


def cmd_e2p(args):
    e = _parse_number(args.e)
    p = e_to_p(e, args.floor)
    return {"p": p}, [["e", "p"], [e, p]]


def cmd_roundtrip(args):
    r = round_trip(args.p, Calibrator.parse(args.cal))
    result = {"p_in": r.p_in, "e": r.e_mid, "p_out": r.p_out, "significant_5pct": r.p_out <= 0.05}
    return result, [["p_in", "e", "p_out"], [r.p_in, r.e_mid, r.p_out]]


def cmd_jeffreys(args):
    rows = jeffreys_table()
    result = {"rows": [
        {"p": r.p, "jeffreys_e": r.jeffreys_e, "shafer_e": r.shafer_e, "verdict": r.verdict}
        for r in rows
    ]}
    table = [["p", "jeffreys_e", "shafer_e", "verdict"]]
    table += [[r.p, r.jeffreys_e, r.shafer_e, r.verdict] for r in rows]
    return result, table


def _load_rv(args) -> tuple[FiniteSpace, RandomVariable]:
    rv_doc = _read_json(args.rv)
    space_doc = _read_json(args.space) if args.space else rv_doc
    space = FiniteSpace.from_dict(space_doc)
    return space, RandomVariable.from_dict(space, rv_doc)


def cmd_validate(args):
    if args.kind == "calibrator":
        rep = validate_calibrator(Calibrator.parse(args.cal), args.grid, args.tol)
        d = rep.to_dict()
        d["valid"] = rep.ok
        return d, None
    if not args.rv:
        raise DomainError("--rv is required for kind e or p")
    space, rv = _load_rv(args)
    if args.kind == "e":
        return {"valid": is_e_variable(space, rv, args.tol),
                "expectation": float(expectation(space, rv))}, None
    worst = max((float(m) - float(v) for v, m in p_excess(space, rv)), default=0.0)
    return {"valid": is_p_variable(space, rv, args.tol), "max_excess": worst}, None


def cmd_combine(args):
    if args.demo_p_counterexample:
        cert = p_average_counterexample(args.grid)
        return {"threshold": float(cert.threshold), "violation": float(cert.violation),
                "verified": cert.verify(), "grid": args.grid}, None
    if args.factors:
        trace = sequential_product([_parse_number(f) for f in args.factors.split(",")])
        rows = [["round", "factor", "wealth"], [0, "", trace.wealth[0]]]
        rows += [[k, f, w] for k, (f, w) in enumerate(zip(trace.factors, trace.wealth[1:]), 1)]
        return {"factors": list(trace.factors), "wealth": list(trace.wealth)}, rows
    if not args.input:
        raise DomainError("combine needs --input, --factors or --demo-p-counterexample")
    doc = _read_json(args.input)
    space = FiniteSpace.from_dict(doc)
    evars = [RandomVariable.from_dict(space, {"values": v}) for v in doc.get("evars", [])]
    pvars = [RandomVariable.from_dict(space, {"values": v}) for v in doc.get("pvars", [])]
    if not evars:
        raise DomainError("input has no evars")
    return combine_report(evars, pvars, args.tol), None


def cmd_lrtest(args):
    pair = HypothesisPair.from_dict(_read_json(args.pair))
    e = likelihood_ratio_e(pair)
    p = np_p_variable(pair)
    result = {
        "e": list(e.values),
        "p": [float(x) for x in p.values],
        "null_expectation": float(expectation(pair.space, e)),
        "uniformity": p_uniformity_check(p, args.tol).to_dict(),
    }
    if args.trials:
        result["optimality"] = log_optimality_check(pair, args.trials, _need_seed(args)).to_dict()
    rows = [["outcome", "e", "p"]] + [[o, a, float(b)] for o, a, b in zip(pair.outcomes, e.values, p.values)]
    return result, rows


def cmd_splitsim(args):
    data = BernoulliDataset.load(args.data)
    seeds = None
    if args.mode == "seeds":
        base = _need_seed(args)
        seeds = list(range(base, base + args.n_seeds))
    rep = derandomized_e(data, seeds, args.mode, args.theta0, args.smoothing,
                         args.train_fraction, args.workers)
    result = rep.to_dict()
    if args.spread:
        base = _need_seed(args)
        rr = reproducibility_report(data, args.n_seeds, tuple(args.batch_sizes), base,
                                    args.theta0, args.smoothing, args.train_fraction)
        result["reproducibility"] = rr.to_dict()
    rows = [["seed", "e_value", "p_value"]]
    rows += [[s, e, p] for (s, e), p in zip(rep.per_seed, rep.p_per_seed)]
    return result, rows


@functools.lru_cache(maxsize=None)
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--precision", type=int, default=6, help="significant digits")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--output", default=None, help="write to FILE instead of stdout")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)

    parser = argparse.ArgumentParser(prog="evaltk", description="p-values, e-values and testing by betting")
    parser.add_argument("--version", action="version", version=f"evaltk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", parents=[common], help="p-value to e-value")
    p.add_argument("--cal", default="shafer", help="shafer | power:<kappa>")
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("e2p", parents=[common], help="e-value to p-value, min(1, 1/e)")
    p.add_argument("--e", required=True)
    p.add_argument("--floor", type=float, default=0.0)
    p.set_defaults(func=cmd_e2p)

    p = sub.add_parser("roundtrip", parents=[common], help="p -> e -> p")
    p.add_argument("--cal", default="shafer")
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("jeffreys", parents=[common], help="Jeffreys vs Shafer table")
    p.set_defaults(func=cmd_jeffreys)

    p = sub.add_parser("validate", parents=[common], help="check an e-variable, p-variable or calibrator")
    p.add_argument("--kind", choices=["e", "p", "calibrator"], required=True)
    p.add_argument("--space", default=None, help="space JSON (defaults to the --rv file)")
    p.add_argument("--rv", default=None)
    p.add_argument("--cal", default="shafer")
    p.add_argument("--grid", type=int, default=1000)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("combine", parents=[common], help="average e-values, martingale products")
    p.add_argument("--input", default=None, help='JSON {"outcomes","probs","evars","pvars"}')
    p.add_argument("--factors", default=None, help="comma-separated per-round e-values")
    p.add_argument("--demo-p-counterexample", action="store_true")
    p.add_argument("--grid", type=int, default=100)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("lrtest", parents=[common], help="likelihood-ratio e-variable and NP p-variable")
    p.add_argument("--pair", required=True)
    p.add_argument("--trials", type=int, default=0, help="log-optimality trials (needs --seed)")
    p.set_defaults(func=cmd_lrtest)

    p = sub.add_parser("splitsim", parents=[common], help="data-splitting e-values")
    p.add_argument("--data", required=True)
    p.add_argument("--mode", choices=["exhaustive", "seeds"], default="exhaustive")
    p.add_argument("--n-seeds", type=int, default=100)
    p.add_argument("--theta0", type=float, default=0.5)
    p.add_argument("--smoothing", type=float, default=1.0)
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--spread", action="store_true", help="add a reproducibility report (needs --seed)")
    p.add_argument("--batch-sizes", type=int, nargs="+", default=[1, 50])
    p.set_defaults(func=cmd_splitsim)
    return parser


def _params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "output")}


def execute(args: argparse.Namespace) -> tuple[CommandResult, str]:
    """Run a parsed command; returns the result and its rendered text."""
    header = {"tool": "evaltk", "version": __version__, "command": args.command, "params": _params(args)}
    try:
        result, rows = args.func(args)
        res = CommandResult(Status.OK, {**header, "status": "ok", "result": result}, rows)
    except DomainError as exc:
        res = CommandResult(Status.DOMAIN_ERROR, {**header, "status": "domain_error", "error": str(exc)})
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        res = CommandResult(Status.IO_ERROR, {**header, "status": "io_error", "error": str(exc)})

    if args.format == "csv" and res.csv_rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in res.csv_rows:
            w.writerow(_round(row, args.precision))
        text = buf.getvalue()
    else:
        text = json.dumps(_round(res.payload, args.precision), indent=2) + "\n"
    return res, text


def run(argv: list[str] | None = None) -> tuple[CommandResult, str]:
    return execute(build_parser().parse_args(argv))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    res, text = execute(args)
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            sys.stderr.write(f"evaltk: cannot write {args.output}: {exc}\n")
            return Status.IO_ERROR.value
    else:
        sys.stdout.write(text)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
