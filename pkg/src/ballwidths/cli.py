"""Command-line front end.

Usage::

    ballwidths estimate --config configs/case3.json
    ballwidths estimate --ball 4:1 --ball 1:2 --N 16 --n 4 --q 2
    ballwidths sweep --config configs/sweep.json --output sweep.csv

Exit codes: 0 success, 1 I/O error, 2 configuration or input error,
3 precondition error, 4 unsupported regime.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from itertools import product
from typing import Iterable, Optional, Sequence

from .balls import format_p
from .config import (
    COMMANDS,
    FORMATS,
    RunConfig,
    SweepAxes,
    check_required,
    exponent_z,
    load_document,
    parse_config,
)
from .exceptions import ConfigError, InvalidInputError, PreconditionError, UnsupportedRegimeError
from .formulas import Case, WidthQuery, estimate
from .kappa import check_condition4, kappa_pair
from .normalize import normalize_family
from .oracle import sandwich

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_UNSUPPORTED = 4

WIDTH_COLUMNS = (
    "n", "N", "q", "case", "phi", "phi1", "phi2", "phi3", "upper", "lower",
    "alpha_star_p", "beta_star_p", "warnings",
)
NORMALIZE_COLUMNS = ("p", "nu", "nu_normalized", "changed")
CHECK_COLUMNS = ("alpha_p", "beta_p", "kappa", "N", "status")


# --- records ---


def _q_value(zq: float) -> float:
    return math.inf if zq == 0.0 else 1.0 / zq


def evaluate_point(cfg: RunConfig, N: int, n: int, q, with_sandwich: bool) -> dict:
    """Estimate (and optionally sandwich) one query; errors propagate."""
    zq = exponent_z(q)
    fam = cfg.family(N)
    query = WidthQuery(n, N, zq)
    row = dict.fromkeys(WIDTH_COLUMNS)
    row.update(n=n, N=N, q=_q_value(zq))
    if with_sandwich:
        rep = sandwich(fam, query, cfg.auto_normalize, cfg.resolution, cfg.seed)
        res, notes = rep.estimate, rep.warnings
        row.update(upper=rep.upper, lower=rep.lower)
    else:
        res = estimate(fam, query, auto_normalize=cfg.auto_normalize)
        notes = res.warnings
    a, b = res.alpha_star, res.beta_star
    row.update(
        case=str(res.case_tag),
        phi=res.value,
        alpha_star_p=None if a is None else format_p(a.z),
        beta_star_p=None if b is None else format_p(b.z),
        warnings="; ".join(notes),
    )
    if res.case_tag is Case.CASE5:
        row.update(res.phi_breakdown)
    return row


def width_record(cfg: RunConfig, N: int, n: int, q, with_sandwich: bool) -> dict:
    """Sweep row for one grid point; skips and failures are recorded, not raised."""
    zq = exponent_z(q)
    reason = None
    if zq > 0.0 and 2 * n > N:
        reason = "n>N/2"
    elif zq == 0.0 and n > N - 1:
        reason = "n>N-1"
    if reason is None:
        try:
            return evaluate_point(cfg, N, n, q, with_sandwich)
        except (InvalidInputError, PreconditionError, UnsupportedRegimeError) as exc:
            case, reason = "error", str(exc)
    else:
        case = "skipped"
    row = dict.fromkeys(WIDTH_COLUMNS)
    row.update(n=n, N=N, q=_q_value(zq), case=case, warnings=reason)
    return row


def _point(task):
    return width_record(*task)


def run_sweep(cfg: RunConfig) -> list[dict]:
    """One record per grid point in (N, n, q) order, independent of worker count."""
    axes = cfg.sweep or SweepAxes()
    Ns = axes.N or (cfg.N,)
    ns = axes.n or (cfg.n,)
    qs = axes.q or (cfg.q,)
    tasks = [(cfg, N, n, q, axes.sandwich) for N, n, q in product(Ns, ns, qs)]
    if axes.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=axes.workers) as pool:
            return list(pool.map(_point, tasks))
    return [_point(t) for t in tasks]


def normalize_records(cfg: RunConfig) -> list[dict]:
    fam = cfg.family()
    normed = normalize_family(fam)
    return [
        {"p": format_p(a.z), "nu": a.nu, "nu_normalized": b.nu, "changed": a.nu != b.nu}
        for a, b in zip(fam.balls, normed.balls)
    ]


def check_records(cfg: RunConfig) -> list[dict]:
    fam = cfg.family()
    bad = {(v.i, v.j) for v in check_condition4(fam)}
    rows = []
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            a, b = fam.balls[i], fam.balls[j]
            rows.append({
                "alpha_p": format_p(a.z),
                "beta_p": format_p(b.z),
                "kappa": kappa_pair(a, b),
                "N": fam.ambient_dim,
                "status": "violation" if (i, j) in bad else "ok",
            })
    return rows


# --- output ---


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "inf" if v == math.inf else "-inf" if v == -math.inf else repr(v)
    return str(v)


def render(records: Sequence[dict], fmt: str, columns: Sequence[str] = WIDTH_COLUMNS) -> str:
    """CSV with a fixed header (floats in shortest round-trip form) or JSON lines."""
    if fmt not in FORMATS:
        raise ConfigError(f"format: expected one of {', '.join(FORMATS)}, got {fmt!r}")
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf)
        writer.writerow(columns)
        for rec in records:
            writer.writerow([_cell(rec.get(c)) for c in columns])
    else:
        for rec in records:
            buf.write(json.dumps({c: rec.get(c) for c in columns}) + "\n")
    return buf.getvalue()


def emit(records: Iterable[dict], fmt: str, path: Optional[str], columns: Sequence[str] = WIDTH_COLUMNS):
    """Write records to ``path`` (stdout when ``None``)."""
    text = render(list(records), fmt, columns)
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# --- argument handling ---


def _bool_arg(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _ball_arg(text: str) -> dict:
    p, sep, nu = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected P:NU, got {text!r}")
    try:
        nu_val = float(nu)
    except ValueError:
        raise argparse.ArgumentTypeError(f"radius must be a number, got {nu!r}") from None
    return {"p": p, "nu": nu_val}


def _exponent_arg(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--output", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=FORMATS, help="output format")
    common.add_argument("--seed", type=int, help="random seed for the subspace search")
    common.add_argument("--auto-normalize", type=_bool_arg, metavar="BOOL", dest="auto_normalize",
                        help="normalize radii before evaluating")
    common.add_argument("--N", type=int, dest="N", help="ambient dimension")
    common.add_argument("--n", type=int, dest="n", help="approximating dimension")
    common.add_argument("--q", type=_exponent_arg, dest="q", help="target exponent (number or inf)")
    common.add_argument("--ball", type=_ball_arg, action="append", dest="balls", metavar="P:NU",
                        help="add a ball (repeatable; replaces the config family)")

    parser = _Parser(prog="ballwidths", description="Order estimates for widths of lp-ball intersections.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "estimate": "order estimate of d_n(M, l_q^N)",
        "normalize": "normalized radii with the same intersection",
        "check": "pairwise kappa values against [1, N]",
        "sandwich": "estimate next to certified bounds",
        "sweep": "estimate over a grid of (N, n, q)",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], argument_default=argparse.SUPPRESS)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    opts = vars(args)
    doc = {}
    if "config" in opts:
        with open(opts["config"], encoding="utf-8") as fh:
            text = fh.read()
        doc = load_document(text)
        if not isinstance(doc, dict):
            raise ConfigError("config: expected an object")
    for key in ("N", "n", "q", "seed", "auto_normalize", "balls"):
        if key in opts:
            doc[key] = opts[key]
    doc["command"] = args.command
    cfg = parse_config(doc)
    output = cfg.output
    if "output" in opts:
        output = replace(output, path=opts["output"])
    if "format" in opts:
        output = replace(output, format=opts["format"])
    cfg = replace(cfg, output=output)
    check_required(cfg)
    return cfg


def run(cfg: RunConfig) -> tuple[list[dict], Sequence[str]]:
    cmd = cfg.command
    if cmd == "normalize":
        return normalize_records(cfg), NORMALIZE_COLUMNS
    if cmd == "check":
        return check_records(cfg), CHECK_COLUMNS
    if cmd == "sweep":
        return run_sweep(cfg), WIDTH_COLUMNS

    return [evaluate_point(cfg, cfg.N, cfg.n, cfg.q, cmd == "sandwich")], WIDTH_COLUMNS


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            args = build_parser().parse_args(argv)
            cfg = load_config(args)
            records, columns = run(cfg)
        emit(records, cfg.output.format, cfg.output.path, columns)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnsupportedRegimeError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
