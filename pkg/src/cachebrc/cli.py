"""Command-line front end.

Subcommands ``bounds``, ``sweep``, ``regions``, ``schedule`` and
``simulate`` emit CSV (``#``-prefixed header lines, ``,`` delimiter) or a
single JSON object with ``schema``, ``inputs`` and ``outputs``.  Every
rational is written exactly, with a float shadow beside it.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 output could not be written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import __version__
from .bounds import man_ndt, ndt_one_shot, optimality_report
from .core import ConfigError, NetworkConfig, NonCornerError, as_corner, as_rational, validate
from .linksim import DEFAULT_SNRS, Quantity, estimate_exponents
from .regions import Region, region_map, region_ndt
from .scheduler import build_schedule, serialize_schedule, verify_schedule

SCHEMA = 1
EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3

SLOPE_TOLERANCE = {
    Quantity.DESIRED_SIGNAL: 0.05,
    Quantity.RESIDUAL_INTERFERENCE: 0.1,
    Quantity.COMMON_RATE: 0.1,
    Quantity.PRIVATE_RATE: 0.1,
}


class UsageError(Exception):
    pass


def _float_text(x: Fraction) -> str:
    return repr(float(x))


def rational_json(x: Fraction) -> Dict[str, object]:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "float": float(x)}


def _rational_arg(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _grid_step(text: str) -> Fraction:
    step = _rational_arg(text)
    if step <= 0 or step > 1 or (1 / step).denominator != 1:
        raise argparse.ArgumentTypeError(
            f"grid step {text} must be 1/n for a positive integer n"
        )
    return step


def _snr_list(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if len(values) < 3:
        raise argparse.ArgumentTypeError("need at least three SNR points")
    if any(v <= 1 for v in values) or any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("SNR points must exceed 1 and increase")
    return values


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cachebrc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, mu=True, alpha=True, fmt="csv", formats=("csv", "json")):
        p.add_argument("--K", type=_positive_int, default=2, help="number of UEs")
        p.add_argument("--M", type=_positive_int, default=4, help="number of relays")
        p.add_argument("--N", type=_positive_int, default=None, help="library size (default K+M)")
        if mu:
            p.add_argument("--mu", type=_rational_arg, default=Fraction(1, 2),
                           help="fractional cache size, p/q or decimal")
        if alpha:
            p.add_argument("--alpha", type=_rational_arg, default=Fraction(1),
                           help="CSI quality exponent, p/q or decimal")
        p.add_argument("--format", choices=formats, default=fmt)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=0)

    common(sub.add_parser("bounds", help="lower bound, one-shot NDT, envelope and gap"))
    p = sub.add_parser("sweep", help="corner points and envelope samples over mu")
    common(p, mu=False)
    p.add_argument("--mu-grid", type=_grid_step, default=None,
                   help="also sample the envelope on this mu step")
    p = sub.add_parser("regions", help="region map over (mu, M) for fixed K")
    p.add_argument("--K", type=_positive_int, default=2, help="number of UEs")
    p.add_argument("--mu-step", type=_grid_step, default=Fraction(1, 100), help="mu grid step, must be 1/n")
    p.add_argument("--m-max", type=_positive_int, default=20, help="largest relay count M")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--seed", type=int, default=0)
    common(sub.add_parser("schedule", help="build and verify the one-shot schedule"),
           fmt="text", formats=("text", "json"))
    p = sub.add_parser("simulate", help="Monte-Carlo power-exponent estimates")
    common(p, fmt="json")
    p.add_argument("--snr", type=_snr_list, default=list(DEFAULT_SNRS),
                   help="comma-separated increasing powers, e.g. 1e4,1e6,1e8")
    p.add_argument("--trials", type=_positive_int, default=10_000, help="Monte Carlo trials per power")
    return parser


def _config(args, corner: bool = False) -> NetworkConfig:
    N = args.N if args.N is not None else args.K + args.M
    cfg = NetworkConfig(args.K, args.M, getattr(args, "mu", Fraction(0)),
                        getattr(args, "alpha", Fraction(1)), N)
    validate(cfg)
    return as_corner(cfg) if corner else cfg


def _inputs(cfg: NetworkConfig, **extra) -> Dict[str, object]:
    out: Dict[str, object] = {
        "K": cfg.K, "M": cfg.M, "N": cfg.N,
        "mu": rational_json(cfg.mu), "alpha": rational_json(cfg.alpha),
    }
    out.update(extra)
    return out


def _json_doc(command: str, inputs, outputs, fields, seed) -> str:
    doc = {
        "schema": SCHEMA,
        "command": command,
        "metadata": {"tool": "cachebrc", "version": __version__, "seed": seed},
        "fields": fields,
        "inputs": inputs,
        "outputs": outputs,
    }
    return json.dumps(doc, indent=2) + "\n"


def _csv_doc(command: str, inputs: Dict[str, str], fields: Dict[str, str],
             rows: Iterable[Sequence[object]], seed, notes: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n")
    buf.write(f"# tool: cachebrc {__version__}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# seed: {seed}\n")
    buf.write("# inputs: " + " ".join(f"{k}={v}" for k, v in inputs.items()) + "\n")
    for name, doc in fields.items():
        buf.write(f"# field {name}: {doc}\n")
    for note in notes:
        buf.write(f"# {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(fields))
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _rat_cells(x: Optional[Fraction]) -> List[str]:
    if x is None:
        return ["", ""]
    return [str(x), _float_text(x)]


def cmd_bounds(args) -> Tuple[str, int]:
    cfg = _config(args)
    report = optimality_report(cfg)
    w = report.witness
    breakdown = ndt_one_shot(cfg) if cfg.is_corner else None
    values: List[Tuple[str, object, str]] = [
        ("lower", report.lower, "best lower bound on the optimal NDT"),
        ("lower_cutset", w.value, "cut-set bound maximized over (ell, s), floored at 1"),
        ("witness_ell", w.argmax_ell, "maximizing ell"),
        ("witness_s", w.argmax_s, "maximizing s"),
        ("floor_active", w.floor_active, "true when the constant 1 dominates the cut-set terms"),
        ("lower_derived_at_alpha", w.derived_at_alpha, "CSI quality the cut-set bound is derived for"),
    ]
    if report.full_cache_bound is not None:
        values.append(("lower_full_cache", report.full_cache_bound,
                       "MISO broadcast bound at mu=1 (as published, max{K-1,M})"))
    values.append(("delta_man", man_ndt(cfg.mu, cfg.M), "coded multicasting NDT M(1-mu)/(1+mu M)"))
    if breakdown is not None:
        values += [
            ("delta_os", breakdown.value, "one-shot NDT at this corner"),
            ("delta_os_interference", breakdown.interference_term, "interference-phase term"),
            ("limiting_channel", breakdown.limiting_channel.value, "branch attaining the max"),
        ]
    values += [
        ("upper", report.upper, "lower convex envelope of the one-shot corner points"),
        ("gap", report.gap, "upper - lower"),
        ("optimal", report.optimal, "true iff gap == 0"),
    ]
    if args.format == "json":
        outputs = {}
        for name, value, _ in values:
            outputs[name] = rational_json(value) if isinstance(value, Fraction) else value
        fields = {name: doc for name, _, doc in values}
        return _json_doc("bounds", _inputs(cfg), outputs, fields, args.seed), EXIT_OK
    rows = []
    for name, value, _ in values:
        if isinstance(value, Fraction):
            rows.append([name, str(value), _float_text(value)])
        elif isinstance(value, bool):
            rows.append([name, str(value).lower(), ""])
        else:
            rows.append([name, str(value), ""])
    fields = {
        "quantity": "name of the reported quantity (see quantity lines)",
        "value": "exact value (p/q for rationals)",
        "value_float": "float shadow of rational values",
    }
    notes = [f"quantity {n}: {d}" for n, _, d in values]
    inputs = {"K": cfg.K, "M": cfg.M, "N": cfg.N, "mu": cfg.mu, "alpha": cfg.alpha}
    return _csv_doc("bounds", inputs, fields, rows, args.seed, notes), EXIT_OK


def cmd_sweep(args) -> Tuple[str, int]:
    cfg = _config(argparse.Namespace(**{**vars(args), "mu": Fraction(0)}))
    K, M, alpha = cfg.K, cfg.M, cfg.alpha
    records = []
    for c in range(M + 1):
        mu = Fraction(c, M)
        point = cfg.with_(mu=mu)
        rep = optimality_report(point)
        records.append(("corner", mu, ndt_one_shot(point).value, rep.upper, rep.lower, rep.gap))
    if args.mu_grid is not None:
        n = int(1 / args.mu_grid)
        for i in range(n + 1):
            mu = args.mu_grid * i
            rep = optimality_report(cfg.with_(mu=mu))
            records.append(("envelope", mu, None, rep.upper, rep.lower, rep.gap))
    fields = {
        "kind": "corner (one-shot point) or envelope (memory-sharing sample)",
        "mu": "fractional cache size", "mu_float": "float shadow",
        "delta_os": "one-shot NDT (corner rows only)", "delta_os_float": "float shadow",
        "upper": "achievable NDT (lower convex envelope)", "upper_float": "float shadow",
        "lower": "best lower bound", "lower_float": "float shadow",
        "gap": "upper - lower", "gap_float": "float shadow",
    }
    if args.format == "json":
        rows = [
            {
                "kind": kind, "mu": rational_json(mu),
                "delta_os": rational_json(d) if d is not None else None,
                "upper": rational_json(u), "lower": rational_json(lo), "gap": rational_json(g),
            }
            for kind, mu, d, u, lo, g in records
        ]
        return _json_doc("sweep", _inputs(cfg), {"rows": rows}, fields, args.seed), EXIT_OK
    rows = [
        [kind] + _rat_cells(mu) + _rat_cells(d) + _rat_cells(u) + _rat_cells(lo) + _rat_cells(g)
        for kind, mu, d, u, lo, g in records
    ]
    inputs = {"K": K, "M": M, "N": cfg.N, "alpha": alpha, "mu_grid": args.mu_grid}
    return _csv_doc("sweep", inputs, fields, rows, args.seed), EXIT_OK


def cmd_regions(args) -> Tuple[str, int]:
    rmap = region_map(args.K, args.mu_step, args.m_max)
    fields = {
        "mu": "fractional cache size (exact); boundary rows: grid mu",
        "M": "number of relays; boundary rows: float abscissa of the curve",
        "region": "A-E or Unclassified; boundary rows: curve name "
                  "(standalone_frontier mu*M=K, ab_border M=1/(1-2mu), "
                  "ed_border K=mu*M*delta_man)",
        "ndt_numerator": "achievable NDT of the region (empty if none)",
        "ndt_denominator": "denominator of the region NDT", "ndt_float": "float shadow",
    }
    cells = []
    for i, mu in enumerate(rmap.mu_grid):
        for j, M in enumerate(rmap.m_values):
            label = rmap.cells[i][j]
            if label.label is Region.UNCLASSIFIED:
                cells.append((mu, M, label.label.value, None))
            else:
                ndt = region_ndt(label, NetworkConfig(args.K, M, mu, 1))
                cells.append((mu, M, label.label.value, ndt))
    if args.format == "json":
        outputs = {
            "cells": [
                {"mu": rational_json(mu), "M": M, "region": r,
                 "ndt": rational_json(n) if n is not None else None}
                for mu, M, r, n in cells
            ],
            "curves": {
                name: [{"mu": rational_json(mu), "M": m} for mu, m in pts]
                for name, pts in rmap.curves.items()
            },
        }
        inputs = {"K": args.K, "mu_step": rational_json(args.mu_step), "m_max": args.m_max}
        return _json_doc("regions", inputs, outputs, fields, args.seed), EXIT_OK
    rows = []
    for mu, M, region, ndt in cells:
        if ndt is None:
            rows.append([str(mu), M, region, "", "", ""])
        else:
            rows.append([str(mu), M, region, ndt.numerator, ndt.denominator, _float_text(ndt)])
    for name, pts in rmap.curves.items():
        for mu, m in pts:
            rows.append([str(mu), repr(m), name, "", "", ""])
    inputs = {"K": args.K, "mu_step": args.mu_step, "m_max": args.m_max}
    return _csv_doc("regions", inputs, fields, rows, args.seed), EXIT_OK


def cmd_schedule(args) -> Tuple[str, int]:
    cfg = _config(args, corner=True)
    schedule = build_schedule(cfg)
    report = verify_schedule(schedule, cfg)
    code = EXIT_OK if report.ok else EXIT_VERIFY
    checks = {
        "rn_complete": report.rn_complete,
        "zf_feasible": report.zf_feasible,
        "ue_complete": report.ue_complete,
        "phase2_consistent": report.phase2_consistent,
        "cache_ratio_ok": report.cache_ratio_ok,
    }
    if args.format == "json":
        outputs = {
            "schedule": serialize_schedule(schedule).splitlines(),
            "report": {
                "T1": report.T1, "T2": rational_json(report.T2),
                "symbols_per_file": schedule.symbols_per_file,
                "ndt": rational_json(report.ndt),
                "cache_ratio": rational_json(report.cache_ratio),
                "ue_dof": {f"UE{k}": rational_json(v) for k, v in report.ue_dof.items()},
                "checks": checks, "ok": report.ok, "violations": report.violations,
            },
        }
        fields = {"schedule": "line-oriented schedule dump", "report": "independent recount"}
        return _json_doc("schedule", _inputs(cfg), outputs, fields, args.seed), code
    lines = [serialize_schedule(schedule).rstrip("\n")]
    lines.append(
        f"# report T1={report.T1} T2={report.T2} L'={schedule.symbols_per_file} "
        f"ndt={report.ndt} cache_ratio={report.cache_ratio}"
    )
    lines.append("# checks " + " ".join(f"{k}={str(v).lower()}" for k, v in checks.items()))
    for v in report.violations:
        lines.append(f"# violation {v}")
    lines.append("# status " + ("pass" if report.ok else "FAIL"))
    return "\n".join(lines) + "\n", code


def cmd_simulate(args) -> Tuple[str, int]:
    cfg = _config(args, corner=True)
    try:
        estimates = estimate_exponents(cfg.K, cfg.M, cfg.mu, cfg.alpha, args.snr,
                                       args.trials, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    results = []
    for e in estimates:
        tol = SLOPE_TOLERANCE[e.quantity]
        results.append((e, tol, e.within(tol)))
    code = EXIT_OK if all(ok for _, _, ok in results) else EXIT_VERIFY
    fields = {
        "quantity": "tracked power or rate",
        "slope": "least-squares slope (log-power vs log10 P, or rate vs log2 P)",
        "stderr": "standard error of the slope",
        "expected": "high-SNR exponent predicted by the scheme",
        "tolerance": "declared acceptance tolerance",
        "pass": "abs(slope - expected) <= tolerance",
        "trials": "Monte-Carlo trials per power level",
    }
    if args.format == "json":
        outputs = {
            "estimates": [
                {"quantity": e.quantity.value, "slope": e.slope, "stderr": e.stderr,
                 "expected": e.expected, "tolerance": tol, "pass": ok, "trials": e.trials,
                 "means": list(e.means), "note": e.note}
                for e, tol, ok in results
            ],
            "pass": code == EXIT_OK,
        }
        inputs = _inputs(cfg, snr=list(args.snr), trials=args.trials)
        return _json_doc("simulate", inputs, outputs, fields, args.seed), code
    rows = [
        [e.quantity.value, repr(e.slope), repr(e.stderr), repr(e.expected), repr(tol),
         str(ok).lower(), e.trials]
        for e, tol, ok in results
    ]
    inputs = {"K": cfg.K, "M": cfg.M, "mu": cfg.mu, "alpha": cfg.alpha,
              "snr": ",".join(map(repr, args.snr)), "trials": args.trials}
    return _csv_doc("simulate", inputs, fields, rows, args.seed), code


COMMANDS = {
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "regions": cmd_regions,
    "schedule": cmd_schedule,
    "simulate": cmd_simulate,
}


def run(argv: Optional[Sequence[str]] = None) -> Tuple[str, int]:
    """Parse ``argv`` and return ``(text, exit_code)`` without writing anything."""
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = COMMANDS[args.command](args)
    except NonCornerError as exc:
        print(f"cachebrc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, UsageError) as exc:
        print(f"cachebrc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"cachebrc {args.command}: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
