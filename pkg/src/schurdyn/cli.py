"""Command line interface.

Subcommands: `schur` decomposes and reorders a matrix from a JSON file,
`evolve` runs a single experiment, `figure` runs a shipped preset, `sweep`
varies one parameter over a list of values. Exit codes: 0 success,
1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import DEFAULT
from .errors import ConvergenceError, GridError, NearDegenerateError, ValidationError
from .harness import ExperimentConfig, load_preset, preset_names, run_experiment, run_sweep
from .linalg import schur_decompose
from .orderings import bring_to_front, growth_order


def _parse_matrix_file(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        rows = json.load(fh)

    def entry(x):
        if isinstance(x, (list, tuple)) and len(x) == 2:
            return complex(x[0], x[1])
        return complex(x)

    return np.array([[entry(x) for x in row] for row in rows], dtype=complex)


def _tol_overrides(pairs):
    kwargs = {}
    for item in pairs or []:
        key, _, value = item.partition("=")
        if not value:
            raise ValidationError(f"--tol expects key=value, got {item!r}")
        if not hasattr(DEFAULT, key):
            raise ValidationError(f"unknown tolerance {key!r}")
        current = getattr(DEFAULT, key)
        kwargs[key] = type(current)(float(value)) if not isinstance(current, int) \
            else int(float(value))
    return DEFAULT.with_overrides(**kwargs) if kwargs else DEFAULT


def _print_matrix(label: str, m: np.ndarray, stream):
    print(label, file=stream)
    for row in m:
        print("  " + "  ".join(f"{z.real:+.9e}{z.imag:+.9e}j" for z in row), file=stream)


def _cmd_schur(args) -> int:
    config = _tol_overrides(args.tol)
    h = _parse_matrix_file(args.matrix)
    sd = schur_decompose(h, config=config)
    ordered = growth_order(sd, config)
    if args.front is not None:
        ordered = bring_to_front(ordered, args.front, config)
    _print_matrix("U =", ordered.unitary, sys.stdout)
    _print_matrix("A =", ordered.triangular, sys.stdout)
    print("eigenvalues:", " ".join(f"{z:.9g}" for z in ordered.eigenvalues))
    return 0


def _build_evolve_config(args) -> ExperimentConfig:
    raw = {
        "name": args.name,
        "model": "ep2",
        "c": args.c,
        "timescale": args.timescale,
        "cycles": args.cycles,
        "steps": args.steps,
        "init": args.init,
        "tiers": args.tier,
        "order": args.order,
        "emit": args.format,
    }
    return ExperimentConfig(raw)


def _cmd_evolve(args) -> int:
    config = _tol_overrides(args.tol)
    cfg = _build_evolve_config(args)
    summary = run_experiment(cfg, args.out, config)
    _report_summary(summary)
    return 0


def _cmd_figure(args) -> int:
    config = _tol_overrides(args.tol)
    cfg = load_preset(args.preset)
    summary = run_experiment(cfg, args.out, config)
    _report_summary(summary)
    return 0


def _cmd_sweep(args) -> int:
    config = _tol_overrides(args.tol)
    raw = {
        "name": args.name,
        "model": "ep2",
        "c": args.c,
        "timescale": args.timescale,
        "cycles": args.cycles,
        "steps": args.steps,
        "init": args.init,
        "tiers": args.tier,
        "order": args.order,
        "emit": args.format,
    }
    base = ExperimentConfig(raw)
    values = [float(v) for v in args.values.split(",")]
    param = "timescale" if args.param == "T" else args.param
    summary = run_sweep(base, param, values, args.out, config)
    for member in summary["members"]:
        print(json.dumps(member, sort_keys=True))
    return 0


def _report_summary(summary):
    for tier, info in sorted(summary["tiers"].items()):
        if "error" in info:
            print(f"tier {tier}: ERROR {info['error']}", file=sys.stderr)
        else:
            msg = f"tier {tier}: ok"
            if "max_rel_err_abs_q_a" in info:
                msg += (f"  max|q_a| rel err {info['max_rel_err_abs_q_a']:.3e}"
                        f"  max|q_b| rel err {info['max_rel_err_abs_q_b']:.3e}")
            print(msg)
    for tier, events in sorted(summary.get("transitions", {}).items()):
        for ev in events:
            print(f"tier {tier}: transition at t={ev['t']:.3f} "
                  f"band {ev['from']} -> {ev['to']}")
    print(f"wrote: {', '.join(summary['files'])}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are validation errors: exit 1
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="schurdyn", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("schur", help="decompose and reorder a matrix from a JSON file")
    ps.add_argument("--matrix", required=True, help="JSON file: list of rows, entries [re, im] or real")
    ps.add_argument("--front", type=int, default=None,
                    help="bring eigenvalue of this 1-based growth rank to the front")
    ps.add_argument("--tol", action="append", metavar="KEY=VALUE")
    ps.set_defaults(func=_cmd_schur)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--c", type=float, default=2.0)
    common.add_argument("--T", dest="timescale", type=float, default=50.0)
    common.add_argument("--cycles", type=int, default=1)
    common.add_argument("--init", default="decaying", choices=["decaying", "amplifying"])
    common.add_argument("--steps", type=int, default=4096)
    common.add_argument("--order", type=int, default=DEFAULT.riccati_order,
                        help="hierarchy depth for the full tier")
    common.add_argument("--format", default="csv", choices=["csv", "json"])
    common.add_argument("--out", default="results")
    common.add_argument("--tol", action="append", metavar="KEY=VALUE")

    pe = sub.add_parser("evolve", parents=[common], help="run one experiment")
    pe.add_argument("--tier", action="append", default=None,
                    choices=["exact", "leading", "subleading", "full"])
    pe.add_argument("--name", default="run")
    pe.set_defaults(func=_cmd_evolve)

    pf = sub.add_parser("figure", help="run a shipped preset")
    pf.add_argument("preset", choices=["fig1", "fig2", "fig3", "fig4"])
    pf.add_argument("--out", default="results")
    pf.add_argument("--tol", action="append", metavar="KEY=VALUE")
    pf.set_defaults(func=_cmd_figure)

    pw = sub.add_parser("sweep", parents=[common], help="vary one parameter")
    pw.add_argument("--param", required=True, choices=["T", "timescale", "c"])
    pw.add_argument("--values", required=True, help="comma-separated values")
    pw.add_argument("--tier", action="append", default=None,
                    choices=["exact", "leading", "subleading", "full"])
    pw.add_argument("--name", default="sweep")
    pw.set_defaults(func=_cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tier", None) is None and args.command in ("evolve", "sweep"):
        args.tier = ["subleading"]
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NearDegenerateError, ConvergenceError, GridError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
