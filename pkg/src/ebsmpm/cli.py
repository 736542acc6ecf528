"""Command-line interface.

Subcommands::

    run <scenario-file> --out DIR [--steps N] [--dh X] [--basis obs|ebs]
                        [--cc X] [--snapshot-every N]
    bench <preset> [key=value ...] --out DIR
    list-presets
    dump-oracle <name> --out DIR
    dump-basis <scenario-file> --out DIR [--field N]

Exit status is 0 on success, 1 on any diagnostic error, and for ``bench``
also 1 when a benchmark metric fails.
"""

from __future__ import annotations

import argparse
import ast
import inspect
import os
import sys

import numpy as np

from . import oracles
from .benchmarks import BENCH_RUNNERS
from .errors import EngineError
from .report import RunWriter, emit_report, write_basis_dump
from .scenario import PRESETS, parse_scenario, preset_scenario


def _add_run_overrides(p):
    p.add_argument("--steps", type=int, default=None, help="override step count")
    p.add_argument("--dh", type=float, default=None, help="override grid spacing")
    p.add_argument("--basis", choices=("obs", "ebs"), default=None)
    p.add_argument("--cc", type=float, default=None, help="occupation parameter")
    p.add_argument("--snapshot-every", type=int, default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="ebsmpm",
                                     description="Extended B-spline MPM contact engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", required=True)
    _add_run_overrides(p_run)

    p_bench = sub.add_parser("bench", help="run a named benchmark preset")
    p_bench.add_argument("preset")
    p_bench.add_argument("overrides", nargs="*", metavar="key=value")
    p_bench.add_argument("--out", required=True)

    sub.add_parser("list-presets", help="list benchmark presets")

    p_oracle = sub.add_parser("dump-oracle", help="emit a reference curve as CSV")
    p_oracle.add_argument("name", choices=("bar_stress", "impact_wave",
                                           "hertz_disks", "hertz_halfplane",
                                           "fringe"))
    p_oracle.add_argument("--out", required=True)

    p_basis = sub.add_parser("dump-basis", help="dump basis classification as CSV")
    p_basis.add_argument("scenario")
    p_basis.add_argument("--out", required=True)
    p_basis.add_argument("--field", type=int, default=0)
    _add_run_overrides(p_basis)
    return parser


def _load_scenario(args):
    with open(args.scenario, "r", encoding="utf-8") as fh:
        scn = parse_scenario(fh.read())
    scn = scn.with_overrides(steps=args.steps, dh=args.dh, basis=args.basis,
                             cc=args.cc, snapshot_every=args.snapshot_every)
    for w in scn.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return scn


def _cmd_run(args):
    scn = _load_scenario(args)
    out = scn.doc.get("output", {})
    writer = RunWriter(args.out,
                       snapshot_every=out.get("snapshot_every", 0),
                       contact_log=bool(out.get("contact_log", False)))
    engine = scn.build()
    engine.run(writer=writer)
    print(f"completed {engine.step_index} steps; outputs in {args.out}")
    return 0


def _parse_overrides(pairs, func):
    sig = inspect.signature(func)
    known = set(sig.parameters)
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise EngineError(f"override {pair!r} is not key=value")
        key, raw = pair.split("=", 1)
        if key not in known and "overrides" not in known:
            raise EngineError(f"unknown override {key!r}; preset accepts "
                              + ", ".join(sorted(k for k in known if k != "overrides")))
        try:
            out[key] = ast.literal_eval(raw)
        except (ValueError, SyntaxError):
            out[key] = raw
    return out


def _cmd_bench(args):
    if args.preset not in BENCH_RUNNERS:
        raise EngineError(f"unknown preset {args.preset!r}; see list-presets")
    runner = BENCH_RUNNERS[args.preset]
    overrides = _parse_overrides(args.overrides, PRESETS[args.preset])
    metrics, data = runner(**overrides)
    engine = data.get("engine")
    if engine is not None:
        writer = RunWriter(args.out, snapshot_every=None)
        os.makedirs(args.out, exist_ok=True)
        writer.write_timeseries(engine)
    ok = emit_report(args.out, args.preset, metrics)
    with open(os.path.join(args.out, "report.txt"), "r", encoding="utf-8") as fh:
        print(fh.read(), end="")
    return 0 if ok else 1


def _cmd_list_presets(_args):
    for name in sorted(PRESETS):
        func = PRESETS[name]
        params = ", ".join(f"{k}={v.default!r}" if v.default is not inspect.Parameter.empty
                           else k for k, v in inspect.signature(func).parameters.items())
        print(f"{name}({params})")
    return 0


def _cmd_dump_oracle(args):
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"oracle_{args.name}.csv")
    with open(path, "w", encoding="utf-8") as fh:
        if args.name == "bar_stress":
            fh.write("x_m,sigma_pa\n")
            x = np.linspace(0.0, 0.6, 241)
            for xi, si in zip(x, oracles.bar_stress(x, 0.6, 2783.0, -9.81, 1.0, 50.5e9)):
                fh.write(f"{xi:.17g},{si:.17g}\n")
        elif args.name == "impact_wave":
            c0 = np.sqrt(50.5e9 / 2783.0)
            fh.write("t_s,x_m,velocity_mps,sigma_pa\n")
            x = np.linspace(-0.2, 0.4, 601)
            for k in range(1, 6):
                t = k * 0.2 / c0
                v, s = oracles.impact_wave_solution(x, t * 0.999999, 0.2, 0.4,
                                                    1.0, c0, 2783.0)
                for xi, vi, si in zip(x, v, s):
                    fh.write(f"{t:.17g},{xi:.17g},{vi:.17g},{si:.17g}\n")
        elif args.name == "hertz_disks":
            fh.write("force_n,half_width_m\n")
            for f in np.linspace(1e5, 6e7, 200):
                a = oracles.hertz_disks_contact_halfwidth(
                    f, 0.01, 0.01, 9.453e10, 0.07, 9.453e10, 0.07, 1.0)
                fh.write(f"{f:.17g},{a:.17g}\n")
        elif args.name == "hertz_halfplane":
            b = oracles.hertz_halfplane_halfwidth(1.567e5, 0.002, 1.0e10, 0.0)
            fh.write("s_m,sigma_yy_pa\n")
            s = np.linspace(-b, b, 201)
            for si, pi in zip(s, oracles.hertz_halfplane_pressure(
                    s, 1.567e5, 0.002, 1.0e10, 0.0)):
                fh.write(f"{si:.17g},{pi:.17g}\n")
        else:
            fh.write("principal_diff_pa,fringe\n")
            d = np.linspace(0.0, 0.2e9, 401)
            stress = np.stack([d, np.zeros_like(d), np.zeros_like(d)], axis=1)
            for di, fi in zip(d, oracles.fringe_field(stress)):
                fh.write(f"{di:.17g},{fi:.17g}\n")
    print(f"wrote {path}")
    return 0


def _cmd_dump_basis(args):
    scn = _load_scenario(args)
    engine = scn.build()
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "basis_dump.csv")
    write_basis_dump(path, engine, field_index=args.field)
    print(f"wrote {path}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "bench": _cmd_bench,
    "list-presets": _cmd_list_presets,
    "dump-oracle": _cmd_dump_oracle,
    "dump-basis": _cmd_dump_basis,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
