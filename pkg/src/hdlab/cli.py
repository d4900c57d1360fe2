"""Command-line interface.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad input.
``HDLAB_SEED`` sets the default seed; ``--seed`` wins.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

import numpy as np

from . import dilation as dl
from . import hypercube as hc
from . import serialize as ser
from .config import DEFAULT_GROUPS, DEFAULT_SEED, RunConfig
from .groupalg import FiniteAbelianGroup
from .verify import (
    PROPOSITIONS, InfeasibleConfig, VerificationReport, random_suite, run_proposition,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SAMPLE_KINDS = ("dh-state", "dd-state", "cp-map", "dh-map")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {n}")
    return n


def _nonneg_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (x >= 0 and np.isfinite(x)):
        raise argparse.ArgumentTypeError(f"must be a finite nonnegative number: {text}")
    return x


def _default_seed() -> int:
    raw = os.environ.get("HDLAB_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"HDLAB_SEED is not an integer: {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hdlab", description="Density hypercube verification toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="run proposition check batteries")
    c.add_argument("--prop", required=True,
                   help=f"one of {', '.join(PROPOSITIONS)} or 'all'")
    c.add_argument("--group", action="append",
                   help="group spec such as Z3 or Z2xZ2 (repeatable)")
    c.add_argument("--dim", action="append", type=_positive_int,
                   help="dimension d, meaning the group Zd (repeatable)")
    c.add_argument("--trials", type=_positive_int, default=200)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--tol", type=_nonneg_float, default=1e-9)
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--timings", action="store_true",
                   help="include elapsed times (output is no longer reproducible)")

    d = sub.add_parser("denote", help="denote a realization file as a tensor file")
    d.add_argument("--in", dest="src", required=True)
    d.add_argument("--out", required=True)

    s = sub.add_parser("sample", help="write a seeded random object")
    s.add_argument("--kind", required=True, choices=SAMPLE_KINDS)
    s.add_argument("--dim", required=True, type=int)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", required=True)

    demo = sub.add_parser("demo", help="worked examples")
    dsub = demo.add_subparsers(dest="demo", required=True, parser_class=_Parser)
    povm = dsub.add_parser("povm", help="outcome probabilities of a DH state")
    povm.add_argument("--state", required=True)
    return p


def config_from_args(args) -> RunConfig:
    groups = list(args.group or [])
    for spec in groups:
        FiniteAbelianGroup.parse(spec)
    dims = list(args.dim or [])
    if groups and dims:
        orders = sorted({FiniteAbelianGroup.parse(g).order for g in groups})
        if orders != sorted(set(dims)):
            raise ValueError(f"--dim {dims} does not match the orders of --group {groups}")
    elif dims:
        groups = [f"Z{d}" for d in dims]
    props = PROPOSITIONS if args.prop == "all" else (args.prop,)
    if args.prop != "all" and args.prop not in PROPOSITIONS:
        raise ValueError(f"unknown proposition {args.prop!r}")
    seed = _default_seed() if args.seed is None else args.seed
    return RunConfig(tuple(groups) or DEFAULT_GROUPS, args.trials, seed, args.tol,
                     tuple(props), args.format)


def render_text(reports: list[VerificationReport], skipped: dict[str, str],
                timings: bool = False) -> str:
    f = ser.format_float
    lines = []
    for rep in reports:
        head = (f"[{'PASS' if rep.passed else 'FAIL'}] prop {rep.proposition} "
                f"({rep.theory}; groups {','.join(rep.groups)}; trials {rep.trials}; "
                f"seed {rep.seed}; tol {f(rep.tolerance)}) "
                f"max_violation={f(rep.max_violation)}")
        if timings and rep.elapsed is not None:
            head += f" elapsed={f(rep.elapsed)}"
        lines.append(head)
        for c in rep.checks:
            rel = ">=" if c.kind == "exclusion" else "<="
            lines.append(f"  {'ok  ' if c.passed else 'FAIL'} {c.name}: "
                         f"{f(c.value)} {rel} {f(c.threshold)}")
        for name, v in rep.fitted_scalars.items():
            lines.append(f"  scalar {name}: {f(v)}")
        for name, v in rep.statistics.items():
            lines.append(f"  stat {name}: {f(v)}")
    for prop, why in skipped.items():
        lines.append(f"[SKIP] prop {prop}: {why}")
    overall = all(r.passed for r in reports)
    lines.append(f"overall: {'PASS' if overall else 'FAIL'}")
    return "\n".join(lines) + "\n"


def cmd_check(args, out) -> int:
    try:
        cfg = config_from_args(args)
    except ValueError as err:
        raise UsageError(str(err)) from None
    reports, skipped = [], {}
    for prop in cfg.propositions:
        try:
            reports.append(run_proposition(prop, cfg))
        except InfeasibleConfig as err:
            if len(cfg.propositions) == 1:
                raise UsageError(f"proposition {prop}: {err}") from None
            skipped[prop] = str(err)
    if cfg.output_format == "json":
        out.write(ser.dumps(ser.report_set_to_doc(reports, skipped, args.timings)))
    else:
        out.write(render_text(reports, skipped, args.timings))
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def _read(path):
    try:
        return ser.read_file(path)
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None
    except ser.DocumentError as err:
        raise UsageError(f"{path}: {err}") from None


def _write(path, value) -> None:
    try:
        ser.write_file(path, value)
    except OSError as err:
        raise UsageError(f"cannot write {path}: {err.strerror}") from None


def cmd_denote(args, out) -> int:
    value = _read(args.src)
    if isinstance(value, hc.DHRealization):
        tensor = hc.dh_denote(value).tensor
    elif isinstance(value, dl.DMRealization):
        tensor = dl.dm_denote(value)
    elif isinstance(value, dl.DDRealization):
        tensor = dl.dd_denote(value)
    else:
        raise UsageError(f"{args.src}: expected a dh-, dd- or dm-realization document")
    _write(args.out, tensor)
    return EXIT_PASS


def cmd_sample(args, out) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    try:
        value = random_suite(args.kind, args.dim, seed)
    except ValueError as err:
        raise UsageError(str(err)) from None
    _write(args.out, value)
    return EXIT_PASS


def cmd_demo_povm(args, out) -> int:
    state = _read(args.state)
    if not isinstance(state, np.ndarray) or state.ndim != 4 or len(set(state.shape)) != 1:
        raise UsageError(f"{args.state}: expected a rank-4 DH state tensor")
    probs = hc.outcome_probabilities(state)
    out.write(" ".join(f"P({name})={p:.12g}" for name, p in probs) + "\n")
    return EXIT_PASS


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "check":
            return cmd_check(args, out)
        if args.command == "denote":
            return cmd_denote(args, out)
        if args.command == "sample":
            return cmd_sample(args, out)
        return cmd_demo_povm(args, out)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
