"""Command-line entry point ``sidecomp``.

Single results go to stdout as JSON, swept grids as CSV with a header row,
and diagnostics to stderr. Exit codes: 0 on success, 1 on a computation
error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import codec, correlation, mi_oracle, netcomp, redundancy, reproduce
from .redundancy import RedundancyQuery, Strategy
from .source_models import SourceClass, SourceKind, log_fisher_integral

log = logging.getLogger("sidecomp")

INF = math.inf
_SUFFIXES = {"": 1, "k": 1024, "kb": 1024, "m": 1024**2, "mb": 1024**2, "g": 1024**3, "gb": 1024**3}
_QUANTITY = re.compile(r"^\s*([0-9.eE+-]+)\s*([a-zA-Z]*)\s*$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_quantity(text) -> float:
    """Parse ``inf``, plain numbers and binary-size suffixes such as ``32kB`` or ``8MB``."""
    s = str(text).strip()
    if s.lower() in ("inf", "infinity", "∞"):
        return INF
    match = _QUANTITY.match(s)
    if not match or match.group(2).lower() not in _SUFFIXES:
        raise argparse.ArgumentTypeError(f"cannot parse quantity {text!r}")
    try:
        value = float(match.group(1)) * _SUFFIXES[match.group(2).lower()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse quantity {text!r}") from None
    if math.isnan(value):
        raise argparse.ArgumentTypeError("NaN is not a valid quantity")
    return int(value) if value.is_integer() and abs(value) < 2**63 else value


@dataclass
class SweepSpec:
    variable: str
    start: float
    stop: float
    step: float
    geometric: bool
    fixed: dict = field(default_factory=dict)

    def grid(self) -> list:
        out, v = [], self.start
        while v <= self.stop * (1 + 1e-12):
            out.append(v)
            v = v * self.step if self.geometric else v + self.step
        return out


def parse_sweep(text: str) -> SweepSpec:
    """``var=start:stop:xF`` (geometric) or ``var=start:stop:S`` (additive, ``+S`` also accepted)."""
    try:
        var, rng = text.split("=", 1)
        start, stop, step = rng.split(":")
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep {text!r}; expected var=start:stop:step") from None
    var = var.strip().replace("-", "_")
    start, stop = parse_quantity(start), parse_quantity(stop)
    step = step.strip()
    geometric = step[:1].lower() == "x"
    step_value = parse_quantity(step[1:] if geometric or step.startswith("+") else step)
    if not (math.isfinite(start) and math.isfinite(stop)) or stop < start:
        raise argparse.ArgumentTypeError("sweep needs finite bounds with stop >= start")
    if (geometric and step_value <= 1) or (not geometric and step_value <= 0) or start <= 0 and geometric:
        raise argparse.ArgumentTypeError("sweep step must strictly advance the grid")
    return SweepSpec(var, start, stop, step_value, geometric)


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, default=_json_default) + "\n")


def _json_default(o):
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not serializable: {type(o)}")


def _fmt(v):
    if isinstance(v, float):
        return "inf" if v == INF else repr(v)
    return "" if v is None else str(v)


def _emit_csv(rows: list[dict]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0]))
    for row in rows:
        writer.writerow([_fmt(v) for v in row.values()])
    sys.stdout.write(buf.getvalue())


def _json_safe(obj):
    # JSON has no infinity; emit it as the string "inf".
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else "-inf" if obj < 0 else "nan"
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _source_class(args) -> SourceClass:
    return SourceClass(SourceKind(args.source_class), args.k)


def _query(args, **over) -> RedundancyQuery:
    params = {"n": args.n, "m": args.m, "t": args.t, "entropy_rate": args.entropy_rate}
    params.update(over)
    return RedundancyQuery.for_source(_source_class(args), d_override=args.d, clamp=args.clamp,
                                      **params)


def _sweep_rows(args, row_fn) -> list[dict]:
    spec = args.sweep
    rows = []
    for v in spec.grid():
        if not hasattr(args, spec.variable):
            raise UsageError(f"cannot sweep unknown variable {spec.variable!r}")
        sub = argparse.Namespace(**{**vars(args), spec.variable: v})
        rows.append({spec.variable: v, **row_fn(sub)})
    return rows


def _run(args, row_fn):
    if args.sweep is not None:
        _emit_csv(_sweep_rows(args, row_fn))
    else:
        _emit_json(_json_safe(row_fn(args)))


def _redundancy_row(args) -> dict:
    q = _query(args)
    out = {"n": q.n, "m": q.m, "t": q.t, "d": q.d, "log_c": q.log_c, "entropy_n": q.entropy_n}
    out.update(redundancy.report(q).to_dict())
    if args.eps is not None:
        bound = redundancy.almost_lossless_lower_bound(out["maximin_bits"], q.entropy_n, args.eps)
        out["almost_lossless_bound_bits"] = bound.floored
        out["almost_lossless_bound_raw_bits"] = bound.raw
    return out


def _gain_row(args) -> dict:
    q = _query(args)
    rep = redundancy.report(q)
    return {"n": q.n, "m": q.m, "t": q.t, "d": q.d, "strategy": Strategy(args.strategy).value,
            "gain": redundancy.strategy_gain(args.strategy, q), "gain_limit": rep.gain_limit,
            "m_star": rep.m_star, "maximin_bits": rep.maximin_bits,
            "side_info_redundancy_bits": rep.side_info_redundancy_bits, "clamped": rep.clamped}


def _d_for(args) -> int:
    return _source_class(args).dimension if args.d is None else args.d


def _mem_size_row(args) -> dict:
    d = _d_for(args)
    ent = args.entropy_rate * args.n
    m_delta = redundancy.memory_threshold(args.n, d, ent, args.delta)
    return {"n": args.n, "d": d, "entropy_rate": args.entropy_rate, "delta": args.delta,
            "m_delta": m_delta, "m_delta_megabytes": m_delta / 1e6}


def _one2one_row(args) -> dict:
    d = _d_for(args)
    log_c = log_fisher_integral(_source_class(args))
    ent = args.entropy_rate * args.n
    pf = redundancy.maximin_redundancy(args.n, d, log_c, clamp=args.clamp)
    o2o = redundancy.one_to_one_lower_bound(args.n, d, log_c)
    pf_rate = redundancy.normalized_rate(ent, pf)
    o2o_rate = redundancy.normalized_rate(ent, o2o)
    return {"n": args.n, "d": d, "prefix_free_bits": pf, "one_to_one_bits": o2o,
            "prefix_free_rate": pf_rate, "one_to_one_rate": o2o_rate,
            "relative_difference": abs(pf_rate - o2o_rate) / pf_rate}


def _cmd_simulate_correlation(args) -> None:
    cls = _source_class(args)
    ts = args.sweep.grid() if args.sweep is not None else [args.t]
    rows = []
    for i, t in enumerate(ts):
        seed = [args.seed, i]
        msd = correlation.mean_square_distance(cls, t, args.trials, rng_seed(seed, 0))
        fit = correlation.marginal_test(cls, t, args.trials, rng_seed(seed, 1))
        rows.append({"t": t, "trials": args.trials, "mean_sq_dist": msd.mean,
                     "stderr": msd.stderr, "marginal_pvalue": fit.pvalue})
    _emit_csv(rows)


def rng_seed(seed, stream):
    return np.random.default_rng(np.random.SeedSequence([*seed, stream]))


def _cmd_mi_oracle(args) -> None:
    if args.identity_check:
        _emit_json(_json_safe(mi_oracle.mi_gap_identity_check(args.n, args.m, args.t).to_dict()))
    elif args.m == 0 or args.m is None:
        _emit_json(_json_safe(mi_oracle.mi_unconditional(args.n).to_dict()))
    else:
        _emit_json(_json_safe(mi_oracle.mi_conditional(args.n, args.m, args.t).to_dict()))


def _cmd_codec_bench(args) -> None:
    cls = _source_class(args)
    strategies = [Strategy(s) for s in args.strategy.split(",")]
    ms = args.sweep.grid() if args.sweep is not None and args.sweep.variable == "m" else [args.m]
    if args.sweep is not None and args.sweep.variable != "m":
        raise UsageError("codec-bench sweeps only over m")
    rows = []
    for strategy in strategies:
        for m in ms:
            meas = codec.measure_redundancy(cls, args.n, strategy, m=m, t=args.t,
                                            trials=args.trials, seed=args.seed,
                                            workers=args.threads)
            row = meas.to_dict()
            row["formula_bits"] = codec.formula_redundancy(cls, args.n, strategy, m, args.t)
            rows.append(row)
    _emit_csv(rows)


def _load_graph(spec: str) -> netcomp.Network:
    path = Path(spec)
    if path.exists():
        return netcomp.Network.load(path)
    if spec in ("fig5", "fig5.json"):
        return netcomp.fig5_network()
    raise FileNotFoundError(f"graph file {spec!r} not found")


def _cmd_network(args) -> None:
    net = _load_graph(args.graph)
    server = args.server or net.server
    client = args.client or net.client
    rep = netcomp.gain_bh(net, server, client, args.g, memory_choice=args.memory,
                          mean_len_bits=args.mean_len)
    _emit_json(rep.to_dict())


def _cmd_reproduce(args) -> int:
    checks = reproduce.golden_checks()
    sys.stdout.write(reproduce.format_table(checks) + "\n")
    return 0 if all(c.passed for c in checks) else 1


def _default_seed() -> int:
    env = os.environ.get("SIC_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SIC_SEED must be an integer, got {env!r}") from None


def _add_source(p, n=True, m=True, t=True):
    p.add_argument("--class", dest="source_class", choices=[k.value for k in SourceKind],
                   default="memoryless")
    p.add_argument("--k", type=int, default=2)
    if n:
        p.add_argument("--n", type=parse_quantity, default=1024)
    if m:
        p.add_argument("--m", type=parse_quantity, default=INF)
    if t:
        p.add_argument("--t", type=parse_quantity, default=INF)
    p.add_argument("--sweep", type=parse_sweep, default=None)


def _add_formula(p):
    p.add_argument("--entropy-rate", type=float, default=1.0, help="H^n / n in bits per symbol")
    p.add_argument("--d", "--d-override", dest="d", type=int, default=None)
    p.add_argument("--clamp", action=argparse.BooleanOptionalAction, default=True)


def build_parser() -> argparse.ArgumentParser:
    # Shared options are accepted before or after the subcommand name.
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="RNG seed (default: $SIC_SEED or 0)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    parser = _Parser(prog="sidecomp", parents=[common],
                     description="Universal compression with side information.")
    parser.set_defaults(seed=None, threads=1, verbose=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _orig = sub.add_parser

    def add_parser(name, **kw):
        return _orig(name, parents=[common], **kw)

    sub.add_parser = add_parser

    for name, fn in (("redundancy", _redundancy_row), ("gain", _gain_row)):
        p = sub.add_parser(name)
        _add_source(p)
        _add_formula(p)
        if name == "redundancy":
            p.add_argument("--eps", type=float, default=None)
        else:
            p.add_argument("--strategy", default="UcompED", choices=[s.value for s in Strategy])
        p.set_defaults(row=fn)

    p = sub.add_parser("mem-size")
    _add_source(p, m=False, t=False)
    _add_formula(p)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(row=_mem_size_row)

    p = sub.add_parser("one2one")
    _add_source(p, m=False, t=False)
    _add_formula(p)
    p.set_defaults(row=_one2one_row)

    p = sub.add_parser("simulate-correlation")
    _add_source(p, n=False, m=False)
    p.add_argument("--trials", type=int, default=10_000)
    p.set_defaults(handler=_cmd_simulate_correlation)

    p = sub.add_parser("mi-oracle")
    p.add_argument("--n", type=parse_quantity, required=True)
    p.add_argument("--m", type=parse_quantity, default=0)
    p.add_argument("--t", type=parse_quantity, default=INF)
    p.add_argument("--identity-check", action="store_true")
    p.set_defaults(handler=_cmd_mi_oracle)

    p = sub.add_parser("codec-bench")
    _add_source(p)
    p.set_defaults(m=0)
    p.add_argument("--strategy", default="Ucomp", help="comma-separated list of strategies")
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(handler=_cmd_codec_bench)

    p = sub.add_parser("network")
    p.add_argument("--graph", default="fig5.json")
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--server", default=None)
    p.add_argument("--client", default=None)
    p.add_argument("--memory", default="auto")
    p.add_argument("--mean-len", type=float, default=1.0, help="mean compressed length in bits")
    p.set_defaults(handler=_cmd_network)

    p = sub.add_parser("reproduce")
    p.set_defaults(handler=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.seed is None:
            args.seed = _default_seed()
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        if hasattr(args, "row"):
            _run(args, args.row)
            return 0
        return args.handler(args) or 0
    except UsageError as exc:
        sys.stderr.write(f"sidecomp: error: {exc}\n")
        return 2
    except (ValueError, KeyError, ArithmeticError, OSError) as exc:
        sys.stderr.write(f"sidecomp: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
