"""Command-line front end.

Verbs: simulate, trace, weakvalues, monitor, eve, sweep.  Exit codes are 0
(success), 1 (engine error) and 2 (usage error); errors go to stderr as a
single JSON line ``{"code": ..., "message": ...}``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from . import __version__
from .emit import emit, to_csv_bytes
from .errors import ZenoError
from .eve import eve_information
from .monitor import (AFTER_ABSORBER, BEFORE_ABSORBER, blocked_kept_distribution,
                      finite_size_found, never_found_equivalence_oracle, run_monitored)
from .pointer import PointerModel, couple_pointer, pointer_mean
from .schedule import LogicBit, ProtocolParams, build_schedule, slices_from_spec
from .state import SinkId
from .sweep import SweepSpec, default_jobs, run_sweep
from .tsvf import (PostSelection, blocked_recursion_oracle, closed_form_pD1_unblocked,
                   forward_evolve, presence_trace_export, two_state_trace, weak_value_export)

VERBS = ("simulate", "trace", "weakvalues", "monitor", "eve", "sweep")
EXIT_OK, EXIT_ENGINE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(message)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _int_list(text: str) -> List[int]:
    """``1,2,5`` or inclusive ranges ``1:40`` / ``10:100:10``, comma-mixable."""
    out: List[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if ":" in part:
            bits = [int(x) for x in part.split(":")]
            lo, hi, step = (bits + [1])[:3] if len(bits) == 2 else bits
            if step < 1:
                raise argparse.ArgumentTypeError("range step must be >= 1")
            out.extend(range(lo, hi + 1, step))
        elif part:
            out.append(int(part))
    if not out or min(out) < 0:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")
    return out


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from None


@dataclass
class Command:
    verb: str
    params: Optional[ProtocolParams] = None
    post: Optional[PostSelection] = None
    pointer: Optional[PointerModel] = None
    output: str = "-"
    fmt: str = "json"
    seed: Optional[int] = None
    n_runs: Optional[int] = None
    options: Dict[str, object] = field(default_factory=dict)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zeno-tsvf", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)

    def common(sp, bit=True, fmt="json", fmt_choices=("json", "csv")):
        sp.add_argument("--config", help="JSON file whose keys mirror the flags")
        sp.add_argument("--M", type=_positive_int, help="outer cycles")
        sp.add_argument("--N", type=_positive_int, help="inner cycles")
        if bit:
            sp.add_argument("--bit", type=int, choices=(0, 1), default=0)
        sp.add_argument("--format", dest="fmt", choices=fmt_choices, default=fmt)
        sp.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")

    sp = sub.add_parser("simulate", help="detector probabilities of one run")
    common(sp)
    sp.add_argument("--emit-schedule", action="store_true",
                    help="include the event list in the JSON report")

    for verb, what in (("trace", "presence trace (forward/backward/weak values)"),
                       ("weakvalues", "weak values and ABL probabilities per slice")):
        sp = sub.add_parser(verb, help=what)
        common(sp, fmt="csv")
        sp.add_argument("--post", help="post-selected detector: D1, D2, D3:m, Bob:m,n")

    sp = sub.add_parser("monitor", help="Monte Carlo with projective channel monitors")
    common(sp, fmt_choices=("json",))
    sp.add_argument("--seed", type=_seed)
    sp.add_argument("--n-runs", type=_positive_int)
    sp.add_argument("--monitor", default="all",
                    help="';'-separated slices: 'all', 'inner:m,n' or event indices")
    sp.add_argument("--placement", choices=(BEFORE_ABSORBER, AFTER_ABSORBER),
                    default=BEFORE_ABSORBER)

    sp = sub.add_parser("eve", help="Eve's weak pointer: densities, I(bit;X), TV distance")
    common(sp, bit=False)
    sp.add_argument("--g", type=float, help="pointer coupling")
    sp.add_argument("--sigma", type=float, default=1.0, help="pointer width")
    sp.add_argument("--couple-at", help="coupling slice 'inner:m,n'")
    sp.add_argument("--prior", type=float, default=0.5, help="P(bit = 1)")
    sp.add_argument("--post", help="condition on a detector (exploration)")
    sp.add_argument("--density-out", help="write the x,p0,p1 density CSV here")

    sp = sub.add_parser("sweep", help="long-format CSV over parameter grids")
    sp.add_argument("--config", help="JSON file whose keys mirror the flags")
    sp.add_argument("--M", type=_int_list, help="e.g. 1:40 or 5,10,20")
    sp.add_argument("--N", type=_int_list)
    sp.add_argument("--bit", type=_int_list, default=[0])
    sp.add_argument("--g", type=_float_list, default=[])
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--couple-at", help="'inner:m,n' for eve sweeps")
    sp.add_argument("--jobs", type=_positive_int, default=None)
    sp.add_argument("--max-points", type=_positive_int, default=None)
    sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", "-o", default="-")
    return p


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    out = {}
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest == "format":
            dest = "fmt"
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        elif not isinstance(value, bool) and value is not None:
            value = str(value)
        out[dest] = value
    return out


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb is None:
        raise UsageError(f"missing verb, one of {', '.join(VERBS)}")
    if getattr(args, "config", None):
        cfg = _load_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.verb]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        # flags win: config only replaces defaults
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"{args.verb} requires --{name.replace('_', '-')}")


def command_from_args(args: argparse.Namespace) -> Command:
    verb = args.verb
    if verb == "sweep":
        _require(args, "M", "N")
        return Command(verb, fmt=args.fmt, output=args.output, options={
            "M": args.M, "N": args.N, "bits": args.bit, "g": args.g, "sigma": args.sigma,
            "couple_at": args.couple_at,
            "jobs": args.jobs if args.jobs is not None else default_jobs(),
            "max_points": args.max_points})
    _require(args, "M", "N")
    if isinstance(args.M, list) or isinstance(args.N, list):
        raise UsageError("M and N must be single integers")
    bit = getattr(args, "bit", 0)
    try:
        params = ProtocolParams(args.M, args.N, bit)
    except ZenoError as exc:
        raise UsageError(str(exc)) from None
    cmd = Command(verb, params=params, fmt=args.fmt, output=args.output)
    post = getattr(args, "post", None)
    if verb in ("trace", "weakvalues"):
        _require(args, "post")
    if post is not None:
        try:
            cmd.post = PostSelection.coerce(post)
        except ZenoError as exc:
            raise UsageError(str(exc)) from None
    if verb == "simulate":
        cmd.options["emit_schedule"] = args.emit_schedule
    elif verb == "monitor":
        _require(args, "seed", "n_runs")
        cmd.seed, cmd.n_runs = args.seed, args.n_runs
        cmd.options.update(monitor=args.monitor, placement=args.placement)
    elif verb == "eve":
        _require(args, "g", "couple_at")
        try:
            cmd.pointer = PointerModel(args.g, args.sigma)
        except ZenoError as exc:
            raise UsageError(str(exc)) from None
        cmd.options.update(couple_at=args.couple_at, prior=args.prior,
                           density_out=args.density_out)
    return cmd


def _inner_coords(text: str):
    t = text.strip()
    if t.lower().startswith("inner:"):
        t = t[6:]
    try:
        m, n = (int(x) for x in t.split(","))
    except ValueError:
        raise UsageError(f"coupling slice must look like inner:m,n, got {text!r}") from None
    return m, n


def execute(cmd: Command) -> Dict[str, bytes]:
    """Run ``cmd`` and return ``{destination: bytes}`` without touching disk."""
    out: Dict[str, bytes] = {}
    verb = cmd.verb
    if verb == "simulate":
        schedule = build_schedule(cmd.params)
        _, report = forward_evolve(schedule, record=False)
        if cmd.fmt == "csv":
            out[cmd.output] = emit(report, "csv")
            return out
        doc = report.to_dict()
        M, N = cmd.params.M, cmd.params.N
        if cmd.params.bit == LogicBit.ZERO:
            doc["oracle"] = {"closed_form_p_D1": closed_form_pD1_unblocked(M)}
        else:
            d1, d2, absorbed = blocked_recursion_oracle(M, N)
            doc["oracle"] = {"p_D1": d1, "p_D2": d2, "p_absorbed": absorbed}
        if cmd.options.get("emit_schedule"):
            doc["schedule"] = schedule.to_dict()
        out[cmd.output] = emit(doc, "json")
    elif verb in ("trace", "weakvalues"):
        trace = two_state_trace(build_schedule(cmd.params), cmd.post)
        table = presence_trace_export(trace) if verb == "trace" else weak_value_export(trace)
        out[cmd.output] = emit(table, cmd.fmt)
    elif verb == "monitor":
        schedule = build_schedule(cmd.params)
        monitor = slices_from_spec(schedule, str(cmd.options["monitor"]).split(";"))
        batch = run_monitored(schedule, monitor, cmd.seed, cmd.n_runs,
                              cmd.options["placement"])
        doc = batch.summary()
        doc["params"] = cmd.params.to_dict()
        doc["placement"] = cmd.options["placement"]
        doc["monitored_slices"] = [s.after_event_index for s in batch.monitors]
        full = set(monitor) == set(schedule.inner_slices())
        if full and cmd.params.bit == LogicBit.ZERO:
            M, N = cmd.params.M, cmd.params.N
            try:
                doc["never_found_oracle"] = {
                    k.label: v for k, v in never_found_equivalence_oracle(M, N).items()}
                doc["blocked_kept_distribution"] = {
                    k.label: v for k, v in blocked_kept_distribution(M, N).items()}
            except ZenoError as exc:
                doc["never_found_oracle"] = {"error": exc.code}
            fs = finite_size_found(M, N)
            fs["mc_found_given_D1"] = batch.found_given(SinkId.d1())
            doc["finite_size"] = {k: (None if math.isnan(v) else v) for k, v in fs.items()}
        out[cmd.output] = emit(doc, "json")
    elif verb == "eve":
        M, N = cmd.params.M, cmd.params.N
        pair = (build_schedule(ProtocolParams(M, N, 0)), build_schedule(ProtocolParams(M, N, 1)))
        m, n = _inner_coords(cmd.options["couple_at"])
        res = eve_information(pair, (m, n), cmd.pointer, float(cmd.options["prior"]), cmd.post)
        doc = res.to_dict()
        doc.update(params={"M": M, "N": N}, g=cmd.pointer.g, sigma=cmd.pointer.sigma,
                   couple_at=[m, n], prior=float(cmd.options["prior"]),
                   post=None if cmd.post is None else cmd.post.target.label)
        if cmd.post is not None:
            doc["pointer_mean"] = {}
            for b, s in enumerate(pair):
                try:
                    dist = couple_pointer(s, {s.inner_slice(m, n)}, cmd.pointer, cmd.post)
                    doc["pointer_mean"][str(b)] = pointer_mean(dist)
                except ZenoError:
                    doc["pointer_mean"][str(b)] = None
        density = to_csv_bytes(["x", "p0", "p1"],
                               [[x, a, b] for x, a, b in zip(res.x, res.p0, res.p1)])
        if cmd.fmt == "csv":
            out[cmd.output] = density
        else:
            out[cmd.output] = emit(doc, "json")
        if cmd.options.get("density_out"):
            out[cmd.options["density_out"]] = density
    elif verb == "sweep":
        o = cmd.options
        spec_kwargs = dict(M=o["M"], N=o["N"], bits=o["bits"], g=o["g"], sigma=o["sigma"],
                           couple_at=_inner_coords(o["couple_at"]) if o["couple_at"] else None)
        if o["max_points"]:
            spec_kwargs["max_points"] = o["max_points"]
        if min(o["M"]) < 1 or min(o["N"]) < 1:
            raise UsageError("M and N values must be >= 1")
        if set(o["bits"]) - {0, 1}:
            raise UsageError("bit values must be 0 or 1")
        table = run_sweep(SweepSpec(**spec_kwargs), jobs=o["jobs"])
        out[cmd.output] = emit(table, cmd.fmt)
    else:
        raise UsageError(f"unknown verb {verb!r}")
    return out


def _write(dest: str, data: bytes) -> None:
    if dest == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(dest, "wb") as fh:
            fh.write(data)


def _fail(code: str, message: str, status: int) -> int:
    line = json.dumps({"code": code, "message": message}, sort_keys=True)
    sys.stderr.write(line + "\n")
    return status


def run_command(cmd: Command) -> int:
    try:
        outputs = execute(cmd)
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except ZenoError as exc:
        return _fail(exc.code, str(exc), EXIT_ENGINE)
    for dest, data in outputs.items():
        _write(dest, data)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cmd = command_from_args(parse_args(argv))
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    return run_command(cmd)


if __name__ == "__main__":
    sys.exit(main())
