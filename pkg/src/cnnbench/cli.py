"""Command-line front end.

Subcommands: generate, rectify, run, verify, ratio, unit, render.
Exit codes: 0 success, 1 verification failure, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .engine import OnlineServer, run as engine_run, trace_from_json, trace_to_json
from .generators import (
    GeneratedPair,
    GeneratorError,
    ProtocolError,
    adversary_continuous,
    fig2_scenario,
    random_orthogonal,
    tight1,
    tight2,
)
from .geometry import Point
from .model import (
    ModelError,
    instance_from_json,
    instance_to_json,
    rectify,
    trajectory_from_json,
    trajectory_to_json,
)
from .potential import (
    MonitorError,
    RatioUndefined,
    competitive_ratio,
    verify_nondecreasing,
)
from .scalar import Scalar, ScalarParseError, scalar_to_json
from .unitcnn import (
    Ortho3Server,
    UnitError,
    UnitProtocolError,
    adversary_unit_square,
    bruteforce_opt,
    ortho3_run,
    sweet4_run,
    transcript_to_json,
)

USAGE_ERROR = 2
VERIFY_FAILURE = 1


def fmt_scalar(s: Scalar) -> str:
    return f"{s.a} + {s.b}·√3 ≈ {float(s):.10f}"


def _parse_scalar_arg(text: str) -> Scalar:
    try:
        return Scalar(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise ScalarParseError(f"bad rational literal {text!r}") from None


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _load_instance(path):
    v = _load_json(path)
    if "instance" in v:  # accept a GeneratedPair file as well
        v = v["instance"]
    return instance_from_json(v)


def _load_opt(path):
    v = _load_json(path)
    if "opt" in v:
        v = v["opt"]
    return trajectory_from_json(v)


def _thread_count() -> int:
    env = os.environ.get("CNN_BENCH_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("CNN_BENCH_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


# -- subcommands ---------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.kind == "tight1":
        pair = tight1(args.cycles)
    elif args.kind == "tight2":
        pair = tight2(args.cycles)
    elif args.kind == "fig2":
        pair = fig2_scenario()
    elif args.kind == "random":
        pair = random_orthogonal(args.seed, args.segments, args.coord_bound)
    else:  # adversary
        origin = Point(Scalar(0), Scalar(0))
        pair = adversary_continuous(OnlineServer(origin), args.cycles)
    _write_json(args.out, pair.to_json())
    print(f"wrote {args.out}: {pair.meta['name']}, "
          f"{len(pair.instance.segments)} segments")
    return 0


def cmd_rectify(args) -> int:
    inst = _load_instance(args.instance)
    out = rectify(inst, args.epsilon)
    _write_json(args.out, instance_to_json(out))
    print(f"wrote {args.out}: {len(out.segments)} segments, "
          f"length {fmt_scalar(out.total_length)}")
    return 0


def cmd_run(args) -> int:
    inst = _load_instance(args.instance)
    if not inst.is_axis_parallel():
        if args.rectify_epsilon is None:
            raise ModelError(
                "instance has diagonal segments; pass --rectify-epsilon"
            )
        inst = rectify(inst, args.rectify_epsilon)
    trace = engine_run(inst)
    _write_json(args.trace, trace_to_json(trace))
    print(f"cost: {fmt_scalar(trace.final_cost)}")
    return 0


def _verify_one(trace, opt):
    return verify_nondecreasing(trace, opt)


def cmd_verify(args) -> int:
    jobs = []
    if args.pair:
        for path in args.pair:
            pair = GeneratedPair.from_json(_load_json(path))
            jobs.append((path, engine_run(pair.instance), pair.opt))
    else:
        trace = trace_from_json(_load_json(args.trace))
        jobs.append((args.trace, trace, _load_opt(args.opt)))
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        reports = list(pool.map(lambda j: _verify_one(j[1], j[2]), jobs))
    failures = 0
    report_out = []
    for (path, _, _), rep in zip(jobs, reports):
        status = "ok" if rep.ok else "DECREASE"
        entry = {"input": str(path), "ok": rep.ok}
        if not rep.ok:
            failures += 1
            s, before, after = rep.first_decrease
            entry["first_decrease"] = {
                "s": scalar_to_json(s),
                "phi_before": scalar_to_json(before),
                "phi_after": scalar_to_json(after),
            }
            print(f"{path}: {status} at s = {fmt_scalar(s)}")
        else:
            print(f"{path}: {status}")
        report_out.append(entry)
    if args.report:
        _write_json(args.report, report_out)
    return VERIFY_FAILURE if failures else 0


def cmd_ratio(args) -> int:
    if args.pair:
        pair = GeneratedPair.from_json(_load_json(args.pair))
        trace, opt = engine_run(pair.instance), pair.opt
        expected = pair.meta.get("expected_ratio")
    else:
        trace = trace_from_json(_load_json(args.trace))
        opt = _load_opt(args.opt)
        expected = None
    ratio = competitive_ratio(trace, opt)
    print(f"ratio: {fmt_scalar(ratio)}")
    if expected is not None:
        match = "matches" if ratio == expected else "DIFFERS FROM"
        print(f"{match} expected {fmt_scalar(expected)}")
        if ratio != expected:
            return VERIFY_FAILURE
    return 0


def _load_requests(path):
    v = _load_json(path)
    if not isinstance(v, list):
        raise UnitError("requests file must be a JSON list of points")
    return [Point.from_json(r, f"requests[{i}]") for i, r in enumerate(v)]


def cmd_unit(args) -> int:
    origin = (Scalar(0), Scalar(0))
    if args.algo == "adversary":
        if args.rounds is None:
            raise UnitError("--algo adversary needs --rounds")
        server = Ortho3Server((0, 0))
        stream = adversary_unit_square(server, args.rounds)
        opt = bruteforce_opt(stream, (0, 0), limit=max(14, len(stream)))
        print(f"online: ${server.dollars}  offline: ${opt}")
        if args.out:
            _write_json(args.out, transcript_to_json(server.transcript))
        return 0
    if args.requests is None:
        raise UnitError(f"--algo {args.algo} needs --requests")
    requests = _load_requests(args.requests)
    if args.algo == "opt":
        cost = bruteforce_opt(requests, origin, limit=args.limit)
        print(f"offline optimum: ${cost}")
        return 0
    runner = sweet4_run if args.algo == "sweet4" else ortho3_run
    transcript, dollars = runner(requests, origin)
    print(f"{args.algo}: ${dollars}")
    if args.out:
        _write_json(args.out, transcript_to_json(transcript))
    return 0


def cmd_render(args) -> int:
    from .render import render_trace

    trace = trace_from_json(_load_json(args.trace))
    opt = _load_opt(args.opt) if args.opt else None
    render_trace(trace, args.out, opt)
    print(f"wrote {args.out}")
    return 0


# -- argument plumbing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cnn-bench",
        description="Exact workbench for the moving-request alignment problem.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a named or random instance pair")
    g.add_argument("--kind", required=True,
                   choices=["tight1", "tight2", "fig2", "random", "adversary"])
    g.add_argument("--cycles", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--segments", type=int, default=12)
    g.add_argument("--coord-bound", type=int, default=4)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("rectify", help="staircase diagonal segments")
    r.add_argument("--instance", required=True)
    r.add_argument("--epsilon", required=True, type=_parse_scalar_arg)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_rectify)

    x = sub.add_parser("run", help="execute the online algorithm")
    x.add_argument("--instance", required=True)
    x.add_argument("--trace", required=True)
    x.add_argument("--rectify-epsilon", type=_parse_scalar_arg)
    x.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="check the potential certificate")
    v.add_argument("--trace")
    v.add_argument("--opt")
    v.add_argument("--pair", nargs="+",
                   help="one or more generated pair files (batch mode)")
    v.add_argument("--report", help="write a JSON report here")
    v.set_defaults(func=cmd_verify)

    q = sub.add_parser("ratio", help="online/offline cost ratio")
    q.add_argument("--pair")
    q.add_argument("--trace")
    q.add_argument("--opt")
    q.set_defaults(func=cmd_ratio)

    u = sub.add_parser("unit", help="unit-cost variant algorithms")
    u.add_argument("--algo", required=True,
                   choices=["sweet4", "ortho3", "opt", "adversary"])
    u.add_argument("--requests")
    u.add_argument("--rounds", type=int)
    u.add_argument("--limit", type=int, default=14)
    u.add_argument("--out")
    u.set_defaults(func=cmd_unit)

    d = sub.add_parser("render", help="draw a trace as SVG (plus CSV)")
    d.add_argument("--trace", required=True)
    d.add_argument("--opt")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and not args.pair and not (args.trace and args.opt):
        parser.error("verify needs --pair or both --trace and --opt")
    if args.command == "ratio" and not args.pair and not (args.trace and args.opt):
        parser.error("ratio needs --pair or both --trace and --opt")
    try:
        return args.func(args)
    except (
        ModelError,
        GeneratorError,
        ProtocolError,
        MonitorError,
        RatioUndefined,
        UnitError,
        UnitProtocolError,
        ScalarParseError,
        OSError,
        ValueError,
        KeyError,
        json.JSONDecodeError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
