"""Command-line interface: solve, verify, generate, check-condition,
isochrony, vectorize.

Complex numbers are serialized as ``<re><sign><im>i`` with 17 significant
digits (lossless round trip); CSV trajectories use separate re/im columns.
Flags may also be supplied through a JSON config file (``--config``); on
conflict the file wins with a warning.  Runtime events (singularities,
ambiguities) are data, not failures: they land in the output and the exit
status stays 0.  Exit codes: 0 success, 2 invalid configuration, 3
verification exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import random
import sys

from .correspondence import Config, Pair
from .generator import (
    ConditionReport,
    YSystemSpec,
    builtin_example,
    check_condition,
    synthesize_xsystem,
)
from .parsing import parse_poly
from .pipeline import (
    SolveRequest,
    Trajectory,
    solve,
    verify_against_oracle,
)
from .poly import MultiPoly
from .variants import (
    IsochronySetup,
    homogeneity_check,
    isochronize,
    isochrony_report,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3

EXAMPLE_HOMOGENEITY = {1: 2, 2: 2, 3: 4, 4: 3}


class ConfigError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """Accept the forms ``a``, ``bi``, ``a+bi``, ``a-bi`` (decimal reals,
    exponents allowed)."""
    t = text.strip().replace(" ", "")
    if not t:
        raise ConfigError("empty complex literal")
    try:
        if t.endswith("i") or t.endswith("j"):
            body = t[:-1]
            for i in range(len(body) - 1, 0, -1):
                if body[i] in "+-" and body[i - 1] not in "eE":
                    im = body[i:]
                    if im in ("+", "-"):
                        im += "1"
                    return complex(float(body[:i]), float(im))
            if body in ("", "+", "-"):
                body += "1"
            return complex(0.0, float(body))
        return complex(float(t), 0.0)
    except ValueError as exc:
        raise ConfigError(f"malformed complex literal {text!r}") from exc


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def format_complex(z: complex) -> str:
    sign = "-" if (z.imag < 0 or (z.imag == 0 and math.copysign(1.0, z.imag) < 0)) else "+"
    return f"{format_float(z.real)}{sign}{format_float(abs(z.imag))}i"


def load_yspec(path: str) -> YSystemSpec:
    """Read a y-system declaration: JSON with config, pair, f expressions."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"spec-file: cannot read {path}: {exc}") from exc
    try:
        config = Config(doc["config"])
        pair = Pair(doc["pair"])
        names = {"y12": ("y1", "y2"), "y13": ("y1", "y3"), "y23": ("y2", "y3")}[pair.value]
        f = {name: parse_poly(src, names) for name, src in doc["f"].items()}
        params = {k: parse_complex(str(v)) for k, v in doc.get("params", {}).items()}
        return YSystemSpec(config, pair, f, params)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"spec-file: invalid y-system declaration: {exc}") from exc


# ---------------------------------------------------------------------------
# argument plumbing

_COMPLEX_FIELDS = ("a", "b", "x1", "x2")
_FLOAT_FIELDS = ("t_max", "rtol", "atol", "tol", "omega")
_INT_FIELDS = ("example", "grid", "seeds", "qmax", "p")
_STR_FIELDS = ("spec_file", "method", "output", "format")


def _apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config: cannot read {args.config}: {exc}") from exc
    for key, raw in doc.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"config: unknown field {key!r}")
        if attr in _COMPLEX_FIELDS:
            value = parse_complex(str(raw))
        elif attr in _FLOAT_FIELDS:
            value = float(raw)
        elif attr in _INT_FIELDS:
            value = int(raw)
        else:
            value = raw
        current = getattr(args, attr)
        if current is not None and current != value:
            print(f"warning: --{key} = {current} overridden by config file value {value}",
                  file=sys.stderr)
        setattr(args, attr, value)


def _require(args, names):
    for name in names:
        if getattr(args, name, None) is None:
            raise ConfigError(f"missing required option --{name.replace('_', '-')}")


def _default(args, name, value):
    if getattr(args, name, None) is None:
        setattr(args, name, value)


def _output_stream(args):
    path = getattr(args, "output", None)
    if path is None:
        return sys.stdout, None
    outdir = os.environ.get("ROOTFLOW_OUTPUT_DIR", "")
    if outdir and not os.path.dirname(path):
        path = os.path.join(outdir, path)
    return open(path, "w", encoding="utf-8"), path


def _resolve_request(args) -> SolveRequest:
    if args.spec_file is not None:
        example = load_yspec(args.spec_file)
    elif args.example is not None:
        example = args.example
    else:
        raise ConfigError("missing required option --example or --spec-file")
    _require(args, ("x1", "x2", "t_max"))
    _default(args, "a", 0j)
    _default(args, "b", 0j)
    _default(args, "grid", 101)
    _default(args, "rtol", 1e-10)
    _default(args, "atol", 1e-10)
    try:
        return SolveRequest(example=example, a=args.a, b=args.b,
                            x1_0=args.x1, x2_0=args.x2, t_max=args.t_max,
                            grid=args.grid, rtol=args.rtol, atol=args.atol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# trajectory serialization


def trajectory_csv_lines(trajs: list[Trajectory]):
    yield "t,re_x1,im_x1,re_x2,im_x2,method"
    for traj in trajs:
        for t, (x1, x2) in zip(traj.times, traj.states):
            yield (f"{format_float(t)},{format_float(x1.real)},{format_float(x1.imag)},"
                   f"{format_float(x2.real)},{format_float(x2.imag)},{traj.method}")


def trajectory_json_doc(traj: Trajectory) -> dict:
    return {
        "times": list(traj.times),
        "x1": [[s[0].real, s[0].imag] for s in traj.states],
        "x2": [[s[1].real, s[1].imag] for s in traj.states],
        "events": [{"t": ev.time, "kind": ev.kind} for ev in traj.events],
        "method": traj.method,
        "labels_valid": traj.labels_valid,
    }


def _write_trajectories(args, trajs: list[Trajectory]) -> None:
    fmt = args.format or "csv"
    stream, path = _output_stream(args)
    try:
        if fmt == "csv":
            for line in trajectory_csv_lines(trajs):
                print(line, file=stream)
        else:
            docs = [trajectory_json_doc(tr) for tr in trajs]
            json.dump(docs[0] if len(docs) == 1 else docs, stream, indent=2)
            print(file=stream)
    finally:
        if path is not None:
            stream.close()


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args) -> int:
    req = _resolve_request(args)
    method = args.method or "algebraic"
    trajs = solve(req, method=method)
    _write_trajectories(args, trajs)
    return EXIT_OK


def cmd_vectorize(args) -> int:
    req = _resolve_request(args)
    method = args.method or "algebraic"
    trajs = solve(req, method=method)
    fmt = args.format or "csv"
    stream, path = _output_stream(args)
    try:
        if fmt == "csv":
            print("t,r1_1,r1_2,r2_1,r2_2,method", file=stream)
            for traj in trajs:
                for t, (x1, x2) in zip(traj.times, traj.states):
                    print(f"{format_float(t)},{format_float(x1.real)},{format_float(x1.imag)},"
                          f"{format_float(x2.real)},{format_float(x2.imag)},{traj.method}",
                          file=stream)
        else:
            docs = [{
                "times": list(tr.times),
                "r1": [[s[0].real, s[0].imag] for s in tr.states],
                "r2": [[s[1].real, s[1].imag] for s in tr.states],
                "events": [{"t": ev.time, "kind": ev.kind} for ev in tr.events],
                "method": tr.method,
            } for tr in trajs]
            json.dump(docs[0] if len(docs) == 1 else docs, stream, indent=2)
            print(file=stream)
    finally:
        if path is not None:
            stream.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    _default(args, "tol", 1e-6)
    reports = []
    if args.seeds is not None:
        _require(args, ("example", "t_max"))
        _default(args, "grid", 101)
        rng = random.Random(args.seed_base if args.seed_base is not None else 0)

        def draw():
            return cmath.rect(math.sqrt(rng.random()), rng.uniform(0.0, 2.0 * math.pi))

        n_done = 0
        while n_done < args.seeds:
            a, b, x1, x2 = draw(), draw(), draw(), draw()
            if abs(x1 - x2) < 0.1 or (args.example != 1 and abs(x1) < 0.1):
                continue
            req = SolveRequest(example=args.example, a=a, b=b, x1_0=x1, x2_0=x2,
                               t_max=args.t_max, grid=args.grid)
            reports.append((req, verify_against_oracle(req, tol=args.tol)))
            n_done += 1
    else:
        req = _resolve_request(args)
        reports.append((req, verify_against_oracle(req, tol=args.tol)))

    docs = []
    any_failed = False
    for req, rep in reports:
        doc = {
            "a": format_complex(complex(req.a)), "b": format_complex(complex(req.b)),
            "x1_0": format_complex(complex(req.x1_0)), "x2_0": format_complex(complex(req.x2_0)),
            "max_deviation": rep.max_deviation, "mean_deviation": rep.mean_deviation,
            "n_compared": rep.n_compared, "n_excluded": rep.n_excluded,
            "events": [{"t": ev.time, "kind": ev.kind, "detail": ev.detail} for ev in rep.events],
            "tol": rep.tol, "passed": rep.passed, "method": rep.method,
        }
        if not rep.passed and not rep.events:
            any_failed = True
        docs.append(doc)
    stream, path = _output_stream(args)
    try:
        json.dump(docs[0] if len(docs) == 1 else docs, stream, indent=2)
        print(file=stream)
    finally:
        if path is not None:
            stream.close()
    return EXIT_TOLERANCE if any_failed else EXIT_OK


def _symbolic_system_lines(n: int) -> list[str]:
    _, xs_a = builtin_example(n, 1.0, 0.0)
    _, xs_b = builtin_example(n, 0.0, 1.0)
    one = MultiPoly.const(("x1", "x2"), 1.0)
    lines = []
    for pa, pb in ((xs_a.p1, xs_b.p1), (xs_a.p2, xs_b.p2)):
        parts = []
        for sym, p in (("a", pa), ("b", pb)):
            if p.is_zero():
                continue
            if p == one:
                parts.append(sym)
            elif len(p.terms) == 1 and next(iter(p.terms.values())) == 1.0:
                parts.append(f"{sym}*{p.pretty()}")
            else:
                parts.append(f"{sym}*({p.pretty()})")
        lines.append(" + ".join(parts) if parts else "0")
    return lines


def cmd_generate(args) -> int:
    stream, path = _output_stream(args)
    try:
        if args.spec_file is not None:
            spec = load_yspec(args.spec_file)
            xs = synthesize_xsystem(spec)
            print(xs.p1.pretty(), file=stream)
            print(xs.p2.pretty(), file=stream)
        elif args.example is not None:
            if args.a is not None and args.b is not None:
                _, xs = builtin_example(args.example, args.a, args.b)
                print(xs.p1.pretty(), file=stream)
                print(xs.p2.pretty(), file=stream)
            else:
                for line in _symbolic_system_lines(args.example):
                    print(line, file=stream)
        else:
            raise ConfigError("missing required option --example or --spec-file")
    finally:
        if path is not None:
            stream.close()
    return EXIT_OK


def _report_condition(rep: ConditionReport, stream) -> None:
    print(f"condition: {rep.condition}", file=stream)
    print(f"satisfied: {'true' if rep.satisfied else 'false'}", file=stream)
    print(f"residual: {rep.residual.pretty()}", file=stream)
    if rep.divisibility_failure is not None:
        print(f"divisibility-failure: constant term "
              f"{format_complex(rep.divisibility_failure)}", file=stream)


def cmd_check_condition(args) -> int:
    if args.spec_file is not None:
        spec = load_yspec(args.spec_file)
    elif args.example is not None:
        _default(args, "a", 1.0 + 0j)
        _default(args, "b", 1.0 + 0j)
        spec, _ = builtin_example(args.example, args.a, args.b)
    else:
        raise ConfigError("missing required option --example or --spec-file")
    rep = check_condition(spec)
    stream, path = _output_stream(args)
    try:
        _report_condition(rep, stream)
    finally:
        if path is not None:
            stream.close()
    return EXIT_OK


def cmd_isochrony(args) -> int:
    _require(args, ("example",))
    _default(args, "b", 1.0 + 0j)
    _default(args, "omega", 1.0)
    _default(args, "qmax", 6)
    _default(args, "tol", 1e-6)
    _default(args, "rtol", 1e-10)
    p = args.p if args.p is not None else EXAMPLE_HOMOGENEITY[args.example]
    _, xs = builtin_example(args.example, 0.0, args.b)
    if not homogeneity_check(xs, p):
        raise ConfigError(f"example {args.example} with a = 0 is not homogeneous of degree {p}")
    setup = IsochronySetup(alpha=1j * args.omega, p=p)
    ws = isochronize(xs, setup)

    states = []
    if args.x1 is not None and args.x2 is not None:
        states.append((args.x1, args.x2))
    if args.seeds is not None:
        rng = random.Random(args.seed_base if args.seed_base is not None else 0)
        for _ in range(args.seeds):
            states.append((cmath.rect(math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi)),
                           cmath.rect(math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi))))
    if not states:
        raise ConfigError("isochrony needs --x1/--x2 or --seeds")

    docs = []
    for w0 in states:
        rep = isochrony_report(ws, setup, w0, q_max=args.qmax, tol=args.tol, rtol=args.rtol)
        docs.append({
            "w1_0": format_complex(complex(w0[0])), "w2_0": format_complex(complex(w0[1])),
            "closed": rep.closed, "q": rep.q, "closure_error": rep.closure_error,
            "base_period": rep.base_period,
            "errors_by_multiple": list(rep.errors_by_multiple),
        })
    stream, path = _output_stream(args)
    try:
        json.dump(docs[0] if len(docs) == 1 else docs, stream, indent=2)
        print(file=stream)
    finally:
        if path is not None:
            stream.close()
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rootflow",
        description="Solve, verify and transform the built-in algebraically "
                    "solvable planar polynomial systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_method=True):
        p.add_argument("--example", type=int, choices=(1, 2, 3, 4))
        p.add_argument("--spec-file", dest="spec_file")
        p.add_argument("--config", help="JSON config file (wins over flags on conflict)")
        p.add_argument("--a", type=parse_complex)
        p.add_argument("--b", type=parse_complex)
        p.add_argument("--x1", type=parse_complex)
        p.add_argument("--x2", type=parse_complex)
        p.add_argument("--t-max", dest="t_max", type=float)
        p.add_argument("--grid", type=int)
        p.add_argument("--rtol", type=float)
        p.add_argument("--atol", type=float)
        p.add_argument("--output", "-o")
        p.add_argument("--format", choices=("csv", "json"))
        if with_method:
            p.add_argument("--method", choices=("algebraic", "oracle", "both"))

    p_solve = sub.add_parser("solve", help="write a trajectory")
    add_common(p_solve)
    p_solve.set_defaults(fn=cmd_solve)

    p_vec = sub.add_parser("vectorize", help="write the real 2-vector trajectory")
    add_common(p_vec)
    p_vec.set_defaults(fn=cmd_vectorize)

    p_verify = sub.add_parser("verify", help="compare the algebraic solve against the oracle")
    add_common(p_verify, with_method=False)
    p_verify.add_argument("--tol", type=float)
    p_verify.add_argument("--seeds", type=int, help="number of random initial conditions")
    p_verify.add_argument("--seed-base", dest="seed_base", type=int)
    p_verify.set_defaults(fn=cmd_verify)

    p_gen = sub.add_parser("generate", help="print the synthesized right-hand sides")
    add_common(p_gen, with_method=False)
    p_gen.set_defaults(fn=cmd_generate)

    p_check = sub.add_parser("check-condition", help="report the divisibility condition")
    add_common(p_check, with_method=False)
    p_check.set_defaults(fn=cmd_check_condition)

    p_iso = sub.add_parser("isochrony", help="period closure of the isochronized system")
    add_common(p_iso, with_method=False)
    p_iso.add_argument("--omega", type=float)
    p_iso.add_argument("--p", type=int)
    p_iso.add_argument("--qmax", type=int)
    p_iso.add_argument("--tol", type=float)
    p_iso.add_argument("--seeds", type=int)
    p_iso.add_argument("--seed-base", dest="seed_base", type=int)
    p_iso.set_defaults(fn=cmd_isochrony)

    return parser


_VALUE_FLAGS = {"--a", "--b", "--x1", "--x2", "--t-max", "--rtol", "--atol",
                "--tol", "--omega"}


def _join_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--x2 -1+0i`` as ``--x2=-1+0i`` so argparse does not mistake
    the negative literal for an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(list(argv if argv is not None else sys.argv[1:])))
    try:
        _apply_config_file(args)
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
