"""Command-line front end: ``run``, ``check``, ``spectrum`` and ``presets``.

Exit status: 0 success, 1 bad input, 2 flow stopped before t_end,
3 some audited claim failed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .audit import run_check
from .complex import PRESETS, ComplexError, MetricAssignment, SimplicialComplex, load_complex, preset
from .flow import FlowConfig, _dump_json, run_flow
from .geometry import DegenerateTetrahedronError, as_weights, relative_q, EPS_Q

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_STOPPED = 2
EXIT_CLAIM = 3


class InputError(Exception):
    pass


def _radius(text: str) -> tuple[int, float]:
    try:
        v, x = text.split("=", 1)
        return int(v), float(x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected VERTEX=VALUE, got {text!r}") from None


def _tetra(text: str) -> np.ndarray:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected r1,r2,r3,r4, got {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"expected 4 weights, got {len(vals)}")
    return np.array(vals)


def _add_input(p: argparse.ArgumentParser, required: bool):
    p.add_argument("file", nargs="?", help="complex in the tet/radius text format")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--radius", action="append", type=_radius, default=[], metavar="V=X",
                   help="override the weight of vertex V (repeatable)")
    p.set_defaults(input_required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="yamabeflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate the flow and write a trace")
    _add_input(run, True)
    d = FlowConfig()
    run.add_argument("--t-end", type=float, default=d.t_end)
    run.add_argument("--dt-init", type=float, default=d.dt_init)
    run.add_argument("--dt-min", type=float, default=d.dt_min)
    run.add_argument("--rel-tol", type=float, default=d.rel_tol)
    run.add_argument("--q-guard", type=float, default=d.q_guard)
    run.add_argument("--record-every", type=int, default=d.record_every)
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--output", "-o", help="trace file (default: trace.csv / trace.json)")

    check = sub.add_parser("check", help="run the numerical audit and write a JSON report")
    _add_input(check, False)
    check.add_argument("--tetra", type=_tetra, metavar="R1,R2,R3,R4")
    check.add_argument("--samples", type=int, default=1000)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--output", "-o", help="report file (default: standard output)")

    spectrum = sub.add_parser("spectrum", help="eigenvalues of d(alpha)/d(r) for one tetrahedron")
    spectrum.add_argument("--tetra", type=_tetra, required=True, metavar="R1,R2,R3,R4")

    sub.add_parser("presets", help="list built-in complexes")
    return parser


def _load_input(args) -> tuple[SimplicialComplex, MetricAssignment] | None:
    if args.file and args.preset:
        raise InputError("give either a file or --preset, not both")
    if args.file:
        try:
            c, m = load_complex(args.file)
        except OSError as exc:
            raise InputError(f"{args.file}: {exc.strerror}") from None
        except ComplexError as exc:
            raise InputError(f"{args.file}: {exc}") from None
    elif args.preset:
        c, m = preset(args.preset)
    elif args.radius:
        raise InputError("--radius needs a file or --preset")
    elif args.input_required:
        raise InputError("no input: give a file or --preset")
    else:
        return None
    unknown = sorted(v for v, _ in args.radius if v not in m.r)
    if unknown:
        raise InputError(f"--radius names vertices not in the complex: {unknown}")
    try:
        m = m.with_radii(dict(args.radius))
    except ComplexError as exc:
        raise InputError(str(exc)) from None
    rq = relative_q(m.array(c.vertices)[c.tet_array])
    bad = np.flatnonzero(rq <= EPS_Q)
    if bad.size:
        n = int(bad[0])
        raise InputError(f"tetrahedron {n} {c.tetrahedra[n]} is degenerate under the given weights")
    return c, m


def _check_tetra(r) -> np.ndarray:
    try:
        r = as_weights(r)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not relative_q(r) > EPS_Q:
        raise InputError(f"tetrahedron {r.tolist()} is degenerate (Q <= 0)")
    return r


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_run(args) -> int:
    c, m = _load_input(args)
    try:
        cfg = FlowConfig(args.t_end, args.dt_init, args.dt_min, args.rel_tol, args.q_guard, args.record_every)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    trace = run_flow(c, m, cfg)
    text = trace.to_csv() if args.format == "csv" else trace.to_json()
    out = args.output or f"trace.{args.format}"
    _write(out, text)
    last = trace.final()
    spread = float(last.K.max() - last.K.min())
    summary = f"t_final={last.t:.17g} K_spread={spread:.6e} termination={trace.termination}\n"
    (sys.stderr if out == "-" else sys.stdout).write(summary)
    return EXIT_OK if trace.termination == "reached_t_end" else EXIT_STOPPED


def cmd_check(args) -> int:
    if args.samples < 1:
        raise InputError("--samples must be >= 1")
    complex_ = _load_input(args)
    tetra = None if args.tetra is None else _check_tetra(args.tetra)
    report = run_check(args.samples, args.seed, tetra=tetra, complex_=complex_)
    _write(args.output, _dump_json(report) + "\n")
    for name in report["failed"]:
        print(f"claim failed: {name}", file=sys.stderr)
    if args.output not in (None, "-"):
        n = len(report["claims"])
        print(f"{n - len(report['failed'])}/{n} claims passed (seed {args.seed})")
    return EXIT_OK if report["passed"] else EXIT_CLAIM


def cmd_spectrum(args) -> int:
    from .analysis import hessian_spectrum

    r = _check_tetra(args.tetra)
    rep = hessian_spectrum(r)
    print("eigenvalues:", " ".join(f"{w:.12g}" for w in rep.eigenvalues))
    print(f"null_vector_angle: {rep.null_vector_angle:.6e}")
    print(f"worst_minor_error: {rep.minor_check:.6e}")
    return EXIT_OK


def cmd_presets(args) -> int:
    for name in sorted(PRESETS):
        c, _ = preset(name)
        print(f"{name}: {len(c.vertices)} vertices, {len(c.tetrahedra)} tetrahedra")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "check": cmd_check, "spectrum": cmd_spectrum, "presets": cmd_presets}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (InputError, DegenerateTetrahedronError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
