"""Command-line front end.

Subcommands: certify, reduce, solve, oracle, pipeline, gallery, plot.
The result document goes to stdout (or --out, written atomically);
diagnostics go to stderr.  Exit codes: 0 success/certified, 2 not certified,
3 inconclusive, 1 error.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile

from . import docio, gallery, oracle, plotting
from .certify import certify as run_certify
from .model import normalize
from .pipeline import PipelineConfig, run_pipeline
from .reduction import facial_reduce
from . import sdp as sdpmod

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CERTIFIED = 2
EXIT_INCONCLUSIVE = 3


def _emit(doc: dict, out_path):
    text = docio.serialize(doc)
    if out_path:
        d = os.path.dirname(os.path.abspath(out_path)) or "."
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-out-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, out_path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    else:
        sys.stdout.write(text)


def _load(path: str):
    with open(path, "rb") as fh:
        return docio.parse_problem(fh.read())


def _verdict_exit(overall: str) -> int:
    if overall == "certified":
        return EXIT_OK
    if overall == "not_certified":
        return EXIT_NOT_CERTIFIED
    return EXIT_INCONCLUSIVE


def cmd_certify(args) -> int:
    problem, opts = _load(args.input)
    tol = args.tol if args.tol is not None else opts["tol"]
    rep = run_certify(normalize(problem.bset), tol)
    _emit({"schema_version": docio.SCHEMA_VERSION, "command": "certify",
           "certification": docio.cert_doc(rep)}, args.out)
    return _verdict_exit(rep.overall)


def cmd_reduce(args) -> int:
    problem, opts = _load(args.input)
    tol = args.tol if args.tol is not None else opts["tol"]
    rr = facial_reduce(problem, tol)
    _emit({"schema_version": docio.SCHEMA_VERSION, "command": "reduce",
           "reduction": docio.reduction_doc(rr)}, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    problem, opts = _load(args.input)
    tol = args.tol if args.tol is not None else opts["tol"]
    sol = sdpmod.solve(sdpmod.relaxation_problem(problem), tol=tol)
    _emit({"schema_version": docio.SCHEMA_VERSION, "command": "solve",
           "sdp": docio.sdp_doc(sol)}, args.out)
    return EXIT_OK if sol.status in ("optimal", "infeasible", "unbounded") else EXIT_ERROR


def cmd_oracle(args) -> int:
    problem, opts = _load(args.input)
    samples = args.samples if args.samples is not None else opts["samples"]
    seed = args.seed if args.seed is not None else opts["seed"]
    res = oracle.solve_sphere(problem, samples=samples, seed=seed)
    _emit({"schema_version": docio.SCHEMA_VERSION, "command": "oracle",
           "oracle": docio.oracle_doc(res)}, args.out)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    problem, opts = _load(args.input)
    tol = args.tol if args.tol is not None else opts["tol"]
    seed = args.seed if args.seed is not None else opts["seed"]
    verdict = run_pipeline(problem, PipelineConfig(tol=tol, cert_tol=tol, seed=seed))
    _emit(docio.verdict_doc(verdict), args.out)
    if verdict.cert is None:
        return EXIT_NOT_CERTIFIED
    return _verdict_exit(verdict.cert.overall)


def cmd_gallery(args) -> int:
    ids = [args.id] if args.id else None
    report = gallery.run_acceptance(ids, tol=args.tol if args.tol is not None else 1e-8)
    _emit({"schema_version": docio.SCHEMA_VERSION, "command": "gallery",
           "cases": report}, args.out)
    return EXIT_OK if all(r["passed"] for r in report) else EXIT_NOT_CERTIFIED


def cmd_plot(args) -> int:
    problem, opts = _load(args.input)
    box_vals = [float(v) for v in args.box.split(",")]
    if len(box_vals) != 4:
        raise docio.DocError("--box", "need x0,x1,y0,y1")
    box = ((box_vals[0], box_vals[1]), (box_vals[2], box_vals[3]))
    info = plotting.emit_plot(problem.bset, box, args.resolution, args.out_base)
    _emit({"schema_version": docio.SCHEMA_VERSION, "command": "plot",
           "plot": {"ppm": info["ppm"], "svg": info["svg"],
                    "area_fraction": repr(info["area_fraction"]),
                    "resolution": info["resolution"]}}, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="exactsdp",
        description="Certify and solve QCQPs whose SDP relaxations are exact.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="problem JSON document")
        p.add_argument("--out", default=None, help="write the result document here")
        p.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-8)")
        p.add_argument("--seed", type=int, default=None, help="seed (default 0)")

    p = sub.add_parser("certify", help="run the exactness-condition checkers")
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("reduce", help="facially reduce the problem")
    common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="solve the SDP relaxation")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force reference solve")
    common(p)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("pipeline", help="full certify/reduce/solve/extract run")
    common(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("gallery", help="replay the worked-example fixtures")
    common(p, needs_input=False)
    p.add_argument("--id", default=None, help="run a single case id")
    p.set_defaults(func=cmd_gallery)

    p = sub.add_parser("plot", help="emit PPM raster and SVG overlay of the region")
    common(p)
    p.add_argument("--out-base", required=True, help="output path base (.ppm/.svg added)")
    p.add_argument("--resolution", type=int, default=800)
    p.add_argument("--box", default="-2.5,2.5,-2.5,2.5")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except docio.DocError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError, KeyError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
