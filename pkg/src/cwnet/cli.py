"""Command-line entry point ``cwnet``.

Exit codes: 0 on success, 1 on a module error (a JSON ``{"error": ...}``
object is written to stdout), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .balance import classify_with, extract_partition
from .clustering import (TwoLevelPartition, estimate_k, general_ratio_cut, nmi,
                         spectral_cluster, spectral_embedding)
from .csbm import CsbmParams, generate
from .errors import CwnetError, InvalidParameter
from .graph import (hermitian_similar_transition, laplacian, magnitude_graph,
                    transition_matrix)
from .io import (load_directed_edge_list, load_edge_list, load_initial_state,
                 load_labels, matrix_to_json, save_directed_edge_list,
                 save_edge_list)
from .linalg import eigvalsh
from .magnetic import (effective_cycles, gen_directed_cycle, gen_nested_cycles,
                       gen_tree_of_cycles, magnetic_spectrum, roles, sweep,
                       symmetric_normalized_magnetic_laplacian, theta_two_set,
                       theta_zero_set)
from .randwalk import (complex_vector_to_json, initial_state, simulate_to_limit,
                       uniform_state, walk_step)
from .repro import FIGURES, SWEEP_HEADER, repro, write_csv

_THETA_RE = re.compile(r"^\s*(\d*\.?\d*)\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_theta(text: str) -> float:
    """``2pi/K``, ``pi``, ``pi/3``, ``4pi/3`` or decimal radians."""
    m = _THETA_RE.match(text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        if den == 0:
            raise argparse.ArgumentTypeError(f"zero denominator in {text!r}")
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


class _Run:
    """Collects manifest data while a command runs."""

    def __init__(self, argv):
        self.argv = list(argv)
        self.inputs: dict = {}
        self.seeds: list = []
        self.start = time.perf_counter()

    def read(self, path) -> str:
        p = str(path)
        self.inputs[p] = hashlib.sha256(Path(p).read_bytes()).hexdigest()
        return p

    def manifest(self) -> dict:
        return {
            "command": ["cwnet"] + self.argv,
            "seeds": self.seeds,
            "inputs": self.inputs,
            "version": __version__,
            "backend": BACKEND,
            "duration_s": time.perf_counter() - self.start,
        }


def _emit_json(args, run: _Run, payload: dict) -> None:
    payload = dict(payload)
    payload["manifest"] = run.manifest()
    text = json.dumps(payload, indent=2, sort_keys=False)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _emit_csv(args, run: _Run, header, rows) -> None:
    if getattr(args, "out", None):
        write_csv(args.out, header, rows)
        side = Path(str(args.out) + ".manifest.json")
        side.write_text(json.dumps(run.manifest(), indent=2) + "\n")
    else:
        write_csv(sys.stdout, header, rows)


# ---------------------------------------------------------------- commands

def cmd_classify(args, run):
    g = load_edge_list(run.read(args.file))
    rep = classify_with(g, args.method, args.tol)
    _emit_json(args, run, rep.to_dict())


def cmd_partition(args, run):
    g = load_edge_list(run.read(args.file))
    part = extract_partition(g, args.mode, 1e-9 if args.tol is None else args.tol)
    _emit_json(args, run, part.to_dict())


def cmd_walk(args, run):
    g = load_edge_list(run.read(args.file))
    if args.x0 == "uniform":
        st = uniform_state(g.n)
    else:
        st = initial_state(load_initial_state(run.read(args.x0), g.n))
    tol = 1e-8 if args.tol is None else args.tol
    x = st
    norms = [float(np.max(np.abs(x.densities)))]
    for _ in range(args.steps):
        x = walk_step(g, x)
        norms.append(float(np.max(np.abs(x.densities))))
    rep = simulate_to_limit(g, st.densities, tol, args.max_t)
    _emit_json(args, run, {
        "n": g.n,
        "steps": args.steps,
        "initial_state": complex_vector_to_json(st.densities),
        "final_state": complex_vector_to_json(x.densities),
        "sup_norm_history": norms,
        "steady_state": rep.to_dict(),
    })


def cmd_cluster(args, run):
    g = load_edge_list(run.read(args.file), allow_disconnected=True)
    l = args.l if args.l else [1] * args.k
    run.seeds.append(args.seed)
    part = spectral_cluster(g, args.k, l, seed=args.seed, levelone_magnitude=args.levelone_magnitude)
    vals, _ = spectral_embedding(g, args.k)
    cut = general_ratio_cut(g, part)
    _emit_json(args, run, {
        "partition": part.to_dict(),
        "cut": cut.to_dict(),
        "eigenvalues": [float(v) for v in vals],
        "estimated_k": estimate_k(vals, 1e-6 if args.tol is None else args.tol),
    })


def cmd_cut(args, run):
    g = load_edge_list(run.read(args.file), allow_disconnected=True)
    data = json.loads(Path(run.read(args.partition)).read_text())
    if "partition" in data:
        data = data["partition"]
    part = TwoLevelPartition.from_dict(data)
    _emit_json(args, run, general_ratio_cut(g, part).to_dict())


def cmd_nmi(args, run):
    a = load_labels(run.read(args.labels_a))
    b = load_labels(run.read(args.labels_b))
    _emit_json(args, run, {"nmi": nmi(a, b)})


def cmd_csbm(args, run):
    sizes = args.sizes
    l = args.l if args.l else [1] * len(sizes)
    run.seeds.append(args.seed)
    lg = generate(CsbmParams(tuple(sizes), args.pin, args.pout, args.eta, tuple(l), args.seed))
    payload = {"n": lg.graph.n, "edges": lg.graph.edge_count, "attempts": lg.attempts,
               "truth": lg.truth.to_dict()}
    if args.out:
        save_edge_list(lg.graph, args.out)
        payload["graph_file"] = str(args.out)
    if args.truth:
        Path(args.truth).write_text(json.dumps(lg.truth.to_dict(), indent=2) + "\n")
        payload["truth_file"] = str(args.truth)
    if args.out:
        _emit_json(argparse.Namespace(out=None), run, payload)
    else:
        sys.stdout.write(f"{lg.graph.n}\n" + "".join(
            f"{i} {j} {r!r} {phi!r}\n" for i, j, r, phi in lg.graph.edges()))


def cmd_magnetic_sweep(args, run):
    h = load_directed_edge_list(run.read(args.file))
    res = sweep(h, args.rmax, args.threads)
    if args.format == "json":
        _emit_json(args, run, {
            "r_values": [int(r) for r in res.r_values],
            "lambda_min": [float(v) for v in res.lambda_min],
            "lambda_max": [float(v) for v in res.lambda_max],
            "predicted_zero_r": list(res.predicted_zero_r),
            "predicted_two_r": list(res.predicted_two_r),
            "divisor_two_r": list(res.divisor_two_r),
            "cycles": res.cycles.to_dict(),
        })
    else:
        _emit_csv(args, run, SWEEP_HEADER, list(res.rows()))


def cmd_magnetic_roles(args, run):
    h = load_directed_edge_list(run.read(args.file))
    run.seeds.append(args.seed)
    res = roles(h, args.theta, args.roles, args.seed, args.which)
    payload = res.to_dict()
    payload["theta"] = args.theta
    _emit_json(args, run, payload)


def cmd_magnetic_cycles(args, run):
    h = load_directed_edge_list(run.read(args.file))
    payload = effective_cycles(h).to_dict()
    payload["theta_zero"] = theta_zero_set(h).to_dict()
    payload["theta_two"] = theta_two_set(h).to_dict()
    _emit_json(args, run, payload)


def cmd_gen(args, run):
    if args.kind == "dcycle":
        if len(args.params) != 1:
            raise InvalidParameter("dcycle takes one parameter: n")
        h = gen_directed_cycle(int(args.params[0]))
    elif args.kind == "treecycles":
        if len(args.params) != 1:
            raise InvalidParameter("treecycles takes one parameter: comma-separated lengths")
        h = gen_tree_of_cycles(_int_list(args.params[0]))
    else:
        if len(args.params) != 3:
            raise InvalidParameter("nestedcycles takes three parameters: n chord_from chord_to")
        n, a, b = (int(v) for v in args.params)
        h = gen_nested_cycles(n, a, b)
    if args.out:
        save_directed_edge_list(h, args.out)
        side = Path(str(args.out) + ".manifest.json")
        side.write_text(json.dumps(run.manifest(), indent=2) + "\n")
    else:
        sys.stdout.write(f"{h.n}\n" + "".join(f"{i} {j} {w!r}\n" for i, j, w in h.edges()))


def cmd_spectrum(args, run):
    if args.operator == "magnetic":
        h = load_directed_edge_list(run.read(args.file))
        theta = 0.0 if args.theta is None else args.theta
        m = symmetric_normalized_magnetic_laplacian(h, theta)
        vals = magnetic_spectrum(h, theta)[::-1]
    else:
        g = load_edge_list(run.read(args.file), allow_disconnected=True)
        m = {
            "laplacian": laplacian,
            "transition": hermitian_similar_transition,
            "weights": lambda g_: g_.weights,
            "magnitude": lambda g_: magnitude_graph(g_).weights,
        }[args.operator](g)
        vals = eigvalsh(m)
    payload = {"operator": args.operator, "eigenvalues": [float(v) for v in vals]}
    if args.matrix:
        if args.operator == "transition":
            m = transition_matrix(g)
        payload["matrix"] = matrix_to_json(m)
    _emit_json(args, run, payload)


def cmd_repro(args, run):
    run.seeds.append(args.seed)
    paths = repro(args.figure, args.outdir, samples=args.samples, base_seed=args.seed,
                  threads=args.threads, quick=args.quick, svg=args.svg, r_max=args.rmax)
    manifest = run.manifest()
    for p in paths:
        if p.suffix == ".csv":
            Path(str(p) + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    _emit_json(argparse.Namespace(out=None), run, {"figure": args.figure,
                                                  "files": [str(p) for p in paths]})


# ---------------------------------------------------------------- parser

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--tol", type=float, default=None, help="tolerance override")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps and grids")
    p.add_argument("--format", choices=("json", "csv"), default=None, help="output format")
    p.add_argument("-o", "--out", default=None, help="output file (default stdout)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="cwnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cwnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="balance class of a complex graph")
    p.add_argument("file")
    p.add_argument("--method", choices=("tree", "spectral", "brute"), default="tree")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("partition", parents=[common], help="balanced/antibalanced node partition")
    p.add_argument("file")
    p.add_argument("--mode", choices=("balanced", "antibalanced"), required=True)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("walk", parents=[common], help="simulate the complex random walk")
    p.add_argument("file")
    p.add_argument("--x0", required=True, help="initial-state file ('i re im' lines) or 'uniform'")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--max-t", type=int, default=None, help="iteration cap for limit detection")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("cluster", parents=[common], help="two-level spectral clustering")
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=_int_list, default=None, help="subcommunity counts, e.g. 2,3")
    p.add_argument("--levelone-magnitude", action="store_true",
                   help="cluster level one on the phase-free graph")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("cut", parents=[common], help="general ratio cut of a partition")
    p.add_argument("file")
    p.add_argument("--partition", required=True, help="partition JSON (as written by cluster/csbm)")
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("nmi", parents=[common], help="NMI between two labelings")
    p.add_argument("labels_a")
    p.add_argument("labels_b")
    p.set_defaults(func=cmd_nmi)

    p = sub.add_parser("csbm", parents=[common], help="sample a CSBM benchmark graph")
    p.add_argument("--sizes", type=_int_list, required=True)
    p.add_argument("--pin", type=float, required=True)
    p.add_argument("--pout", type=float, default=0.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--l", type=_int_list, default=None)
    p.add_argument("-t", "--truth", default=None, help="write the planted partition JSON here")
    p.set_defaults(func=cmd_csbm)

    mag = sub.add_parser("magnetic", help="magnetic Laplacian tools")
    msub = mag.add_subparsers(dest="magnetic_command", required=True)
    p = msub.add_parser("sweep", parents=[common], help="extreme eigenvalues over r = 2pi/theta")
    p.add_argument("file")
    p.add_argument("--rmax", type=int, default=100)
    p.set_defaults(func=cmd_magnetic_sweep)
    p = msub.add_parser("roles", parents=[common], help="role extraction from an extreme eigenvector")
    p.add_argument("file")
    p.add_argument("--theta", type=parse_theta, required=True, help="angle, e.g. 2pi/3 or 2.0944")
    p.add_argument("--roles", type=int, default=None)
    p.add_argument("--which", choices=("smallest", "largest"), default="smallest")
    p.set_defaults(func=cmd_magnetic_roles)
    p = msub.add_parser("cycles", parents=[common], help="effective cycle lengths and theta sets")
    p.add_argument("file")
    p.set_defaults(func=cmd_magnetic_cycles)

    p = sub.add_parser("gen", parents=[common], help="generate directed test graphs")
    p.add_argument("kind", choices=("dcycle", "treecycles", "nestedcycles"))
    p.add_argument("params", nargs="+")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues of a graph operator")
    p.add_argument("file")
    p.add_argument("--operator", choices=("laplacian", "transition", "weights", "magnitude", "magnetic"),
                   default="laplacian")
    p.add_argument("--theta", type=parse_theta, default=None, help="angle for --operator magnetic")
    p.add_argument("--matrix", action="store_true", help="include the matrix as {re, im}")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("repro", parents=[common], help="rerun a figure's experiment")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--outdir", default="repro_out")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--rmax", type=int, default=100)
    p.add_argument("--quick", action="store_true", help="smaller parameter grids")
    p.add_argument("--svg", action="store_true", help="also render SVG curves")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    run = _Run(argv)
    try:
        args.func(args, run)
    except CwnetError as exc:
        sys.stdout.write(json.dumps({"error": exc.to_dict(), "manifest": run.manifest()}, indent=2) + "\n")
        return 1
    except OSError as exc:
        err = {"code": "IOError", "message": str(exc)}
        sys.stdout.write(json.dumps({"error": err, "manifest": run.manifest()}, indent=2) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
