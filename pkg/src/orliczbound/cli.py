"""``orliczbound`` command line entry point.

Every file written gets a ``# {manifest}`` comment header (CSV) and a
``<file>.manifest.json`` sidecar holding the run manifest and the sha256
of the file body.  Bodies depend only on the manifest, never on the clock.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import datetime as _dt
import hashlib
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, sobolev
from .admissibility import GrowthSpec, analyze
from .degiorgi import iterate, write_trace_csv
from .harness import (
    boundedness_sweep,
    load_config,
    minimize,
    problem_from_config,
    quasi_min_check,
    write_sweep_csv,
)
from .norms import UnboundedNormError, luxemburg_norm, modular
from .sampled import GridError, load_csv, save_csv
from .young import HORIZON, YoungFunctionError, conjugate, parse_spec

USAGE_ERROR = 64
FAILURE = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# manifests

def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _body_sha256(path: Path) -> str:
    """Digest of the file without its ``#`` comment lines."""
    lines = path.read_bytes().splitlines(keepends=True)
    return hashlib.sha256(b"".join(l for l in lines if not l.startswith(b"#"))).hexdigest()


def _manifest(args, inputs: Sequence[str] = ()) -> dict:
    skip = {"func", "out"}
    arguments = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {
        "tool": "orliczbound",
        "version": __version__,
        "subcommand": args.command,
        "arguments": arguments,
        "inputs": {p: _sha256(Path(p)) for p in inputs},
        "tolerances": {"tol_quad": args.tol_quad},
        "horizon": args.horizon,
        "seed": args.seed,
    }


def _stamp(manifest: dict) -> dict:
    return {**manifest, "created": _dt.datetime.now(_dt.timezone.utc).isoformat()}


def _write_sidecar(path: Path, manifest: dict):
    doc = {**_stamp(manifest), "output": {"path": path.name, "body_sha256": _body_sha256(path)}}
    side = path.with_name(path.name + ".manifest.json")
    side.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return side


def _prepend_header(path: Path, manifest: dict):
    body = path.read_text()
    path.write_text("# " + json.dumps(_stamp(manifest), sort_keys=True) + "\n" + body)


def _write_csv(path: Path, header: Sequence[str], rows, manifest: dict):
    with path.open("w") as fh:
        fh.write("# " + json.dumps(_stamp(manifest), sort_keys=True) + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    _write_sidecar(path, manifest)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_json(path: Path, doc: dict, manifest: dict):
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _write_sidecar(path, manifest)


def _spec(text: str, field: str):
    try:
        return parse_spec(text)
    except YoungFunctionError as exc:
        raise YoungFunctionError(str(exc), field) from None


def _floats(text: str):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str):
    return [int(x) for x in text.split(",") if x.strip()]


def _existing(path: str) -> str:
    if not Path(path).is_file():
        raise UsageError(f"no such file: {path}")
    return path


# ---------------------------------------------------------------------------
# subcommands

def cmd_analyze(args) -> int:
    A, B = _spec(args.A, "A"), _spec(args.B, "B")
    E = _spec(args.E, "E") if args.E else None
    verdict = analyze(GrowthSpec(A, B, args.n, E, args.L, args.t0, args.Q), args.horizon)
    doc = verdict.to_dict()
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(verdict.summary())
    if args.out:
        _write_json(Path(args.out), doc, _manifest(args))
    return verdict.exit_code


def cmd_conjugate(args) -> int:
    A = _spec(args.A, "A")
    Ac = conjugate(A)
    t = np.logspace(math.log10(args.t_min), math.log10(args.t_max), args.points)
    vals = Ac(t)
    rows = zip(t, vals)
    if args.out:
        _write_csv(Path(args.out), ["t", "conjugate"], rows, _manifest(args))
    else:
        for r in rows:
            print(",".join(_fmt(v) for v in r))
    return 0


def cmd_sobolev(args) -> int:
    A = _spec(args.A, "A")
    dim = args.n - 1 if args.lower else args.n
    if dim < 2:
        raise YoungFunctionError("the conjugate dimension must be >= 2", "n")
    splice = None
    if args.regularize:
        A = sobolev.regularize_near_zero(A, dim)
        splice = A.t1
    sc = sobolev.sobolev_conjugate(A, dim)
    t = np.logspace(math.log10(args.t_min), math.log10(args.t_max), args.points)
    rows = zip(t, sc(t))
    if args.out:
        man = {**_manifest(args), "dim": dim, "splice_t1": splice,
               "table_s_max": sc.result.meta.get("s_max")}
        _write_csv(Path(args.out), ["t", f"A_{dim}"], rows, man)
    else:
        for r in rows:
            print(",".join(_fmt(v) for v in r))
    return 0


def cmd_norm(args) -> int:
    A = _spec(args.A, "A")
    u = load_csv(_existing(args.input))
    lam, m = luxemburg_norm(A, u, args.gradient, return_modular=True)
    doc = {"norm": lam, "modular_at_norm": m, "modular": modular(A, u, args.gradient),
           "gradient": args.gradient}
    print(json.dumps(doc, sort_keys=True))
    if args.out:
        _write_json(Path(args.out), doc, _manifest(args, [args.input]))
    return 0


def cmd_iterate(args) -> int:
    tr = iterate(args.J0, args.n, args.q, args.L, args.c2, args.K, args.steps, args.c_B)
    print(f"verdict: {tr.verdict}  tau={tr.tau:.6g}  eps0={tr.eps0:.6g}  "
          f"eps0_uncorrected={tr.eps0_uncorrected:.6g}" + (f"  witness={tr.witness}" if tr.witness else ""))
    if args.out:
        path = Path(args.out)
        write_trace_csv(tr, path)
        man = _manifest(args)
        _prepend_header(path, man)
        _write_sidecar(path, man)
    return 0 if tr.verdict == "decayed" else FAILURE


def cmd_minimize(args) -> int:
    cfg = load_config(_existing(args.config))
    P, solver = problem_from_config(cfg)
    res = minimize(P, float(solver["tol"]), int(solver["max_iters"]))
    qm = quasi_min_check(P, res.values, seed=args.seed)
    envelope = P.envelope_check(res.values)
    summary = {"energy": res.energy, "iterations": res.iterations, "converged": res.converged,
               "quasi_min_violations": qm["violations"], "envelope_L": envelope}
    print(json.dumps(summary, sort_keys=True))
    if args.out:
        path = Path(args.out)
        save_csv(res.u, path)
        man = {**_manifest(args, [args.config]), "summary": summary}
        _prepend_header(path, man)
        _write_sidecar(path, man)
        trace = path.with_name(path.stem + "_energy.csv")
        _write_csv(trace, ["iteration", "energy"], enumerate(res.energy_trace), man)
    return 0 if res.converged and qm["violations"] == 0 else FAILURE


def cmd_sweep(args) -> int:
    cells = [(p, q) for p in _floats(args.p) for q in _floats(args.q)]
    refinements = _ints(args.refinements)

    def run(pq):
        return boundedness_sweep(args.n, [pq[0]], [pq[1]], refinements, args.base_cells,
                                 tol=args.tol, max_iters=args.max_iters)

    if args.threads > 1:
        with concurrent.futures.ThreadPoolExecutor(args.threads) as pool:
            parts = list(pool.map(run, cells))
    else:
        parts = [run(c) for c in cells]
    rows = [r for part in parts for r in part]
    if args.out:
        path = Path(args.out)
        man = _manifest(args)
        write_sweep_csv(rows, path, _stamp(man))
        _write_sidecar(path, man)
    for r in rows:
        print(",".join(_fmt(r[k]) for k in ("p", "q", "refinement", "interior_sup", "energy",
                                              "converged", "verdict")))
    return 0 if all(r["converged"] for r in rows) else FAILURE


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--tol-quad", type=float, default=sobolev.QUAD_RTOL,
                   help="relative tolerance of the adaptive quadrature")
    g.add_argument("--horizon", type=float, default=HORIZON, help="largest probe point")
    g.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    g.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    g.add_argument("--out", default=None, help="output file")

    p = _Parser(prog="orliczbound", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="admissibility verdict")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--A", required=True, help="spec such as power:1.5 or JSON")
    a.add_argument("--B", required=True)
    a.add_argument("--E", default=None)
    a.add_argument("--L", type=float, default=1.0)
    a.add_argument("--t0", type=float, default=0.0)
    a.add_argument("--Q", type=float, default=1.0)
    a.add_argument("--json", action="store_true", help="print the full verdict document")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("conjugate", parents=[common], help="tabulate the Young conjugate")
    c.add_argument("--A", required=True)
    c.add_argument("--t-min", type=float, default=1e-3)
    c.add_argument("--t-max", type=float, default=1e3)
    c.add_argument("--points", type=int, default=200)
    c.set_defaults(func=cmd_conjugate)

    s = sub.add_parser("sobolev-conjugate", parents=[common], help="tabulate A_n")
    s.add_argument("--A", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--lower", action="store_true", help="tabulate A_(n-1) instead")
    s.add_argument("--regularize", action="store_true",
                   help="replace A by its chord below 1 first")
    s.add_argument("--t-min", type=float, default=1e-2)
    s.add_argument("--t-max", type=float, default=1e4)
    s.add_argument("--points", type=int, default=200)
    s.set_defaults(func=cmd_sobolev)

    nrm = sub.add_parser("norm", parents=[common], help="Luxemburg norm of a sampled field")
    nrm.add_argument("--A", required=True)
    nrm.add_argument("--input", required=True, help="field CSV with its grid sidecar")
    nrm.add_argument("--gradient", action="store_true", help="norm of |grad u|")
    nrm.set_defaults(func=cmd_norm)

    it = sub.add_parser("iterate", parents=[common], help="worst-case decay recurrence")
    it.add_argument("--J0", type=float, required=True)
    it.add_argument("--n", type=int, required=True)
    it.add_argument("--q", type=float, required=True)
    it.add_argument("--L", type=float, default=1.0)
    it.add_argument("--c2", type=float, default=1.0)
    it.add_argument("--c-B", dest="c_B", type=float, default=1.0)
    it.add_argument("--K", type=float, default=1.0)
    it.add_argument("--steps", type=int, default=60)
    it.set_defaults(func=cmd_iterate)

    m = sub.add_parser("minimize", parents=[common], help="solve a configured problem")
    m.add_argument("--config", required=True, help="JSON problem document")
    m.set_defaults(func=cmd_minimize)

    sw = sub.add_parser("sweep", parents=[common], help="interior sup over (p, q) grids")
    sw.add_argument("--n", type=int, default=2)
    sw.add_argument("--p", required=True, help="comma-separated exponents")
    sw.add_argument("--q", required=True, help="comma-separated exponents")
    sw.add_argument("--refinements", default="0,1,2")
    sw.add_argument("--base-cells", type=int, default=8)
    sw.add_argument("--tol", type=float, default=1e-10)
    sw.add_argument("--max-iters", type=int, default=5000)
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        sobolev.QUAD_RTOL = args.tol_quad
        return int(args.func(args))
    except UsageError as exc:
        print(f"orliczbound: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except YoungFunctionError as exc:
        print(f"orliczbound: invalid input: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (GridError, UnboundedNormError, ValueError, OSError) as exc:
        print(f"orliczbound: {type(exc).__name__}: {exc}", file=sys.stderr)
        return FAILURE


if __name__ == "__main__":
    sys.exit(main())
