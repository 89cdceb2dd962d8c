"""Command-line front end. Every subcommand prints one JSON report on stdout.

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, classify, dynamics, ebcert, graphs
from .channel import make_gamma, make_schur
from .errors import NumericalFailure, ParseError, ValidationFailure
from .matcore import PSD_TOL

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2, 64


def plain(obj):
    """Convert numpy scalars/arrays and tuples into JSON-ready builtins."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".eEn"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict
    tolerances: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> str:
        return dumps(plain({
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "tolerances": self.tolerances,
            "version": self.version,
        })) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        return cls(d["command"], d["inputs"], d["results"], d["tolerances"], d["version"])


_IMAG_UNIT = re.compile(r"(^|[+-])i$")


def parse_matrix(text: str) -> np.ndarray:
    """Dense complex matrix: ``"rows cols"`` then rows of ``a+bi`` tokens."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty matrix file", line=1)
    try:
        rows, cols = (int(x) for x in lines[0].split())
    except ValueError:
        raise ParseError("header must be 'rows cols'", line=1) from None
    if len(lines) - 1 != rows:
        raise ParseError(f"expected {rows} rows, found {len(lines) - 1}", line=len(lines))
    out = np.zeros((rows, cols), dtype=complex)
    for r, ln in enumerate(lines[1:]):
        toks = ln.split()
        if len(toks) != cols:
            raise ParseError(f"expected {cols} entries, found {len(toks)}", line=r + 2)
        for c, tok in enumerate(toks):
            try:
                out[r, c] = complex(_IMAG_UNIT.sub(r"\g<1>1i", tok).replace("i", "j"))
            except ValueError:
                raise ParseError(f"bad complex scalar {tok!r}", line=r + 2) from None
    return out


def _read_graph(path: str) -> graphs.Graph:
    with open(path, "rb") as fh:
        return graphs.parse_graph(fh.read())


def _graph_inputs(path: str, g: graphs.Graph) -> dict:
    return {"path": path, "p": g.p, "edges": [list(e) for e in g.sorted_edges()]}


def cmd_thresholds(args) -> Report:
    g = _read_graph(args.graph)
    rep = classify.thresholds(g.adjacency(), seed=args.seed, restarts=args.restarts,
                              iters=args.iters, theta_iters=args.theta_iters)
    return Report(
        "thresholds",
        {**_graph_inputs(args.graph, g), "seed": args.seed, "convention": classify.EDGE_CONVENTION},
        rep.to_dict(),
        {"psd": PSD_TOL, "restarts": args.restarts, "iters": args.iters, "theta_iters": args.theta_iters},
    )


def cmd_theta(args) -> Report:
    g = _read_graph(args.graph)
    sol = graphs.lovasz_theta_bar(g, iters=args.iters)
    return Report(
        "theta",
        _graph_inputs(args.graph, g),
        {"theta_bar": sol.value, "iterations": sol.iterations, "gap_estimate": sol.gap_estimate,
         "H": np.real(sol.H)},
        {"iters": args.iters},
    )


def cmd_certify(args) -> Report:
    g = _read_graph(args.graph)
    a = g.adjacency()
    cert = ebcert.build_certificate(a)
    ok, msg = ebcert.check_certificate(cert, a)
    n_prod = sum(isinstance(t, ebcert.ProductTerm) for t in cert.terms)
    results = {
        "verified": ok, "message": msg, "level_t": cert.level, "scale": cert.scale,
        "product_terms": n_prod, "diagonal_terms": len(cert.terms) - n_prod,
        "arithmetic": "exact Gaussian integers",
    }
    if args.emit_certificate:
        results["certificate"] = ebcert.certificate_to_dict(cert)
    return Report("certify", _graph_inputs(args.graph, g), results, {"exact": True})


def cmd_ppt2(args) -> Report:
    ga, gb = _read_graph(args.graph_a), _read_graph(args.graph_b)
    a, b = ga.adjacency(), gb.adjacency()
    t1 = classify.t_ppt_value(a) if args.t1 is None else args.t1
    t2 = classify.t_ppt_value(b) if args.t2 is None else args.t2
    res = classify.ppt2_verify(a, b, t1, t2)
    return Report(
        "ppt2",
        {"graph_a": _graph_inputs(args.graph_a, ga), "graph_b": _graph_inputs(args.graph_b, gb),
         "t1": t1, "t2": t2},
        {"composition_is_gamma": res.composition_is_gamma, "eb_certified": res.eb_certified,
         "branch": res.branch, "t_product": res.t_product, "t_eb_upper": res.t_eb_upper,
         "max_error": res.max_error, "certificate_message": res.certificate_message},
        {"psd": PSD_TOL, "compose": 1e-10},
    )


def cmd_iterate(args) -> Report:
    g = _read_graph(args.graph)
    a = g.adjacency()
    t = args.t
    if t is None:
        t = classify.t_ppt_value(a) or 1.0
    phi = dynamics.normalize_channel(make_gamma(t, a))
    trace = dynamics.convergence_report(phi, args.steps)
    return Report("iterate", {**_graph_inputs(args.graph, g), "t": t, "steps": args.steps},
                  trace.to_dict(), trace.tolerances)


def cmd_classify_schur(args) -> Report:
    with open(args.matrix, encoding="utf-8") as fh:
        pm = parse_matrix(fh.read())
    verdict = classify.schur_ppt_classify(pm, args.tol)
    ppt, lam_pt = classify.is_ppt(make_schur(pm), args.tol)
    return Report(
        "classify-schur",
        {"path": args.matrix, "shape": list(pm.shape)},
        {"verdict": verdict.value, "is_ppt": ppt, "pt_min_eig": lam_pt},
        {"psd": args.tol},
    )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pptsquared", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("thresholds", help="t_cp, t_ppt, t_eb bracket and t_pos bounds for a graph")
    sp.add_argument("graph")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restarts", type=int, default=64)
    sp.add_argument("--iters", type=int, default=500)
    sp.add_argument("--theta-iters", type=int, default=20000)
    sp.set_defaults(func=cmd_thresholds)

    sp = sub.add_parser("theta", help="Lovasz theta of the complement graph")
    sp.add_argument("graph")
    sp.add_argument("--iters", type=int, default=20000)
    sp.set_defaults(func=cmd_theta)

    sp = sub.add_parser("certify", help="exact separability certificate at t = p d")
    sp.add_argument("graph")
    sp.add_argument("--emit-certificate", action="store_true")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("ppt2", help="composition of two PPT maps of the family is EB")
    sp.add_argument("graph_a")
    sp.add_argument("graph_b")
    sp.add_argument("--t1", type=float)
    sp.add_argument("--t2", type=float)
    sp.set_defaults(func=cmd_ppt2)

    sp = sub.add_parser("iterate", help="convergence of the iterates of (1/t) gamma_t")
    sp.add_argument("graph")
    sp.add_argument("--t", type=float)
    sp.add_argument("--steps", type=int, default=25)
    sp.set_defaults(func=cmd_iterate)

    sp = sub.add_parser("classify-schur", help="NotCP / CPNotPPT / PPT for X -> P o X")
    sp.add_argument("matrix")
    sp.add_argument("--tol", type=float, default=PSD_TOL)
    sp.set_defaults(func=cmd_classify_schur)
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except (ValidationFailure, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    stdout.write(report.to_json())
    return EXIT_OK


def main(argv=None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
