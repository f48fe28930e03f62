"""Command-line interface.

Subcommands: validate, curvature, profile, product, balance, add-edge,
merge, examples.  Every command builds a deterministic report that renders
either as aligned text (default) or JSON (--json); exit code 0 on success,
1 on validation failure, 2 on a numerical cross-check failure.  The env var
CURV_TOL overrides the default comparison tolerance.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction

import numpy as np

from .errors import CrossCheckError, ValidationError
from . import examples_registry
from .curvature import (
    INF,
    curvature,
    curvature_bundle,
    curvature_oracle,
    curvature_profile,
)
from .graphs import is_locally_balanced, load_graph, local_structure
from .local_ops import add_spherical_edge, merge_s2
from .product import ProductSpec, cartesian_product, product_decomposition

FRACTION_MAX_DEN = 16
FRACTION_TOL = 1e-9


def comparison_tol(default: float = 1e-9) -> float:
    raw = os.environ.get("CURV_TOL")
    return float(raw) if raw else default


def parse_n(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    return float(text)


def _fraction_str(v: float) -> str | None:
    frac = Fraction(v).limit_denominator(FRACTION_MAX_DEN)
    if abs(float(frac) - v) > FRACTION_TOL:
        return None
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


def fmt_value(v) -> str:
    """9-decimal numbers, printed as exact small fractions when they are one."""
    if isinstance(v, complex):
        re, im = v.real, v.imag
        if abs(im) <= FRACTION_TOL:
            return fmt_value(re)
        re_s = fmt_value(re) if abs(re) > FRACTION_TOL else ""
        im_s = _fraction_str(abs(im)) or f"{abs(im):.9f}"
        sign = "-" if im < 0 else ("+" if re_s else "")
        return f"{re_s}{sign}{im_s}i"
    frac = _fraction_str(float(v))
    return frac if frac is not None else f"{float(v):.9f}"


def fmt_matrix(mat: np.ndarray, indent: str = "  ") -> str:
    cells = [[fmt_value(complex(mat[r, c])) for c in range(mat.shape[1])]
             for r in range(mat.shape[0])]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join(indent + "  ".join(c.rjust(width) for c in row) for row in cells)


def matrix_to_json(mat: np.ndarray):
    return [[[float(mat[r, c].real), float(mat[r, c].imag)]
             for c in range(mat.shape[1])] for r in range(mat.shape[0])]


def _digest(path: str) -> str:
    try:
        with open(path, "rb") as fh:
            return "sha256:" + hashlib.sha256(fh.read()).hexdigest()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc


def _load(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    return load_graph(text)


class Report:
    """Accumulates result rows and renders them as text or JSON."""

    def __init__(self, command: str, args: argparse.Namespace, inputs: list[str]):
        self.doc = {
            "command": command,
            "inputs": {p: _digest(p) for p in inputs},
            "seed": getattr(args, "seed", 0),
            "tolerance": comparison_tol(),
            "results": {},
        }
        self._lines: list[str] = []
        self._matrices: list[tuple[str, np.ndarray]] = []

    def add(self, key: str, value, text: str | None = None):
        self.doc["results"][key] = value
        self._lines.append(f"{key:28s} {text if text is not None else value}")

    def add_line(self, text: str):
        self._lines.append(text)

    def add_number(self, key: str, value: float):
        self.doc["results"][key] = float(value)
        self._lines.append(f"{key:28s} {fmt_value(float(value))}")

    def add_matrix(self, key: str, mat: np.ndarray):
        self.doc["results"][key] = matrix_to_json(mat)
        self._matrices.append((key, mat))

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(self.doc, sort_keys=True, indent=2)
        out = [f"command: {self.doc['command']}"]
        for path, digest in self.doc["inputs"].items():
            out.append(f"input:   {path} ({digest[:15]}...)")
        out.extend(self._lines)
        for key, mat in self._matrices:
            out.append(f"{key}:")
            out.append(fmt_matrix(mat))
        return "\n".join(out)


def cmd_validate(args) -> tuple[int, Report]:
    report = Report("validate", args, [args.graph])
    g = _load(args.graph)
    report.add("dimension", g.dimension)
    report.add("field", g.field)
    report.add("vertices", len(g.vertex_ids))
    report.add("edges", len(g.edge_list()))
    report.add("valid", True)
    return 0, report


def cmd_curvature(args) -> tuple[int, Report]:
    report = Report("curvature", args, [args.graph])
    g = _load(args.graph)
    n = parse_n(args.N)
    loc = local_structure(g, args.vertex)
    k, mult = curvature(loc, n)
    report.add("vertex", args.vertex)
    report.add("N", "inf" if n == INF else n)
    report.add_number("curvature", k)
    report.add("multiplicity", mult)
    code = 0
    if args.oracle:
        k_oracle = curvature_oracle(loc, n)
        report.add_number("oracle", k_oracle)
        gap = abs(k_oracle - k)
        report.add_number("oracle_gap", gap)
        tol = comparison_tol(1e-8)
        if gap > tol:
            report.add("oracle_agreement", False,
                       f"FAIL (gap {gap:.3e} > {tol:.1e})")
            code = 2
        else:
            report.add("oracle_agreement", True)
    if args.matrix:
        report.add_matrix("a_n", curvature_bundle(loc).a_n(n).mat)
    return code, report


def cmd_profile(args) -> tuple[int, Report]:
    report = Report("profile", args, [args.graph])
    g = _load(args.graph)
    grid = [parse_n(tok) for tok in args.grid.split(",") if tok.strip()]
    loc = local_structure(g, args.vertex)
    profile = curvature_profile(loc, grid)
    rows = []
    for n, k, mult in profile.samples:
        rows.append({"N": "inf" if n == INF else n, "K": k, "multiplicity": mult})
        report.add_line(
            f"  N={('inf' if n == INF else fmt_value(n)):>12s}  "
            f"K={fmt_value(k):>14s}  mult={mult}"
        )
    report.doc["results"]["profile"] = rows
    report.add("constant_from",
               None if profile.constant_from is None
               else ("inf" if profile.constant_from == INF else profile.constant_from))
    report.add("equality_from",
               None if profile.equality_from is None
               else ("inf" if profile.equality_from == INF else profile.equality_from))
    return 0, report


def cmd_product(args) -> tuple[int, Report]:
    report = Report("product", args, [args.graph, args.graph2])
    g = _load(args.graph)
    g2 = _load(args.graph2)
    spec = ProductSpec(alpha=args.alpha, beta=args.beta, lift=args.lift)
    prod = cartesian_product(g, g2, spec)
    report.add("vertices", len(prod.vertex_ids))
    report.add("edges", len(prod.edge_list()))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(prod.to_document(), fh, sort_keys=True, indent=2)
        report.add("written", args.out)
    if args.decompose:
        x, x2 = (tok.strip() for tok in args.decompose.split(","))
        n = parse_n(args.N)
        n2 = parse_n(args.N2)
        dec = product_decomposition(g, g2, spec, x, x2, n, n2)
        report.add("decompose_at", f"({x}, {x2})")
        report.add_number("residual", dec.residual)
        report.add_number("lambda_min_R", float(np.linalg.eigvalsh(dec.r)[0]) if dec.r.size else 0.0)
        report.add_number("lambda_min_J", float(np.linalg.eigvalsh(dec.j)[0]) if dec.j.size else 0.0)
        report.add("block_order", list(dec.block_order), ", ".join(dec.block_order))
        report.add_matrix("R", dec.r)
        report.add_matrix("J", dec.j)
    return 0, report


def cmd_balance(args) -> tuple[int, Report]:
    report = Report("balance", args, [args.graph])
    g = _load(args.graph)
    loc = local_structure(g, args.vertex)
    report.add("vertex", args.vertex)
    report.add("locally_balanced", is_locally_balanced(loc))
    return 0, report


def _parse_sigma_arg(text: str | None, sign: int | None):
    if text is not None:
        rows = json.loads(text)
        return np.array([[complex(c[0], c[1]) for c in row] for row in rows])
    if sign is not None:
        return np.array([[float(sign)]], dtype=complex)
    return None


def cmd_add_edge(args) -> tuple[int, Report]:
    report = Report("add-edge", args, [args.graph])
    g = _load(args.graph)
    sigma = _parse_sigma_arg(args.sigma, args.sign)
    g_new, edit = add_spherical_edge(g, args.vertex, args.yi, args.yj,
                                     w_new=args.weight, sigma_new=sigma)
    report.add("vertex", args.vertex)
    report.add("edge", f"{args.yi} -- {args.yj}")
    report.add_number("curvature_before", edit.before)
    report.add_number("curvature_after", edit.after)
    report.add("gamma2_difference_psd", edit.delta_psd)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(g_new.to_document(), fh, sort_keys=True, indent=2)
        report.add("written", args.out)
    return 0, report


def cmd_merge(args) -> tuple[int, Report]:
    report = Report("merge", args, [args.graph])
    g = _load(args.graph)
    g_new, edit = merge_s2(g, args.vertex, args.zk, args.zl)
    report.add("vertex", args.vertex)
    report.add("merged", f"{args.zk}+{args.zl}")
    report.add_number("curvature_before", edit.before)
    report.add_number("curvature_after", edit.after)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(g_new.to_document(), fh, sort_keys=True, indent=2)
        report.add("written", args.out)
    return 0, report


def cmd_examples(args) -> tuple[int, Report]:
    report = Report("examples", args, [])
    failures = 0
    for name, ok, detail in examples_registry.run_all():
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        report.doc["results"][name] = {"ok": ok, "detail": detail}
        report.add_line(f"[{status}] {name}{(': ' + detail) if detail else ''}")
    report.add("failures", failures)
    if args.export:
        os.makedirs(args.export, exist_ok=True)
        from .fixtures import fixture_document, fixture_names
        for name in fixture_names():
            path = os.path.join(args.export, f"{name}.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(fixture_document(name), fh, sort_keys=True, indent=2)
        report.add("exported", args.export)
    return (2 if failures else 0), report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="concurv",
        description="Bakry-Emery curvature of connection graphs.",
    )
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for any randomized computation (default 0)")
    parser.add_argument("--json", action="store_true", help="print the report as JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a graph document against the schema")
    p.add_argument("graph")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("curvature", help="curvature of one vertex")
    p.add_argument("graph")
    p.add_argument("--vertex", required=True)
    p.add_argument("--N", default="inf", help="dimension parameter (float or inf)")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against the bisection oracle")
    p.add_argument("--matrix", action="store_true", help="print the curvature matrix")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("profile", help="curvature function on a grid of N values")
    p.add_argument("graph")
    p.add_argument("--vertex", required=True)
    p.add_argument("--grid", required=True, help="comma-separated N values, e.g. 1,2,4,inf")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("product", help="Cartesian product of two graphs")
    p.add_argument("graph")
    p.add_argument("graph2")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--lift", choices=["same-dimension", "tensor"], default="same-dimension")
    p.add_argument("--out", help="write the product graph JSON here")
    p.add_argument("--decompose", metavar="X,X2",
                   help="report the R/J decomposition at the product vertex (X, X2)")
    p.add_argument("--N", default="inf")
    p.add_argument("--N2", default="inf")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("balance", help="local balancedness at a vertex")
    p.add_argument("graph")
    p.add_argument("--vertex", required=True)
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("add-edge", help="add a spherical edge between two neighbors")
    p.add_argument("graph")
    p.add_argument("--vertex", required=True)
    p.add_argument("--yi", required=True)
    p.add_argument("--yj", required=True)
    p.add_argument("--weight", type=float, default=1.0)
    p.add_argument("--sigma", help="connection as JSON rows of [re, im] pairs")
    p.add_argument("--sign", type=int, choices=[1, -1],
                   help="dimension-1 shorthand for the connection")
    p.add_argument("--out", help="write the edited graph JSON here")
    p.set_defaults(func=cmd_add_edge)

    p = sub.add_parser("merge", help="merge two 2-sphere vertices with no common neighbor")
    p.add_argument("graph")
    p.add_argument("--vertex", required=True)
    p.add_argument("--zk", required=True)
    p.add_argument("--zl", required=True)
    p.add_argument("--out", help="write the edited graph JSON here")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("examples", help="run every bundled example against its expected values")
    p.add_argument("--export", metavar="DIR", help="also write the example graphs as JSON files")
    p.set_defaults(func=cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, report = args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except CrossCheckError as exc:
        print(f"cross-check failure: {exc}", file=sys.stderr)
        return 2
    print(report.render(args.json))
    return code


if __name__ == "__main__":
    sys.exit(main())
