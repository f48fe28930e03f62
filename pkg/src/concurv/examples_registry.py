"""Checks of every bundled example against its expected reference values.

Used by ``concurv examples``.  Each check returns (name, ok, detail); the
matrix checks compare entrywise at 1e-12, curvature values at 1e-9 unless
the reference value is only known to a few decimals.

One check is expected to fail: the non-commuting U(2) product is recorded
with a reference eigenvalue of -0.7660 for 4*Gamma_2 at (A, 1), but the
graphs as defined here (and checked independently from the recursive form
definitions) give +0.0429 with nonnegative curvature; the commutator cycles
of that pair run through 2-sphere edges that the form at (A, 1) cannot see.
The check stays faithful to the recorded reference value and reports the
discrepancy rather than adjusting either side.
"""

from __future__ import annotations

import numpy as np

from .curvature import INF, curvature, curvature_bundle, curvature_oracle
from .fixtures import (
    EXPECTED,
    NONCOMMUTING_GAMMA2_MIN_EIG,
    NONCOMMUTING_TOL,
    PRODUCT_G2_TRIANGLE,
    fixture_graph,
    reorder_blocks,
)
from .graphs import is_locally_balanced, local_structure
from .local_ops import add_spherical_edge
from .operators import gamma2_matrix, gamma_matrix, q_matrix
from .product import ProductSpec, cartesian_product, product_vertex
from .curvature import canonical_basis

ENTRY_TOL = 1e-12
VALUE_TOL = 1e-9


def _close(a, b, tol):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) <= tol


def _matrix_checks():
    e = EXPECTED["g1_u2"]
    loc = local_structure(fixture_graph("g1_u2"), e["vertex"])
    bundle = curvature_bundle(loc)
    yield ("g1_u2 2*Gamma", _close(gamma_matrix(loc).mat, e["two_gamma"], ENTRY_TOL), "")
    yield ("g1_u2 4*Gamma_2", _close(gamma2_matrix(loc).mat, e["four_gamma2"], ENTRY_TOL), "")
    yield ("g1_u2 4*Q", _close(q_matrix(loc).mat, e["four_q"], ENTRY_TOL), "")
    yield ("g1_u2 B0", _close(canonical_basis(loc), e["b0"], ENTRY_TOL), "")
    yield ("g1_u2 A_inf", _close(bundle.a_inf.mat, e["a_inf"], ENTRY_TOL), "")
    eigs = np.linalg.eigvalsh(bundle.a_inf.mat)
    yield ("g1_u2 A_inf eigenvalues", _close(eigs, e["a_inf_eigs"], VALUE_TOL), "")
    k, _ = curvature(loc, INF)
    yield ("g1_u2 K(inf) = 3/2", abs(k - e["k_inf"]) <= VALUE_TOL, f"K = {k:.9f}")
    k_oracle = curvature_oracle(loc, INF)
    yield ("g1_u2 oracle agreement", abs(k_oracle - k) <= 1e-8, f"gap = {abs(k_oracle - k):.2e}")

    e = EXPECTED["positive_strip"]
    loc = local_structure(fixture_graph("positive_strip"), e["vertex"])
    bundle = curvature_bundle(loc)
    yield ("strip 4*Gamma", _close(2 * gamma_matrix(loc).mat, e["four_gamma"], ENTRY_TOL), "")
    yield ("strip 4*Gamma_2", _close(gamma2_matrix(loc).mat, e["four_gamma2"], ENTRY_TOL), "")
    yield ("strip B0", _close(canonical_basis(loc), e["b0"], ENTRY_TOL), "")
    yield ("strip A_inf", _close(bundle.a_inf.mat, e["a_inf"], ENTRY_TOL), "")
    k, _ = curvature(loc, INF)
    yield ("strip K(inf) = (7-sqrt(17))/4",
           abs(k - e["k_inf"]) <= VALUE_TOL and k > 0, f"K = {k:.9f}")


def _curvature_value_checks():
    for name in ("triangle_signed", "triangle_u2", "diamond_signed", "diamond_u2",
                 "g2_signed", "g3_signed", "g4_signed", "g5_signed"):
        e = EXPECTED[name]
        loc = local_structure(fixture_graph(name), e["vertex"])
        k, _ = curvature(loc, INF)
        tol = e.get("k_tol", VALUE_TOL)
        yield (f"{name} K(inf)", abs(k - e["k_inf"]) <= tol, f"K = {k:.9f}")
        if "a_inf" in e:
            bundle = curvature_bundle(loc)
            yield (f"{name} A_inf", _close(bundle.a_inf.mat, e["a_inf"], ENTRY_TOL), "")


def _edit_checks():
    for name in ("g3_signed", "g4_signed", "g5_signed"):
        e = EXPECTED[name]["edit"]
        g = fixture_graph(name)
        sigma = np.array([[float(e["sign"])]], dtype=complex)
        g_new, edit = add_spherical_edge(g, EXPECTED[name]["vertex"], e["yi"], e["yj"],
                                         1.0, sigma)
        yield (f"{name} edited K(inf)", abs(edit.after - e["k_after"]) <= e["k_tol"],
               f"K: {edit.before:.6f} -> {edit.after:.6f}")
        if "a_inf_after" in e:
            loc = local_structure(g_new, EXPECTED[name]["vertex"])
            bundle = curvature_bundle(loc)
            yield (f"{name} edited A_inf",
                   _close(bundle.a_inf.mat, e["a_inf_after"], ENTRY_TOL), "")


def _product_checks():
    spec = ProductSpec(1.0, 1.0)
    tri = fixture_graph("triangle_signed")
    dia = fixture_graph("diamond_signed")
    prod = cartesian_product(tri, dia, spec)
    loc = local_structure(prod, product_vertex("A", "1"))
    k, _ = curvature(loc, INF)
    yield ("signed triangle x diamond K(inf) at (A,1)",
           abs(k - 0.5) <= VALUE_TOL, f"K = {k:.9f}")

    g2 = fixture_graph("g2_signed")
    prod = cartesian_product(g2, tri, spec)
    loc = local_structure(prod, product_vertex("1", "A"))
    bundle = curvature_bundle(loc)
    expected = reorder_blocks(PRODUCT_G2_TRIANGLE["a_inf"],
                              PRODUCT_G2_TRIANGLE["labels"], loc.s1, 1)
    yield ("g2 x triangle A_inf at (1,A)",
           _close(bundle.a_inf.mat, expected, ENTRY_TOL), "")
    k, _ = curvature(loc, INF)
    yield ("g2 x triangle K(inf) at (1,A)",
           abs(k - PRODUCT_G2_TRIANGLE["k_inf"]) <= PRODUCT_G2_TRIANGLE["k_tol"],
           f"K = {k:.9f}")

    tri_u2 = fixture_graph("triangle_u2")
    dia_u2 = fixture_graph("diamond_u2")
    prod = cartesian_product(tri_u2, dia_u2, spec)
    loc = local_structure(prod, product_vertex("A", "1"))
    lam = float(np.linalg.eigvalsh(gamma2_matrix(loc).mat)[0])
    k, _ = curvature(loc, INF)
    ok = abs(lam - NONCOMMUTING_GAMMA2_MIN_EIG) <= NONCOMMUTING_TOL and k < 0
    yield ("noncommuting U(2) product 4*Gamma_2 eigenvalue at (A,1)", ok,
           f"min eig = {lam:.4f} (reference {NONCOMMUTING_GAMMA2_MIN_EIG}), K = {k:.4f}")


def _balance_checks():
    for name, vertex, expected in (("g1_u2", "1", False),
                                   ("diamond_signed", "1", False),
                                   ("g5_signed", "1", True)):
        loc = local_structure(fixture_graph(name), vertex)
        yield (f"{name} locally balanced at {vertex} is {expected}",
               is_locally_balanced(loc) is expected, "")


def run_all():
    """All example checks as (name, ok, detail) triples."""
    out = []
    for gen in (_matrix_checks, _curvature_value_checks, _edit_checks,
                _product_checks, _balance_checks):
        out.extend(gen())
    return out
