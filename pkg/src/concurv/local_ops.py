"""Curvature-monotone edits of the local structure around a vertex:
adding a spherical edge between two 1-sphere neighbors, and merging two
2-sphere vertices without common neighbors.

Adding a spherical edge with the balanced default connection
``sigma_yi_x sigma_x_yj`` never decreases the curvature when the center is
S1-in regular (equal inward rates p_yx); any other connection can move the
curvature either way.  Merging never decreases it, balanced or not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CrossCheckError, ValidationError
from .curvature import INF, curvature, curvature_function
from .graphs import ConnectionGraph, local_structure
from .hermitian import is_psd
from .operators import gamma2_matrix

MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class EditReport:
    """Curvature before/after one edit at the same vertex and N = inf.

    ``delta_psd`` reports whether the 4*Gamma_2 difference matrix is PSD;
    it is None when the edit has no fixed-size difference matrix (merging).
    """

    before: float
    after: float
    delta_psd: bool | None


def s1_in_regular(g: ConnectionGraph, x: str, tol: float = 1e-12) -> bool:
    """True iff the inward rate p_yx is the same for every neighbor y of x."""
    rates = [g.p(y, x) for y in g.neighbors(x)]
    return max(rates) - min(rates) <= tol * max(1.0, max(rates))


def add_spherical_edge(g: ConnectionGraph, x: str, yi: str, yj: str,
                       w_new: float = 1.0,
                       sigma_new: np.ndarray | None = None):
    """Add an edge between two non-adjacent neighbors of x.

    With ``sigma_new`` omitted, the connection defaults to the balanced
    choice ``sigma_yi_x sigma_x_yj`` closing a trivial triangle.  The report
    carries the curvature at N = inf before and after, and whether the
    4*Gamma_2 difference matrix is PSD.  Under the balanced default plus
    S1-in regularity the curvature cannot decrease (checked; a decrease
    raises :class:`CrossCheckError`).
    """
    x, yi, yj = str(x), str(yi), str(yj)
    s1 = set(g.neighbors(x))
    if yi not in s1 or yj not in s1 or yi == yj:
        raise ValidationError(f"{yi!r} and {yj!r} must be two distinct neighbors of {x!r}")
    if g.has_edge(yi, yj):
        raise ValidationError(f"{yi!r} and {yj!r} are already adjacent")
    if not w_new > 0:
        raise ValidationError(f"new edge weight must be positive, got {w_new}")

    balanced_default = sigma_new is None
    if balanced_default:
        sigma_new = g.sigma(yi, x) @ g.sigma(x, yj)

    edges = g.edge_list() + [(yi, yj, float(w_new), sigma_new)]
    field = g.field
    if field == "real" and float(np.max(np.abs(np.asarray(sigma_new).imag))) > 1e-12:
        field = "complex"
    g_new = ConnectionGraph(g.dimension, field,
                            [(v, g.measure(v)) for v in g.vertex_ids], edges)

    before_loc = local_structure(g, x)
    after_loc = local_structure(g_new, x)
    before, _ = curvature(before_loc, INF)
    after, _ = curvature(after_loc, INF)

    # Same 2-ball vertex set before and after, so the difference is congruent
    # to its switched-gauge form and PSD-ness is basis independent.
    diff = gamma2_matrix(after_loc).mat - gamma2_matrix(before_loc).mat
    delta_psd = is_psd(diff)

    if balanced_default and s1_in_regular(g, x):
        if after < before - MONOTONE_SLACK:
            raise CrossCheckError(
                f"balanced spherical edge decreased curvature: {before:.12g} -> {after:.12g}"
            )
        if not delta_psd:
            raise CrossCheckError(
                "balanced spherical edge produced a non-PSD Gamma_2 difference"
            )
    return g_new, EditReport(before=before, after=after, delta_psd=delta_psd)


def merge_s2(g: ConnectionGraph, x: str, zk: str, zl: str,
             check_grid=(1.0, INF)):
    """Merge two 2-sphere vertices of x that share no neighbor.

    The merged vertex is named "zk+zl" and inherits the summed measure, the
    union of incident edges (weights add where both existed, which cannot
    happen here by the no-common-neighbor requirement) and the connection of
    whichever original edge each neighbor had.  Any edge between the two
    merged vertices is dropped; it lies outside the incomplete 2-ball.
    Curvature at x cannot decrease, for any N; this is checked on
    ``check_grid`` and a violation raises :class:`CrossCheckError`.
    """
    x, zk, zl = str(x), str(zk), str(zl)
    loc = local_structure(g, x)
    s2 = set(loc.s2)
    if zk not in s2 or zl not in s2 or zk == zl:
        raise ValidationError(f"{zk!r} and {zl!r} must be two distinct 2-sphere vertices of {x!r}")
    common = set(g.neighbors(zk)) & set(g.neighbors(zl))
    if common:
        raise ValidationError(
            f"{zk!r} and {zl!r} share neighbors {sorted(common)}; merging is undefined"
        )
    merged = f"{zk}+{zl}"
    if merged in g:
        raise ValidationError(f"merged vertex id {merged!r} already exists")

    vertices = [(v, g.measure(v)) for v in g.vertex_ids if v not in (zk, zl)]
    vertices.append((merged, g.measure(zk) + g.measure(zl)))
    edges = []
    for u, v, w, s in g.edge_list():
        if {u, v} == {zk, zl}:
            continue
        if u in (zk, zl):
            edges.append((merged, v, w, s))
        elif v in (zk, zl):
            edges.append((u, merged, w, s))
        else:
            edges.append((u, v, w, s))
    g_new = ConnectionGraph(g.dimension, g.field, vertices, edges)

    f_before = curvature_function(local_structure(g, x))
    f_after = curvature_function(local_structure(g_new, x))
    for n in check_grid:
        kb, _ = f_before(n)
        ka, _ = f_after(n)
        if ka < kb - MONOTONE_SLACK:
            raise CrossCheckError(
                f"merging decreased curvature at N={n}: {kb:.12g} -> {ka:.12g}"
            )
    before, _ = f_before(INF)
    after, _ = f_after(INF)
    return g_new, EditReport(before=before, after=after, delta_psd=None)
