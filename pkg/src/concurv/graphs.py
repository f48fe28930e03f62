"""Connection graphs: weighted graphs whose oriented edges carry unitary
matrices, plus local-structure extraction, switching and balance checks.

A connection assigns a d x d unitary sigma_uv to each oriented edge with
sigma_vu = sigma_uv^{-1} = conj(sigma_uv)^T; only one orientation is stored,
the reverse is always derived.  Graphs are immutable after construction and
all operations here are pure functions returning new objects.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

import numpy as np

from .errors import ValidationError

UNITARY_TOL = 1e-9      # reject connections further than this from unitary
REPROJECT_TOL = 1e-12   # deviations in (REPROJECT_TOL, UNITARY_TOL] get polar-projected
BALANCE_TOL = 1e-9      # non-tree connections must match I_d this closely


def _polar_unitary(a: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(a)
    return u @ vh


def _check_unitary(sigma: np.ndarray, d: int, where: str) -> np.ndarray:
    """Validate (and possibly re-project) one connection matrix."""
    if sigma.shape != (d, d):
        raise ValidationError(f"{where}: sigma has shape {sigma.shape}, expected ({d}, {d})")
    dev = float(np.max(np.abs(sigma @ sigma.conj().T - np.eye(d))))
    if dev > UNITARY_TOL:
        raise ValidationError(
            f"{where}: sigma is not unitary, |sigma sigma^H - I| = {dev:.3e} > {UNITARY_TOL:.1e}"
        )
    if dev > REPROJECT_TOL:
        sigma = _polar_unitary(sigma)
    return sigma


class ConnectionGraph:
    """Finite weighted graph with vertex measures and unitary edge connections.

    Parameters
    ----------
    dimension : int
        Dimension d of the connection matrices.
    field : {"real", "complex"}
        "real" restricts connections to real orthogonal matrices; computations
        still run in complex arithmetic either way.
    vertices : iterable of (id, measure)
        Vertex ids are strings; measures are strictly positive.
    edges : iterable of (u, v, weight, sigma)
        One entry per undirected edge, giving the connection for the stored
        orientation u -> v.  ``sigma=None`` means the identity.
    """

    __slots__ = ("dimension", "field", "_mu", "_adj", "_sigma", "_edges")

    def __init__(self, dimension: int, field: str,
                 vertices: Iterable[tuple[str, float]],
                 edges: Iterable[tuple[str, str, float, np.ndarray | None]]):
        d = int(dimension)
        if d < 1:
            raise ValidationError(f"dimension must be a positive integer, got {dimension}")
        if field not in ("real", "complex"):
            raise ValidationError(f"field must be 'real' or 'complex', got {field!r}")
        mu: dict[str, float] = {}
        for vid, m in vertices:
            vid = str(vid)
            if vid in mu:
                raise ValidationError(f"duplicate vertex id {vid!r}")
            m = float(m)
            if not m > 0:
                raise ValidationError(f"vertex {vid!r}: measure must be positive, got {m}")
            mu[vid] = m

        adj: dict[str, dict[str, float]] = {v: {} for v in mu}
        sig: dict[tuple[str, str], np.ndarray] = {}
        stored: list[tuple[str, str, float]] = []
        for entry in edges:
            u, v, w, sigma = entry
            u, v = str(u), str(v)
            if u not in mu or v not in mu:
                raise ValidationError(f"edge ({u!r}, {v!r}): unknown endpoint")
            if u == v:
                raise ValidationError(f"self-loop at vertex {u!r} is not allowed")
            if v in adj[u]:
                raise ValidationError(f"duplicate edge ({u!r}, {v!r})")
            w = float(w)
            if not w > 0:
                raise ValidationError(f"edge ({u!r}, {v!r}): weight must be positive, got {w}")
            if sigma is None:
                s = np.eye(d, dtype=complex)
            else:
                s = np.asarray(sigma, dtype=complex)
                s = _check_unitary(s, d, f"edge ({u!r}, {v!r})")
                if field == "real" and float(np.max(np.abs(s.imag))) > UNITARY_TOL:
                    raise ValidationError(
                        f"edge ({u!r}, {v!r}): field='real' but sigma has imaginary entries"
                    )
            s = np.ascontiguousarray(s)
            s.setflags(write=False)
            rev = s.conj().T.copy()
            rev.setflags(write=False)
            adj[u][v] = w
            adj[v][u] = w
            sig[(u, v)] = s
            sig[(v, u)] = rev
            stored.append((u, v, w))

        self.dimension = d
        self.field = field
        self._mu = mu
        self._adj = adj
        self._sigma = sig
        self._edges = tuple(stored)

    # -- accessors ---------------------------------------------------------

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._mu))

    def __contains__(self, v: str) -> bool:
        return v in self._mu

    def measure(self, v: str) -> float:
        return self._mu[v]

    def neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(self._adj[v]))

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._adj.get(u, ())

    def weight(self, u: str, v: str) -> float:
        return self._adj[u][v]

    def sigma(self, u: str, v: str) -> np.ndarray:
        return self._sigma[(u, v)]

    def degree(self, v: str) -> float:
        return sum(self._adj[v].values())

    def p(self, u: str, v: str) -> float:
        """Transition rate w_uv / mu_u for the oriented edge u -> v."""
        return self._adj[u][v] / self._mu[u]

    def edge_list(self) -> list[tuple[str, str, float, np.ndarray]]:
        """Stored-orientation edges as (u, v, weight, sigma)."""
        return [(u, v, w, self._sigma[(u, v)]) for (u, v, w) in self._edges]

    def to_document(self) -> dict:
        """JSON-serializable document (see the graph schema in the README)."""
        edges = []
        for u, v, w, s in self.edge_list():
            entry: dict = {"u": u, "v": v, "weight": w}
            if not np.allclose(s, np.eye(self.dimension), atol=0.0):
                entry["sigma"] = [[[e.real, e.imag] for e in row] for row in np.asarray(s)]
            edges.append(entry)
        return {
            "dimension": self.dimension,
            "field": self.field,
            "vertices": [{"id": v, "measure": self._mu[v]} for v in self.vertex_ids],
            "edges": edges,
        }


def _parse_sigma(entry: dict, d: int, where: str) -> np.ndarray | None:
    if "sign" in entry:
        if d != 1:
            raise ValidationError(f"{where}: 'sign' shorthand is only valid for dimension 1")
        sign = entry["sign"]
        if sign not in (1, -1):
            raise ValidationError(f"{where}: 'sign' must be 1 or -1, got {sign!r}")
        return np.array([[float(sign)]], dtype=complex)
    if "sigma" not in entry:
        return None
    raw = entry["sigma"]
    try:
        mat = np.array([[complex(cell[0], cell[1]) for cell in row] for row in raw])
    except (TypeError, IndexError) as exc:
        raise ValidationError(f"{where}: malformed sigma, expected d x d rows of [re, im]") from exc
    return mat


def load_graph(document) -> ConnectionGraph:
    """Parse and validate a graph document (JSON text or an already-parsed dict).

    Schema::

        { "dimension": 2, "field": "complex",
          "vertices": [ {"id": "1", "measure": 1.0}, ... ],
          "edges":    [ {"u": "2", "v": "3", "weight": 1.0,
                         "sigma": [[[0,0],[0,1]],[[0,-1],[0,0]]] }, ... ] }

    sigma is row-major with entries [re, im]; an omitted sigma means the
    identity, and for dimension-1 graphs ``"sign": 1 | -1`` is accepted.
    Measure and weight default to 1.0 when omitted.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise ValidationError("graph document must be a JSON object")
    try:
        d = int(document["dimension"])
    except KeyError:
        raise ValidationError("graph document is missing 'dimension'") from None
    field = document.get("field", "complex")
    vertices = [(str(v["id"]), float(v.get("measure", 1.0)))
                for v in document.get("vertices", [])]
    edges = []
    for entry in document.get("edges", []):
        u, v = str(entry["u"]), str(entry["v"])
        sigma = _parse_sigma(entry, d, f"edge ({u!r}, {v!r})")
        edges.append((u, v, float(entry.get("weight", 1.0)), sigma))
    return ConnectionGraph(d, field, vertices, edges)


class LocalStructure:
    """The incomplete 2-ball around a center vertex.

    This is the entire input to any curvature computation at the center:
    the ordered 1-sphere and 2-sphere, the transition rates of every oriented
    edge inside the ball (edges between two 2-sphere vertices are dropped),
    and the restricted connection.  s1 and s2 are sorted by vertex id, and
    every matrix downstream uses that order.
    """

    __slots__ = ("center", "s1", "s2", "d", "m", "n", "p", "sigma", "dx_over_mux")

    def __init__(self, center: str, s1: tuple[str, ...], s2: tuple[str, ...], d: int,
                 p: dict[tuple[str, str], float], sigma: dict[tuple[str, str], np.ndarray]):
        self.center = center
        self.s1 = tuple(s1)
        self.s2 = tuple(s2)
        self.d = int(d)
        self.m = len(self.s1)
        self.n = len(self.s2)
        self.p = dict(p)
        self.sigma = dict(sigma)
        self.dx_over_mux = sum(self.p[(center, y)] for y in self.s1)

    @property
    def vertices(self) -> tuple[str, ...]:
        """Center, then 1-sphere, then 2-sphere: the basis order of all matrices."""
        return (self.center,) + self.s1 + self.s2

    def rate(self, u: str, v: str) -> float:
        """p_uv inside the ball, 0.0 for an absent edge."""
        return self.p.get((u, v), 0.0)

    def connection(self, u: str, v: str) -> np.ndarray:
        return self.sigma[(u, v)]

    def degree_ratio(self, v: str) -> float:
        """d_v / mu_v, summed over the oriented edges leaving v inside the ball."""
        return sum(rate for (a, _), rate in self.p.items() if a == v)


def local_structure(g: ConnectionGraph, x: str) -> LocalStructure:
    """Extract the incomplete 2-ball around x.

    Raises for an unknown or isolated center (curvature is undefined when the
    1-sphere is empty).  Edges joining two 2-sphere vertices are not included.
    """
    x = str(x)
    if x not in g:
        raise ValidationError(f"vertex {x!r} is not in the graph")
    s1 = tuple(sorted(g.neighbors(x)))
    if not s1:
        raise ValidationError(f"vertex {x!r} is isolated; curvature is undefined for m = 0")
    s1_set = set(s1)
    s2_set: set[str] = set()
    for y in s1:
        for u in g.neighbors(y):
            if u != x and u not in s1_set:
                s2_set.add(u)
    s2 = tuple(sorted(s2_set))

    p: dict[tuple[str, str], float] = {}
    sigma: dict[tuple[str, str], np.ndarray] = {}

    def add_edge(u: str, v: str):
        p[(u, v)] = g.p(u, v)
        p[(v, u)] = g.p(v, u)
        sigma[(u, v)] = g.sigma(u, v)
        sigma[(v, u)] = g.sigma(v, u)

    for y in s1:
        add_edge(x, y)
    for i, y in enumerate(s1):
        for y2 in s1[i + 1:]:
            if g.has_edge(y, y2):
                add_edge(y, y2)
        for z in s2:
            if g.has_edge(y, z):
                add_edge(y, z)
    return LocalStructure(x, s1, s2, g.dimension, p, sigma)


def switch(g: ConnectionGraph, tau: Mapping[str, np.ndarray]) -> ConnectionGraph:
    """Re-gauge the connection: sigma_uv -> tau(u)^{-1} sigma_uv tau(v).

    tau must assign a unitary to every vertex; weights and measures are
    unchanged.  Switching preserves curvature and balance.
    """
    d = g.dimension
    taus: dict[str, np.ndarray] = {}
    for v in g.vertex_ids:
        if v not in tau:
            raise ValidationError(f"switching function is missing vertex {v!r}")
        t = np.asarray(tau[v], dtype=complex)
        taus[v] = _check_unitary(t, d, f"tau({v!r})")
    edges = []
    for u, v, w, s in g.edge_list():
        edges.append((u, v, w, taus[u].conj().T @ s @ taus[v]))
    field = g.field
    if field == "real":
        # A complex tau may leave the real field even for a real graph.
        if any(float(np.max(np.abs(t.imag))) > UNITARY_TOL for t in taus.values()):
            field = "complex"
    return ConnectionGraph(d, field, [(v, g.measure(v)) for v in g.vertex_ids], edges)


def is_locally_balanced(local: LocalStructure, tol: float = BALANCE_TOL) -> bool:
    """True iff some switching makes every connection in the ball the identity.

    Trivializes a spanning tree rooted at the center, then tests every
    non-tree connection against I_d.
    """
    d = local.d
    eye = np.eye(d, dtype=complex)
    gauge: dict[str, np.ndarray] = {local.center: eye}
    # BFS over the ball; the tree edge u -> v fixes gauge[v] = sigma_vu gauge[u],
    # which makes the switched connection along the tree the identity.
    queue = [local.center]
    adj: dict[str, list[str]] = {}
    for (u, v) in local.p:
        adj.setdefault(u, []).append(v)
    for u in adj:
        adj[u].sort()
    while queue:
        u = queue.pop(0)
        for v in adj.get(u, ()):
            if v not in gauge:
                gauge[v] = local.sigma[(v, u)] @ gauge[u]
                queue.append(v)
    for (u, v) in local.p:
        if u > v:
            continue
        s = gauge[u].conj().T @ local.sigma[(u, v)] @ gauge[v]
        if float(np.max(np.abs(s - eye))) > tol:
            return False
    return True


def signature_groups_commute(g: ConnectionGraph, g2: ConnectionGraph,
                             tol: float = UNITARY_TOL) -> bool:
    """True iff every pair of edge connections from the two graphs commutes.

    Checking the generators suffices: products and inverses of pairwise
    commuting unitaries still commute.
    """
    if g.dimension != g2.dimension:
        raise ValidationError(
            f"dimension mismatch: {g.dimension} vs {g2.dimension}"
        )
    for _, _, _, s in g.edge_list():
        for _, _, _, t in g2.edge_list():
            if float(np.max(np.abs(s @ t - t @ s))) > tol:
                return False
    return True
