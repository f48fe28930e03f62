"""Local operator matrices at a vertex: the connection Laplacian block
Delta(x), the forms 2*Gamma(x) and 4*Gamma_2(x), and the Schur complement
4*Q(x) eliminating the 2-sphere block.

Scale convention: the assembled matrices are stored exactly as the scaled
versions 2*Gamma, 4*Gamma_2 and 4*Q so that combinatorial fixtures compare
entrywise against known reference matrices; ``LocalOperators`` exposes the
unscaled forms as properties.

Basis order everywhere: center first, then the 1-sphere, then the 2-sphere,
each in :class:`~concurv.graphs.LocalStructure` (sorted) order, one d-block
per vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import CrossCheckError, ValidationError
from .graphs import ConnectionGraph, LocalStructure
from .hermitian import HermitianMatrix, schur_complement

CROSS_CHECK_TOL = 1e-9  # generic Schur vs closed-form agreement for 4Q


def _blk(i: int, d: int) -> slice:
    return slice(i * d, (i + 1) * d)


def delta_matrix(local: LocalStructure) -> np.ndarray:
    """The (m+1)d x d Laplacian block Delta(x).

    Its transpose is ``(-(d_x/mu_x) I, p_xy1 sigma_xy1, ..., p_xym sigma_xym)``,
    so that for the local vector f of a function, ``f^T Delta(x)`` is the row
    vector ``(Delta f(x))^T``.
    """
    d, m = local.d, local.m
    x = local.center
    out = np.zeros(((m + 1) * d, d), dtype=complex)
    out[_blk(0, d), :] = -local.dx_over_mux * np.eye(d)
    for i, y in enumerate(local.s1):
        out[_blk(i + 1, d), :] = local.p[(x, y)] * local.sigma[(x, y)].T
    return out


def gamma_matrix(local: LocalStructure) -> HermitianMatrix:
    """2*Gamma(x): the (m+1)d form matrix of the squared gradient at x."""
    d, m = local.d, local.m
    x = local.center
    out = np.zeros(((m + 1) * d, (m + 1) * d), dtype=complex)
    out[_blk(0, d), _blk(0, d)] = local.dx_over_mux * np.eye(d)
    for i, y in enumerate(local.s1):
        p = local.p[(x, y)]
        s = local.sigma[(x, y)]
        out[_blk(0, d), _blk(i + 1, d)] = -p * s.conj()
        out[_blk(i + 1, d), _blk(0, d)] = -p * s.T
        out[_blk(i + 1, d), _blk(i + 1, d)] = p * np.eye(d)
    return HermitianMatrix(out)


def gamma2_matrix(local: LocalStructure) -> HermitianMatrix:
    """4*Gamma_2(x): the (m+n+1)d iterated form matrix, assembled blockwise.

    The 2-sphere diagonal block is real, diagonal and positive, with entries
    sum_i p_xyi p_yizk; blocks between two 2-sphere vertices vanish.
    """
    d, m, n = local.d, local.m, local.n
    x = local.center
    s1, s2 = local.s1, local.s2
    P = [local.p[(x, y)] for y in s1]
    pin = [local.p[(y, x)] for y in s1]
    dx = local.dx_over_mux
    dy = [local.degree_ratio(y) for y in s1]
    sx = [local.sigma[(x, y)] for y in s1]
    eye = np.eye(d)

    size = (m + n + 1) * d
    out = np.zeros((size, size), dtype=complex)

    out[_blk(0, d), _blk(0, d)] = (3.0 * sum(P[i] * pin[i] for i in range(m)) + dx * dx) * eye

    for i, y in enumerate(s1):
        # (x, y_i)
        block = -(2.0 * pin[i] + dy[i] + dx) * P[i] * sx[i].conj()
        for j, y2 in enumerate(s1):
            if j == i:
                continue
            q_ji = local.rate(y2, y)
            if q_ji:
                block = block + P[j] * q_ji * sx[j].conj() @ local.sigma[(y2, y)].conj()
        out[_blk(0, d), _blk(1 + i, d)] = block
        out[_blk(1 + i, d), _blk(0, d)] = block.conj().T

        # (y_i, y_i)
        diag = (2.0 * P[i] + 3.0 * dy[i] - dx) * P[i]
        diag += sum(P[j] * local.rate(s1[j], y) for j in range(m) if j != i)
        out[_blk(1 + i, d), _blk(1 + i, d)] = diag * eye

        # (y_i, y_j), j > i
        for j in range(i + 1, m):
            y2 = s1[j]
            block = 2.0 * P[i] * P[j] * sx[i].T @ sx[j].conj()
            cross = P[i] * local.rate(y, y2) + P[j] * local.rate(y2, y)
            if cross:
                block = block - 2.0 * cross * local.sigma[(y, y2)].conj()
            out[_blk(1 + i, d), _blk(1 + j, d)] = block
            out[_blk(1 + j, d), _blk(1 + i, d)] = block.conj().T

    for k, z in enumerate(s2):
        col = _blk(1 + m + k, d)
        # (x, z_k)
        block = np.zeros((d, d), dtype=complex)
        for i, y in enumerate(s1):
            r_ik = local.rate(y, z)
            if r_ik:
                block = block + P[i] * r_ik * sx[i].conj() @ local.sigma[(y, z)].conj()
        out[_blk(0, d), col] = block
        out[col, _blk(0, d)] = block.conj().T

        # (y_i, z_k) and the diagonal (z_k, z_k)
        wk = 0.0
        for i, y in enumerate(s1):
            r_ik = local.rate(y, z)
            if not r_ik:
                continue
            wk += P[i] * r_ik
            block = -2.0 * P[i] * r_ik * local.sigma[(y, z)].conj()
            out[_blk(1 + i, d), col] = block
            out[col, _blk(1 + i, d)] = block.conj().T
        out[col, col] = wk * eye

    return HermitianMatrix(out)


def q_matrix(local: LocalStructure) -> HermitianMatrix:
    """4*Q(x): the Schur complement of the 2-sphere block in 4*Gamma_2(x).

    Computed twice, once by the generic Schur complement and once from the
    closed-form blocks, and the two results must agree entrywise; a mismatch
    signals an assembly bug and raises :class:`CrossCheckError`.  For n = 0
    there is nothing to eliminate and Q is Gamma_2 restricted to the 1-ball.
    """
    d, m, n = local.d, local.m, local.n
    g2 = gamma2_matrix(local)
    if n == 0:
        return HermitianMatrix(g2.mat[: (m + 1) * d, : (m + 1) * d])
    generic = schur_complement(g2, range((m + 1) * d))
    closed = _q_closed_form(local, g2.mat)
    resid = float(np.max(np.abs(generic.mat - closed)))
    if resid > CROSS_CHECK_TOL:
        raise CrossCheckError(
            f"q_matrix cross-check failed at vertex {local.center!r}: "
            f"generic Schur vs closed form differ by {resid:.3e} > {CROSS_CHECK_TOL:.1e}"
        )
    return generic


def _q_closed_form(local: LocalStructure, g2: np.ndarray) -> np.ndarray:
    """4*Q(x) from the explicit correction sums over 2-sphere vertices."""
    d, m = local.d, local.m
    x = local.center
    s1, s2 = local.s1, local.s2
    P = [local.p[(x, y)] for y in s1]
    sx = [local.sigma[(x, y)] for y in s1]
    out = np.array(g2[: (m + 1) * d, : (m + 1) * d], dtype=complex)

    for z in s2:
        r = [local.rate(y, z) for y in s1]
        wk = sum(P[i] * r[i] for i in range(m))
        # row vector of the x block against z, and its building blocks
        sz = [local.sigma[(y, z)] if r[i] else None for i, y in enumerate(s1)]
        xz = np.zeros((d, d), dtype=complex)
        for i in range(m):
            if r[i]:
                xz = xz + P[i] * r[i] * sx[i].conj() @ sz[i].conj()
        out[_blk(0, d), _blk(0, d)] -= xz @ xz.conj().T / wk
        for i in range(m):
            if r[i]:
                corr = 2.0 * P[i] * r[i] / wk * xz @ sz[i].T
                out[_blk(0, d), _blk(1 + i, d)] += corr
                out[_blk(1 + i, d), _blk(0, d)] += corr.conj().T
            for j in range(i, m):
                if not (r[i] and r[j]):
                    continue
                if j == i:
                    out[_blk(1 + i, d), _blk(1 + i, d)] -= (
                        4.0 * P[i] ** 2 * r[i] ** 2 / wk * np.eye(d)
                    )
                else:
                    corr = 4.0 * P[i] * r[i] * P[j] * r[j] / wk * sz[i].conj() @ sz[j].T
                    out[_blk(1 + i, d), _blk(1 + j, d)] -= corr
                    out[_blk(1 + j, d), _blk(1 + i, d)] -= corr.conj().T
    return out


@dataclass(frozen=True)
class LocalOperators:
    """All assembled matrices for one vertex, in the stored scale convention."""

    delta: np.ndarray          # Delta(x), (m+1)d x d
    gamma2x: HermitianMatrix   # 2*Gamma(x)
    gamma2_2x: HermitianMatrix  # 4*Gamma_2(x)
    q4: HermitianMatrix        # 4*Q(x)

    @property
    def gamma(self) -> np.ndarray:
        return self.gamma2x.mat / 2.0

    @property
    def gamma2(self) -> np.ndarray:
        return self.gamma2_2x.mat / 4.0

    @property
    def q(self) -> np.ndarray:
        return self.q4.mat / 4.0


def local_operators(local: LocalStructure) -> LocalOperators:
    return LocalOperators(
        delta=delta_matrix(local),
        gamma2x=gamma_matrix(local),
        gamma2_2x=gamma2_matrix(local),
        q4=q_matrix(local),
    )


# -- direct (recursive) evaluation of the forms ---------------------------

def _vec(f: Mapping[str, np.ndarray], v: str, d: int) -> np.ndarray:
    try:
        val = f[v]
    except KeyError:
        raise ValidationError(f"function is undefined at vertex {v!r}") from None
    arr = np.atleast_1d(np.asarray(val, dtype=complex))
    if arr.shape != (d,):
        raise ValidationError(f"value at {v!r} has shape {arr.shape}, expected ({d},)")
    return arr


def _laplacian_sigma(g: ConnectionGraph, f: Mapping, x: str) -> np.ndarray:
    d = g.dimension
    fx = _vec(f, x, d)
    acc = np.zeros(d, dtype=complex)
    for y in g.neighbors(x):
        acc += g.p(x, y) * (g.sigma(x, y) @ _vec(f, y, d) - fx)
    return acc


def _gamma_at(g: ConnectionGraph, f: Mapping, h: Mapping, x: str) -> complex:
    d = g.dimension
    fx, hx = _vec(f, x, d), _vec(h, x, d)
    acc = 0.0 + 0.0j
    for y in g.neighbors(x):
        s = g.sigma(x, y)
        acc += g.p(x, y) * ((s @ _vec(f, y, d) - fx) @ np.conj(s @ _vec(h, y, d) - hx))
    return acc / 2.0


def gamma_forms(g: ConnectionGraph, f: Mapping, h: Mapping, x: str):
    """Gamma(f,h)(x), Gamma_2(f,h)(x) and Delta f(x), straight from the
    recursive definitions.

    This is the matrix-free oracle for the assembled operators: the values
    must match ``f^T M conj(h)`` for each form matrix.  f and h map vertex
    ids to K^d values and must be defined on the whole 2-ball of x.
    """
    x = str(x)
    if x not in g:
        raise ValidationError(f"vertex {x!r} is not in the graph")
    gamma_fh = _gamma_at(g, f, h, x)
    delta_f = _laplacian_sigma(g, f, x)
    delta_h = _laplacian_sigma(g, h, x)

    # Delta applied to the scalar function Gamma(f,h), then the two
    # correction terms Gamma(f, Delta h) and Gamma(Delta f, h).
    lap_gamma = 0.0 + 0.0j
    for y in g.neighbors(x):
        lap_gamma += g.p(x, y) * (_gamma_at(g, f, h, y) - gamma_fh)

    df_map = {v: _laplacian_sigma(g, f, v) for v in (x,) + g.neighbors(x)}
    dh_map = {v: _laplacian_sigma(g, h, v) for v in (x,) + g.neighbors(x)}
    gamma_f_dh = _gamma_at(g, f, dh_map, x)
    gamma_df_h = _gamma_at(g, df_map, h, x)

    gamma2_fh = (lap_gamma - gamma_f_dh - gamma_df_h) / 2.0
    return gamma_fh, gamma2_fh, delta_f
