"""Node-to-anchor attribute similarity as simplex-constrained QPs.

For fixed clustering factors the attribute block of the objective separates
over nodes.  Node ``j`` needs

    min_s  1/2 s^T A s + f_j^T s    subject to  s >= 0, sum(s) = 1

with one Hessian ``A`` shared by every node.  All nodes are solved together by
accelerated projected gradient; each column is then polished by an exact
solve on its detected support and certified through its KKT residual.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QpSubproblem",
    "DimensionMismatch",
    "NoConvergence",
    "project_simplex",
    "power_iteration",
    "assemble_qp",
    "solve_simplex_qp",
    "solve_simplex_qp_batch",
    "kkt_residual",
    "update_s_bar",
    "attribute_objective",
]

KKT_TOL = 1e-8
STEP_TOL = 1e-10
MAX_ITER = 5000


class DimensionMismatch(ValueError):
    pass


class NoConvergence(RuntimeWarning):
    """Projected gradient hit its iteration cap; the best iterate is returned."""


@dataclass
class QpSubproblem:
    a_hess: np.ndarray  # (m, m)
    f_lin: np.ndarray  # (m, n), one column per node
    alpha: float

    @property
    def m(self):
        return self.a_hess.shape[0]


def project_simplex(y, axis=0):
    """Euclidean projection of every column (``axis=0``) onto the probability simplex.

    Sort-based: with ``u`` sorted descending, the threshold is
    ``(cumsum(u)[r] - 1) / (r + 1)`` at the last ``r`` where it stays below ``u[r]``.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        return project_simplex(y[:, None])[:, 0]
    if axis == 1:
        return project_simplex(y.T).T
    m = y.shape[0]
    u = -np.sort(-y, axis=0)
    css = np.cumsum(u, axis=0) - 1.0
    ks = np.arange(1, m + 1)[:, None]
    cond = u - css / ks > 0
    rho = m - 1 - np.argmax(cond[::-1], axis=0)
    tau = css[rho, np.arange(y.shape[1])] / (rho + 1)
    return np.maximum(y - tau, 0.0)


def power_iteration(a, tol=1e-12, max_iter=10000, seed=0):
    """Largest eigenvalue of a symmetric positive semidefinite matrix."""
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    if m == 1:
        return float(a[0, 0])
    x = np.random.default_rng(seed).random(m) + 1.0
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = a @ x
        nrm = np.linalg.norm(y)
        if nrm == 0.0:
            return 0.0
        x_new = y / nrm
        lam_new = float(x_new @ a @ x_new)
        if abs(lam_new - lam) <= tol * max(abs(lam_new), 1.0):
            return lam_new
        x, lam = x_new, lam_new
    return lam


def assemble_qp(x, x_bar, s_tilde, f_embed, h, p, alpha):
    """Hessian and linear term of the per-node QPs of one view.

    Parameters
    ----------
    x : (d, n) attributes of all nodes
    x_bar : (d, m) attributes of the anchors
    s_tilde : (m, m) structural similarity of the anchors
    f_embed : (m, k) anchor embedding
    h : (n, k) nonnegative node embedding
    p : float, view weight (its reciprocal multiplies the fusion term)
    alpha : float, ridge weight
    """
    x = np.asarray(x, dtype=float)
    x_bar = np.asarray(x_bar, dtype=float)
    d, n = x.shape
    m = x_bar.shape[1]
    if x_bar.shape[0] != d:
        raise DimensionMismatch(f"anchor attributes have {x_bar.shape[0]} rows, expected {d}")
    if s_tilde.shape != (m, m):
        raise DimensionMismatch(f"s_tilde is {s_tilde.shape}, expected {(m, m)}")
    if f_embed.shape[0] != m or h.shape[0] != n or f_embed.shape[1] != h.shape[1]:
        raise DimensionMismatch(
            f"embedding shapes {f_embed.shape} and {h.shape} do not fit m={m}, n={n}"
        )
    if p <= 0:
        raise ValueError("view weight must be positive")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    a = 2.0 * x_bar.T @ x_bar + 2.0 * alpha * np.eye(m) + (2.0 / p) * s_tilde @ s_tilde.T
    a = 0.5 * (a + a.T)
    f = -2.0 * x_bar.T @ x - (2.0 / p) * s_tilde @ f_embed @ h.T
    return QpSubproblem(a_hess=a, f_lin=f, alpha=float(alpha))


def kkt_residual(a, f, s):
    """Largest violation of the simplex-QP optimality conditions.

    With ``g = A s + f`` and multiplier ``lam = min(g)``: primal feasibility,
    and complementarity ``s_i (g_i - lam)``.  Columns are handled independently
    when ``f`` and ``s`` are 2-D; the maximum over columns is returned.
    """
    s2 = s if s.ndim == 2 else s[:, None]
    f2 = f if f.ndim == 2 else f[:, None]
    g = a @ s2 + f2
    lam = g.min(axis=0)
    comp = np.abs(s2 * (g - lam))
    primal = np.maximum(np.abs(s2.sum(axis=0) - 1.0), np.maximum(-s2, 0).max(axis=0))
    return float(max(comp.max(), primal.max()))


def _polish(a, f, s):
    """Exact solve on the support of ``s``; returns None unless it is optimal."""
    m = s.size
    for thresh in (1e-12, 1e-8 * s.max()):
        sup = np.flatnonzero(s > thresh)
        kkt = np.zeros((sup.size + 1, sup.size + 1))
        kkt[:-1, :-1] = a[np.ix_(sup, sup)]
        kkt[:-1, -1] = 1.0
        kkt[-1, :-1] = 1.0
        rhs = np.concatenate([-f[sup], [1.0]])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            continue
        if np.any(sol[:-1] < 0):
            continue
        cand = np.zeros(m)
        cand[sup] = sol[:-1]
        cand /= cand.sum()
        if kkt_residual(a, f, cand) <= KKT_TOL:
            return cand
    return None


def solve_simplex_qp_batch(a, f, s0=None, max_iter=MAX_ITER, tol=STEP_TOL):
    """Solve the QP for every column of ``f`` at once.

    Returns ``(s, info)`` with ``s`` of shape ``(m, n)`` and ``info`` holding
    ``iterations``, ``converged`` and ``kkt`` (worst column).
    """
    a = np.asarray(a, dtype=float)
    f = np.asarray(f, dtype=float)
    m, n = f.shape
    if m == 1:
        s = np.ones((1, n))
        return s, {"iterations": 0, "converged": True, "kkt": 0.0}

    lip = power_iteration(a)
    step = 1.0 / lip
    s = project_simplex(np.full((m, n), 1.0 / m) if s0 is None else s0)
    y = s.copy()
    t = np.ones(n)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        s_new = project_simplex(y - step * (a @ y + f))
        diff = s_new - s
        # gradient-based adaptive restart, per column
        restart = np.einsum("ij,ij->j", y - s_new, diff) > 0
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        beta = np.where(restart, 0.0, (t - 1.0) / t_new)
        t = np.where(restart, 1.0, t_new)
        y = s_new + beta * diff
        s = s_new
        if np.abs(diff).max() < tol:
            converged = True
            break

    out = np.empty_like(s)
    for j in range(n):
        pol = _polish(a, f[:, j], s[:, j])
        if pol is None:
            col = np.maximum(s[:, j], 0.0)
            out[:, j] = col / col.sum()
        else:
            out[:, j] = pol
    res = kkt_residual(a, f, out)
    if res <= KKT_TOL:
        converged = True
    if not converged:
        warnings.warn(
            f"simplex QP stopped after {it} iterations with KKT residual {res:.2e}",
            NoConvergence,
            stacklevel=2,
        )
    return out, {"iterations": it, "converged": converged, "kkt": res}


def solve_simplex_qp(q, j):
    """Minimizer for node ``j`` of a :class:`QpSubproblem`."""
    s, _ = solve_simplex_qp_batch(q.a_hess, q.f_lin[:, [j]])
    return s[:, 0]


def update_s_bar(x, anchors, s_tilde, f_embed, h, p, alpha, s_bar0=None):
    """Optimal ``(n, m)`` node-to-anchor similarity for fixed ``h, f_embed, p``.

    Every row of the result lies on the probability simplex.
    """
    x = np.asarray(x, dtype=float)
    q = assemble_qp(x, x[:, anchors], s_tilde, f_embed, h, p, alpha)
    s0 = None if s_bar0 is None else s_bar0.T
    s, info = solve_simplex_qp_batch(q.a_hess, q.f_lin, s0=s0)
    return s.T, info


def attribute_objective(x, anchors, s_bar, s_tilde, f_embed, h, p, alpha):
    """Per-view objective of the attribute block.

    ``||X - Xbar S^T||^2 + alpha ||S||^2 + (1/p) ||S S~ - H F^T||^2``
    """
    x = np.asarray(x, dtype=float)
    x_bar = x[:, anchors]
    recon = np.linalg.norm(x - x_bar @ s_bar.T) ** 2
    ridge = alpha * np.linalg.norm(s_bar) ** 2
    fusion = np.linalg.norm(s_bar @ s_tilde - h @ f_embed.T) ** 2 / p
    return float(recon + ridge + fusion)
