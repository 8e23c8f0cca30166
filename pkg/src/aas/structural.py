"""Anchor selection and the anchor structural similarity matrix.

Anchors are picked inside every strongly connected component by eigenvector
centrality.  Their structural similarity combines two reciprocal path-length
measures, one on the condensation DAG (``a``) and one on the original graph
(``c``), as ``(b^T a b) * c`` where ``b`` maps anchors to components.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .digraph import condensation, scc_spectral, shortest_path_node_counts

__all__ = [
    "AnchorStructure",
    "InvalidTheta",
    "anchor_count",
    "select_anchors",
    "random_anchors",
    "condensation_similarity",
    "anchor_similarity",
    "membership_matrix",
    "build_structural_similarity",
    "save_s_tilde_csv",
]


class InvalidTheta(ValueError):
    pass


@dataclass
class AnchorStructure:
    anchors: list
    membership_b: np.ndarray
    condensation_sim_a: np.ndarray
    anchor_sim_c: np.ndarray
    s_tilde: np.ndarray

    @property
    def m(self):
        return len(self.anchors)

    def recompute(self):
        """``(b^T a b) * c`` from the stored factors."""
        b = self.membership_b
        return (b.T @ self.condensation_sim_a @ b) * self.anchor_sim_c


def _check_theta(theta):
    if not (0.0 < theta < 1.0):
        raise InvalidTheta(f"anchor proportion must lie in (0, 1), got {theta}")


def anchor_count(size, theta):
    # round first: 0.3 * 10 is 3.0000000000000004 in binary floating point
    return max(1, math.ceil(round(theta * size, 9)))


def select_anchors(d, theta):
    """Top ``ceil(theta * |C|)`` nodes by centrality from every component.

    The result is ordered by component (peel order) and, inside a component,
    by descending centrality with ties going to the smaller node index.
    """
    _check_theta(theta)
    if d.centrality is None:
        raise ValueError("decomposition carries no centrality; use scc_spectral")
    anchors = []
    for comp in d.components:
        # round so float noise between equal centralities does not beat the index rule
        ranked = sorted(comp, key=lambda u: (-round(float(d.centrality[u]), 12), u))
        anchors.extend(int(u) for u in ranked[: anchor_count(len(comp), theta)])
    return anchors


def random_anchors(d, theta, rng):
    """Same number of anchors as :func:`select_anchors`, drawn uniformly.

    Returned in ascending node order.
    """
    _check_theta(theta)
    m = sum(anchor_count(len(c), theta) for c in d.components)
    rng = np.random.default_rng(rng)
    return sorted(int(u) for u in rng.choice(d.n, size=m, replace=False))


def _reciprocal_counts(counts):
    out = np.zeros_like(counts)
    finite = np.isfinite(counts)
    out[finite] = 1.0 / counts[finite]
    return out


def condensation_similarity(cg):
    """Symmetrized reciprocal path node counts on the condensation DAG."""
    nodes = list(range(cg.c))
    raw = _reciprocal_counts(shortest_path_node_counts(cg.to_graph(), nodes, nodes))
    return raw + raw.T


def anchor_similarity(g, anchors):
    """Symmetrized reciprocal path node counts between anchors of ``g``."""
    raw = _reciprocal_counts(shortest_path_node_counts(g, anchors, anchors))
    return raw + raw.T


def membership_matrix(d, anchors):
    lab = d.labels()
    b = np.zeros((len(d.components), len(anchors)))
    b[lab[np.asarray(anchors, dtype=int)], np.arange(len(anchors))] = 1.0
    return b


def build_structural_similarity(g, d=None, theta=0.3, anchors=None, identity=False):
    """Assemble anchors and the structural similarity of one view.

    Parameters
    ----------
    g : DirectedGraph
    d : SccDecomposition, optional
        Computed with :func:`scc_spectral` when omitted.
    theta : float
        Anchor proportion per component.
    anchors : sequence of int, optional
        Use these anchors instead of centrality-based selection.
    identity : bool
        Replace ``s_tilde`` by the identity (structure switched off).
    """
    if d is None:
        d = scc_spectral(g)
    if anchors is None:
        anchors = select_anchors(d, theta)
    anchors = [int(u) for u in anchors]
    b = membership_matrix(d, anchors)
    a = condensation_similarity(condensation(g, d))
    c = anchor_similarity(g, anchors)
    if identity:
        s_tilde = np.eye(len(anchors))
    else:
        s_tilde = (b.T @ a @ b) * c
    return AnchorStructure(
        anchors=anchors,
        membership_b=b,
        condensation_sim_a=a,
        anchor_sim_c=c,
        s_tilde=s_tilde,
    )


def save_s_tilde_csv(structure, path):
    np.savetxt(path, structure.s_tilde, delimiter=",", fmt="%.17g")
