"""Multi-view directed Attribute SBM generator and dataset directory I/O.

Dataset directory layout::

    manifest.json       {"n": ..., "v": ..., "views": [{"edges": ..., "attrs": ...}], "labels": ...}
    view0.edges         u<TAB>v per line
    view0.attrs.csv     n rows x d columns (optional; all-ones when absent)
    labels.csv          one integer per line (optional)
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .digraph import DirectedGraph, FormatError, read_edge_list, write_edge_list

__all__ = [
    "SbmSpec",
    "MultiViewDataset",
    "FormatError",
    "InconsistentN",
    "generate",
    "preset",
    "PRESETS",
    "save_dataset",
    "load_dataset",
]


class InconsistentN(ValueError):
    pass


@dataclass
class SbmSpec:
    """Parameters of a multi-view directed Attribute SBM.

    ``intra[i]`` / ``inter[i]`` are the Bernoulli edge probabilities of view
    ``i`` for ordered pairs inside / across clusters.  ``mean_scale`` is the
    standard deviation of the cluster mean entries and ``cov_diag`` the
    within-cluster attribute variance.
    """

    cluster_sizes: list
    intra: list
    inter: list
    attr_dim: int | list = 2
    mean_scale: float = float(np.sqrt(2.0))
    cov_diag: float = 1.25
    seed: int = 0

    def __post_init__(self):
        self.cluster_sizes = [int(s) for s in self.cluster_sizes]
        self.intra = [float(q) for q in self.intra]
        self.inter = [float(q) for q in self.inter]
        if not self.cluster_sizes or min(self.cluster_sizes) < 1:
            raise ValueError("cluster sizes must be positive")
        if len(self.intra) != len(self.inter) or not self.intra:
            raise ValueError("intra and inter need one probability per view")
        for q in self.intra + self.inter:
            if not 0.0 <= q <= 1.0:
                raise ValueError(f"probability {q} outside [0, 1]")
        dims = self.dims
        if len(dims) != self.v or min(dims) < 1:
            raise ValueError("attr_dim must be a positive int or one per view")
        if self.mean_scale < 0 or self.cov_diag < 0:
            raise ValueError("mean_scale and cov_diag must be non-negative")

    @property
    def v(self):
        return len(self.intra)

    @property
    def n(self):
        return sum(self.cluster_sizes)

    @property
    def dims(self):
        if isinstance(self.attr_dim, (list, tuple)):
            return [int(d) for d in self.attr_dim]
        return [int(self.attr_dim)] * self.v

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


PRESETS = {
    "sbm50": dict(cluster_sizes=[10, 15, 12, 13]),
    "sbm5000": dict(cluster_sizes=[1000, 1500, 1200, 1300]),
}
_PRESET_EDGES = dict(intra=[0.20, 0.20, 0.25], inter=[0.01, 0.03, 0.03])


def preset(name, seed=0):
    """``"sbm50"`` or ``"sbm5000"``: three views, four clusters, 2-D attributes."""
    try:
        sizes = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return SbmSpec(**sizes, **_PRESET_EDGES, seed=seed)


@dataclass
class MultiViewDataset:
    """Shared node set seen through several views.

    ``attributes[i]`` is ``(d_i, n)``; ``graphs[i]`` the directed graph of view ``i``.
    """

    attributes: list
    graphs: list
    labels: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.attributes) != len(self.graphs) or not self.graphs:
            raise ValueError("need the same positive number of attribute matrices and graphs")
        ns = {g.n for g in self.graphs} | {x.shape[1] for x in self.attributes}
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            ns.add(self.labels.size)
        if len(ns) != 1:
            raise InconsistentN(f"views disagree on the node count: {sorted(ns)}")

    @property
    def n(self):
        return self.graphs[0].n

    @property
    def v(self):
        return len(self.graphs)


def generate(spec):
    """Draw a dataset.  Each view has its own edge and attribute streams,
    derived from ``spec.seed``, so adding views leaves earlier views unchanged."""
    z = np.repeat(np.arange(len(spec.cluster_sizes)), spec.cluster_sizes)
    n = z.size
    k = len(spec.cluster_sizes)
    same = z[:, None] == z[None, :]
    root = np.random.SeedSequence(spec.seed)
    attributes, graphs = [], []
    for view_seq, p_in, p_out, d in zip(root.spawn(spec.v), spec.intra, spec.inter, spec.dims):
        edge_seq, attr_seq = view_seq.spawn(2)
        prob = np.where(same, p_in, p_out)
        adj = (np.random.default_rng(edge_seq).random((n, n)) < prob).astype(np.int8)
        np.fill_diagonal(adj, 0)
        graphs.append(DirectedGraph.from_adjacency(adj))

        rng = np.random.default_rng(attr_seq)
        means = rng.normal(0.0, spec.mean_scale, size=(k, d))
        x = means[z] + np.sqrt(spec.cov_diag) * rng.standard_normal((n, d))
        attributes.append(x.T.copy())
    return MultiViewDataset(attributes=attributes, graphs=graphs, labels=z,
                            meta={"spec": spec.to_dict()})


def save_dataset(ds, path):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    views = []
    for i, (x, g) in enumerate(zip(ds.attributes, ds.graphs)):
        edges, attrs = f"view{i}.edges", f"view{i}.attrs.csv"
        write_edge_list(g, path / edges, header=f"view {i}, n={g.n}")
        np.savetxt(path / attrs, x.T, delimiter=",", fmt="%.17g")
        views.append({"edges": edges, "attrs": attrs})
    manifest = {"n": ds.n, "v": ds.v, "views": views}
    if ds.labels is not None:
        np.savetxt(path / "labels.csv", ds.labels, fmt="%d")
        manifest["labels"] = "labels.csv"
    if ds.meta:
        manifest["meta"] = ds.meta
    (path / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return path


def _read_attrs(file, n):
    rows = []
    with open(file) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError:
                raise FormatError(f"{file}:{lineno}: non-numeric attribute value") from None
            if len(rows[-1]) != len(rows[0]):
                raise FormatError(f"{file}:{lineno}: expected {len(rows[0])} columns")
    if len(rows) != n:
        raise InconsistentN(f"{file}: {len(rows)} attribute rows but n={n}")
    return np.asarray(rows, dtype=float).T.copy()


def _read_labels(file, n):
    labels = []
    with open(file) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                labels.append(int(line))
            except ValueError:
                raise FormatError(f"{file}:{lineno}: label is not an integer") from None
    if len(labels) != n:
        raise InconsistentN(f"{file}: {len(labels)} labels but n={n}")
    return np.asarray(labels, dtype=int)


def load_dataset(path):
    """Read a dataset directory.  Views without an attribute file get a
    one-dimensional all-ones attribute per node."""
    path = Path(path)
    mfile = path / "manifest.json"
    try:
        manifest = json.loads(mfile.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{mfile}:{exc.lineno}: {exc.msg}") from None
    try:
        n = int(manifest["n"])
        views = manifest["views"]
    except (KeyError, TypeError, ValueError):
        raise FormatError(f"{mfile}:1: manifest needs 'n' and 'views'") from None
    if "v" in manifest and int(manifest["v"]) != len(views):
        raise FormatError(f"{mfile}:1: 'v' is {manifest['v']} but {len(views)} views listed")

    attributes, graphs = [], []
    for view in views:
        efile = path / view["edges"]
        n_edges, edges = read_edge_list(efile)
        if n_edges > n:
            raise InconsistentN(f"{efile}: node index {n_edges - 1} but n={n}")
        try:
            graphs.append(DirectedGraph(n, edges))
        except ValueError as exc:
            raise FormatError(f"{efile}:0: {exc}") from None
        if view.get("attrs"):
            attributes.append(_read_attrs(path / view["attrs"], n))
        else:
            attributes.append(np.ones((1, n)))
    labels = _read_labels(path / manifest["labels"], n) if manifest.get("labels") else None
    return MultiViewDataset(attributes=attributes, graphs=graphs, labels=labels,
                            meta=manifest.get("meta", {}))
