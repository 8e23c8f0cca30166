"""Clustering accuracy, NMI, purity and a per-view K-means baseline."""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "EvaluationReport",
    "LengthMismatch",
    "contingency",
    "accuracy",
    "nmi",
    "purity",
    "evaluate",
    "kmeans_baseline",
    "summarize",
    "format_table",
]

NMI_NORMALIZATION = "geometric"


class LengthMismatch(ValueError):
    pass


@dataclass
class EvaluationReport:
    acc: float
    nmi: float
    purity: float
    mapping: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["mapping"] = {str(k): int(v) for k, v in self.mapping.items()}
        return d


def _check(pred, truth):
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.size != truth.size:
        raise LengthMismatch(f"{pred.size} predictions vs {truth.size} labels")
    if pred.size == 0:
        raise LengthMismatch("empty labelings")
    return pred, truth


def contingency(pred, truth):
    """Counts table; rows are predicted clusters, columns true labels."""
    pred, truth = _check(pred, truth)
    cl, pi = np.unique(pred, return_inverse=True)
    lab, ti = np.unique(truth, return_inverse=True)
    table = np.zeros((cl.size, lab.size), dtype=np.int64)
    np.add.at(table, (pi, ti), 1)
    return table, cl, lab


def accuracy(pred, truth):
    """Best matched fraction over cluster-to-label bijections.

    Returns ``(acc, mapping)`` where ``mapping`` sends predicted clusters to
    labels (clusters left unmatched in rectangular cases are absent).
    """
    table, cl, lab = contingency(pred, truth)
    size = max(table.shape)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    rows, cols = linear_sum_assignment(padded, maximize=True)
    matched = padded[rows, cols].sum()
    mapping = {
        cl[r].item(): lab[c].item()
        for r, c in zip(rows, cols)
        if r < cl.size and c < lab.size
    }
    return matched / table.sum(), mapping


def _entropy(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth):
    """Mutual information over the geometric mean of the two entropies (nats)."""
    table, _, _ = contingency(pred, truth)
    n = table.sum()
    h_pred = _entropy(table.sum(axis=1))
    h_truth = _entropy(table.sum(axis=0))
    if h_pred == 0.0 or h_truth == 0.0:
        # a constant labeling: identical partitions only if both are constant
        return 1.0 if h_pred == h_truth else 0.0
    pxy = table / n
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    nz = pxy > 0
    mi = float((pxy[nz] * np.log(pxy[nz] / (px @ py)[nz])).sum())
    return min(1.0, max(0.0, mi / np.sqrt(h_pred * h_truth)))


def purity(pred, truth):
    table, _, _ = contingency(pred, truth)
    return table.max(axis=1).sum() / table.sum()


def evaluate(pred, truth, **meta):
    acc, mapping = accuracy(pred, truth)
    meta.setdefault("nmi_normalization", NMI_NORMALIZATION)
    return EvaluationReport(
        acc=float(acc), nmi=float(nmi(pred, truth)), purity=float(purity(pred, truth)),
        mapping=mapping, meta=meta,
    )


def kmeans_baseline(dataset, k, restarts=10, seed=0):
    """K-means on each view's attributes; the report of the best view by ACC."""
    from sklearn.cluster import KMeans
    from sklearn.exceptions import ConvergenceWarning

    if dataset.labels is None:
        raise ValueError("dataset has no ground-truth labels")
    best = None
    for i, x in enumerate(dataset.attributes):
        km = KMeans(n_clusters=k, init="k-means++", n_init=restarts, max_iter=300,
                    tol=1e-8, algorithm="lloyd", random_state=seed)
        with warnings.catch_warnings():
            # constant attributes collapse to fewer distinct clusters than k
            warnings.simplefilter("ignore", ConvergenceWarning)
            pred = km.fit_predict(x.T)
        rep = evaluate(pred, dataset.labels, view=i, k=k, restarts=restarts, seed=seed)
        if best is None or rep.acc > best.acc:
            best = rep
    return best


def summarize(reports):
    """Mean and standard deviation of each metric over repeated runs."""
    out = {}
    for key in ("acc", "nmi", "purity"):
        vals = np.array([getattr(r, key) for r in reports])
        out[key] = (float(vals.mean()), float(vals.std()))
    return out


def format_table(rows, markdown=True):
    """Render ``[(dataset, algorithm, summary), ...]`` as ``mean(std)`` cells."""
    header = ["Dataset", "Algorithm", "ACC", "NMI", "Purity"]
    lines = []
    body = [
        [ds, algo] + [f"{s[key][0]:.3f}({s[key][1]:.2f})" for key in ("acc", "nmi", "purity")]
        for ds, algo, s in rows
    ]
    if markdown:
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        lines.extend("| " + " | ".join(r) + " |" for r in body)
    else:
        widths = [max(len(str(c)) for c in col) for col in zip(header, *body)]
        for r in [header] + body:
            lines.append("  ".join(str(c).ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)
