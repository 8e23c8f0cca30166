"""Anchor-based multi-view clustering of attributed directed graphs."""
from . import attribute_qp, digraph, fusion, metrics, structural, synth
from .digraph import DirectedGraph, scc_spectral, scc_tarjan
from .fusion import FusionConfig, run
from .metrics import evaluate
from .synth import MultiViewDataset, SbmSpec, generate, load_dataset, preset, save_dataset

__version__ = "0.1.0"

__all__ = [
    "attribute_qp",
    "digraph",
    "fusion",
    "metrics",
    "structural",
    "synth",
    "DirectedGraph",
    "scc_spectral",
    "scc_tarjan",
    "FusionConfig",
    "run",
    "evaluate",
    "MultiViewDataset",
    "SbmSpec",
    "generate",
    "load_dataset",
    "preset",
    "save_dataset",
]
