"""Semantic representational similarity analysis.

Thin Python layer over the C++ core. Arrays are float64 NumPy arrays;
representations are (N, C, S), (N, C, W, H) or (N, D).
"""

import json

from ._core import (
    affinity,
    center,
    cka,
    cka_layer_matrix,
    correlate_similarity_jsd,
    cross_similarity,
    f1_instance_overlap,
    hsic,
    iou_class_presence,
    jsd,
    load_matrix,
    load_representations,
    match,
    pearson,
    rsm,
    spearman,
)

__all__ = [
    "affinity",
    "bench",
    "center",
    "cka",
    "cka_layer_matrix",
    "correlate_similarity_jsd",
    "cross_similarity",
    "f1_instance_overlap",
    "hsic",
    "iou_class_presence",
    "jsd",
    "load_matrix",
    "load_representations",
    "match",
    "pearson",
    "rsm",
    "spearman",
]

__version__ = "0.1.0"


def bench(sizes, matchers=("optimal", "greedy", "batch-optimal:128", "none"), channels=64,
          pairs=10, seed=0, warmup=3, timing=True):
    """Matcher runtime and quality report as a dict (same layout as the CLI)."""
    from ._core import _bench_json

    return json.loads(_bench_json(list(sizes), channels, pairs, list(matchers), seed, warmup, timing))
