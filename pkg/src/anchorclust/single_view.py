"""Single-view specialization: low-rank-learn one anchor graph jointly
with the indicator factorization.

The view weight is pinned at 1 and its update is skipped; everything else
is the multi-view cycle, so fit_single on S is bit-identical to fit on
the singleton graph set {S} under the same config.
"""

from __future__ import annotations

import numpy as np

from .anchors import AnchorGraphSet
from .solver import ClusteringResult, SolverConfig, _fit_loop


def fit_single(S: np.ndarray, config: SolverConfig) -> ClusteringResult:
    """Cluster one anchor graph; same contract and outputs as fit()."""
    graphs = AnchorGraphSet(graphs=[np.asarray(S, dtype=np.float64)], k=0)
    return _fit_loop(graphs, config, with_alpha=False)
