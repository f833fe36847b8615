"""Bootstrap row draws and weighted feature-subset draws without replacement."""

from __future__ import annotations

import numpy as np

from rssl.errors import DataError
from rssl.rngcore import RngStream
from rssl.weighting import FeatureWeights


def bootstrap(n: int, rng: RngStream) -> np.ndarray:
    """``n`` row indices drawn uniformly with replacement from ``range(n)``."""
    if n < 1:
        raise DataError("bootstrap needs n >= 1")
    return rng.indices(n, n)


def draw_subset(weights: FeatureWeights | np.ndarray, d: int, rng: RngStream) -> np.ndarray:
    """Draw ``d`` distinct feature indices, returned in ascending order.

    Sequential conditional sampling: each pick has probability proportional to
    the weight of the features not yet picked.  Once the positive-weight
    features are exhausted, the rest are taken uniformly from the zero-weight
    ones.
    """
    w = np.array(getattr(weights, "weights", weights), dtype=np.float64)
    p = w.shape[0]
    if not 1 <= d <= p:
        raise DataError(f"subset size d={d} must be in [1, {p}]")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DataError("weights must be finite and non-negative")

    chosen: list[int] = []
    n_positive = int(np.count_nonzero(w > 0))
    u = rng.uniforms(min(d, n_positive))
    for target in u:
        cum = np.cumsum(w)
        # side="right" can only land on an index whose weight is positive
        j = int(np.searchsorted(cum, target * cum[-1], side="right"))
        j = min(j, p - 1)
        while w[j] <= 0:  # guards the u * total == total rounding edge
            j -= 1
        chosen.append(j)
        w[j] = 0.0

    if len(chosen) < d:
        pool = np.flatnonzero(w == 0)
        pool = pool[~np.isin(pool, chosen)]
        for _ in range(d - len(chosen)):
            k = rng.next_index(pool.size)
            chosen.append(int(pool[k]))
            pool = np.delete(pool, k)
    return np.sort(np.asarray(chosen, dtype=np.int64))
