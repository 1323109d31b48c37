"""Batch orchestration: fixed-size batches, ordered merge, optional threads.

Batches own disjoint counter-based substreams derived from (master seed,
run tag, batch index); merging is by batch index, so results are identical
for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from ._rng import derive_key
from .errors import ConfigError
from .sampling import ExitBatch, SchemeParams, concat_batches, run_paths

BATCH_SIZE = 1 << 14


def default_workers() -> int:
    env = os.environ.get("ANISOTABLE_WORKERS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"ANISOTABLE_WORKERS must be an integer, got {env!r}")
    return 1


def batch_layout(n: int) -> list[int]:
    """Sizes of the fixed 2^14-path batches covering n paths."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    full, rem = divmod(n, BATCH_SIZE)
    return [BATCH_SIZE] * full + ([rem] if rem else [])


def simulate(
    model,
    domain,
    x0,
    t_max: float,
    scheme: Optional[SchemeParams],
    n: int,
    master_seed: int,
    run_tag: int,
    snapshot_times: Sequence[float] = (),
    workers: int = 1,
) -> ExitBatch:
    """n killed paths from x0, split into deterministic batches."""
    eff_seed = derive_key(master_seed, run_tag)
    sizes = batch_layout(n)

    def one(i: int) -> ExitBatch:
        return run_paths(
            model, domain, x0, t_max, scheme, eff_seed, i, sizes[i],
            snapshot_times=snapshot_times,
        )

    if workers <= 1 or len(sizes) == 1:
        batches = [one(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(one, range(len(sizes))))
    return concat_batches(batches)


def simulate_increments(
    model,
    t: float,
    n: int,
    master_seed: int,
    run_tag: int,
    scheme: Optional[SchemeParams] = None,
    workers: int = 1,
) -> np.ndarray:
    """n free increments of X_t, batched like simulate()."""
    from ._rng import Stream, batch_key
    from .sampling import sample_increment

    eff_seed = derive_key(master_seed, run_tag)
    sizes = batch_layout(n)

    def one(i: int) -> np.ndarray:
        stream = Stream(batch_key(eff_seed, i))
        return sample_increment(model, t, sizes[i], stream, scheme)

    if workers <= 1 or len(sizes) == 1:
        parts = [one(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    return np.concatenate(parts)
