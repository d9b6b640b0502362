"""Deterministic sweeps over all pairs (gamma, delta).

Work is split by gamma (taken in log order: 0, alpha^0, alpha^1, ...). Each
chunk returns a Counter; chunks are folded in order, so the result does not
depend on how many workers ran or in which order they finished.
"""

from __future__ import annotations

import logging
import os
from collections import Counter
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .field import CodeParams, FieldCtx

log = logging.getLogger(__name__)

# cells (int64) one chunk may materialise at a time
CHUNK_CELLS = 1 << 22


def gamma_chunks(ctx: FieldCtx, per_chunk: int) -> list[np.ndarray]:
    elems = ctx.elements_log_order
    per_chunk = max(1, per_chunk)
    return [elems[i:i + per_chunk] for i in range(0, len(elems), per_chunk)]


def default_workers() -> int:
    return os.cpu_count() or 1


def _call(args):
    task, params, ctx, gammas, kwargs = args
    return task(params, ctx, gammas, **kwargs)


def run_sweep(
    task: Callable[..., Counter],
    params: CodeParams,
    ctx: FieldCtx,
    *,
    cells_per_gamma: int,
    workers: int = 1,
    **kwargs,
) -> Counter:
    """Apply ``task(params, ctx, gammas, **kwargs)`` to every gamma chunk and sum."""
    per_chunk = max(1, CHUNK_CELLS // max(1, cells_per_gamma))
    if workers > 1:
        # keep every worker busy with several chunks
        per_chunk = min(per_chunk, max(1, ctx.q // (4 * workers)))
    chunks = gamma_chunks(ctx, per_chunk)
    jobs = [(task, params, ctx, g, kwargs) for g in chunks]
    total: Counter = Counter()
    if workers <= 1 or len(jobs) == 1:
        for i, job in enumerate(jobs):
            total.update(_call(job))
            log.debug("chunk %d/%d done", i + 1, len(jobs))
        return total
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_call, jobs):
            total.update(part)
    return total
