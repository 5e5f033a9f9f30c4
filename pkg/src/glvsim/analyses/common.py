"""Shared plumbing for campaigns: ordered parallel map and result tables."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field


def parallel_map(fn, items, workers: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally over a process pool.

    Results come back in input order and every cell is computed the same way
    whatever the worker count, so outputs do not depend on ``workers``.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


@dataclass
class CampaignResult:
    """Data tables (file name -> (header, rows)) plus a small summary dict."""
    name: str
    tables: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
