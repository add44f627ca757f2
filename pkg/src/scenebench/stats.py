"""Report aggregation and correlation statistics.

Grouping and relation-direction breakdowns operate on per-prompt report rows;
correlation functions implement the standard definitions directly (Kendall in
the tie-adjusted tau-b form, Krippendorff's alpha at interval level) so they
can be checked against independent reference implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class ReportRow:
    """Per-prompt scores plus the scene metadata the breakdowns group by."""

    id: int
    acc: float
    bias: float
    align_score: float
    total_instances: int
    category_count: int
    relation_count: int
    max_same_category: int
    relation_verdicts: Tuple[Tuple[str, bool], ...] = ()  # (kind, ok)


GROUP_KEYS = {
    "instances": lambda r: r.total_instances,
    "categories": lambda r: r.category_count,
    "relations": lambda r: r.relation_count,
    "max-same-category": lambda r: r.max_same_category,
}


@dataclass
class GroupedMetrics:
    key: str
    groups: Dict[int, Dict[str, float]]  # group value -> {mean_acc, mean_bias, mean_align_score, count}
    omitted: List[str] = field(default_factory=list)


def group_scores(
    rows: Sequence[ReportRow], key: str, fix_total: Optional[int] = None
) -> GroupedMetrics:
    if key not in GROUP_KEYS:
        raise StatsError(f"unknown grouping key {key!r}; expected one of {sorted(GROUP_KEYS)}")
    if fix_total is not None:
        rows = [r for r in rows if r.total_instances == fix_total]
    extract = GROUP_KEYS[key]
    buckets: Dict[int, List[ReportRow]] = {}
    for row in rows:
        buckets.setdefault(extract(row), []).append(row)
    groups = {}
    for value in sorted(buckets):
        members = buckets[value]
        groups[value] = {
            "mean_acc": float(np.mean([m.acc for m in members])),
            "mean_bias": float(np.mean([m.bias for m in members])),
            "mean_align_score": float(np.mean([m.align_score for m in members])),
            "count": len(members),
        }
    omitted = [] if rows else [f"no rows for key {key!r}" + (f" with total={fix_total}" if fix_total is not None else "")]
    return GroupedMetrics(key, groups, omitted)


def relation_direction_accuracy(rows: Sequence[ReportRow]) -> Dict[str, float]:
    """Per relation kind: fraction of true verdicts. Absent kinds are omitted."""
    tally: Dict[str, List[int]] = {}
    for row in rows:
        for kind, ok in row.relation_verdicts:
            tally.setdefault(kind, [0, 0])
            tally[kind][0] += int(ok)
            tally[kind][1] += 1
    return {kind: trues / total for kind, (trues, total) in sorted(tally.items())}


def _as_pair(series) -> Tuple[np.ndarray, np.ndarray]:
    x, y = series
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise StatsError("paired series must be 1-d and of equal length")
    if len(x) < 2:
        raise StatsError("need at least 2 paired observations")
    return x, y


def pearson(series) -> float:
    x, y = _as_pair(series)
    dx, dy = x - x.mean(), y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        raise StatsError("correlation undefined for a constant series")
    return float(dx @ dy) / denom


def _ranks(values: np.ndarray) -> np.ndarray:
    """Average ranks for ties (1-based)."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(series) -> float:
    x, y = _as_pair(series)
    return pearson((_ranks(x), _ranks(y)))


def kendall_tau(series) -> float:
    """Tie-adjusted tau-b."""
    x, y = _as_pair(series)
    n = len(x)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            sx = np.sign(x[i] - x[j])
            sy = np.sign(y[i] - y[j])
            if sx == 0 and sy == 0:
                continue
            if sx == 0:
                ties_x += 1
            elif sy == 0:
                ties_y += 1
            elif sx == sy:
                concordant += 1
            else:
                discordant += 1
    denom = math.sqrt(
        (concordant + discordant + ties_x) * (concordant + discordant + ties_y)
    )
    if denom == 0.0:
        raise StatsError("kendall tau undefined: all pairs tied in one series")
    return (concordant - discordant) / denom


def krippendorff_alpha(ratings, level: str = "interval") -> float:
    """Interval-level alpha over an annotators x items matrix (NaN/None = missing)."""
    if level != "interval":
        raise StatsError(f"only interval level is implemented, got {level!r}")
    matrix = np.asarray(
        [[np.nan if v is None else float(v) for v in row] for row in ratings], dtype=np.float64
    )
    if matrix.ndim != 2 or matrix.shape[0] < 2 or matrix.shape[1] < 2:
        raise StatsError("need at least 2 annotators and 2 items")
    units = []
    for col in matrix.T:
        values = col[~np.isnan(col)]
        if len(values) >= 2:
            units.append(values)
    n = sum(len(u) for u in units)
    if n < 2:
        raise StatsError("fewer than 2 pairable values")
    observed = 0.0
    for unit in units:
        diffs = (unit[:, None] - unit[None, :]) ** 2
        observed += diffs.sum() / (len(unit) - 1)
    observed /= n
    pooled = np.concatenate(units)
    expected = ((pooled[:, None] - pooled[None, :]) ** 2).sum() / (n * (n - 1))
    if expected == 0.0:
        return 1.0
    return float(1.0 - observed / expected)


def stability_report(runs: Sequence[Dict[str, float]]) -> Dict[str, Tuple[float, float]]:
    """Sample mean and sample (n-1) standard deviation per metric over runs."""
    if len(runs) < 2:
        raise StatsError("need at least 2 runs for a stability report")
    keys = runs[0].keys()
    if any(r.keys() != keys for r in runs):
        raise StatsError("runs report different metric sets")
    out = {}
    for key in keys:
        values = np.array([r[key] for r in runs], dtype=np.float64)
        out[key] = (float(values.mean()), float(values.std(ddof=1)))
    return out
