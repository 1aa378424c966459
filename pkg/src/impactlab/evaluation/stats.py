"""Mann-Whitney U test with average ranks for ties."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Sequence
from typing import NamedTuple

EXACT_BELOW = 8


class MannWhitneyResult(NamedTuple):
    u: float
    pvalue: float
    method: str  # "exact" or "normal"


def average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _exact_pvalue(doubled_ranks: list[int], na: int, observed_dev: int) -> float:
    # counts[k][s]: subsets of size k whose doubled rank sum is s.
    counts: list[Counter[int]] = [Counter() for _ in range(na + 1)]
    counts[0][0] = 1
    for r in doubled_ranks:
        for k in range(na, 0, -1):
            prev = counts[k - 1]
            if prev:
                cur = counts[k]
                for s, c in prev.items():
                    cur[s + r] += c
    nb = len(doubled_ranks) - na
    offset = na * (na + 1)
    total = extreme = 0
    for s, c in counts[na].items():
        total += c
        # 2U = s - na(na+1); its null mean is na*nb.
        if abs(s - offset - na * nb) >= observed_dev:
            extreme += c
    return extreme / total


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> MannWhitneyResult:
    """U statistic of ``a`` against ``b`` and a two-sided p-value.

    The p-value is exact (enumerating the rank-sum distribution under the
    pooled tie pattern) when the smaller sample has fewer than 8 values, and
    a tie-corrected normal approximation with continuity correction otherwise.
    """
    na, nb = len(a), len(b)
    if na < 1 or nb < 1:
        raise ValueError("both samples need at least one value")
    pooled = list(a) + list(b)
    ranks = average_ranks(pooled)
    u = sum(ranks[:na]) - na * (na + 1) / 2
    if min(na, nb) < EXACT_BELOW:
        doubled = [round(2 * r) for r in ranks]
        observed_dev = abs(round(2 * u) - na * nb)
        return MannWhitneyResult(u, _exact_pvalue(doubled, na, observed_dev), "exact")

    n = na + nb
    ties = sum(t**3 - t for t in Counter(pooled).values())
    var = na * nb / 12 * ((n + 1) - ties / (n * (n - 1)))
    if var <= 0:
        return MannWhitneyResult(u, 1.0, "normal")
    z = (abs(u - na * nb / 2) - 0.5) / math.sqrt(var)
    return MannWhitneyResult(u, min(1.0, math.erfc(z / math.sqrt(2))), "normal")
