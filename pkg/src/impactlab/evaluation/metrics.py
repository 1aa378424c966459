"""Impact-set algebra and per-mutant precision, recall and F-score."""

from __future__ import annotations

from bisect import bisect_right
from collections.abc import Iterable, Set
from dataclasses import dataclass

from ..errors import ImpactLabError
from ..learning import WeightedCallGraph


@dataclass(frozen=True)
class BohnerSets:
    """Starting, candidate, actual, discovered and false-positive impact sets.

    ``dis`` holds the impacts the prediction missed, ``fpis`` the predicted
    tests that did not actually break.
    """

    sis: frozenset[str]
    cis: frozenset[str]
    ais: frozenset[str]
    dis: frozenset[str]
    fpis: frozenset[str]


@dataclass(frozen=True)
class MetricTriple:
    precision: float
    recall: float
    fscore: float


def bohner_sets(sis: Set[str], ais: Set[str], cis: Set[str]) -> BohnerSets:
    sis, ais, cis = frozenset(sis), frozenset(ais), frozenset(cis)
    if not ais <= sis:
        raise ImpactLabError(f"actual impacts outside the starting set: {sorted(ais - sis)}")
    if not cis <= sis:
        raise ImpactLabError(f"predicted impacts outside the starting set: {sorted(cis - sis)}")
    return BohnerSets(sis, cis, ais, ais - cis, cis - ais)


def fscore(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def metrics(ais: Set[str], cis: Set[str]) -> MetricTriple:
    """Precision, recall and F-score of a predicted set against the actual one.

    Empty sets: an empty prediction has precision 1 only when nothing broke,
    and an empty actual set has recall 1 only when nothing was predicted.
    """
    hits = len(ais & cis)
    if cis:
        p = hits / len(cis)
    else:
        p = 1.0 if not ais else 0.0
    if ais:
        r = hits / len(ais)
    else:
        r = 1.0 if not cis else 0.0
    return MetricTriple(p, r, fscore(p, r))


def weight_histogram(
    weights: WeightedCallGraph | Iterable[float], bins: int = 10
) -> list[tuple[tuple[float, float], float]]:
    """Percentage of weights per bin ``[lo, hi)``; the last bin also holds 1.0."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    values = list(weights.weights.values()) if isinstance(weights, WeightedCallGraph) else list(weights)
    lows = [i / bins for i in range(bins)]
    counts = [0] * bins
    for v in values:
        counts[min(max(bisect_right(lows, v) - 1, 0), bins - 1)] += 1
    total = len(values)
    return [
        ((lows[i], (i + 1) / bins), 100.0 * counts[i] / total if total else 0.0)
        for i in range(bins)
    ]
