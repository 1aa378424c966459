"""Repeated k-fold cross-validation of impact predictors."""

from __future__ import annotations

import enum
import random
import statistics
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..callgraph import DEFAULT_PATH_CAP, CallGraph
from ..errors import ImpactLabError
from ..learning import train
from ..mutation import MutationRecord
from ..prediction import DEFAULT_THRESHOLD, predict, predict_tc
from .metrics import MetricTriple, metrics


class Technique(str, enum.Enum):
    TC = "tc"
    BINARY = "binary"
    DICHOTOMIC = "dichotomic"


ALL_TECHNIQUES = tuple(Technique)


@dataclass(frozen=True)
class MutantScore:
    repeat: int
    fold: int
    mutant: str
    precision: float
    recall: float
    fscore: float


@dataclass
class CrossValReport:
    technique: Technique
    threshold: float
    folds: int
    repeats: int
    seed: int
    scores: list[MutantScore] = field(default_factory=list)

    def _column(self, name: str) -> list[float]:
        return [getattr(s, name) for s in self.scores]

    @property
    def mean(self) -> MetricTriple:
        if not self.scores:
            return MetricTriple(float("nan"), float("nan"), float("nan"))
        return MetricTriple(*(statistics.fmean(self._column(c)) for c in ("precision", "recall", "fscore")))

    @property
    def median(self) -> MetricTriple:
        if not self.scores:
            return MetricTriple(float("nan"), float("nan"), float("nan"))
        return MetricTriple(*(statistics.median(self._column(c)) for c in ("precision", "recall", "fscore")))

    def fscores(self) -> list[float]:
        return self._column("fscore")


def partition(n: int, folds: int) -> list[range]:
    """Split ``range(n)`` into ``folds`` contiguous chunks whose sizes differ by at most one."""
    base, extra = divmod(n, folds)
    out, start = [], 0
    for i in range(folds):
        size = base + (1 if i < extra else 0)
        out.append(range(start, start + size))
        start += size
    return out


def fold_orders(n: int, repeats: int, seed: int) -> list[list[int]]:
    """One shuffled ordering of ``range(n)`` per repeat, all from a single seeded generator."""
    rng = random.Random(seed)
    orders = []
    for _ in range(repeats):
        order = list(range(n))
        rng.shuffle(order)
        orders.append(order)
    return orders


def _run_repeat(
    g: CallGraph,
    ds: Sequence[MutationRecord],
    order: list[int],
    repeat: int,
    folds: int,
    techniques: Sequence[Technique],
    thresholds: Sequence[float],
    cap: int,
) -> dict[tuple[Technique, float], list[MutantScore]]:
    out: dict[tuple[Technique, float], list[MutantScore]] = {(t, th): [] for t in techniques for th in thresholds}
    shuffled = [ds[i] for i in order]
    for fold, chunk in enumerate(partition(len(shuffled), folds)):
        test = shuffled[chunk.start : chunk.stop]
        training = shuffled[: chunk.start] + shuffled[chunk.stop :]
        for tech in techniques:
            if tech is Technique.TC:
                for r in test:
                    s = metrics(r.ais, predict_tc(g, r.m).cis)
                    for th in thresholds:
                        out[(tech, th)].append(MutantScore(repeat, fold, r.mutant, *_triple(s)))
                continue
            w = train(g, training, tech.value, cap)
            for th in thresholds:
                for r in test:
                    s = metrics(r.ais, predict(w, r.m, th).cis)
                    out[(tech, th)].append(MutantScore(repeat, fold, r.mutant, *_triple(s)))
    return out


def _triple(s: MetricTriple) -> tuple[float, float, float]:
    return (s.precision, s.recall, s.fscore)


def _run_repeat_job(args: tuple) -> dict[tuple[Technique, float], list[MutantScore]]:
    return _run_repeat(*args)


def evaluate(
    g: CallGraph,
    ds: Sequence[MutationRecord],
    techniques: Iterable[Technique | str] = ALL_TECHNIQUES,
    thresholds: Iterable[float] = (DEFAULT_THRESHOLD,),
    folds: int = 10,
    repeats: int = 10,
    seed: int = 0,
    jobs: int = 1,
    cap: int = DEFAULT_PATH_CAP,
) -> dict[tuple[Technique, float], CrossValReport]:
    """Cross-validate several techniques and thresholds on one shared set of splits.

    Every technique sees identical fold assignments, and a learner is trained
    once per fold however many thresholds are scored.
    """
    techniques = [Technique(t) for t in techniques]
    thresholds = list(dict.fromkeys(float(th) for th in thresholds))
    if not thresholds:
        raise ValueError("at least one threshold is required")
    for th in thresholds:
        if not 0.0 <= th <= 1.0:
            raise ValueError(f"threshold {th} is outside [0, 1]")
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if len(ds) < folds:
        raise ImpactLabError(f"dataset has {len(ds)} records, fewer than the {folds} folds requested")
    for r in ds:
        g.node(r.m)

    orders = fold_orders(len(ds), repeats, seed)
    args = [(g, ds, order, rep, folds, techniques, thresholds, cap) for rep, order in enumerate(orders)]
    if jobs > 1 and repeats > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_repeat_job, args))
    else:
        parts = [_run_repeat(*a) for a in args]

    reports = {
        (tech, th): CrossValReport(tech, th, folds, repeats, seed) for tech in techniques for th in thresholds
    }
    for part in parts:
        for key, scores in part.items():
            reports[key].scores.extend(scores)
    return reports


def cross_validate(
    g: CallGraph,
    ds: Sequence[MutationRecord],
    algo: Technique | str,
    th: float = DEFAULT_THRESHOLD,
    folds: int = 10,
    repeats: int = 10,
    seed: int = 0,
    jobs: int = 1,
) -> CrossValReport:
    tech = Technique(algo)
    return evaluate(g, ds, [tech], [th], folds, repeats, seed, jobs)[(tech, float(th))]


def threshold_sweep(
    g: CallGraph,
    ds: Sequence[MutationRecord],
    algo: Technique | str,
    thresholds: Sequence[float],
    folds: int = 10,
    repeats: int = 10,
    seed: int = 0,
    jobs: int = 1,
) -> dict[float, MetricTriple]:
    """Mean metrics per threshold, every threshold scored on the same splits."""
    if not thresholds:
        raise ValueError("at least one threshold is required")
    tech = Technique(algo)
    reports = evaluate(g, ds, [tech], thresholds, folds, repeats, seed, jobs)
    return {float(th): reports[(tech, float(th))].mean for th in thresholds}
