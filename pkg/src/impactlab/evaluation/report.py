"""Assemble cross-validation results into operator-by-technique tables."""

from __future__ import annotations

import csv
import io
from collections.abc import Sequence

from ..callgraph import CallGraph
from ..mutation import MutationRecord
from .crossval import CrossValReport, Technique, evaluate
from .metrics import MetricTriple
from .stats import EXACT_BELOW, mann_whitney_u

ALL_ROW = "ALL"
_METRICS = ("precision", "recall", "fscore")


def _triple_json(t: MetricTriple) -> dict[str, float]:
    return {"precision": t.precision, "recall": t.recall, "fscore": t.fscore}


def _technique_json(rep: CrossValReport) -> dict:
    return {"mean": _triple_json(rep.mean), "median": _triple_json(rep.median)}


def build_report(
    g: CallGraph,
    ds: Sequence[MutationRecord],
    techniques: Sequence[Technique | str],
    threshold: float,
    folds: int = 10,
    repeats: int = 10,
    seed: int = 0,
    jobs: int = 1,
) -> dict:
    """Cross-validate each operator's records separately, then all records together.

    Operators with fewer records than folds are listed as skipped.
    """
    techniques = [Technique(t) for t in techniques]
    groups: dict[str, list[MutationRecord]] = {}
    for r in ds:
        groups.setdefault(r.operator, []).append(r)
    if len(groups) > 1 or not groups:
        groups[ALL_ROW] = list(ds)

    rows = []
    pooled: dict[Technique, CrossValReport] = {}
    for op in sorted(k for k in groups if k != ALL_ROW) + ([ALL_ROW] if ALL_ROW in groups else []):
        records = groups[op]
        row: dict = {"operator": op, "mutants": len(records)}
        if len(records) < folds:
            row["skipped"] = f"{len(records)} records, fewer than {folds} folds"
            rows.append(row)
            continue
        reports = evaluate(g, records, techniques, [threshold], folds, repeats, seed, jobs)
        row["techniques"] = {t.value: _technique_json(reports[(t, float(threshold))]) for t in techniques}
        rows.append(row)
        if op == ALL_ROW or len(groups) == 1:
            pooled = {t: reports[(t, float(threshold))] for t in techniques}

    comparisons = []
    pairs = [(a, b) for a, b in ((Technique.DICHOTOMIC, Technique.BINARY), (Technique.DICHOTOMIC, Technique.TC), (Technique.BINARY, Technique.TC)) if a in pooled and b in pooled]
    for a, b in pairs:
        for metric in _METRICS:
            xs = [getattr(s, metric) for s in pooled[a].scores]
            ys = [getattr(s, metric) for s in pooled[b].scores]
            res = mann_whitney_u(xs, ys)
            comparisons.append(
                {"a": a.value, "b": b.value, "metric": metric, "u": res.u, "pvalue": res.pvalue, "method": res.method}
            )

    return {
        "threshold": threshold,
        "folds": folds,
        "repeats": repeats,
        "seed": seed,
        "techniques": [t.value for t in techniques],
        "rows": rows,
        "mann_whitney": {
            "note": f"exact below sample size {EXACT_BELOW}, else normal approximation with tie and continuity correction",
            "tests": comparisons,
        },
    }


def render_text(report: dict) -> str:
    techs = report["techniques"]
    header = ["operator", "#mut"]
    for metric in ("P", "R", "F", "medF"):
        header += [f"{metric}({t})" for t in techs]
    lines = [header]
    for row in report["rows"]:
        cells = [row["operator"], str(row["mutants"])]
        if "skipped" in row:
            lines.append(cells + ["skipped"])
            continue
        data = row["techniques"]
        for metric in _METRICS:
            cells += [f"{data[t]['mean'][metric]:.2f}" for t in techs]
        cells += [f"{data[t]['median']['fscore']:.2f}" for t in techs]
        lines.append(cells)
    widths = [max(len(r[i]) for r in lines if i < len(r)) for i in range(len(header))]
    out = [
        "  ".join(cell.rjust(widths[i]) if i else cell.ljust(widths[i]) for i, cell in enumerate(r)).rstrip()
        for r in lines
    ]
    out.insert(
        0,
        f"threshold={report['threshold']} folds={report['folds']} repeats={report['repeats']} seed={report['seed']}",
    )
    tests = report["mann_whitney"]["tests"]
    if tests:
        out.append("")
        out.append(f"Mann-Whitney ({report['mann_whitney']['note']}):")
        for t in tests:
            out.append(f"  {t['a']} vs {t['b']} {t['metric']}: U={t['u']:.1f} p={t['pvalue']:.3g} ({t['method']})")
    return "\n".join(out) + "\n"


def render_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["operator", "technique", "threshold", "mutants", "precision", "recall", "fscore", "median_fscore"])
    for row in report["rows"]:
        if "skipped" in row:
            continue
        for tech, data in row["techniques"].items():
            m = data["mean"]
            writer.writerow(
                [row["operator"], tech, report["threshold"], row["mutants"], m["precision"], m["recall"], m["fscore"], data["median"]["fscore"]]
            )
    return buf.getvalue()


def sweep_rows(sweep: dict[float, MetricTriple]) -> list[dict]:
    return [{"threshold": th, **_triple_json(t)} for th, t in sweep.items()]


def render_sweep_text(sweep: dict[float, MetricTriple]) -> str:
    lines = [f"{'threshold':>9}  {'P':>6}  {'R':>6}  {'F':>6}"]
    for th, t in sweep.items():
        lines.append(f"{th:>9.2f}  {t.precision:>6.3f}  {t.recall:>6.3f}  {t.fscore:>6.3f}")
    return "\n".join(lines) + "\n"


def render_sweep_csv(sweep: dict[float, MetricTriple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["threshold", "precision", "recall", "fscore"])
    for th, t in sweep.items():
        writer.writerow([th, t.precision, t.recall, t.fscore])
    return buf.getvalue()
