"""Command-line entry point: ``impactlab <subcommand> ...``.

Stages talk to each other only through files (graph, mutations, weights),
so any stage can be replaced by an external tool producing the same format.

Exit codes: 0 success, 2 input error, 3 failing baseline suite, 4 integrity
mismatch, 5 synthetic generation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .callgraph import graph_hash, load_graph, save_graph
from .errors import (
    GenerationError,
    GraphFormatError,
    GraphIntegrityError,
    ImpactLabError,
    MiniLangError,
    RedBaselineError,
)
from .evaluation import threshold_sweep, weight_histogram
from .evaluation.report import (
    build_report,
    render_csv,
    render_sweep_csv,
    render_sweep_text,
    render_text,
    sweep_rows,
)
from .learning import load_weights, save_weights, train
from .minilang import extract_call_graph, parse
from .mutation import ALL_OPERATORS, Operator, build_dataset, check_dataset, load_dataset, save_dataset
from .prediction import DEFAULT_THRESHOLD, predict, predict_tc
from .synth import SynthParams, generate_model, simulate_dataset

log = logging.getLogger("impactlab")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RED_BASELINE = 3
EXIT_INTEGRITY = 4
EXIT_GENERATION = 5

DEFAULT_CAP = 600
DEFAULT_SWEEP = tuple(round(i / 10, 1) for i in range(11))


class InputError(ImpactLabError):
    pass


# -- argument helpers --------------------------------------------------------


def _bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _threshold(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"threshold {text} is outside [0, 1]")
    return value


def _thresholds(text: str) -> list[float]:
    return [_threshold(part) for part in text.split(",") if part.strip()]


def _operators(text: str) -> list[Operator]:
    if text.strip().lower() == "all":
        return list(ALL_OPERATORS)
    try:
        return [Operator(part.strip().upper()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"operators must be drawn from {', '.join(o.value for o in ALL_OPERATORS)}")


def _algos(text: str, allowed: tuple[str, ...]) -> list[str]:
    algos = [part.strip().lower() for part in text.split(",") if part.strip()]
    bad = [a for a in algos if a not in allowed]
    if bad or not algos:
        raise argparse.ArgumentTypeError(f"--algo accepts {', '.join(allowed)}")
    return algos


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    return p


def _check_output(path: str | None) -> None:
    if path and path != "-":
        parent = Path(path).resolve().parent
        if not parent.is_dir():
            raise InputError(f"output directory does not exist: {parent}")


def _emit(data: bytes | str, path: str | None) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if not path or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def _load_graph_file(path: str):
    with _existing(path).open("rb") as fh:
        return load_graph(fh)


def _load_dataset_file(path: str, g):
    with _existing(path).open("rb") as fh:
        recorded_hash, records = load_dataset(fh)
    actual = graph_hash(g)
    if recorded_hash is not None and recorded_hash != actual:
        raise GraphIntegrityError(
            f"{path} was produced for graph {recorded_hash[:12]}..., not this graph ({actual[:12]}...)"
        )
    check_dataset(records, g)
    return records


# -- subcommands -------------------------------------------------------------


def cmd_extract(args: argparse.Namespace) -> int:
    source = _existing(args.program).read_text(encoding="utf-8")
    _check_output(args.output)
    g = extract_call_graph(parse(source), with_cha=args.cha)
    _emit(save_graph(g), args.output)
    log.info("extracted %d nodes, %d edges", len(g.nodes), len(g.edges))
    return EXIT_OK


def cmd_mutate(args: argparse.Namespace) -> int:
    source = _existing(args.program).read_text(encoding="utf-8")
    g = _load_graph_file(args.graph)
    _check_output(args.output)
    program = parse(source)
    records = build_dataset(program, g, args.operators, args.cap, args.seed, args.jobs)
    _emit(save_dataset(records, graph_hash(g)), args.output)
    counts = Counter(r.operator for r in records)
    for op in args.operators:
        print(f"{op.value}: {counts.get(op.value, 0)} mutants", file=sys.stderr)
    return EXIT_OK


def cmd_learn(args: argparse.Namespace) -> int:
    g = _load_graph_file(args.graph)
    records = _load_dataset_file(args.mutations, g)
    _check_output(args.output)
    w = train(g, records, args.algo)
    _emit(save_weights(w), args.output)
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    g = _load_graph_file(args.graph)
    if args.changed not in g:
        raise InputError(f"node {args.changed!r} is not in the graph")
    if args.weights:
        with _existing(args.weights).open("rb") as fh:
            w = load_weights(fh, g)
        result = predict(w, args.changed, args.threshold)
    else:
        result = predict_tc(g, args.changed)
    _emit(result.to_json() + "\n", args.output)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    g = _load_graph_file(args.graph)
    records = _load_dataset_file(args.mutations, g)
    _check_output(args.output)
    report = build_report(g, records, args.algo, args.threshold, args.folds, args.repeats, args.seed, args.jobs)
    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    elif args.format == "csv":
        text = render_csv(report)
    else:
        text = render_text(report)
    _emit(text, args.output)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    g = _load_graph_file(args.graph)
    records = _load_dataset_file(args.mutations, g)
    _check_output(args.output)
    sweep = threshold_sweep(g, records, args.algo, args.thresholds, args.folds, args.repeats, args.seed, args.jobs)
    if args.format == "json":
        text = json.dumps({"algo": args.algo, "seed": args.seed, "sweep": sweep_rows(sweep)}, indent=2) + "\n"
    elif args.format == "csv":
        text = render_sweep_csv(sweep)
    else:
        text = render_sweep_text(sweep)
    _emit(text, args.output)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    if not out_dir.is_dir():
        raise InputError(f"output directory does not exist: {out_dir}")
    params = SynthParams(args.apps, args.tests, args.density, tuple(args.palette), args.seed)
    model = generate_model(params)
    records = simulate_dataset(model, args.mutations, args.seed)
    (out_dir / "graph.jsonl").write_bytes(save_graph(model.graph))
    (out_dir / "mutations.jsonl").write_bytes(save_dataset(records, graph_hash(model.graph)))
    (out_dir / "planted.jsonl").write_bytes(save_weights(model.weights()))
    print(
        f"{len(model.graph.nodes)} nodes, {len(model.graph.edges)} edges, {len(records)} records -> {out_dir}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_histogram(args: argparse.Namespace) -> int:
    g = _load_graph_file(args.graph)
    with _existing(args.weights).open("rb") as fh:
        w = load_weights(fh, g)
    bins = weight_histogram(w, args.bins)
    if args.format == "json":
        text = json.dumps([{"low": lo, "high": hi, "percent": pct} for (lo, hi), pct in bins], indent=2) + "\n"
    elif args.format == "csv":
        text = "low,high,percent\n" + "".join(f"{lo},{hi},{pct}\n" for (lo, hi), pct in bins)
    else:
        text = "".join(f"[{lo:.2f}, {hi:.2f}{']' if i == len(bins) - 1 else '['}  {pct:6.2f}%\n" for i, ((lo, hi), pct) in enumerate(bins))
    _emit(text, args.output)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="impactlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_eval(p: argparse.ArgumentParser) -> None:
        p.add_argument("--folds", type=_positive, default=10)
        p.add_argument("--repeats", type=_positive, default=10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=_positive, default=1)
        p.add_argument("--format", choices=("json", "text", "csv"), default="text")
        p.add_argument("-o", "--output")

    p = sub.add_parser("extract", help="MiniLang program -> call graph")
    p.add_argument("program")
    p.add_argument("--cha", type=_bool, nargs="?", const=True, default=True,
                   help="resolve interface calls to every implementor (default: true)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("mutate", help="sample mutants and record which tests they break")
    p.add_argument("program")
    p.add_argument("graph")
    p.add_argument("--operators", type=_operators, default=list(ALL_OPERATORS))
    p.add_argument("--cap", type=_non_negative, default=DEFAULT_CAP, help="mutants per operator")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("learn", help="learn edge weights from a mutation dataset")
    p.add_argument("graph")
    p.add_argument("mutations")
    p.add_argument("--algo", choices=("binary", "dichotomic"), default="dichotomic")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("predict", help="predict the tests impacted by a change")
    p.add_argument("graph")
    p.add_argument("--changed", required=True)
    p.add_argument("--weights", help="learned weights; without it the transitive closure is used")
    p.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="cross-validated comparison of techniques")
    p.add_argument("graph")
    p.add_argument("mutations")
    p.add_argument("--algo", type=lambda s: _algos(s, ("tc", "binary", "dichotomic")),
                   default=["tc", "binary", "dichotomic"])
    p.add_argument("--threshold", type=_threshold, default=DEFAULT_THRESHOLD)
    common_eval(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="cross-validated metrics across thresholds")
    p.add_argument("graph")
    p.add_argument("mutations")
    p.add_argument("--algo", choices=("tc", "binary", "dichotomic"), default="dichotomic")
    p.add_argument("--thresholds", type=_thresholds, default=list(DEFAULT_SWEEP))
    common_eval(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a planted model and a simulated dataset")
    p.add_argument("--apps", type=_positive, required=True)
    p.add_argument("--tests", type=_positive, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--palette", type=_thresholds, default=[0.0, 0.5, 0.9])
    p.add_argument("--mutations", type=_positive, default=20, help="simulated mutations per application node")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("histogram", help="distribution of learned weights")
    p.add_argument("graph")
    p.add_argument("weights")
    p.add_argument("--bins", type=_positive, default=10)
    p.add_argument("--format", choices=("json", "text", "csv"), default="text")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_histogram)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except RedBaselineError as exc:
        print(f"impactlab: {exc}", file=sys.stderr)
        return EXIT_RED_BASELINE
    except GraphIntegrityError as exc:
        print(f"impactlab: integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except GenerationError as exc:
        print(f"impactlab: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except (InputError, GraphFormatError, MiniLangError, ImpactLabError, OSError, ValueError) as exc:
        print(f"impactlab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
