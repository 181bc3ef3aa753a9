"""Command-line surface binding the library into reproducible pipelines.

Subcommands: ``stats``, ``features``, ``train``, ``eval``, ``sweep``,
``diffuse``, ``synth``. Every run emits a config echo sufficient to
reproduce it: JSON outputs embed it under a "config" key, CSV outputs get a
``<out>.config.json`` sidecar. Identical inputs and flags produce
byte-identical outputs regardless of ``--threads``.

Exit codes: 0 success, 2 invalid input or flags, 3 structurally degenerate
data (for example single-class labels).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable

from .degroot import DiffusionConfig, degroot_init, degroot_run
from .errors import DegenerateDataError, InputError
from .features import MODES, AggregationConfig, build_features
from .graph import build_graph, graph_stats
from .ingest import (
    BindPolicy,
    Dataset,
    LabelSet,
    bind_dataset,
    parse_labels,
    parse_scores,
    read_edges,
    write_edges,
    write_labels,
    write_scores,
)
from .learn import LearnConfig, cross_validate, threshold_sweep, train_logreg
from .serialize import csv_line, dump_json, fmt_float
from .synth import SynthConfig, generate, planted_labels, user_ids

SWEEP_HEADER = "threshold,precision,recall,f1,roc_auc"
METRIC_KEYS = ("precision", "recall", "f1", "roc_auc")


def _parse_file(path: str, parser: Callable, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return parser(fh)
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc}") from exc


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_config_sidecar(out: str, config: dict) -> None:
    # CSV outputs keep the reproducibility echo next to the data file
    if out != "-":
        _write_text(out + ".config.json", dump_json(config))


def _load_dataset(args, need_labels: bool = False) -> Dataset:
    graph = build_graph(_parse_file(args.edges, read_edges, "edge"))
    scores = _parse_file(args.scores, parse_scores, "score")
    if getattr(args, "labels", None):
        labels = _parse_file(args.labels, parse_labels, "label")
    elif need_labels:
        raise InputError("this subcommand requires --labels")
    else:
        labels = LabelSet()
    policy = BindPolicy(
        restrict_to_wcc=getattr(args, "wcc_only", False),
        allow_zero_post_users=getattr(args, "allow_zero_posts", False),
    )
    dataset = bind_dataset(graph, scores, labels, policy)
    summary_line = (
        "{"
        + ", ".join(f'"{k}": {v}' for k, v in dataset.discard_summary.items())
        + "}"
    )
    if getattr(args, "report", None):
        _write_text(args.report, summary_line + "\n")
    else:
        print(summary_line, file=sys.stderr)
    return dataset


def _agg_config(args) -> AggregationConfig:
    return AggregationConfig(
        tau_t=args.tau_t,
        tau_fixed=args.tau_fixed,
        k_bins=args.bins,
        softmax_histograms=not args.raw_histograms,
    )


def _learn_config(args) -> LearnConfig:
    return LearnConfig(
        folds=args.folds,
        seed=args.seed,
        l2_lambda=args.l2_lambda,
        decision_threshold=args.decision_threshold,
        select_threshold=args.select_threshold,
        threads=args.threads,
    )


def _diffusion_config(args) -> DiffusionConfig:
    return DiffusionConfig(
        direction=args.direction,
        max_iters=args.max_iters,
        tol=args.tol,
        init=args.init,
        threshold=args.belief_threshold,
    )


def _io_echo(args, *names: str) -> dict:
    echo: dict = {"subcommand": args.subcommand}
    for name in names:
        echo[name] = getattr(args, name, None)
    return echo


# -- subcommand implementations ----------------------------------------------


def cmd_stats(args) -> int:
    graph = build_graph(_parse_file(args.edges, read_edges, "edge"))
    stats = graph_stats(
        graph,
        k_min=args.k_min,
        continuity_correction=not args.no_continuity_correction,
    )
    payload = {
        "config": {
            **_io_echo(args, "edges"),
            "k_min": args.k_min,
            "continuity_correction": not args.no_continuity_correction,
        },
        **stats.to_dict(),
    }
    _write_text(args.out, dump_json(payload))
    return 0


def cmd_features(args) -> int:
    dataset = _load_dataset(args)
    fm = build_features(dataset, args.mode, _agg_config(args), threads=args.threads)
    lines = ["user_id," + ",".join(fm.schema)]
    for uid, row in zip(fm.user_ids, fm.values):
        lines.append(csv_line([uid, *[float(v) for v in row]]))
    _write_text(args.out, "\n".join(lines) + "\n")
    _write_config_sidecar(args.out, _feature_echo(args))
    return 0


def _feature_echo(args) -> dict:
    # no threads field: outputs are thread-count independent by contract
    return {
        **_io_echo(args, "edges", "scores", "labels"),
        "mode": args.mode,
        "tau_t": args.tau_t,
        "tau_fixed": args.tau_fixed,
        "k_bins": args.bins,
        "softmax_histograms": not args.raw_histograms,
        "wcc_only": args.wcc_only,
    }


def cmd_train(args) -> int:
    dataset = _load_dataset(args, need_labels=True)
    fm = build_features(dataset, args.mode, _agg_config(args), threads=args.threads)
    node_idx, y = dataset.labeled_indices()
    if len(y) == 0:
        raise DegenerateDataError("no labeled users to train on")
    model = train_logreg(fm.values[node_idx], y, _learn_config(args), schema=fm.schema)
    payload = {
        "config": {
            **_feature_echo(args),
            "l2_lambda": args.l2_lambda,
            "decision_threshold": args.decision_threshold,
        },
        "model": model.to_dict(),
    }
    _write_text(args.out, dump_json(payload))
    return 0


def _sweep_rows(dataset: Dataset, thresholds: list[int], tau_t: float) -> str:
    rows = threshold_sweep(dataset, thresholds, tau_t=tau_t)
    lines = [SWEEP_HEADER]
    for row in rows:
        lines.append(
            csv_line([row["threshold"], *[float(row[m]) for m in METRIC_KEYS]])
        )
    return "\n".join(lines) + "\n"


def _parse_thresholds(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise InputError(f"bad threshold list {text!r}: {exc}") from exc
    if not values:
        raise InputError("threshold list is empty")
    return values


def cmd_eval(args) -> int:
    dataset = _load_dataset(args, need_labels=True)
    if args.sweep is not None:
        if args.mode != "fixed":
            raise InputError("--sweep applies to --mode fixed only")
        thresholds = _parse_thresholds(args.sweep)
        text = _sweep_rows(dataset, thresholds, args.tau_t)
        _write_text(args.out, text)
        _write_config_sidecar(
            args.out, {**_feature_echo(args), "sweep": thresholds}
        )
        return 0
    report = cross_validate(
        dataset,
        args.mode,
        agg=_agg_config(args),
        config=_learn_config(args),
        diffusion=_diffusion_config(args) if args.mode == "degroot" else None,
    )
    report.config = {**_io_echo(args, "edges", "scores", "labels"), **report.config}
    _write_text(args.out, report.to_json())
    return 0


def cmd_sweep(args) -> int:
    dataset = _load_dataset(args, need_labels=True)
    thresholds = _parse_thresholds(args.thresholds)
    text = _sweep_rows(dataset, thresholds, args.tau_t)
    _write_text(args.out, text)
    _write_config_sidecar(
        args.out,
        {
            **_io_echo(args, "edges", "scores", "labels"),
            "tau_t": args.tau_t,
            "thresholds": thresholds,
        },
    )
    return 0


def cmd_diffuse(args) -> int:
    dataset = _load_dataset(args)
    config = _diffusion_config(args)
    agg = _agg_config(args)
    beliefs, log = degroot_run(
        dataset.graph,
        degroot_init(dataset, agg, init=config.init),
        max_iters=config.max_iters,
        tol=config.tol,
        direction=config.direction,
    )
    lines = ["user_id,belief"]
    for uid, b in zip(dataset.graph.ids, beliefs.values):
        lines.append(f"{uid},{fmt_float(float(b))}")
    _write_text(args.out, "\n".join(lines) + "\n")
    log_lines = [
        f'{{"iteration": {entry["iteration"]}, '
        f'"max_change": {fmt_float(entry["max_change"])}}}'
        for entry in log
    ]
    if args.out != "-":
        _write_text(args.out + ".convergence.jsonl", "\n".join(log_lines) + "\n")
    _write_config_sidecar(
        args.out,
        {
            **_io_echo(args, "edges", "scores"),
            "direction": config.direction,
            "max_iters": config.max_iters,
            "tol": config.tol,
            "init": config.init,
            "belief_threshold": config.threshold,
            "tau_t": args.tau_t,
            "tau_fixed": args.tau_fixed,
            "iterations": beliefs.iteration,
        },
    )
    return 0


def cmd_synth(args) -> int:
    config = SynthConfig(
        n_users=args.n,
        hate_fraction=args.hate_fraction,
        p_in=args.p_in,
        p_out=args.p_out,
        posts_per_user=(args.posts_min, args.posts_max),
        score_dist_hate=tuple(_parse_beta(args.beta_hate)),
        score_dist_normal=tuple(_parse_beta(args.beta_normal)),
        ambiguity=args.ambiguity,
        seed=args.seed,
        n_labeled=args.n_labeled,
        scores_only_labeled=args.scores_only_labeled,
    )
    dataset = generate(config)
    outdir = Path(args.out_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {outdir}: {exc}") from exc

    with open(outdir / "edges.csv", "w", encoding="utf-8") as fh:
        write_edges(dataset.graph, fh)
    with open(outdir / "scores.csv", "w", encoding="utf-8") as fh:
        write_scores(dataset.scores, fh)
    with open(outdir / "labels.csv", "w", encoding="utf-8") as fh:
        write_labels(dataset.labels, fh)
    truth = planted_labels(config)
    ids = user_ids(config.n_users)
    with open(outdir / "ground_truth.csv", "w", encoding="utf-8") as fh:
        for uid, label in zip(ids, truth):
            fh.write(f"{uid},{int(label)}\n")
    echo = {"subcommand": "synth", **config.to_dict(), "out_dir": str(outdir)}
    with open(outdir / "config.json", "w", encoding="utf-8") as fh:
        fh.write(dump_json(echo))
    return 0


def _parse_beta(text: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"expected 'a,b' Beta parameters, got {text!r}")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError as exc:
        raise InputError(f"bad Beta parameters {text!r}: {exc}") from exc


# -- parser assembly -----------------------------------------------------------


def _add_input_flags(p, scores: bool = True, labels: str = "no") -> None:
    p.add_argument("--edges", required=True, help="edge CSV: src,dst per line")
    if scores:
        p.add_argument(
            "--scores", required=True, help="score CSV: user_id,post_id,score"
        )
    if labels != "no":
        p.add_argument(
            "--labels",
            required=(labels == "required"),
            default=None,
            help="label CSV: user_id,label with label in {0,1}",
        )
    p.add_argument(
        "--wcc-only",
        action="store_true",
        help="restrict to the largest weakly connected component",
    )
    p.add_argument(
        "--allow-zero-posts",
        action="store_true",
        help="accept labeled users that have no score records",
    )
    p.add_argument(
        "--report",
        default=None,
        help="write the bind discard summary JSON here instead of stderr",
    )


def _add_agg_flags(p) -> None:
    p.add_argument("--tau-t", type=float, default=0.5, help="post-level threshold")
    p.add_argument(
        "--tau-fixed", type=int, default=3, help="flagged-post count threshold"
    )
    p.add_argument("--bins", type=int, default=10, help="histogram bin count")
    p.add_argument(
        "--raw-histograms",
        action="store_true",
        help="skip softmax normalization of histogram blocks",
    )


def _add_learn_flags(p) -> None:
    p.add_argument("--folds", type=int, default=5, help="cross-validation folds")
    p.add_argument("--seed", type=int, default=0, help="fold-assignment seed")
    p.add_argument("--l2-lambda", type=float, default=1.0, help="L2 penalty weight")
    p.add_argument(
        "--decision-threshold",
        type=float,
        default=0.5,
        help="probability cutoff for the positive class",
    )
    p.add_argument(
        "--select-threshold",
        action="store_true",
        help="pick the decision threshold by train-fold F1 instead",
    )


def _add_diffusion_flags(p) -> None:
    p.add_argument(
        "--direction",
        choices=("out", "in", "undirected"),
        default="out",
        help="neighbor set used in the averaging step",
    )
    p.add_argument("--max-iters", type=int, default=100, help="iteration cap")
    p.add_argument("--tol", type=float, default=1e-6, help="max-change stop tolerance")
    p.add_argument(
        "--init",
        choices=("fraction", "binary"),
        default="fraction",
        help="belief seeding: flagged-post fraction or naive classification",
    )
    p.add_argument(
        "--belief-threshold",
        type=float,
        default=0.5,
        help="belief cutoff for classification",
    )


def _add_threads_flag(p) -> None:
    p.add_argument(
        "--threads", type=int, default=1, help="worker cap (output independent of it)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hateagg",
        description="Classify hate-mongers by aggregating per-post hate scores "
        "over posting histories and ego networks.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, func, help_text: str):
        p = sub.add_parser(
            name,
            help=help_text,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        p.set_defaults(func=func)
        return p

    p = add("stats", cmd_stats, "network summary of an edge file")
    p.add_argument("--edges", required=True, help="edge CSV: src,dst per line")
    p.add_argument("--k-min", type=int, default=1, help="power-law fit lower cutoff")
    p.add_argument(
        "--no-continuity-correction",
        action="store_true",
        help="use k_min instead of k_min - 1/2 in the power-law estimator",
    )
    p.add_argument("--out", default="-", help="output JSON path ('-' for stdout)")

    p = add("features", cmd_features, "export the per-user feature matrix")
    _add_input_flags(p, labels="optional")
    p.add_argument(
        "--mode", choices=MODES, default="multimodal", help="feature block selection"
    )
    _add_agg_flags(p)
    _add_threads_flag(p)
    p.add_argument("--out", required=True, help="output CSV path")

    p = add("train", cmd_train, "fit the classifier on all labeled users")
    _add_input_flags(p, labels="required")
    p.add_argument("--mode", choices=MODES, default="multimodal")
    _add_agg_flags(p)
    _add_learn_flags(p)
    _add_threads_flag(p)
    p.add_argument("--out", default="-", help="output JSON path ('-' for stdout)")

    p = add("eval", cmd_eval, "stratified cross-validated evaluation")
    _add_input_flags(p, labels="required")
    p.add_argument(
        "--mode",
        choices=MODES + ("degroot",),
        default="multimodal",
        help="feature block selection or diffusion baseline",
    )
    _add_agg_flags(p)
    _add_learn_flags(p)
    _add_diffusion_flags(p)
    _add_threads_flag(p)
    p.add_argument(
        "--sweep",
        default=None,
        metavar="T1,T2,...",
        help="with --mode fixed: sweep count thresholds, emit CSV instead",
    )
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")

    p = add("sweep", cmd_sweep, "fixed-threshold sweep over count cutoffs")
    _add_input_flags(p, labels="required")
    p.add_argument("--tau-t", type=float, default=0.5, help="post-level threshold")
    p.add_argument(
        "--thresholds",
        default="1,3,10,50,100",
        help="comma-separated ascending count cutoffs",
    )
    p.add_argument("--out", required=True, help="output CSV path")

    p = add("diffuse", cmd_diffuse, "run the belief-averaging baseline")
    _add_input_flags(p, labels="optional")
    _add_agg_flags(p)
    _add_diffusion_flags(p)
    p.add_argument("--out", required=True, help="output beliefs CSV path")

    p = add("synth", cmd_synth, "generate a planted-community dataset")
    p.add_argument("--n", type=int, required=True, help="number of users")
    p.add_argument("--hate-fraction", type=float, default=0.25)
    p.add_argument("--p-in", type=float, default=0.05, help="within-block edge probability")
    p.add_argument("--p-out", type=float, default=0.005, help="cross-block edge probability")
    p.add_argument("--posts-min", type=int, default=30)
    p.add_argument("--posts-max", type=int, default=60)
    p.add_argument("--beta-hate", default="8,2", help="Beta a,b for hateful users")
    p.add_argument("--beta-normal", default="2,8", help="Beta a,b for normal users")
    p.add_argument(
        "--ambiguity",
        type=float,
        default=0.5,
        help="chance a hateful user's post uses the normal distribution",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--n-labeled", type=int, default=None, help="label only a random subset"
    )
    p.add_argument(
        "--scores-only-labeled",
        action="store_true",
        help="generate posts for labeled users only",
    )
    p.add_argument("--out-dir", required=True, help="directory for the dataset files")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
