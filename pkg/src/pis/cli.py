"""Command-line surface: compress, train, evaluate, latency, noise.

Exit codes: 0 success, 1 usage error, 2 data error.  ``--records`` falls back
to the ``PIS_RECORDS`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import PisError
from .pipeline import (
    DEFAULT_NOISE_LEXICON,
    PipelineConfig,
    compress_corpus,
    evaluate,
    ingest_corpus,
    inject_noise,
    latency_probe,
    render_compression,
    render_evaluation,
)
from .ratio_policy import TrainConfig, save_model, train
from .scoring import CorpusStats, Scorer, load_encoder_records

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="pipeline config JSON")
    parser.add_argument("--records", help="encoder-record JSON Lines file")
    parser.add_argument("--model", help="trained policy model file")
    parser.add_argument("--ratio", type=float, help="fixed removal ratio on the 0.1 grid")
    parser.add_argument("--seed", type=int, help="run seed")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--workers", type=int, default=1, help="document worker pool size")


def build_parser() -> _Parser:
    parser = _Parser(prog="pis", description="Importance-sampling prompt compression")
    commands = parser.add_subparsers(dest="command", required=True)

    compress = commands.add_parser("compress", help="compress a JSON Lines corpus")
    compress.add_argument("corpus", help="corpus JSON Lines file")
    _add_common_flags(compress)

    train_cmd = commands.add_parser("train", help="train the ratio policy")
    train_cmd.add_argument("corpus", help="training corpus JSON Lines file")
    train_cmd.add_argument("--config", help="training config JSON")
    train_cmd.add_argument("--records", help="encoder-record JSON Lines file")
    train_cmd.add_argument("--seed", type=int, default=0)
    train_cmd.add_argument("--out", required=True, help="path for the trained model")
    train_cmd.add_argument("--gamma-tf", type=float, default=0.5, dest="gamma_tf")

    evaluate_cmd = commands.add_parser("evaluate", help="compress and score a corpus")
    evaluate_cmd.add_argument("corpus", help="corpus JSON Lines file")
    _add_common_flags(evaluate_cmd)

    latency = commands.add_parser("latency", help="time compression at several lengths")
    latency.add_argument(
        "--lengths",
        default="300,600,900,1200,1500",
        help="comma-separated word counts",
    )
    latency.add_argument("--repeats", type=int, default=5)
    _add_common_flags(latency)

    noise = commands.add_parser("noise", help="inject random words into text")
    noise.add_argument("--text", help="text to perturb")
    noise.add_argument("--in", dest="in_path", help="read the text from a file")
    noise.add_argument("--n-words", type=int, default=10)
    noise.add_argument("--lexicon", help="file with one lexicon word per line")
    noise.add_argument("--seed", type=int, default=0)
    noise.add_argument("--out", help="output file (default: stdout)")
    return parser


def _pipeline_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        cfg = PipelineConfig.from_json(args.config)
    else:
        cfg = PipelineConfig()
    if getattr(args, "ratio", None) is not None:
        cfg = PipelineConfig(
            ratio=args.ratio,
            model_path=None,
            gamma_tf=cfg.gamma_tf,
            roulette_enabled=cfg.roulette_enabled,
            similarity_threshold=cfg.similarity_threshold,
            seed=cfg.seed,
            records_path=cfg.records_path,
            report_format=cfg.report_format,
        )
    if getattr(args, "model", None) is not None:
        cfg.model_path = args.model
        cfg.ratio = None
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    records = getattr(args, "records", None) or os.environ.get("PIS_RECORDS")
    if records:
        cfg.records_path = records
    return cfg


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _run_compress(args) -> int:
    cfg = _pipeline_config(args)
    if cfg.ratio is None and cfg.model_path is None:
        print("pis compress: error: provide --ratio or --model", file=sys.stderr)
        return EXIT_USAGE
    documents = ingest_corpus(args.corpus)
    compressed = compress_corpus(documents, cfg, workers=args.workers)
    _emit(render_compression(compressed, cfg.report_format), args.out)
    return EXIT_OK


def _run_evaluate(args) -> int:
    cfg = _pipeline_config(args)
    if cfg.ratio is None and cfg.model_path is None:
        print("pis evaluate: error: provide --ratio or --model", file=sys.stderr)
        return EXIT_USAGE
    documents = ingest_corpus(args.corpus)
    aggregate, compressed = evaluate(documents, cfg, workers=args.workers)
    _emit(render_evaluation(aggregate, compressed, cfg.report_format), args.out)
    return EXIT_OK


def _run_train(args) -> int:
    cfg = TrainConfig.from_json(args.config) if args.config else TrainConfig()
    documents = ingest_corpus(args.corpus)
    records = None
    records_path = args.records or os.environ.get("PIS_RECORDS")
    if records_path:
        records = load_encoder_records(records_path)
    scorer = Scorer(
        CorpusStats.from_documents(documents), records, gamma_tf=args.gamma_tf
    )
    rng = np.random.default_rng(args.seed)
    policy, log = train(documents, scorer, cfg, rng)
    save_model(policy, args.out)
    for stats in log:
        print(
            f"episode {stats.episode:>3}  mean_reward {stats.mean_reward:+.4f}  "
            f"epsilon {stats.epsilon:.4f}  steps {stats.gradient_steps}"
        )
    print(f"model written to {args.out}")
    return EXIT_OK


def _run_latency(args) -> int:
    try:
        lengths = [int(piece) for piece in args.lengths.split(",") if piece.strip()]
    except ValueError:
        print("pis latency: error: --lengths must be comma-separated integers", file=sys.stderr)
        return EXIT_USAGE
    cfg = _pipeline_config(args)
    if cfg.ratio is None:
        cfg.ratio = 0.7
        cfg.model_path = None
    rows = latency_probe(lengths, cfg, repeats=args.repeats)
    lines = [f"{'tokens':>8}{'seconds':>12}"]
    for row in rows:
        lines.append(f"{row['tokens']:>8}{row['seconds']:>12.4f}")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def _run_noise(args) -> int:
    if (args.text is None) == (args.in_path is None):
        print("pis noise: error: provide exactly one of --text / --in", file=sys.stderr)
        return EXIT_USAGE
    if args.in_path:
        with open(args.in_path, "r", encoding="utf-8") as handle:
            text = handle.read()
    else:
        text = args.text
    lexicon = list(DEFAULT_NOISE_LEXICON)
    if args.lexicon:
        with open(args.lexicon, "r", encoding="utf-8") as handle:
            lexicon = [line.strip() for line in handle if line.strip()]
    rng = np.random.default_rng(args.seed)
    _emit(inject_noise(text, args.n_words, lexicon, rng), args.out)
    return EXIT_OK


_RUNNERS = {
    "compress": _run_compress,
    "train": _run_train,
    "evaluate": _run_evaluate,
    "latency": _run_latency,
    "noise": _run_noise,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _RUNNERS[args.command](args)
    except PisError as exc:
        print(f"pis {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"pis {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
