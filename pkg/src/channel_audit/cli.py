"""`audit` command line: one subcommand per pipeline stage.

    audit ingest    --in raw.jsonl --format jsonl --out corpus.jsonl
    audit crawl     --ids ids.txt --endpoint http://127.0.0.1:8900 --out corpus.jsonl
    audit sentiment --corpus corpus.jsonl --out sentiment.jsonl
    audit features  --corpus corpus.jsonl --out matrix.csv
    audit stats     --matrix matrix.csv --report ks.json
    audit rank      --matrix matrix.csv --out ranking.json          (feature ranking)
    audit rank      --model model.json --corpus corpus.jsonl --out ranking.json
    audit train     --matrix matrix.csv --kind rf --out model.json
    audit eval      --matrix matrix.csv --kind rf --folds 10 --seed 7
    audit serve     --config audit.toml

Each stage reads and writes plain files (JSONL corpus, CSV matrix with a JSON
sidecar, JSON model/report), so stages compose through the filesystem.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .collector import CollectorError, FetchPolicy, http_crawl
from .corpus import CorpusError, load_corpus, propagate_labels, save_corpus
from .features import (
    FeatureSpec,
    build_vocabularies,
    extract_matrix,
    preprocess,
    read_matrix_csv,
    read_sidecar,
    write_matrix_csv,
    write_sidecar,
)
from .learners import (
    ModelFormatError,
    evaluate_cv,
    load_model,
    rank_channels,
    save_model,
    train,
)
from .service.config import ConfigError
from .stats import info_gain_rank, ks_two_sample
from .textlytics import analyze_channel


class CliError(Exception):
    """User-facing failure: message printed to stderr, exit code 1."""


def sidecar_path(matrix_path) -> Path:
    """Sidecar convention: ``matrix.csv`` travels with ``matrix.sidecar.json``."""
    return Path(matrix_path).with_suffix(".sidecar.json")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_ingest(args) -> int:
    corpus = load_corpus(args.infile, format=args.format)
    save_corpus(corpus, args.out)
    print(
        f"ingested {len(corpus.channels)} channels, "
        f"{len(corpus.videos)} videos -> {args.out}"
    )
    return 0


def cmd_crawl(args) -> int:
    ids = [
        line.strip()
        for line in Path(args.ids).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    policy = FetchPolicy(
        max_concurrent_requests=args.concurrency,
        min_inter_request_delay=args.delay_ms / 1000.0,
        page_settle_delay=args.settle_ms / 1000.0,
        retries=args.retries,
    )
    result = http_crawl(
        args.endpoint,
        ids,
        policy,
        with_posts=not args.no_posts,
        allow_external=args.i_understand_tos,
    )
    save_corpus(result.corpus, args.out)
    print(f"collected {result.ok_count}/{len(ids)} channels -> {args.out}")
    for channel_id, reason in sorted(result.failures.items()):
        print(f"  failed {channel_id}: {reason}", file=sys.stderr)
    return 0 if not result.failures else 1


def cmd_sentiment(args) -> int:
    corpus = load_corpus(args.corpus)
    with open(args.out, "w", encoding="utf-8") as fh:
        for channel in corpus.channels:
            block = analyze_channel(channel).to_json_dict()
            fh.write(json.dumps(block, ensure_ascii=False) + "\n")
    print(f"scored {len(corpus.channels)} channels -> {args.out}")
    return 0


def cmd_features(args) -> int:
    corpus = load_corpus(args.corpus)
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec = FeatureSpec.from_json_dict(json.load(fh))
    else:
        spec = FeatureSpec(creation_time_only=args.creation_time_only)
    vocabs = build_vocabularies(corpus.channels)
    labels = propagate_labels(corpus)
    if len(labels) < len(corpus.channels):
        print(
            f"note: {len(corpus.channels) - len(labels)} channels lack ground-truth "
            "videos; writing an unlabeled matrix",
            file=sys.stderr,
        )
        labels = None
    matrix = extract_matrix(corpus, spec, vocabs=vocabs, channel_labels=labels)
    report = None
    if not args.no_preprocess:
        matrix, report = preprocess(matrix)
    write_matrix_csv(matrix, args.out)
    write_sidecar(sidecar_path(args.out), spec, vocabs, report)
    print(
        f"extracted {matrix.values.shape[0]} x {matrix.values.shape[1]} matrix "
        f"-> {args.out} (+ {sidecar_path(args.out).name})"
    )
    return 0


def _labeled_matrix(path):
    matrix = read_matrix_csv(path)
    if matrix.labels is None:
        raise CliError(f"{path} carries no labels; this command needs labeled rows")
    return matrix


def cmd_stats(args) -> int:
    matrix = _labeled_matrix(args.matrix)
    suitable = matrix.values[matrix.labels == 0]
    disturbing = matrix.values[matrix.labels == 1]
    if len(suitable) == 0 or len(disturbing) == 0:
        raise CliError("both classes must be present for screening")
    rows = []
    for column, name in enumerate(matrix.names):
        result = ks_two_sample(suitable[:, column], disturbing[:, column])
        rows.append(
            {
                "feature": name,
                "d_statistic": result.d_statistic,
                "p_value": result.p_value,
                "method": result.method,
            }
        )
    rows.sort(key=lambda r: (-r["d_statistic"], r["feature"]))
    report = {
        "n_suitable": int(len(suitable)),
        "n_disturbing": int(len(disturbing)),
        "features": rows,
    }
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")
    print(f"screened {len(rows)} features -> {args.report}")
    return 0


def cmd_rank(args) -> int:
    if args.model and args.matrix:
        raise CliError("pass either --matrix (feature ranking) or --model (channels)")
    if args.model:
        if not args.corpus:
            raise CliError("--model ranking needs --corpus")
        model = load_model(args.model)
        corpus = load_corpus(args.corpus)
        ranking = rank_channels(model, corpus, severity=args.severity)
        payload = [entry.to_json_dict() for entry in ranking]
        label = f"{len(payload)} channels"
    elif args.matrix:
        matrix = _labeled_matrix(args.matrix)
        ranked = info_gain_rank(
            matrix.values, matrix.labels, names=matrix.names,
            folds=args.folds, seed=args.seed,
        )
        payload = [
            {"name": r.name, "mean_info_gain": r.mean_info_gain,
             "fold_scores": list(r.fold_scores)}
            for r in ranked
        ]
        label = f"{len(payload)} features"
    else:
        raise CliError("pass --matrix for feature ranking or --model for channels")
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    print(f"ranked {label} -> {args.out}")
    return 0


def cmd_train(args) -> int:
    matrix = _labeled_matrix(args.matrix)
    spec = vocabs = report = None
    sidecar = sidecar_path(args.matrix)
    if sidecar.exists():
        spec, vocabs, report = read_sidecar(sidecar)
    model = train(
        args.kind,
        matrix.values,
        matrix.labels,
        seed=args.seed,
        feature_names=matrix.names,
        feature_spec=spec,
        vocabularies=vocabs,
        preprocess_report=report,
    )
    save_model(model, args.out)
    print(f"trained {model.kind} on {matrix.values.shape[0]} rows -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    matrix = _labeled_matrix(args.matrix)
    report = evaluate_cv(
        args.kind, matrix.values, matrix.labels, folds=args.folds, seed=args.seed
    )
    payload = report.to_json_dict()
    text = json.dumps(payload, indent=1) + "\n"
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
        print(f"evaluated {args.kind} -> {args.report}")
    else:
        sys.stdout.write(text)
    auc = "n/a" if report.auc is None else f"{report.auc:.3f}"
    print(
        f"{args.kind}: weighted F1 {report.weighted.f1:.3f}, AUC {auc} "
        f"({args.folds}-fold, seed {args.seed})",
        file=sys.stderr,
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_config

    config = load_config(args.config)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="audit",
        description="Channel moderation pipeline: ingest, score, screen, train, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize a raw dump into a JSONL corpus")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("crawl", help="fetch channels from a metadata endpoint")
    p.add_argument("--ids", required=True, help="file with one channel id per line")
    p.add_argument("--endpoint", required=True)
    p.add_argument("--delay-ms", type=int, default=1000)
    p.add_argument("--concurrency", type=int, default=1)
    p.add_argument("--settle-ms", type=int, default=2000)
    p.add_argument("--retries", type=int, default=2)
    p.add_argument("--no-posts", action="store_true")
    p.add_argument(
        "--i-understand-tos",
        action="store_true",
        help="required to crawl anything that is not a local fixture server",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("sentiment", help="per-channel text/emoji signals as JSONL")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sentiment)

    p = sub.add_parser("features", help="extract the channel feature matrix")
    p.add_argument("--corpus", required=True)
    p.add_argument("--spec", help="feature-spec JSON (defaults to the full set)")
    p.add_argument("--creation-time-only", action="store_true")
    p.add_argument("--no-preprocess", action="store_true",
                   help="keep near-constant features instead of dropping them")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("stats", help="per-feature two-sample KS screening report")
    p.add_argument("--matrix", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("rank", help="rank features (--matrix) or channels (--model)")
    p.add_argument("--matrix")
    p.add_argument("--model")
    p.add_argument("--corpus")
    p.add_argument("--severity", choices=["prob", "prob_times_count"], default="prob")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("train", help="fit a classifier on a labeled matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--kind", default="rf")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="stratified cross-validated evaluation report")
    p.add_argument("--matrix", required=True)
    p.add_argument("--kind", default="rf")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--report", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the review-queue HTTP service")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        CliError,
        CollectorError,
        ConfigError,
        CorpusError,
        ModelFormatError,
        OSError,
        ValueError,
    ) as exc:
        print(f"audit {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
