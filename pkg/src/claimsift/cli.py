"""Operator entry points: ingest, tune, evaluate, serve, gen-demo.

Every subcommand is reproducible: identical flags and seeds produce identical
output files. Diagnostics go to standard error; results go to files.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import demo
from .classify import import_scores, keyword_classify, threshold_predict
from .corpus import (
    CorpusError,
    filter_passages,
    is_english,
    load_documents,
    load_passages,
    window_passages,
)
from .hpo import split_passages, tune_svm_baseline
from .metrics import evaluate
from .schema import load_lexicon, load_schema, write_jsonl
from .service import ServiceConfig, create_app
from .svm import load_svm, save_svm, svm_predict
from .tfidf import load_tfidf, save_tfidf, tfidf_transform


def _stable_dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def run_ingest(args) -> int:
    schema = load_schema(args.schema)
    lexicon = load_lexicon(args.lexicon)
    lexicon.validate(schema)
    documents = load_documents(args.docs, format=args.format)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    english_docs = [d for d in documents if is_english(d.text)]
    all_passages = []
    kept = []
    for doc in english_docs:
        windows = window_passages(doc, window=args.window)
        all_passages.extend(windows)
        kept.extend(filter_passages(windows, lexicon))

    class_hits = {str(cid): 0 for cid in schema.class_ids}
    brand_hits = 0
    for passage in kept:
        for cid, kws in passage.matched_issue_keywords.items():
            class_hits[str(cid)] += len(kws)
        brand_hits += len(passage.matched_brands)

    _stable_dump(schema.to_dict(), out / "schema.json")
    _stable_dump(lexicon.to_dict(), out / "lexicon.json")
    write_jsonl(out / "documents.jsonl", (d.to_dict() for d in english_docs))
    write_jsonl(out / "passages.jsonl", (p.to_dict() for p in kept))
    report = {
        "documents_total": len(documents),
        "documents_english": len(english_docs),
        "passages_total": len(all_passages),
        "passages_kept": len(kept),
        "passages_dropped": len(all_passages) - len(kept),
        "issue_keyword_hits_by_class": class_hits,
        "brand_hits": brand_hits,
    }
    _stable_dump(report, out / "ingest_report.json")
    if not documents:
        print("warning: no input documents; wrote an empty corpus", file=sys.stderr)
    print(f"ingested {len(kept)}/{len(all_passages)} passages into {out}", file=sys.stderr)
    return 0


def _load_labeled_corpus(corpus_dir: Path):
    passages = load_passages(corpus_dir / "passages.jsonl")
    labeled = [p for p in passages if p.gold_labels is not None]
    if not labeled:
        raise CorpusError(f"{corpus_dir}: corpus has no labeled passages")
    return passages, labeled


def run_tune(args) -> int:
    corpus_dir = Path(args.corpus)
    _, labeled = _load_labeled_corpus(corpus_dir)
    schema = load_schema(corpus_dir / "schema.json")
    train, val, test = split_passages(labeled, args.split_seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    seeds = [int(s) for s in args.seeds.split(",")]
    result = tune_svm_baseline(
        train,
        val,
        n_trials=args.trials,
        seeds=seeds,
        test=test,
        class_ids=schema.class_ids,
        trial_log_dir=out,
    )

    best_records = []
    for seed_result in result.per_seed:
        model_dir = out / "models" / f"seed{seed_result.seed}"
        model_dir.mkdir(parents=True, exist_ok=True)
        save_tfidf(seed_result.tfidf, model_dir / "vocabulary.tsv")
        save_svm(seed_result.svm, model_dir / "weights.csv")
        best_records.append(
            {
                "seed": seed_result.seed,
                "config": seed_result.config,
                "val_weighted_f1": seed_result.val_weighted_f1,
                "test": seed_result.test_report.to_json_dict() if seed_result.test_report else None,
            }
        )
    _stable_dump(best_records, out / "best_configs.json")

    lines = ["metric\tmean\tstd"]
    for key in sorted(result.mean_test):
        lines.append(f"{key}\t{result.mean_test[key]:.4f}\t{result.std_test[key]:.4f}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"tuned {len(seeds)} seeds x {args.trials} trials; summary in {out}", file=sys.stderr)
    return 0


def run_evaluate(args) -> int:
    corpus_dir = Path(args.corpus)
    _, labeled = _load_labeled_corpus(corpus_dir)
    lexicon = load_lexicon(corpus_dir / "lexicon.json")
    _, _, test = split_passages(labeled, args.split_seed)
    gold = {p.id: p.gold_labels for p in test}

    if args.pred == "keyword":
        pred = {p.id: keyword_classify(p, lexicon) for p in test}
    elif args.pred == "svm-model":
        if not args.model:
            raise CorpusError("--pred svm-model requires --model DIR")
        tfidf = load_tfidf(Path(args.model) / "vocabulary.tsv")
        svm = load_svm(Path(args.model) / "weights.csv")
        pred = {p.id: svm_predict(svm, tfidf_transform(tfidf, p.text))[1] for p in test}
    elif args.pred == "score-matrix":
        if not args.scores:
            raise CorpusError("--pred score-matrix requires --scores FILE")
        matrix = import_scores(args.scores)
        labels = threshold_predict(matrix, args.threshold).labels
        missing = [p.id for p in test if p.id not in labels]
        if missing:
            raise CorpusError(f"score matrix is missing test passages: {missing[:5]}")
        pred = {p.id: labels[p.id] for p in test}
    else:  # pragma: no cover - argparse restricts choices
        raise CorpusError(f"unknown --pred {args.pred}")

    report = evaluate(pred, gold)
    out = Path(args.out) if args.out else corpus_dir / "eval"
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    (out / "report.txt").write_text(report.to_kv_text(), encoding="utf-8")
    print(report.to_kv_text(), end="")
    print(f"reports written to {out}", file=sys.stderr)
    return 0


def run_gen_demo(args) -> int:
    stats = demo.generate_demo_corpus(args.seed, args.out)
    print(
        f"generated {stats['passages']} passages over {stats['documents']} documents in {args.out}",
        file=sys.stderr,
    )
    return 0


def run_serve(args) -> int:
    if args.config:
        config = ServiceConfig.from_file(args.config)
    else:
        config = ServiceConfig(
            corpus_dir=Path(args.corpus),
            model_dir=Path(args.model) if args.model else None,
            scores_path=Path(args.scores) if args.scores else None,
            threshold=args.threshold,
            session_ttl_seconds=args.session_ttl,
            frontend_dir=Path(args.frontend) if args.frontend else None,
            host=args.host,
            port=args.port,
        )
    # Refuse to start on an invalid corpus: create_app validates schema,
    # lexicon and passages up front.
    app = create_app(config)
    import uvicorn

    uvicorn.run(app, host=config.host, port=config.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="claimsift")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a passage corpus from documents")
    p.add_argument("--docs", required=True)
    p.add_argument("--format", choices=["jsonl", "txt"], default="jsonl")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=3)
    p.set_defaults(func=run_ingest)

    p = sub.add_parser("tune", help="Bayesian-optimize the SVM baseline")
    p.add_argument("--corpus", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seeds", required=True, help="comma-separated list, e.g. 1,2,3,4,5")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=run_tune)

    p = sub.add_parser("evaluate", help="score predictions on the test split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pred", choices=["keyword", "svm-model", "score-matrix"], required=True)
    p.add_argument("--model")
    p.add_argument("--scores")
    p.add_argument("--threshold", type=float, default=0.33)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=run_evaluate)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--corpus")
    p.add_argument("--config")
    p.add_argument("--model")
    p.add_argument("--scores")
    p.add_argument("--threshold", type=float, default=0.33)
    p.add_argument("--session-ttl", type=int, default=1800)
    p.add_argument("--frontend")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=run_serve)

    p = sub.add_parser("gen-demo", help="generate the synthetic labeled demo corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=run_gen_demo)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve" and not args.config and not args.corpus:
        parser.error("serve requires --corpus or --config")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single-line CLI diagnostics
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
