"""Command line front end.

One executable with a subcommand per pipeline stage, so the whole flow
(generate, label, extract, train, crossval, serve) scripts cleanly. Report
subcommands drop PNG figures next to their JSON output; pass --no-figures
to suppress them.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .analytics import compute_stats
from .blacklist import attach_verdicts, label_post, load_snapshot, snapshot_query
from .campaign import cluster_posts, false_negative_rate, is_campaign
from .features import EncoderVocabularies, bundled_lexicons, extract_all
from .ingest import (
    SyntheticProfile,
    generate_synthetic,
    load_corpus,
    parse_graph_post,
    save_corpus,
    synthetic_snapshot,
    write_snapshot,
)
from .ml import (
    accuracy_vs_k,
    classify,
    cross_validate,
    from_vectors,
    load_model,
    rank_features,
    ratio_experiment,
    save_model,
    select_top_k,
    train,
)
from .model import (
    LEGITIMATE,
    MALICIOUS,
    canonical_schema,
    dump_json_line,
    post_from_dict,
    read_json_lines,
    schema_from_json,
    validate_post,
    vector_from_dict,
    vector_to_dict,
)
from .urls import FixtureFetcher, ResolutionPolicy, extract_urls, resolve

USAGE_ERROR = 1
DATA_ERROR = 2

_KINDS = {
    "nb": "naive_bayes",
    "dt": "decision_tree",
    "rf": "random_forest",
    "ada": "adaboost",
}
_FORMATS = {"graph": "graph_json_lines", "canonical": "canonical_json_lines"}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract here reserves 2 for data
    # problems, so usage failures are remapped to 1.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _hp_pair(text: str) -> tuple:
    key, sep, raw = text.partition("=")
    key, raw = key.strip(), raw.strip()
    if not sep or not key or not raw:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    if raw.lower() in ("none", "null"):
        return key, None
    try:
        return key, int(raw)
    except ValueError:
        pass
    try:
        return key, float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{key}: expected a number or none, got {raw!r}")


def _ratio_list(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty ratio list")
    return values


def _emit(human_lines: Sequence[str], summary: dict) -> None:
    for line in human_lines:
        print(line)
    print(dump_json_line(summary))


def _meta_path(vector_path: str) -> str:
    return str(Path(vector_path).with_suffix(".meta.json"))


def _figure_base(out_path: str) -> str:
    return str(Path(out_path).with_suffix(""))


def _write_report(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dump_json_line(payload))
        handle.write("\n")


def _read_vector_file(path: str) -> list:
    vectors = []
    for lineno, raw in read_json_lines(path):
        try:
            vectors.append(vector_from_dict(raw))
        except (KeyError, TypeError, ValueError):
            raise ValueError(f"{path}:{lineno}: bad vector record")
    if not vectors:
        raise ValueError(f"{path}: no vectors")
    return vectors


def _load_meta(args) -> tuple:
    """Schema and vocabularies from the extract sidecar, when present."""
    path = args.meta or _meta_path(args.in_)
    if not Path(path).exists():
        if args.meta:
            raise ValueError(f"{path}: no such meta file")
        return canonical_schema(), None
    with open(path, "r", encoding="utf-8") as handle:
        raw = json.load(handle)
    try:
        schema = schema_from_json(json.dumps(raw["schema"]))
        vocab = EncoderVocabularies.from_dict(raw["vocabularies"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed meta file ({exc})")
    return schema, vocab


def _load_dataset(args):
    schema, vocab = _load_meta(args)
    ds = from_vectors(_read_vector_file(args.in_), schema)
    return ds, vocab


# ---------------------------------------------------------------------------
# Subcommands


def cmd_generate(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.malicious is not None:
        overrides["n_malicious"] = args.malicious
    if args.legitimate is not None:
        overrides["n_legitimate"] = args.legitimate
    profile = replace(SyntheticProfile(), **overrides)
    corpus = generate_synthetic(profile)
    counts = {
        MALICIOUS: sum(1 for v in corpus.labels.values() if v == MALICIOUS),
        LEGITIMATE: sum(1 for v in corpus.labels.values() if v == LEGITIMATE),
    }
    # Labels stay out of the file: deriving them is the label step's job.
    save_corpus(replace(corpus, labels=None), args.out)
    lines = [
        f"generated {len(corpus)} posts "
        f"({counts[MALICIOUS]} malicious, {counts[LEGITIMATE]} legitimate, "
        f"seed {profile.seed}) -> {args.out}"
    ]
    summary = {
        "command": "generate",
        "posts": len(corpus),
        "seed": profile.seed,
        "corpus": args.out,
        "snapshot": args.snapshot_out,
    }
    if args.snapshot_out:
        n = write_snapshot(synthetic_snapshot(), args.snapshot_out)
        lines.append(f"wrote {n} provider snapshot entries -> {args.snapshot_out}")
    _emit(lines, summary)
    return 0


def cmd_label(args) -> int:
    corpus = load_corpus(args.in_, format=_FORMATS[args.format])
    query = snapshot_query(load_snapshot(args.snapshot))
    fetcher = FixtureFetcher.from_file(args.redirects) if args.redirects else FixtureFetcher({})
    policy = ResolutionPolicy()
    labels = {}
    for post in corpus.posts:
        records = [
            attach_verdicts(resolve(url, policy, fetcher), query)
            for url in extract_urls(post)
        ]
        labels[post.post_id] = label_post(post, records)
    save_corpus(replace(corpus, labels=labels), args.out)
    n_mal = sum(1 for v in labels.values() if v == MALICIOUS)
    lines = [
        f"labeled {len(corpus)} posts: {n_mal} malicious, "
        f"{len(corpus) - n_mal} legitimate ({corpus.skipped} lines skipped) -> {args.out}"
    ]
    summary = {
        "command": "label",
        "posts": len(corpus),
        "malicious": n_mal,
        "legitimate": len(corpus) - n_mal,
        "skipped": corpus.skipped,
        "out": args.out,
    }
    _emit(lines, summary)
    return 0


def cmd_extract(args) -> int:
    corpus = load_corpus(args.in_, format="canonical_json_lines")
    if corpus.labels is None:
        raise ValueError(f"{args.in_}: corpus carries no labels; run the label step first")
    vocab = EncoderVocabularies.build(corpus.posts)
    lex = bundled_lexicons()
    schema = canonical_schema()
    flagged: list[str] = []
    records = []
    for post in corpus.posts:
        label = corpus.label_of(post.post_id)
        if label is None:
            raise ValueError(f"post {post.post_id!r} has no label")
        vector = extract_all(post, extract_urls(post), vocab, lex, flagged)
        records.append(vector_to_dict(replace(vector, label=label)))
    with open(args.out, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(dump_json_line(record))
            handle.write("\n")
    meta_path = _meta_path(args.out)
    _write_report(
        meta_path,
        {
            "schema": json.loads(schema.to_json()),
            "vocabularies": vocab.to_dict(),
            # Basename only: a rerun elsewhere must yield identical bytes.
            "source": Path(args.in_).name,
            "flagged_post_ids": flagged,
        },
    )
    lines = [f"extracted {len(records)} vectors x {len(schema)} features -> {args.out} (meta {meta_path})"]
    if flagged:
        lines.append(f"warning: {len(flagged)} posts had unparseable primary URLs (link block zeroed)")
    _emit(
        lines,
        {
            "command": "extract",
            "vectors": len(records),
            "features": len(schema),
            "flagged": len(flagged),
            "out": args.out,
            "meta": meta_path,
        },
    )
    return 0


def cmd_train(args) -> int:
    ds, vocab = _load_dataset(args)
    if args.top_k is not None:
        ds = select_top_k(ds, args.top_k)
    kind = _KINDS[args.classifier]
    model = train(
        ds,
        kind,
        hyperparams=dict(args.hp) if args.hp else None,
        seed=args.seed,
        vocabularies=vocab,
    )
    save_model(model, args.model)
    _emit(
        [f"trained {kind} on {ds.n_rows} rows x {ds.n_features} features (seed {args.seed}) -> {args.model}"],
        {
            "command": "train",
            "classifier": kind,
            "rows": ds.n_rows,
            "features": ds.n_features,
            "seed": args.seed,
            "model": args.model,
        },
    )
    return 0


def cmd_crossval(args) -> int:
    ds, _ = _load_dataset(args)
    if args.top_k is not None:
        ds = select_top_k(ds, args.top_k)
    kind = _KINDS[args.classifier]
    report = cross_validate(
        ds, kind, hyperparams=dict(args.hp) if args.hp else None, folds=args.folds, seed=args.seed
    )
    payload = {
        "classifier": kind,
        "folds": args.folds,
        "seed": args.seed,
        "rows": ds.n_rows,
        "features": ds.n_features,
        "report": report.to_dict(),
    }
    _write_report(args.out, payload)
    _emit(
        [
            f"{kind} {args.folds}-fold accuracy {report.accuracy:.4f} "
            f"(malicious tpr {report.tpr[MALICIOUS]:.4f}, fpr {report.fpr[MALICIOUS]:.4f}) -> {args.out}"
        ],
        {"command": "crossval", "out": args.out, **payload},
    )
    return 0


def cmd_rank(args) -> int:
    ds, _ = _load_dataset(args)
    ranked = rank_features(ds)
    rows = [
        {
            "rank": position + 1,
            "index": index,
            "name": ds.schema.features[index].name,
            "group": ds.schema.features[index].group,
            "gain": gain,
        }
        for position, (index, gain) in enumerate(ranked)
    ]
    _write_report(args.out, {"features": rows})
    lines = ["top features by information gain:"]
    lines += [f"  {r['rank']:2d}. {r['name']} ({r['group']}) gain {r['gain']:.4f}" for r in rows[:10]]
    figures = []
    if not args.no_figures:
        from . import figures as fig

        path = _figure_base(args.out) + ".png"
        figures.append(fig.gain_figure([(r["name"], r["gain"]) for r in rows], path))
        lines.append(f"figure {path}")
    _emit(lines, {"command": "rank", "out": args.out, "features": len(rows), "figures": figures})
    return 0


def cmd_ratio(args) -> int:
    ds, _ = _load_dataset(args)
    import numpy as np

    positives = ds.subset_rows(np.flatnonzero(ds.y == 1))
    pool = ds.subset_rows(np.flatnonzero(ds.y == 0))
    kind = _KINDS[args.classifier]
    results = ratio_experiment(
        positives,
        pool,
        args.ratios,
        kind,
        hyperparams=dict(args.hp) if args.hp else None,
        folds=args.folds,
        seed=args.seed,
    )
    payload = {
        "classifier": kind,
        "folds": args.folds,
        "seed": args.seed,
        "results": [{"ratio": ratio, "report": rep.to_dict()} for ratio, rep in results],
    }
    _write_report(args.out, payload)
    lines = [f"{kind} across {len(results)} training ratios -> {args.out}"]
    lines += [
        f"  1:{ratio:g}  accuracy {rep.accuracy:.4f}  "
        f"tpr {rep.tpr[MALICIOUS]:.4f}  fpr {rep.fpr[MALICIOUS]:.4f}"
        for ratio, rep in results
    ]
    figures = []
    if not args.no_figures:
        from . import figures as fig

        path = _figure_base(args.out) + ".png"
        figures.append(fig.ratio_figure([(r, rep.to_dict()) for r, rep in results], path))
        lines.append(f"figure {path}")
    _emit(lines, {"command": "ratio", "out": args.out, "figures": figures})
    return 0


def cmd_topk(args) -> int:
    ds, _ = _load_dataset(args)
    ks = list(range(1, args.max_k + 1)) if args.max_k is not None else None
    kind = _KINDS[args.classifier]
    curve = accuracy_vs_k(
        ds,
        kind,
        hyperparams=dict(args.hp) if args.hp else None,
        folds=args.folds,
        seed=args.seed,
        ks=ks,
    )
    payload = {
        "classifier": kind,
        "folds": args.folds,
        "seed": args.seed,
        "curve": [{"k": k, "accuracy": acc} for k, acc in curve],
    }
    _write_report(args.out, payload)
    best_k, best_acc = max(curve, key=lambda pair: (pair[1], -pair[0]))
    lines = [
        f"{kind} accuracy over k=1..{curve[-1][0]}: best k={best_k} at {best_acc:.4f}, "
        f"all features {curve[-1][1]:.4f} -> {args.out}"
    ]
    figures = []
    if not args.no_figures:
        from . import figures as fig

        path = _figure_base(args.out) + ".png"
        figures.append(fig.curve_figure(curve, path))
        lines.append(f"figure {path}")
    _emit(lines, {"command": "topk", "out": args.out, "best_k": best_k, "figures": figures})
    return 0


def cmd_cluster(args) -> int:
    corpus = load_corpus(args.in_, format="canonical_json_lines")
    if corpus.labels is not None:
        posts = [p for p in corpus.posts if corpus.label_of(p.post_id) == MALICIOUS]
        if not posts:
            raise ValueError(f"{args.in_}: no malicious posts to cluster")
    else:
        posts = list(corpus.posts)
    clusters = cluster_posts(posts)
    verdicts = [is_campaign(c) for c in clusters]
    fn_rate = false_negative_rate(posts) if corpus.labels is not None else None
    payload = {
        "posts_considered": len(posts),
        "labeled_input": corpus.labels is not None,
        "campaign_count": sum(1 for v in verdicts if v.is_campaign),
        "false_negative_rate": fn_rate,
        "clusters": [
            {
                "post_ids": list(c.post_ids),
                "author_count": c.author_count,
                "median_gap_minutes": v.median_gap_minutes,
                "is_campaign": v.is_campaign,
                "reasons": list(v.reasons),
                "representative_text": c.representative_text,
            }
            for c, v in zip(clusters, verdicts)
        ],
    }
    _write_report(args.out, payload)
    fn_text = "n/a (unlabeled input)" if fn_rate is None else f"{fn_rate:.4f}"
    _emit(
        [
            f"{len(clusters)} clusters over {len(posts)} posts, "
            f"{payload['campaign_count']} campaigns, false negative rate {fn_text} -> {args.out}"
        ],
        {"command": "cluster", "out": args.out, **{k: payload[k] for k in
         ("posts_considered", "campaign_count", "false_negative_rate")}},
    )
    return 0


def cmd_stats(args) -> int:
    corpus = load_corpus(args.in_, format="canonical_json_lines")
    stats = compute_stats(corpus)
    _write_report(args.out, stats.to_dict())
    n_mal = sum(1 for v in (corpus.labels or {}).values() if v == MALICIOUS)
    lines = [f"{n_mal} malicious / {len(corpus) - n_mal} legitimate posts -> {args.out}"]
    if stats.retention is not None:
        lines.append(
            f"retention: median {stats.retention.median_hours:.2f} h, "
            f"{stats.retention.within_5h_fraction:.0%} of malicious posts gone within 5 h"
        )
    figures = []
    if not args.no_figures:
        from . import figures as fig

        base = _figure_base(args.out)
        figures.append(fig.breakdown_figure(stats.app_sources, "App sources", base + "_app_sources.png"))
        figures.append(fig.breakdown_figure(stats.post_types, "Post types", base + "_post_types.png"))
        figures.append(fig.breakdown_figure(stats.domains, "Top linked domains", base + "_domains.png"))
        if stats.retention is not None:
            figures.append(fig.retention_figure(stats.retention.to_dict(), base + "_retention.png"))
        lines += [f"figure {p}" for p in figures]
    _emit(lines, {"command": "stats", "out": args.out, "figures": figures})
    return 0


def cmd_serve(args) -> int:
    # fastapi/uvicorn are slow imports; only this subcommand pays for them.
    from .service import ServiceConfig, run_service

    overrides = {}
    if args.model:
        overrides["model_path"] = args.model
    if args.store:
        overrides["store_path"] = args.store
    if args.addr:
        overrides["listen_addr"] = args.addr
    if args.cors_origin:
        overrides["cors_origin"] = args.cors_origin
    config = ServiceConfig.from_env(**overrides)
    print(f"serving model {config.model_path} on {config.listen_addr}")
    run_service(config)
    return 0


def cmd_classify(args) -> int:
    model = load_model(args.model)
    if model.vocabularies is None:
        raise ValueError(f"{args.model}: model carries no encoder vocabularies, cannot extract features")
    with open(args.in_, "r", encoding="utf-8") as handle:
        raw = json.load(handle)
    if not isinstance(raw, dict):
        raise ValueError(f"{args.in_}: post file must hold a JSON object")
    if args.format == "graph":
        post = parse_graph_post(raw)
    else:
        try:
            post = post_from_dict(raw)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"{args.in_}: malformed post record ({exc})")
        violations = validate_post(post)
        if violations:
            raise ValueError(f"{args.in_}: {violations[0]}")
    vector = extract_all(post, extract_urls(post), model.vocabularies, bundled_lexicons())
    label, score = classify(model, vector)
    _emit(
        [f"post {post.post_id}: {label} (score {score:.4f})"],
        {"command": "classify", "id": post.post_id, "label": label, "score": score},
    )
    return 0


# ---------------------------------------------------------------------------
# Parser wiring


def _add_vector_input(parser: _Parser) -> None:
    parser.add_argument("--in", dest="in_", required=True, help="feature vector file (JSON lines)")
    parser.add_argument("--meta", help="extract sidecar with schema and vocabularies")


def _add_learner_flags(parser: _Parser) -> None:
    parser.add_argument("--classifier", choices=sorted(_KINDS), default="rf")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--hp",
        type=_hp_pair,
        action="append",
        metavar="KEY=VALUE",
        help="hyperparameter override, repeatable (e.g. --hp n_trees=50)",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="sentinel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a synthetic corpus and provider snapshot")
    p.add_argument("--out", required=True, help="corpus output path (JSON lines)")
    p.add_argument("--snapshot-out", help="provider snapshot output path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--malicious", type=int, default=None, help="malicious post count")
    p.add_argument("--legitimate", type=int, default=None, help="legitimate post count")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("label", help="label a corpus against a provider snapshot")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=sorted(_FORMATS), default="canonical")
    p.add_argument("--redirects", help="redirect fixture file for URL resolution")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("extract", help="extract feature vectors from a labeled corpus")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train a classifier on a vector file")
    _add_vector_input(p)
    _add_learner_flags(p)
    p.add_argument("--model", required=True, help="model output path")
    p.add_argument("--top-k", type=int, help="keep only the top-k features by information gain")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("crossval", help="stratified cross validation")
    _add_vector_input(p)
    _add_learner_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--top-k", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("rank", help="information gain table for every feature")
    _add_vector_input(p)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("ratio", help="class-ratio sensitivity experiment")
    _add_vector_input(p)
    _add_learner_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--ratios", type=_ratio_list, default=[0.5, 1.0, 2.0, 5.0],
                   help="comma-separated legitimate-per-malicious ratios")
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("topk", help="accuracy-vs-feature-count curve")
    _add_vector_input(p)
    _add_learner_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--max-k", type=int, help="stop the curve at this k (default: all features)")
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_topk)

    p = sub.add_parser("cluster", help="campaign clustering baseline report")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("stats", help="descriptive statistics for a labeled corpus")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the classification service")
    p.add_argument("--model", help="model path (or SENTINEL_MODEL)")
    p.add_argument("--store", help="labeled corpus for id lookups (or SENTINEL_STORE)")
    p.add_argument("--addr", help="host:port (or SENTINEL_ADDR)")
    p.add_argument("--cors-origin", help="allowed CORS origin (or SENTINEL_CORS_ORIGIN)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("classify", help="classify one post file")
    p.add_argument("--in", dest="in_", required=True, help="file holding one post as JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--format", choices=sorted(_FORMATS), default="canonical")
    p.set_defaults(func=cmd_classify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, usage failures exit 1; both come through here.
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
