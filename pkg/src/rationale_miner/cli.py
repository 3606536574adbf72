"""Command-line pipeline driver.

Subcommands cover the full path from raw commits to reports:

    ingest       commits file -> sentences JSONL
    label        sentences -> prediction CSV via a classifier
    extract      dual-labelled sentences -> decision/rationale triples
    build-graph  triples -> node-only graph file
    score        graph -> graph with Similar/Contradicts edges
    analyze      scored graph -> M1/M2 inconsistency findings
    check-patch  commit message file -> conflict findings vs the graph
    eval         labelled dataset -> classifier/rater metrics
    report       scored graph -> edge listings
    export-dot   graph -> DOT rendering

Every run writes a manifest JSON (inputs, config hash, counts, duration)
next to its primary output. Logs are JSON lines on stderr; reports and
data go only to files. Exit codes: 0 success, 1 domain error, 2 usage.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .analysis import (
    detect_m1,
    detect_m2,
    check_conflicts,
    find_contradictions,
    find_similar,
    render_conflicts,
    render_report,
)
from .config import RunConfig, load_config_file, resolve_config
from .corpus import (
    DECISION,
    RATIONALE,
    Commit,
    Sentence,
    ingest_commits,
    load_labeled_dataset,
    make_sentences,
)
from .errors import FormatError, RationaleMinerError, UsageError
from .extraction import (
    BaselineExtractor,
    extract_all,
    filter_triples,
    read_exclusions,
    read_triples,
    write_triples,
)
from .graph import build_graph, export_dot, load as load_graph, save as save_graph
from .labeling import (
    BaselineClassifier,
    PredictionFileClassifier,
    classify,
    evaluate,
    fleiss_kappa,
    kfold_split,
    mean_metrics,
    rater_flag_matrix,
    rater_performance,
    rating_count_table,
    unanimous_agreement,
)
from .scoring import (
    CONTRADICTS,
    SIMILAR,
    BaselineScorer,
    apply_threshold,
    enumerate_pairs,
    score_pairs,
    write_raw_scores,
)


def _log(event: str, **fields) -> None:
    record = {"ts": datetime.now(timezone.utc).isoformat(), "event": event}
    record.update(fields)
    print(json.dumps(record, sort_keys=True, default=str), file=sys.stderr, flush=True)


def _ensure_parent(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)


# --------------------------------------------------------------------------
# Pluggable component factories
# --------------------------------------------------------------------------


def _make_scorer(config: RunConfig):
    if config.backend == "baseline":
        return BaselineScorer()
    from .sidecar_client import SidecarScorer

    return SidecarScorer(config.sidecar_url)


def _make_classifier(config: RunConfig):
    name = config.classifier
    if name == "baseline":
        return BaselineClassifier()
    if name == "sidecar":
        if not config.sidecar_url:
            raise UsageError("sidecar classifier selected but sidecar_url is not set")
        from .sidecar_client import SidecarClassifier

        return SidecarClassifier(config.sidecar_url)
    if name.startswith("file:"):
        return PredictionFileClassifier(name[len("file:") :])
    raise UsageError(f"unknown classifier {name!r} (use baseline, sidecar, or file:<path>)")


def _make_extractor(config: RunConfig):
    name = config.extractor
    if name == "baseline":
        return BaselineExtractor()
    if name == "sidecar":
        if not config.sidecar_url:
            raise UsageError("sidecar extractor selected but sidecar_url is not set")
        from .sidecar_client import SidecarExtractor

        return SidecarExtractor(config.sidecar_url)
    raise UsageError(f"unknown extractor {name!r} (use baseline or sidecar)")


# --------------------------------------------------------------------------
# Sentence file plumbing
# --------------------------------------------------------------------------


def _write_sentences(sentences: list[Sentence], path: Path) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(
                json.dumps(
                    {"id": s.id, "commit_id": s.commit_id, "index": s.index, "text": s.text},
                    sort_keys=True,
                )
                + "\n"
            )


def _read_sentences(path: Path) -> list[Sentence]:
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc.msg})", path=path, line=lineno) from exc
            try:
                sentences.append(
                    Sentence(
                        id=record["id"],
                        commit_id=record["commit_id"],
                        index=record["index"],
                        text=record["text"],
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"bad sentence record ({exc})", path=path, line=lineno) from exc
    return sentences


def _require(value, flag: str):
    if value is None:
        raise UsageError(f"missing required option {flag}")
    return value


# --------------------------------------------------------------------------
# Subcommand handlers: each returns (primary_output, inputs, counts)
# --------------------------------------------------------------------------


def _cmd_ingest(args, config: RunConfig):
    source = Path(_require(config.input_path, "--input"))
    out = Path(_require(args.out, "--out"))
    result = ingest_commits(source, format=args.format)
    sentences = []
    for commit in result.commits:
        sentences.extend(make_sentences(commit))
    _write_sentences(sentences, out)
    counts = {
        "commits": len(result.commits),
        "skipped_empty": result.skipped_empty,
        "sentences": len(sentences),
    }
    return out, {"commits": str(source)}, counts


def _cmd_label(args, config: RunConfig):
    source = Path(_require(config.input_path, "--input"))
    out = Path(_require(args.out, "--out"))
    sentences = _read_sentences(source)
    classifier = _make_classifier(config)
    predictions = classify(classifier, sentences)
    _ensure_parent(out)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("sentence_id,decision,rationale\n")
        for p in predictions:
            fh.write(f"{p.sentence_id},{int(p.decision)},{int(p.rationale)}\n")
    counts = {
        "sentences": len(sentences),
        "decision": sum(p.decision for p in predictions),
        "rationale": sum(p.rationale for p in predictions),
        "both": sum(p.decision and p.rationale for p in predictions),
        "classifier": classifier.classifier_id,
    }
    return out, {"sentences": str(source)}, counts


def _cmd_extract(args, config: RunConfig):
    sentences_path = Path(_require(args.sentences, "--sentences"))
    labels_path = Path(_require(args.labels, "--labels"))
    out = Path(_require(args.out, "--out"))
    sentences = _read_sentences(sentences_path)
    predictions = PredictionFileClassifier(labels_path).predict(sentences)
    both = [
        dataclasses.replace(s, labels=frozenset({DECISION, RATIONALE}))
        for s, p in zip(sentences, predictions)
        if p.decision and p.rationale
    ]
    exclusions = frozenset()
    if args.exclude_file:
        exclusions = read_exclusions(args.exclude_file)
    extractor = _make_extractor(config)
    outcomes = extract_all(extractor, both, parallelism=config.parallelism, exclusions=exclusions)
    triples, dropped = filter_triples(outcomes)
    _ensure_parent(out)
    write_triples(triples, out)
    if args.outcomes:
        outcomes_path = Path(args.outcomes)
        _ensure_parent(outcomes_path)
        with open(outcomes_path, "w", encoding="utf-8") as fh:
            for o in outcomes:
                fh.write(json.dumps(dataclasses.asdict(o), sort_keys=True) + "\n")
    excluded = len(both) - len(outcomes)
    counts = {
        "sentences": len(sentences),
        "labelled_both": len(both),
        "excluded": excluded,
        "outcomes": len(outcomes),
        "triples": len(triples),
        "dropped": dropped,
        "extractor": extractor.extractor_id,
    }
    inputs = {"sentences": str(sentences_path), "labels": str(labels_path)}
    if args.exclude_file:
        inputs["exclude_file"] = str(args.exclude_file)
    return out, inputs, counts


def _cmd_build_graph(args, config: RunConfig):
    triples_path = Path(_require(args.triples, "--triples"))
    graph_path = Path(_require(config.graph_path, "--graph"))
    triples = read_triples(triples_path)
    graph = build_graph(triples, project=config.project)
    _ensure_parent(graph_path)
    save_graph(graph, graph_path)
    counts = {"triples": len(triples), "decisions": len(graph.decisions), "rationales": len(graph.rationales)}
    return graph_path, {"triples": str(triples_path)}, counts


_KIND_CHOICES = {"similar": [SIMILAR], "contradicts": [CONTRADICTS], "both": [SIMILAR, CONTRADICTS]}


def _cmd_score(args, config: RunConfig):
    graph_path = Path(_require(config.graph_path, "--graph"))
    graph = load_graph(graph_path)
    scorer = _make_scorer(config)
    texts = graph.decision_texts()
    ids = sorted(texts)
    count, index_pairs = enumerate_pairs(len(ids))
    pair_list = [(ids[i], ids[j]) for i, j in index_pairs]

    counts: dict = {"decisions": len(ids), "pairs": count, "scorer": scorer.scorer_id}
    for kind in _KIND_CHOICES[args.kind]:
        checkpoint = Path(str(graph_path) + f".checkpoint-{kind}.json")
        scores = score_pairs(
            scorer, texts, pair_list, kind, batch_size=config.batch_size, checkpoint_path=checkpoint
        )
        if config.keep_raw_scores:
            raw_path = Path(str(graph_path) + f".scores-{kind}.jsonl")
            write_raw_scores(scores, raw_path)
        edges = apply_threshold(scores, config.thresholds.for_kind(kind))
        graph.clear_edges(kind)
        for edge in edges:
            graph.add_edge(edge)
        graph.meta.setdefault("scorer_ids", {})[kind] = scorer.scorer_id
        counts[f"edges_{kind}"] = len(edges)
        _log("scored", kind=kind, pairs=count, edges=len(edges))
    graph.meta["thresholds"] = config.thresholds.to_dict()
    save_graph(graph, graph_path)
    return graph_path, {"graph": str(graph_path)}, counts


_MECHANISMS = {"m1": ("M1",), "m2": ("M2",), "both": ("M1", "M2")}
_REPORT_EXT = {"json": "json", "markdown": "md", "csv": "csv"}


def _cmd_analyze(args, config: RunConfig):
    graph_path = Path(_require(config.graph_path, "--graph"))
    graph = load_graph(graph_path)
    scorer = _make_scorer(config)
    findings = []
    mechanisms = _MECHANISMS[args.mechanism]
    if "M1" in mechanisms:
        findings.extend(detect_m1(graph, scorer, config.thresholds, batch_size=config.batch_size))
    if "M2" in mechanisms:
        findings.extend(detect_m2(graph, scorer, config.thresholds, batch_size=config.batch_size))
    out = Path(args.out) if args.out else Path(config.reports_dir) / (
        f"findings-{args.mechanism}.{_REPORT_EXT[args.format]}"
    )
    _ensure_parent(out)
    render_report(findings, args.format, out, graph=graph)
    counts = {
        "mechanisms": list(mechanisms),
        "similar_edges": len(graph.edges(SIMILAR)),
        "contradicts_edges": len(graph.edges(CONTRADICTS)),
        "findings": len(findings),
        "findings_m1": sum(f.mechanism == "M1" for f in findings),
        "findings_m2": sum(f.mechanism == "M2" for f in findings),
    }
    return out, {"graph": str(graph_path)}, counts


def _cmd_check_patch(args, config: RunConfig):
    graph_path = Path(_require(config.graph_path, "--graph"))
    message_path = Path(_require(args.message, "--message"))
    graph = load_graph(graph_path)
    message = message_path.read_text(encoding="utf-8")
    commit = Commit(id=args.commit_id, project=config.project, message=message)
    sentences = make_sentences(commit)
    classifier = _make_classifier(config)
    predictions = classify(classifier, sentences)
    both = [
        dataclasses.replace(s, labels=frozenset({DECISION, RATIONALE}))
        for s, p in zip(sentences, predictions)
        if p.decision and p.rationale
    ]
    extractor = _make_extractor(config)
    outcomes = extract_all(extractor, both, parallelism=config.parallelism)
    triples, dropped = filter_triples(outcomes)
    scorer = _make_scorer(config)
    findings = []
    for triple in triples:
        findings.extend(
            check_conflicts(graph, triple, scorer, scorer, config.thresholds, batch_size=config.batch_size)
        )
    out = Path(args.out) if args.out else Path(config.reports_dir) / f"conflicts.{_REPORT_EXT[args.format]}"
    _ensure_parent(out)
    render_conflicts(findings, args.format, out, graph=graph)
    counts = {
        "sentences": len(sentences),
        "labelled_both": len(both),
        "triples": len(triples),
        "dropped": dropped,
        "findings": len(findings),
        "direct": sum(f.direct for f in findings),
        "transitive": sum(not f.direct for f in findings),
    }
    return out, {"graph": str(graph_path), "message": str(message_path)}, counts


def _cmd_eval(args, config: RunConfig):
    dataset_path = Path(_require(args.dataset, "--dataset"))
    out = Path(_require(args.out, "--out"))
    dataset = load_labeled_dataset(dataset_path, args.dataset_format, atomic_only=config.atomic_only)
    classifier = _make_classifier(config)
    predictions = classify(classifier, dataset.sentences)

    tasks = ("decision", "rationale") if args.task == "both" else (args.task,)
    payload: dict = {
        "dataset": str(dataset_path),
        "dataset_format": args.dataset_format,
        "classifier": classifier.classifier_id,
        "sentences": len(dataset.sentences),
        "commits": dataset.commit_count,
        "tasks": {},
    }
    for task in tasks:
        payload["tasks"][task] = evaluate(predictions, dataset, task).to_dict()

    if args.folds:
        plan = kfold_split([s.id for s in dataset.sentences], k=args.folds, seed=config.seed)
        by_id = {p.sentence_id: p for p in predictions}
        fold_reports: dict = {task: [] for task in tasks}
        for fold in range(plan.k):
            fold_predictions = [by_id[sid] for sid in plan.fold_ids(fold)]
            for task in tasks:
                fold_reports[task].append(evaluate(fold_predictions, dataset, task))
        payload["folds"] = {
            "k": plan.k,
            "seed": plan.seed,
            "sizes": plan.sizes(),
            "mean": {task: mean_metrics(fold_reports[task]) for task in tasks},
            "per_fold": {task: [r.to_dict() for r in fold_reports[task]] for task in tasks},
        }

    if dataset.rater_columns is not None:
        agreement: dict = {"fleiss_kappa": {}, "unanimous": {}}
        for task in ("decision", "rationale"):
            matrix = rater_flag_matrix(dataset, task)
            agreement["fleiss_kappa"][task] = fleiss_kappa(rating_count_table(matrix))
            agreement["unanimous"][task] = unanimous_agreement(matrix)
        overall = [
            [tuple(sorted(col[s.id])) for col in dataset.rater_columns]
            for s in dataset.sentences
        ]
        agreement["unanimous"]["overall"] = unanimous_agreement(overall)
        payload["agreement"] = agreement
        payload["raters"] = {
            f"rater{i + 1}": {
                task: rater_performance(col, dataset, task).to_dict()
                for task in ("decision", "rationale")
            }
            for i, col in enumerate(dataset.rater_columns)
        }

    _ensure_parent(out)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    counts = {"sentences": len(dataset.sentences), "commits": dataset.commit_count}
    return out, {"dataset": str(dataset_path)}, counts


def _edge_record(graph, edge) -> dict:
    return {
        "a": edge.a,
        "b": edge.b,
        "kind": edge.kind,
        "score": edge.score,
        "scorer_id": edge.scorer_id,
        "text_a": graph.decisions[edge.a].text,
        "text_b": graph.decisions[edge.b].text,
    }


def _cmd_report(args, config: RunConfig):
    graph_path = Path(_require(config.graph_path, "--graph"))
    graph = load_graph(graph_path)
    similar = find_similar(graph, config.thresholds.dd_similar)
    contradicts = find_contradictions(graph, config.thresholds.dd_contradicts)
    out = Path(args.out) if args.out else Path(config.reports_dir) / f"edges.{_REPORT_EXT[args.format]}"
    _ensure_parent(out)
    if args.format == "json":
        payload = {
            "similar": [_edge_record(graph, e) for e in similar],
            "contradicts": [_edge_record(graph, e) for e in contradicts],
        }
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    elif args.format == "csv":
        import csv as _csv

        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["kind", "a", "b", "score", "scorer_id"])
            for edge in similar + contradicts:
                writer.writerow([edge.kind, edge.a, edge.b, edge.score, edge.scorer_id])
    elif args.format == "markdown":
        lines = ["# Relationship edges", ""]
        for title, edges in (("Similar", similar), ("Contradicts", contradicts)):
            lines.append(f"## {title}")
            lines.append("")
            lines.append("| A | B | Score | A text | B text |")
            lines.append("| --- | --- | --- | --- | --- |")
            for e in edges:
                text_a = graph.decisions[e.a].text.replace("|", "\\|")
                text_b = graph.decisions[e.b].text.replace("|", "\\|")
                lines.append(f"| {e.a} | {e.b} | {e.score:.2f} | {text_a} | {text_b} |")
            lines.append("")
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines).rstrip("\n") + "\n")
    else:
        raise UsageError(f"unknown report format {args.format!r}")
    counts = {"similar": len(similar), "contradicts": len(contradicts)}
    return out, {"graph": str(graph_path)}, counts


def _cmd_export_dot(args, config: RunConfig):
    graph_path = Path(_require(config.graph_path, "--graph"))
    out = Path(_require(args.out, "--out"))
    graph = load_graph(graph_path)
    _ensure_parent(out)
    export_dot(graph, out)
    counts = {
        "decisions": len(graph.decisions),
        "rationales": len(graph.rationales),
        "edges": len(graph.edges()),
    }
    return out, {"graph": str(graph_path)}, counts


_HANDLERS = {
    "ingest": _cmd_ingest,
    "label": _cmd_label,
    "extract": _cmd_extract,
    "build-graph": _cmd_build_graph,
    "score": _cmd_score,
    "analyze": _cmd_analyze,
    "check-patch": _cmd_check_patch,
    "eval": _cmd_eval,
    "report": _cmd_report,
    "export-dot": _cmd_export_dot,
}


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--project", help="project identifier recorded in outputs")
    common.add_argument("--input", help="primary input path")
    common.add_argument("--graph", help="graph file path")
    common.add_argument("--reports-dir", dest="reports_dir", help="directory for report outputs")
    common.add_argument("--thresholds-preset", dest="thresholds_preset", choices=["oom", "generalization"])
    common.add_argument("--dd-similar", dest="dd_similar", type=float, help="decision similarity threshold")
    common.add_argument("--dd-contradicts", dest="dd_contradicts", type=float, help="decision contradiction threshold")
    common.add_argument("--rr", type=float, help="rationale relationship threshold")
    common.add_argument("--backend", choices=["baseline", "sidecar"], help="pair scorer backend")
    common.add_argument("--sidecar-url", dest="sidecar_url", help="scorer sidecar base URL")
    common.add_argument("--classifier", help="baseline, sidecar, or file:<predictions.csv>")
    common.add_argument("--extractor", choices=["baseline", "sidecar"])
    common.add_argument("--batch-size", dest="batch_size", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--parallelism", type=int)
    common.add_argument("--atomic-only", dest="atomic_only", action="store_true", default=False)
    common.add_argument("--keep-raw-scores", dest="keep_raw_scores", action="store_true", default=False)
    common.add_argument("--manifest", help="manifest path (default: <output>.manifest.json)")

    parser = argparse.ArgumentParser(prog="rationale-miner", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="read commits, write sentences")
    p.add_argument("--format", choices=["json-lines", "git-log-export"], default="json-lines")
    p.add_argument("--out", help="sentences JSONL output")

    p = sub.add_parser("label", parents=[common], help="classify sentences")
    p.add_argument("--out", help="prediction CSV output")

    p = sub.add_parser("extract", parents=[common], help="extract decision/rationale triples")
    p.add_argument("--sentences", help="sentences JSONL from ingest")
    p.add_argument("--labels", help="prediction CSV from label")
    p.add_argument("--exclude-file", dest="exclude_file", help="sentence ids to skip, one per line")
    p.add_argument("--outcomes", help="optional raw outcome JSONL output")
    p.add_argument("--out", help="triples JSONL output")

    p = sub.add_parser("build-graph", parents=[common], help="build node-only graph from triples")
    p.add_argument("--triples", help="triples JSONL from extract")

    p = sub.add_parser("score", parents=[common], help="score decision pairs into edges")
    p.add_argument("--kind", choices=["similar", "contradicts", "both"], default="both")

    p = sub.add_parser("analyze", parents=[common], help="run inconsistency mechanisms")
    p.add_argument("--mechanism", choices=["m1", "m2", "both"], default="both")
    p.add_argument("--format", choices=["json", "markdown", "csv"], default="json")
    p.add_argument("--out", help="findings output path")

    p = sub.add_parser("check-patch", parents=[common], help="check a new commit message for conflicts")
    p.add_argument("--message", help="file holding the commit message")
    p.add_argument("--commit-id", dest="commit_id", default="patch")
    p.add_argument("--format", choices=["json", "markdown", "csv"], default="json")
    p.add_argument("--out", help="conflict findings output path")

    p = sub.add_parser("eval", parents=[common], help="evaluate a classifier on a labelled dataset")
    p.add_argument("--dataset", help="labelled CSV")
    p.add_argument("--dataset-format", dest="dataset_format", choices=["oom", "tian"], required=True)
    p.add_argument("--task", choices=["decision", "rationale", "both"], default="both")
    p.add_argument("--folds", type=int, help="k for k-fold evaluation")
    p.add_argument("--out", help="metrics JSON output")

    p = sub.add_parser("report", parents=[common], help="list admitted edges with texts")
    p.add_argument("--format", choices=["json", "markdown", "csv"], default="markdown")
    p.add_argument("--out", help="report output path")

    p = sub.add_parser("export-dot", parents=[common], help="render the graph as DOT")
    p.add_argument("--out", help="dot output path")

    return parser


def _write_manifest(
    manifest_path: Path,
    command: str,
    config: RunConfig,
    inputs: dict,
    output: Path,
    counts: dict,
    started: str,
    duration_s: float,
) -> None:
    payload = {
        "command": command,
        "inputs": inputs,
        "output": str(output),
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "counts": counts,
        "started": started,
        "duration_s": duration_s,
        "version": __version__,
    }
    _ensure_parent(manifest_path)
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    started = datetime.now(timezone.utc).isoformat()
    t0 = time.monotonic()
    try:
        config_file = load_config_file(args.config) if args.config else None
        config = resolve_config(args, config_file)
        _log("start", command=args.command, config_hash=config.config_hash())
        output, inputs, counts = _HANDLERS[args.command](args, config)
        duration = time.monotonic() - t0
        manifest_path = Path(args.manifest) if args.manifest else Path(str(output) + ".manifest.json")
        _write_manifest(manifest_path, args.command, config, inputs, output, counts, started, duration)
        _log("done", command=args.command, output=str(output), duration_s=round(duration, 3), **counts)
        return 0
    except UsageError as exc:
        _log("error", command=args.command, kind="usage", message=str(exc))
        return 2
    except RationaleMinerError as exc:
        _log("error", command=args.command, kind=type(exc).__name__, message=str(exc))
        return 1
    except (OSError, ValueError, KeyError) as exc:
        _log("error", command=args.command, kind=type(exc).__name__, message=str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
