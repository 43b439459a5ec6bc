"""Command-line interface.

Subcommands cover corpus handling (ingest, stats), the individual
pipeline stages (translit, chunk, align, train, predict, linearize,
delinearize, evaluate) and full pipeline runs (run --mode terc|e2e).

Exit codes: 0 success, 2 validation error, 3 adapter error, 4 I/O
error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from . import alignment, classifier, codec, evaluation, pipeline, records, translit
from .chunking import extract_dates, parse_conllu, select_tail_candidates
from .errors import AdapterError, ValidationError


def _write_jsonl_lines(path: str, lines) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for line in lines:
            handle.write(json.dumps(line, ensure_ascii=False) + "\n")


def _read_jsonl(path: str) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: malformed JSON: {exc}") from None
    return out


def _cmd_ingest(args) -> int:
    corpus = records.load_corpus(args.input)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            for record in corpus:
                handle.write(records.serialize_sample(record) + "\n")
    print(f"{len(corpus)} records ok")
    return 0


def _cmd_stats(args) -> int:
    corpus = records.load_corpus(args.corpus)
    stats = records.compute_stats(corpus)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as handle:
            json.dump(records.stats_to_json(stats), handle, indent=2, ensure_ascii=False)
            handle.write("\n")
    sys.stdout.write(records.render_stats(stats))
    return 0


def _cmd_translit(args) -> int:
    lines = _read_jsonl(args.input)
    out = []
    for i, line in enumerate(lines, 1):
        if "sentence" not in line or "language" not in line:
            raise ValidationError(f"{args.input}:{i}: needs 'sentence' and 'language'")
        lang = records.LanguageCode.parse(line["language"])
        text, report = translit.to_devanagari(line["sentence"], lang)
        line = dict(line)
        line["sentence"] = text
        line["translit_report"] = {
            "mapped": report.mapped,
            "passthrough": report.passthrough,
            "passthrough_codepoints": sorted(report.passthrough_codepoints),
        }
        out.append(line)
    _write_jsonl_lines(args.out, out)
    print(f"{len(out)} sentences transliterated")
    return 0


def _load_annotations(path: str, corpus: list) -> dict:
    with open(path, encoding="utf-8") as handle:
        sentences = parse_conllu(handle.read())
    if len(sentences) != len(corpus):
        raise ValidationError(
            f"{path}: {len(sentences)} annotated sentences for {len(corpus)} corpus records"
        )
    return {record.sample_id: sent for record, sent in zip(corpus, sentences)}


def _cmd_chunk(args) -> int:
    corpus = records.load_corpus(args.corpus)
    annotations = _load_annotations(args.conllu, corpus)
    out = []
    for record in corpus:
        _, mentions = extract_dates(record.sentence)
        candidates = select_tail_candidates(annotations[record.sample_id], record.head, mentions)
        out.append(
            {
                "sample_id": record.sample_id,
                "candidates": [{"text": c.text, "kind": c.kind} for c in candidates],
            }
        )
    _write_jsonl_lines(args.out, out)
    print(f"{sum(len(l['candidates']) for l in out)} candidates from {len(out)} sentences")
    return 0


def _cmd_align(args) -> int:
    corpus = {r.sample_id: r for r in records.load_corpus(args.corpus)}
    store = alignment.load_embeddings(args.embeddings)
    config = alignment.AlignmentConfig(threshold=args.threshold)
    out = []
    for line in _read_jsonl(args.candidates):
        sample_id = line.get("sample_id")
        if sample_id not in corpus:
            raise ValidationError(f"candidates reference unknown sample_id {sample_id!r}")
        record = corpus[sample_id]
        texts = [c["text"] for c in line.get("candidates", [])]
        gold_tails = [f.tail for f in record.gold.facts]
        result = alignment.align(texts, gold_tails, store, config)
        for ci, gi, score in result.pairs:
            gold_fact = record.gold.facts[gi]
            out.append(
                {
                    "sample_id": sample_id,
                    "head": record.head,
                    "sentence": record.sentence,
                    # ground-truth tail is the classifier input; the matched
                    # candidate is kept for reference
                    "tail": gold_fact.tail,
                    "candidate": texts[ci],
                    "relation": gold_fact.relation,
                    "score": {
                        "cosine": score.cosine_part,
                        "iou": score.iou_part,
                        "total": score.total,
                    },
                }
            )
    _write_jsonl_lines(args.out, out)
    print(f"{len(out)} aligned training pairs")
    return 0


def _cmd_train(args) -> int:
    examples = []
    for i, line in enumerate(_read_jsonl(args.data), 1):
        try:
            examples.append(
                classifier.TrainExample(
                    head=line["head"],
                    tail=line["tail"],
                    sentence=line["sentence"],
                    relation=line["relation"],
                )
            )
        except KeyError as exc:
            raise ValidationError(f"{args.data}:{i}: missing key {exc}") from None
    config = classifier.TrainConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
        l2=args.l2,
        dim=args.dim,
    )
    model, trace = classifier.train(examples, config)
    classifier.save_model(model, args.out)
    tail = f", final loss {trace[-1]:.6f}" if trace else ""
    print(f"trained on {len(examples)} examples, {len(model.label_vocab)} classes{tail}")
    return 0


def _cmd_predict(args) -> int:
    corpus = {r.sample_id: r for r in records.load_corpus(args.corpus)}
    model = classifier.load_model(args.model)
    out = []
    for line in _read_jsonl(args.candidates):
        sample_id = line.get("sample_id")
        if sample_id not in corpus:
            raise ValidationError(f"candidates reference unknown sample_id {sample_id!r}")
        record = corpus[sample_id]
        facts = []
        for candidate in line.get("candidates", []):
            relation, _ = classifier.predict(model, record.head, candidate["text"], record.sentence)
            facts.append({"relation": relation, "tail": candidate["text"]})
        out.append({"sample_id": sample_id, "facts": facts})
    _write_jsonl_lines(args.out, out)
    print(f"predictions for {len(out)} samples")
    return 0


def _cmd_linearize(args) -> int:
    corpus = records.load_corpus(args.corpus)
    out = [
        {"sample_id": r.sample_id, "target": codec.serialize_facts(r.gold)} for r in corpus
    ]
    _write_jsonl_lines(args.out, out)
    print(f"{len(out)} targets")
    return 0


def _cmd_delinearize(args) -> int:
    out = []
    dropped = 0
    for line in _read_jsonl(args.input):
        report = codec.parse_linearized(str(line.get("generated", "")))
        dropped += report.dropped_fragments
        out.append(
            {
                "sample_id": line.get("sample_id"),
                "facts": [{"relation": f.relation, "tail": f.tail} for f in report.facts],
            }
        )
    _write_jsonl_lines(args.out, out)
    print(f"{len(out)} samples, {dropped} fragments dropped")
    return 0


def _cmd_evaluate(args) -> int:
    corpus = records.load_corpus(args.corpus)
    if args.split:
        corpus = [r for r in corpus if r.split == args.split]
    predictions = pipeline.predictions_to_factsets(_read_jsonl(args.pred), corpus)
    report = evaluation.score_corpus(predictions, corpus)
    text, document = evaluation.render_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as handle:
            handle.write(document)
    sys.stdout.write(text)
    return 0


def _cmd_run(args) -> int:
    overrides = {
        "mode": args.mode,
        "languages": args.languages.split(",") if args.languages else None,
        "translit": args.translit,
        "align_threshold": args.align_threshold,
        "model_path": args.model,
        "seed": args.seed,
        "translator": args.translator,
        "generator": args.generator,
        "annotator": args.annotator,
        "conllu_path": args.conllu,
    }
    config = pipeline.load_pipeline_config(args.config, overrides)
    corpus = records.load_corpus(args.corpus)
    if config.mode == "e2e":
        pred_path, manifest = pipeline.run_e2e(corpus, config, args.out)
    else:
        pred_path, manifest = pipeline.run_terc(corpus, config, args.out)
    print(f"predictions: {pred_path}")
    print(f"manifest:    {args.out}/manifest.json")
    for stage in manifest.stages:
        print(f"  {stage.name:<12} {stage.output_lines:>6} lines  {stage.seconds:.3f}s")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xlfact",
        description="Cross-lingual fact extraction toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus file and optionally re-serialize it")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("stats", help="dataset statistics (text table; optional JSON)")
    p.add_argument("--corpus", required=True)
    p.add_argument("--json")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("translit", help="unify Indic scripts to Devanagari in a JSONL file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_translit)

    p = sub.add_parser("chunk", help="extract tail candidates from annotated sentences")
    p.add_argument("--conllu", required=True, help="CoNLL-U annotations of the masked sentences, corpus order")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_chunk)

    p = sub.add_parser("align", help="align candidates to gold tails into training pairs")
    p.add_argument("--candidates", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--threshold", type=float, default=alignment.REFERENCE_THRESHOLD)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("train", help="train the relation classifier on aligned pairs")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lr", type=float, default=classifier.TrainConfig.learning_rate)
    p.add_argument("--epochs", type=int, default=classifier.TrainConfig.epochs)
    p.add_argument("--batch-size", type=int, default=classifier.TrainConfig.batch_size)
    p.add_argument("--seed", type=int, default=classifier.TrainConfig.seed)
    p.add_argument("--l2", type=float, default=classifier.TrainConfig.l2)
    p.add_argument("--dim", type=int, default=classifier.TrainConfig.dim)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="classify a relation for each candidate")
    p.add_argument("--model", required=True)
    p.add_argument("--candidates", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("linearize", help="serialize gold facts to generator target strings")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_linearize)

    p = sub.add_parser("delinearize", help="parse generated strings back into facts")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_delinearize)

    p = sub.add_parser("evaluate", help="strict word-match P/R/F1 per language")
    p.add_argument("--pred", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", choices=records.SPLITS)
    p.add_argument("--out", help="write the text table here as well")
    p.add_argument("--json", help="write the JSON report here")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("run", help="run a full pipeline (terc or e2e)")
    p.add_argument("--mode", choices=pipeline.PIPELINE_MODES)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="JSON config file; CLI flags override it")
    p.add_argument("--languages", help="comma-separated language filter")
    p.add_argument("--translit", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--align-threshold", type=float, default=None)
    p.add_argument("--model", help="classifier model path (terc)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--translator", help="translator adapter command (terc)")
    p.add_argument("--generator", help="generator adapter command (e2e)")
    p.add_argument("--annotator", help="annotation adapter command (terc)")
    p.add_argument("--conllu", help="pre-annotated CoNLL-U file (terc)")
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AdapterError as exc:
        print(f"adapter error: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
