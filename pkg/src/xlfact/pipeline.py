"""Pipeline orchestration and the external-adapter contract.

Neural stages (translation, annotation, generation) run as separate
processes exchanging JSONL files: one output line per input line, in
order, echoing sample_id.  Two pipelines are provided:

* ``terc`` — translate, mask dates, annotate, select tail candidates,
  classify a relation per candidate;
* ``e2e``  — optional script unification, generate linearized facts,
  parse them leniently.

Every run writes ``predictions.jsonl`` and ``manifest.json`` into the
output directory; the manifest records the config snapshot, per-stage
line counts and timings, and file digests.  On failure the manifest is
still written with the failing stage named.  With fixed inputs, config
and adapter behaviour, predictions and the manifest are byte-identical
across runs (timings aside).
"""

from __future__ import annotations

import hashlib
import json
import os
import shlex
import subprocess
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .chunking import extract_dates, parse_conllu, select_tail_candidates
from .classifier import load_model, predict
from .codec import parse_linearized
from .errors import AdapterError, ValidationError
from .records import Fact, FactSet, SampleRecord, serialize_sample
from .translit import to_devanagari

ADAPTER_TIMEOUT_ENV = "XLFACT_ADAPTER_TIMEOUT"
DEFAULT_ADAPTER_TIMEOUT = 600.0

PIPELINE_MODES = ("terc", "e2e")


@dataclass(frozen=True)
class AdapterContract:
    """One external process invocation: command plus its JSONL files.

    ``command`` is split shell-style; ``{input}``/``{output}``
    placeholders are substituted when present, otherwise the two paths
    are appended as the final arguments.
    """

    role: str
    command: str
    input_path: Path
    output_path: Path


@dataclass(frozen=True)
class PipelineConfig:
    mode: str
    languages: tuple[str, ...] | None = None
    translit: bool = False
    align_threshold: float = 0.7
    model_path: str | None = None
    seed: int = 0
    translator: str | None = None
    generator: str | None = None
    annotator: str | None = None
    conllu_path: str | None = None

    def __post_init__(self):
        if self.mode not in PIPELINE_MODES:
            raise ValidationError(f"mode must be one of {PIPELINE_MODES}, got {self.mode!r}")
        if self.mode == "terc":
            if not self.translator:
                raise ValidationError("terc mode requires a translator adapter command")
            if not self.model_path:
                raise ValidationError("terc mode requires a trained classifier model")
            if not self.annotator and not self.conllu_path:
                raise ValidationError("terc mode requires an annotator adapter or a CoNLL-U file")
        if self.mode == "e2e" and not self.generator:
            raise ValidationError("e2e mode requires a generator adapter command")


_CONFIG_KEYS = (
    "mode", "languages", "translit", "align_threshold", "model_path",
    "seed", "translator", "generator", "annotator", "conllu_path",
)


def load_pipeline_config(path: str | None, overrides: dict) -> PipelineConfig:
    """Merge defaults < config file < CLI overrides into a config."""
    merged: dict = {}
    if path:
        with open(path, encoding="utf-8") as handle:
            try:
                document = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: malformed config JSON: {exc}") from None
        unknown = set(document) - set(_CONFIG_KEYS)
        if unknown:
            raise ValidationError(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
        merged.update(document)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if merged.get("languages") is not None:
        merged["languages"] = tuple(merged["languages"])
    if "mode" not in merged:
        raise ValidationError("pipeline mode not given (config file or --mode)")
    return PipelineConfig(**merged)


@dataclass
class StageStats:
    name: str
    input_lines: int
    output_lines: int
    seconds: float
    extra: dict = field(default_factory=dict)


@dataclass
class RunManifest:
    config: dict
    stages: list[StageStats] = field(default_factory=list)
    digests: dict = field(default_factory=dict)
    status: str = "ok"
    failed_stage: str | None = None

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "stages": [asdict(s) for s in self.stages],
            "digests": self.digests,
            "status": self.status,
            "failed_stage": self.failed_stage,
        }


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_jsonl(path: Path, lines: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for line in lines:
            handle.write(json.dumps(line, ensure_ascii=False) + "\n")


def _read_jsonl(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def run_adapter(contract: AdapterContract, lines: list[dict]) -> list[dict]:
    """Run one adapter process over ``lines`` and validate its output.

    The adapter must write exactly one JSON line per input line, in
    input order, echoing each line's sample_id.
    """
    _write_jsonl(contract.input_path, lines)
    argv = shlex.split(contract.command)
    if any("{input}" in a or "{output}" in a for a in argv):
        argv = [
            a.replace("{input}", str(contract.input_path)).replace(
                "{output}", str(contract.output_path)
            )
            for a in argv
        ]
    else:
        argv += [str(contract.input_path), str(contract.output_path)]

    timeout = float(os.environ.get(ADAPTER_TIMEOUT_ENV, DEFAULT_ADAPTER_TIMEOUT))
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        raise AdapterError(f"{contract.role} adapter timed out after {timeout:.0f}s") from None
    except OSError as exc:
        raise AdapterError(f"{contract.role} adapter failed to start: {exc}") from None
    if proc.returncode != 0:
        stderr_tail = proc.stderr.strip().splitlines()[-3:]
        raise AdapterError(
            f"{contract.role} adapter exited with code {proc.returncode}"
            + (": " + " | ".join(stderr_tail) if stderr_tail else ""),
            returncode=proc.returncode,
        )
    if not contract.output_path.exists():
        raise AdapterError(f"{contract.role} adapter wrote no output file")
    try:
        out_lines = _read_jsonl(contract.output_path)
    except json.JSONDecodeError as exc:
        raise AdapterError(f"{contract.role} adapter wrote malformed JSON: {exc}") from None
    if len(out_lines) != len(lines):
        raise AdapterError(
            f"{contract.role} adapter wrote {len(out_lines)} lines for {len(lines)} inputs"
        )
    for i, (given, got) in enumerate(zip(lines, out_lines)):
        if got.get("sample_id") != given["sample_id"]:
            raise AdapterError(
                f"{contract.role} adapter line {i + 1}: sample_id "
                f"{got.get('sample_id')!r} does not echo {given['sample_id']!r}"
            )
    return out_lines


def _filter_records(records: list[SampleRecord], config: PipelineConfig) -> list[SampleRecord]:
    if config.languages is None:
        return records
    allowed = set(config.languages)
    return [r for r in records if r.language.value in allowed]


def _facts_to_line(sample_id: str, facts: list[Fact]) -> dict:
    return {
        "sample_id": sample_id,
        "facts": [{"relation": f.relation, "tail": f.tail} for f in facts],
    }


class _Run:
    """Shared stage bookkeeping for both pipeline modes."""

    def __init__(self, records: list[SampleRecord], config: PipelineConfig, outdir: Path):
        self.records = records
        self.config = config
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(config=asdict(config))
        corpus_blob = "\n".join(serialize_sample(r) for r in records).encode("utf-8")
        self.manifest.digests["corpus"] = hashlib.sha256(corpus_blob).hexdigest()
        self.current_stage = "setup"

    def stage(self, name: str, func, n_in: int, **extra):
        self.current_stage = name
        started = time.perf_counter()
        result = func()
        self.manifest.stages.append(
            StageStats(
                name=name,
                input_lines=n_in,
                output_lines=len(result) if hasattr(result, "__len__") else n_in,
                seconds=time.perf_counter() - started,
                extra=extra,
            )
        )
        return result

    def adapter(self, role: str, command: str) -> AdapterContract:
        return AdapterContract(
            role=role,
            command=command,
            input_path=self.outdir / f"{role}_input.jsonl",
            output_path=self.outdir / f"{role}_output.jsonl",
        )

    def finish(self, predictions: list[dict]):
        pred_path = self.outdir / "predictions.jsonl"
        _write_jsonl(pred_path, predictions)
        self.manifest.digests["predictions"] = _sha256(pred_path)
        self.manifest.status = "ok"
        self.manifest.failed_stage = None
        return pred_path

    def write_manifest(self) -> Path:
        path = self.outdir / "manifest.json"
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.manifest.to_json(), handle, indent=2, ensure_ascii=False)
            handle.write("\n")
        return path


def run_e2e(records: list[SampleRecord], config: PipelineConfig, outdir) -> tuple[Path, RunManifest]:
    """Generative pipeline: translit? -> generator adapter -> delinearize."""
    run = _Run(records, config, outdir)
    run.manifest.status = "failed"
    try:
        selected = _filter_records(records, config)
        sentences = {r.sample_id: r.sentence for r in selected}
        if config.translit:
            def unify():
                out = {}
                for r in selected:
                    text, _ = to_devanagari(r.sentence, r.language)
                    out[r.sample_id] = text
                return out

            sentences = run.stage("translit", unify, len(selected))

        adapter_input = [
            {"sample_id": r.sample_id, "head": r.head, "sentence": sentences[r.sample_id]}
            for r in selected
        ]
        contract = run.adapter("generator", config.generator)
        generated = run.stage(
            "generate", lambda: run_adapter(contract, adapter_input), len(adapter_input)
        )

        dropped = 0
        predictions = []
        for r, line in zip(selected, generated):
            report = parse_linearized(str(line.get("generated", "")))
            dropped += report.dropped_fragments
            predictions.append(_facts_to_line(r.sample_id, report.facts))
        run.stage("delinearize", lambda: predictions, len(generated), dropped_fragments=dropped)

        pred_path = run.finish(predictions)
        return pred_path, run.manifest
    except BaseException:
        run.manifest.status = "failed"
        run.manifest.failed_stage = run.current_stage
        raise
    finally:
        run.write_manifest()


def run_terc(records: list[SampleRecord], config: PipelineConfig, outdir) -> tuple[Path, RunManifest]:
    """Two-stage pipeline: translate, mask dates, chunk, classify."""
    run = _Run(records, config, outdir)
    run.manifest.status = "failed"
    try:
        selected = _filter_records(records, config)

        contract = run.adapter("translator", config.translator)
        translator_input = [
            {"sample_id": r.sample_id, "language": r.language.value, "sentence": r.sentence}
            for r in selected
        ]
        translated = run.stage(
            "translate", lambda: run_adapter(contract, translator_input), len(translator_input)
        )
        english = {line["sample_id"]: str(line["translation"]) for line in translated}

        def mask():
            return {sid: extract_dates(text) for sid, text in english.items()}

        masked = run.stage("mask_dates", mask, len(selected))

        def annotate():
            if config.conllu_path:
                with open(config.conllu_path, encoding="utf-8") as handle:
                    sents = parse_conllu(handle.read())
                if len(sents) != len(selected):
                    raise ValidationError(
                        f"{config.conllu_path}: {len(sents)} sentences for "
                        f"{len(selected)} records"
                    )
                return dict(zip((r.sample_id for r in selected), sents))
            annotator = run.adapter("annotator", config.annotator)
            lines = [
                {"sample_id": r.sample_id, "text": masked[r.sample_id][0]} for r in selected
            ]
            out = {}
            for line in run_adapter(annotator, lines):
                sents = parse_conllu(str(line["conllu"]))
                if len(sents) != 1:
                    raise ValidationError(
                        f"annotator returned {len(sents)} sentences for sample "
                        f"{line['sample_id']!r}, expected 1"
                    )
                out[line["sample_id"]] = sents[0]
            return out

        annotated = run.stage("annotate", annotate, len(selected))

        def chunk():
            out = {}
            for r in selected:
                _, mentions = masked[r.sample_id]
                out[r.sample_id] = select_tail_candidates(annotated[r.sample_id], r.head, mentions)
            return out

        candidates = run.stage("chunk", chunk, len(selected))

        model = load_model(config.model_path)
        skipped_marker_tails = 0

        def classify():
            nonlocal skipped_marker_tails
            predictions = []
            for r in selected:
                facts = []
                for candidate in candidates[r.sample_id]:
                    try:
                        fact = Fact(
                            relation=predict(model, r.head, candidate.text, r.sentence)[0],
                            tail=candidate.text,
                        )
                    except ValidationError:
                        skipped_marker_tails += 1
                        continue
                    facts.append(fact)
                predictions.append(_facts_to_line(r.sample_id, facts))
            return predictions

        predictions = run.stage("classify", classify, len(selected))
        if skipped_marker_tails:
            run.manifest.stages[-1].extra["skipped_marker_tails"] = skipped_marker_tails

        pred_path = run.finish(predictions)
        return pred_path, run.manifest
    except BaseException:
        run.manifest.status = "failed"
        run.manifest.failed_stage = run.current_stage
        raise
    finally:
        run.write_manifest()


def predictions_to_factsets(lines: list[dict], records: list[SampleRecord]) -> dict[str, FactSet]:
    """Convert prediction JSONL lines into FactSets keyed by sample_id."""
    heads = {r.sample_id: r.head for r in records}
    out = {}
    for i, line in enumerate(lines, 1):
        sample_id = line.get("sample_id")
        if sample_id not in heads:
            raise ValidationError(f"prediction line {i}: unknown sample_id {sample_id!r}")
        try:
            facts = tuple(Fact(f["relation"], f["tail"]) for f in line.get("facts", []))
        except (ValidationError, KeyError, TypeError) as exc:
            raise ValidationError(f"prediction line {i}: {exc}") from None
        out[sample_id] = FactSet(head=heads[sample_id], facts=facts)
    return out
