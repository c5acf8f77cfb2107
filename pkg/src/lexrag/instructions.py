"""Instruction-pair dataset construction for the six legal tasks.

Chunks and hierarchy segments are turned into chat prompts, sent to a
pluggable chat-completion client, and the responses parsed into supervised
(input, output) records. Parsing is total: malformed model output becomes
reject notes, never exceptions.
"""

from __future__ import annotations

import ast
import hashlib
import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Protocol

from .chunker import Chunk, ChunkConfig, chunk_text
from .corpus import Corpus, Segment, segment
from .errors import InvalidFractionError, TargetUnreachableError
from .refs import SourceRef, parse_ref

logger = logging.getLogger(__name__)


class TaskKind(str, Enum):
    OVERLAPPING_ANALYSIS = "overlapping_analysis"
    ELEMENT_EXTRACTION = "element_extraction"
    LEGAL_QA = "legal_qa"
    SUMMARIZATION = "summarization"
    DRAFTING_REVISIONS = "drafting_revisions"
    DRAFTING_PROVISIONS = "drafting_provisions"


class LegalElement(str, Enum):
    SUBJECT = "subject"
    OBJECT = "object"
    ACTION = "action"
    INTENTION = "intention"
    SANCTION = "sanction"
    TIME_DURATION = "time_duration"
    LOCATION = "location"
    PROCEDURE = "procedure"


TASK_LABELS = {
    TaskKind.OVERLAPPING_ANALYSIS: "legal overlapping analysis",
    TaskKind.ELEMENT_EXTRACTION: "legal element extraction",
    TaskKind.LEGAL_QA: "legal question answering",
    TaskKind.SUMMARIZATION: "legal summarization",
    TaskKind.DRAFTING_REVISIONS: "drafting revisions of existing provisions",
    TaskKind.DRAFTING_PROVISIONS: "drafting new legal provisions",
}

_TASK_DIRECTIONS = {
    TaskKind.OVERLAPPING_ANALYSIS:
        "Write question/answer records that probe conflicts, overlaps, or "
        "redundancies between the provisions in the context.",
    TaskKind.ELEMENT_EXTRACTION:
        "Each record asks for one legal element of the provision and answers "
        "with that element. The elements of interest are: "
        + ", ".join(e.value for e in LegalElement) + ".",
    TaskKind.LEGAL_QA:
        "Write factual legal questions a policymaker might ask about the "
        "context, each answered strictly from the text.",
    TaskKind.SUMMARIZATION:
        "Each record asks for a concise brief of the provision and answers "
        "with that summary.",
    TaskKind.DRAFTING_REVISIONS:
        "Each record asks how an existing provision in the context could be "
        "revised or improved, and answers with the suggested revision.",
    TaskKind.DRAFTING_PROVISIONS:
        "Each record asks for a new provision or clause grounded in the "
        "context, and answers with the drafted text.",
}


@dataclass
class InstructionPair:
    input: str
    output: str
    task: TaskKind
    ref: SourceRef | None = None
    provenance: str = ""


@dataclass
class RejectNote:
    reason: str
    fragment: str


@dataclass
class GenerationJobConfig:
    targets: dict[TaskKind, int]
    items_per_call: int = 3
    max_retries: int = 2
    seed: int = 0

    def __post_init__(self):
        self.targets = {TaskKind(k): int(v) for k, v in self.targets.items()}
        if any(v < 0 for v in self.targets.values()):
            raise ValueError("record targets must be non-negative")
        if sum(self.targets.values()) <= 0:
            raise ValueError("at least one task needs a positive record target")
        if self.items_per_call < 1:
            raise ValueError("items_per_call must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")


class ChatClient(Protocol):
    identity: str

    def complete(self, prompt: str) -> str: ...


def build_prompt(task: TaskKind, context_text: str, ref: SourceRef | None,
                 n_items: int) -> str:
    """Deterministic per-task prompt embedding the context verbatim."""
    source = ref.display() if ref is not None else "the corpus"
    lines = [
        "You are preparing supervised training data for an Indonesian legal assistant.",
        "",
        f"Context (from {source}):",
        context_text,
        "",
        f"Task: {TASK_LABELS[task]}.",
        _TASK_DIRECTIONS[task],
        f"Create exactly {n_items} records based on the context above. Where "
        "relevant, include references to the government regulation (PP), "
        "article (Pasal), and clause (ayat).",
        "For each record, create a JSON object in the following format:",
        "{",
        '  "input": the question,',
        '  "output": the answer',
        "}",
        f"Return a JSON array of the {n_items} objects and nothing else.",
    ]
    return "\n".join(lines)


def prompt_fingerprint(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:12]


# --- response parsing ---

_FENCE_RE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


def _balanced_objects(text: str) -> list[str]:
    """Extract top-level {...} substrings, tolerating quoted braces."""
    objects = []
    depth = 0
    start = -1
    quote: str | None = None
    escaped = False
    for i, ch in enumerate(text):
        if quote:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == quote:
                quote = None
            continue
        if ch in "'\"" and depth > 0:
            quote = ch
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                objects.append(text[start:i + 1])
    return objects


def _loads_tolerant(text: str):
    try:
        return json.loads(text)
    except (json.JSONDecodeError, ValueError):
        pass
    try:
        # Single-quoted pseudo-JSON is common in model output.
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return None


def parse_client_response(raw: str, task: TaskKind, ref: SourceRef | None,
                          provenance: str = "") -> tuple[list[InstructionPair], list[RejectNote]]:
    """Extract every well-formed {input, output} object from a raw response.

    Tolerates a surrounding array, code fences, and single quotes. Anything
    malformed becomes a RejectNote; this never raises.
    """
    candidates = _FENCE_RE.findall(raw) or [raw]
    items: list = []
    rejects: list[RejectNote] = []
    for candidate in candidates:
        parsed = _loads_tolerant(candidate.strip())
        if isinstance(parsed, dict):
            items.append(parsed)
            continue
        if isinstance(parsed, list):
            items.extend(parsed)
            continue
        fragments = _balanced_objects(candidate)
        if not fragments:
            rejects.append(RejectNote("no JSON object found", candidate.strip()[:200]))
            continue
        for fragment in fragments:
            parsed = _loads_tolerant(fragment)
            if parsed is None:
                rejects.append(RejectNote("unparseable object", fragment[:200]))
            else:
                items.append(parsed)

    pairs: list[InstructionPair] = []
    for item in items:
        if not isinstance(item, dict):
            rejects.append(RejectNote("not an object", repr(item)[:200]))
            continue
        input_text = item.get("input")
        output_text = item.get("output")
        if not isinstance(input_text, str) or not input_text.strip():
            rejects.append(RejectNote("missing input", repr(item)[:200]))
            continue
        if not isinstance(output_text, str) or not output_text.strip():
            rejects.append(RejectNote("missing output", repr(item)[:200]))
            continue
        if input_text == output_text:
            rejects.append(RejectNote("input equals output", repr(item)[:200]))
            continue
        pairs.append(InstructionPair(input=input_text, output=output_text,
                                     task=task, ref=ref, provenance=provenance))
    return pairs, rejects


# --- generation ---

def document_text(doc) -> str:
    """Full normalized text of a document: front matter plus article texts."""
    parts = [doc.front_matter] if doc.front_matter else []
    for seg in segment(doc, "article"):
        parts.append(seg.text)
    return "\n".join(parts)


def _units_for_task(task: TaskKind, corpus: Corpus, chunk_cfg: ChunkConfig) -> list[Segment | Chunk]:
    """The cycle of context units a task draws from.

    Element extraction and Q&A cite specific clauses, so they work on
    clause then article segments; summaries span articles and chapters;
    the remaining tasks consume sliding-window chunks over whole documents.
    """
    if task in (TaskKind.ELEMENT_EXTRACTION, TaskKind.LEGAL_QA):
        units: list = []
        for doc in corpus.documents:
            units.extend(segment(doc, "clause"))
            units.extend(segment(doc, "article"))
        return units
    if task is TaskKind.SUMMARIZATION:
        units = []
        for doc in corpus.documents:
            units.extend(segment(doc, "article"))
            units.extend(segment(doc, "chapter"))
        return units
    chunks: list = []
    for doc in corpus.documents:
        doc_ref = SourceRef(doc.id)
        chunks.extend(chunk_text(document_text(doc), chunk_cfg, ref=doc_ref,
                                 id_prefix=doc.id, seq_start=len(chunks)))
    return chunks


def generate_dataset(corpus: Corpus, cfg: GenerationJobConfig,
                     chunk_cfg: ChunkConfig, client: ChatClient,
                     parallelism: int = 1) -> list[InstructionPair]:
    """Generate instruction pairs per task until every target is met.

    Cycles each task's units, requesting items_per_call records per prompt
    (fewer for the last call). A call that raises or contributes nothing
    counts as a failure; more than max_retries consecutive failures abandon
    the task. Any shortfall raises TargetUnreachableError carrying the
    partial dataset.
    """
    if not corpus.documents:
        raise ValueError("corpus has no documents")
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")

    collected: list[InstructionPair] = []
    seen: set[tuple[str, TaskKind]] = set()
    shortfall: dict[str, int] = {}

    def run_call(unit, n: int):
        text = unit.text
        prompt = build_prompt(task, text, unit.ref, n)
        provenance = f"{client.identity}:{prompt_fingerprint(prompt)}"
        raw = client.complete(prompt)
        return parse_client_response(raw, task, unit.ref, provenance)

    for task in TaskKind:
        target = cfg.targets.get(task, 0)
        if target <= 0:
            continue
        units = _units_for_task(task, corpus, chunk_cfg)
        remaining = target
        unit_idx = 0
        failures = 0
        abandoned = False
        while remaining > 0 and not abandoned:
            wave: list[tuple[object, int]] = []
            planned = remaining
            while planned > 0 and len(wave) < parallelism:
                n = min(cfg.items_per_call, planned)
                wave.append((units[unit_idx % len(units)], n))
                unit_idx += 1
                planned -= n
            if parallelism == 1:
                outcomes = []
                for unit, n in wave:
                    try:
                        outcomes.append(run_call(unit, n))
                    except Exception as exc:  # noqa: BLE001 - client failures are data here
                        outcomes.append(exc)
            else:
                with ThreadPoolExecutor(max_workers=parallelism) as pool:
                    futures = [pool.submit(run_call, unit, n) for unit, n in wave]
                    outcomes = []
                    for future in futures:
                        try:
                            outcomes.append(future.result())
                        except Exception as exc:  # noqa: BLE001
                            outcomes.append(exc)
            for outcome in outcomes:
                if remaining <= 0:
                    break
                if isinstance(outcome, Exception):
                    logger.warning("%s call failed: %s", task.value, outcome)
                    failures += 1
                else:
                    pairs, rejects = outcome
                    for note in rejects:
                        logger.debug("%s reject: %s", task.value, note.reason)
                    accepted = 0
                    for pair in pairs:
                        if remaining <= 0:
                            break
                        key = (pair.input, pair.task)
                        if key in seen:
                            continue
                        seen.add(key)
                        collected.append(pair)
                        accepted += 1
                        remaining -= 1
                    if accepted > 0:
                        failures = 0
                    else:
                        failures += 1
                if failures > cfg.max_retries:
                    abandoned = True
                    break
        if remaining > 0:
            shortfall[task.value] = remaining

    result = validate_and_dedup(collected)
    if shortfall:
        raise TargetUnreachableError(shortfall, result)
    return result


def validate_and_dedup(pairs: list[InstructionPair]) -> list[InstructionPair]:
    """Drop empty-field and duplicate (input, task) records; idempotent."""
    out: list[InstructionPair] = []
    seen: set[tuple[str, TaskKind]] = set()
    for pair in pairs:
        if not pair.input.strip() or not pair.output.strip() or pair.input == pair.output:
            continue
        key = (pair.input, pair.task)
        if key in seen:
            continue
        seen.add(key)
        out.append(pair)
    return out


def split_dataset(pairs: list[InstructionPair], test_fraction: float,
                  seed: int) -> tuple[list[InstructionPair], list[InstructionPair]]:
    """Deterministic stratified split; each task contributes floor(f * n) test rows.

    Membership is decided by a seeded hash over per-task positions, so the
    same seed always produces the same split regardless of platform.
    """
    if not pairs:
        raise ValueError("cannot split an empty dataset")
    if not (0.0 < test_fraction < 1.0):
        raise InvalidFractionError(f"test fraction must be in (0, 1), got {test_fraction}")

    by_task: dict[TaskKind, list[int]] = {}
    for idx, pair in enumerate(pairs):
        by_task.setdefault(pair.task, []).append(idx)

    test_indices: set[int] = set()
    for task, indices in by_task.items():
        n_test = int(test_fraction * len(indices))
        def order_key(position: int) -> str:
            return hashlib.sha256(f"{seed}:{task.value}:{position}".encode()).hexdigest()
        ranked = sorted(range(len(indices)), key=order_key)
        test_indices.update(indices[pos] for pos in ranked[:n_test])

    train = [p for i, p in enumerate(pairs) if i not in test_indices]
    test = [p for i, p in enumerate(pairs) if i in test_indices]
    return train, test


# --- export / import ---

def pair_to_dict(pair: InstructionPair) -> dict:
    return {
        "input": pair.input,
        "output": pair.output,
        "task": pair.task.value,
        "ref": pair.ref.canonical() if pair.ref else None,
        "provenance": pair.provenance,
    }


def pair_from_dict(rec: dict) -> InstructionPair:
    return InstructionPair(
        input=rec["input"],
        output=rec["output"],
        task=TaskKind(rec["task"]),
        ref=parse_ref(rec["ref"]) if rec.get("ref") else None,
        provenance=rec.get("provenance", ""),
    )


def export_jsonl(pairs: list[InstructionPair], path) -> int:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_to_dict(pair), ensure_ascii=False) + "\n")
    return len(pairs)


def load_jsonl(path) -> list[InstructionPair]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                pairs.append(pair_from_dict(json.loads(line)))
    return pairs


# --- training manifest (descriptive only; no training runs here) ---

PER_DEVICE_BATCH = {"llama2-7b": 2, "wizardlm-13b": 1}


@dataclass
class TrainingManifest:
    base_model: str = "llama2-7b"
    method: str = "lora-peft"
    epochs: int = 3
    per_device_batch: int = 2
    max_source_tokens: int = 2048
    max_target_tokens: int = 1024
    dataset_path: str = ""
    dataset_sha256: str = ""

    def __post_init__(self):
        if self.max_source_tokens <= 0 or self.max_target_tokens <= 0:
            raise ValueError("token limits must be positive")


def build_training_manifest(dataset_path, base_model: str = "llama2-7b") -> TrainingManifest:
    digest = hashlib.sha256()
    with open(dataset_path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return TrainingManifest(
        base_model=base_model,
        per_device_batch=PER_DEVICE_BATCH.get(base_model, 1),
        dataset_path=str(dataset_path),
        dataset_sha256=digest.hexdigest(),
    )


def export_training_manifest(manifest: TrainingManifest, path) -> None:
    payload = asdict(manifest)
    payload["schema_version"] = 1
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
