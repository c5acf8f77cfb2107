"""Sentence-level BLEU and METEOR scoring with corpus report assembly.

BLEU here is the clipped n-gram precision geometric mean with a brevity
penalty, scored per example and averaged (pooling choice is recorded in the
report params). METEOR uses an exact-match unigram alignment that maximizes
matches and then minimizes the fragmentation chunk count; stemming/synonym
stages are pluggable matcher hooks and default to off.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field, asdict
from typing import Callable, Sequence

from .errors import EmptyReferenceError, SchemaError

SMOOTHING_MODES = ("none", "add_epsilon")

# Matcher hook: returns True when two tokens should count as aligned in a
# post-exact METEOR stage (e.g. a stemmer or synonym table).
TokenMatcher = Callable[[str, str], bool]


@dataclass(frozen=True)
class EvalParams:
    bleu_max_n: int = 4
    bleu_smoothing: str = "add_epsilon"
    bleu_epsilon: float = 0.1
    meteor_alpha: float = 0.9
    meteor_beta: float = 3.0
    meteor_gamma: float = 0.5
    lowercase: bool = True
    # Recorded decision: per-example scores averaged, not corpus-pooled counts.
    bleu_pooling: str = "sentence_average"

    def __post_init__(self):
        if self.bleu_max_n < 1:
            raise ValueError("bleu_max_n must be >= 1")
        if self.bleu_smoothing not in SMOOTHING_MODES:
            raise ValueError(f"bleu_smoothing must be one of {SMOOTHING_MODES}")
        if self.meteor_alpha <= 0 or self.meteor_beta <= 0 or self.meteor_gamma <= 0:
            raise ValueError("meteor parameters must be positive")
        if self.meteor_gamma > 1:
            raise ValueError("meteor_gamma must be <= 1")


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Score tokenization: optional lowercase, words and punctuation split."""
    if lowercase:
        text = text.lower()
    return re.findall(r"\w+|[^\w\s]", text)


def bleu(hypothesis: Sequence[str], reference: Sequence[str],
         params: EvalParams = EvalParams()) -> float:
    """Clipped n-gram precision geometric mean times the brevity penalty.

    Uses uniform weights over the effective orders 1..min(max_n, |hyp|).
    With add_epsilon smoothing, zero match counts for n > 1 become epsilon;
    a zero unigram overlap always scores 0.
    """
    if not reference:
        raise EmptyReferenceError("BLEU needs a nonempty reference")
    hyp = list(hypothesis)
    ref = list(reference)
    if not hyp:
        return 0.0

    effective_n = min(params.bleu_max_n, len(hyp))
    log_sum = 0.0
    for n in range(1, effective_n + 1):
        hyp_grams = Counter(tuple(hyp[i:i + n]) for i in range(len(hyp) - n + 1))
        ref_grams = Counter(tuple(ref[i:i + n]) for i in range(len(ref) - n + 1))
        matches = sum(min(count, ref_grams[gram]) for gram, count in hyp_grams.items())
        total = len(hyp) - n + 1
        if matches == 0:
            if n == 1 or params.bleu_smoothing == "none":
                return 0.0
            matched = params.bleu_epsilon
        else:
            matched = float(matches)
        log_sum += math.log(matched / total) / effective_n

    precision = math.exp(log_sum)
    if len(hyp) >= len(ref):
        bp = 1.0
    else:
        bp = math.exp(1.0 - len(ref) / len(hyp))
    return bp * precision


# --- METEOR alignment ---

def _match_quota(hyp: list[str], ref: list[str]) -> int:
    hyp_counts = Counter(hyp)
    ref_counts = Counter(ref)
    return sum(min(c, ref_counts[w]) for w, c in hyp_counts.items())

# DFS node budget before the exact chunk search falls back to greedy.
_EXHAUSTIVE_NODE_BUDGET = 200_000


def _min_chunks_exhaustive(hyp: list[str], ref: list[str], m: int) -> int | None:
    """Minimum chunk count over all maximum-cardinality exact alignments.

    Returns None if the search exceeds its node budget (pathological
    repetition); callers then fall back to the greedy alignment.
    """
    best = m + 1
    budget = _EXHAUSTIVE_NODE_BUDGET
    exhausted = False
    ref_positions: dict[str, list[int]] = {}
    for j, w in enumerate(ref):
        ref_positions.setdefault(w, []).append(j)
    # suffix_bound[i]: optimistic match count from hyp positions i.. onward,
    # ignoring which ref slots are already taken. Used to prune branches
    # that cannot reach the maximum cardinality m.
    suffix_bound = [0] * (len(hyp) + 1)
    for i in range(len(hyp) - 1, -1, -1):
        suffix_bound[i] = _match_quota(hyp[i:], ref)

    used = [False] * len(ref)

    def walk(i: int, matched: int, chunks: int, last_j: int, extending: bool) -> None:
        nonlocal best, budget, exhausted
        if exhausted:
            return
        budget -= 1
        if budget <= 0:
            exhausted = True
            return
        if chunks >= best or matched + suffix_bound[i] < m:
            return
        if i == len(hyp):
            if matched == m:
                best = chunks
            return
        word = hyp[i]
        for j in ref_positions.get(word, ()):
            if used[j]:
                continue
            used[j] = True
            starts_new = not (extending and j == last_j + 1)
            walk(i + 1, matched + 1, chunks + (1 if starts_new else 0), j, True)
            used[j] = False
        # Leave hyp[i] unmatched.
        walk(i + 1, matched, chunks, last_j, False)

    walk(0, 0, 0, -2, False)
    if exhausted:
        return None
    return best


def _greedy_alignment(hyp: list[str], ref: list[str]) -> list[tuple[int, int]]:
    """Contiguity-preferring greedy alignment reaching the maximum match count."""
    free: dict[str, list[int]] = {}
    for j, w in enumerate(ref):
        free.setdefault(w, []).append(j)
    pairs: list[tuple[int, int]] = []
    last_j = -2
    for i, w in enumerate(hyp):
        slots = free.get(w)
        if not slots:
            last_j = -2
            continue
        if last_j + 1 in slots:
            j = last_j + 1
        else:
            j = slots[0]
        slots.remove(j)
        if not slots:
            del free[w]
        pairs.append((i, j))
        last_j = j
    return pairs


def _count_chunks(pairs: list[tuple[int, int]]) -> int:
    chunks = 0
    prev = None
    for i, j in sorted(pairs):
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def meteor(hypothesis: Sequence[str], reference: Sequence[str],
           params: EvalParams = EvalParams(),
           extra_matchers: Sequence[TokenMatcher] = ()) -> float:
    """Unigram alignment F-mean with a fragmentation penalty.

    The exact-match stage maximizes matches, then minimizes the chunk count
    (exhaustively up to 12 matches, greedily beyond). extra_matchers add
    optional post-exact stages over the leftover tokens.
    """
    if not reference:
        raise EmptyReferenceError("METEOR needs a nonempty reference")
    hyp = list(hypothesis)
    ref = list(reference)
    if not hyp:
        return 0.0

    m_exact = _match_quota(hyp, ref)
    chunks: int | None = None
    if m_exact > 0 and m_exact <= 12 and not extra_matchers:
        chunks = _min_chunks_exhaustive(hyp, ref, m_exact)
    if chunks is not None:
        m = m_exact
    else:
        # Greedy path: large alignments, budget exhaustion, or extra stages
        # (a combined alignment needs explicit pairs).
        pairs = _greedy_alignment(hyp, ref) if m_exact > 0 else []
        if extra_matchers:
            matched_i = {i for i, _ in pairs}
            matched_j = {j for _, j in pairs}
            for matcher in extra_matchers:
                for i, hw in enumerate(hyp):
                    if i in matched_i:
                        continue
                    for j, rw in enumerate(ref):
                        if j in matched_j or not matcher(hw, rw):
                            continue
                        pairs.append((i, j))
                        matched_i.add(i)
                        matched_j.add(j)
                        break
        m = len(pairs)
        chunks = _count_chunks(pairs)
    if m == 0:
        return 0.0

    precision = m / len(hyp)
    recall = m / len(ref)
    a = params.meteor_alpha
    f_mean = (precision * recall) / (a * precision + (1 - a) * recall)
    penalty = params.meteor_gamma * (chunks / m) ** params.meteor_beta
    return f_mean * (1.0 - penalty)


# --- corpus evaluation ---

@dataclass
class ScoredExample:
    example_id: str
    task: str
    hypothesis: str
    reference: str
    bleu: float
    meteor: float


@dataclass
class EvalReport:
    params: EvalParams
    examples: list[ScoredExample]
    mean_bleu: float
    mean_meteor: float
    per_task_means: dict[str, dict[str, float]]
    missing: list[str] = field(default_factory=list)
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "params": asdict(self.params),
            "examples": [asdict(e) for e in self.examples],
            "mean_bleu": self.mean_bleu,
            "mean_meteor": self.mean_meteor,
            "per_task_means": self.per_task_means,
            "missing": self.missing,
            "notes": self.notes,
        }


def example_id_for(task: str, input_text: str) -> str:
    """Stable id for a test-set record: hash of task + input."""
    digest = hashlib.sha1(f"{task}:{input_text}".encode("utf-8")).hexdigest()
    return digest[:12]


def _read_jsonl(path, required: tuple[str, ...]) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON ({exc.msg})", lineno) from exc
            if not isinstance(rec, dict):
                raise SchemaError("expected a JSON object", lineno)
            for key in required:
                if key not in rec or not isinstance(rec[key], str):
                    raise SchemaError(f"missing or non-string field {key!r}", lineno)
            rows.append(rec)
    return rows


def evaluate_run(outputs_path, test_set_path,
                 params: EvalParams = EvalParams(), notes: str = "") -> EvalReport:
    """Score an outputs file against a test set and assemble the report.

    Test-set rows need input/output/task; their example id is either an
    explicit example_id field or example_id_for(task, input). Output rows
    are {example_id, hypothesis}; test examples with no output row score as
    empty hypotheses and are listed under missing.
    """
    test_rows = _read_jsonl(test_set_path, required=("input", "output", "task"))
    if not test_rows:
        raise SchemaError("test set is empty", None)
    output_rows = _read_jsonl(outputs_path, required=("example_id", "hypothesis"))
    hypotheses: dict[str, str] = {}
    for lineno, rec in enumerate(output_rows, start=1):
        if rec["example_id"] in hypotheses:
            raise SchemaError(f"duplicate example_id {rec['example_id']!r}", lineno)
        hypotheses[rec["example_id"]] = rec["hypothesis"]

    examples: list[ScoredExample] = []
    missing: list[str] = []
    for rec in test_rows:
        example_id = rec.get("example_id") or example_id_for(rec["task"], rec["input"])
        hyp_text = hypotheses.get(example_id)
        if hyp_text is None:
            hyp_text = ""
            missing.append(example_id)
        hyp_tokens = tokenize(hyp_text, params.lowercase)
        ref_tokens = tokenize(rec["output"], params.lowercase)
        examples.append(ScoredExample(
            example_id=example_id,
            task=rec["task"],
            hypothesis=hyp_text,
            reference=rec["output"],
            bleu=bleu(hyp_tokens, ref_tokens, params),
            meteor=meteor(hyp_tokens, ref_tokens, params),
        ))

    mean_bleu = sum(e.bleu for e in examples) / len(examples)
    mean_meteor = sum(e.meteor for e in examples) / len(examples)
    per_task: dict[str, dict[str, float]] = {}
    for task in sorted({e.task for e in examples}):
        scoped = [e for e in examples if e.task == task]
        per_task[task] = {
            "bleu": sum(e.bleu for e in scoped) / len(scoped),
            "meteor": sum(e.meteor for e in scoped) / len(scoped),
            "count": float(len(scoped)),
        }
    if missing:
        note = f"{len(missing)} test example(s) had no output and scored 0"
        notes = f"{notes}\n{note}".strip()
    return EvalReport(params=params, examples=examples, mean_bleu=mean_bleu,
                      mean_meteor=mean_meteor, per_task_means=per_task,
                      missing=missing, notes=notes)


def save_report(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def render_results_table(rows: list[dict]) -> str:
    """Fixed-width comparison table: Model, Size, Method, BLEU, Meteor."""
    headers = ["Model", "Size", "Method", "BLEU", "Meteor"]
    table = [headers]
    for row in rows:
        table.append([
            str(row.get("model", "-")),
            str(row.get("size", "-")),
            str(row.get("method", "-")),
            f"{row['bleu']:.4f}",
            f"{row['meteor']:.4f}",
        ])
    widths = [max(len(r[c]) for r in table) for c in range(len(headers))]
    lines = []
    for idx, row in enumerate(table):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
