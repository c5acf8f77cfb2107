"""Independent brute-force reference implementations of BLEU and METEOR.

Deliberately naive: n-gram matches come from list.count over explicit
enumeration, and the METEOR chunk count is minimized by enumerating every
maximum-cardinality alignment with itertools. These stay separate from the
production code paths.
"""

from __future__ import annotations

import math
from itertools import combinations, permutations, product


def bleu_oracle(hyp: list[str], ref: list[str], max_n: int = 4,
                smoothing: str = "add_epsilon", eps: float = 0.1) -> float:
    if not hyp:
        return 0.0
    effective = min(max_n, len(hyp))
    precisions = []
    for n in range(1, effective + 1):
        hyp_ngrams = [tuple(hyp[i:i + n]) for i in range(len(hyp) - n + 1)]
        ref_ngrams = [tuple(ref[i:i + n]) for i in range(len(ref) - n + 1)]
        matches = 0
        for gram in set(hyp_ngrams):
            matches += min(hyp_ngrams.count(gram), ref_ngrams.count(gram))
        if matches == 0:
            if n == 1 or smoothing == "none":
                return 0.0
            precisions.append(eps / len(hyp_ngrams))
        else:
            precisions.append(matches / len(hyp_ngrams))
    geo_mean = 1.0
    for p in precisions:
        geo_mean *= p ** (1.0 / effective)
    bp = 1.0 if len(hyp) >= len(ref) else math.exp(1.0 - len(ref) / len(hyp))
    return bp * geo_mean


def _chunk_count(pairs: list[tuple[int, int]]) -> int:
    chunks = 0
    previous = None
    for pair in sorted(pairs):
        if previous is None or pair != (previous[0] + 1, previous[1] + 1):
            chunks += 1
        previous = pair
    return chunks


def meteor_oracle(hyp: list[str], ref: list[str], alpha: float = 0.9,
                  beta: float = 3.0, gamma: float = 0.5) -> float:
    if not hyp:
        return 0.0
    shared = sorted(set(hyp) & set(ref))
    m = 0
    word_options = []
    for word in shared:
        hyp_positions = [i for i, t in enumerate(hyp) if t == word]
        ref_positions = [j for j, t in enumerate(ref) if t == word]
        k = min(len(hyp_positions), len(ref_positions))
        m += k
        options = []
        for chosen_hyp in combinations(hyp_positions, k):
            for chosen_ref in permutations(ref_positions, k):
                options.append(list(zip(chosen_hyp, chosen_ref)))
        word_options.append(options)
    if m == 0:
        return 0.0
    best_chunks = m + 1
    for combo in product(*word_options):
        pairs = [pair for option in combo for pair in option]
        best_chunks = min(best_chunks, _chunk_count(pairs))
    precision = m / len(hyp)
    recall = m / len(ref)
    f_mean = precision * recall / (alpha * precision + (1 - alpha) * recall)
    penalty = gamma * (best_chunks / m) ** beta
    return f_mean * (1.0 - penalty)
