"""Interpolated n-gram language model and abbreviation-constrained decoding.

A small stand-in for a large generative model: next-word probabilities
interpolate maximum-likelihood estimates of every history length up to
order-1 with a uniform floor, so the distribution over the vocabulary is
proper for any history. The constrained beam search expands an
abbreviation into word sequences whose per-word abbreviations concatenate
to exactly the query string.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from typing import Iterable, Sequence

from .abbrev import word_abbreviation


class NgramModel:
    """Order-k interpolated n-gram model over whitespace tokens.

    ``smoothing`` holds the interpolation weights, one per component:
    (uniform, history length 0, ..., history length order-1). Unseen or
    too-short histories make their component fall back to uniform, which
    keeps every conditional distribution summing to one.
    """

    def __init__(self, order: int, smoothing: Sequence[float] | None = None):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = order
        if smoothing is None:
            # Small uniform floor, then double the weight per extra
            # history word so longer matches dominate.
            raw = [0.01] + [2.0**j for j in range(order)]
        else:
            raw = list(smoothing)
            if len(raw) != order + 1:
                raise ValueError("smoothing needs order + 1 weights")
            if any(w < 0 for w in raw) or sum(raw) <= 0:
                raise ValueError("smoothing weights must be non-negative")
        total = sum(raw)
        self.smoothing = tuple(w / total for w in raw)
        # One count table per history length: history tuple -> Counter.
        self._counts: list[dict[tuple[str, ...], Counter]] = [
            defaultdict(Counter) for _ in range(order)
        ]
        self._vocab: list[str] = []
        self._vocab_set: set[str] = set()
        self._abbrev_index: dict[str, list[str]] = defaultdict(list)
        self._max_unit_len = 0

    def fit(self, sequences: Iterable[Sequence[str]]) -> "NgramModel":
        """Accumulate counts from word sequences; callable repeatedly."""
        for seq in sequences:
            words = list(seq)
            for w in words:
                if w not in self._vocab_set:
                    self._vocab_set.add(w)
                    self._vocab.append(w)
                    unit = word_abbreviation(w)
                    if unit:
                        self._abbrev_index[unit].append(w)
                        self._max_unit_len = max(self._max_unit_len, len(unit))
            for j in range(self.order):
                table = self._counts[j]
                for i in range(j, len(words)):
                    table[tuple(words[i - j : i])][words[i]] += 1
        return self

    @property
    def vocabulary(self) -> dict[str, str]:
        """word -> its abbreviation contribution."""
        return {w: word_abbreviation(w) for w in self._vocab}

    @property
    def vocab_size(self) -> int:
        return len(self._vocab)

    def words_for_unit(self, unit: str) -> list[str]:
        """Vocabulary words whose abbreviation contribution equals ``unit``."""
        return self._abbrev_index.get(unit, [])

    @property
    def max_unit_len(self) -> int:
        return self._max_unit_len

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        if not self._vocab:
            raise ValueError("model has no vocabulary; call fit() first")
        uniform = 1.0 / len(self._vocab)
        h = tuple(history)[-(self.order - 1) :] if self.order > 1 else ()
        p = self.smoothing[0] * uniform
        for j in range(self.order):
            weight = self.smoothing[j + 1]
            if len(h) >= j:
                counter = self._counts[j].get(h[len(h) - j :] if j else ())
                if counter:
                    total = sum(counter.values())
                    p += weight * counter.get(word, 0) / total
                    continue
            p += weight * uniform
        return p

    def logprob(self, word: str, history: Sequence[str] = ()) -> float:
        return math.log(self.prob(word, history))

    def next_distribution(self, history: Sequence[str] = ()) -> dict[str, float]:
        """Full conditional distribution over the vocabulary."""
        return {w: self.prob(w, history) for w in self._vocab}

    def sequence_logprob(self, words: Sequence[str], history: Sequence[str] = ()) -> float:
        """Sum of next-word log probabilities along ``words``."""
        h = list(history)
        total = 0.0
        for w in words:
            total += self.logprob(w, h)
            h.append(w)
        return total


def constrained_beam_search(
    model: NgramModel,
    abbreviation: str,
    seed_history: Sequence[str] = (),
    beam_width: int = 64,
    top_k: int = 5,
) -> list[tuple[float, tuple[str, ...]]]:
    """Best word sequences whose abbreviations spell out the query exactly.

    A word may extend a hypothesis only when its abbreviation contribution
    continues the unconsumed part of the query; every word consumes at
    least one character, so the search terminates. Active hypotheses are
    pruned to ``beam_width`` by score per step; completed ones are kept.
    Returns (logprob, words) sorted by score, ties broken on the phrase.
    """
    if not abbreviation:
        raise ValueError("abbreviation must be non-empty")
    seed = tuple(seed_history)
    beams: list[tuple[float, int, tuple[str, ...]]] = [(0.0, 0, ())]
    completed: list[tuple[float, tuple[str, ...]]] = []
    total = len(abbreviation)
    while beams:
        extensions: list[tuple[float, int, tuple[str, ...]]] = []
        for score, pos, words in beams:
            rest = abbreviation[pos:]
            for unit_len in range(1, min(model.max_unit_len, len(rest)) + 1):
                unit = rest[:unit_len]
                for w in model.words_for_unit(unit):
                    new_score = score + model.logprob(w, seed + words)
                    new_words = words + (w,)
                    if pos + unit_len == total:
                        completed.append((new_score, new_words))
                    else:
                        extensions.append((new_score, pos + unit_len, new_words))
        extensions.sort(key=lambda b: (-b[0], b[2]))
        beams = extensions[:beam_width]
    completed.sort(key=lambda c: (-c[0], " ".join(c[1])))
    return completed[:top_k]
