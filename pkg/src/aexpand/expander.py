"""Expansion backends and the shared top-k filter/rank pipeline.

A backend turns an (optional context, abbreviation) query into ranked
full-phrase options. Whatever the backend (frequency look-up, constrained
n-gram decoding, or a remote sampling model), candidates pass through the
same pipeline: normalize, de-duplicate with counts, keep only phrases
whose abbreviation matches the query, sort by count, truncate to k.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .abbrev import Abbreviation, abbreviate, normalize_phrase
from .dialogdata import (
    AEExample,
    context_clause,
    instruction_for,
    render_canonical,
    shorthand_text,
)
from .ngram import NgramModel, constrained_beam_search
from .noise import KeyboardLayout, chars_match_nearby


@dataclass(frozen=True)
class ExpansionQuery:
    context: tuple[str, ...] = ()
    abbreviation: Abbreviation = ""
    noisy: bool = False
    k: int = 5

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.abbreviation:
            raise ValueError("abbreviation must be non-empty")


@dataclass(frozen=True)
class ExpansionOption:
    phrase: str  # normalized
    count: int
    score: float | None = None


@dataclass(frozen=True)
class ExpansionResult:
    options: tuple[ExpansionOption, ...] = ()
    raw_sample_count: int = 0

    def phrases(self) -> list[str]:
        return [o.phrase for o in self.options]


class ExpansionBackend(Protocol):
    def expand(self, query: ExpansionQuery) -> ExpansionResult: ...


# --------------------------------------------------------------------------
# Look-up table backend
# --------------------------------------------------------------------------


class LookUpTable:
    """abbreviation -> accumulated (normalized phrase, frequency) pairs."""

    def __init__(self) -> None:
        self._table: dict[Abbreviation, Counter] = defaultdict(Counter)

    def add(self, abbrev: Abbreviation, phrase: str, count: int = 1) -> None:
        self._table[abbrev][phrase] += count

    def get(self, abbrev: Abbreviation) -> list[tuple[str, int]]:
        counter = self._table.get(abbrev)
        return list(counter.items()) if counter else []

    def __len__(self) -> int:
        return len(self._table)

    @property
    def total_pairs(self) -> int:
        return sum(len(c) for c in self._table.values())

    def save(self, path: str | Path) -> None:
        """Tab-separated `abbrev<TAB>phrase<TAB>count`, sorted."""
        with open(path, "w", encoding="utf-8") as fh:
            for abbrev in sorted(self._table):
                counter = self._table[abbrev]
                for phrase, count in sorted(counter.items(), key=lambda pc: (-pc[1], pc[0])):
                    fh.write(f"{abbrev}\t{phrase}\t{count}\n")

    @classmethod
    def load(cls, path: str | Path) -> "LookUpTable":
        table = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                abbrev, phrase, count = line.split("\t")
                table.add(abbrev, phrase, int(count))
        return table


def build_lut(examples: Iterable[AEExample]) -> LookUpTable:
    """Accumulate phrase frequencies keyed by the clean abbreviation of
    each example's target."""
    table = LookUpTable()
    for ex in examples:
        table.add(abbreviate(ex.full.normalized), ex.full.normalized, 1)
    return table


def lut_expand(
    table: LookUpTable,
    query: ExpansionQuery,
    rng: np.random.Generator | None = None,
) -> ExpansionResult:
    """Top-k stored phrases by frequency; ties permuted uniformly at random."""
    entries = table.get(query.abbreviation)
    if not entries:
        return ExpansionResult((), 0)
    if rng is None:
        rng = np.random.default_rng(0)
    by_count: dict[int, list[str]] = defaultdict(list)
    for phrase, count in entries:
        by_count[count].append(phrase)
    ranked: list[tuple[str, int]] = []
    for count in sorted(by_count, reverse=True):
        group = sorted(by_count[count])
        perm = rng.permutation(len(group))
        ranked.extend((group[i], count) for i in perm)
    options = tuple(ExpansionOption(p, c) for p, c in ranked[: query.k])
    return ExpansionResult(options, raw_sample_count=len(entries))


@dataclass
class LutBackend:
    table: LookUpTable
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))

    def expand(self, query: ExpansionQuery) -> ExpansionResult:
        return lut_expand(self.table, query, self.rng)


# --------------------------------------------------------------------------
# Constrained n-gram backend
# --------------------------------------------------------------------------


def ngram_constrained_expand(
    model: NgramModel,
    query: ExpansionQuery,
    beam_width: int = 64,
) -> ExpansionResult:
    """Beam-decode the abbreviation into word sequences; scores come from
    the model conditioned on the words of the final context turn."""
    seed: tuple[str, ...] = ()
    if query.context:
        seed = tuple(normalize_phrase(query.context[-1]).normalized.split())
    results = constrained_beam_search(
        model,
        query.abbreviation,
        seed_history=seed,
        beam_width=beam_width,
        top_k=query.k,
    )
    options = tuple(
        ExpansionOption(" ".join(words), count=1, score=score)
        for score, words in results
    )
    return ExpansionResult(options, raw_sample_count=len(results))


@dataclass
class NgramBackend:
    model: NgramModel
    beam_width: int = 64

    def expand(self, query: ExpansionQuery) -> ExpansionResult:
        return ngram_constrained_expand(self.model, query, self.beam_width)


def build_ngram_backend(
    examples: Iterable[AEExample], order: int = 3, beam_width: int = 64
) -> NgramBackend:
    """Train an n-gram backend from converted examples.

    Each target trains the model on its own words; when context is
    present the words of the final context turn are prepended so the
    model learns to carry information across the turn boundary.
    """
    sequences: list[list[str]] = []
    for ex in examples:
        target = ex.full.normalized.split()
        if not target:
            continue
        sequences.append(target)
        if ex.context:
            ctx_words = normalize_phrase(ex.context[-1]).normalized.split()
            if ctx_words:
                sequences.append(ctx_words + target)
    model = NgramModel(order=order).fit(sequences)
    return NgramBackend(model, beam_width=beam_width)


# --------------------------------------------------------------------------
# Sampling / prompting
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplingConfig:
    temperature: float = 1.0
    top_k_logits: int = 40
    num_samples: int = 128
    max_tokens: int = 16


@dataclass(frozen=True)
class PromptSpec:
    mode: str = "no_instr"  # no_instr | zero_shot | few_shot
    shots: tuple[AEExample, ...] = ()
    char_spaced: bool = True

    def __post_init__(self) -> None:
        if self.mode not in ("no_instr", "zero_shot", "few_shot"):
            raise ValueError(f"unknown prompt mode {self.mode!r}")
        if self.mode == "few_shot" and len(self.shots) != 4:
            raise ValueError("few_shot prompts take exactly 4 shots")


def render_query(query: ExpansionQuery, char_spaced: bool = True) -> str:
    """Query block with an open Full clause for the model to complete."""
    return (
        context_clause(query.context)
        + "Shorthand: {"
        + shorthand_text(query.abbreviation, char_spaced)
        + "}. Full: {"
    )


def build_prompt(spec: PromptSpec, query: ExpansionQuery) -> str:
    """Instruction, optional shot examples, then the open query block."""
    blocks: list[str] = []
    if spec.mode in ("zero_shot", "few_shot"):
        blocks.append(instruction_for(query.context))
    if spec.mode == "few_shot":
        blocks.extend(
            render_canonical(shot, char_spaced=spec.char_spaced) for shot in spec.shots
        )
    blocks.append(render_query(query, spec.char_spaced))
    return "\n".join(blocks)


# --------------------------------------------------------------------------
# Filtering and ranking
# --------------------------------------------------------------------------


def parse_completion(raw: str) -> str:
    """First line of a raw sample, unwrapped from a `{...}` delimiter if
    the model echoed one."""
    line = raw.split("\n", 1)[0]
    if "}" in line:
        line = line[: line.index("}")]
    if line.startswith("{"):
        line = line[1:]
    return line


def matches_abbreviation(
    phrase_normalized: str,
    query: ExpansionQuery,
    layout: KeyboardLayout | None = None,
) -> bool:
    """The active match predicate: exact abbreviation equality, or with
    ``noisy`` a character-wise nearby-key match of equal length.

    Characters without a key (digits, rare symbols) pass the typing
    channel unaltered, so under noisy matching they must compare equal.
    """
    candidate = abbreviate(phrase_normalized)
    if not query.noisy:
        return candidate == query.abbreviation
    if layout is None:
        raise ValueError("noisy matching needs a keyboard layout")
    if len(candidate) != len(query.abbreviation):
        return False
    return all(
        typed == ch or chars_match_nearby(layout, typed, ch)
        for typed, ch in zip(query.abbreviation, candidate)
    )


def filter_and_rank(
    samples: Sequence[str],
    query: ExpansionQuery,
    layout: KeyboardLayout | None = None,
) -> ExpansionResult:
    """Normalize, group with counts, filter on the match predicate, rank.

    Ranking is by count descending with ties broken by first occurrence
    in the sample stream, then truncated to the query's k.
    """
    counts: dict[str, int] = {}
    first_seen: dict[str, int] = {}
    for i, raw in enumerate(samples):
        normalized = normalize_phrase(parse_completion(raw)).normalized
        if not normalized:
            continue
        counts[normalized] = counts.get(normalized, 0) + 1
        first_seen.setdefault(normalized, i)
    kept = [
        (phrase, count)
        for phrase, count in counts.items()
        if matches_abbreviation(phrase, query, layout)
    ]
    kept.sort(key=lambda pc: (-pc[1], first_seen[pc[0]]))
    options = tuple(ExpansionOption(p, c) for p, c in kept[: query.k])
    return ExpansionResult(options, raw_sample_count=len(samples))
