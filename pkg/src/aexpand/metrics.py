"""Accuracy, BLEU, and keystroke-saving metrics over expansion results.

All metrics compare against the normalized ground truth. Keystroke saving
counts every character the user would actually type, spaces included: a
matched expansion saves L_full - L_abbrev presses; a miss is penalized by
a full re-entry of the phrase, which makes its saving rate negative.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .abbrev import normalize_phrase
from .expander import ExpansionQuery, ExpansionResult

BLEU_MAX_ORDER = 4
BLEU_EPS = 0.1

DEFAULT_BINS = ((1, 2), (3, 4), (5, 6), (7, 8), (9, 10))


@dataclass(frozen=True)
class EvalRecord:
    query: ExpansionQuery
    ground_truth: str  # normalized
    options: ExpansionResult

    def __post_init__(self) -> None:
        if self.ground_truth != normalize_phrase(self.ground_truth).normalized:
            raise ValueError(f"ground truth not normalized: {self.ground_truth!r}")

    @property
    def matched(self) -> bool:
        return any(o.phrase == self.ground_truth for o in self.options.options)


def accuracy_at_k(records: list[EvalRecord]) -> float:
    """Percentage of records whose truth appears among the options."""
    if not records:
        raise ValueError("no records")
    return 100.0 * sum(r.matched for r in records) / len(records)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_bleu(
    candidate: str,
    reference: str,
    max_order: int = BLEU_MAX_ORDER,
    eps: float = BLEU_EPS,
) -> float:
    """Smoothed sentence BLEU in [0, 1] over whitespace tokens.

    Modified n-gram precisions up to ``max_order`` combine by geometric
    mean; a zero match count is smoothed to ``eps``; orders longer than
    the candidate are skipped so short candidates stay well defined. The
    brevity penalty exp(1 - r/c) applies when the candidate is shorter
    than the reference.
    """
    ref_tokens = reference.split()
    if not ref_tokens:
        raise ValueError("empty reference")
    cand_tokens = candidate.split()
    if not cand_tokens:
        return 0.0
    orders = min(max_order, len(cand_tokens))
    log_prec_sum = 0.0
    for n in range(1, orders + 1):
        cand_ngrams = _ngrams(cand_tokens, n)
        ref_ngrams = _ngrams(ref_tokens, n)
        matches = sum(min(c, ref_ngrams[g]) for g, c in cand_ngrams.items())
        total = len(cand_tokens) - n + 1
        log_prec_sum += math.log((matches if matches > 0 else eps) / total)
    c, r = len(cand_tokens), len(ref_tokens)
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_prec_sum / orders)


def bleu_at_k(records: list[EvalRecord], rank1_only: bool = False) -> float:
    """Mean over records of the best option BLEU, as a percentage.

    ``rank1_only`` scores only the top-ranked option, for sensitivity
    checks of the max-over-options reduction.
    """
    if not records:
        raise ValueError("no records")
    total = 0.0
    for rec in records:
        options = rec.options.options
        if rank1_only:
            options = options[:1]
        if options:
            total += max(sentence_bleu(o.phrase, rec.ground_truth) for o in options)
    return 100.0 * total / len(records)


def ksr(records: list[EvalRecord]) -> dict:
    """Keystroke saving rates over all records and over matches only.

    Matched records save (1 - L_abbrev / L_full) * 100 percent; misses
    pay the penalty of retyping the whole phrase, i.e.
    (1 - (L_abbrev + L_full) / L_full) * 100. Records with an empty
    ground truth are excluded and counted in ``n_skipped``.
    ``ksr_success`` is None when nothing matched.
    """
    if not records:
        raise ValueError("no records")
    all_rates: list[float] = []
    success_rates: list[float] = []
    skipped = 0
    for rec in records:
        l_full = len(rec.ground_truth)
        l_abbrev = len(rec.query.abbreviation)
        if l_full == 0:
            skipped += 1
            continue
        if rec.matched:
            rate = (1.0 - l_abbrev / l_full) * 100.0
            success_rates.append(rate)
        else:
            rate = (1.0 - (l_abbrev + l_full) / l_full) * 100.0
        all_rates.append(rate)
    if not all_rates:
        raise ValueError("no scoreable records")
    return {
        "ksr_all": sum(all_rates) / len(all_rates),
        "ksr_success": (
            sum(success_rates) / len(success_rates) if success_rates else None
        ),
        "n_skipped": skipped,
    }


def compute_slice(records: list[EvalRecord]) -> dict:
    """The four headline metrics plus the record count for one slice."""
    rates = ksr(records)
    return {
        "n": len(records),
        "acc_at_k": accuracy_at_k(records),
        "bleu_at_k": bleu_at_k(records),
        "ksr_all": rates["ksr_all"],
        "ksr_success": rates["ksr_success"],
    }


def bin_label(lo: int, hi: int) -> str:
    return f"{lo}-{hi}"


@dataclass
class MetricsReport:
    """Headline metrics with per-abbreviation-length and per-turn slices.

    ``run_stats`` carries {metric: {"mean", "sd"}} when the report
    aggregates repeated runs; headline values then equal the means.
    """

    n: int
    acc_at_k: float
    bleu_at_k: float
    ksr_all: float
    ksr_success: float | None
    per_bin: dict[str, dict] = field(default_factory=dict)
    per_turn: dict[int, dict] = field(default_factory=dict)
    run_stats: dict[str, dict] | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "acc_at_k": self.acc_at_k,
            "bleu_at_k": self.bleu_at_k,
            "ksr_all": self.ksr_all,
            "ksr_success": self.ksr_success,
            "per_bin": self.per_bin,
            "per_turn": {str(k): v for k, v in self.per_turn.items()},
            "run_stats": self.run_stats,
            "metadata": self.metadata,
        }

    def csv_rows(self) -> list[list[str]]:
        """Per-bin table with one-decimal percentages, overall row last."""

        def fmt(v: float | None) -> str:
            return "" if v is None else f"{v:.1f}"

        header = ["abbrev_length", "n", "acc_at_5", "bleu_at_5", "ksr_all", "ksr_success"]
        rows = [header]
        for label, values in self.per_bin.items():
            rows.append(
                [
                    label,
                    str(values["n"]),
                    fmt(values["acc_at_k"]),
                    fmt(values["bleu_at_k"]),
                    fmt(values["ksr_all"]),
                    fmt(values["ksr_success"]),
                ]
            )
        rows.append(
            [
                "all",
                str(self.n),
                fmt(self.acc_at_k),
                fmt(self.bleu_at_k),
                fmt(self.ksr_all),
                fmt(self.ksr_success),
            ]
        )
        return rows


def compute_report(
    records: list[EvalRecord],
    bins: tuple[tuple[int, int], ...] = DEFAULT_BINS,
    max_turn: int | None = None,
    turn_of: dict[int, int] | None = None,
) -> MetricsReport:
    """Single-run report over records, sliced by abbreviation length and,
    when ``turn_of`` maps record index -> turn index, by dialog turn."""
    overall = compute_slice(records)
    per_bin: dict[str, dict] = {}
    for lo, hi in bins:
        subset = [r for r in records if lo <= len(r.query.abbreviation) <= hi]
        if subset:
            per_bin[bin_label(lo, hi)] = compute_slice(subset)
    per_turn: dict[int, dict] = {}
    if turn_of:
        turns = sorted(set(turn_of.values()))
        for turn in turns:
            if max_turn is not None and turn > max_turn:
                continue
            subset = [r for i, r in enumerate(records) if turn_of.get(i) == turn]
            if subset:
                per_turn[turn] = compute_slice(subset)
    return MetricsReport(
        n=overall["n"],
        acc_at_k=overall["acc_at_k"],
        bleu_at_k=overall["bleu_at_k"],
        ksr_all=overall["ksr_all"],
        ksr_success=overall["ksr_success"],
        per_bin=per_bin,
        per_turn=per_turn,
    )
