"""Dialog corpora to abbreviation-expansion examples.

Turns a multi-turn conversation into one training/eval record per turn:
the record's target is the first sentence of that turn and its context is
the preceding turns (full text, all sentences). Also covers dialog
deduplication between splits and the canonical text rendering used both
for emitted datasets and for model prompts.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .abbrev import Abbreviation, Phrase, abbreviate, normalize_phrase

CONTEXT_MODES = ("full", "previous_1", "none")

INSTRUCTION_WITH_CONTEXT = (
    "Given previous turn(s) of conversation and acronym of reply, write the full phrase."
)
INSTRUCTION_NO_CONTEXT = "Given acronym, write the full phrase."

_SENTENCE_END = ".!?"


def split_sentences(text: str) -> list[str]:
    """Split text at '.', '!' or '?' runs followed by whitespace or end.

    Delimiters stay attached to their sentence; empty strings are never
    returned.
    """
    sentences: list[str] = []
    buf: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        buf.append(ch)
        if ch in _SENTENCE_END:
            j = i + 1
            while j < n and text[j] in _SENTENCE_END:
                buf.append(text[j])
                j += 1
            if j >= n or text[j].isspace():
                sentence = "".join(buf).strip()
                if sentence:
                    sentences.append(sentence)
                buf = []
            i = j
        else:
            i += 1
    tail = "".join(buf).strip()
    if tail:
        sentences.append(tail)
    return sentences


@dataclass(frozen=True)
class Turn:
    """One utterance in a dialog."""

    speaker: int
    text: str

    @property
    def sentences(self) -> list[str]:
        return split_sentences(self.text)


@dataclass(frozen=True)
class Dialog:
    id: str
    turns: tuple[Turn, ...]

    def __post_init__(self) -> None:
        if not self.turns:
            raise ValueError(f"dialog {self.id!r} has no turns")


@dataclass(frozen=True)
class AEExample:
    """An (context, shorthand, full) abbreviation-expansion record.

    ``shorthand`` equals ``abbreviate(full)`` while ``noise_sigma`` is 0;
    after simulated typing noise it may differ by substituted characters.
    """

    context: tuple[str, ...]
    shorthand: Abbreviation
    full: Phrase
    turn_index: int
    noise_sigma: float = 0.0
    dialog_id: str = ""

    @property
    def abbrev_len(self) -> int:
        return len(self.shorthand)


def dialog_to_examples(dialog: Dialog, context_mode: str = "full") -> list[AEExample]:
    """One example per turn; targets whose abbreviation is empty are dropped.

    The n-th example's target is the normalized first sentence of turn n.
    Context depends on the mode: ``full`` carries turns 1..n-1,
    ``previous_1`` only turn n-1, ``none`` nothing. Context turns always
    carry all of their sentences.
    """
    if context_mode not in CONTEXT_MODES:
        raise ValueError(f"unknown context mode {context_mode!r}")
    turn_texts = [" ".join(t.text.split()) for t in dialog.turns]
    examples: list[AEExample] = []
    for n, turn in enumerate(dialog.turns, start=1):
        sentences = split_sentences(turn.text)
        if not sentences:
            continue
        full = normalize_phrase(sentences[0])
        shorthand = abbreviate(full)
        if not shorthand:
            continue
        if context_mode == "full":
            context = tuple(turn_texts[: n - 1])
        elif context_mode == "previous_1":
            context = tuple(turn_texts[n - 2 : n - 1])
        else:
            context = ()
        examples.append(
            AEExample(
                context=context,
                shorthand=shorthand,
                full=full,
                turn_index=n,
                dialog_id=dialog.id,
            )
        )
    return examples


def convert_dialogs(
    dialogs: list[Dialog], context_mode: str = "full"
) -> tuple[list[AEExample], int]:
    """Convert a corpus; returns (examples, number of dropped targets)."""
    examples: list[AEExample] = []
    total_turns = 0
    for dialog in dialogs:
        total_turns += len(dialog.turns)
        examples.extend(dialog_to_examples(dialog, context_mode))
    return examples, total_turns - len(examples)


def is_duplicate_dialog(a: Dialog, b: Dialog) -> bool:
    """Same turn count and either all turns or at least three turns equal.

    Turn comparison is case-insensitive on the raw text.
    """
    if len(a.turns) != len(b.turns):
        return False
    same = sum(
        x.text.casefold() == y.text.casefold() for x, y in zip(a.turns, b.turns)
    )
    return same == len(a.turns) or same >= 3


def find_duplicates(
    test_dialogs: list[Dialog], train_dialogs: list[Dialog]
) -> list[tuple[Dialog, Dialog]]:
    """Pairs (test dialog, first matching train dialog) flagged as duplicates."""
    pairs = []
    for t in test_dialogs:
        for tr in train_dialogs:
            if is_duplicate_dialog(t, tr):
                pairs.append((t, tr))
                break
    return pairs


def dedup_split(
    test_dialogs: list[Dialog], train_dialogs: list[Dialog]
) -> list[Dialog]:
    """Test dialogs minus any duplicate of a train dialog, order preserved."""
    removed = {id(t) for t, _ in find_duplicates(test_dialogs, train_dialogs)}
    return [d for d in test_dialogs if id(d) not in removed]


# --------------------------------------------------------------------------
# Canonical text rendering
# --------------------------------------------------------------------------


def shorthand_text(abbrev: Abbreviation, char_spaced: bool) -> str:
    """Abbreviation as rendered in text; model prompts space the characters
    apart so the tokenizer sees one character per token."""
    return " ".join(abbrev) if char_spaced else abbrev


def context_clause(context: tuple[str, ...]) -> str:
    if not context:
        return ""
    return "Context: " + " ".join("{" + t + "}" for t in context) + ". "


def instruction_for(context: tuple[str, ...]) -> str:
    return INSTRUCTION_WITH_CONTEXT if context else INSTRUCTION_NO_CONTEXT


def render_canonical(
    example: AEExample,
    with_instruction: str = "none",
    char_spaced: bool = False,
) -> str:
    """Canonical `Context: {..}. Shorthand: {..}. Full: {..}` line.

    The Context clause is omitted for the opening turn. The Full clause
    shows the original (display) first sentence. ``zero_shot`` prefixes
    the context-dependent task instruction.
    """
    if with_instruction not in ("none", "zero_shot"):
        raise ValueError(f"unknown instruction mode {with_instruction!r}")
    body = (
        context_clause(example.context)
        + "Shorthand: {"
        + shorthand_text(example.shorthand, char_spaced)
        + "}. Full: {"
        + example.full.raw
        + "}"
    )
    if with_instruction == "zero_shot":
        return instruction_for(example.context) + "\n" + body
    return body


_CANONICAL_RE = re.compile(
    r"^(?:Context: (?P<ctx>\{.*\})\. )?"
    r"Shorthand: \{(?P<shorthand>[^{}]*)\}\. Full: \{(?P<full>[^{}]*)\}$"
)


def parse_canonical(text: str) -> tuple[tuple[str, ...], str, str]:
    """Inverse of :func:`render_canonical` (instruction-free, unspaced form).

    Returns (context turns, shorthand, full). Assumes turn texts contain
    no curly braces, which holds for the corpora this pipeline ingests.
    """
    m = _CANONICAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a canonical rendering: {text!r}")
    ctx = m.group("ctx")
    context = tuple(re.findall(r"\{([^{}]*)\}", ctx)) if ctx else ()
    return context, m.group("shorthand"), m.group("full")


# --------------------------------------------------------------------------
# Corpus readers / example files
# --------------------------------------------------------------------------


def read_dialogs_jsonl(path: str | Path) -> list[Dialog]:
    """One dialog per line: {"id": ..., "turns": [{"speaker", "text"}, ...]}."""
    dialogs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            turns = tuple(
                Turn(speaker=int(t.get("speaker", i % 2)), text=t["text"])
                for i, t in enumerate(obj["turns"])
            )
            dialogs.append(Dialog(id=str(obj.get("id", lineno)), turns=turns))
    return dialogs


def read_dialogs_tdc(path: str | Path) -> list[Dialog]:
    """Plain-text corpus: one dialog per line, turns separated by tabs."""
    dialogs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            texts = [t.strip() for t in line.split("\t") if t.strip()]
            turns = tuple(Turn(speaker=i % 2, text=t) for i, t in enumerate(texts))
            dialogs.append(Dialog(id=str(lineno), turns=turns))
    return dialogs


def read_dialogs(path: str | Path, fmt: str = "jsonl") -> list[Dialog]:
    if fmt == "jsonl":
        return read_dialogs_jsonl(path)
    if fmt == "tdc-txt":
        return read_dialogs_tdc(path)
    raise ValueError(f"unknown corpus format {fmt!r}")


def example_to_dict(example: AEExample) -> dict:
    return {
        "context": list(example.context),
        "shorthand": example.shorthand,
        "full": example.full.normalized,
        "full_raw": example.full.raw,
        "turn_index": example.turn_index,
        "noise_sigma": example.noise_sigma,
        "abbrev_len": example.abbrev_len,
        "dialog_id": example.dialog_id,
    }


def example_from_dict(obj: dict) -> AEExample:
    return AEExample(
        context=tuple(obj.get("context", [])),
        shorthand=obj["shorthand"],
        full=Phrase(raw=obj.get("full_raw", obj["full"]), normalized=obj["full"]),
        turn_index=int(obj.get("turn_index", 1)),
        noise_sigma=float(obj.get("noise_sigma", 0.0)),
        dialog_id=str(obj.get("dialog_id", "")),
    )


def write_examples_jsonl(examples: list[AEExample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(example_to_dict(ex), ensure_ascii=False) + "\n")


def read_examples_jsonl(path: str | Path) -> list[AEExample]:
    examples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                examples.append(example_from_dict(json.loads(line)))
    return examples
