"""Deterministic word-initial abbreviation of phrases.

A phrase maps to a fixed abbreviation: each word contributes its initial
letter, contractions contribute one letter per apostrophe-separated part,
runs of digits pass through whole, and punctuation inside the sentence is
kept in place so it can constrain the structure of candidate expansions.
Sentence-final punctuation is stripped during normalization, which is the
same canonical form used when comparing candidate expansions to a query.
"""

from __future__ import annotations

from dataclasses import dataclass

# Characters treated as sentence-final when trailing the phrase.
FINAL_PUNCTUATION = ".!?"

# An abbreviation is a plain string of lowercase letters, digits and
# preserved punctuation; no dedicated wrapper type is needed.
Abbreviation = str


@dataclass(frozen=True)
class Phrase:
    """A sentence in both its display form and its canonical form.

    ``raw`` is the text as found in the source (original casing and
    punctuation); ``normalized`` is lowercased, single-spaced, and has
    trailing sentence-final punctuation removed.
    """

    raw: str
    normalized: str

    def __str__(self) -> str:
        return self.normalized


def normalize_phrase(raw: str) -> Phrase:
    """Canonicalize text: lowercase, collapse whitespace, strip final punctuation.

    Idempotent on the normalized form; empty input yields an empty phrase.
    """
    text = " ".join(raw.split()).lower()
    text = text.rstrip(FINAL_PUNCTUATION).rstrip()
    return Phrase(raw=raw, normalized=text)


def word_abbreviation(token: str) -> str:
    """Abbreviation contribution of one whitespace-delimited token.

    Each apostrophe-separated run of letters collapses to its first letter
    (lowercased), digit runs are emitted whole, and any other punctuation
    or symbol is emitted in place. A hyphen directly between two letters
    joins them into a single word, so only the left side's initial
    survives.
    """
    out: list[str] = []
    in_letters = False
    last = len(token) - 1
    for i, ch in enumerate(token):
        if ch.isalpha():
            if not in_letters:
                out.append(ch.lower())
                in_letters = True
        elif ch.isdigit():
            out.append(ch)
            in_letters = False
        elif ch == "'":
            in_letters = False
        elif ch == "-" and 0 < i < last and token[i - 1].isalpha() and token[i + 1].isalpha():
            pass  # hyphenated compound reads as one word
        else:
            out.append(ch)
            in_letters = False
    return "".join(out)


def abbreviate(phrase: Phrase | str) -> Abbreviation:
    """Word-initial abbreviation of a normalized phrase.

    Equals the concatenation of :func:`word_abbreviation` over the
    phrase's whitespace-delimited tokens. Pure: equal normalized phrases
    yield byte-identical abbreviations.
    """
    text = phrase.normalized if isinstance(phrase, Phrase) else phrase
    return "".join(word_abbreviation(token) for token in text.split())
