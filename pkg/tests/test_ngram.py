"""Interpolated n-gram model and the abbreviation-constrained beam search."""

import numpy as np
import pytest

from aexpand.abbrev import word_abbreviation
from aexpand.ngram import NgramModel, constrained_beam_search


def exhaustive_top5(model, abbreviation, seed_history=()):
    """Independent oracle: enumerate every word sequence that consumes the
    abbreviation exactly, score it, and keep the best five."""
    units = [(w, word_abbreviation(w)) for w in model.vocabulary]
    results = []

    def dfs(pos, words, score):
        if pos == len(abbreviation):
            results.append((score, " ".join(words)))
            return
        rest = abbreviation[pos:]
        for w, unit in units:
            if unit and rest.startswith(unit):
                dfs(
                    pos + len(unit),
                    words + [w],
                    score + model.logprob(w, tuple(seed_history) + tuple(words)),
                )

    dfs(0, [], 0.0)
    results.sort(key=lambda t: (-t[0], t[1]))
    return results[:5]


def random_model(rng):
    alphabet = "abcde"
    vocab = set()
    target_size = int(rng.integers(5, 21))
    while len(vocab) < target_size:
        length = int(rng.integers(1, 5))
        word = "".join(rng.choice(list(alphabet)) for _ in range(length))
        roll = rng.random()
        if roll < 0.12 and len(word) >= 2:
            word = word[0] + "'" + word[1:]
        elif roll < 0.17:
            word = str(int(rng.integers(0, 100)))
        vocab.add(word)
    words = sorted(vocab)
    sentences = []
    for _ in range(int(rng.integers(20, 60))):
        length = int(rng.integers(1, 7))
        sentences.append([words[int(rng.integers(0, len(words)))] for _ in range(length)])
    order = int(rng.integers(1, 4))
    model = NgramModel(order=order).fit(sentences)
    return model, words, sentences


def random_abbreviation(rng, words):
    if rng.random() < 0.7:
        parts = [
            word_abbreviation(words[int(rng.integers(0, len(words)))])
            for _ in range(int(rng.integers(1, 5)))
        ]
        abbrev = "".join(parts)[:6]
    else:
        abbrev = "".join(
            rng.choice(list("abcde")) for _ in range(int(rng.integers(1, 7)))
        )
    return abbrev or "a"


class TestNgramModel:
    def test_distribution_sums_to_one(self):
        model = NgramModel(order=3).fit(
            [["i", "am", "here"], ["i", "go", "home"], ["go", "home", "now"]]
        )
        for history in ((), ("i",), ("i", "am"), ("unseen", "words"), ("go",)):
            total = sum(model.next_distribution(history).values())
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_dominant_continuation_is_argmax(self):
        model = NgramModel(order=2).fit([["i", "go"]] * 10 + [["i", "am"]])
        dist = model.next_distribution(("i",))
        assert max(dist, key=dist.get) == "go"
        assert model.prob("go", ("i",)) > model.prob("am", ("i",))

    def test_history_longer_than_order_is_trimmed(self):
        model = NgramModel(order=2).fit([["a", "b", "c"]])
        assert model.prob("b", ("x", "y", "a")) == model.prob("b", ("a",))

    def test_requires_fit(self):
        with pytest.raises(ValueError):
            NgramModel(order=2).prob("x", ())

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            NgramModel(order=0)
        with pytest.raises(ValueError):
            NgramModel(order=2, smoothing=(0.5, 0.5))  # needs order + 1 weights

    def test_sequence_logprob_is_sum(self):
        model = NgramModel(order=2).fit([["a", "b", "c"], ["a", "c"]])
        words = ["a", "b"]
        expected = model.logprob("a", ()) + model.logprob("b", ("a",))
        assert model.sequence_logprob(words) == pytest.approx(expected)


class TestConstrainedBeamSearch:
    def test_simple_expansion(self):
        model = NgramModel(order=2).fit(
            [["i", "go"], ["i", "go"], ["i", "am"], ["go", "i"]]
        )
        results = constrained_beam_search(model, "ig")
        assert results
        assert results[0][1] == ("i", "go")
        # every result consumes the abbreviation exactly
        for _, words in results:
            assert "".join(word_abbreviation(w) for w in words) == "ig"

    def test_contraction_consumes_two_characters(self):
        model = NgramModel(order=2).fit([["i", "can't"], ["can't", "go"]])
        results = constrained_beam_search(model, "ct")
        assert ("can't",) in [words for _, words in results]

    def test_unreachable_abbreviation_is_empty(self):
        model = NgramModel(order=2).fit([["i", "go"]])
        assert constrained_beam_search(model, "q") == []

    def test_empty_abbreviation_rejected(self):
        model = NgramModel(order=1).fit([["a"]])
        with pytest.raises(ValueError):
            constrained_beam_search(model, "")

    def test_matches_exhaustive_enumeration(self):
        rng = np.random.default_rng(424242)
        for trial in range(25):
            model, words, sentences = random_model(rng)
            abbrev = random_abbreviation(rng, words)
            seed = (
                tuple(sentences[int(rng.integers(0, len(sentences)))])
                if rng.random() < 0.5
                else ()
            )
            beam = constrained_beam_search(
                model, abbrev, seed_history=seed, beam_width=64, top_k=5
            )
            oracle = exhaustive_top5(model, abbrev, seed)
            assert [" ".join(w) for _, w in beam] == [p for _, p in oracle], (
                trial,
                abbrev,
            )
            for (bs, _), (os_, _) in zip(beam, oracle):
                assert bs == pytest.approx(os_, abs=1e-12)
