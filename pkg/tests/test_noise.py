"""Keyboard geometry, Gaussian keystroke channel, and nearby matching."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aexpand.noise import (
    KeyboardLayout,
    NoiseModel,
    chars_match_nearby,
    estimate_cer,
    key_at_point,
    sample_key_hits,
    simulate_keypress,
    simulate_typed_abbreviation,
)

LAYOUT = KeyboardLayout()
ALL_KEYS = "".join(LAYOUT.rows)
LETTERS = "abcdefghijklmnopqrstuvwxyz"


def norm_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def cell_probability(intended: str, sigma: float, row: int, col: int) -> float:
    """Probability a Gaussian press of `intended` lands on key (row, col).

    Independent per axis; edge cells absorb the out-of-board tail because
    samples clamp to the nearest key.
    """
    cx, cy = LAYOUT.center(intended)

    def axis(lo_edge: bool, hi_edge: bool, low: float, center: float) -> float:
        a = -math.inf if lo_edge else (low - center) / sigma
        b = math.inf if hi_edge else (low + 1.0 - center) / sigma
        return norm_cdf(b) - norm_cdf(a)

    px = axis(col == 0, col == 9, float(col), cx)
    py = axis(row == 0, row == 2, float(row), cy)
    return px * py


class TestKeyAtPoint:
    def test_key_center_contains_itself(self):
        for ch in ALL_KEYS:
            x, y = LAYOUT.center(ch)
            assert key_at_point(LAYOUT, x, y) == ch

    def test_clamps_outside_board(self):
        assert key_at_point(LAYOUT, -1.0, 0.5) == "q"
        assert key_at_point(LAYOUT, 99.0, 0.5) == "p"
        assert key_at_point(LAYOUT, 0.5, -3.0) == "q"
        assert key_at_point(LAYOUT, 0.5, 9.0) == "z"

    def test_interior_cell(self):
        assert key_at_point(LAYOUT, 3.5, 1.7) == LAYOUT.rows[1][3]  # 'f'

    def test_boundary_resolves_to_lower_index(self):
        assert key_at_point(LAYOUT, 3.0, 0.5) == "e"  # col 2, not 3
        assert key_at_point(LAYOUT, 3.5, 1.0) == "r"  # row 0, not 1


class TestSimulateKeypress:
    def test_sigma_zero_is_identity(self):
        noise = NoiseModel(0.0, rng_seed=123)
        for ch in ALL_KEYS:
            assert simulate_keypress(LAYOUT, noise, ch) == ch

    def test_sigma_zero_string_identity(self):
        noise = NoiseModel(0.0)
        assert simulate_typed_abbreviation(LAYOUT, noise, "wyltsd") == "wyltsd"

    def test_pinned_seed_neighbor_substitution(self):
        # frozen from the implementation's own stream: a real neighbor typo
        out = simulate_keypress(LAYOUT, NoiseModel(0.3, rng_seed=8), "l")
        assert out == "k"
        assert chars_match_nearby(LAYOUT, "l", out)

    def test_pinned_seed_string(self):
        out = simulate_typed_abbreviation(LAYOUT, NoiseModel(0.3, rng_seed=2), "abc")
        assert out == "agv"

    def test_noisy_abbreviation_differs_only_by_nearby_keys(self):
        out = simulate_typed_abbreviation(LAYOUT, NoiseModel(0.3, rng_seed=0), "n,imfsu")
        assert out == "n,imfsy"
        assert len(out) == len("n,imfsu")
        for typed, intended in zip(out, "n,imfsu"):
            assert typed == intended or chars_match_nearby(LAYOUT, typed, intended)

    def test_unmapped_character_passes_through_with_counter(self):
        noise = NoiseModel(0.5, rng_seed=1)
        assert simulate_keypress(LAYOUT, noise, "7") == "7"
        assert noise.passthrough_count == 1

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            NoiseModel(-0.1)

    def test_deterministic_given_seed(self):
        a = simulate_typed_abbreviation(LAYOUT, NoiseModel(0.4, rng_seed=9), "qwerty")
        b = simulate_typed_abbreviation(LAYOUT, NoiseModel(0.4, rng_seed=9), "qwerty")
        assert a == b


class TestCellDistribution:
    def test_hits_match_gaussian_cell_integrals(self):
        draws = 1_000_000
        hits = sample_key_hits(LAYOUT, 0.3, "f", draws, seed=7)
        assert hits.sum() == draws
        for row in range(3):
            for col in range(10):
                p = cell_probability("f", 0.3, row, col)
                se = math.sqrt(p * (1.0 - p) / draws)
                observed = hits[row, col] / draws
                assert abs(observed - p) <= 3.0 * se + 1e-12, (row, col)

    def test_most_errors_are_adjacent_at_low_sigma(self):
        draws = 200_000
        hits = sample_key_hits(LAYOUT, 0.3, "g", draws, seed=11)
        r, c = LAYOUT.position["g"]
        errors = 0
        nearby_errors = 0
        for row in range(3):
            for col in range(10):
                if (row, col) == (r, c):
                    continue
                errors += hits[row, col]
                if max(abs(row - r), abs(col - c)) <= 1:
                    nearby_errors += hits[row, col]
        assert errors > 0
        assert nearby_errors / errors >= 0.99


class TestEstimateCer:
    def test_sigma_zero_exact(self):
        assert estimate_cer(LAYOUT, 0.0, [LETTERS], draws=10_000) == 0.0

    def test_calibration_bands(self):
        cer_03 = estimate_cer(LAYOUT, 0.3, [LETTERS], draws=200_000, seed=5)
        cer_05 = estimate_cer(LAYOUT, 0.5, [LETTERS], draws=200_000, seed=5)
        assert abs(cer_03 - 0.13) <= 0.03
        assert abs(cer_05 - 0.44) <= 0.05

    def test_monotone_in_sigma(self):
        grid = [0.0, 0.1, 0.2, 0.3, 0.5, 0.8]
        cers = [
            estimate_cer(LAYOUT, s, [LETTERS], draws=50_000, seed=3) for s in grid
        ]
        assert cers == sorted(cers)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            estimate_cer(LAYOUT, 0.3, [], draws=10)
        with pytest.raises(ValueError):
            estimate_cer(LAYOUT, 0.3, [""], draws=10)

    def test_bad_draws_rejected(self):
        with pytest.raises(ValueError):
            estimate_cer(LAYOUT, 0.3, [LETTERS], draws=0)

    def test_unmapped_characters_never_altered(self):
        assert estimate_cer(LAYOUT, 0.9, ["0123456789"], draws=5_000, seed=1) == 0.0


class TestCharsMatchNearby:
    def test_vertical_neighbors(self):
        assert chars_match_nearby(LAYOUT, "l", "o")

    def test_identity(self):
        assert chars_match_nearby(LAYOUT, "q", "q")

    def test_far_keys(self):
        assert not chars_match_nearby(LAYOUT, "q", "p")

    def test_unmapped_character_is_false(self):
        assert not chars_match_nearby(LAYOUT, "1", "1")
        assert not chars_match_nearby(LAYOUT, "q", "1")

    @given(st.sampled_from(ALL_KEYS), st.sampled_from(ALL_KEYS))
    def test_symmetric(self, a, b):
        assert chars_match_nearby(LAYOUT, a, b) == chars_match_nearby(LAYOUT, b, a)

    @given(st.sampled_from(ALL_KEYS), st.sampled_from(ALL_KEYS))
    def test_matches_chebyshev_distance(self, a, b):
        ra, ca = LAYOUT.position[a]
        rb, cb = LAYOUT.position[b]
        expected = max(abs(ra - rb), abs(ca - cb)) <= 1
        assert chars_match_nearby(LAYOUT, a, b) == expected


class TestLayout:
    def test_thirty_unique_keys(self):
        assert len(LAYOUT.position) == 30

    def test_bad_layout_rejected(self):
        with pytest.raises(ValueError):
            KeyboardLayout(("abc", "def", "ghi"))
        with pytest.raises(ValueError):
            KeyboardLayout(("qwertyuiop", "asdfghjkl'", "zxcvbnm,,!"))
