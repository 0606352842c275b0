"""Simulated eye-gaze typing noise.

Keystrokes aimed at a key on a 3x10 grid of unit-square keys land at a
point drawn from an uncorrelated 2D Gaussian centered on the key, with
equal standard deviation sigma (in key widths) on both axes. The key
containing the landing point is what gets typed, so all errors are
substitutions by (usually adjacent) keys. sigma values of 0.3 and 0.5
produce roughly 13-15% and 44% character error rates on letter input.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

# Default key grid: three rows of ten unit squares. Letters follow qwerty;
# the remaining four keys carry the punctuation the abbreviation scheme
# preserves. Digits and unlisted symbols are typed reliably (no key model).
DEFAULT_ROWS = ("qwertyuiop", "asdfghjkl'", "zxcvbnm,.!")

N_ROWS = 3
N_COLS = 10


class KeyboardLayout:
    """3x10 grid of unit-square keys; key (row, col) has center
    (col + 0.5, row + 0.5) in board coordinates."""

    def __init__(self, rows: tuple[str, str, str] = DEFAULT_ROWS):
        if len(rows) != N_ROWS or any(len(r) != N_COLS for r in rows):
            raise ValueError("layout must be 3 rows of 10 keys")
        self.rows = tuple(rows)
        self.position: dict[str, tuple[int, int]] = {}
        for r, row in enumerate(self.rows):
            for c, ch in enumerate(row):
                if ch in self.position:
                    raise ValueError(f"duplicate key label {ch!r}")
                self.position[ch] = (r, c)

    def __contains__(self, ch: str) -> bool:
        return ch in self.position

    def center(self, ch: str) -> tuple[float, float]:
        """(x, y) center of a key's square."""
        r, c = self.position[ch]
        return (c + 0.5, r + 0.5)

    def label(self, row: int, col: int) -> str:
        return self.rows[row][col]


@dataclass
class NoiseModel:
    """Owns the random stream for one simulation; not shareable across
    threads. sigma is the per-axis standard deviation in key widths.
    ``rng_seed`` accepts anything numpy's default_rng does, so callers
    can namespace streams with seed sequences."""

    sigma: float
    rng_seed: object = 0
    passthrough_count: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        self.rng = np.random.default_rng(self.rng_seed)


def _axis_index(v: float, n: int) -> int:
    """Key index along one axis; boundary points resolve to the lower
    index and out-of-board points clamp to the nearest key."""
    i = math.floor(v)
    if i == v and i > 0:
        i -= 1
    return min(max(int(i), 0), n - 1)


def _axis_indices(v: np.ndarray, n: int) -> np.ndarray:
    idx = np.floor(v)
    idx -= (idx == v) & (idx > 0)
    return np.clip(idx, 0, n - 1).astype(np.int64)


def key_at_point(layout: KeyboardLayout, x: float, y: float) -> str:
    """Label of the key square containing (x, y), with clamping."""
    return layout.label(_axis_index(y, N_ROWS), _axis_index(x, N_COLS))


def simulate_keypress(layout: KeyboardLayout, noise: NoiseModel, intended: str) -> str:
    """One noisy keypress. sigma=0 is the identity; characters without a
    key pass through unperturbed (counted on the model)."""
    if noise.sigma == 0.0:
        return intended
    if intended not in layout:
        noise.passthrough_count += 1
        return intended
    cx, cy = layout.center(intended)
    x = cx + noise.sigma * noise.rng.standard_normal()
    y = cy + noise.sigma * noise.rng.standard_normal()
    return key_at_point(layout, x, y)


def simulate_typed_abbreviation(
    layout: KeyboardLayout, noise: NoiseModel, abbrev: str
) -> str:
    """Apply the keypress channel independently to every character."""
    return "".join(simulate_keypress(layout, noise, ch) for ch in abbrev)


def estimate_cer(
    layout: KeyboardLayout,
    sigma: float,
    corpus: list[str],
    draws: int,
    seed: int = 0,
) -> float:
    """Monte-Carlo character error rate of the channel at a noise level.

    Simulates ``draws`` keypresses by cycling through the corpus
    characters and returns the fraction that came out altered.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    chars = [ch for abbrev in corpus for ch in abbrev]
    if not chars:
        raise ValueError("empty corpus")
    repeats = -(-draws // len(chars))
    sequence = (chars * repeats)[:draws]
    rng = np.random.default_rng(seed)
    altered = 0
    # Group identical characters so draws vectorize per key.
    for ch, count in Counter(sequence).items():
        if ch not in layout:
            continue  # typed reliably, never altered
        r, c = layout.position[ch]
        xs = (c + 0.5) + sigma * rng.standard_normal(count)
        ys = (r + 0.5) + sigma * rng.standard_normal(count)
        cols = _axis_indices(xs, N_COLS)
        rows = _axis_indices(ys, N_ROWS)
        altered += int(np.count_nonzero((cols != c) | (rows != r)))
    return altered / draws


def sample_key_hits(
    layout: KeyboardLayout, sigma: float, intended: str, draws: int, seed: int = 0
) -> np.ndarray:
    """(3, 10) array of hit counts for ``draws`` presses of one key."""
    if intended not in layout:
        raise ValueError(f"{intended!r} has no key")
    rng = np.random.default_rng(seed)
    r, c = layout.position[intended]
    xs = (c + 0.5) + sigma * rng.standard_normal(draws)
    ys = (r + 0.5) + sigma * rng.standard_normal(draws)
    cols = _axis_indices(xs, N_COLS)
    rows = _axis_indices(ys, N_ROWS)
    hits = np.zeros((N_ROWS, N_COLS), dtype=np.int64)
    np.add.at(hits, (rows, cols), 1)
    return hits


def chars_match_nearby(layout: KeyboardLayout, typed: str, candidate: str) -> bool:
    """True when both characters sit on the same or adjacent keys
    (8-neighborhood). Characters without a key never match."""
    t = layout.position.get(typed)
    c = layout.position.get(candidate)
    if t is None or c is None:
        return False
    return max(abs(t[0] - c[0]), abs(t[1] - c[1])) <= 1
