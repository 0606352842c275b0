"""Context-aware abbreviation expansion for accelerated text entry."""

from .abbrev import Phrase, abbreviate, normalize_phrase, word_abbreviation
from .dialogdata import (
    AEExample,
    Dialog,
    Turn,
    dedup_split,
    dialog_to_examples,
    is_duplicate_dialog,
    render_canonical,
    split_sentences,
)
from .expander import (
    ExpansionQuery,
    ExpansionResult,
    LookUpTable,
    PromptSpec,
    SamplingConfig,
    build_lut,
    build_prompt,
    filter_and_rank,
    lut_expand,
    ngram_constrained_expand,
)
from .metrics import EvalRecord, MetricsReport, accuracy_at_k, bleu_at_k, ksr, sentence_bleu
from .ngram import NgramModel
from .noise import (
    KeyboardLayout,
    NoiseModel,
    chars_match_nearby,
    estimate_cer,
    key_at_point,
    simulate_keypress,
    simulate_typed_abbreviation,
)

__version__ = "0.1.0"
