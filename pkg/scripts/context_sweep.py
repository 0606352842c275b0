#!/usr/bin/env python3
"""Context-amount sweep with the n-gram backend on a synthetic corpus.

Targets are built so the discriminating word is only recoverable from the
previous turn; sweeping the context mode then shows how much conditioning
on conversation context buys at desk scale.
"""

import argparse

from aexpand.dialogdata import Dialog, Turn, dialog_to_examples
from aexpand.evalharness import ExperimentConfig, run_experiment
from aexpand.expander import build_ngram_backend

NOUNS = [
    "tea", "toast", "taco", "tuna", "turkey", "tofu", "tomato", "thyme",
    "toffee", "tangerine", "truffle", "tapioca",
]


def make_dialog(texts, dialog_id):
    return Dialog(
        id=dialog_id,
        turns=tuple(Turn(speaker=i % 2, text=t) for i, t in enumerate(texts)),
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--order", type=int, default=3)
    parser.add_argument("--beam-width", type=int, default=64)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    train_dialogs = []
    for i, noun in enumerate(NOUNS):
        for copy in range(i + 1):
            train_dialogs.append(
                make_dialog([f"do you want {noun}", f"{noun} please"], f"{noun}{copy}")
            )
    train = [ex for d in train_dialogs for ex in dialog_to_examples(d, "full")]
    eval_set = [
        dialog_to_examples(
            make_dialog([f"do you want {noun}", f"{noun} please"], noun), "full"
        )[1]
        for noun in NOUNS
    ]

    backend = build_ngram_backend(train, order=args.order, beam_width=args.beam_width)
    print(f"{'context':>12}  {'acc@5':>6}  {'ksr_all':>8}")
    for mode in ("none", "previous_1", "full"):
        config = ExperimentConfig(
            backend="ngram", context_mode=mode, runs=1, seed=args.seed
        )
        result = run_experiment(
            config, test_examples=eval_set, backend_factory=lambda s: backend
        )
        print(f"{mode:>12}  {result.acc_at_k:>6.1f}  {result.ksr_all:>8.1f}")


if __name__ == "__main__":
    main()
