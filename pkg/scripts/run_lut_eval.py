#!/usr/bin/env python3
"""Look-up table evaluation on a dialog corpus.

Converts a corpus (defaults to the bundled small-talk fixture), builds a
frequency table from the train portion, and reports accuracy, BLEU, and
keystroke savings, optionally under typing noise.
"""

import argparse
from pathlib import Path

from aexpand.dialogdata import convert_dialogs, read_dialogs
from aexpand.evalharness import ExperimentConfig, run_experiment, write_report

DEFAULT_CORPUS = Path(__file__).resolve().parent.parent / "tests/data/smalltalk_dialogs.jsonl"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", default=str(DEFAULT_CORPUS))
    parser.add_argument("--format", choices=("jsonl", "tdc-txt"), default="jsonl")
    parser.add_argument("--sigma", type=float, default=0.0)
    parser.add_argument("--runs", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="reports/lut")
    args = parser.parse_args()

    dialogs = read_dialogs(args.corpus, args.format)
    examples, dropped = convert_dialogs(dialogs, "full")
    print(f"{len(dialogs)} dialogs -> {len(examples)} examples ({dropped} dropped)")

    config = ExperimentConfig(
        backend="lut", sigma=args.sigma, runs=args.runs, seed=args.seed,
        out_dir=args.out_dir,
    )
    report = run_experiment(config, train_examples=examples, test_examples=examples)
    write_report(report, args.out_dir)
    stats = report.run_stats
    print(f"n={report.n}")
    for metric in ("acc_at_k", "bleu_at_k", "ksr_all", "ksr_success"):
        m = stats[metric]
        print(f"{metric:>12}: {m['mean']:.1f} +/- {m['sd']:.2f}")
    print(f"report written to {args.out_dir}/")


if __name__ == "__main__":
    main()
