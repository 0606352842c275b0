#!/usr/bin/env python3
"""Character error rate of the typing channel across noise levels.

Prints a small table of Monte-Carlo CER estimates over a lowercase
alphabet, the alignment behind the sigma in {0.3, 0.5} noise settings.
"""

import argparse

from aexpand.noise import KeyboardLayout, estimate_cer

LETTERS = "abcdefghijklmnopqrstuvwxyz"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--draws", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--sigmas", type=float, nargs="+", default=[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7]
    )
    args = parser.parse_args()

    layout = KeyboardLayout()
    print(f"{'sigma':>6}  {'cer':>7}")
    for sigma in args.sigmas:
        cer = estimate_cer(layout, sigma, [LETTERS], draws=args.draws, seed=args.seed)
        print(f"{sigma:>6.2f}  {cer:>7.4f}")


if __name__ == "__main__":
    main()
