"""Command-line entry points for the expansion pipeline."""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import dialogdata
from .abbrev import abbreviate, normalize_phrase
from .evalharness import ExperimentConfig, run_experiment, write_report
from .expander import (
    ExpansionQuery,
    LookUpTable,
    LutBackend,
    build_lut,
    build_ngram_backend,
)
from .noise import KeyboardLayout, NoiseModel, estimate_cer, simulate_typed_abbreviation

LOWERCASE_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def cmd_abbrev(args: argparse.Namespace) -> int:
    for line in sys.stdin:
        phrase = line.rstrip("\n")
        if not phrase.strip():
            continue
        print(f"{phrase}\t{abbreviate(normalize_phrase(phrase))}")
    return 0


def cmd_convert(args: argparse.Namespace) -> int:
    dialogs = dialogdata.read_dialogs(args.input, args.format)
    examples, dropped = dialogdata.convert_dialogs(dialogs, args.context)
    dialogdata.write_examples_jsonl(examples, args.out)
    print(
        f"converted {len(dialogs)} dialogs -> {len(examples)} examples "
        f"({dropped} empty targets dropped)",
        file=sys.stderr,
    )
    return 0


def cmd_dedup(args: argparse.Namespace) -> int:
    train = dialogdata.read_dialogs(args.train, args.format)
    test = dialogdata.read_dialogs(args.test, args.format)
    pairs = dialogdata.find_duplicates(test, train)
    removed_ids = {id(t) for t, _ in pairs}
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["test_id", "train_id"])
        for t, tr in pairs:
            writer.writerow([t.id, tr.id])
    if args.keep:
        survivors = [d for d in test if id(d) not in removed_ids]
        with open(args.keep, "w", encoding="utf-8") as fh:
            for d in survivors:
                fh.write(
                    json.dumps(
                        {
                            "id": d.id,
                            "turns": [{"speaker": t.speaker, "text": t.text} for t in d.turns],
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
    print(f"removed {len(pairs)} of {len(test)} test dialogs", file=sys.stderr)
    return 0


def cmd_noise_apply(args: argparse.Namespace) -> int:
    layout = KeyboardLayout()
    noise = NoiseModel(args.sigma, rng_seed=args.seed)
    examples = dialogdata.read_examples_jsonl(args.file)
    perturbed = []
    for ex in examples:
        typed = simulate_typed_abbreviation(layout, noise, ex.shorthand)
        perturbed.append(
            dialogdata.AEExample(
                context=ex.context,
                shorthand=typed,
                full=ex.full,
                turn_index=ex.turn_index,
                noise_sigma=args.sigma,
                dialog_id=ex.dialog_id,
            )
        )
    dialogdata.write_examples_jsonl(perturbed, args.file)
    print(f"perturbed {len(perturbed)} examples at sigma={args.sigma}", file=sys.stderr)
    return 0


def cmd_noise_calibrate(args: argparse.Namespace) -> int:
    layout = KeyboardLayout()
    cer = estimate_cer(
        layout, args.sigma, [LOWERCASE_LETTERS], draws=args.draws, seed=args.seed
    )
    print(f"sigma={args.sigma} draws={args.draws} cer={cer:.4f}")
    return 0


def cmd_expand(args: argparse.Namespace) -> int:
    if args.backend == "lut":
        if args.lut:
            backend = LutBackend(LookUpTable.load(args.lut))
        elif args.train:
            backend = LutBackend(build_lut(dialogdata.read_examples_jsonl(args.train)))
        else:
            print("lut backend needs --lut or --train", file=sys.stderr)
            return 2
    elif args.backend == "ngram":
        if not args.train:
            print("ngram backend needs --train", file=sys.stderr)
            return 2
        backend = build_ngram_backend(
            dialogdata.read_examples_jsonl(args.train), order=args.order
        )
    elif args.backend == "remote":
        from .expander import PromptSpec
        from .remote import EndpointConfig, RemoteBackend

        endpoint = (
            EndpointConfig.from_file(args.endpoint_config)
            if args.endpoint_config
            else EndpointConfig.from_env()
        )
        backend = RemoteBackend(endpoint=endpoint, spec=PromptSpec(mode=args.prompt_mode))
    else:
        raise ValueError(args.backend)
    query = ExpansionQuery(
        context=tuple(args.context or ()),
        abbreviation=args.abbrev,
        noisy=args.noisy,
        k=args.k,
    )
    result = backend.expand(query)
    for option in result.options:
        print(f"{option.phrase}\t{option.count}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config)
    report = run_experiment(config)
    out_dir = config.out_dir or "."
    write_report(report, out_dir)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import SessionStore, create_app

    backends = {}
    if args.backend == "lut":
        if not args.train:
            print("serve --backend lut needs --train", file=sys.stderr)
            return 2
        backends["lut"] = LutBackend(build_lut(dialogdata.read_examples_jsonl(args.train)))
    elif args.backend == "ngram":
        if not args.train:
            print("serve --backend ngram needs --train", file=sys.stderr)
            return 2
        backends["ngram"] = build_ngram_backend(dialogdata.read_examples_jsonl(args.train))
    elif args.backend == "remote":
        from .remote import EndpointConfig, RemoteBackend

        endpoint = (
            EndpointConfig.from_file(args.endpoint_config)
            if args.endpoint_config
            else EndpointConfig.from_env()
        )
        backends["remote"] = RemoteBackend(endpoint=endpoint)
    store = SessionStore(backends, journal_dir=args.journal_dir)
    app = create_app(store)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aexpand")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("abbrev", help="abbreviate stdin phrases, one per line")
    p.set_defaults(func=cmd_abbrev)

    p = sub.add_parser("convert", help="convert a dialog corpus to AE examples")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("jsonl", "tdc-txt"), default="jsonl")
    p.add_argument("--context", choices=dialogdata.CONTEXT_MODES, default="full")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("dedup", help="drop test dialogs duplicated in train")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--format", choices=("jsonl", "tdc-txt"), default="jsonl")
    p.add_argument("--out", required=True, help="CSV report of removed dialog ids")
    p.add_argument("--keep", help="write surviving test dialogs here (jsonl)")
    p.set_defaults(func=cmd_dedup)

    p = sub.add_parser("noise", help="keyboard noise channel")
    noise_sub = p.add_subparsers(dest="noise_command", required=True)
    q = noise_sub.add_parser("apply", help="perturb an example file in place")
    q.add_argument("--file", required=True)
    q.add_argument("--sigma", type=float, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_noise_apply)
    q = noise_sub.add_parser("calibrate", help="Monte-Carlo character error rate")
    q.add_argument("--sigma", type=float, required=True)
    q.add_argument("--draws", type=int, default=1_000_000)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_noise_calibrate)

    p = sub.add_parser("expand", help="expand one abbreviation")
    p.add_argument("--backend", choices=("lut", "ngram", "remote"), default="lut")
    p.add_argument("--context", action="append", help="context turn (repeatable)")
    p.add_argument("--abbrev", required=True)
    p.add_argument("--noisy", action="store_true")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--lut", help="saved look-up table")
    p.add_argument("--train", help="converted train examples (jsonl)")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--endpoint-config", help="remote endpoint config file")
    p.add_argument("--prompt-mode", choices=("no_instr", "zero_shot"), default="no_instr")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("eval", help="run an experiment from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the interactive expansion service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--backend", choices=("lut", "ngram", "remote"), default="lut")
    p.add_argument("--train", help="converted train examples (jsonl)")
    p.add_argument("--endpoint-config")
    p.add_argument("--journal-dir")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
