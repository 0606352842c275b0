#!/usr/bin/env python3
"""Run the expansion service with a look-up backend over the bundled
small-talk corpus, for trying the web UI without any external data."""

import argparse
from pathlib import Path

import uvicorn

from aexpand.dialogdata import convert_dialogs, read_dialogs_jsonl
from aexpand.expander import LutBackend, build_lut, build_ngram_backend
from aexpand.service import SessionStore, create_app

DEFAULT_CORPUS = Path(__file__).resolve().parent.parent / "tests/data/smalltalk_dialogs.jsonl"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", default=str(DEFAULT_CORPUS))
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    args = parser.parse_args()

    examples, _ = convert_dialogs(read_dialogs_jsonl(args.corpus), "full")
    backends = {
        "lut": LutBackend(build_lut(examples)),
        "ngram": build_ngram_backend(examples),
    }
    store = SessionStore(backends)
    uvicorn.run(create_app(store), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
