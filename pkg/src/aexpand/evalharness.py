"""End-to-end experiment orchestration.

Loads converted examples, optionally perturbs the typed abbreviations
with keyboard noise, queries a backend, and aggregates metrics overall,
per abbreviation-length bin, and per dialog turn, repeated over seeded
runs with mean and standard deviation reporting.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .dialogdata import AEExample, Dialog, dialog_to_examples, read_examples_jsonl
from .expander import (
    ExpansionBackend,
    ExpansionQuery,
    ExpansionResult,
    LutBackend,
    PromptSpec,
    SamplingConfig,
    build_lut,
    build_ngram_backend,
)
from .metrics import (
    DEFAULT_BINS,
    EvalRecord,
    MetricsReport,
    accuracy_at_k,
    compute_report,
)
from .noise import KeyboardLayout, NoiseModel, simulate_typed_abbreviation

# Stream ids keep the noise channel and ranking tie-breaks decoupled, so
# sweeping one never reshuffles the other.
NOISE_STREAM = 1
RANK_STREAM = 2


def stream_rng(run_seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([run_seed, stream])


@dataclass
class ExperimentConfig:
    train_path: str = ""
    test_path: str = ""
    backend: str = "lut"  # lut | ngram | remote
    context_mode: str = "full"  # none | previous_1 | full
    sigma: float = 0.0
    k: int = 5
    max_abbrev_len: int = 10
    runs: int = 3
    seed: int = 0
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    ngram_order: int = 3
    beam_width: int = 64
    endpoint_config: str = ""  # path, for the remote backend
    max_turn_report: int = 6
    out_dir: str = ""

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be >= 1")

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        text = Path(path).read_text(encoding="utf-8")
        if str(path).endswith((".yaml", ".yml")):
            import yaml

            obj = yaml.safe_load(text)
        else:
            obj = json.loads(text)
        sampling = SamplingConfig(**obj.pop("sampling", {}))
        return cls(sampling=sampling, **obj)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sampling"] = asdict(self.sampling)
        return d


BackendFactory = Callable[[int], ExpansionBackend]


def default_backend_factory(
    config: ExperimentConfig, train_examples: Sequence[AEExample]
) -> BackendFactory:
    """Construct the configured backend, reseeded per run."""
    if config.backend == "lut":
        table = build_lut(train_examples)
        return lambda run_seed: LutBackend(table, stream_rng(run_seed, RANK_STREAM))
    if config.backend == "ngram":
        backend = build_ngram_backend(
            train_examples, order=config.ngram_order, beam_width=config.beam_width
        )
        return lambda run_seed: backend
    if config.backend == "remote":
        from .remote import EndpointConfig, RemoteBackend

        endpoint = (
            EndpointConfig.from_file(config.endpoint_config)
            if config.endpoint_config
            else EndpointConfig.from_env()
        )
        backend = RemoteBackend(endpoint=endpoint, sampling=config.sampling)
        return lambda run_seed: backend
    raise ValueError(f"unknown backend {config.backend!r}")


def query_context(example: AEExample, context_mode: str) -> tuple[str, ...]:
    """Slice a full-context example down to the configured amount."""
    if context_mode == "full":
        return example.context
    if context_mode == "previous_1":
        return example.context[-1:]
    if context_mode == "none":
        return ()
    raise ValueError(f"unknown context mode {context_mode!r}")


def run_experiment(
    config: ExperimentConfig,
    *,
    train_examples: Sequence[AEExample] | None = None,
    test_examples: Sequence[AEExample] | None = None,
    backend_factory: BackendFactory | None = None,
    layout: KeyboardLayout | None = None,
) -> MetricsReport:
    """Evaluate a backend over converted examples with repeated runs.

    Examples longer than ``max_abbrev_len`` abbreviation characters are
    excluded up front. Run r uses seed ``config.seed + r``; reports are
    reproducible byte-for-byte for a fixed (config, seed).
    """
    if test_examples is None:
        test_examples = read_examples_jsonl(config.test_path)
    examples = [ex for ex in test_examples if ex.abbrev_len <= config.max_abbrev_len]
    if not examples:
        raise ValueError("no examples left after the abbreviation-length filter")
    if backend_factory is None:
        if train_examples is None:
            train_examples = read_examples_jsonl(config.train_path)
        backend_factory = default_backend_factory(config, train_examples)
    layout = layout or KeyboardLayout()

    run_reports: list[MetricsReport] = []
    for r in range(config.runs):
        run_seed = config.seed + r
        noise = NoiseModel(config.sigma, rng_seed=[run_seed, NOISE_STREAM])
        backend = backend_factory(run_seed)
        records: list[EvalRecord] = []
        turn_of: dict[int, int] = {}
        for i, ex in enumerate(examples):
            typed = ex.shorthand
            if config.sigma > 0:
                typed = simulate_typed_abbreviation(layout, noise, typed)
            query = ExpansionQuery(
                context=query_context(ex, config.context_mode),
                abbreviation=typed,
                noisy=config.sigma > 0 or ex.noise_sigma > 0,
                k=config.k,
            )
            records.append(
                EvalRecord(query, ex.full.normalized, backend.expand(query))
            )
            turn_of[i] = ex.turn_index
        run_reports.append(
            compute_report(
                records, DEFAULT_BINS, max_turn=config.max_turn_report, turn_of=turn_of
            )
        )
    return aggregate_runs(run_reports, config)


def _mean_sd(values: list[float]) -> tuple[float, float]:
    clean = [v for v in values if v is not None]
    if not clean:
        return (float("nan"), 0.0)
    mean = sum(clean) / len(clean)
    if len(clean) < 2:
        return (mean, 0.0)
    var = sum((v - mean) ** 2 for v in clean) / (len(clean) - 1)
    return (mean, math.sqrt(var))


def aggregate_runs(
    run_reports: list[MetricsReport], config: ExperimentConfig
) -> MetricsReport:
    """Mean +/- sample SD of each metric across repeated runs; slices are
    averaged pointwise."""
    metrics = ("acc_at_k", "bleu_at_k", "ksr_all", "ksr_success")
    stats = {m: _mean_sd([getattr(rep, m) for rep in run_reports]) for m in metrics}
    run_stats = {m: {"mean": s[0], "sd": s[1]} for m, s in stats.items()}

    def merge_slices(key: str) -> dict:
        merged: dict = {}
        labels: list = []
        for rep in run_reports:
            for label in getattr(rep, key):
                if label not in labels:
                    labels.append(label)
        for label in labels:
            slices = [getattr(rep, key).get(label) for rep in run_reports]
            slices = [s for s in slices if s]
            merged[label] = {
                "n": slices[0]["n"],
                **{
                    m: _mean_sd([s[m] for s in slices])[0]
                    for m in metrics
                },
            }
        return merged

    any_success = any(rep.ksr_success is not None for rep in run_reports)
    return MetricsReport(
        n=run_reports[0].n,
        acc_at_k=stats["acc_at_k"][0],
        bleu_at_k=stats["bleu_at_k"][0],
        ksr_all=stats["ksr_all"][0],
        ksr_success=stats["ksr_success"][0] if any_success else None,
        per_bin=merge_slices("per_bin"),
        per_turn=merge_slices("per_turn"),
        run_stats=run_stats,
        metadata={
            "config": config.to_dict(),
            "runs": len(run_reports),
            "bleu": {"smoothing": "add-eps on zero matches", "eps": 0.1, "max_order": 4},
        },
    )


def write_report(report: MetricsReport, out_dir: str | Path, stem: str = "report") -> None:
    """JSON report plus a per-bin CSV table."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{stem}.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    with open(out / f"{stem}_bins.csv", "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(report.csv_rows())


# --------------------------------------------------------------------------
# Prompt-window sweeps
# --------------------------------------------------------------------------


def shot_example(dialog: Dialog) -> AEExample:
    """The exemplar drawn from one dialog: its second turn with the first
    turn as context, or the opening turn for single-turn dialogs."""
    examples = dialog_to_examples(dialog, "previous_1")
    if not examples:
        raise ValueError(f"dialog {dialog.id!r} yields no examples")
    for ex in examples:
        if ex.turn_index == 2:
            return ex
    return examples[0]


def few_shot_windows(train_dialogs: Sequence[Dialog]) -> list[PromptSpec]:
    """All windows of 4 consecutive dialogs, each as a 4-shot prompt."""
    if len(train_dialogs) < 4:
        raise ValueError("need at least 4 dialogs for 4-shot windows")
    windows = []
    for i in range(len(train_dialogs) - 3):
        shots = tuple(shot_example(d) for d in train_dialogs[i : i + 4])
        windows.append(PromptSpec(mode="few_shot", shots=shots))
    return windows


PromptedBackend = Callable[[PromptSpec, ExpansionQuery], ExpansionResult]


def prompt_variance_sweep(
    windows: Sequence[PromptSpec],
    eval_set: Sequence[AEExample],
    backend: PromptedBackend,
    k: int = 5,
) -> dict:
    """Accuracy distribution across prompt windows.

    ``backend`` is called per (window, query); the best window is the
    accuracy argmax with ties resolved to the lowest index.
    """
    accuracies: list[float] = []
    for spec in windows:
        records = []
        for ex in eval_set:
            query = ExpansionQuery(
                context=ex.context, abbreviation=ex.shorthand, k=k
            )
            records.append(EvalRecord(query, ex.full.normalized, backend(spec, query)))
        accuracies.append(accuracy_at_k(records))
    mean, sd = _mean_sd(accuracies)
    best_index = max(range(len(accuracies)), key=lambda i: (accuracies[i], -i))
    return {
        "mean": mean,
        "sd": sd,
        "per_window": accuracies,
        "best_index": best_index,
        "best_accuracy": accuracies[best_index],
    }
