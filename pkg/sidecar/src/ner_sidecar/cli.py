"""ner-sidecar command line interface.

Exit codes: 0 success, 2 validation error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import yaml

from .annotate import annotate_corpus
from .data import DatasetError, load_dataset
from .folds import split_folds_by_title
from .metrics import write_metrics_csv
from .model import ModelBundle
from .train import TrainConfig, fit_full, train_and_eval


def _load_config(path: Path, required: set[str], known: set[str]) -> dict:
    if not path.exists():
        raise DatasetError(f"config file not found: {path}")
    raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    if not isinstance(raw, dict):
        raise DatasetError("config must be a mapping of keys to values")
    unknown = set(raw) - known
    if unknown:
        raise DatasetError(f"unknown config keys: {sorted(unknown)}")
    missing = required - set(raw)
    if missing:
        raise DatasetError(f"config is missing required keys: {sorted(missing)}")
    base = path.parent
    for key in ("dataset", "output", "model_dir", "documents"):
        if key in raw:
            p = Path(raw[key])
            raw[key] = p if p.is_absolute() else base / p
    return raw


def _fail(exc: Exception):
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


@click.group()
def main():
    """Fine-tune a token-classification model on BIO exports and annotate
    documents into brat standoff files."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(path_type=Path))
def train(config_path):
    """Cross-validate on the dataset, then fit a full model for annotation."""
    known = {"dataset", "output", "model", "learning_rate", "epochs",
             "train_batch", "eval_batch", "max_seq_len", "seed", "n_folds"}
    try:
        raw = _load_config(config_path, {"dataset", "output"}, known)
        config = TrainConfig(
            model=raw.get("model", "small"),
            learning_rate=float(raw.get("learning_rate", 5e-5)),
            epochs=int(raw.get("epochs", 20)),
            train_batch=int(raw.get("train_batch", 16)),
            eval_batch=int(raw.get("eval_batch", 32)),
            max_seq_len=int(raw.get("max_seq_len", 256)),
            seed=int(raw.get("seed", 0)),
            n_folds=int(raw.get("n_folds", 5)),
        )
        dataset = load_dataset(raw["dataset"])
        plan = split_folds_by_title(dataset.titles, n_folds=config.n_folds,
                                    seed=config.seed)
        table = train_and_eval(dataset, plan, config)
        out = Path(raw["output"])
        out.mkdir(parents=True, exist_ok=True)
        write_metrics_csv(table, out / "metrics.csv")
        bundle = fit_full(dataset, config)
        bundle.save(out / "model")
    except DatasetError as exc:
        _fail(exc)
    mean = table.mean
    click.echo(f"mean precision={mean.precision:.4f} recall={mean.recall:.4f} "
               f"f1={mean.f1:.4f} accuracy={mean.accuracy:.4f}")
    click.echo(f"metrics and model written to {out}")


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(path_type=Path))
def annotate(config_path):
    """Annotate a directory of .txt documents with a trained model."""
    known = {"model_dir", "documents", "output"}
    try:
        raw = _load_config(config_path, known, known)
        bundle = ModelBundle.load(raw["model_dir"])
        counts = annotate_corpus(bundle, raw["documents"], raw["output"])
    except (DatasetError, FileNotFoundError) as exc:
        _fail(exc)
    click.echo(f"{sum(counts.values())} entities over {len(counts)} documents "
               f"-> {raw['output']}")


if __name__ == "__main__":
    main()
