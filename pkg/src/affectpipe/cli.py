"""Command-line entry points for the experiment stages.

Exit codes: 0 success, 2 configuration problem, 3 data problem.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import pipeline
from .data import DataError, load_manifest, save_dataset
from .eeg import DEFAULT_LAYOUT
from .elm import cross_validate, elm_predict, elm_train, load_model, \
    save_model
from .embedding import EmbeddingUnavailable, get_provider
from .face import DEFAULT_AU_CONFIG, load_au_config_csv
from .pipeline import ConfigError, ExperimentConfig
from .synth import MODALITY_CHOICES, LabelPlan, generate_synthetic_dataset

log = logging.getLogger(__name__)

CONFIG_EXIT = 2
DATA_EXIT = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError as exc:
        _fail(CONFIG_EXIT, str(exc))
    except (DataError, EmbeddingUnavailable, FileNotFoundError,
            ValueError) as exc:
        _fail(DATA_EXIT, str(exc))


@click.group()
def main():
    """Multimodal emotion-classification pipeline."""
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--subjects", type=int, required=True)
@click.option("--videos", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--modalities", default=",".join(MODALITY_CHOICES),
              show_default=True,
              help="comma-separated subset to generate")
@click.option("--null-labels", is_flag=True,
              help="remove every signal-label dependence")
def synth(subjects, videos, seed, out_dir, modalities, null_labels):
    """Generate a planted-signal synthetic dataset and write it out."""
    if subjects < 1 or videos < 1:
        _fail(CONFIG_EXIT, "--subjects and --videos must be >= 1")
    wanted = tuple(m.strip() for m in modalities.split(",") if m.strip())
    plan = LabelPlan.null() if null_labels else LabelPlan()
    try:
        dataset = generate_synthetic_dataset(subjects, videos, seed,
                                             label_plan=plan,
                                             modalities=wanted)
    except ValueError as exc:
        _fail(CONFIG_EXIT, str(exc))
    path = _guard(save_dataset, dataset, out_dir)
    click.echo(f"wrote {len(dataset.trials)} trials to {path}")


@main.command()
@click.option("--manifest", type=click.Path(), required=True)
@click.option("--modality", type=click.Choice(pipeline.MODALITIES),
              required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--split-fraction", type=float, default=0.8,
              show_default=True)
@click.option("--split-seed", type=int, default=0, show_default=True)
@click.option("--embedder", default="stub64", show_default=True)
@click.option("--au-config", type=click.Path(), default="",
              help="AU pair table CSV (default: built-in table)")
def extract(manifest, modality, out_path, split_fraction, split_seed,
            embedder, au_config):
    """Extract one modality's features for every trial that has it.

    Transforms that learn parameters are fitted on the train side of the
    split; the split column records each trial's side.
    """
    if not 0.0 < split_fraction < 1.0:
        _fail(CONFIG_EXIT, "--split-fraction must lie in (0, 1)")
    dataset = _guard(load_manifest, manifest)
    train_ids, test_ids = _guard(pipeline.split_dataset, dataset,
                                 split_fraction, split_seed)
    provider = _guard(get_provider, embedder)
    au_cfg = (_guard(load_au_config_csv, au_config) if au_config
              else DEFAULT_AU_CONFIG)
    tf = _guard(pipeline.fit_transforms, dataset, train_ids, (modality,),
                provider, DEFAULT_LAYOUT, au_cfg)
    X, ids, names = _guard(pipeline.extract_features, dataset, modality,
                           tf, provider)
    if not ids:
        _fail(DATA_EXIT, f"no trial carries modality {modality!r}")
    split_of = {k: "train" for k in train_ids}
    split_of.update({k: "test" for k in test_ids})
    _guard(pipeline.save_features_csv, out_path, X, ids, names, split_of)
    click.echo(f"wrote {len(ids)} x {len(names)} features to {out_path}")


def _labels_for(dataset, ids, target, baseline_mode):
    by_key = {t.key: t for t in dataset.trials}
    return [pipeline.trial_label(by_key[k], target, baseline_mode)
            for k in ids]


@main.command()
@click.option("--manifest", type=click.Path(), required=True)
@click.option("--features", "features_path", type=click.Path(),
              required=True)
@click.option("--target", type=click.Choice(pipeline.TARGETS),
              default="valence", show_default=True)
@click.option("--baseline-mode",
              type=click.Choice(pipeline.BASELINE_MODES),
              default="compensated", show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--grid-l", default="100,250,500,1000", show_default=True)
@click.option("--grid-lambda", default="1e-6,1e-3,1e-1,1",
              show_default=True)
@click.option("--folds", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def train(manifest, features_path, target, baseline_mode, out_path,
          grid_l, grid_lambda, folds, seed):
    """Cross-validate and train a classifier on the train-split rows."""
    try:
        grid = {"L": [int(v) for v in grid_l.split(",")],
                "ridge_lambda": [float(v) for v in grid_lambda.split(",")]}
    except ValueError:
        _fail(CONFIG_EXIT, "--grid-l / --grid-lambda must be numeric lists")
    dataset = _guard(load_manifest, manifest)
    X, ids, names, split = _guard(pipeline.load_features_csv,
                                  features_path)
    rows = [i for i, k in enumerate(ids) if split[k] == "train"]
    if len(rows) < 2:
        _fail(DATA_EXIT, "feature file has fewer than 2 train rows")
    y = _guard(_labels_for, dataset, [ids[i] for i in rows], target,
               baseline_mode)
    cv = _guard(cross_validate, X[rows], y, grid, folds, seed)
    model = _guard(elm_train, X[rows], y, cv.chosen_hyperparams["L"],
                   cv.chosen_hyperparams["ridge_lambda"], seed)
    _guard(save_model, model, out_path)
    click.echo(f"cv mean accuracy {cv.mean_accuracy:.3f} with "
               f"{cv.chosen_hyperparams}; model written to {out_path}")


@main.command()
@click.option("--manifest", type=click.Path(), required=True)
@click.option("--features", "features_path", type=click.Path(),
              required=True)
@click.option("--model", "model_path", type=click.Path(), required=True)
@click.option("--target", type=click.Choice(pipeline.TARGETS),
              default="valence", show_default=True)
@click.option("--baseline-mode",
              type=click.Choice(pipeline.BASELINE_MODES),
              default="compensated", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default="",
              help="optional metrics JSON")
def evaluate(manifest, features_path, model_path, target, baseline_mode,
             out_path):
    """Score the test-split rows of a feature file with a saved model."""
    dataset = _guard(load_manifest, manifest)
    X, ids, names, split = _guard(pipeline.load_features_csv,
                                  features_path)
    rows = [i for i, k in enumerate(ids) if split[k] == "test"]
    if not rows:
        _fail(DATA_EXIT, "feature file has no test rows")
    model = _guard(load_model, model_path)
    y = _guard(_labels_for, dataset, [ids[i] for i in rows], target,
               baseline_mode)
    preds = _guard(elm_predict, model, X[rows])
    acc = sum(p == a for p, a in zip(preds, y)) / len(y)
    counts = {c: y.count(c) for c in set(y)}
    metrics = {"target": target, "baseline_mode": baseline_mode,
               "accuracy": acc, "chance": max(counts.values()) / len(y),
               "n_test": len(y)}
    if out_path:
        Path(out_path).write_text(json.dumps(metrics, indent=1) + "\n")
    click.echo(json.dumps(metrics))


@main.command()
@click.option("--results", "results_path", type=click.Path(),
              required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def report(results_path, out_path):
    """Render a results CSV as an aligned text table."""
    try:
        text = Path(results_path).read_text()
    except FileNotFoundError:
        _fail(DATA_EXIT, f"results file not found: {results_path}")
    table = _guard(pipeline.results_from_csv, text)
    Path(out_path).write_text(pipeline.render_text_table(table))
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--config", "config_path", type=click.Path(), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--manifest", default="", help="override config manifest")
@click.option("--split-seed", type=int, default=None,
              help="override config split_seed")
@click.option("--baseline-mode", default="",
              type=click.Choice(("", "raw", "compensated", "both")),
              help="override config baseline_mode")
def run(config_path, out_dir, manifest, split_seed, baseline_mode):
    """Run every configured experiment cell and write the report."""
    cfg = _guard(pipeline.load_config, config_path)
    overrides = {}
    if manifest:
        overrides["manifest"] = manifest
    if split_seed is not None:
        overrides["split_seed"] = split_seed
    if baseline_mode:
        overrides["baseline_mode"] = baseline_mode
    if overrides:
        raw = {f: getattr(cfg, f)
               for f in ExperimentConfig.__dataclass_fields__}
        raw.update(overrides)
        cfg = _guard(pipeline.config_from_dict, raw)
    table = _guard(pipeline.run_experiment, cfg)
    csv_path, txt_path = pipeline.emit_report(table, out_dir)
    click.echo(f"wrote {csv_path} and {txt_path}")
    for line in pipeline.results_to_csv(table).splitlines():
        click.echo(line)


if __name__ == "__main__":  # pragma: no cover
    main()
