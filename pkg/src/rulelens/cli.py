"""Command-line pipeline: discretize, mine, prune, curate-serve, explain,
evaluate, synth.

Exit codes: 0 success, 2 usage, 3 missing file, 4 malformed data or schema
mismatch, 5 bad configuration, 1 anything else. Diagnostics go to stderr as
"level: message" lines.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import curation, discretize, evaluator, explainer, miner, pruner, synth
from .dataset import load_dataset, load_schema, split_train_test
from .errors import ConfigError, DataFormatError, RuleLensError, SchemaError

EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_BAD_DATA = 4
EXIT_BAD_CONFIG = 5


def _info(msg: str) -> None:
    print(f"info: {msg}", file=sys.stderr)


def _load_split(schema_path, data_path, split_fraction, seed, stratify, side):
    schema = load_schema(schema_path)
    data = load_dataset(data_path, schema)
    if split_fraction is None:
        return data
    train, test = split_train_test(data, split_fraction, seed, stratify)
    return train if side == "train" else test


split_options = [
    click.option("--split-fraction", type=float, default=None,
                 help="train fraction; omit to use every row"),
    click.option("--seed", type=int, default=0, show_default=True,
                 help="split shuffle seed"),
    click.option("--stratify", is_flag=True, default=False,
                 help="split per label value instead of globally"),
]


def add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


@click.group()
def cli():
    """Mine, prune, curate, and serve explanation rules."""


@cli.command("discretize")
@click.option("--schema", "schema_path", required=True)
@click.option("--data", "data_path", required=True)
@add_options(split_options)
@click.option("--features", default=None, help="comma-separated subset")
@click.option("--out", "out_path", required=True)
def discretize_cmd(schema_path, data_path, split_fraction, seed, stratify,
                   features, out_path):
    """Compute MDLP cut points for continuous features (training side)."""
    train = _load_split(schema_path, data_path, split_fraction, seed, stratify, "train")
    wanted = set(features.split(",")) if features else None
    cuts = discretize.discretize_features(train, wanted)
    discretize.save_cuts(out_path, cuts)
    _info(f"wrote cuts for {len(cuts)} features to {out_path}")


@cli.command("mine")
@click.option("--schema", "schema_path", required=True)
@click.option("--data", "data_path", required=True)
@click.option("--cuts", "cuts_path", default=None)
@add_options(split_options)
@click.option("--min-support", type=float, default=0.01, show_default=True)
@click.option("--min-confidence", type=float, default=0.5, show_default=True)
@click.option("--max-len", type=int, default=4, show_default=True)
@click.option("--model-features", default=None, help="comma-separated whitelist")
@click.option("--support-counting", type=click.Choice(["joint", "lhs"]),
              default="joint", show_default=True)
@click.option("--allowed", "allowed_path", default=None,
              help="apply the allowed-values whitelist to the item universe "
                   "before mining (same final rules as post-mining filtering)")
@click.option("--out", "out_path", required=True)
def mine_cmd(schema_path, data_path, cuts_path, split_fraction, seed, stratify,
             min_support, min_confidence, max_len, model_features,
             support_counting, allowed_path, out_path):
    """Mine class association rules from the training side."""
    train = _load_split(schema_path, data_path, split_fraction, seed, stratify, "train")
    cuts = discretize.load_cuts(cuts_path) if cuts_path else {}
    config = miner.MiningConfig(
        min_support=min_support,
        min_confidence=min_confidence,
        max_len=max_len,
        model_features=frozenset(model_features.split(",")) if model_features else None,
        support_counting=support_counting,
    )
    items = miner.build_item_universe(train, cuts, config)
    if allowed_path is not None:
        allowed = pruner.load_allowed_values(allowed_path)
        items = [it for it in items if it.value in allowed.get(it.feature, ())]
        if not items:
            raise ConfigError("allowed-values whitelist leaves no items to mine")
    rules = miner.mine(train, items, config)
    miner.save_rules_jsonl(out_path, rules)
    _info(f"mined {len(rules)} rules over {len(items)} items to {out_path}")


@cli.command("prune")
@click.option("--rules", "rules_path", required=True)
@click.option("--delta", type=float, default=0.10, show_default=True)
@click.option("--allowed", "allowed_path", default=None)
@click.option("--schema", "schema_path", default=None,
              help="with --cuts, validates allowed values against the item universe")
@click.option("--cuts", "cuts_path", default=None)
@click.option("--out", "out_path", required=True)
@click.option("--report", "report_path", default=None)
@click.option("--sweep", default=None,
              help="comma-separated deltas for a threshold-curve CSV")
@click.option("--sweep-csv", "sweep_csv", default=None)
def prune_cmd(rules_path, delta, allowed_path, schema_path, cuts_path,
              out_path, report_path, sweep, sweep_csv):
    """Run the pruning cascade over mined rules."""
    rules = miner.load_rules_jsonl(rules_path)
    allowed = pruner.load_allowed_values(allowed_path) if allowed_path else None
    known_items = None
    if schema_path is not None:
        schema = load_schema(schema_path)
        cuts = discretize.load_cuts(cuts_path) if cuts_path else {}
        known_items = miner.build_item_universe(schema, cuts, miner.MiningConfig())
    config = pruner.PruneConfig(confidence_diff_threshold=delta, allowed_values=allowed)
    survivors, counts = pruner.prune_cascade(rules, config, known_items)
    miner.save_rules_jsonl(out_path, survivors)
    if report_path:
        pruner.save_stage_report(report_path, counts)
    if sweep:
        deltas = [float(x) for x in sweep.split(",")]
        after_redundancy = pruner.prune_redundant(rules)
        curve = {}
        for d in deltas:
            kept = pruner.prune_confidence_diff(after_redundancy, d)
            if allowed is not None:
                kept = pruner.filter_allowed_values(kept, allowed, known_items)
            curve[d] = len(kept)
        pruner.save_stage_csv(sweep_csv or "delta_sweep.csv", curve)
    _info(f"cascade counts {counts}; wrote {len(survivors)} rules to {out_path}")


@cli.command("curate-serve")
@click.option("--rules", "rules_path", required=True)
@click.option("--annotations", "annotations_path", required=True)
@click.option("--stages", "stages_path", default=None)
@click.option("--schema", "schema_path", default=None)
@click.option("--cuts", "cuts_path", default=None)
@click.option("--export", "export_path", default="classifier.json", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8321, show_default=True)
def curate_serve_cmd(rules_path, annotations_path, stages_path, schema_path,
                     cuts_path, export_path, host, port):
    """Serve the rule-review HTTP API for the curation UI."""
    import uvicorn

    from .service import create_app

    rules = miner.load_rules_jsonl(rules_path)
    store = curation.AnnotationStore(annotations_path)
    stage_counts = None
    if stages_path:
        with open(stages_path, encoding="utf-8") as fh:
            stage_counts = [entry["count"] for entry in json.load(fh)]
    universe = None
    if schema_path:
        schema = load_schema(schema_path)
        cuts = discretize.load_cuts(cuts_path) if cuts_path else {}
        universe = miner.build_item_universe(schema, cuts, miner.MiningConfig())
    app = create_app(rules, store, stage_counts, universe, export_path)
    _info(f"serving {len(rules)} rules on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


def _load_classifier(rules_path, classifier_path, annotations_path):
    if (rules_path is None) == (classifier_path is None):
        raise click.UsageError("pass exactly one of --rules / --classifier")
    if classifier_path is not None:
        rules = curation.load_classifier(classifier_path)
    else:
        rules = miner.load_rules_jsonl(rules_path)
    item_annotations = {}
    if annotations_path is not None:
        store = curation.AnnotationStore(annotations_path)
        if rules_path is not None:
            rules = curation.apply_annotations(rules, dict(store.rules))
        item_annotations = store.item_annotations_by_key()
    return rules, item_annotations


@cli.command("explain")
@click.option("--schema", "schema_path", required=True)
@click.option("--data", "data_path", required=True)
@click.option("--rules", "rules_path", default=None)
@click.option("--classifier", "classifier_path", default=None)
@click.option("--annotations", "annotations_path", default=None)
@click.option("--patient-id", default=None)
@click.option("--predicted-value", default=None,
              help="defaults to the schema's single interesting value")
@click.option("--nr", "n_r", type=int, default=5, show_default=True)
@click.option("--algorithm", type=click.Choice(["disjoint", "weighted"]),
              default="disjoint", show_default=True)
@click.option("--weights", "weights_path", default=None,
              help="category weights JSON for weighted selection")
@click.option("--hide-nonactionable", is_flag=True, default=False)
@click.option("--all-items", is_flag=True, default=False,
              help="track all LHS items for disjointness, not actionable only")
@click.option("--full-view", is_flag=True, default=False)
@click.option("--batch-out", default=None,
              help="JSONL report per predicted-positive patient")
@click.option("--scores", "scores_path", default=None, help="batch mode score file")
@click.option("--threshold", type=float, default=None, help="batch mode cutoff")
def explain_cmd(schema_path, data_path, rules_path, classifier_path, annotations_path,
                patient_id, predicted_value, n_r, algorithm, weights_path,
                hide_nonactionable, all_items, full_view, batch_out, scores_path,
                threshold):
    """Explain one patient (to stdout) or every predicted-positive patient."""
    schema = load_schema(schema_path)
    data = load_dataset(data_path, schema)
    rules, item_annotations = _load_classifier(rules_path, classifier_path, annotations_path)
    if predicted_value is None:
        interesting = schema.outcome.interesting_values
        if len(interesting) != 1:
            raise click.UsageError("several interesting values; pass --predicted-value")
        predicted_value = interesting[0]
    if predicted_value not in schema.outcome.interesting_values:
        raise ConfigError(f"{predicted_value!r} is not an interesting value")
    category_weights = None
    if weights_path is not None:
        with open(weights_path, encoding="utf-8") as fh:
            category_weights = {k: float(v) for k, v in json.load(fh).items()}
    config = explainer.ExplanationConfig(
        n_r=n_r,
        algorithm=algorithm,
        show_nonactionable=not hide_nonactionable,
        category_weights=category_weights,
        disjoint_on_all_items=all_items,
        full_view=full_view,
    )

    if patient_id is not None:
        matches = [i for i in data.instances if i.id == patient_id]
        if not matches:
            raise SchemaError(f"no patient with id {patient_id!r}")
        report = explainer.explain(matches[0], predicted_value, rules, config,
                                   item_annotations)
        print(json.dumps(report.to_json(), sort_keys=True, indent=2))
        return
    if batch_out is None:
        raise click.UsageError("pass --patient-id or --batch-out")
    if scores_path is None or threshold is None:
        raise click.UsageError("batch mode needs --scores and --threshold")
    scores = evaluator.load_scores(scores_path)
    aligned = evaluator.align_scores(scores, data)
    reports = [
        explainer.explain(inst, predicted_value, rules, config, item_annotations)
        for inst, s in zip(data.instances, aligned)
        if s >= threshold
    ]
    explainer.save_reports_jsonl(batch_out, reports)
    _info(f"wrote {len(reports)} reports to {batch_out}")


@cli.command("evaluate")
@click.option("--schema", "schema_path", required=True)
@click.option("--data", "data_path", required=True)
@click.option("--scores", "scores_path", required=True)
@click.option("--rules", "rules_path", default=None)
@click.option("--classifier", "classifier_path", default=None)
@click.option("--annotations", "annotations_path", default=None)
@add_options(split_options)
@click.option("--cutoff-fit", type=click.Choice(["train", "test"]),
              default="train", show_default=True,
              help="which split the score cutoff is fit on")
@click.option("--out-dir", "out_dir", required=True)
def evaluate_cmd(schema_path, data_path, scores_path, rules_path, classifier_path,
                 annotations_path, split_fraction, seed, stratify, cutoff_fit,
                 out_dir):
    """Cutoff, model metrics, and explanation-coverage statistics."""
    schema = load_schema(schema_path)
    data = load_dataset(data_path, schema)
    interesting = schema.outcome.interesting_values
    if len(interesting) != 1:
        raise ConfigError("evaluation requires exactly one interesting value")
    v = interesting[0]
    rules, item_annotations = _load_classifier(rules_path, classifier_path, annotations_path)
    scores = evaluator.load_scores(scores_path)

    if split_fraction is not None:
        train, test = split_train_test(data, split_fraction, seed, stratify)
    else:
        train = test = data
    fit_side = train if cutoff_fit == "train" else test
    fit_scores = evaluator.align_scores(scores, fit_side)
    fit_labels = [inst.label == v for inst in fit_side.instances]
    cutoff = evaluator.youden_cutoff(fit_scores, fit_labels)

    test_scores = evaluator.align_scores(scores, test)
    test_labels = [inst.label == v for inst in test.instances]
    predictions = [s >= cutoff for s in test_scores]
    metrics = evaluator.classification_metrics(predictions, test_labels)
    metrics["auc"] = evaluator.auc(test_scores, test_labels)
    stats = evaluator.coverage_stats(test, predictions, rules, item_annotations, v)

    os.makedirs(out_dir, exist_ok=True)
    evaluator.save_stats_json(
        os.path.join(out_dir, "stats.json"), stats, metrics,
        extra={"cutoff": cutoff, "cutoff_fit": cutoff_fit},
    )
    evaluator.save_histogram_csv(
        os.path.join(out_dir, "figure2.csv"), stats.hist_rules, "applicable_rules")
    evaluator.save_histogram_csv(
        os.path.join(out_dir, "figure3.csv"), stats.hist_actionable_rules,
        "applicable_actionable_rules")
    evaluator.save_histogram_csv(
        os.path.join(out_dir, "figure4.csv"), stats.hist_actionable_items,
        "identified_actionable_items")
    _info(f"cutoff {cutoff:.6g}; coverage "
          f"{stats.coverage_correct_positives:.3f}; reports in {out_dir}")


@cli.command("synth")
@click.option("--seed", type=int, required=True)
@click.option("--rows", type=int, default=10_000, show_default=True)
@click.option("--features", type=int, default=50, show_default=True)
@click.option("--rules", "n_rules", type=int, default=10, show_default=True)
@click.option("--base-rate", type=float, default=0.10, show_default=True)
@click.option("--min-confidence", type=float, default=0.72, show_default=True)
@click.option("--out-dir", "out_dir", required=True)
def synth_cmd(seed, rows, features, n_rules, base_rate, min_confidence, out_dir):
    """Emit a seeded synthetic dataset with planted rules and ground truth."""
    dataset, scores, manifest = synth.generate(
        seed, n_rows=rows, n_features=features, n_rules=n_rules,
        base_rate=base_rate, min_confidence=min_confidence,
    )
    os.makedirs(out_dir, exist_ok=True)
    synth.save_schema_json(os.path.join(out_dir, "schema.json"), dataset)
    synth.save_data_csv(os.path.join(out_dir, "data.csv"), dataset)
    evaluator.save_scores(os.path.join(out_dir, "scores.csv"), scores)
    synth.save_manifest(os.path.join(out_dir, "manifest.json"), manifest)
    _info(f"wrote synthetic dataset ({rows} rows) to {out_dir}")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        print(f"error: {exc.format_message()}", file=sys.stderr)
        return EXIT_USAGE
    except click.ClickException as exc:
        print(f"error: {exc.format_message()}", file=sys.stderr)
        return exc.exit_code
    except click.Abort:
        print("error: aborted", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename or exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except (DataFormatError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_DATA
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except RuleLensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
