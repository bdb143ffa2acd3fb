"""``rbfn`` command line: train, predict, evaluate, cv, compare, gen-data.

Exit codes: 0 success, 1 validation or training error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import baselines, evaluation, persist, rbfnet, synthetic
from .dataset import NUMERIC_FIELDS, encode, encode_features, read_csv, validate_records

MANIFEST_VERSION = 1


class CliIOError(Exception):
    pass


def _read_records(path):
    path = Path(path)
    if not path.is_file():
        raise CliIOError(f"cannot read data file: {path}")
    return read_csv(path)


def _write(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliIOError(f"cannot write {path}: {exc.strerror}") from None


def _features(args) -> tuple[str, ...]:
    return tuple(f.strip() for f in args.features.split(",") if f.strip())


def _grid(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _rbf_config(args, n_hidden=None) -> rbfnet.TrainConfig:
    return rbfnet.TrainConfig(
        n_hidden=n_hidden if n_hidden is not None else args.hidden,
        center_strategy=args.centers,
        spread_mode=args.spread_mode,
        lam=args.lam,
        seed=args.seed,
    )


def _config_echo(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _manifest(args, metrics: dict) -> str:
    doc = {"format_version": MANIFEST_VERSION, "config": _config_echo(args), "seed": args.seed, "metrics": metrics}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _load_xy(args):
    records = _read_records(args.data)
    validate_records(records)
    return encode(records, args.target, _features(args))


# ---------------------------------------------------------------- subcommands


def cmd_train(args) -> int:
    m, y = _load_xy(args)
    metrics: dict = {}
    n_hidden = args.hidden
    if args.hidden_grid:
        sel = rbfnet.select_hidden_size(m, y, _grid(args.hidden_grid), args.folds, args.seed, _rbf_config(args))
        n_hidden = sel.chosen
        metrics["hidden_size_selection"] = {
            "chosen": sel.chosen,
            "table": [
                {"hidden": J, "mean_accuracy": mean, "std_error": se, "fold_accuracies": list(accs)}
                for J, mean, se, accs in sel.table
            ],
        }
    model = rbfnet.train(m, y, _rbf_config(args, n_hidden))
    pred = np.atleast_1d(rbfnet.predict(model, m.values))
    metrics["hidden"] = n_hidden
    metrics["train_accuracy"] = float(np.mean(pred == y.indices))
    _write(args.model, persist.dumps(model))
    manifest_path = args.out or Path(args.model).with_suffix(".manifest.json")
    _write(manifest_path, _manifest(args, metrics))
    print(f"trained J={n_hidden} model, training accuracy {metrics['train_accuracy']:.4f}", file=sys.stderr)
    return 0


def _source_features(model) -> list[str]:
    seen: list[str] = []
    for name in model.feature_names:
        base = name.split("=", 1)[0]
        if base not in seen:
            seen.append(base)
    return seen


def cmd_predict(args) -> int:
    path = Path(args.model)
    if not path.is_file():
        raise CliIOError(f"cannot read model file: {path}")
    model = persist.load_model(path)
    records = _read_records(args.data)
    fm = encode_features(records, _source_features(model), model.levels)
    if fm.feature_names != model.feature_names:
        raise ValueError(f"feature mismatch: model expects {list(model.feature_names)}, found {list(fm.feature_names)}")

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "predicted_class"] + [f"p_{c}" for c in model.class_names])
    if records:
        proba = np.atleast_2d(rbfnet.predict_proba(model, fm.values))
        for rec, p in zip(records, proba):
            w.writerow([rec.id, model.class_names[int(np.argmax(p))]] + [repr(float(v)) for v in p])
    _write(args.out, buf.getvalue())
    return 0


def _metrics_rows(kind: str, metrics: evaluation.Metrics, class_names) -> list[list[str]]:
    rows = []
    for c, r in zip(class_names, metrics.per_class):
        rows.append([kind, str(metrics.n), repr(metrics.accuracy), c, repr(r.sensitivity), repr(r.specificity),
                     str(int(r.sensitivity_degenerate)), str(int(r.specificity_degenerate))])
    return rows


METRIC_HEADER = ["model", "n", "accuracy", "class", "sensitivity", "specificity",
                 "sensitivity_degenerate", "specificity_degenerate"]


def _confusion_text(metrics: evaluation.Metrics, class_names) -> str:
    table = [["true\\pred", *class_names]]
    for c, row in zip(class_names, metrics.confusion):
        table.append([c, *[str(v) for v in row]])
    return evaluation.to_text(table)


def cmd_evaluate(args) -> int:
    m, y = _load_xy(args)
    n = y.indices.size
    n_train = args.n_train if args.n_train is not None else int(round(0.6 * n))
    (tr_m, tr_y), (te_m, te_y) = evaluation.train_test_split(m, y, n_train, args.seed)
    model = rbfnet.train(tr_m, tr_y, _rbf_config(args))
    pred = np.atleast_1d(rbfnet.predict(model, te_m.values))
    metrics = evaluation.compute_metrics(te_y.indices, pred, y.n_classes)
    table = [METRIC_HEADER] + _metrics_rows("rbf", metrics, y.class_names)
    _write(args.out, evaluation.to_csv(table))
    if args.out:
        print(_confusion_text(metrics, y.class_names) + "\n" + evaluation.to_text(table), end="")
    return 0


def cmd_cv(args) -> int:
    m, y = _load_xy(args)
    trainer = rbfnet._rbf_trainer(_rbf_config(args))
    cv = evaluation.kfold_cv(m, y, args.folds, trainer, args.seed)
    header = ["fold", "n", "accuracy"]
    for c in y.class_names:
        header += [f"sensitivity[{c}]", f"specificity[{c}]"]
    table = [header]
    for i, fm in enumerate(cv.fold_metrics):
        row = [str(i), str(fm.n), repr(fm.accuracy)]
        for r in fm.per_class:
            row += [repr(r.sensitivity), repr(r.specificity)]
        table.append(row)
    _write(args.out, evaluation.to_csv(table))
    if args.out:
        print(evaluation.to_text(table), end="")
        print(f"mean accuracy {cv.mean_accuracy:.4f} (std {cv.std_accuracy:.4f})")
    return 0


def cmd_compare(args) -> int:
    m, y = _load_xy(args)
    cfg = evaluation.CompareConfig(
        rbf=_rbf_config(args),
        mlp=baselines.MlpConfig(hidden=args.mlp_hidden, lr=args.mlp_lr, epochs=args.mlp_epochs, seed=args.seed),
        logistic=baselines.LogisticConfig(lr=args.logistic_lr, epochs=args.logistic_epochs, seed=args.seed),
        n_train=args.n_train,
        seed=args.seed,
    )
    rows = evaluation.compare_models(m, y, cfg)
    table = evaluation.metrics_table(rows, y.class_names)
    _write(args.out, evaluation.to_csv(table))
    if args.out:
        print(evaluation.to_text(table), end="")
    return 0


def cmd_gen_data(args) -> int:
    spec = synthetic.SyntheticSpec(n=args.n, seed=args.seed, label_noise=args.noise,
                                   cd4_low_threshold=args.cd4_low, cd4_high_threshold=args.cd4_high)
    _write(args.out, synthetic.records_to_csv(synthetic.generate_patients(spec)))
    return 0


# ---------------------------------------------------------------- parser


def _add_data(p, model_opts=True):
    p.add_argument("--data", required=True, help="patient CSV")
    p.add_argument("--target", choices=("prolong", "regimen"), default="prolong")
    p.add_argument("--features", default=",".join(NUMERIC_FIELDS),
                   help="comma-separated feature columns (categorical ones become N-1 dummies)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output path (stdout when omitted)")
    if model_opts:
        p.add_argument("--hidden", type=int, default=10, help="number of RBF units J")
        p.add_argument("--centers", choices=rbfnet.CENTER_STRATEGIES, default="kmeans")
        p.add_argument("--spread-mode", choices=rbfnet.SPREAD_MODES, default="scalar")
        p.add_argument("--lambda", dest="lam", type=float, default=rbfnet.DEFAULT_LAMBDA)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbfn", description="RBF network classifier for clinical tables")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit an RBF model and write it as JSON")
    _add_data(p)
    p.add_argument("--model", required=True, help="model JSON to write")
    p.add_argument("--hidden-grid", default=None, help="comma-separated J candidates, chosen by CV")
    p.add_argument("--folds", type=int, default=5)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="per-record class and probabilities")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="train/test split metrics")
    _add_data(p)
    p.add_argument("--n-train", type=int, default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("cv", help="stratified k-fold cross-validation")
    _add_data(p)
    p.add_argument("--folds", type=int, default=5)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("compare", help="RBF vs MLP vs logistic regression on one split")
    _add_data(p)
    p.set_defaults(hidden=20)
    p.add_argument("--n-train", type=int, default=None)
    p.add_argument("--mlp-hidden", type=int, default=8)
    p.add_argument("--mlp-lr", type=float, default=0.1)
    p.add_argument("--mlp-epochs", type=int, default=2000)
    p.add_argument("--logistic-lr", type=float, default=0.5)
    p.add_argument("--logistic-epochs", type=int, default=500)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen-data", help="write a synthetic patient CSV")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0, help="label flip probability")
    p.add_argument("--cd4-low", type=float, default=50.0)
    p.add_argument("--cd4-high", type=float, default=100.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen_data)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliIOError, OSError) as exc:
        print(f"rbfn: {exc}", file=sys.stderr)
        return 2
    except (ValueError, np.linalg.LinAlgError, baselines.TrainingDivergedError) as exc:
        print(f"rbfn: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
