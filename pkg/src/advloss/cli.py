"""Command-line frontend.

Verbs: train, predict, evaluate, tune, benchmark, consistency-check.
Run ``advloss <verb> --help`` for the flags of each verb.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .bench import (
    ExperimentConfig,
    evaluate as evaluate_model,
    make_feature_map,
    run_benchmark,
    tune_two_stage,
)
from .consistency import check_consistency
from .data import load_csv
from .errors import AdvLossError
from .features import GaussianKernel
from .matrices import (
    Abstain,
    General,
    LossSpec,
    OrdinalAbsolute,
    OrdinalSquared,
    ZeroOne,
)
from .prediction import ABSTAIN, predict_abstain, predict_argmax
from .training import (
    AdaGrad,
    OptimizerConfig,
    load_model,
    save_model,
    train_linear,
    train_pegasos_kernel,
)


def _add_loss_flags(parser):
    parser.add_argument("--loss", default="zero-one",
                        choices=["zero-one", "ordinal-abs", "ordinal-sq",
                                 "abstain", "general"])
    parser.add_argument("--alpha", type=float, default=0.5,
                        help="abstain penalty (abstain loss only)")
    parser.add_argument("--loss-matrix", default=None, metavar="CSV",
                        help="matrix file for --loss general")


def _add_model_flags(parser):
    parser.add_argument("--features", default="multiclass",
                        choices=["thresholded", "multiclass"])
    parser.add_argument("--kernel", default="linear",
                        choices=["linear", "gaussian"])
    parser.add_argument("--gamma", type=float, default=1.0,
                        help="Gaussian kernel width")
    parser.add_argument("--lambda", dest="lam", type=float, default=1e-3,
                        help="L2 regularization strength")


def _add_data_flags(parser, multiple=False):
    if multiple:
        parser.add_argument("--data", nargs="+", required=True, metavar="CSV")
    else:
        parser.add_argument("--data", required=True, metavar="CSV")
    parser.add_argument("--label-column", type=int, default=-1,
                        help="label column index, negative counts from the end")


def _loss_spec(args) -> LossSpec:
    if args.loss == "zero-one":
        return ZeroOne()
    if args.loss == "ordinal-abs":
        return OrdinalAbsolute()
    if args.loss == "ordinal-sq":
        return OrdinalSquared()
    if args.loss == "abstain":
        return Abstain(args.alpha)
    if args.loss_matrix is None:
        raise AdvLossError("--loss general requires --loss-matrix")
    return General(np.loadtxt(args.loss_matrix, delimiter=",", ndmin=2))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advloss",
        description="Adversarial surrogate losses: train, predict, and "
                    "benchmark multiclass classifiers.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("train", help="fit one model and write a model file")
    _add_data_flags(p)
    _add_loss_flags(p)
    _add_model_flags(p)
    p.add_argument("--epochs", type=int, default=50,
                   help="passes over the data (linear kernel)")
    p.add_argument("--steps", type=int, default=None,
                   help="kernelized steps (default 100 * n)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, metavar="MODEL")

    p = sub.add_parser("predict", help="label new rows with a model file")
    p.add_argument("--model", required=True)
    _add_data_flags(p)
    p.add_argument("--no-labels", action="store_true",
                   help="the file has no label column")
    p.add_argument("--out", default=None, metavar="CSV")

    p = sub.add_parser("evaluate", help="score a model file on labeled data")
    p.add_argument("--model", required=True)
    _add_data_flags(p)

    p = sub.add_parser("tune", help="two-stage cross-validated grid search")
    _add_data_flags(p)
    _add_loss_flags(p)
    _add_model_flags(p)
    p.add_argument("--splits", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("benchmark",
                       help="full protocol: splits, tuning, training, table")
    _add_data_flags(p, multiple=True)
    _add_loss_flags(p)
    _add_model_flags(p)
    p.add_argument("--splits", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, metavar="DIR",
                   help="directory for results.csv and summary.txt")

    p = sub.add_parser("consistency-check",
                       help="optimize potentials against known distributions "
                            "and verify Bayes optimality")
    _add_loss_flags(p)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config(args, spec) -> ExperimentConfig:
    kwargs = dict(loss_spec=spec, features=args.features, kernel=args.kernel,
                  seed=args.seed)
    if getattr(args, "splits", None):
        kwargs["n_splits"] = args.splits
    return ExperimentConfig(**kwargs)


def cmd_train(args) -> int:
    data = load_csv(args.data, label_column=args.label_column)
    spec = _loss_spec(args)
    fmap = make_feature_map(args.features, data.n_features, data.n_classes)
    if args.kernel == "gaussian":
        steps = args.steps or 100 * len(data)
        model = train_pegasos_kernel(data, spec, GaussianKernel(args.gamma),
                                     fmap, args.lam, n_steps=steps,
                                     seed=args.seed)
    else:
        opt = OptimizerConfig(method=AdaGrad(1.0), epochs=args.epochs,
                              seed=args.seed)
        model = train_linear(data, spec, fmap, args.lam, config=opt)
    save_model(model, args.out)
    score = evaluate_model(model, data, spec)
    print(f"trained on {len(data)} rows ({data.n_classes} classes); "
          f"training {score.metric_name} = {score.metric:.4f}")
    print(f"model written to {args.out}")
    return 0


def _load_features_only(path, delimiter=","):
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                rows.append([float(c) for c in line.split(delimiter)])
    return np.asarray(rows, dtype=float)


def cmd_predict(args) -> int:
    model = load_model(args.model)
    if args.no_labels:
        X = _load_features_only(args.data)
    else:
        X = load_csv(args.data, label_column=args.label_column).X
    spec = model.loss_spec
    labels = []
    for x in X:
        if isinstance(spec, Abstain):
            label = predict_abstain(model, x).label
        else:
            label = predict_argmax(model, x).label
        labels.append("abstain" if label is ABSTAIN else str(label))
    text = "\n".join(labels) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        print(f"{len(labels)} predictions written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    data = load_csv(args.data, label_column=args.label_column)
    score = evaluate_model(model, data, model.loss_spec)
    print(f"{score.metric_name} = {score.metric:.4f} "
          f"(mean loss {score.loss_mean:.4f})")
    if score.abstain_rate is not None:
        print(f"abstain rate = {100 * score.abstain_rate:.1f}%")
    return 0


def cmd_tune(args) -> int:
    data = load_csv(args.data, label_column=args.label_column)
    config = _config(args, _loss_spec(args))
    params = tune_two_stage(data, config)
    print(f"selected: {params.describe()}")
    return 0


def cmd_benchmark(args) -> int:
    config = _config(args, _loss_spec(args))
    report = run_benchmark(config, dataset_paths=args.data,
                           label_column=args.label_column)
    print(report.summary_text())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        results = os.path.join(args.out, "results.csv")
        summary = os.path.join(args.out, "summary.txt")
        report.write_csv(results)
        with open(summary, "w", encoding="utf-8") as handle:
            handle.write(report.summary_text() + "\n")
        print(f"per-split results: {results}")
        print(f"summary table:     {summary}")
    return 0 if not report.failures else 1


def cmd_consistency_check(args) -> int:
    spec = _loss_spec(args)
    report = check_consistency(spec, args.classes, args.trials, seed=args.seed)
    print(report.to_text())
    return 0 if report.violations == 0 else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "train": cmd_train,
        "predict": cmd_predict,
        "evaluate": cmd_evaluate,
        "tune": cmd_tune,
        "benchmark": cmd_benchmark,
        "consistency-check": cmd_consistency_check,
    }
    try:
        return handlers[args.verb](args)
    except AdvLossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
