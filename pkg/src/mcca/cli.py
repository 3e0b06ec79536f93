"""Command-line interface: data generation, training, embedding, evaluation,
sweeps, and perplexity tables.

Conventions
-----------
* Matrix files: ``.csv`` suffix means CSV with one data point per ROW (any
  other suffix means the bit-exact binary format, stored features-by-points).
* Label/group/assignment files: one value per line.
* Every flag can instead come from a JSON config file (``--config``) whose
  keys are the flag names with underscores; explicit flags win.  Unknown
  config keys are rejected.
* Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical
  failure.
* ``MCCA_THREADS`` sets how many sweep grid points run in parallel.

Reruns with the same seed and inputs produce byte-identical outputs.
"""

import argparse
import csv
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .covariance import Hyperparameters
from .data import PairedDataset
from .errors import ConfigError, DataError, MccaError, NumericalError
from .matio import read_labels, read_points, write_labels, write_points
from .metrics import KnnConfig, RetrievalTask, build_query_reps, center_reps, \
    knn_classify, mean_column_norm, retrieval_metrics, scale_and_concat, score_pairs
from .mixture import assign_x, embed, tabulate_assignments, train
from .model_io import load_model, save_model
from .synth import SynthSpec, generate

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

# (flag, dest) pairs that must be present after flags and config merge.
# argparse's required= cannot be used because a config file may supply them.
REQUIRED = {
    "synth": (("--out-dir", "out_dir"),),
    "train": (("--x", "x"), ("--y", "y"), ("--out", "out")),
    "embed": (("--model", "model"), ("--input", "input"), ("--out", "out")),
    "eval-knn": (("--train-emb", "train_emb"), ("--train-labels", "train_labels"),
                 ("--test-emb", "test_emb"), ("--test-labels", "test_labels")),
    "eval-retrieval": (("--items", "items"), ("--seeds", "seeds"),
                       ("--relevance", "relevance")),
    "sweep": (("--x-train", "x_train"), ("--y-train", "y_train"),
              ("--labels-train", "labels_train"), ("--x-dev", "x_dev"),
              ("--labels-dev", "labels_dev"), ("--out", "out")),
    "perplexity": (("--model", "model"), ("--x", "x"), ("--labels", "labels"),
                   ("--out", "out")),
}


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so we control exit codes."""

    def error(self, message):
        raise ConfigError(message)


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    try:
        return [float(v) for v in str(text).split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as a comma-separated float list") from None


def _int_list(text):
    values = _float_list(text)
    out = [int(v) for v in values]
    if any(i != v for i, v in zip(out, values)):
        raise ConfigError(f"expected integers, got {text!r}")
    return out


def _str_list(text):
    if isinstance(text, (list, tuple)):
        return [str(v) for v in text]
    return [v.strip() for v in str(text).split(",") if v.strip() != ""]


def _read_index_lists(path):
    """One comma-separated list of item indices per line."""
    lists = []
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                lists.append([int(v) for v in line.replace(",", " ").split()])
            except ValueError:
                raise DataError(f"{path}: cannot parse indices at line {lineno}") from None
    if not lists:
        raise DataError(f"{path}: no rows")
    return lists


def _int_labels(values, path):
    try:
        return [int(v) for v in values]
    except (TypeError, ValueError):
        raise DataError(f"{path}: expected integer ids") from None


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


# ---------------------------------------------------------------------------
# synth


def cmd_synth(args):
    rho = _float_list(args.rho)
    spec = SynthSpec(
        r_components=args.components,
        d_x=args.dx,
        d_y=args.dy,
        k_true=args.k_true,
        rho=rho[0] if len(rho) == 1 else tuple(rho),
        mean_separation=args.mean_separation,
        n_per_component=args.n_per_component,
        cancel=args.cancel,
        flip_count=args.flip_count,
        seed=args.seed,
    )
    dataset, truth = generate(spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = "csv" if args.format == "csv" else "mxb"
    write_points(out / f"x.{ext}", dataset.x)
    write_points(out / f"y.{ext}", dataset.y)
    write_labels(out / "groups.csv", dataset.groups)
    write_points(out / f"latents.{ext}", truth.latents)
    meta = {
        "r_components": spec.r_components,
        "d_x": spec.d_x,
        "d_y": spec.d_y,
        "k_true": spec.k_true,
        "rho": list(spec.rho),
        "mean_separation": spec.mean_separation,
        "n_per_component": spec.n_per_component,
        "cancel": spec.cancel,
        "flip_count": spec.flip_count,
        "seed": spec.seed,
        "latent_signs": [[int(s) for s in row] for row in truth.latent_signs],
        "signal_gains": [float(g) for g in truth.signal_gains],
        "files": {"x": f"x.{ext}", "y": f"y.{ext}", "groups": "groups.csv",
                  "latents": f"latents.{ext}"},
    }
    (out / "truth.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {dataset.n_points} points "
          f"(d_x={spec.d_x}, d_y={spec.d_y}, R={spec.r_components}) to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# train


def _train_report_rows(report, pi):
    rows = []
    for r, (size, corrs) in enumerate(zip(report.component_sizes,
                                          report.per_component_correlations)):
        rows.append([r, int(size), _fmt(float(pi[r])), _fmt(float(sum(corrs))),
                     _fmt(float(corrs[0])), ";".join(repr(float(c)) for c in corrs)])
    total_size = int(sum(report.component_sizes))
    top = max(c[0] for c in report.per_component_correlations)
    rows.append(["total", total_size, _fmt(1.0), _fmt(report.objective),
                 _fmt(float(top)), ""])
    return rows


def cmd_train(args):
    data = PairedDataset(read_points(args.x), read_points(args.y))
    hyper = Hyperparameters(k=args.k, r_components=args.components,
                            w_x=args.wx, w_y=args.wy, seed=args.seed)
    oracle = None
    if args.oracle:
        oracle = _int_labels(read_labels(args.oracle), args.oracle)
    model, report, _ = train(data, hyper, init_space=args.init_space,
                             oracle_groups=oracle)
    out = Path(args.out)
    save_model(out, model, init_space=report.init_space_used, centered=args.centered)
    report_path = Path(args.report) if args.report else out / "report.csv"
    _write_csv(report_path,
               ["component", "size", "pi", "sum_correlations", "top_correlation",
                "correlations"],
               _train_report_rows(report, model.pi))
    print(f"init={report.init_space_used} objective={report.objective:.6f}")
    for r, (size, corrs) in enumerate(zip(report.component_sizes,
                                          report.per_component_correlations)):
        print(f"component {r}: {int(size)} points, top correlation {corrs[0]:.4f}")
    for note in report.warnings:
        print(f"warning: {note}", file=sys.stderr)
    print(f"model written to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# embed


def cmd_embed(args):
    model, meta = load_model(args.model)
    points = read_points(args.input)
    centered = meta["centered"] if args.centered is None else args.centered
    assignments = None
    if args.oracle_assignments:
        if args.mode != "projection":
            raise ConfigError("--oracle-assignments only applies to projection mode")
        assignments = np.asarray(
            _int_labels(read_labels(args.oracle_assignments), args.oracle_assignments),
            dtype=np.int64,
        )
    if args.mode == "projection" and assignments is None:
        assignments = assign_x(model, points, use_prior=args.use_prior)
    emb = embed(model, points, mode=args.mode, centered=centered,
                assignments=assignments if args.mode == "projection" else None,
                use_prior=args.use_prior)
    write_points(args.out, emb)
    if args.mode == "projection":
        assignments_path = args.assignments_out or str(args.out) + ".assignments.csv"
        write_labels(assignments_path, assignments)
        print(f"assignments written to {assignments_path}")
    print(f"embeddings ({emb.shape[0]} x {emb.shape[1]}) written to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval-knn


def cmd_eval_knn(args):
    train_emb = read_points(args.train_emb)
    test_emb = read_points(args.test_emb)
    train_labels = read_labels(args.train_labels)
    test_labels = read_labels(args.test_labels)
    if (args.raw_train is None) != (args.raw_test is None):
        raise ConfigError("--raw-train and --raw-test must be given together")
    append_raw = args.raw_train is not None
    if append_raw:
        raw_train = read_points(args.raw_train)
        raw_test = read_points(args.raw_test)
        norm_emb = mean_column_norm(train_emb)
        norm_raw = mean_column_norm(raw_train)
        train_emb = scale_and_concat(train_emb, raw_train, norm_emb, norm_raw)
        test_emb = scale_and_concat(test_emb, raw_test, norm_emb, norm_raw)
    rows = []
    for metric in _str_list(args.metric):
        for neighbors in _int_list(args.neighbors):
            config = KnnConfig(metric=metric, neighbors=neighbors, append_raw=append_raw)
            _, accuracy = knn_classify(train_emb, train_labels, test_emb, config,
                                       test_labels=test_labels)
            rows.append([metric, neighbors, int(append_raw), _fmt(accuracy)])
            print(f"metric={metric} neighbors={neighbors} append_raw={append_raw} "
                  f"accuracy={accuracy:.2f}")
    if args.out:
        _write_csv(args.out, ["metric", "neighbors", "append_raw", "accuracy"], rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval-retrieval


def cmd_eval_retrieval(args):
    items = read_points(args.items)
    seeds = _read_index_lists(args.seeds)
    relevance = _read_index_lists(args.relevance)
    queries = build_query_reps(items, seeds)
    task = center_reps(RetrievalTask(queries, items, relevance))
    scores = score_pairs(task)
    values = retrieval_metrics(scores, relevance, args.cutoff)
    recall_key = f"recall_at_{int(args.cutoff)}"
    row = [args.cutoff, _fmt(values[recall_key]), _fmt(values["mrr"]),
           _fmt(values["roc_auc"])]
    if args.out:
        _write_csv(args.out, ["cutoff", "recall", "mrr", "roc_auc"], [row])
    print(f"recall@{args.cutoff}={values[recall_key]:.2f} "
          f"mrr={values['mrr']:.4f} roc_auc={values['roc_auc']:.2f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


def _sweep_one(data, combo, args, oracle, train_x, dev_x, train_labels, dev_labels):
    r_components, k, w_x, w_y, mode = combo
    hyper = Hyperparameters(k=k, r_components=r_components, w_x=w_x, w_y=w_y,
                            seed=args.seed)
    model, _, _ = train(data, hyper, init_space=args.init_space, oracle_groups=oracle)
    emb_train = embed(model, train_x, mode=mode, centered=args.centered,
                      use_prior=args.use_prior)
    emb_dev = embed(model, dev_x, mode=mode, centered=args.centered,
                    use_prior=args.use_prior)
    config = KnnConfig(metric=args.metric, neighbors=args.neighbors)
    _, accuracy = knn_classify(emb_train, train_labels, emb_dev, config,
                               test_labels=dev_labels)
    return accuracy


def cmd_sweep(args):
    train_x = read_points(args.x_train)
    train_y = read_points(args.y_train)
    dev_x = read_points(args.x_dev)
    train_labels = read_labels(args.labels_train)
    dev_labels = read_labels(args.labels_dev)
    data = PairedDataset(train_x, train_y)
    oracle = None
    if args.oracle:
        oracle = _int_labels(read_labels(args.oracle), args.oracle)

    combos = list(itertools.product(
        _int_list(args.r_grid), _int_list(args.k_grid),
        _float_list(args.wx_grid), _float_list(args.wy_grid),
        _str_list(args.mode_grid),
    ))

    def run(combo):
        try:
            accuracy = _sweep_one(data, combo, args, oracle, train_x, dev_x,
                                  train_labels, dev_labels)
            return accuracy, ""
        except MccaError as exc:
            return None, str(exc)

    workers = max(1, int(os.environ.get("MCCA_THREADS", "1")))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, combos))
    else:
        results = [run(combo) for combo in combos]

    best = None
    for combo, (accuracy, _) in zip(combos, results):
        if accuracy is None:
            continue
        if best is None or accuracy > best[0] or (accuracy == best[0] and combo < best[1]):
            best = (accuracy, combo)
    rows = []
    for combo, (accuracy, error) in zip(combos, results):
        r_components, k, w_x, w_y, mode = combo
        rows.append([r_components, k, _fmt(w_x), _fmt(w_y), mode,
                     _fmt(accuracy) if accuracy is not None else "", error,
                     int(best is not None and combo == best[1])])
    _write_csv(args.out,
               ["r_components", "k", "w_x", "w_y", "mode", "dev_accuracy", "error",
                "best"],
               rows)
    if best is None:
        print("all grid points failed", file=sys.stderr)
    else:
        accuracy, (r_components, k, w_x, w_y, mode) = best
        print(f"best: R={r_components} k={k} w_x={w_x} w_y={w_y} mode={mode} "
              f"dev_accuracy={accuracy:.2f}")
    print(f"leaderboard ({len(rows)} rows) written to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# perplexity


def cmd_perplexity(args):
    model, _ = load_model(args.model)
    points = read_points(args.x)
    labels = read_labels(args.labels)
    assigned = assign_x(model, points, use_prior=args.use_prior)
    matrix, row_labels = tabulate_assignments(labels, assigned, model.r_components,
                                              label_count=args.label_count)
    rows = [[label] + [_fmt(float(v)) for v in matrix[i]]
            for i, label in enumerate(row_labels)]
    header = ["label"] + [f"component_{r}" for r in range(model.r_components)]
    _write_csv(args.out, header, rows)
    print(f"perplexity matrix ({matrix.shape[0]} x {matrix.shape[1]}) written to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and dispatch


def _add_common(sub):
    sub.add_argument("--config", help="JSON file with defaults for this command")


def build_parser():
    parser = _Parser(prog="mcca", description=__doc__.split("\n\n")[0])
    subs = parser.add_subparsers(dest="command", metavar="command")
    registry = {}

    sub = subs.add_parser("synth", help="generate a synthetic paired dataset",
                          add_help=True)
    sub.add_argument("--out-dir")
    sub.add_argument("--components", type=int, default=2)
    sub.add_argument("--dx", type=int, default=8)
    sub.add_argument("--dy", type=int, default=8)
    sub.add_argument("--k-true", type=int, default=1)
    sub.add_argument("--rho", default="0.9", help="scalar or comma list, one per component")
    sub.add_argument("--mean-separation", type=float, default=0.0)
    sub.add_argument("--n-per-component", type=int, default=1000)
    sub.add_argument("--cancel", action=argparse.BooleanOptionalAction, default=False)
    sub.add_argument("--flip-count", type=int, default=None,
                     help="latent dims sign-flipped in component 2")
    sub.add_argument("--format", choices=("csv", "binary"), default="binary")
    sub.add_argument("--seed", type=int, default=0)
    sub.set_defaults(func=cmd_synth)
    registry["synth"] = sub

    sub = subs.add_parser("train", help="fit a mixture-of-CCA model")
    sub.add_argument("--x", help="primary-view matrix file")
    sub.add_argument("--y", help="secondary-view matrix file")
    sub.add_argument("--out", help="model archive directory")
    sub.add_argument("--report", default=None, help="report CSV (default: <out>/report.csv)")
    sub.add_argument("--k", type=int, default=1)
    sub.add_argument("--components", type=int, default=1)
    sub.add_argument("--wx", type=float, default=0.0)
    sub.add_argument("--wy", type=float, default=0.0)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--init-space", choices=("cca_projection", "native"),
                     default="cca_projection")
    sub.add_argument("--oracle", default=None,
                     help="group-id file; bypasses clustering initialization")
    sub.add_argument("--centered", action=argparse.BooleanOptionalAction, default=True)
    sub.set_defaults(func=cmd_train)
    registry["train"] = sub

    sub = subs.add_parser("embed", help="embed primary-view points with a model")
    sub.add_argument("--model")
    sub.add_argument("--input")
    sub.add_argument("--out")
    sub.add_argument("--mode", choices=("projection", "concatenation"),
                     default="concatenation")
    sub.add_argument("--centered", action=argparse.BooleanOptionalAction, default=None,
                     help="override the archive's centering flag")
    sub.add_argument("--oracle-assignments", default=None,
                     help="component-id file replacing the assignment heuristic")
    sub.add_argument("--assignments-out", default=None,
                     help="where projection mode writes assignments "
                          "(default: <out>.assignments.csv)")
    sub.add_argument("--use-prior", action=argparse.BooleanOptionalAction, default=True)
    sub.set_defaults(func=cmd_embed)
    registry["embed"] = sub

    sub = subs.add_parser("eval-knn", help="kNN classification accuracy")
    sub.add_argument("--train-emb")
    sub.add_argument("--train-labels")
    sub.add_argument("--test-emb")
    sub.add_argument("--test-labels")
    sub.add_argument("--metric", default="l2", help="comma list from {l2, cosine}")
    sub.add_argument("--neighbors", default="1", help="comma list of neighbor counts")
    sub.add_argument("--raw-train", default=None,
                     help="raw features to append (train split)")
    sub.add_argument("--raw-test", default=None, help="raw features to append (test split)")
    sub.add_argument("--out", default=None, help="metrics CSV")
    sub.set_defaults(func=cmd_eval_knn)
    registry["eval-knn"] = sub

    sub = subs.add_parser("eval-retrieval", help="recall@K, MRR, ROC-AUC")
    sub.add_argument("--items", help="item embedding matrix file")
    sub.add_argument("--seeds",
                     help="per-query seed item indices, one comma list per line")
    sub.add_argument("--relevance",
                     help="per-query relevant item indices, one comma list per line")
    sub.add_argument("--cutoff", type=int, default=1000)
    sub.add_argument("--out", default=None, help="metrics CSV")
    sub.set_defaults(func=cmd_eval_retrieval)
    registry["eval-retrieval"] = sub

    sub = subs.add_parser("sweep", help="train and evaluate a hyperparameter grid")
    sub.add_argument("--x-train")
    sub.add_argument("--y-train")
    sub.add_argument("--labels-train")
    sub.add_argument("--x-dev")
    sub.add_argument("--labels-dev")
    sub.add_argument("--out", help="leaderboard CSV")
    sub.add_argument("--r-grid", default="1")
    sub.add_argument("--k-grid", default="1")
    sub.add_argument("--wx-grid", default="0.0")
    sub.add_argument("--wy-grid", default="0.0")
    sub.add_argument("--mode-grid", default="concatenation",
                     help="comma list from {projection, concatenation}")
    sub.add_argument("--init-space", choices=("cca_projection", "native"),
                     default="cca_projection")
    sub.add_argument("--oracle", default=None)
    sub.add_argument("--metric", choices=("l2", "cosine"), default="l2")
    sub.add_argument("--neighbors", type=int, default=1)
    sub.add_argument("--centered", action=argparse.BooleanOptionalAction, default=True)
    sub.add_argument("--use-prior", action=argparse.BooleanOptionalAction, default=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.set_defaults(func=cmd_sweep)
    registry["sweep"] = sub

    sub = subs.add_parser("perplexity", help="label-by-component assignment table")
    sub.add_argument("--model")
    sub.add_argument("--x")
    sub.add_argument("--labels")
    sub.add_argument("--label-count", type=int, default=None)
    sub.add_argument("--use-prior", action=argparse.BooleanOptionalAction, default=True)
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_perplexity)
    registry["perplexity"] = sub

    for sub in registry.values():
        _add_common(sub)
    return parser, registry


def _apply_config(args, parser, registry, argv):
    """Merge a JSON config file under the explicit flags and reparse."""
    if not getattr(args, "config", None):
        return args
    path = args.config
    try:
        values = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DataError(f"{path}: no such config file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(values, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    sub = registry[args.command]
    known = {action.dest for action in sub._actions} - {"help", "func", "config"}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    sub.set_defaults(**values)
    return parser.parse_args(argv)


def _check_required(args):
    missing = [flag for flag, dest in REQUIRED.get(args.command, ())
               if getattr(args, dest, None) is None]
    if missing:
        raise ConfigError(
            f"{args.command}: missing required arguments: {', '.join(missing)}"
        )


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help()
            return EXIT_CONFIG
        args = _apply_config(args, parser, registry, argv)
        _check_required(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
