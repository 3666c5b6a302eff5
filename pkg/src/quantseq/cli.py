"""Command-line surface for the experiment pipeline.

Commands: generate, train, noise-sweep, qubit-sweep, compare.  Options may
also come from a JSON config file (--config); explicit flags win.  Exit
codes: 0 success, 2 usage error, 3 missing file, 4 malformed file, 5 training
divergence.
"""

import argparse
import json
import os
import sys

from . import datagen, pipeline, report
from .errors import (
    CircuitSpecError,
    DegenerateTestError,
    DivergenceError,
    FormatError,
    LabelError,
    ParameterError,
    ShapeError,
    StratificationError,
    UndefinedMetricError,
)
from .metrics import fold_mean_interval, levene_test, paired_ttest
from .noise import CHANNEL_NAMES, NoiseConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FILE = 3
EXIT_FORMAT = 4
EXIT_DIVERGENCE = 5

ANSATZ_CHOICES = ("mps", "mera", "ttn")

DEFAULT_NOISE_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)

DEFAULTS = {
    "generate": {
        "out_dir": "data",
        "patients": 60,
        "balance": 0.5,
        "side": 16,
        "frames_min": 2,
        "frames_max": 8,
        "growth_pos": 0.6,
        "growth_neg": 0.0,
        "noise_floor": 0.02,
        "seed": 0,
    },
    "train": {
        "manifest": None,
        "ansatz": "ttn",
        "out_dir": "runs",
        "seed": 0,
        "epochs": 50,
        "batch_size": 4,
        "hidden": 32,
        "folds": 5,
        "lr_classical": 1e-2,
        "lr_quantum": 2e-2,
        "threshold_epoch": 30,
        "patience": 10,
        "repeats": 3,
        "threshold": 0.5,
        "noise_level": None,
        "noise_channels": "all",
        "shots": 1000,
        "noise_in_training": False,
    },
    "noise-sweep": {
        "manifest": None,
        "ansatz": list(ANSATZ_CHOICES),
        "models_dir": "runs",
        "out_dir": "runs",
        "seed": 0,
        "levels": list(DEFAULT_NOISE_LEVELS),
        "noise_channels": "all",
        "shots": 1000,
        "repeats": 3,
        "threshold": 0.5,
    },
    "qubit-sweep": {
        "qubits": None,
        "manifests": None,
        "ansatz": "ttn",
        "out_dir": "runs",
        "seed": 0,
        "epochs": 50,
        "batch_size": 4,
        "hidden": 32,
        "folds": 5,
        "lr_classical": 1e-2,
        "lr_quantum": 2e-2,
        "threshold_epoch": 30,
        "patience": 10,
    },
    "compare": {
        "metrics": None,
        "names": None,
        "out_dir": "runs",
    },
}

_METRICS_HEADER = (
    "row", "ansatz", "qubits", "seed", "status",
    "roc_auc", "accuracy", "precision_weighted", "recall_weighted", "f1_weighted",
    "tn", "fp", "fn", "tp", "wall_clock_secs",
)

_HISTORY_HEADER = ("fold", "epoch", "train_loss", "val_loss", "val_auc")


def _opt(parser, flag, command, key, **kwargs):
    default = DEFAULTS[command][key]
    help_text = kwargs.pop("help", "")
    if default is not None:
        help_text = f"{help_text} (default: {default})".strip()
    parser.add_argument(flag, dest=key, default=None, help=help_text, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantseq",
        description="Hybrid quantum-classical sequence classification experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic sequential-image dataset")
    p.add_argument("--config", default=None, help="JSON file with option defaults")
    _opt(p, "--out-dir", "generate", "out_dir", help="directory for images and manifest")
    _opt(p, "--patients", "generate", "patients", type=int, help="cohort size")
    _opt(p, "--balance", "generate", "balance", type=float, help="positive-class fraction")
    _opt(p, "--side", "generate", "side", type=int, help="image side (power of two)")
    _opt(p, "--frames-min", "generate", "frames_min", type=int, help="min frames per patient")
    _opt(p, "--frames-max", "generate", "frames_max", type=int, help="max frames per patient")
    _opt(p, "--growth-pos", "generate", "growth_pos", type=float,
         help="per-frame lesion growth, positive class")
    _opt(p, "--growth-neg", "generate", "growth_neg", type=float,
         help="per-frame lesion growth, negative class")
    _opt(p, "--noise-floor", "generate", "noise_floor", type=float, help="background noise level")
    _opt(p, "--seed", "generate", "seed", type=int, help="generator seed")

    p = sub.add_parser("train", help="train one ansatz with 5-fold CV and holdout metrics")
    p.add_argument("--config", default=None, help="JSON file with option defaults")
    _opt(p, "--manifest", "train", "manifest", help="dataset manifest path (required)")
    _opt(p, "--ansatz", "train", "ansatz", choices=ANSATZ_CHOICES, help="circuit topology")
    _opt(p, "--out-dir", "train", "out_dir", help="directory for CSVs and the checkpoint")
    _opt(p, "--seed", "train", "seed", type=int, help="master seed")
    _opt(p, "--epochs", "train", "epochs", type=int, help="max training epochs")
    _opt(p, "--batch-size", "train", "batch_size", type=int, help="gradient accumulation batch")
    _opt(p, "--hidden", "train", "hidden", type=int, help="LSTM hidden units")
    _opt(p, "--folds", "train", "folds", type=int, help="cross-validation folds")
    _opt(p, "--lr-classical", "train", "lr_classical", type=float, help="LSTM/dense learning rate")
    _opt(p, "--lr-quantum", "train", "lr_quantum", type=float, help="circuit learning rate")
    _opt(p, "--threshold-epoch", "train", "threshold_epoch", type=int,
         help="epochs before early stopping can fire")
    _opt(p, "--patience", "train", "patience", type=int,
         help="tolerated validation-loss exceedances")
    _opt(p, "--repeats", "train", "repeats", type=int, help="seeded holdout evaluation repeats")
    _opt(p, "--threshold", "train", "threshold", type=float, help="classification threshold")
    _opt(p, "--noise-level", "train", "noise_level", type=float,
         help="channel strength for holdout evaluation (omit for analytic)")
    _opt(p, "--noise-channels", "train", "noise_channels",
         help="comma-separated channel names, or 'all'")
    _opt(p, "--shots", "train", "shots", type=int, help="trajectories per noisy expectation")
    p.add_argument("--noise-in-training", dest="noise_in_training", default=None,
                   action="store_const", const=True,
                   help="inject channels during training too (default: evaluation only)")

    p = sub.add_parser("noise-sweep", help="evaluate checkpoints across noise levels")
    p.add_argument("--config", default=None, help="JSON file with option defaults")
    _opt(p, "--manifest", "noise-sweep", "manifest", help="dataset manifest path (required)")
    _opt(p, "--ansatz", "noise-sweep", "ansatz", nargs="+", choices=ANSATZ_CHOICES,
         help="ansatz kinds to sweep")
    _opt(p, "--models-dir", "noise-sweep", "models_dir",
         help="directory holding model_<ansatz>.ckpt files")
    _opt(p, "--out-dir", "noise-sweep", "out_dir", help="directory for sweep outputs")
    _opt(p, "--seed", "noise-sweep", "seed", type=int, help="master seed")
    _opt(p, "--levels", "noise-sweep", "levels", nargs="+", type=float, help="noise strengths")
    _opt(p, "--noise-channels", "noise-sweep", "noise_channels",
         help="comma-separated channel names, or 'all'")
    _opt(p, "--shots", "noise-sweep", "shots", type=int,
         help="trajectories per noisy expectation")
    _opt(p, "--repeats", "noise-sweep", "repeats", type=int, help="evaluation repeats per cell")
    _opt(p, "--threshold", "noise-sweep", "threshold", type=float, help="classification threshold")

    p = sub.add_parser("qubit-sweep", help="training curves across qubit counts")
    p.add_argument("--config", default=None, help="JSON file with option defaults")
    _opt(p, "--qubits", "qubit-sweep", "qubits", nargs="+", type=int,
         help="qubit counts, matched with --manifests (required)")
    _opt(p, "--manifests", "qubit-sweep", "manifests", nargs="+",
         help="one manifest per qubit count (required)")
    _opt(p, "--ansatz", "qubit-sweep", "ansatz", choices=ANSATZ_CHOICES, help="circuit topology")
    _opt(p, "--out-dir", "qubit-sweep", "out_dir", help="directory for sweep outputs")
    _opt(p, "--seed", "qubit-sweep", "seed", type=int, help="master seed")
    _opt(p, "--epochs", "qubit-sweep", "epochs", type=int, help="max training epochs")
    _opt(p, "--batch-size", "qubit-sweep", "batch_size", type=int, help="batch size")
    _opt(p, "--hidden", "qubit-sweep", "hidden", type=int, help="LSTM hidden units")
    _opt(p, "--folds", "qubit-sweep", "folds", type=int, help="folds used to carve fold 1")
    _opt(p, "--lr-classical", "qubit-sweep", "lr_classical", type=float, help="classical rate")
    _opt(p, "--lr-quantum", "qubit-sweep", "lr_quantum", type=float, help="circuit rate")
    _opt(p, "--threshold-epoch", "qubit-sweep", "threshold_epoch", type=int,
         help="epochs before early stopping can fire")
    _opt(p, "--patience", "qubit-sweep", "patience", type=int,
         help="tolerated validation-loss exceedances")

    p = sub.add_parser("compare", help="Levene and paired-t statistics over metrics files")
    p.add_argument("--config", default=None, help="JSON file with option defaults")
    _opt(p, "--metrics", "compare", "metrics", nargs="+",
         help="metrics.csv files, one per model (required, >= 2)")
    _opt(p, "--names", "compare", "names", nargs="+",
         help="model labels (default: ansatz column from each file)")
    _opt(p, "--out-dir", "compare", "out_dir", help="directory for statistics CSVs")
    return parser


def _resolve(args: argparse.Namespace) -> dict:
    """Merge flag > config-file > built-in default for the selected command."""
    command = args.command
    config = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                config = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{args.config}: not valid JSON") from exc
        if not isinstance(config, dict):
            raise FormatError(f"{args.config}: config must be a JSON object")
    opts = {"command": command}
    for key, default in DEFAULTS[command].items():
        value = getattr(args, key, None)
        if value is None:
            value = config.get(key, default)
        opts[key] = value
    return opts


def _require(opts: dict, *keys) -> None:
    for key in keys:
        if opts[key] is None:
            raise ParameterError(f"--{key.replace('_', '-')} is required")


def _channels(text) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        names = tuple(text)
    elif text == "all":
        return CHANNEL_NAMES
    else:
        names = tuple(t.strip() for t in str(text).split(",") if t.strip())
    for name in names:
        if name not in CHANNEL_NAMES:
            raise ParameterError(f"unknown channel {name!r}; choose from {CHANNEL_NAMES}")
    return names


def _qubits_for(manifest: datagen.DatasetManifest) -> int:
    pixels = manifest.image_side**2
    return pixels.bit_length() - 1


def _fold_seed(seed: int, fold: int) -> int:
    return seed * 1000 + fold


def _train_one_fold(ansatz, num_qubits, hidden, fold, train, val, opts, noise):
    model = pipeline.init_model(
        ansatz, num_qubits, hidden_dim=hidden, seed=_fold_seed(opts["seed"], fold)
    )
    config = pipeline.TrainConfig(
        batch_size=opts["batch_size"],
        max_epochs=opts["epochs"],
        threshold_epoch=opts["threshold_epoch"],
        patience=opts["patience"],
        lr_classical=opts["lr_classical"],
        lr_quantum=opts["lr_quantum"],
        seed=_fold_seed(opts["seed"], fold),
        noise=noise,
        noise_in_training=bool(opts.get("noise_in_training", False)),
    )
    return pipeline.train_fold(model, train, val, config)


def cmd_generate(opts: dict) -> int:
    config = datagen.SynthConfig(
        num_patients=opts["patients"],
        class_balance=opts["balance"],
        frames_min=opts["frames_min"],
        frames_max=opts["frames_max"],
        image_side=opts["side"],
        lesion_growth_pos=opts["growth_pos"],
        lesion_growth_neg=opts["growth_neg"],
        noise_floor=opts["noise_floor"],
        seed=opts["seed"],
    )
    manifest = datagen.generate(config, opts["out_dir"])
    n_pos = sum(1 for r in manifest.records if r.label == 1)
    n_frames = sum(len(r.frame_paths) for r in manifest.records)
    print(
        f"generated {len(manifest.records)} patients "
        f"({n_pos} positive / {len(manifest.records) - n_pos} negative), "
        f"{n_frames} frames of side {manifest.image_side}, seed {manifest.seed}"
    )
    print(f"manifest: {os.path.join(opts['out_dir'], 'manifest.tsv')}")
    return EXIT_OK


def cmd_train(opts: dict) -> int:
    _require(opts, "manifest")
    manifest = datagen.load_manifest(opts["manifest"])
    sequences = pipeline.load_dataset(manifest)
    num_qubits = _qubits_for(manifest)
    ansatz = opts["ansatz"]
    pool, holdout = pipeline.split_dataset(sequences, opts["seed"])
    folds = pipeline.stratified_kfold(pool, opts["folds"], opts["seed"])
    noise = None
    if opts["noise_level"] is not None:
        noise = NoiseConfig(
            strength=opts["noise_level"],
            channels=_channels(opts["noise_channels"]),
            shots=opts["shots"],
        )

    history_rows = []
    metric_rows = []
    results = []
    diverged = False
    for fold, (train, val) in enumerate(folds, start=1):
        try:
            result = _train_one_fold(
                ansatz, num_qubits, opts["hidden"], fold, train, val, opts, noise
            )
        except DivergenceError as exc:
            metric_rows.append(
                (f"fold{fold}", ansatz, num_qubits, opts["seed"],
                 f"diverged_epoch_{exc.epoch}",
                 None, None, None, None, None, None, None, None, None, None)
            )
            diverged = True
            print(f"fold {fold}: diverged at epoch {exc.epoch}", file=sys.stderr)
            continue
        results.append((fold, result))
        for stats in result.history:
            history_rows.append(
                (fold, stats.epoch, stats.train_loss, stats.val_loss, stats.val_auc)
            )
        metric_rows.append(
            (f"fold{fold}", ansatz, num_qubits, opts["seed"], "ok",
             result.best_val_auc, None, None, None, None,
             None, None, None, None, result.seconds)
        )
        print(
            f"fold {fold}: best epoch {result.best_epoch} "
            f"val_loss {result.best_val_loss:.4f} val_auc {result.best_val_auc:.4f} "
            f"({result.seconds:.1f}s)"
        )

    os.makedirs(opts["out_dir"], exist_ok=True)
    if len(results) >= 2:
        mean, half = fold_mean_interval([r.best_val_auc for _, r in results])
        print(f"validation AUC over folds: {mean:.3f} +/- {half:.3f} (95% t-interval)")
    if results:
        best_fold, best = min(results, key=lambda item: item[1].best_val_loss)
        seeds = tuple(opts["seed"] + r for r in range(opts["repeats"]))
        holdout_report = pipeline.evaluate(
            best.model, holdout, threshold=opts["threshold"],
            repeats=opts["repeats"], seeds=seeds, noise=noise,
        )
        tn, fp, fn, tp = holdout_report.confusion
        metric_rows.append(
            ("holdout", ansatz, num_qubits, opts["seed"], "ok",
             holdout_report.roc_auc, holdout_report.accuracy,
             holdout_report.precision_weighted, holdout_report.recall_weighted,
             holdout_report.f1_weighted, tn, fp, fn, tp, None)
        )
        ckpt = os.path.join(opts["out_dir"], f"model_{ansatz}.ckpt")
        pipeline.save_checkpoint(best.model, ckpt)
        print(
            f"holdout ({len(holdout)} samples, model from fold {best_fold}): "
            f"auc {holdout_report.roc_auc:.4f} acc {holdout_report.accuracy:.4f}"
        )
        print(f"checkpoint: {ckpt}")
    report.write_csv(os.path.join(opts["out_dir"], "fold_history.csv"),
                     _HISTORY_HEADER, history_rows)
    report.write_csv(os.path.join(opts["out_dir"], "metrics.csv"),
                     _METRICS_HEADER, metric_rows)
    print(f"wrote {os.path.join(opts['out_dir'], 'metrics.csv')}")
    return EXIT_DIVERGENCE if diverged else EXIT_OK


def cmd_noise_sweep(opts: dict) -> int:
    _require(opts, "manifest")
    manifest = datagen.load_manifest(opts["manifest"])
    sequences = pipeline.load_dataset(manifest)
    _, holdout = pipeline.split_dataset(sequences, opts["seed"])
    channels = _channels(opts["noise_channels"])
    ansatz_list = opts["ansatz"] if isinstance(opts["ansatz"], (list, tuple)) else [opts["ansatz"]]

    rows = []
    for ansatz in ansatz_list:
        ckpt = os.path.join(opts["models_dir"], f"model_{ansatz}.ckpt")
        if not os.path.exists(ckpt):
            raise FileNotFoundError(f"missing checkpoint {ckpt}; run the train command first")
        model = pipeline.load_checkpoint(ckpt)
        for level in opts["levels"]:
            noise = NoiseConfig(strength=level, channels=channels, shots=opts["shots"])
            seeds = tuple(opts["seed"] + r for r in range(opts["repeats"]))
            rep = pipeline.evaluate(
                model, holdout, threshold=opts["threshold"],
                repeats=opts["repeats"], seeds=seeds, noise=noise,
            )
            rows.append((ansatz, level, rep.roc_auc, rep.f1_weighted))
            print(f"{ansatz} level {level:.2f}: auc {rep.roc_auc:.4f} f1 {rep.f1_weighted:.4f}")

    os.makedirs(opts["out_dir"], exist_ok=True)
    csv_path = os.path.join(opts["out_dir"], "noise_sweep.csv")
    report.write_csv(csv_path, ("ansatz", "noise_level", "roc_auc", "f1_weighted"), rows)
    svg = noise_sweep_svg(csv_path)
    report.write_atomic(os.path.join(opts["out_dir"], "noise_sweep.svg"), svg)
    print(f"wrote {csv_path}")
    return EXIT_OK


def noise_sweep_svg(csv_path: str) -> str:
    """Chart built purely from the sweep CSV, so it regenerates bit for bit."""
    _, rows = report.read_csv(csv_path)
    kinds = list(dict.fromkeys(r[0] for r in rows))
    series = []
    for metric_idx, metric in ((2, "ROC-AUC"), (3, "F1")):
        for kind in kinds:
            pts = [(float(r[1]), float(r[metric_idx])) for r in rows if r[0] == kind]
            series.append((f"{kind} {metric}", pts))
    return report.svg_line_chart(
        series, "Holdout metrics vs channel strength", "noise level", "metric"
    )


def cmd_qubit_sweep(opts: dict) -> int:
    _require(opts, "qubits", "manifests")
    qubits = list(opts["qubits"])
    manifests = list(opts["manifests"])
    if len(qubits) != len(manifests):
        raise ParameterError("--qubits and --manifests must have matching lengths")

    rows = []
    for nq, path in zip(qubits, manifests):
        manifest = datagen.load_manifest(path)
        if _qubits_for(manifest) != nq:
            raise ParameterError(
                f"{path}: image side {manifest.image_side} encodes "
                f"{_qubits_for(manifest)} qubits, not {nq}"
            )
        sequences = pipeline.load_dataset(manifest)
        pool, _ = pipeline.split_dataset(sequences, opts["seed"])
        train, val = pipeline.stratified_kfold(pool, opts["folds"], opts["seed"])[0]
        result = _train_one_fold(
            opts["ansatz"], nq, opts["hidden"], 1, train, val, opts, noise=None
        )
        for stats in result.history:
            rows.append((nq, stats.epoch, stats.train_loss, stats.val_loss, stats.val_auc))
        print(
            f"{nq} qubits: {len(result.history)} epochs, "
            f"best val_auc {result.best_val_auc:.4f} ({result.seconds:.1f}s)"
        )

    os.makedirs(opts["out_dir"], exist_ok=True)
    csv_path = os.path.join(opts["out_dir"], "qubit_sweep.csv")
    report.write_csv(
        csv_path, ("qubits", "epoch", "train_loss", "val_loss", "val_auc"), rows
    )
    svg = qubit_sweep_svg(csv_path, opts["ansatz"])
    report.write_atomic(os.path.join(opts["out_dir"], "qubit_sweep.svg"), svg)
    print(f"wrote {csv_path}")
    return EXIT_OK


def qubit_sweep_svg(csv_path: str, ansatz: str) -> str:
    """Chart built purely from the sweep CSV, so it regenerates bit for bit."""
    _, rows = report.read_csv(csv_path)
    sizes = list(dict.fromkeys(r[0] for r in rows))
    series = []
    for nq in sizes:
        pts = [(float(r[1]), float(r[4])) for r in rows if r[0] == nq]
        series.append((f"{nq} qubits", pts))
    return report.svg_line_chart(
        series, f"Validation AUC by qubit count ({ansatz})", "epoch", "validation AUC"
    )


def _fold_aucs(path: str) -> tuple[str, list[float]]:
    header, rows = report.read_csv(path)
    idx = {name: i for i, name in enumerate(header)}
    for required in ("row", "ansatz", "status", "roc_auc"):
        if required not in idx:
            raise FormatError(f"{path}: missing column {required!r}")
    ansatz = ""
    aucs = []
    for row in rows:
        if row[idx["row"]].startswith("fold") and row[idx["status"]] == "ok":
            aucs.append(float(row[idx["roc_auc"]]))
            ansatz = row[idx["ansatz"]]
    if len(aucs) < 2:
        raise FormatError(f"{path}: fewer than two completed fold rows")
    return ansatz, aucs


def cmd_compare(opts: dict) -> int:
    _require(opts, "metrics")
    paths = list(opts["metrics"])
    if len(paths) < 2:
        raise ParameterError("compare needs at least two metrics files")
    names = []
    vectors = []
    for i, path in enumerate(paths):
        ansatz, aucs = _fold_aucs(path)
        names.append(ansatz or f"model{i + 1}")
        vectors.append(aucs)
    if opts["names"]:
        if len(opts["names"]) != len(paths):
            raise ParameterError("--names must match the number of metrics files")
        names = list(opts["names"])
    lengths = {len(v) for v in vectors}
    if len(lengths) != 1:
        raise ShapeError(f"fold counts differ across models: {sorted(lengths)}")

    w, p = levene_test(vectors)
    os.makedirs(opts["out_dir"], exist_ok=True)
    levene_path = os.path.join(opts["out_dir"], "compare_levene.csv")
    report.write_csv(
        levene_path,
        ("w_statistic", "p_value", "num_models", "folds_per_model"),
        [(w, p, len(vectors), len(vectors[0]))],
    )

    matrix_rows = []
    for i in range(len(vectors)):
        row = [names[i]]
        for j in range(len(vectors)):
            if j < i:
                try:
                    _, pv = paired_ttest(vectors[i], vectors[j])
                    row.append(pv)
                except DegenerateTestError:
                    row.append("degenerate")
            elif j == i:
                row.append("-")
            else:
                row.append("")
        matrix_rows.append(tuple(row))
    pairwise_path = os.path.join(opts["out_dir"], "compare_pairwise.csv")
    report.write_csv(pairwise_path, ("model",) + tuple(names), matrix_rows)
    print(f"levene W={w:.6g} p={p:.6g} over {len(vectors)} models")
    print(f"wrote {levene_path} and {pairwise_path}")
    return EXIT_OK


DISPATCH = {
    "generate": cmd_generate,
    "train": cmd_train,
    "noise-sweep": cmd_noise_sweep,
    "qubit-sweep": cmd_qubit_sweep,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _resolve(args)
        return DISPATCH[args.command](opts)
    except (
        ParameterError,
        ShapeError,
        StratificationError,
        LabelError,
        UndefinedMetricError,
        DegenerateTestError,
        CircuitSpecError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE


if __name__ == "__main__":
    sys.exit(main())
