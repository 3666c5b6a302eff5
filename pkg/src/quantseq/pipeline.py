"""The hybrid model: encode -> circuit -> expectation per frame, LSTM over frames.

Training follows the experimental protocol end to end: stratified 80/20
train/holdout split, stratified 5-fold cross-validation inside the training
pool, mini-batches of 4 with per-sample gradient accumulation, Adam with
separate learning rates for circuit and classical parameters, and early
stopping once validation loss has exceeded its running best more than
``patience`` times after ``threshold_epoch`` epochs.  The parameters with the
best validation loss are returned.

Sequences keep their natural lengths; there is no padding.  All randomness
flows through named child generators of the config seed, so identical
configurations reproduce identical histories in analytic mode.
"""

import json
import os
import time
from dataclasses import dataclass, replace

import numpy as np

from . import datagen
from .ansatz import CircuitSpec, build, expectations_raw, materialize, run_ops_raw
from .autodiff import frame_gradients, hybrid_chain
from .errors import (
    DivergenceError,
    FormatError,
    LabelError,
    ParameterError,
    ShapeError,
    StateError,
    StratificationError,
)
from .metrics import MetricsReport, compute_report, roc_auc
from .neural import (
    Adam,
    DenseParams,
    DropoutConfig,
    HeadCache,
    LstmParams,
    bce_grad,
    bce_loss,
    head_backward,
    head_forward,
    init_dense_params,
    init_lstm_params,
)
from .noise import NoiseConfig, noisy_expectation
from .statevector import QuantumState, amplitude_encode

CHECKPOINT_FORMAT = "quantseq-checkpoint"
CHECKPOINT_VERSION = 1

HOLDOUT_FRACTION = 0.2


@dataclass
class PatientSequence:
    """Ordered frames (flat pixel vectors in [0, 1]) with a binary label."""

    patient_id: str
    frames: list
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise LabelError(f"label must be 0 or 1, got {self.label!r}")
        if len(self.frames) < 2:
            raise ShapeError(f"{self.patient_id}: need at least two frames")
        self.frames = [np.asarray(f, dtype=np.float64).reshape(-1) for f in self.frames]
        for f in self.frames:
            if f.min() < 0.0 or f.max() > 1.0:
                raise ParameterError(f"{self.patient_id}: pixel values must lie in [0, 1]")


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 4
    max_epochs: int = 50
    threshold_epoch: int = 30
    patience: int = 10
    lr_classical: float = 1e-2
    lr_quantum: float = 2e-2
    seed: int = 0
    noise: NoiseConfig | None = None
    noise_in_training: bool = False

    def __post_init__(self):
        if self.batch_size < 1:
            raise ParameterError("batch_size must be >= 1")
        if self.max_epochs < 1:
            raise ParameterError("max_epochs must be >= 1")
        if self.patience < 0 or self.threshold_epoch < 0:
            raise ParameterError("patience and threshold_epoch must be >= 0")


@dataclass
class HybridModel:
    """Circuit parameters plus the LSTM/dense head: the trainable object."""

    ansatz_kind: str
    circuit: CircuitSpec
    theta: np.ndarray
    lstm: LstmParams
    dense: DenseParams
    num_qubits: int
    num_observables: int = 1
    dropout_rate: float = 0.5

    @property
    def hidden_dim(self) -> int:
        return self.lstm.hidden_dim


def init_model(
    ansatz_kind: str,
    num_qubits: int,
    hidden_dim: int = 32,
    seed: int = 0,
    num_observables: int = 1,
    dropout_rate: float = 0.5,
) -> HybridModel:
    """Fresh model: circuit angles uniform in [0, 2*pi), Glorot head weights."""
    circuit = build(ansatz_kind, num_qubits)
    theta = np.random.default_rng([seed, 0]).uniform(0.0, 2.0 * np.pi, circuit.param_count)
    lstm = init_lstm_params(num_observables, hidden_dim, np.random.default_rng([seed, 1]))
    dense = init_dense_params(hidden_dim, np.random.default_rng([seed, 2]))
    return HybridModel(
        ansatz_kind=ansatz_kind,
        circuit=circuit,
        theta=theta,
        lstm=lstm,
        dense=dense,
        num_qubits=num_qubits,
        num_observables=num_observables,
        dropout_rate=dropout_rate,
    )


@dataclass
class ForwardCache:
    mode: str
    encoded: np.ndarray    # (T, 2**n) amplitude rows
    features: np.ndarray   # (T, k)
    head: HeadCache
    prob: float


def _encode_frames(model: HybridModel, sequence: PatientSequence) -> np.ndarray:
    dim = 1 << model.num_qubits
    rows = np.empty((len(sequence.frames), dim), dtype=np.complex128)
    for t, frame in enumerate(sequence.frames):
        if frame.shape[0] != dim:
            raise ShapeError(
                f"{sequence.patient_id}: frame {t} has {frame.shape[0]} pixels, "
                f"expected {dim} for {model.num_qubits} qubits"
            )
        rows[t] = amplitude_encode(frame).amplitudes
    return rows


def forward(
    model: HybridModel,
    sequence: PatientSequence,
    mode: str = "eval",
    rng: np.random.Generator | None = None,
    noise: NoiseConfig | None = None,
) -> tuple[float, ForwardCache]:
    """Probability of the positive class for one sequence, plus backprop caches."""
    if mode not in ("train", "eval"):
        raise ParameterError(f"mode must be 'train' or 'eval', got {mode!r}")
    encoded = _encode_frames(model, sequence)
    wires = model.circuit.observable_wires(model.num_observables)
    if noise is not None:
        if model.num_observables != 1:
            raise ParameterError("noisy evaluation supports a single observable")
        if rng is None:
            raise ParameterError("noisy evaluation needs a random generator")
        features = np.empty((encoded.shape[0], 1))
        for t in range(encoded.shape[0]):
            state = QuantumState(model.num_qubits, encoded[t])
            features[t, 0] = noisy_expectation(model.circuit, model.theta, state, noise, rng)
    else:
        mats = materialize(model.circuit, model.theta)
        out = run_ops_raw(encoded, model.circuit, mats)
        features = expectations_raw(out, wires, model.num_qubits)
    dropout = DropoutConfig(rate=model.dropout_rate, train=(mode == "train"))
    prob, head_cache = head_forward(features, model.lstm, model.dense, dropout, rng)
    return prob, ForwardCache(
        mode=mode, encoded=encoded, features=features, head=head_cache, prob=prob
    )


@dataclass
class ModelGrads:
    theta: np.ndarray
    lstm: LstmParams
    dense: DenseParams


def backward(model: HybridModel, cache: ForwardCache, label: int) -> ModelGrads:
    """Full gradient of the BCE loss: head by BPTT, circuit by parameter shift."""
    if cache.mode != "train":
        raise StateError("backward needs a cache from a train-mode forward pass")
    dloss_dp = bce_grad(cache.prob, label)
    head = head_backward(cache.head, dloss_dp, model.lstm)
    wires = model.circuit.observable_wires(model.num_observables)
    grads = frame_gradients(model.circuit, model.theta, cache.encoded, wires=wires)
    if model.num_observables == 1:
        theta_grad = hybrid_chain(head.features[:, 0], list(grads[:, 0, :]))
    else:
        theta_grad = np.einsum("tk,tkp->p", head.features, grads)
    return ModelGrads(theta=theta_grad, lstm=head.lstm, dense=head.dense)


# ---------------------------------------------------------------------------
# Partitioning.
# ---------------------------------------------------------------------------

def _class_indices(dataset) -> tuple[list[int], list[int]]:
    zeros = [i for i, s in enumerate(dataset) if s.label == 0]
    ones = [i for i, s in enumerate(dataset) if s.label == 1]
    return zeros, ones


def split_dataset(dataset, seed: int) -> tuple[list, list]:
    """Stratified 80/20 split into (training pool, holdout), seed-reproducible."""
    zeros, ones = _class_indices(dataset)
    if len(zeros) < 2 or len(ones) < 2:
        raise StratificationError("each class needs at least two samples to split")
    rng = np.random.default_rng([seed, 10])
    train_idx, holdout_idx = [], []
    for indices in (zeros, ones):
        shuffled = [indices[i] for i in rng.permutation(len(indices))]
        n_holdout = int(len(indices) * HOLDOUT_FRACTION + 0.5)
        holdout_idx.extend(shuffled[:n_holdout])
        train_idx.extend(shuffled[n_holdout:])
    return [dataset[i] for i in sorted(train_idx)], [dataset[i] for i in sorted(holdout_idx)]


def stratified_kfold(train_pool, k: int = 5, seed: int = 0) -> list[tuple[list, list]]:
    """k stratified (train, validation) pairs; every sample validates exactly once."""
    if k < 2:
        raise ParameterError("k must be >= 2")
    zeros, ones = _class_indices(train_pool)
    if len(zeros) < k or len(ones) < k:
        raise StratificationError(f"each class needs at least {k} samples for {k}-fold CV")
    rng = np.random.default_rng([seed, 11])
    fold_members = [[] for _ in range(k)]
    for indices in (zeros, ones):
        shuffled = [indices[i] for i in rng.permutation(len(indices))]
        for pos, idx in enumerate(shuffled):
            fold_members[pos % k].append(idx)
    folds = []
    for f in range(k):
        val_set = set(fold_members[f])
        train = [train_pool[i] for i in range(len(train_pool)) if i not in val_set]
        val = [train_pool[i] for i in sorted(val_set)]
        folds.append((train, val))
    return folds


# ---------------------------------------------------------------------------
# Training.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    val_auc: float


@dataclass
class TrainFoldResult:
    model: HybridModel
    history: list
    seconds: float
    best_epoch: int
    best_val_loss: float
    best_val_auc: float


def _params_list(model: HybridModel) -> list[np.ndarray]:
    l = model.lstm
    return [
        model.theta,
        l.w_i, l.w_f, l.w_g, l.w_o,
        l.b_i, l.b_f, l.b_g, l.b_o,
        model.dense.weights, model.dense.bias,
    ]


def _grads_list(g: ModelGrads) -> list[np.ndarray]:
    return [
        g.theta,
        g.lstm.w_i, g.lstm.w_f, g.lstm.w_g, g.lstm.w_o,
        g.lstm.b_i, g.lstm.b_f, g.lstm.b_g, g.lstm.b_o,
        g.dense.weights, g.dense.bias,
    ]


def _with_params(model: HybridModel, arrays: list[np.ndarray]) -> HybridModel:
    lstm = LstmParams(
        w_i=arrays[1], w_f=arrays[2], w_g=arrays[3], w_o=arrays[4],
        b_i=arrays[5], b_f=arrays[6], b_g=arrays[7], b_o=arrays[8],
    )
    dense = DenseParams(weights=arrays[9], bias=arrays[10])
    return replace(model, theta=arrays[0], lstm=lstm, dense=dense)


def _validation_stats(model, val_samples) -> tuple[float, float]:
    losses = []
    scores = []
    labels = []
    for sample in val_samples:
        p, _ = forward(model, sample, mode="eval")
        losses.append(bce_loss(p, sample.label))
        scores.append(p)
        labels.append(sample.label)
    return float(np.mean(losses)), roc_auc(scores, labels)


def _train_batch(model, samples, dropout_rng, noise):
    """Losses and mean parameter gradients for one mini-batch.

    All frames of the batch go through the circuit (and through the shifted
    gradient evaluations) as one block, which is mathematically identical to
    per-sample forward/backward but amortizes the kernel dispatch.
    """
    wires = model.circuit.observable_wires(model.num_observables)
    encoded = [_encode_frames(model, s) for s in samples]
    counts = [e.shape[0] for e in encoded]
    frames = np.concatenate(encoded, axis=0)
    if noise is None:
        mats = materialize(model.circuit, model.theta)
        out = run_ops_raw(frames, model.circuit, mats)
        features = expectations_raw(out, wires, model.num_qubits)
    else:
        rng = dropout_rng  # trajectory sampling shares the training stream
        features = np.empty((frames.shape[0], 1))
        for t in range(frames.shape[0]):
            state = QuantumState(model.num_qubits, frames[t])
            features[t, 0] = noisy_expectation(model.circuit, model.theta, state, noise, rng)

    losses = []
    upstreams = []
    head_grad_lists = []
    offset = 0
    dropout = DropoutConfig(rate=model.dropout_rate, train=True)
    for sample, count in zip(samples, counts):
        feats = features[offset : offset + count]
        offset += count
        prob, cache = head_forward(feats, model.lstm, model.dense, dropout, dropout_rng)
        losses.append(bce_loss(prob, sample.label))
        head = head_backward(cache, bce_grad(prob, sample.label), model.lstm)
        upstreams.append(head.features)
        head_grad_lists.append(_grads_list(ModelGrads(np.zeros(0), head.lstm, head.dense))[1:])

    grads_all = frame_gradients(model.circuit, model.theta, frames, wires=wires)
    scale = 1.0 / len(samples)
    accum = [np.zeros_like(a) for a in _params_list(model)]
    offset = 0
    for upstream, head_grads, count in zip(upstreams, head_grad_lists, counts):
        chunk = grads_all[offset : offset + count]
        offset += count
        accum[0] += scale * np.einsum("tk,tkp->p", upstream, chunk)
        for acc, g in zip(accum[1:], head_grads):
            acc += scale * g
    return losses, accum


def train_fold(model: HybridModel, train_samples, val_samples, config: TrainConfig) -> TrainFoldResult:
    """Mini-batch Adam over one fold; returns the best-validation-loss model.

    Raises DivergenceError (with the epoch) on a non-finite loss.  No training
    step runs after the early-stop condition is met.
    """
    if not train_samples or not val_samples:
        raise ParameterError("train and validation splits must be non-empty")
    started = time.perf_counter()
    shuffle_rng = np.random.default_rng([config.seed, 20])
    dropout_rng = np.random.default_rng([config.seed, 21])
    train_noise = config.noise if (config.noise_in_training and config.noise) else None

    params = [a.copy() for a in _params_list(model)]
    work = _with_params(model, params)
    optimizer = Adam([config.lr_quantum] + [config.lr_classical] * 10)

    best_loss = np.inf
    best_params = [a.copy() for a in params]
    best_epoch = 0
    best_auc = float("nan")
    occurrences = 0
    history: list[EpochStats] = []

    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(len(train_samples))
        epoch_losses = []
        for start in range(0, len(order), config.batch_size):
            batch = [train_samples[int(i)] for i in order[start : start + config.batch_size]]
            losses, accum = _train_batch(work, batch, dropout_rng, train_noise)
            if not np.all(np.isfinite(losses)):
                raise DivergenceError(epoch)
            epoch_losses.extend(losses)
            params = optimizer.step(params, accum)
            work = _with_params(work, params)
        train_loss = float(np.mean(epoch_losses))
        val_loss, val_auc = _validation_stats(work, val_samples)
        if not np.isfinite(val_loss):
            raise DivergenceError(epoch)
        history.append(EpochStats(epoch, train_loss, val_loss, val_auc))
        if val_loss < best_loss:
            best_loss = val_loss
            best_params = [a.copy() for a in params]
            best_epoch = epoch
            best_auc = val_auc
        elif val_loss > best_loss and epoch > config.threshold_epoch:
            occurrences += 1
        if occurrences > config.patience:
            break

    seconds = time.perf_counter() - started
    return TrainFoldResult(
        model=_with_params(model, best_params),
        history=history,
        seconds=seconds,
        best_epoch=best_epoch,
        best_val_loss=float(best_loss),
        best_val_auc=float(best_auc),
    )


def evaluate(
    model: HybridModel,
    samples,
    threshold: float = 0.5,
    repeats: int = 3,
    seeds=None,
    noise: NoiseConfig | None = None,
) -> MetricsReport:
    """Metrics at the given threshold, averaged over seeded evaluation repeats.

    In analytic mode the repeats are identical; with noise or shots active
    each repeat reseeds the trajectory sampling.  Scalar metrics are averaged
    across repeats; the confusion matrix comes from the first repeat.
    """
    if not samples:
        raise ParameterError("need at least one sample to evaluate")
    if seeds is None:
        seeds = tuple(range(repeats))
    if len(seeds) < repeats:
        raise ParameterError(f"need {repeats} seeds, got {len(seeds)}")
    labels = [s.label for s in samples]
    reports = []
    for r in range(repeats):
        rng = np.random.default_rng([int(seeds[r]), 30])
        scores = []
        for sample in samples:
            p, _ = forward(model, sample, mode="eval", rng=rng, noise=noise)
            scores.append(p)
        reports.append(compute_report(scores, labels, threshold))
    def mean(picker):
        return float(np.mean([picker(rep) for rep in reports]))

    return MetricsReport(
        accuracy=mean(lambda m: m.accuracy),
        roc_auc=mean(lambda m: m.roc_auc),
        precision=(mean(lambda m: m.precision[0]), mean(lambda m: m.precision[1])),
        recall=(mean(lambda m: m.recall[0]), mean(lambda m: m.recall[1])),
        f1=(mean(lambda m: m.f1[0]), mean(lambda m: m.f1[1])),
        precision_weighted=mean(lambda m: m.precision_weighted),
        recall_weighted=mean(lambda m: m.recall_weighted),
        f1_weighted=mean(lambda m: m.f1_weighted),
        confusion=reports[0].confusion,
    )


# ---------------------------------------------------------------------------
# Checkpoints.
# ---------------------------------------------------------------------------

def save_checkpoint(model: HybridModel, path: str) -> None:
    """Versioned binary checkpoint: JSON header line + little-endian f8 arrays."""
    arrays = _params_list(model)
    header = {
        "format": CHECKPOINT_FORMAT,
        "format_version": CHECKPOINT_VERSION,
        "ansatz_kind": model.ansatz_kind,
        "num_qubits": model.num_qubits,
        "hidden_dim": model.hidden_dim,
        "num_observables": model.num_observables,
        "dropout_rate": model.dropout_rate,
        "theta_len": int(model.theta.shape[0]),
        "array_lengths": [int(a.size) for a in arrays],
    }
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        for a in arrays:
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())
    os.replace(tmp, path)


def load_checkpoint(path: str) -> HybridModel:
    """Rebuild a model from a checkpoint; bitwise round-trip with save_checkpoint."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        payload = fh.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: unreadable checkpoint header") from exc
    if header.get("format") != CHECKPOINT_FORMAT:
        raise FormatError(f"{path}: not a {CHECKPOINT_FORMAT} file")
    if header.get("format_version") != CHECKPOINT_VERSION:
        raise FormatError(
            f"{path}: unsupported format version {header.get('format_version')}"
        )
    circuit = build(header["ansatz_kind"], header["num_qubits"])
    if header["theta_len"] != circuit.param_count:
        raise ShapeError(
            f"{path}: checkpoint carries {header['theta_len']} circuit parameters but a "
            f"{header['ansatz_kind']} circuit on {header['num_qubits']} qubits has "
            f"{circuit.param_count}"
        )
    hidden = int(header["hidden_dim"])
    k = int(header["num_observables"])
    cols = k + hidden
    shapes = (
        [(header["theta_len"],)]
        + [(hidden, cols)] * 4
        + [(hidden,)] * 4
        + [(hidden,), (1,)]
    )
    lengths = [int(np.prod(s)) for s in shapes]
    if header.get("array_lengths") != lengths:
        raise FormatError(f"{path}: array length table does not match the header dims")
    expected_bytes = sum(lengths) * 8
    if len(payload) != expected_bytes:
        raise FormatError(
            f"{path}: expected {expected_bytes} payload bytes, got {len(payload)}"
        )
    arrays = []
    offset = 0
    for shape, length in zip(shapes, lengths):
        chunk = np.frombuffer(payload, dtype="<f8", count=length, offset=offset * 8)
        arrays.append(chunk.astype(np.float64).reshape(shape))
        offset += length
    return HybridModel(
        ansatz_kind=header["ansatz_kind"],
        circuit=circuit,
        theta=arrays[0],
        lstm=LstmParams(*arrays[1:9]),
        dense=DenseParams(weights=arrays[9], bias=arrays[10]),
        num_qubits=int(header["num_qubits"]),
        num_observables=k,
        dropout_rate=float(header["dropout_rate"]),
    )


def load_dataset(manifest: datagen.DatasetManifest) -> list[PatientSequence]:
    """Materialize every manifest record into a PatientSequence."""
    return [
        PatientSequence(rec.patient_id, datagen.load_frames(manifest, rec), rec.label)
        for rec in manifest.records
    ]
