"""Classical head: LSTM over per-frame measurements, dropout, sigmoid output.

The recurrence is the standard one (sigmoid input/forget/output gates, tanh
candidate and cell squash) with zero initial hidden and cell state.  Dropout
uses inverted scaling and is applied to the final hidden vector only, in
train mode.  Backward passes are exact backpropagation through time, checked
against finite differences in the tests.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import LabelError, ParameterError, ShapeError, StateError

PROB_CLAMP = 1e-7


@dataclass
class LstmParams:
    """Gate weights (hidden x (input + hidden)) and biases for one LSTM layer."""

    w_i: np.ndarray
    w_f: np.ndarray
    w_g: np.ndarray
    w_o: np.ndarray
    b_i: np.ndarray
    b_f: np.ndarray
    b_g: np.ndarray
    b_o: np.ndarray

    @property
    def hidden_dim(self) -> int:
        return self.w_i.shape[0]

    @property
    def input_dim(self) -> int:
        return self.w_i.shape[1] - self.w_i.shape[0]


@dataclass
class DenseParams:
    """Single-logit readout: weights (hidden,) and a one-element bias."""

    weights: np.ndarray
    bias: np.ndarray


@dataclass(frozen=True)
class DropoutConfig:
    rate: float = 0.5
    train: bool = False

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise ParameterError(f"dropout rate must lie in [0, 1), got {self.rate}")


def _glorot(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (rows + cols))
    return rng.uniform(-limit, limit, size=(rows, cols))


def init_lstm_params(input_dim: int, hidden_dim: int, rng: np.random.Generator) -> LstmParams:
    """Glorot-uniform weights; forget-gate bias starts at 1.0."""
    if input_dim < 1 or hidden_dim < 1:
        raise ParameterError("input_dim and hidden_dim must be >= 1")
    cols = input_dim + hidden_dim
    return LstmParams(
        w_i=_glorot(rng, hidden_dim, cols),
        w_f=_glorot(rng, hidden_dim, cols),
        w_g=_glorot(rng, hidden_dim, cols),
        w_o=_glorot(rng, hidden_dim, cols),
        b_i=np.zeros(hidden_dim),
        b_f=np.ones(hidden_dim),
        b_g=np.zeros(hidden_dim),
        b_o=np.zeros(hidden_dim),
    )


def init_dense_params(hidden_dim: int, rng: np.random.Generator) -> DenseParams:
    return DenseParams(weights=_glorot(rng, 1, hidden_dim)[0], bias=np.zeros(1))


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass
class LstmCache:
    """Intermediates needed for exact BPTT."""

    inputs: np.ndarray          # (T, D)
    gates: list                 # per t: (v, i, f, g, o, c, tanh_c)
    hidden: np.ndarray          # final hidden vector before dropout
    mask: np.ndarray            # inverted-dropout mask (ones in eval mode)
    dropped: np.ndarray         # hidden * mask
    train: bool


def lstm_forward(
    features: np.ndarray,
    params: LstmParams,
    dropout: DropoutConfig,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, LstmCache]:
    """Run the recurrence over a (T, D) feature sequence.

    Returns the (possibly dropout-masked) final hidden vector and the cache
    for `head_backward`.  Train-mode dropout needs ``rng``.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features[:, None]
    if features.ndim != 2 or features.shape[0] < 1:
        raise ShapeError("features must be a non-empty (T, D) sequence")
    if features.shape[1] != params.input_dim:
        raise ShapeError(
            f"feature dim {features.shape[1]} does not match input_dim {params.input_dim}"
        )
    hidden_dim = params.hidden_dim
    h = np.zeros(hidden_dim)
    c = np.zeros(hidden_dim)
    steps = []
    for x in features:
        v = np.concatenate([x, h])
        i = _sigmoid(params.w_i @ v + params.b_i)
        f = _sigmoid(params.w_f @ v + params.b_f)
        g = np.tanh(params.w_g @ v + params.b_g)
        o = _sigmoid(params.w_o @ v + params.b_o)
        c = f * c + i * g
        tanh_c = np.tanh(c)
        h = o * tanh_c
        steps.append((v, i, f, g, o, c, tanh_c))
    if dropout.train and dropout.rate > 0.0:
        if rng is None:
            raise ParameterError("train-mode dropout needs a random generator")
        keep = 1.0 - dropout.rate
        mask = (rng.random(hidden_dim) < keep) / keep
    else:
        mask = np.ones(hidden_dim)
    dropped = h * mask
    cache = LstmCache(
        inputs=features, gates=steps, hidden=h, mask=mask, dropped=dropped, train=dropout.train
    )
    return dropped, cache


def dense_sigmoid(h: np.ndarray, params: DenseParams) -> float:
    """Logistic readout sigma(w . h + b) in (0, 1)."""
    h = np.asarray(h, dtype=np.float64).reshape(-1)
    if h.shape != params.weights.shape:
        raise ShapeError(f"hidden vector {h.shape} does not match weights {params.weights.shape}")
    return float(_sigmoid(params.weights @ h + params.bias[0]))


def bce_loss(p: float, y: int) -> float:
    """Binary cross-entropy with the probability clamped away from 0 and 1."""
    if y not in (0, 1):
        raise LabelError(f"label must be 0 or 1, got {y!r}")
    p = min(max(p, PROB_CLAMP), 1.0 - PROB_CLAMP)
    return -(y * math.log(p) + (1 - y) * math.log(1.0 - p))


def bce_grad(p: float, y: int) -> float:
    """d(loss)/dp at the clamped probability."""
    if y not in (0, 1):
        raise LabelError(f"label must be 0 or 1, got {y!r}")
    p = min(max(p, PROB_CLAMP), 1.0 - PROB_CLAMP)
    return -y / p + (1 - y) / (1.0 - p)


@dataclass
class HeadCache:
    lstm: LstmCache
    dense: DenseParams
    prob: float


@dataclass
class HeadGrads:
    lstm: LstmParams
    dense: DenseParams
    features: np.ndarray  # dLoss/dFeature, shape (T, D)


def head_forward(
    features: np.ndarray,
    lstm_params: LstmParams,
    dense_params: DenseParams,
    dropout: DropoutConfig,
    rng: np.random.Generator | None = None,
) -> tuple[float, HeadCache]:
    """LSTM -> dropout -> dense sigmoid; returns probability and BPTT cache."""
    dropped, cache = lstm_forward(features, lstm_params, dropout, rng)
    p = dense_sigmoid(dropped, dense_params)
    return p, HeadCache(lstm=cache, dense=dense_params, prob=p)


def head_backward(cache: HeadCache, dloss_dp: float, lstm_params: LstmParams) -> HeadGrads:
    """Exact gradients of the head for a scalar loss sensitivity dLoss/dp."""
    lc = cache.lstm
    if not lc.gates or lc.inputs.shape[0] != len(lc.gates):
        raise StateError("cache does not match a completed forward pass")
    seq_len, input_dim = lc.inputs.shape
    hidden_dim = lstm_params.hidden_dim

    p = cache.prob
    dlogit = dloss_dp * p * (1.0 - p)
    d_w = dlogit * lc.dropped
    d_b = np.array([dlogit])
    dh = (dlogit * cache.dense.weights) * lc.mask

    grads = LstmParams(
        w_i=np.zeros_like(lstm_params.w_i),
        w_f=np.zeros_like(lstm_params.w_f),
        w_g=np.zeros_like(lstm_params.w_g),
        w_o=np.zeros_like(lstm_params.w_o),
        b_i=np.zeros(hidden_dim),
        b_f=np.zeros(hidden_dim),
        b_g=np.zeros(hidden_dim),
        b_o=np.zeros(hidden_dim),
    )
    d_features = np.zeros((seq_len, input_dim))
    dc = np.zeros(hidden_dim)
    for t in range(seq_len - 1, -1, -1):
        v, i, f, g, o, c, tanh_c = lc.gates[t]
        c_prev = lc.gates[t - 1][5] if t > 0 else np.zeros(hidden_dim)
        do = dh * tanh_c
        dc = dc + dh * o * (1.0 - tanh_c**2)
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dz_i = di * i * (1.0 - i)
        dz_f = df * f * (1.0 - f)
        dz_g = dg * (1.0 - g**2)
        dz_o = do * o * (1.0 - o)
        grads.w_i += np.outer(dz_i, v)
        grads.w_f += np.outer(dz_f, v)
        grads.w_g += np.outer(dz_g, v)
        grads.w_o += np.outer(dz_o, v)
        grads.b_i += dz_i
        grads.b_f += dz_f
        grads.b_g += dz_g
        grads.b_o += dz_o
        dv = (
            lstm_params.w_i.T @ dz_i
            + lstm_params.w_f.T @ dz_f
            + lstm_params.w_g.T @ dz_g
            + lstm_params.w_o.T @ dz_o
        )
        d_features[t] = dv[:input_dim]
        dh = dv[input_dim:]
        dc = dc * f
    return HeadGrads(
        lstm=grads, dense=DenseParams(weights=d_w, bias=d_b), features=d_features
    )


def adam_step(
    param: np.ndarray,
    grad: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    step: int,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One bias-corrected Adam update; returns (param', m', v')."""
    if step < 1:
        raise ParameterError("Adam step counter starts at 1")
    if not (param.shape == grad.shape == m.shape == v.shape):
        raise ShapeError("param, grad, and moment shapes must all match")
    m2 = beta1 * m + (1.0 - beta1) * grad
    v2 = beta2 * v + (1.0 - beta2) * grad**2
    m_hat = m2 / (1.0 - beta1**step)
    v_hat = v2 / (1.0 - beta2**step)
    return param - lr * m_hat / (np.sqrt(v_hat) + eps), m2, v2


class Adam:
    """Adam over a fixed-order list of parameter arrays with per-array rates."""

    def __init__(self, learning_rates: list[float], beta1=0.9, beta2=0.999, eps=1e-8):
        self.learning_rates = list(learning_rates)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: list[np.ndarray] | None = None
        self.v: list[np.ndarray] | None = None

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> list[np.ndarray]:
        if len(params) != len(self.learning_rates) or len(grads) != len(params):
            raise ShapeError("params, grads, and learning-rate lists must align")
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        out = []
        for idx, (p, g) in enumerate(zip(params, grads)):
            p2, self.m[idx], self.v[idx] = adam_step(
                p, g, self.m[idx], self.v[idx], self.t,
                lr=self.learning_rates[idx], beta1=self.beta1, beta2=self.beta2, eps=self.eps,
            )
            out.append(p2)
        return out
