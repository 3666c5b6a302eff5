"""Classification metrics and the two cross-model statistical tests.

ROC-AUC uses the Mann-Whitney formulation (ties get half credit).  Levene's
test is the classic mean-centered form; the paired t-test is two-sided.  Both
p-values come from a continued-fraction regularized incomplete beta evaluated
to 1e-12, so the package needs no external statistics dependency.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTestError,
    ParameterError,
    ShapeError,
    UndefinedMetricError,
)

_BETA_TOL = 1e-12
_BETA_MAX_ITER = 500


@dataclass(frozen=True)
class MetricsReport:
    """Binary-classification metrics; class 1 is the positive class.

    ``confusion`` is (tn, fp, fn, tp).  The weighted averages use class
    support as the weights.  ``roc_auc`` is NaN for fragments produced from
    hard predictions only.
    """

    accuracy: float
    roc_auc: float
    precision: tuple[float, float]
    recall: tuple[float, float]
    f1: tuple[float, float]
    precision_weighted: float
    recall_weighted: float
    f1_weighted: float
    confusion: tuple[int, int, int, int]


def _check_labels(labels: np.ndarray) -> None:
    if not np.all(np.isin(labels, (0, 1))):
        raise ParameterError("labels must be 0 or 1")


def roc_auc(scores, labels) -> float:
    """Area under the ROC curve: (concordant + 0.5 * tied) / (P * N)."""
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if scores.shape != labels.shape:
        raise ShapeError("scores and labels must have equal length")
    _check_labels(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    if pos.size == 0 or neg.size == 0:
        raise UndefinedMetricError("ROC-AUC needs both classes present")
    greater = np.sum(pos[:, None] > neg[None, :])
    ties = np.sum(pos[:, None] == neg[None, :])
    return float((greater + 0.5 * ties) / (pos.size * neg.size))


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def confusion_and_prf(predictions, labels) -> MetricsReport:
    """Confusion counts plus per-class and weighted precision/recall/F1.

    0/0 rates are defined as 0.  The returned report has ``roc_auc`` set to
    NaN; use `compute_report` when continuous scores are available.
    """
    predictions = np.asarray(predictions, dtype=np.int64).reshape(-1)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if predictions.shape != labels.shape:
        raise ShapeError("predictions and labels must have equal length")
    if predictions.size == 0:
        raise ShapeError("need at least one prediction")
    _check_labels(predictions)
    _check_labels(labels)
    tp = int(np.sum((predictions == 1) & (labels == 1)))
    tn = int(np.sum((predictions == 0) & (labels == 0)))
    fp = int(np.sum((predictions == 1) & (labels == 0)))
    fn = int(np.sum((predictions == 0) & (labels == 1)))
    prec = (_safe_div(tn, tn + fn), _safe_div(tp, tp + fp))
    rec = (_safe_div(tn, tn + fp), _safe_div(tp, tp + fn))
    f1 = tuple(
        _safe_div(2.0 * p * r, p + r) for p, r in zip(prec, rec)
    )
    support = np.array([tn + fp, tp + fn], dtype=np.float64)
    total = support.sum()
    weights = support / total
    return MetricsReport(
        accuracy=_safe_div(tp + tn, total),
        roc_auc=float("nan"),
        precision=prec,
        recall=rec,
        f1=f1,
        precision_weighted=float(weights @ prec),
        recall_weighted=float(weights @ rec),
        f1_weighted=float(weights @ f1),
        confusion=(tn, fp, fn, tp),
    )


def compute_report(scores, labels, threshold: float = 0.5) -> MetricsReport:
    """Full report from continuous scores: threshold for the counts, AUC from ranks."""
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    base = confusion_and_prf((scores >= threshold).astype(np.int64), labels)
    return MetricsReport(
        accuracy=base.accuracy,
        roc_auc=roc_auc(scores, labels),
        precision=base.precision,
        recall=base.recall,
        f1=base.f1,
        precision_weighted=base.precision_weighted,
        recall_weighted=base.recall_weighted,
        f1_weighted=base.f1_weighted,
        confusion=base.confusion,
    )


# ---------------------------------------------------------------------------
# Regularized incomplete beta and the distribution tails built on it.
# ---------------------------------------------------------------------------

def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            return h
    raise ParameterError("incomplete beta did not converge; check the arguments")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ParameterError("incomplete beta needs positive shape parameters")
    if not 0.0 <= x <= 1.0:
        raise ParameterError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(x: float, d1: float, d2: float) -> float:
    """Upper tail of the F distribution."""
    if x <= 0.0:
        return 1.0
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))


def t_sf_two_sided(t: float, df: float) -> float:
    """Two-sided tail probability of Student's t."""
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


def levene_test(groups) -> tuple[float, float]:
    """Classic (mean-centered) Levene W with an F-distribution p-value."""
    arrays = [np.asarray(g, dtype=np.float64).reshape(-1) for g in groups]
    if len(arrays) < 2:
        raise ParameterError("Levene's test needs at least two groups")
    for g in arrays:
        if g.size < 2:
            raise ParameterError("each group needs at least two observations")
    k = len(arrays)
    n_total = sum(g.size for g in arrays)
    z_groups = [np.abs(g - g.mean()) for g in arrays]
    z_means = np.array([z.mean() for z in z_groups])
    z_grand = sum(z.sum() for z in z_groups) / n_total
    numerator = (n_total - k) * sum(
        g.size * (zm - z_grand) ** 2 for g, zm in zip(arrays, z_means)
    )
    denominator = (k - 1) * sum(
        float(np.sum((z - zm) ** 2)) for z, zm in zip(z_groups, z_means)
    )
    if denominator == 0.0:
        # every deviation identical within groups: no evidence against equality
        return 0.0, 1.0
    w = numerator / denominator
    return float(w), f_sf(w, k - 1, n_total - k)


def t_critical(confidence: float, df: int) -> float:
    """Two-sided Student-t critical value by bisection on the tail function."""
    if not 0.0 < confidence < 1.0:
        raise ParameterError("confidence must lie strictly between 0 and 1")
    if df < 1:
        raise ParameterError("degrees of freedom must be >= 1")
    alpha = 1.0 - confidence
    lo, hi = 0.0, 1e6
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_sf_two_sided(mid, df) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fold_mean_interval(values, confidence: float = 0.95) -> tuple[float, float]:
    """Fold-wise mean and the half-width of its Student-t confidence interval.

    This is the documented stand-in for the (unstated) published CI method:
    mean +/- t_crit * sd / sqrt(k) over the per-fold values.
    """
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.size < 2:
        raise ParameterError("need at least two fold values for an interval")
    sd = values.std(ddof=1)
    half = t_critical(confidence, values.size - 1) * sd / math.sqrt(values.size)
    return float(values.mean()), float(half)


def paired_ttest(a, b) -> tuple[float, float]:
    """Two-sided paired Student's t-test on equal-length samples."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise ShapeError("paired samples must have equal length")
    if a.size < 2:
        raise ParameterError("paired t-test needs at least two pairs")
    diff = a - b
    sd = diff.std(ddof=1)
    if sd == 0.0:
        raise DegenerateTestError("zero-variance differences make the t statistic undefined")
    t = diff.mean() / (sd / math.sqrt(diff.size))
    return float(t), t_sf_two_sided(abs(t), diff.size - 1)
