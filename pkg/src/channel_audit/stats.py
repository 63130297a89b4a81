"""Distribution screening and attribute ranking.

Implements the two statistical workhorses of the pipeline:

* two-sample Kolmogorov-Smirnov testing with an exact permutation p-value
  for small products n1*n2 and a two-term-corrected asymptotic p otherwise,
  plus plot-ready ECDF reports per class;
* information-gain attribute ranking with supervised entropy/MDL
  discretization, averaged over stratified cross-validation folds.

Everything here is a pure function of its inputs; fold assignment is the
only randomized step and is fully determined by the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "KSResult",
    "ks_two_sample",
    "EcdfReport",
    "ecdf_report",
    "RankedAttribute",
    "class_entropy",
    "mdl_cut_points",
    "info_gain",
    "info_gain_rank",
    "stratified_folds",
]

EXACT_ENUMERATION_LIMIT = 10_000  # max n1*n2 for the exact permutation p-value


# --------------------------------------------------------------------------
# Kolmogorov-Smirnov
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KSResult:
    """Two-sample KS outcome: supremum ECDF distance and its p-value."""

    d_statistic: float
    p_value: float
    n1: int
    n2: int
    method: str  # "exact" or "asymptotic"

    def __post_init__(self) -> None:
        if not 0.0 <= self.d_statistic <= 1.0:
            raise ValueError(f"d out of [0, 1]: {self.d_statistic}")
        if not 0.0 < self.p_value <= 1.0:
            raise ValueError(f"p out of (0, 1]: {self.p_value}")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("both samples must be non-empty")
        if self.method not in ("exact", "asymptotic"):
            raise ValueError(f"unknown method {self.method!r}")


def _ks_distance_lattice(a: np.ndarray, b: np.ndarray) -> int:
    """sup |ECDF_a - ECDF_b| scaled to the integer lattice: h = d * n1 * n2."""
    n1, n2 = len(a), len(b)
    grid = np.concatenate([a, b])
    count_a = np.searchsorted(a, grid, side="right")
    count_b = np.searchsorted(b, grid, side="right")
    return int(np.max(np.abs(count_a * n2 - count_b * n1)))


def _exact_p_value(n1: int, n2: int, h: int) -> float:
    """P(D >= h / (n1*n2)) over all orderings of a tie-free pooled sample.

    Counts monotone lattice paths from (0,0) to (n1,n2) that keep
    |i*n2 - j*n1| < h, i.e. orderings whose running ECDF gap stays below the
    observed one; the complement is the exact permutation p-value.  Exact in
    integer/rational arithmetic.
    """
    if h <= 0:
        return 1.0
    column = [0] * (n2 + 1)
    column[0] = 1
    for j in range(1, n2 + 1):
        column[j] = column[j - 1] if j * n1 < h else 0
    for i in range(1, n1 + 1):
        below = 1 if i * n2 < h else 0
        column[0] = column[0] if below else 0
        for j in range(1, n2 + 1):
            if abs(i * n2 - j * n1) < h:
                column[j] = column[j] + column[j - 1]
            else:
                column[j] = 0
    total = math.comb(n1 + n2, n1)
    p = 1 - Fraction(column[n2], total)
    return float(p) if p > 0 else math.ulp(0.0)


def _kolmogorov_sf(lam: float) -> float:
    """Survival function of the Kolmogorov distribution.

    Uses the alternating series 2*sum_j (-1)^(j-1) exp(-2 j^2 lam^2) where it
    converges quickly and switches to the complementary Jacobi-theta form
    below lam = 1.18, where the alternating series degenerates.
    """
    if lam <= 0.0:
        return 1.0
    if lam < 1.18:
        t = math.exp(-math.pi * math.pi / (8.0 * lam * lam))
        cdf = math.sqrt(2.0 * math.pi) / lam * (t + t**9 + t**25 + t**49)
        return min(1.0, max(0.0, 1.0 - cdf))
    total = 0.0
    for j in range(1, 101):
        term = (-1.0) ** (j - 1) * math.exp(-2.0 * j * j * lam * lam)
        total += term
        if abs(term) < 1e-17:
            break
    return min(1.0, max(0.0, 2.0 * total))


def _asymptotic_p_value(n1: int, n2: int, d: float) -> float:
    """Kolmogorov tail with the two-term small-sample correction on sqrt(n_eff)."""
    ne = math.sqrt(n1 * n2 / (n1 + n2))
    lam = (ne + 0.12 + 0.11 / ne) * d
    p = _kolmogorov_sf(lam)
    return p if p > 0 else math.ulp(0.0)


def ks_two_sample(
    a: Sequence[float], b: Sequence[float], method: Optional[str] = None
) -> KSResult:
    """Two-sample Kolmogorov-Smirnov test.

    ``d`` is the supremum distance between the two empirical CDFs, computed
    on the integer lattice so it is exact.  The p-value is the exact
    permutation tail probability when n1*n2 <= 10,000 (or when forced via
    ``method="exact"``), otherwise the two-term-corrected asymptotic
    Kolmogorov tail.  The exact enumeration assumes a tie-free pooled
    sample; with ties it is the standard continuous-case approximation.
    """
    a_arr = np.sort(np.asarray(a, dtype=float))
    b_arr = np.sort(np.asarray(b, dtype=float))
    n1, n2 = len(a_arr), len(b_arr)
    if n1 < 1 or n2 < 1:
        raise ValueError("ks_two_sample requires non-empty samples")
    if method not in (None, "exact", "asymptotic"):
        raise ValueError(f"unknown method {method!r}")
    h = _ks_distance_lattice(a_arr, b_arr)
    d = h / (n1 * n2)
    if method is None:
        method = "exact" if n1 * n2 <= EXACT_ENUMERATION_LIMIT else "asymptotic"
    if method == "exact":
        p = _exact_p_value(n1, n2, h)
    else:
        p = _asymptotic_p_value(n1, n2, d)
    return KSResult(d_statistic=d, p_value=p, n1=n1, n2=n2, method=method)


# --------------------------------------------------------------------------
# ECDF reports
# --------------------------------------------------------------------------


@dataclass
class EcdfReport:
    """Plot-ready empirical CDF table for one feature across classes.

    ``rows`` holds (x, F_class1(x), F_class2(x), ...) tuples with x ascending
    over the union of observed values; every F column is monotone
    non-decreasing and ends at 1.0.
    """

    feature: str
    classes: tuple[str, ...]
    rows: list[tuple[float, ...]]
    means: dict[str, float]


def ecdf_report(samples_by_class: dict[str, Sequence[float]], feature: str = "") -> EcdfReport:
    """Empirical CDFs of ``feature`` for each class over a shared x grid."""
    if not samples_by_class:
        raise ValueError("at least one class required")
    arrays = {}
    for cls, values in samples_by_class.items():
        arr = np.sort(np.asarray(values, dtype=float))
        if len(arr) == 0:
            raise ValueError(f"class {cls!r} has no samples")
        arrays[cls] = arr
    grid = np.unique(np.concatenate(list(arrays.values())))
    classes = tuple(arrays)
    rows = []
    for x in grid:
        row = (float(x),) + tuple(
            float(np.searchsorted(arrays[cls], x, side="right") / len(arrays[cls]))
            for cls in classes
        )
        rows.append(row)
    means = {cls: float(np.mean(arr)) for cls, arr in arrays.items()}
    return EcdfReport(feature=feature, classes=classes, rows=rows, means=means)


# --------------------------------------------------------------------------
# entropy, MDL discretization, information gain
# --------------------------------------------------------------------------


def _entropy_from_counts(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    probs = counts[counts > 0] / total
    return float(-np.sum(probs * np.log2(probs)))


def class_entropy(labels: Iterable) -> float:
    """Shannon entropy of the label distribution, in bits."""
    _, counts = np.unique(np.asarray(list(labels)), return_counts=True)
    return _entropy_from_counts(counts)


def _mdl_split(values: np.ndarray, labels: np.ndarray, lo: int, hi: int, cuts: list[float]) -> None:
    """Recursive entropy-minimizing binary split with the MDL stopping rule.

    ``values`` is sorted ascending with ``labels`` aligned; works on the
    half-open index range [lo, hi).  Accepted cut midpoints are appended to
    ``cuts``.
    """
    n = hi - lo
    if n < 2:
        return
    segment_labels = labels[lo:hi]
    classes, indexed = np.unique(segment_labels, return_inverse=True)
    k = len(classes)
    if k < 2:
        return
    # cumulative class counts over the sorted segment -> entropy of every prefix
    one_hot = np.zeros((n, k), dtype=np.int64)
    one_hot[np.arange(n), indexed] = 1
    prefix = np.cumsum(one_hot, axis=0)
    total = prefix[-1]

    # candidate cuts only between adjacent distinct values
    boundary = np.flatnonzero(values[lo + 1 : hi] != values[lo : hi - 1])
    if len(boundary) == 0:
        return
    left_counts = prefix[boundary]
    right_counts = total - left_counts
    n_left = boundary + 1
    n_right = n - n_left

    def entropies(counts: np.ndarray, sizes: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            probs = counts / sizes[:, None]
            logs = np.where(probs > 0, np.log2(np.where(probs > 0, probs, 1.0)), 0.0)
        return -(probs * logs).sum(axis=1)

    h_parent = _entropy_from_counts(total)
    h_left = entropies(left_counts, n_left)
    h_right = entropies(right_counts, n_right)
    weighted = (n_left * h_left + n_right * h_right) / n
    best = int(np.argmin(weighted))
    gain = h_parent - weighted[best]

    k_left = int((left_counts[best] > 0).sum())
    k_right = int((right_counts[best] > 0).sum())
    delta = math.log2(3**k - 2) - (
        k * h_parent - k_left * h_left[best] - k_right * h_right[best]
    )
    if gain <= (math.log2(n - 1) + delta) / n:
        return

    split_at = lo + int(n_left[best])
    cuts.append(float((values[split_at - 1] + values[split_at]) / 2))
    _mdl_split(values, labels, lo, split_at, cuts)
    _mdl_split(values, labels, split_at, hi, cuts)


def mdl_cut_points(values: Sequence[float], labels: Sequence) -> list[float]:
    """Supervised discretization cut points via recursive entropy/MDL splitting.

    Returns an ascending list of thresholds; empty when no split justifies
    its description length (constant or uninformative features).
    """
    values_arr = np.asarray(values, dtype=float)
    labels_arr = np.asarray(labels)
    if len(values_arr) != len(labels_arr):
        raise ValueError("values and labels must align")
    order = np.argsort(values_arr, kind="stable")
    cuts: list[float] = []
    _mdl_split(values_arr[order], labels_arr[order], 0, len(values_arr), cuts)
    return sorted(cuts)


def info_gain(values: Sequence[float], labels: Sequence) -> float:
    """Information gain of one numeric feature after MDL discretization, in bits.

    IG = H(class) - H(class | binned feature); a feature whose best split
    fails the MDL test keeps a single bin and scores exactly 0.
    """
    values_arr = np.asarray(values, dtype=float)
    labels_arr = np.asarray(labels)
    cuts = mdl_cut_points(values_arr, labels_arr)
    if not cuts:
        return 0.0
    bins = np.searchsorted(np.asarray(cuts), values_arr, side="left")
    h_class = class_entropy(labels_arr)
    n = len(labels_arr)
    conditional = 0.0
    for b in np.unique(bins):
        mask = bins == b
        _, counts = np.unique(labels_arr[mask], return_counts=True)
        conditional += (mask.sum() / n) * _entropy_from_counts(counts)
    return max(0.0, h_class - conditional)


# --------------------------------------------------------------------------
# stratified folds and attribute ranking
# --------------------------------------------------------------------------


def stratified_folds(labels: Sequence, n_folds: int, seed: int = 0) -> list[np.ndarray]:
    """Deal each class round-robin into ``n_folds`` test folds.

    Per-class fold sizes differ by at most one sample, so fold class
    proportions track the full-sample proportions as closely as integer
    counts allow.
    """
    labels_arr = np.asarray(labels)
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    if n_folds > len(labels_arr):
        raise ValueError("more folds than samples")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(n_folds)]
    for cls in np.unique(labels_arr):
        idx = np.flatnonzero(labels_arr == cls)
        rng.shuffle(idx)
        for position, sample in enumerate(idx):
            folds[position % n_folds].append(int(sample))
    return [np.sort(np.asarray(fold, dtype=int)) for fold in folds]


@dataclass(frozen=True)
class RankedAttribute:
    """One feature's information-gain merit averaged over CV folds."""

    name: str
    mean_info_gain: float
    fold_scores: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.fold_scores:
            mean = sum(self.fold_scores) / len(self.fold_scores)
            if not math.isclose(mean, self.mean_info_gain, rel_tol=1e-9, abs_tol=1e-12):
                raise ValueError("mean_info_gain must equal the average of fold_scores")
        if self.mean_info_gain < 0:
            raise ValueError("information gain cannot be negative")


def info_gain_rank(
    matrix: Sequence[Sequence[float]],
    labels: Sequence,
    names: Optional[Sequence[str]] = None,
    folds: int = 10,
    seed: int = 0,
) -> list[RankedAttribute]:
    """Rank features by mean information gain over stratified CV folds.

    Per fold, discretization and the gain itself are computed on the
    training portion only; scores are averaged across folds and features
    sorted by descending mean (ties by name).
    """
    matrix_arr = np.asarray(matrix, dtype=float)
    labels_arr = np.asarray(labels)
    if matrix_arr.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    if not np.all(np.isfinite(matrix_arr)):
        raise ValueError("matrix must be finite")
    if len(np.unique(labels_arr)) < 2:
        raise ValueError("labels must contain at least two classes")
    n_samples, n_features = matrix_arr.shape
    if names is None:
        names = [f"f{i}" for i in range(n_features)]
    if len(names) != n_features:
        raise ValueError("names must match the number of columns")

    test_folds = stratified_folds(labels_arr, folds, seed)
    all_idx = np.arange(n_samples)
    scores = np.zeros((n_features, len(test_folds)))
    for fold_index, test_idx in enumerate(test_folds):
        train_idx = np.setdiff1d(all_idx, test_idx)
        fold_labels = labels_arr[train_idx]
        for feature_index in range(n_features):
            scores[feature_index, fold_index] = info_gain(
                matrix_arr[train_idx, feature_index], fold_labels
            )
    ranked = [
        RankedAttribute(
            name=str(names[i]),
            mean_info_gain=float(scores[i].mean()),
            fold_scores=tuple(float(s) for s in scores[i]),
        )
        for i in range(n_features)
    ]
    ranked.sort(key=lambda attr: (-attr.mean_info_gain, attr.name))
    return ranked
