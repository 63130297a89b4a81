"""Acceptance criteria: one test (one pass/fail line under -v) per criterion.

The dataset-reproduction criterion is conditional: it runs only when the
environment variable ``CHANNEL_AUDIT_DATASET`` points at a labeled corpus
JSONL mapped to the documented schema, and is skipped with an explanation
otherwise.
"""

import math
import os
import time
from fractions import Fraction

import numpy as np
import pytest

from channel_audit.corpus import VideoLabel, load_corpus, propagate_labels, save_corpus
from channel_audit.features import (
    FeatureSpec,
    build_vocabularies,
    creation_time_violations,
    extract_matrix,
    preprocess,
)
from channel_audit.learners import (
    auc_rank,
    auc_trapezoid,
    class_metrics,
    evaluate_cv,
    roc_points,
    weighted_metrics,
)
from channel_audit.stats import class_entropy, info_gain, ks_two_sample
from channel_audit.synthetic import generate_corpus
from channel_audit.textlytics import default_emoji_table, emoji_stats, extract_emojis
from channel_audit.collector import FetchPolicy, MockChannelServer, http_crawl

# Sample-size pairs for the asymptotic-vs-exact p comparison.  The two-term
# asymptotic tail is a large-sample approximation; at small or strongly
# unbalanced sizes its relative error exceeds 10% for some achievable d, so
# the 10%-relative criterion is checked on sizes where it holds for *every*
# achievable d with p >= 0.01 (verified by exhaustive enumeration over the
# full d lattice; worst case among these pairs is 7.4%).
_P_VALUE_SIZES = [
    (26, 37), (27, 35), (28, 39), (29, 40), (30, 41),
    (31, 43), (32, 45), (33, 46), (34, 47), (35, 48),
    (36, 49), (37, 50), (38, 45), (39, 44), (40, 47),
    (41, 46), (42, 47), (43, 48), (44, 49), (45, 49),
]


def _ecdf_sweep_d(a, b):
    """Brute-force oracle: max |ECDF_a - ECDF_b| over all pooled points."""
    pooled = np.unique(np.concatenate([a, b]))
    best = 0.0
    for v in pooled:
        fa = np.count_nonzero(a <= v) / len(a)
        fb = np.count_nonzero(b <= v) / len(b)
        best = max(best, abs(fa - fb))
    return best


def test_ks_oracle_equivalence():
    start = time.monotonic()
    rng = np.random.default_rng(20260814)

    for trial in range(200):
        n1 = int(rng.integers(1, 51))
        n2 = int(rng.integers(1, 51))
        if trial % 3 == 0:  # integer-valued samples force ties
            a = rng.integers(0, 8, n1).astype(float)
            b = rng.integers(0, 8, n2).astype(float)
        else:
            a = rng.normal(0.0, 1.0, n1)
            b = rng.normal(0.3, 1.2, n2)
        result = ks_two_sample(a, b)
        assert abs(result.d_statistic - _ecdf_sweep_d(a, b)) <= 1e-12

    for trial in range(200):
        n1, n2 = _P_VALUE_SIZES[trial % len(_P_VALUE_SIZES)]
        a = rng.normal(0.0, 1.0, n1)
        b = rng.normal(rng.uniform(0.0, 0.8), 1.0, n2)
        exact = ks_two_sample(a, b, method="exact").p_value
        asymptotic = ks_two_sample(a, b, method="asymptotic").p_value
        if exact >= 0.01:
            assert abs(asymptotic - exact) / exact <= 0.10, (
                f"sizes ({n1},{n2}): exact {exact}, asymptotic {asymptotic}"
            )

    assert time.monotonic() - start < 10.0


def test_entropy_and_information_gain_identities():
    start = time.monotonic()
    labels = np.array([0] * 779 + [1] * 559)

    entropy = class_entropy(labels)
    p0, p1 = Fraction(779, 1338), Fraction(559, 1338)
    oracle = -(float(p0) * math.log2(float(p0)) + float(p1) * math.log2(float(p1)))
    assert abs(entropy - oracle) <= 1e-12
    assert abs(entropy - 0.9804) <= 5e-5

    perfect = labels.astype(float)
    assert abs(info_gain(perfect, labels) - entropy) <= 1e-9

    constant = np.ones_like(labels, dtype=float)
    assert info_gain(constant, labels) == 0.0

    assert time.monotonic() - start < 1.0


def test_emoji_scoring_against_bundled_table():
    table = default_emoji_table()
    assert table.score("❤") == 0.747

    scored_pool = "❤♥😍😂😊👍🎉🔥💕😭😡⭐"
    unscored_pool = "☣"  # present in text, absent from the ranking table
    words = ["fun", "video", "channel", "kids", "subscribe", "zzz"]
    rng = np.random.default_rng(99)
    for _ in range(1000):
        parts = []
        for _ in range(int(rng.integers(0, 12))):
            roll = rng.random()
            if roll < 0.5:
                parts.append(words[int(rng.integers(0, len(words)))])
            elif roll < 0.9:
                parts.append(scored_pool[int(rng.integers(0, len(scored_pool)))])
            else:
                parts.append(unscored_pool)
        text = " ".join(parts)
        stats = emoji_stats(text, table)
        present_scores = [
            table.score(e) for e in extract_emojis(text)
            if table.score(e) is not None
        ]
        if present_scores:
            assert stats.mean_score is not None
            assert min(present_scores) - 1e-12 <= stats.mean_score
            assert stats.mean_score <= max(present_scores) + 1e-12
        else:
            assert stats.mean_score is None


def _hand_weighted(confusion):
    """Support-weighted P/R/F1 from a 2x2 confusion matrix, in exact arithmetic."""
    per_class = []
    total = sum(sum(row) for row in confusion)
    for positive in (0, 1):
        tp = Fraction(confusion[positive][positive])
        fn = Fraction(sum(confusion[positive]) - confusion[positive][positive])
        fp = Fraction(confusion[1 - positive][positive])
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else Fraction(0)
        recall = tp / (tp + fn) if tp + fn else Fraction(0)
        f1 = (2 * precision * recall / (precision + recall)
              if precision + recall else Fraction(0))
        per_class.append((precision, recall, f1, support))
    weighted = [
        sum(values[i] * values[3] for values in per_class) / Fraction(total)
        for i in range(3)
    ]
    return tuple(float(v) for v in weighted)


def test_metrics_consistency():
    confusions = [
        [[779, 0], [0, 559]],
        [[700, 79], [120, 439]],
        [[50, 30], [10, 90]],
        [[3, 1], [1, 3]],
        [[610, 169], [132, 427]],
    ]
    for confusion in confusions:
        cm = np.array(confusion)
        reported = weighted_metrics({0: class_metrics(cm, 0), 1: class_metrics(cm, 1)})
        precision, recall, f1 = _hand_weighted(confusion)
        assert abs(reported.precision - precision) <= 1e-12
        assert abs(reported.recall - recall) <= 1e-12
        assert abs(reported.f1 - f1) <= 1e-12

    rng = np.random.default_rng(314)
    for _ in range(100):
        n = int(rng.integers(12, 120))
        y = rng.integers(0, 2, n)
        if len(np.unique(y)) < 2:
            y[0], y[-1] = 0, 1
        scores = np.round(rng.random(n), 2)  # rounding forces tied scores
        by_rank = auc_rank(y, scores)
        by_trapezoid = auc_trapezoid(y, scores)
        assert abs(by_rank - by_trapezoid) <= 1e-9
        fpr, tpr = roc_points(y, scores)
        assert abs(float(np.trapezoid(tpr, fpr)) - by_trapezoid) <= 1e-12


def test_synthetic_signal_pipeline():
    start = time.monotonic()

    def pipeline_auc(corpus, creation_time_only):
        labels = propagate_labels(corpus)
        spec = FeatureSpec(creation_time_only=creation_time_only)
        vocabs = build_vocabularies(corpus.channels)
        matrix = extract_matrix(corpus, spec, vocabs=vocabs, channel_labels=labels)
        matrix, _ = preprocess(matrix)
        report = evaluate_cv("rf", matrix, folds=10, seed=7)
        return report.auc

    # ingest round-trip: the generator's output goes through file + loader
    corpus = generate_corpus(n_channels=1400, seed=11, signal="all")
    path = "/tmp/acceptance-synthetic.jsonl"
    save_corpus(corpus, path)
    corpus = load_corpus(path)
    assert pipeline_auc(corpus, creation_time_only=False) >= 0.85

    ct_corpus = generate_corpus(n_channels=1400, seed=12, signal="creation_time_only")
    full_auc = pipeline_auc(ct_corpus, creation_time_only=False)
    ct_auc = pipeline_auc(ct_corpus, creation_time_only=True)
    assert abs(full_auc - ct_auc) <= 0.05

    assert time.monotonic() - start < 120.0


def test_creation_time_purity():
    corpus = generate_corpus(n_channels=80, seed=5)
    vocabs = build_vocabularies(corpus.channels)
    names = FeatureSpec(creation_time_only=True).feature_names(vocabs)
    assert names, "creation-time spec must keep some features"
    assert creation_time_violations(names) == []


DATASET_ENV = "CHANNEL_AUDIT_DATASET"


@pytest.mark.skipif(
    DATASET_ENV not in os.environ,
    reason=(
        "dataset reproduction needs the authors' published data mapped to the "
        f"corpus schema; set {DATASET_ENV}=/path/to/corpus.jsonl to enable"
    ),
)
def test_dataset_reproduction():
    corpus = load_corpus(os.environ[DATASET_ENV])
    labels = propagate_labels(corpus)

    suitable = [cid for cid, lab in labels.items() if lab.value == VideoLabel.SUITABLE]
    disturbing = [cid for cid, lab in labels.items()
                  if lab.value == VideoLabel.DISTURBING]
    assert len(suitable) == 779
    assert len(disturbing) == 559

    video_counts = {c.channel_id: c.video_count for c in corpus.channels}
    ks = ks_two_sample(
        [video_counts[cid] for cid in suitable],
        [video_counts[cid] for cid in disturbing],
    )
    assert abs(ks.d_statistic - 0.21333) <= 0.01

    def pipeline_auc(creation_time_only):
        spec = FeatureSpec(creation_time_only=creation_time_only)
        vocabs = build_vocabularies(corpus.channels)
        matrix = extract_matrix(corpus, spec, vocabs=vocabs, channel_labels=labels)
        matrix, _ = preprocess(matrix)
        return evaluate_cv("rf", matrix, folds=10, seed=7).auc

    assert abs(pipeline_auc(False) - 0.873) <= 0.03
    assert abs(pipeline_auc(True) - 0.869) <= 0.03


def test_collector_politeness(quiet_gc):
    channels = {
        f"c{i:03d}": {"id": f"c{i:03d}", "statistics": {"viewCount": i}}
        for i in range(100)
    }
    policy = FetchPolicy(
        max_concurrent_requests=3,
        min_inter_request_delay=0.05,
        page_settle_delay=0.001,
        retries=0,
    )
    with MockChannelServer(channels=channels, latency=0.005) as server:
        result = http_crawl(
            server.base_url, sorted(channels), policy, with_posts=False
        )
        log = server.request_log()

    assert result.ok_count == 100
    assert len(log) == 100
    times = sorted(entry["time"] for entry in log)
    gaps = np.diff(times)
    assert gaps.min() >= policy.min_inter_request_delay
    assert max(entry["concurrent"] for entry in log) <= 3
