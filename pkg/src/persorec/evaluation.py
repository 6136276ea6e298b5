"""Precision / recall / F-measure, the article-count sweep and population histograms.

Metric conventions follow the displayed-set formulation: with ``R`` the
relevant (recommended) items, ``I`` the irrelevant ones and ``V`` the viewed
ones, ``TP = R ∩ V``, ``FP = I ∩ V``, ``FN = R \\ V``; precision is
``|TP| / (|TP| + |FP|)`` (share of viewed items the system marked relevant)
and recall ``|TP| / (|TP| + |FN|)`` (share of relevant items that were
viewed).
"""

from __future__ import annotations

import csv
import io
import logging
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import AbstractSet, Iterable, Optional, Sequence

import numpy as np

from .data import Dataset, RatingsView
from .exceptions import DatasetError, ValidationError
from .personality import MBTI_TYPES, TRAIT_NAMES, PersonalityModel, dominant_trait
from .recommender import NeighborhoodEngine, PredictorConfig

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvaluationSets:
    relevant: frozenset
    irrelevant: frozenset
    viewed: frozenset

    def __post_init__(self):
        for name in ("relevant", "irrelevant", "viewed"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if self.relevant & self.irrelevant:
            raise ValidationError("relevant and irrelevant sets overlap")
        if not self.viewed <= self.displayed:
            raise ValidationError("viewed items must all have been displayed")

    @property
    def displayed(self) -> frozenset:
        return self.relevant | self.irrelevant


def confusion_sets(sets: EvaluationSets) -> tuple[frozenset, frozenset, frozenset]:
    """``(TP, FP, FN)`` for one user."""
    tp = sets.relevant & sets.viewed
    fp = sets.irrelevant & sets.viewed
    fn = sets.relevant - sets.viewed
    return tp, fp, fn


def _size(x) -> int:
    return x if isinstance(x, (int, np.integer)) else len(x)


def precision(tp: int | AbstractSet, fp: int | AbstractSet) -> float:
    tp, fp = _size(tp), _size(fp)
    return tp / (tp + fp) if tp + fp else 0.0


def recall(tp: int | AbstractSet, fn: int | AbstractSet) -> float:
    tp, fn = _size(tp), _size(fn)
    return tp / (tp + fn) if tp + fn else 0.0


def f_measure(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


@dataclass(frozen=True)
class MetricPoint:
    model: PersonalityModel
    bucket: int
    precision: float
    recall: float
    f_measure: float
    n_users: int

    @property
    def empty(self) -> bool:
        """True when no user had enough history for this bucket."""
        return self.n_users == 0


@dataclass(frozen=True)
class HoldoutConfig:
    """How a sweep decides relevance.

    An unseen item is relevant when at least one neighbor rated it and its
    predicted score is at least the user's mean rating plus
    ``relevance_margin``. Every item outside the user's revealed history
    counts as displayed.
    """

    relevance_margin: float = 0.0
    block_size: int = 128


def _heldout(dataset: Dataset, bucket: int) -> dict[int, np.ndarray]:
    """Item columns viewed after the first ``bucket`` events, minus the revealed ones."""
    col = {int(i): k for k, i in enumerate(dataset.item_ids)}
    out = {}
    for u, evs in dataset.history.items():
        seen = {e.item for e in evs[:bucket]}
        later = sorted({col[e.item] for e in evs[bucket:] if e.item not in seen})
        out[u] = np.array(later, dtype=np.int64)
    return out


def _evaluate_block(engine, rows, cfgs, heldout_cols, margin):
    """Per-user (precision, recall, f) for each config, or None for users without held-out views.

    Set operations run on ``row * n_items + column`` keys for the whole block.
    """
    sim_r = engine.rating_block(rows)
    means = engine.target_means(rows)
    n_items = engine.community.n_items
    b = len(rows)
    train = engine.targets.matrix[rows]
    train_keys = np.repeat(np.arange(b), np.diff(train.indptr)) * n_items + train.indices
    n_viewed = np.array([len(v) for v in heldout_cols])
    viewed_keys = np.repeat(np.arange(b), n_viewed) * n_items + np.concatenate(
        [np.asarray(v, dtype=np.int64) for v in heldout_cols] + [np.zeros(0, dtype=np.int64)]
    )
    results = []
    for cfg in cfgs:
        # only items some neighbor rated can be relevant
        r_idx, c_idx, num, den = engine.score_entries(engine.select(rows, cfg, sim_r))
        supported = den > 0.0
        r_idx, c_idx, num, den = r_idx[supported], c_idx[supported], num[supported], den[supported]
        mu = means[r_idx]
        keep = mu + num / den >= mu + margin
        rel_keys = r_idx[keep] * n_items + c_idx[keep]
        rel_keys = rel_keys[~np.isin(rel_keys, train_keys, assume_unique=True)]
        n_rel = np.bincount(rel_keys // n_items, minlength=b)
        tp_keys = viewed_keys[np.isin(viewed_keys, rel_keys, assume_unique=True)]
        n_tp = np.bincount(tp_keys // n_items, minlength=b)
        per_user = []
        for j in range(b):
            if n_viewed[j] == 0:
                per_user.append(None)
                continue
            tp = int(n_tp[j])
            p = precision(tp, int(n_viewed[j]) - tp)
            r = recall(tp, int(n_rel[j]) - tp)
            per_user.append((p, r, f_measure(p, r)))
        results.append(per_user)
    return results


def run_sweep(
    dataset: Dataset,
    models: Sequence[PersonalityModel],
    buckets: Sequence[int],
    cfg: PredictorConfig,
    split: HoldoutConfig = HoldoutConfig(),
    n_jobs: Optional[int] = 1,
) -> list[MetricPoint]:
    """Precision/recall/F per model as a function of revealed history length.

    For bucket ``b`` every user in turn is served with only their first
    ``b`` views revealed, while the other users contribute their full
    history; the remaining views form the viewed set. Per-user metrics are
    macro-averaged over users with at least one held-out view. Rows come
    out in the order of ``models``, buckets ascending.
    """
    models = [PersonalityModel.parse(m) if isinstance(m, str) else m for m in models]
    buckets = [int(b) for b in buckets]
    if any(b < 0 for b in buckets):
        raise ValidationError("buckets must be non-negative")
    if any(b2 <= b1 for b1, b2 in zip(buckets, buckets[1:])):
        raise ValidationError("buckets must be strictly increasing")
    cfgs = [cfg.with_model(m) for m in models]
    community = dataset.ratings()
    n_users = len(dataset.users)
    blocks = [np.arange(s, min(s + split.block_size, n_users)) for s in range(0, n_users, split.block_size)]

    engines = {}
    heldout = {}
    for b in buckets:
        engines[b] = NeighborhoodEngine(dataset, community, dataset.ratings(limit=b))
        h = _heldout(dataset, b)
        heldout[b] = [h[int(u)] for u in dataset.user_ids]

    tasks = [(b, rows) for b in buckets for rows in blocks]

    def work(task):
        b, rows = task
        return _evaluate_block(engines[b], rows, cfgs, [heldout[b][r] for r in rows], split.relevance_margin)

    if n_jobs is None:
        n_jobs = os.cpu_count() or 1
    if n_jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            outputs = list(pool.map(work, tasks))
    else:
        outputs = [work(t) for t in tasks]

    # per (model index, bucket): per-user results in user order
    collected: dict[tuple[int, int], list] = {(m, b): [] for m in range(len(models)) for b in buckets}
    for (b, _), out in zip(tasks, outputs):
        for m, per_user in enumerate(out):
            collected[(m, b)].extend(per_user)

    points = []
    for m, model in enumerate(models):
        for b in buckets:
            rows = [x for x in collected[(m, b)] if x is not None]
            n = len(rows)
            if n == 0:
                _log.warning("bucket %d: no user has held-out views", b)
                points.append(MetricPoint(model, b, 0.0, 0.0, 0.0, 0))
                continue
            sp_ = sr = sf = 0.0
            for p, r, f in rows:
                sp_ += p
                sr += r
                sf += f
            points.append(MetricPoint(model, b, sp_ / n, sr / n, sf / n, n))
    return points


def classify_population(dataset: Dataset, model: PersonalityModel) -> dict[str, int]:
    """Users per dominant trait (trait models) or per type (MBTI).

    Every label of the model appears, with zero counts where no user falls in
    it, in canonical order.
    """
    if model is PersonalityModel.HYBRID:
        raise ValidationError("population classification needs a single personality model")
    if model is PersonalityModel.MBTI:
        labels = MBTI_TYPES
        counts = Counter()
        for u in dataset.users:
            if u.mbti is None:
                raise ValidationError(f"user {u.id} has no MBTI type")
            counts[u.mbti.code] += 1
    else:
        labels = TRAIT_NAMES[model]
        counts = Counter()
        for u in dataset.users:
            vec = getattr(u, model.value if model is not PersonalityModel.BIG5 else "big5", None)
            if vec is None:
                raise ValidationError(f"user {u.id} has no {model.value} profile")
            counts[dominant_trait(vec)] += 1
    return {label: counts.get(label, 0) for label in labels}


# -- CSV output ----------------------------------------------------------------

METRIC_COLUMNS = ("model", "bucket", "precision", "recall", "f_measure", "n_users")


def metrics_csv(points: Iterable[MetricPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRIC_COLUMNS)
    for p in points:
        w.writerow([p.model.value, p.bucket, f"{p.precision:.6f}", f"{p.recall:.6f}", f"{p.f_measure:.6f}", p.n_users])
    return buf.getvalue()


def histogram_csv(hist: dict[str, int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("label", "count"))
    w.writerows(hist.items())
    return buf.getvalue()


def write_metrics_csv(points: Iterable[MetricPoint], path: str | os.PathLike) -> Path:
    path = Path(path)
    try:
        path.write_text(metrics_csv(points), encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"{path}: {exc.strerror or exc}") from exc
    return path


def write_histogram_csv(hist: dict[str, int], path: str | os.PathLike) -> Path:
    path = Path(path)
    try:
        path.write_text(histogram_csv(hist), encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"{path}: {exc.strerror or exc}") from exc
    return path
