"""Neighborhood construction, rating prediction and top-N recommendation.

Neighbor weights per model:

* trait models (BIG5, EYSENCK, HEXACO): the blended similarity of the model's
  trait Pearson and the rating Pearson; candidates must exceed
  ``neighbor_threshold``.
* MBTI: candidates are the users sharing the target's type; the weight
  blends type agreement (1 for the same type) with the rating Pearson.
* HYBRID: candidates follow the hybrid rule (personality threshold OR same
  type while cold, blended-similarity threshold AND same type once warm);
  the weight is the blended similarity of ``hybrid_trait_model``.

Candidates are ranked by weight (descending, ties by ascending user id) and
the first ``max_neighbors`` are kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .data import Dataset, RatingsView
from .exceptions import UnknownIdError, UnsupportedModelError, ValidationError
from .personality import PersonalityModel
from .similarity import (
    BlendConfig,
    alpha_array,
    combine_array,
    personality_similarity_block,
    rating_similarity_block,
)


@dataclass(frozen=True)
class HybridConfig:
    """Thresholds of the hybrid trait + type neighbor rule."""

    lambda_: float = 0.0
    delta: float = 0.0
    coldstart_view_count: int = 5

    def __post_init__(self):
        if not math.isfinite(self.lambda_) or not -1.0 <= self.lambda_ <= 1.0:
            raise ValidationError(f"lambda must lie in [-1, 1], got {self.lambda_!r}")
        if not math.isfinite(self.delta):
            raise ValidationError(f"delta must be finite, got {self.delta!r}")
        if isinstance(self.coldstart_view_count, bool) or not isinstance(self.coldstart_view_count, int) or self.coldstart_view_count < 1:
            raise ValidationError(f"coldstart_view_count must be a positive integer, got {self.coldstart_view_count!r}")


@dataclass(frozen=True)
class PredictorConfig:
    """Neighbor selection and scoring settings.

    ``neighbor_threshold`` applies to the trait-model baselines and
    ``max_neighbors`` caps every neighborhood; both are additions to the
    original neighbor rule, which has no bound. ``hybrid_trait_model`` picks
    the trait vectors behind the hybrid's personality similarity.
    """

    model: PersonalityModel = PersonalityModel.HYBRID
    blend: BlendConfig = field(default_factory=BlendConfig)
    hybrid: HybridConfig = field(default_factory=HybridConfig)
    neighbor_threshold: float = 0.0
    max_neighbors: int = 10
    hybrid_trait_model: PersonalityModel = PersonalityModel.BIG5

    def __post_init__(self):
        if not isinstance(self.model, PersonalityModel):
            raise ValidationError(f"model must be a PersonalityModel, got {self.model!r}")
        if not self.hybrid_trait_model.is_trait_model:
            raise UnsupportedModelError("the hybrid model needs a trait model for personality similarity")
        if not math.isfinite(self.neighbor_threshold):
            raise ValidationError(f"neighbor_threshold must be finite, got {self.neighbor_threshold!r}")
        if isinstance(self.max_neighbors, bool) or not isinstance(self.max_neighbors, int) or self.max_neighbors < 1:
            raise ValidationError(f"max_neighbors must be a positive integer, got {self.max_neighbors!r}")

    def with_model(self, model: PersonalityModel) -> "PredictorConfig":
        return replace(self, model=model)


@dataclass(frozen=True)
class Neighborhood:
    """Neighbors of ``user`` as ``(user id, weight)`` pairs in rank order."""

    user: int
    neighbors: tuple[tuple[int, float], ...]

    def __post_init__(self):
        ids = [v for v, _ in self.neighbors]
        if self.user in ids:
            raise ValidationError(f"user {self.user} cannot be its own neighbor")
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate neighbor in neighborhood of {self.user}")

    @property
    def ids(self) -> list[int]:
        return [v for v, _ in self.neighbors]

    def __len__(self):
        return len(self.neighbors)


def is_cold_start(user: int, ratings: RatingsView, cfg: HybridConfig) -> bool:
    return ratings.count(user) < cfg.coldstart_view_count


class NeighborhoodEngine:
    """Batched neighbor selection and scoring over one dataset.

    ``community`` holds the ratings neighbors contribute; ``targets`` holds the
    ratings of the users being served (defaults to ``community``). Keeping
    them apart lets an evaluation reveal only part of a target's history
    while neighbors keep theirs.
    """

    def __init__(
        self,
        dataset: Dataset,
        community: Optional[RatingsView] = None,
        targets: Optional[RatingsView] = None,
    ):
        self.dataset = dataset
        self.community = community if community is not None else dataset.ratings()
        self.targets = targets if targets is not None else self.community
        for view in (self.community, self.targets):
            if not np.array_equal(view.user_ids, dataset.user_ids):
                raise ValidationError("ratings view users do not match the dataset")
        self._traits: dict[PersonalityModel, np.ndarray] = {}
        self._mbti = dataset.mbti_codes()
        c = self.community.matrix
        self._centred = c.data - np.repeat(self.community.means, np.diff(c.indptr))
        # targets without revealed ratings fall back to the community's global mean
        self._target_means = np.where(self.targets.counts > 0, self.targets.means, self.community.global_mean)

    @property
    def n_users(self) -> int:
        return len(self.dataset.users)

    def traits(self, model: PersonalityModel) -> np.ndarray:
        if model not in self._traits:
            self._traits[model] = self.dataset.trait_matrix(model)
        return self._traits[model]

    def row(self, user: int) -> int:
        return self.community.row(user)

    def rating_block(self, rows: np.ndarray) -> np.ndarray:
        sim, _ = rating_similarity_block(self.targets.matrix[rows], self.community.matrix)
        return sim

    def candidates(self, rows: np.ndarray, cfg: PredictorConfig, sim_r: Optional[np.ndarray] = None):
        """Weights and eligibility masks (``len(rows) x n_users``) before truncation."""
        rows = np.asarray(rows, dtype=np.int64)
        if sim_r is None:
            sim_r = self.rating_block(rows)
        alpha = alpha_array(self.targets.counts[rows], cfg.blend)
        combiner = cfg.blend.combiner
        model = cfg.model
        same_type = self._mbti[rows, None] == self._mbti[None, :]
        if model is PersonalityModel.MBTI:
            weights = combine_array(same_type.astype(float), sim_r, alpha, combiner)
            eligible = same_type.copy()
        else:
            trait_model = cfg.hybrid_trait_model if model is PersonalityModel.HYBRID else model
            traits = self.traits(trait_model)
            sim_p = personality_similarity_block(traits[rows], traits)
            weights = combine_array(sim_p, sim_r, alpha, combiner)
            if model is PersonalityModel.HYBRID:
                cold = (self.targets.counts[rows] < cfg.hybrid.coldstart_view_count)[:, None]
                eligible = np.where(
                    cold,
                    (sim_p > cfg.hybrid.lambda_) | same_type,
                    (weights > cfg.hybrid.delta) & same_type,
                )
            else:
                eligible = weights > cfg.neighbor_threshold
        eligible[np.arange(len(rows)), rows] = False
        return weights, eligible

    def select(self, rows: np.ndarray, cfg: PredictorConfig, sim_r: Optional[np.ndarray] = None):
        """Truncated neighbor lists: one ``(columns, weights)`` pair per row, in rank order."""
        weights, eligible = self.candidates(rows, cfg, sim_r)
        keyed = np.where(eligible, -weights, np.inf)
        k = cfg.max_neighbors
        take = np.minimum(eligible.sum(axis=1), k)
        if k < keyed.shape[1]:
            # everything ranked within the first k has a key <= the k-th smallest
            cutoff = np.partition(keyed, k - 1, axis=1)[:, k - 1]
        else:
            cutoff = np.full(len(keyed), np.inf)
        out = []
        for j in range(len(keyed)):
            cols = np.flatnonzero(keyed[j] <= cutoff[j])
            cols = cols[np.argsort(keyed[j, cols], kind="stable")][: take[j]]
            out.append((cols, weights[j, cols]))
        return out

    def score_entries(self, selections) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Sparse prediction pieces ``(row, item column, numerator, denominator)``.

        Only (row, item) pairs rated by at least one neighbor appear, sorted
        by row then column; ``row`` indexes into ``selections``.
        Contributions are accumulated per item in neighbor rank order, as
        :func:`predict_score` does.
        """
        n_items = self.community.n_items
        c = self.community.matrix
        counts = np.diff(c.indptr)
        sizes = [len(cols) for cols, _ in selections]
        if sum(sizes) == 0:
            empty_i = np.zeros(0, dtype=np.int64)
            return empty_i, empty_i.copy(), np.zeros(0), np.zeros(0)
        tgt = np.repeat(np.arange(len(selections), dtype=np.int64), sizes)
        nbr = np.concatenate([cols for cols, _ in selections]).astype(np.int64)
        w = np.concatenate([weights for _, weights in selections])
        lengths = counts[nbr]
        starts = c.indptr[nbr]
        total = int(lengths.sum())
        # positions into c.data for every (target, neighbor, item) triple
        offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths) + np.arange(total)
        wt = np.repeat(w, lengths)
        keys = np.repeat(tgt, lengths) * n_items + c.indices[offsets]
        uniq, inverse = np.unique(keys, return_inverse=True)
        num = np.bincount(inverse, weights=wt * self._centred[offsets], minlength=len(uniq))
        den = np.bincount(inverse, weights=np.abs(wt), minlength=len(uniq))
        return uniq // n_items, uniq % n_items, num, den

    def score_block(self, rows: np.ndarray, selections) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Dense prediction pieces for every item: ``(numerator, denominator, target means)``.

        The prediction is ``mean + num / den`` where ``den > 0`` and ``mean``
        otherwise.
        """
        rows = np.asarray(rows, dtype=np.int64)
        shape = (len(rows), self.community.n_items)
        num, den = np.zeros(shape), np.zeros(shape)
        r, col, n, d = self.score_entries(selections)
        num[r, col] = n
        den[r, col] = d
        return num, den, self._target_means[rows]

    def target_means(self, rows: np.ndarray) -> np.ndarray:
        return self._target_means[np.asarray(rows, dtype=np.int64)]

    def neighborhood(self, user: int, cfg: PredictorConfig) -> Neighborhood:
        row = self.row(user)
        cols, weights = self.select(np.array([row]), cfg)[0]
        ids = self.dataset.user_ids
        return Neighborhood(int(user), tuple((int(ids[c]), float(x)) for c, x in zip(cols, weights)))


def _engine(dataset: Dataset, ratings: Optional[RatingsView]) -> NeighborhoodEngine:
    return NeighborhoodEngine(dataset, ratings)


def build_neighborhood_baseline(
    user: int,
    model: PersonalityModel,
    dataset: Dataset,
    cfg: PredictorConfig,
    ratings: Optional[RatingsView] = None,
) -> Neighborhood:
    """Neighbors of ``user`` under a single personality model (trait or MBTI)."""
    if model is PersonalityModel.HYBRID:
        raise UnsupportedModelError("use build_neighborhood_hybrid for the hybrid model")
    dataset.user(user)
    return _engine(dataset, ratings).neighborhood(user, cfg.with_model(model))


def build_neighborhood_hybrid(
    user: int,
    dataset: Dataset,
    cfg: PredictorConfig,
    ratings: Optional[RatingsView] = None,
) -> Neighborhood:
    """Neighbors of ``user`` under the hybrid trait + type rule."""
    dataset.user(user)
    return _engine(dataset, ratings).neighborhood(user, cfg.with_model(PersonalityModel.HYBRID))


def build_neighborhood(user: int, dataset: Dataset, cfg: PredictorConfig, ratings: Optional[RatingsView] = None) -> Neighborhood:
    if cfg.model is PersonalityModel.HYBRID:
        return build_neighborhood_hybrid(user, dataset, cfg, ratings)
    return build_neighborhood_baseline(user, cfg.model, dataset, cfg, ratings)


def predict_score(
    user: int,
    item: int,
    nbhd: Neighborhood,
    ratings: RatingsView,
    target_ratings: Optional[RatingsView] = None,
) -> float:
    """Resnick-style prediction of ``user``'s rating for ``item``.

    ``mean_u + Σ w·(r_vi - mean_v) / Σ|w|`` over the neighbors that rated the
    item, falling back to ``mean_u`` when none did (or all weights are 0).
    Means are full-history means; a user without ratings gets the global
    mean of ``ratings``. ``target_ratings`` optionally supplies the target's
    own history.
    """
    own = target_ratings if target_ratings is not None else ratings
    mean_u = own.mean(user) if own.count(user) > 0 else ratings.global_mean
    col = ratings.col(item)
    m = ratings.matrix
    num = 0.0
    den = 0.0
    for v, w in nbhd.neighbors:
        k = ratings.row(v)
        lo, hi = m.indptr[k], m.indptr[k + 1]
        pos = lo + np.searchsorted(m.indices[lo:hi], col)
        if pos < hi and m.indices[pos] == col:
            num += w * (m.data[pos] - ratings.means[k])
            den += abs(w)
    if den > 0.0:
        return mean_u + num / den
    return mean_u


def recommend_top_n(
    user: int,
    n: int,
    dataset: Dataset,
    cfg: PredictorConfig,
    ratings: Optional[RatingsView] = None,
) -> list[tuple[int, float]]:
    """Best ``n`` unseen items for ``user`` as ``(item id, score)`` pairs.

    Items are ranked by predicted score, ties by ascending item id.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise ValidationError(f"n must be a non-negative integer, got {n!r}")
    dataset.user(user)
    engine = _engine(dataset, ratings)
    row = engine.row(user)
    rows = np.array([row])
    num, den, means = engine.score_block(rows, engine.select(rows, cfg))
    num, den, mean_u = num[0], den[0], means[0]
    supported = den > 0.0
    scores = np.full(len(num), mean_u)
    scores[supported] = mean_u + num[supported] / den[supported]
    m = engine.targets.matrix
    seen = m.indices[m.indptr[row] : m.indptr[row + 1]]
    unseen = np.setdiff1d(np.arange(len(scores)), seen, assume_unique=True)
    order = unseen[np.argsort(-scores[unseen], kind="stable")][:n]
    items = engine.community.item_ids
    return [(int(items[i]), float(scores[i])) for i in order]
