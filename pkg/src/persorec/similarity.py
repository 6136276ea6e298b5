"""Rating, personality and blended user-user similarity.

Every kernel has a scalar form (one pair of users) and a batched form (a
block of target users against the whole community). The batched forms use
the same floating-point operations in the same order as the scalar ones, so
both paths return bit-identical values:

* rating similarity is evaluated from the co-rated sums ``n, Σx, Σy, Σx²,
  Σy², Σxy``. Ratings are integers, so those sums are exact whatever the
  reduction order, and the final ratio involves only correctly rounded
  operations.
* personality similarity accumulates over trait dimensions in canonical
  order with explicit loops.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import IncompatibleModelError, UnsupportedModelError, ValidationError
from .personality import TraitVector

# Marker returned by rating similarity when fewer than two items are co-rated.
NO_OVERLAP = None


class Combiner(enum.Enum):
    WEIGHTED_SUM = "weighted_sum"
    PRODUCT = "product"

    @classmethod
    def parse(cls, name: str) -> "Combiner":
        try:
            return cls(name.strip().lower().replace("-", "_"))
        except ValueError:
            raise ValidationError(f"unknown combiner {name!r} (expected weighted_sum or product)") from None


@dataclass(frozen=True)
class BlendConfig:
    """Cold-start blending of personality and rating similarity.

    ``alpha0`` is the personality weight of a user with no ratings; it decays
    linearly to zero once the user has rated ``decay_count`` items.
    """

    alpha0: float = 1.0
    decay_count: int = 200
    combiner: Combiner = Combiner.WEIGHTED_SUM

    def __post_init__(self):
        if not 0.0 <= self.alpha0 <= 1.0:
            raise ValidationError(f"alpha0 must lie in [0, 1], got {self.alpha0!r}")
        if isinstance(self.decay_count, bool) or not isinstance(self.decay_count, int) or self.decay_count < 1:
            raise ValidationError(f"decay_count must be a positive integer, got {self.decay_count!r}")
        if not isinstance(self.combiner, Combiner):
            raise ValidationError(f"combiner must be a Combiner, got {self.combiner!r}")


def pearson_from_sums(n, sx, sy, sxx, syy, sxy) -> float:
    num = n * sxy - sx * sy
    dx = n * sxx - sx * sx
    dy = n * syy - sy * sy
    if dx <= 0.0 or dy <= 0.0:
        return 0.0
    return min(1.0, max(-1.0, num / math.sqrt(dx * dy)))


def rating_pearson(rx: Mapping[int, float], ry: Mapping[int, float]) -> Optional[float]:
    """Pearson correlation over the items both users rated.

    Means are taken over the co-rated items only. Returns ``NO_OVERLAP``
    with fewer than two co-rated items and 0.0 when either side is constant.
    """
    common = sorted(rx.keys() & ry.keys())
    if len(common) < 2:
        return NO_OVERLAP
    # exact constancy test; the sums formula can leave rounding residue for non-integer input
    if len({rx[i] for i in common}) == 1 or len({ry[i] for i in common}) == 1:
        return 0.0
    sx = sy = sxx = syy = sxy = 0.0
    for i in common:
        x = float(rx[i])
        y = float(ry[i])
        sx += x
        sy += y
        sxx += x * x
        syy += y * y
        sxy += x * y
    return pearson_from_sums(float(len(common)), sx, sy, sxx, syy, sxy)


def sim_rating(ux: int, uy: int, ratings) -> Optional[float]:
    """Rating similarity of two users in a :class:`~persorec.data.RatingsView`."""
    return rating_pearson(ratings.ratings_of(ux), ratings.ratings_of(uy))


def _trait_pearson(x: Sequence[float], y: Sequence[float]) -> float:
    if max(x) == min(x) or max(y) == min(y):
        return 0.0
    d = len(x)
    mx = my = 0.0
    for k in range(d):
        mx += x[k]
        my += y[k]
    mx /= d
    my /= d
    sxx = syy = sxy = 0.0
    for k in range(d):
        zx = x[k] - mx
        zy = y[k] - my
        sxy += zx * zy
        sxx += zx * zx
        syy += zy * zy
    return min(1.0, max(-1.0, sxy / math.sqrt(sxx * syy)))


def sim_personality(px: TraitVector, py: TraitVector) -> float:
    """Pearson correlation across the trait dimensions of two users."""
    if not isinstance(px, TraitVector) or not isinstance(py, TraitVector):
        raise UnsupportedModelError("personality similarity is only defined for trait vectors")
    if px.model is not py.model:
        raise IncompatibleModelError(f"cannot compare {px.model.value} with {py.model.value}")
    return _trait_pearson(px.scores, py.scores)


def alpha_for(n_rated: int, cfg: BlendConfig) -> float:
    """Personality weight for a user who has rated ``n_rated`` items."""
    return cfg.alpha0 * max(0.0, 1.0 - n_rated / cfg.decay_count)


def sim_combined(sim_p: float, sim_r: Optional[float], alpha: float, combiner: Combiner = Combiner.WEIGHTED_SUM) -> float:
    if sim_r is NO_OVERLAP:
        sim_r = 0.0
    if combiner is Combiner.PRODUCT:
        return sim_p * sim_r
    return alpha * sim_p + (1 - alpha) * sim_r


# -- batched kernels -----------------------------------------------------------


def alpha_array(n_rated: np.ndarray, cfg: BlendConfig) -> np.ndarray:
    return cfg.alpha0 * np.maximum(0.0, 1.0 - np.asarray(n_rated) / cfg.decay_count)


def combine_array(sim_p: np.ndarray, sim_r: np.ndarray, alpha: np.ndarray, combiner: Combiner) -> np.ndarray:
    """Row-wise :func:`sim_combined`; ``alpha`` has one entry per row, NaN in ``sim_r`` means no overlap."""
    sim_r = np.where(np.isnan(sim_r), 0.0, sim_r)
    if combiner is Combiner.PRODUCT:
        return sim_p * sim_r
    a = np.asarray(alpha, dtype=float)[:, None]
    return a * sim_p + (1 - a) * sim_r


def personality_similarity_block(targets: np.ndarray, community: np.ndarray) -> np.ndarray:
    """Trait Pearson between each target row and each community row."""
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    community = np.atleast_2d(np.asarray(community, dtype=float))
    d = targets.shape[1]

    def centred(p):
        m = np.zeros(len(p))
        for k in range(d):
            m += p[:, k]
        m /= d
        z = p - m[:, None]
        ss = np.zeros(len(p))
        for k in range(d):
            ss += z[:, k] * z[:, k]
        const = p.max(axis=1) == p.min(axis=1)
        return z, ss, const

    zt, st, ct = centred(targets)
    zc, sc, cc = centred(community)
    sxy = np.zeros((len(targets), len(community)))
    for k in range(d):
        sxy += zt[:, k, None] * zc[None, :, k]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = sxy / np.sqrt(st[:, None] * sc[None, :])
    r = np.clip(r, -1.0, 1.0)
    r[ct, :] = 0.0
    r[:, cc] = 0.0
    return r


def rating_similarity_block(targets: sp.csr_matrix, community: sp.csr_matrix) -> tuple[np.ndarray, np.ndarray]:
    """Co-rated Pearson between target rows and community rows.

    Returns ``(sim, overlap)``; ``sim`` is NaN where fewer than two items are
    co-rated.
    """
    t = sp.csr_matrix(targets, dtype=np.float64)
    c = sp.csr_matrix(community, dtype=np.float64)
    mt = t.copy()
    mt.data[:] = 1.0
    mc = c.copy()
    mc.data[:] = 1.0
    ct = c.T.tocsc()
    mct = mc.T.tocsc()

    def dense(a):
        return a.toarray() if sp.issparse(a) else np.asarray(a)

    n = dense(mt @ mct)
    sx = dense(t @ mct)
    sy = dense(mt @ ct)
    sxx = dense(t.multiply(t).tocsr() @ mct)
    syy = dense(mt @ c.multiply(c).T.tocsc())
    sxy = dense(t @ ct)

    num = n * sxy - sx * sy
    dx = n * sxx - sx * sx
    dy = n * syy - sy * sy
    ok = (dx > 0.0) & (dy > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(ok, num / np.sqrt(np.where(ok, dx * dy, 1.0)), 0.0)
    r = np.clip(r, -1.0, 1.0)
    r[n < 2] = np.nan
    return r, n.astype(np.int64)
