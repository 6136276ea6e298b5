"""Dataset schema, CSV ingestion/persistence and the synthetic generator.

Files (comma separated, header row, ``\\n`` line endings):

* ``users.csv``  -- user_id, big5_o, big5_c, big5_e, big5_a, big5_n, eys_p,
  eys_e, eys_n, hex_h, hex_e, hex_x, hex_a, hex_c, hex_o, mbti
* ``items.csv``  -- item_id, labels (semicolon joined)
* ``events.csv`` -- user_id, item_id, timestamp, rating (may be empty)

Ids are non-negative integers. Trait scores are written with six fractional
digits; the generator quantizes to the same grid so save/load is lossless.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .exceptions import DatasetError, UnknownIdError, ValidationError
from .personality import (
    MBTI_TYPES,
    PersonalityModel,
    TraitVector,
    UserProfile,
    parse_mbti,
)

_log = logging.getLogger(__name__)

USERS_FILE = "users.csv"
ITEMS_FILE = "items.csv"
EVENTS_FILE = "events.csv"

USER_COLUMNS = (
    "user_id",
    "big5_o", "big5_c", "big5_e", "big5_a", "big5_n",
    "eys_p", "eys_e", "eys_n",
    "hex_h", "hex_e", "hex_x", "hex_a", "hex_c", "hex_o",
    "mbti",
)  # fmt: skip
ITEM_COLUMNS = ("item_id", "labels")
EVENT_COLUMNS = ("user_id", "item_id", "timestamp", "rating")

MAX_RATING = 5


@dataclass(frozen=True)
class Item:
    id: int
    labels: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "labels", frozenset(self.labels))
        if not self.labels:
            raise ValidationError(f"item {self.id} has no labels")
        for label in self.labels:
            if not label or ";" in label or "," in label or label != label.strip():
                raise ValidationError(f"item {self.id}: invalid label {label!r}")


@dataclass(frozen=True)
class ViewEvent:
    user: int
    item: int
    timestamp: int
    rating: Optional[int] = None

    def __post_init__(self):
        if self.rating is not None and not 1 <= self.rating <= MAX_RATING:
            raise ValidationError(
                f"event ({self.user}, {self.item}, {self.timestamp}): rating {self.rating} outside 1..5"
            )

    def sort_key(self) -> tuple[int, int, int]:
        return (self.timestamp, self.user, self.item)


class RatingsView:
    """Sparse user x item rating matrix.

    Rows follow ``user_ids`` and columns ``item_ids`` (both ascending). Stored
    ratings are integer valued, so every sum used by the similarity kernels
    is exact in float64.
    """

    def __init__(self, user_ids: Iterable[int], item_ids: Iterable[int], matrix: sp.csr_matrix):
        self.user_ids = np.asarray(list(user_ids), dtype=np.int64)
        self.item_ids = np.asarray(list(item_ids), dtype=np.int64)
        matrix = sp.csr_matrix(matrix, dtype=np.float64)
        matrix.sum_duplicates()
        matrix.sort_indices()
        if matrix.shape != (len(self.user_ids), len(self.item_ids)):
            raise ValidationError(f"matrix shape {matrix.shape} does not match id lists")
        self.matrix = matrix
        self.user_index = {int(u): k for k, u in enumerate(self.user_ids)}
        self.item_index = {int(i): k for k, i in enumerate(self.item_ids)}

    @classmethod
    def from_dict(
        cls,
        ratings: Mapping[int, Mapping[int, float]],
        users: Iterable[int] | None = None,
        items: Iterable[int] | None = None,
    ) -> "RatingsView":
        users = sorted(set(users) if users is not None else set(ratings))
        if items is None:
            items = {i for r in ratings.values() for i in r}
        items = sorted(set(items))
        uidx = {u: k for k, u in enumerate(users)}
        iidx = {i: k for k, i in enumerate(items)}
        rows, cols, vals = [], [], []
        for u, r in ratings.items():
            for i, v in r.items():
                rows.append(uidx[u])
                cols.append(iidx[i])
                vals.append(float(v))
        m = sp.csr_matrix((vals, (rows, cols)), shape=(len(users), len(items)))
        return cls(users, items, m)

    @property
    def n_users(self) -> int:
        return len(self.user_ids)

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    def row(self, user: int) -> int:
        try:
            return self.user_index[int(user)]
        except KeyError:
            raise UnknownIdError(f"unknown user {user}") from None

    def col(self, item: int) -> int:
        try:
            return self.item_index[int(item)]
        except KeyError:
            raise UnknownIdError(f"unknown item {item}") from None

    def ratings_of(self, user: int) -> dict[int, float]:
        k = self.row(user)
        lo, hi = self.matrix.indptr[k], self.matrix.indptr[k + 1]
        cols = self.matrix.indices[lo:hi]
        return {int(self.item_ids[c]): float(v) for c, v in zip(cols, self.matrix.data[lo:hi])}

    def rating(self, user: int, item: int) -> Optional[float]:
        return self.ratings_of(user).get(int(item))

    @cached_property
    def counts(self) -> np.ndarray:
        return np.diff(self.matrix.indptr)

    @cached_property
    def sums(self) -> np.ndarray:
        # integer-valued ratings: the sum is exact whatever the reduction order
        return np.asarray(self.matrix.sum(axis=1), dtype=float).ravel()

    @cached_property
    def global_mean(self) -> float:
        n = self.matrix.nnz
        return float(self.sums.sum() / n) if n else 0.0

    @cached_property
    def means(self) -> np.ndarray:
        """Full-history mean per user; users without ratings get the global mean."""
        counts = self.counts
        out = np.full(self.n_users, self.global_mean)
        has = counts > 0
        out[has] = self.sums[has] / counts[has]
        return out

    def count(self, user: int) -> int:
        return int(self.counts[self.row(user)])

    def mean(self, user: int) -> float:
        return float(self.means[self.row(user)])


@dataclass(frozen=True)
class Dataset:
    """Users with personality profiles, labelled items and view events.

    Construction sorts users/items by id and events canonically, and checks
    referential integrity and key uniqueness.
    """

    users: tuple[UserProfile, ...]
    items: tuple[Item, ...]
    events: tuple[ViewEvent, ...] = field(default=())

    def __post_init__(self):
        users = tuple(sorted(self.users, key=lambda u: u.id))
        items = tuple(sorted(self.items, key=lambda i: i.id))
        events = tuple(sorted(self.events, key=ViewEvent.sort_key))
        for kind, ids in (("user", [u.id for u in users]), ("item", [i.id for i in items])):
            dup = [k for k, c in Counter(ids).items() if c > 1]
            if dup:
                raise DatasetError(f"duplicate {kind} id {dup[0]}")
            bad = [k for k in ids if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 0]
            if bad:
                raise DatasetError(f"{kind} id {bad[0]!r} is not a non-negative integer")
        user_set = {u.id for u in users}
        item_set = {i.id for i in items}
        seen = set()
        for e in events:
            if e.user not in user_set:
                raise DatasetError(f"event references unknown user {e.user}")
            if e.item not in item_set:
                raise DatasetError(f"event references unknown item {e.item}")
            key = (e.user, e.item, e.timestamp)
            if key in seen:
                raise DatasetError(f"duplicate event {key}")
            seen.add(key)
        object.__setattr__(self, "users", users)
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "events", events)

    @cached_property
    def user_ids(self) -> np.ndarray:
        return np.array([u.id for u in self.users], dtype=np.int64)

    @cached_property
    def item_ids(self) -> np.ndarray:
        return np.array([i.id for i in self.items], dtype=np.int64)

    @cached_property
    def _user_pos(self) -> dict[int, int]:
        return {u.id: k for k, u in enumerate(self.users)}

    def user(self, user_id: int) -> UserProfile:
        try:
            return self.users[self._user_pos[int(user_id)]]
        except KeyError:
            raise UnknownIdError(f"unknown user {user_id}") from None

    def has_user(self, user_id: int) -> bool:
        return int(user_id) in self._user_pos

    @cached_property
    def history(self) -> dict[int, tuple[ViewEvent, ...]]:
        """Each user's events in chronological order."""
        out: dict[int, list[ViewEvent]] = {u.id: [] for u in self.users}
        for e in self.events:
            out[e.user].append(e)
        return {u: tuple(evs) for u, evs in out.items()}

    def ratings(self, limit: Optional[int] = None) -> RatingsView:
        """Ratings implied by each user's events (optionally only the first ``limit``)."""
        per_user = {}
        for u, evs in self.history.items():
            per_user[u] = effective_ratings(evs if limit is None else evs[:limit])
        return RatingsView.from_dict(per_user, users=self.user_ids.tolist(), items=self.item_ids.tolist())

    def filter_min_views(self, min_views: int) -> "Dataset":
        """Drop users with fewer than ``min_views`` events (and their events)."""
        keep = {u for u, evs in self.history.items() if len(evs) >= min_views}
        return Dataset(
            tuple(u for u in self.users if u.id in keep),
            self.items,
            tuple(e for e in self.events if e.user in keep),
        )

    def trait_matrix(self, model: PersonalityModel) -> np.ndarray:
        return np.array([u.traits(model).scores for u in self.users], dtype=float)

    def mbti_codes(self) -> np.ndarray:
        return np.array([MBTI_TYPES.index(u.mbti.code) for u in self.users], dtype=np.int64)


def effective_ratings(events: Iterable[ViewEvent]) -> dict[int, int]:
    """Map item -> rating for one user's chronologically ordered events.

    The latest explicit rating of an item wins. Items that were only viewed
    get an implicit rating of ``min(5, view count)``, i.e. one plus the
    number of repeat views.
    """
    explicit: dict[int, int] = {}
    views: Counter = Counter()
    for e in events:
        views[e.item] += 1
        if e.rating is not None:
            explicit[e.item] = e.rating
    return {i: explicit.get(i, min(MAX_RATING, c)) for i, c in views.items()}


# -- persistence -------------------------------------------------------------


def _fmt_score(x: float) -> str:
    return f"{x:.6f}"


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    try:
        path.write_text(buf.getvalue(), encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"{path}: {exc.strerror or exc}") from exc


def save_dataset(ds: Dataset, directory: str | os.PathLike) -> tuple[Path, Path, Path]:
    """Write the canonical three-file form of ``ds`` into ``directory``."""
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DatasetError(f"{d}: {exc.strerror or exc}") from exc
    users = (
        [u.id, *map(_fmt_score, u.big5.scores), *map(_fmt_score, u.eysenck.scores),
         *map(_fmt_score, u.hexaco.scores), u.mbti.code]
        for u in ds.users
    )  # fmt: skip
    items = ([i.id, ";".join(sorted(i.labels))] for i in ds.items)
    events = (
        [e.user, e.item, e.timestamp, "" if e.rating is None else e.rating] for e in ds.events
    )
    paths = (d / USERS_FILE, d / ITEMS_FILE, d / EVENTS_FILE)
    _write_csv(paths[0], USER_COLUMNS, users)
    _write_csv(paths[1], ITEM_COLUMNS, items)
    _write_csv(paths[2], EVENT_COLUMNS, events)
    return paths


def _read_rows(path: Path, columns: tuple[str, ...]):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"{path}: {exc.strerror or exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError(f"{path}: missing header row") from None
    except csv.Error as exc:
        raise DatasetError(f"{path}:1: {exc}") from exc
    if tuple(h.strip() for h in header) != columns:
        raise DatasetError(f"{path}:1: expected columns {','.join(columns)}")
    while True:
        try:
            row = next(reader)
        except StopIteration:
            return
        except csv.Error as exc:
            raise DatasetError(f"{path}:{reader.line_num}: {exc}") from exc
        if not row:
            continue
        if len(row) != len(columns):
            raise DatasetError(
                f"{path}:{reader.line_num}: expected {len(columns)} fields, got {len(row)}"
            )
        yield reader.line_num, row


def _parse_id(text: str) -> int:
    value = int(text)
    if value < 0:
        raise ValueError(f"negative id {value}")
    return value


def load_dataset(
    users_path: str | os.PathLike,
    items_path: str | os.PathLike,
    events_path: str | os.PathLike,
    min_views: int = 0,
) -> Dataset:
    """Read and validate a dataset; see the module docstring for the format."""
    users = []
    for line, row in _read_rows(Path(users_path), USER_COLUMNS):
        try:
            vals = [float(x) for x in row[1:15]]
            if not all(math.isfinite(v) for v in vals):
                raise ValueError("non-finite trait score")
            users.append(
                UserProfile(
                    id=_parse_id(row[0]),
                    big5=TraitVector(PersonalityModel.BIG5, vals[0:5]),
                    eysenck=TraitVector(PersonalityModel.EYSENCK, vals[5:8]),
                    hexaco=TraitVector(PersonalityModel.HEXACO, vals[8:14]),
                    mbti=parse_mbti(row[15]),
                )
            )
        except ValueError as exc:
            raise DatasetError(f"{users_path}:{line}: {exc}") from exc
    items = []
    for line, row in _read_rows(Path(items_path), ITEM_COLUMNS):
        try:
            items.append(Item(_parse_id(row[0]), frozenset(row[1].split(";"))))
        except ValueError as exc:
            raise DatasetError(f"{items_path}:{line}: {exc}") from exc
    events = []
    for line, row in _read_rows(Path(events_path), EVENT_COLUMNS):
        try:
            rating = int(row[3]) if row[3].strip() else None
            events.append(ViewEvent(_parse_id(row[0]), _parse_id(row[1]), int(row[2]), rating))
        except ValueError as exc:
            raise DatasetError(f"{events_path}:{line}: {exc}") from exc
    ds = Dataset(tuple(users), tuple(items), tuple(events))
    if min_views > 0:
        ds = ds.filter_min_views(min_views)
    return ds


def load_dataset_dir(directory: str | os.PathLike, min_views: int = 0) -> Dataset:
    d = Path(directory)
    return load_dataset(d / USERS_FILE, d / ITEMS_FILE, d / EVENTS_FILE, min_views=min_views)


# -- synthetic data ----------------------------------------------------------


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 200
    n_items: int = 1000
    n_labels: int = 20
    views_per_user: int = 100
    affinity_strength: float = 4.0
    seed: int = 0
    max_labels_per_item: int = 3
    start_time: int = 1_577_836_800  # 2020-01-01T00:00:00Z

    def __post_init__(self):
        for name in ("n_users", "n_items", "n_labels", "views_per_user", "max_labels_per_item"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")
        if not math.isfinite(self.affinity_strength) or self.affinity_strength < 0:
            raise ValidationError(f"affinity_strength must be >= 0, got {self.affinity_strength!r}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")


def derive_profile(user_id: int, hexaco: Iterable[float]) -> UserProfile:
    """Build every personality representation from a master HEXACO vector.

    Big-Five drops Honesty-Humility (Emotionality stands in for Neuroticism),
    Eysenck uses P = 1 - (A + C) / 2, E = Extraversion, N = Emotionality, and
    the MBTI letters threshold Extraversion, Openness, Agreeableness and
    Conscientiousness at 0.5.
    """
    h, em, x, a, c, o = (round(float(v), 6) for v in hexaco)
    psych = round(1.0 - (a + c) / 2.0, 6)
    mbti = ("E" if x > 0.5 else "I") + ("N" if o > 0.5 else "S")
    mbti += ("F" if a > 0.5 else "T") + ("J" if c > 0.5 else "P")
    return UserProfile(
        id=user_id,
        big5=TraitVector(PersonalityModel.BIG5, (o, c, x, a, em)),
        eysenck=TraitVector(PersonalityModel.EYSENCK, (psych, x, em)),
        hexaco=TraitVector(PersonalityModel.HEXACO, (h, em, x, a, c, o)),
        mbti=parse_mbti(mbti),
    )


def generate_synthetic(cfg: SynthConfig) -> Dataset:
    """Seeded synthetic dataset with personality-dependent viewing behaviour.

    Randomness comes from a single ``numpy.random.Generator`` backed by PCG64
    and seeded with ``cfg.seed``; the draws happen in a fixed order so a
    given config always yields the same dataset.

    Each label gets a random unit direction in HEXACO space and an item's
    affinity is the normalized sum of its labels' directions. A user's
    alignment with an item is ``(2 * hexaco - 1) . affinity``; views are
    sampled without replacement with weights ``expit(strength * alignment)``
    and ratings are centred on ``3 + 1.5 * tanh(strength * alignment)``.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    master = np.round(rng.random((cfg.n_users, 6)), 6)
    users = tuple(derive_profile(u, master[u]) for u in range(cfg.n_users))

    directions = rng.standard_normal((cfg.n_labels, 6))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    label_names = [f"topic{k:02d}" for k in range(cfg.n_labels)]
    max_labels = min(cfg.max_labels_per_item, cfg.n_labels)
    items = []
    affinity = np.empty((cfg.n_items, 6))
    for i in range(cfg.n_items):
        k = int(rng.integers(1, max_labels + 1))
        labels = np.sort(rng.choice(cfg.n_labels, size=k, replace=False))
        v = directions[labels].sum(axis=0)
        norm = np.linalg.norm(v)
        affinity[i] = v / norm if norm > 0 else directions[labels[0]]
        items.append(Item(i, frozenset(label_names[j] for j in labels)))

    events = []
    centred = 2.0 * master - 1.0
    for u in range(cfg.n_users):
        align = affinity @ centred[u]
        weights = expit(cfg.affinity_strength * align)
        n_views = min(int(rng.poisson(cfg.views_per_user)), cfg.n_items)
        chosen = rng.choice(cfg.n_items, size=n_views, replace=False, p=weights / weights.sum())
        gaps = rng.integers(60, 86_400, size=n_views)
        start = cfg.start_time + int(rng.integers(0, 7 * 86_400))
        stamps = start + np.cumsum(gaps)
        noise = rng.normal(0.0, 0.8, size=n_views)
        means = 3.0 + 1.5 * np.tanh(cfg.affinity_strength * align[chosen])
        ratings = np.clip(np.rint(means + noise), 1, MAX_RATING).astype(int)
        events.extend(
            ViewEvent(u, int(i), int(t), int(r)) for t, i, r in zip(stamps, chosen, ratings)
        )
    _log.debug("generated %d users, %d items, %d events", cfg.n_users, cfg.n_items, len(events))
    return Dataset(users, tuple(items), tuple(events))
