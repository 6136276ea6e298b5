"""Personality representations: trait models, MBTI types and BFI-10 scoring."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import MbtiParseError, UnsupportedModelError, ValidationError


class PersonalityModel(enum.Enum):
    BIG5 = "big5"
    EYSENCK = "eysenck"
    HEXACO = "hexaco"
    MBTI = "mbti"
    HYBRID = "hybrid"

    @classmethod
    def parse(cls, name: str) -> "PersonalityModel":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValidationError(f"unknown personality model {name!r} (expected one of {valid})") from None

    @property
    def is_trait_model(self) -> bool:
        return self in TRAIT_NAMES

    @property
    def dimensions(self) -> tuple[str, ...]:
        if self not in TRAIT_NAMES:
            raise UnsupportedModelError(f"{self.value} has no trait dimensions")
        return TRAIT_NAMES[self]


# Canonical dimension order per trait model. Tie-breaking in dominant_trait
# and the column order of the users file both follow these tuples.
TRAIT_NAMES: dict[PersonalityModel, tuple[str, ...]] = {
    PersonalityModel.BIG5: (
        "Openness",
        "Conscientiousness",
        "Extraversion",
        "Agreeableness",
        "Neuroticism",
    ),
    PersonalityModel.EYSENCK: ("Psychoticism", "Extraversion", "Neuroticism"),
    PersonalityModel.HEXACO: (
        "Honesty-Humility",
        "Emotionality",
        "Extraversion",
        "Agreeableness",
        "Conscientiousness",
        "Openness",
    ),
}

TRAIT_MODELS = tuple(TRAIT_NAMES)


@dataclass(frozen=True)
class TraitVector:
    """Normalized trait intensities in [0, 1], ordered per ``TRAIT_NAMES``."""

    model: PersonalityModel
    scores: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.model, PersonalityModel) or not self.model.is_trait_model:
            raise UnsupportedModelError(f"TraitVector requires a trait model, got {self.model!r}")
        scores = tuple(float(s) for s in self.scores)
        dims = len(TRAIT_NAMES[self.model])
        if len(scores) != dims:
            raise ValidationError(
                f"{self.model.value} expects {dims} scores, got {len(scores)}"
            )
        for name, s in zip(TRAIT_NAMES[self.model], scores):
            if not 0.0 <= s <= 1.0:
                raise ValidationError(f"{name} score {s!r} outside [0, 1]")
        object.__setattr__(self, "scores", scores)

    def __len__(self):
        return len(self.scores)

    def __getitem__(self, name: str) -> float:
        return self.scores[TRAIT_NAMES[self.model].index(name)]

    def as_array(self) -> np.ndarray:
        return np.array(self.scores, dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(TRAIT_NAMES[self.model], self.scores))


_MBTI_AXES = (("E", "I"), ("S", "N"), ("T", "F"), ("J", "P"))


@dataclass(frozen=True, order=True)
class MbtiType:
    """One of the 16 four-letter Myers-Briggs types."""

    attitude: str
    perceiving: str
    judging: str
    lifestyle: str

    def __post_init__(self):
        letters = (self.attitude, self.perceiving, self.judging, self.lifestyle)
        for pos, (letter, allowed) in enumerate(zip(letters, _MBTI_AXES), start=1):
            if letter not in allowed:
                raise MbtiParseError("".join(map(str, letters)), pos, allowed)

    @property
    def code(self) -> str:
        return self.attitude + self.perceiving + self.judging + self.lifestyle

    def __str__(self):
        return self.code


MBTI_TYPES: tuple[str, ...] = tuple(
    "".join(letters) for letters in itertools.product(*_MBTI_AXES)
)


def parse_mbti(text: str) -> MbtiType:
    """Parse a four-letter type such as ``"intj"`` (case-insensitive)."""
    if not isinstance(text, str):
        raise ValidationError(f"MBTI type must be a string, got {type(text).__name__}")
    code = text.strip().upper()
    if len(code) != 4:
        raise ValidationError(f"invalid MBTI type {text!r}: expected 4 letters, got {len(code)}")
    for pos, (letter, allowed) in enumerate(zip(code, _MBTI_AXES), start=1):
        if letter not in allowed:
            raise MbtiParseError(text, pos, allowed)
    return MbtiType(*code)


# BFI-10 key: trait -> (positively keyed item, reverse keyed item), 1-based.
BFI10_KEY: dict[str, tuple[int, int]] = {
    "Extraversion": (1, 5),
    "Neuroticism": (2, 10),
    "Conscientiousness": (9, 3),
    "Openness": (4, 7),
    "Agreeableness": (6, 8),
}

BFI10_ITEMS = (
    "I am outgoing, sociable",
    "I get nervous easily",
    "I tend to be lazy",
    "I have an active imagination",
    "I am reserved",
    "I am generally trusting",
    "I have few artistic interests",
    "I tend to find fault with others",
    "I do a thorough job",
    "I am relaxed, handle stress well",
)


def _validate_bfi10(answers: Sequence[int]) -> tuple[int, ...]:
    answers = tuple(answers)
    if len(answers) != 10:
        raise ValidationError(f"BFI-10 needs exactly 10 answers, got {len(answers)}")
    for n, a in enumerate(answers, start=1):
        if isinstance(a, bool) or not isinstance(a, (int, np.integer)) or not 1 <= a <= 5:
            raise ValidationError(f"BFI-10 item {n}: answer {a!r} is not a Likert value in 1..5")
    return tuple(int(a) for a in answers)


def score_bfi10(answers: Sequence[int]) -> TraitVector:
    """Score a BFI-10 questionnaire on a 1-5 Likert scale.

    Each trait is the mean of its positively keyed item and its reverse
    keyed item (``6 - x``), rescaled from [1, 5] to [0, 1].
    """
    answers = _validate_bfi10(answers)
    scores = {}
    for trait, (pos, rev) in BFI10_KEY.items():
        mean = (answers[pos - 1] + (6 - answers[rev - 1])) / 2
        scores[trait] = (mean - 1) / 4
    big5 = TRAIT_NAMES[PersonalityModel.BIG5]
    return TraitVector(PersonalityModel.BIG5, tuple(scores[t] for t in big5))


def dominant_trait(p: TraitVector) -> str:
    """Label of the highest-scoring dimension; ties go to the earliest dimension."""
    names = TRAIT_NAMES[p.model]
    best = 0
    for k in range(1, len(p.scores)):
        if p.scores[k] > p.scores[best]:
            best = k
    return names[best]


@dataclass(frozen=True)
class UserProfile:
    """Personality information of one user under every supported model."""

    id: int
    big5: TraitVector
    eysenck: TraitVector
    hexaco: TraitVector
    mbti: MbtiType

    def __post_init__(self):
        for attr, model in (
            ("big5", PersonalityModel.BIG5),
            ("eysenck", PersonalityModel.EYSENCK),
            ("hexaco", PersonalityModel.HEXACO),
        ):
            vec = getattr(self, attr)
            if not isinstance(vec, TraitVector) or vec.model is not model:
                raise ValidationError(f"user {self.id}: {attr} must be a {model.value} TraitVector")
        if not isinstance(self.mbti, MbtiType):
            raise ValidationError(f"user {self.id}: mbti must be an MbtiType")

    def traits(self, model: PersonalityModel) -> TraitVector:
        if model is PersonalityModel.BIG5:
            return self.big5
        if model is PersonalityModel.EYSENCK:
            return self.eysenck
        if model is PersonalityModel.HEXACO:
            return self.hexaco
        raise UnsupportedModelError(f"{model.value} is not a trait model")
