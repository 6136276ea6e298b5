import csv
import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from persorec import (
    MBTI_TYPES,
    TRAIT_NAMES,
    Dataset,
    EvaluationSets,
    HoldoutConfig,
    Item,
    MetricPoint,
    PersonalityModel,
    PredictorConfig,
    ValidationError,
    ViewEvent,
    classify_population,
    confusion_sets,
    f_measure,
    precision,
    recall,
    run_sweep,
)
from persorec.data import derive_profile
from persorec.evaluation import METRIC_COLUMNS, histogram_csv, metrics_csv, write_histogram_csv, write_metrics_csv
from persorec.recommender import NeighborhoodEngine
from persorec.similarity import personality_similarity_block

M = PersonalityModel

# (R, I, V, TP, FP, FN, P, R, F) with exact fractions
CONFUSION_CASES = [
    ("ab", "c", "ac", "a", "c", "b", Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
    ("ab", "cd", "ab", "ab", "", "", 1, 1, 1),
    ("ab", "c", "", "", "", "ab", 0, 0, 0),
    ("", "abc", "ab", "", "ab", "", 0, 0, 0),
    ("", "", "", "", "", "", 0, 0, 0),
    ("abc", "", "a", "a", "", "bc", 1, Fraction(1, 3), Fraction(1, 2)),
    ("a", "bcd", "abcd", "a", "bcd", "", Fraction(1, 4), 1, Fraction(2, 5)),
    ("abcd", "ef", "abef", "ab", "ef", "cd", Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
    ("abc", "de", "de", "", "de", "abc", 0, 0, 0),
    ("abcdef", "g", "abg", "ab", "g", "cdef", Fraction(2, 3), Fraction(1, 3), Fraction(4, 9)),
    ("ab", "cdefgh", "acdefgh", "a", "cdefgh", "b", Fraction(1, 7), Fraction(1, 2), Fraction(2, 9)),
    ("abc", "", "abc", "abc", "", "", 1, 1, 1),
]


@pytest.mark.parametrize("case", CONFUSION_CASES, ids=[f"case{k}" for k in range(len(CONFUSION_CASES))])
def test_confusion_and_metrics_fixture(case):
    rel, irr, viewed, tp, fp, fn, p, r, f = case
    sets = EvaluationSets(set(rel), set(irr), set(viewed))
    assert confusion_sets(sets) == (frozenset(tp), frozenset(fp), frozenset(fn))
    got_p = precision(len(tp), len(fp))
    got_r = recall(len(tp), len(fn))
    assert got_p == float(p)
    assert got_r == float(r)
    assert f_measure(got_p, got_r) == pytest.approx(float(f), abs=1e-15)
    # set-valued arguments are accepted too
    assert precision(set(tp), set(fp)) == got_p
    assert recall(set(tp), set(fn)) == got_r


def test_invalid_evaluation_sets():
    with pytest.raises(ValidationError):
        EvaluationSets({1}, {1}, set())
    with pytest.raises(ValidationError):
        EvaluationSets({1}, {2}, {3})
    assert EvaluationSets({1}, {2}, {2}).displayed == {1, 2}


@given(
    rel=st.frozensets(st.integers(0, 30), max_size=12),
    irr=st.frozensets(st.integers(31, 60), max_size=12),
    data=st.data(),
)
def test_set_identities_and_bounds(rel, irr, data):
    displayed = sorted(rel | irr)
    viewed = data.draw(st.frozensets(st.sampled_from(displayed), max_size=len(displayed)) if displayed else st.just(frozenset()))
    sets = EvaluationSets(rel, irr, viewed)
    tp, fp, fn = confusion_sets(sets)
    assert len(tp) + len(fp) == len(viewed)
    assert len(tp) + len(fn) == len(rel)
    p, r = precision(tp, fp), recall(tp, fn)
    f = f_measure(p, r)
    for x in (p, r, f):
        assert 0.0 <= x <= 1.0
    if p > 0 and r > 0:
        assert min(p, r) - 1e-12 <= f <= max(p, r) + 1e-12


@given(st.floats(0, 1))
def test_f_fixed_point(p):
    assert f_measure(p, p) == pytest.approx(p, abs=1e-15)


# -- sweep -----------------------------------------------------------------------


def _three_users():
    prof = [derive_profile(u, [0.3, 0.3, 0.2, 0.1, 0.7, 0.1]) for u in (1, 2, 3)]  # all ISTJ
    items = tuple(Item(i, frozenset({"t"})) for i in (10, 11, 12, 13))
    ev = [
        ViewEvent(1, 10, 1, 4), ViewEvent(1, 11, 2, 2),
        ViewEvent(2, 10, 3, 4), ViewEvent(2, 12, 4, 2),
        ViewEvent(3, 11, 5, 5), ViewEvent(3, 13, 6, 1),
    ]
    return Dataset(tuple(prof), items, tuple(ev))


def test_hand_traced_sweep():
    # Every user has mean 3 and the same type; at bucket 0 both other users
    # are neighbors with weight 1 (personality only).
    #   user 1: item 10 +1, item 11 +2 relevant; 12, 13 negative -> R={10,11}, V={10,11}: P=R=1
    #   user 2: item 10 +1, item 11 (-1+2)/2 relevant; 12 unsupported -> R={10,11}, V={10,12}: P=R=1/2
    #   user 3: item 10 +1 relevant; 11, 12 negative; 13 unsupported -> R={10}, V={11,13}: P=R=0
    # Bucket 2 reveals everything, so nobody has held-out views.
    ds = _three_users()
    pts = run_sweep(ds, [M.MBTI], [0, 2], PredictorConfig())
    assert pts[0] == MetricPoint(M.MBTI, 0, 0.5, 0.5, 0.5, 3)
    assert pts[1] == MetricPoint(M.MBTI, 2, 0.0, 0.0, 0.0, 0)
    assert pts[1].empty and not pts[0].empty


def test_bucket_one_trace():
    # bucket 1 reveals each user's first item, which leaves the displayed set;
    # one co-rated item is not enough overlap, so weights stay personality-only.
    #   user 1: R={11}, V={11}: P=R=1
    #   user 2: R={11}, V={12}: P=R=0
    #   user 3: R={10}, V={13}: P=R=0
    pts = run_sweep(_three_users(), [M.MBTI], [1], PredictorConfig())
    assert pts == [MetricPoint(M.MBTI, 1, 1 / 3, 1 / 3, 1 / 3, 3)]


def test_duplicate_models_identical(small_dataset):
    pts = run_sweep(small_dataset, [M.BIG5, M.BIG5], [0, 5], PredictorConfig())
    assert [(p.precision, p.recall, p.f_measure, p.n_users) for p in pts[:2]] == [
        (p.precision, p.recall, p.f_measure, p.n_users) for p in pts[2:]
    ]


def test_output_order_and_determinism(small_dataset):
    models = [M.MBTI, M.HYBRID, M.EYSENCK]
    pts = run_sweep(small_dataset, models, [0, 3, 6], PredictorConfig())
    assert [(p.model, p.bucket) for p in pts] == [(m, b) for m in models for b in (0, 3, 6)]
    assert run_sweep(small_dataset, models, [0, 3, 6], PredictorConfig(), n_jobs=3) == pts
    small_blocks = run_sweep(small_dataset, models, [0, 3, 6], PredictorConfig(), HoldoutConfig(block_size=7))
    assert small_blocks == pts


def test_sweep_invariant_under_record_shuffle(small_dataset):
    rng = np.random.default_rng(9)
    users = list(small_dataset.users)
    events = list(small_dataset.events)
    rng.shuffle(users)
    rng.shuffle(events)
    shuffled = Dataset(tuple(users), small_dataset.items, tuple(events))
    cfg = PredictorConfig()
    assert run_sweep(shuffled, list(M), [0, 4], cfg) == run_sweep(small_dataset, list(M), [0, 4], cfg)


@pytest.mark.parametrize("buckets", [[5, 5], [3, 1], [-1, 2]])
def test_bucket_validation(small_dataset, buckets):
    with pytest.raises(ValidationError):
        run_sweep(small_dataset, [M.BIG5], buckets, PredictorConfig())


@pytest.mark.parametrize("model", [M.BIG5, M.EYSENCK, M.HEXACO])
def test_bucket_zero_uses_personality_only(small_dataset, model):
    engine = NeighborhoodEngine(small_dataset, small_dataset.ratings(), small_dataset.ratings(limit=0))
    rows = np.arange(len(small_dataset.users))
    weights, _ = engine.candidates(rows, PredictorConfig(model=model))
    traits = small_dataset.trait_matrix(model)
    assert np.array_equal(weights, personality_similarity_block(traits, traits))


def test_metric_point_ranges(small_dataset):
    for p in run_sweep(small_dataset, list(M), [0, 5, 10], PredictorConfig()):
        for x in (p.precision, p.recall, p.f_measure):
            assert 0.0 <= x <= 1.0
        assert 0 < p.n_users <= len(small_dataset.users)


# -- population classification ---------------------------------------------------


def _tally(ds, model):
    counts = {}
    for u in ds.users:
        if model is M.MBTI:
            key = u.mbti.code
        else:
            vec = u.traits(model)
            names = TRAIT_NAMES[model]
            best = 0
            for k in range(1, len(names)):
                if vec.scores[k] > vec.scores[best]:
                    best = k
            key = names[best]
        counts[key] = counts.get(key, 0) + 1
    return counts


@pytest.mark.parametrize("model", [M.BIG5, M.EYSENCK, M.HEXACO, M.MBTI])
def test_classify_matches_tally(model):
    from persorec import SynthConfig, generate_synthetic

    ds = generate_synthetic(SynthConfig(n_users=100, n_items=20, views_per_user=3, seed=4))
    hist = classify_population(ds, model)
    labels = MBTI_TYPES if model is M.MBTI else TRAIT_NAMES[model]
    assert list(hist) == list(labels)
    assert sum(hist.values()) == 100
    assert {k: v for k, v in hist.items() if v} == _tally(ds, model)


def test_single_bar_histogram():
    ds = _three_users()
    hist = classify_population(ds, M.BIG5)
    assert hist["Conscientiousness"] == 3
    assert sum(hist.values()) == 3
    assert classify_population(ds, M.MBTI)["ISTJ"] == 3


def test_classify_rejects_hybrid(small_dataset):
    with pytest.raises(ValidationError):
        classify_population(small_dataset, M.HYBRID)


# -- CSV -------------------------------------------------------------------------


def test_metrics_csv_format(tmp_path):
    pts = [MetricPoint(M.BIG5, 0, 0.5, 1 / 3, 0.4, 7), MetricPoint(M.MBTI, 5, 0.0, 0.0, 0.0, 0)]
    text = metrics_csv(pts)
    assert text == (
        "model,bucket,precision,recall,f_measure,n_users\n"
        "big5,0,0.500000,0.333333,0.400000,7\n"
        "mbti,5,0.000000,0.000000,0.000000,0\n"
    )
    assert tuple(next(csv.reader(io.StringIO(text)))) == METRIC_COLUMNS
    assert write_metrics_csv(pts, tmp_path / "m.csv").read_text() == text


def test_histogram_csv_format(tmp_path):
    hist = {"Psychoticism": 2, "Extraversion": 0, "Neuroticism": 1}
    text = histogram_csv(hist)
    assert text == "label,count\nPsychoticism,2\nExtraversion,0\nNeuroticism,1\n"
    assert write_histogram_csv(hist, tmp_path / "h.csv").read_text() == text
