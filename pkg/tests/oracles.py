"""Naive reference implementations used as test oracles.

These avoid the package's batched kernels: plain loops, two-pass centred
Pearson, explicit set filters over every user pair.
"""

import math

from persorec import PersonalityModel, alpha_for, sim_combined, sim_personality


def textbook_pearson(xs, ys):
    """Two-pass Pearson correlation; None for n < 2, 0.0 for a constant side."""
    n = len(xs)
    if n < 2:
        return None
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    cov = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = math.fsum((x - mx) ** 2 for x in xs)
    vy = math.fsum((y - my) ** 2 for y in ys)
    if vx == 0 or vy == 0 or len(set(xs)) == 1 or len(set(ys)) == 1:
        return 0.0
    return cov / math.sqrt(vx * vy)


def corated_pearson(rx: dict, ry: dict):
    common = sorted(set(rx) & set(ry))
    return textbook_pearson([rx[i] for i in common], [ry[i] for i in common])


def oracle_weight(u, v, ds, ratings, cfg, model, target_ratings=None):
    """Neighbor weight from the textbook rating Pearson and the scalar trait similarity."""
    tr = target_ratings or ratings
    alpha = alpha_for(tr.count(u), cfg.blend)
    sr = _cross_sim_rating(u, v, tr, ratings)
    if model is PersonalityModel.MBTI:
        same = 1.0 if ds.user(u).mbti == ds.user(v).mbti else 0.0
        return sim_combined(same, sr, alpha, cfg.blend.combiner)
    tm = cfg.hybrid_trait_model if model is PersonalityModel.HYBRID else model
    sp = sim_personality(ds.user(u).traits(tm), ds.user(v).traits(tm))
    return sim_combined(sp, sr, alpha, cfg.blend.combiner)


def _cross_sim_rating(u, v, tr, ratings):
    return corated_pearson(tr.ratings_of(u), ratings.ratings_of(v))


def algorithm1_oracle(u, ds, cfg, ratings):
    """Literal transcription of the hybrid rule as a set filter, untruncated."""
    lam, delta, c = cfg.hybrid.lambda_, cfg.hybrid.delta, cfg.hybrid.coldstart_view_count
    tm = cfg.hybrid_trait_model
    pu = ds.user(u)
    out = set()
    for v in ds.user_ids:
        v = int(v)
        if v == u:
            continue
        pv = ds.user(v)
        if ratings.count(u) < c:
            if sim_personality(pu.traits(tm), pv.traits(tm)) > lam or pu.mbti == pv.mbti:
                out.add(v)
        else:
            if oracle_weight(u, v, ds, ratings, cfg, PersonalityModel.HYBRID) > delta and pu.mbti == pv.mbti:
                out.add(v)
    return out


def baseline_oracle(u, ds, cfg, ratings, model):
    out = set()
    for v in ds.user_ids:
        v = int(v)
        if v == u:
            continue
        if model is PersonalityModel.MBTI:
            if ds.user(u).mbti == ds.user(v).mbti:
                out.add(v)
        elif oracle_weight(u, v, ds, ratings, cfg, model) > cfg.neighbor_threshold:
            out.add(v)
    return out


def ranked_oracle(u, ds, cfg, ratings, candidates, model):
    scored = [(v, oracle_weight(u, v, ds, ratings, cfg, model)) for v in candidates]
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[: cfg.max_neighbors]
