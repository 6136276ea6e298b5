"""
Precision and recall against history length
===========================================

Each user is served with only their first ``b`` views revealed while the
rest of the community keeps its full history. The held-out views are the
ground truth. Small ``b`` is the cold-start regime.
"""

from persorec import PersonalityModel, PredictorConfig, SynthConfig, generate_synthetic, run_sweep
from persorec.recommender import recommend_top_n

ds = generate_synthetic(SynthConfig(n_users=400, n_items=800, affinity_strength=4.0, seed=1))
print(f"{len(ds.users)} users, {len(ds.items)} items, {len(ds.events)} views")

# one recommendation list, to see what a user gets
cfg = PredictorConfig()
for item, score in recommend_top_n(0, 5, ds, cfg):
    print(f"item {item:4d} predicted {score:.2f}")

models = list(PersonalityModel)
buckets = [0, 5, 10, 25, 50]
points = run_sweep(ds, models, buckets, cfg)

print("F-measure")
print("bucket " + " ".join(f"{m.value:>8s}" for m in models))
table = {(p.model, p.bucket): p for p in points}
for b in buckets:
    print(f"{b:6d} " + " ".join(f"{table[(m, b)].f_measure:8.4f}" for m in models))
