"""
Who is in the population?
=========================

Generate a synthetic community and tally users by dominant trait for each
trait model, and by type for MBTI.
"""

from persorec import PersonalityModel, SynthConfig, classify_population, generate_synthetic

ds = generate_synthetic(SynthConfig(n_users=500, n_items=300, views_per_user=10, seed=3))

for model in (PersonalityModel.BIG5, PersonalityModel.EYSENCK, PersonalityModel.HEXACO):
    hist = classify_population(ds, model)
    print(model.value)
    for label, count in hist.items():
        print(f"  {label:18s} {count:4d} {'#' * (count // 10)}")

# MBTI: sixteen bars, zero counts included
mbti = classify_population(ds, PersonalityModel.MBTI)
print("mbti", " ".join(f"{k}:{v}" for k, v in mbti.items()))
