"""
Rating and personality similarity
=================================

Two users who rated few items in common are hard to compare by ratings
alone. Personality similarity fills the gap, and the blend weight alpha
shifts towards ratings as a user's history grows.
"""

from persorec import BlendConfig, TraitVector, PersonalityModel, alpha_for, sim_combined, sim_personality
from persorec.similarity import rating_pearson

# ratings on a 1-5 scale, keyed by item id
ann = {1: 5, 2: 3, 3: 4, 7: 1}
bob = {1: 4, 2: 2, 3: 5, 9: 2}
print("co-rated Pearson:", round(rating_pearson(ann, bob), 4))

# only one shared item: not enough to correlate
print("single overlap:", rating_pearson({1: 5}, {1: 2, 4: 3}))

p_ann = TraitVector(PersonalityModel.BIG5, [0.8, 0.4, 0.9, 0.6, 0.2])
p_bob = TraitVector(PersonalityModel.BIG5, [0.7, 0.5, 0.8, 0.5, 0.3])
sp = sim_personality(p_ann, p_bob)
print("personality Pearson:", round(sp, 4))

# alpha decays linearly with the number of items the target has rated
cfg = BlendConfig(alpha0=1.0, decay_count=20)
for n in (0, 5, 10, 20, 40):
    a = alpha_for(n, cfg)
    print(f"n={n:2d} alpha={a:.2f} combined={sim_combined(sp, 0.1, a):.3f}")
