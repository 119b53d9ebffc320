"""
How characteristic is a context feature?
========================================

A feature seen f times among the t occurrences of a subtype, and F times in
the whole training set of T occurrences, is compared with a random draw:
the count among t occurrences is then hypergeometric. The tail probability
is the feature's probability level; the smaller, the more characteristic.
"""

import numpy as np

from focalner.features import FeatureId
from focalner.induction import FeatureStats, hypergeom_tail, specificity_score

# 20 occurrences in all, 5 of them gsp.org. The feature fires 4 times,
# 3 of them on gsp.org.
print("P(X >= 3) =", hypergeom_tail(3, 4, 5, 20, "over"), "(exactly 496/15504)")

# Both tails at once: the call broadcasts like numpy.
k = np.arange(5)
print("over-tails  k=0..4:", np.round(hypergeom_tail(k, 4, 5, 20, "over"), 5))
print("under-tails k=0..4:", np.round(hypergeom_tail(k, 4, 5, 20, "under"), 5))

# The direction follows the observed proportion: f/t against F/T.
feat = FeatureId("VCLASS_GOV", "communication")
for f, t, F, T in [(3, 5, 4, 20), (0, 5, 4, 20), (0, 5, 0, 20)]:
    s = specificity_score(FeatureStats(feat, "org", f, t, F, T))
    print(f"f={f} t={t} F={F} T={T}: {s.direction:5s} p={s.p_level:.5f}")

# Large corpora are fine: everything is computed in log space.
print("T=100000, F=300, t=2000, f=25:", hypergeom_tail(25, 300, 2000, 100_000, "over"))
