"""
Random candidate sets and growing dimension
===========================================

First: designs computed on uniform random points in the square approach the
design on a fine grid as the number of candidates grows.

Second: the lower bound on D-efficiency after a fixed number of updates, for
full quadratic models in more variables.
"""

import numpy as np

from optdesign import FeatureMap
from optdesign.experiments import converge_n, quadratic_scaling

fmap = FeatureMap.full_quadratic(2)
schedule = [50, 200, 1000]
rows, ref = converge_n(fmap, {"kind": "square_random", "n": 50, "seed": 0}, schedule, replicates=3)
print("fine-grid objective", round(ref, 4))
for n in schedule:
    gaps = [r["gap_to_continuous_reference"] for r in rows if r["n"] == n]
    print(f"N={n:5d} median gap {np.median(gaps):.4f}")

# -log10(1 - efficiency bound): 2 means at least 99% efficient
scaling = quadratic_scaling([4, 6], iterations=100, n_random=500, n_factorial=200)
for q in (4, 6):
    sub = [r for r in scaling if r["q"] == q]
    print(f"q={q} p={sub[0]['p']}: after {sub[-1]['iteration']} updates "
          f"{sub[-1]['log_efficiency']:.2f}")
