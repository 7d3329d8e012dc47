"""Tail probabilities of the centered Gram norm.

The norm exceeds

    C ((sigma_C + sigma_R + sigma_* sqrt(log(p1^p2)) + x)^2 - sigma_C^2)

with probability at most exp(-x^2).  The empirical exceedance frequency over
many replicates should fall below that curve at every x.
"""

import numpy as np

from hetwishart import Gaussian, HeavyTail, VarianceProfile, tail_empirics

prof = VarianceProfile(np.ones((80, 80)))
x_grid = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0]

for model, name in ((Gaussian(), "Gaussian"), (HeavyTail(b=2.0), "heavy tail b=2")):
    rows = tail_empirics(prof, model, n_reps=400, x_grid=x_grid, C=10.0, master_seed=99)
    print(f"{name} entries, C = 10, 400 replicates:")
    print(f"{'x':>6} {'threshold':>12} {'frequency':>10} {'exp(-x^2)':>10}")
    for r in rows:
        print(f"{r.x:>6.2f} {r.threshold:>12.1f} {r.frequency:>10.4f} {r.tail_prob:>10.4f}")
    print()
