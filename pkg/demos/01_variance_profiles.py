"""Variance profiles and their three scales.

A profile assigns each matrix entry a standard deviation sigma_ij; all the
concentration rates in this package are driven by three numbers computed from
it: the largest column sum sigma_C, the largest row sum sigma_R, and the
largest entry sigma_*.
"""

import numpy as np

from hetwishart import (
    VarianceProfile,
    homoskedastic_columns,
    homoskedastic_rows,
    lower_bound_profile,
    profile_to_json,
    summarize,
)


def show(name, profile):
    s = summarize(profile)
    print(f"{name}: shape {profile.shape}")
    print(profile.sigma)
    print(f"  sigma_C = {s.sigma_C:.4f}  sigma_R = {s.sigma_R:.4f}  sigma_* = {s.sigma_star:.4f}")
    print()


# the homoskedastic baseline: every entry at scale 1
show("all-ones 4x9", VarianceProfile(np.ones((4, 9))))

# structured profiles used by the sample-covariance and per-coordinate models
show("rows at (1, 2, 3)", homoskedastic_rows([1.0, 2.0, 3.0], 4))
show("columns at (0.5, 1.5)", homoskedastic_columns([0.5, 1.5], 3))

# the three adversarial constructions behind the minimax lower bound: each
# one concentrates the variance budget so a different term of the rate bites
for kind in ("single_column", "block", "block_diagonal"):
    prof = lower_bound_profile(
        kind, sigma_star=1.0, sigma_C=np.sqrt(2.0), sigma_R=np.sqrt(3.0), p1=6, p2=6
    )
    show(f"lower-bound construction: {kind}", prof)

# profiles serialize to JSON with full double precision
prof = VarianceProfile(np.random.default_rng(0).uniform(0, 1, (2, 3)))
print("JSON form:")
print(profile_to_json(prof))
