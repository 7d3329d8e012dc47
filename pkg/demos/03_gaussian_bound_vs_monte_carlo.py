"""The explicit Gaussian upper bound against Monte Carlo truth.

For independent N(0, sigma_ij^2) entries,

    E||ZZ' - E ZZ'|| <= (1+e1){ 2 sC sR + (1+e2) sC^2
                                + C1(e1) sR s* sqrt(log(p1^p2))
                                + C2(e1,e2) s*^2 log(p1^p2) }.

In the homoskedastic square case the first two terms are sharp: the ratio of
the Monte Carlo mean to 2 sqrt(p1 p2) + p1 approaches 1 as p grows.
"""

import numpy as np

from hetwishart import Gaussian, VarianceProfile, estimate_concentration, gaussian_upper_bound, summarize

rng = np.random.default_rng(42)

print("random heteroskedastic profiles: estimate vs bound (eps1 = eps2 = 0.1)")
print(f"{'dims':>10} {'MC mean':>10} {'bound':>12} {'ratio':>8}")
for trial in range(5):
    p1, p2 = rng.integers(20, 80, size=2)
    prof = VarianceProfile(rng.uniform(0, 1, size=(p1, p2)))
    est = estimate_concentration(prof, Gaussian(), n_reps=20, master_seed=100 + trial)
    bound = gaussian_upper_bound(summarize(prof), 0.1, 0.1).value
    print(f"{p1:>4}x{p2:<5} {est.mean:>10.2f} {bound:>12.2f} {est.mean / bound:>8.4f}")

print("\nhomoskedastic square case: mean / (2 sqrt(p1 p2) + p1) -> 1")
print(f"{'p':>6} {'MC mean':>10} {'2p+p':>8} {'ratio':>8}")
for p in (50, 100, 200, 300):
    prof = VarianceProfile(np.ones((p, p)))
    est = estimate_concentration(prof, Gaussian(), n_reps=20, master_seed=7)
    sharp = 2.0 * p + p
    print(f"{p:>6} {est.mean:>10.1f} {sharp:>8} {est.mean / sharp:>8.4f}")
