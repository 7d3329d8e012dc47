"""Closed-form concentration bounds and rates for E||ZZ' - E ZZ'||.

All bounds are pure functions of the profile scales (sigma_C, sigma_R,
sigma_*), the dimensions, and explicit constants.  Natural logarithms
throughout; log(p1 ^ p2) is taken literally, so every bound degenerates
correctly at p1 ^ p2 = 1 (log 1 = 0, never floored).

Unspecified universal constants are surfaced as caller-supplied parameters
defaulting to 1, and any bound carrying one is flagged ``rate_only``: it
pins the growth rate, not the constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .profiles import ProfileSummary

__all__ = [
    "BoundReport",
    "MomentTail",
    "ClusteringRates",
    "c1_constant",
    "c2_constant",
    "gaussian_upper_bound",
    "baseline_bounds",
    "unified_bound",
    "moment_and_tail",
    "structured_rates",
    "lower_bound_rate",
    "clustering_rates",
]


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    value: float
    terms: dict[str, float]
    params: dict = field(default_factory=dict)
    rate_only: bool = False

    def __post_init__(self):
        if self.value < 0:
            raise ParameterError(f"bound value must be nonnegative, got {self.value}")

    def to_json_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "value": self.value,
            "terms": dict(self.terms),
            "params": dict(self.params),
            "rate_only": self.rate_only,
        }


def c1_constant(eps1: float) -> float:
    """C1(eps1) = 10 (1 + eps1) sqrt(ceil(1 / log(1 + eps1)))."""
    if eps1 <= 0:
        raise ParameterError("eps1 must be positive")
    return 10.0 * (1.0 + eps1) * math.sqrt(math.ceil(1.0 / math.log1p(eps1)))


def c2_constant(eps1: float, eps2: float) -> float:
    """C2(eps1, eps2) = (1 + eps1) ceil(1 / log(1 + eps1)) (25/eps2 + 24)."""
    if eps1 <= 0 or eps2 <= 0:
        raise ParameterError("eps1 and eps2 must be positive")
    return (1.0 + eps1) * math.ceil(1.0 / math.log1p(eps1)) * (25.0 / eps2 + 24.0)


def gaussian_upper_bound(s: ProfileSummary, eps1: float, eps2: float) -> BoundReport:
    """Gaussian upper bound with explicit constants:

        (1+eps1) { 2 sigma_C sigma_R + (1+eps2) sigma_C^2
                   + C1(eps1) sigma_R sigma_* sqrt(log(p1^p2))
                   + C2(eps1,eps2) sigma_*^2 log(p1^p2) }.
    """
    c1 = c1_constant(eps1)
    c2 = c2_constant(eps1, eps2)
    log_p = math.log(s.p_min)
    pre = 1.0 + eps1
    terms = {
        "cross": pre * 2.0 * s.sigma_C * s.sigma_R,
        "column": pre * (1.0 + eps2) * s.sigma_C**2,
        "sqrt_log": pre * c1 * s.sigma_R * s.sigma_star * math.sqrt(log_p),
        "log": pre * c2 * s.sigma_star**2 * log_p,
    }
    return BoundReport(
        "gaussian",
        sum(terms.values()),
        terms,
        params={"eps1": eps1, "eps2": eps2, "C1": c1, "C2": c2, "p_min": s.p_min},
    )


def baseline_bounds(s: ProfileSummary, p2: int) -> tuple[BoundReport, BoundReport]:
    """The two pre-existing rates this library improves on, with constant 1.

    Symmetrization:  (sigma_C + sigma_R + sigma_* sqrt(log(p1^p2)))^2
    Matrix-sum:      sigma_C sigma_R sqrt(log p2) + sigma_C^2 (log p2)^2
    """
    if p2 < 1:
        raise ParameterError("p2 must be >= 1")
    root = s.sigma_C + s.sigma_R + s.sigma_star * math.sqrt(math.log(s.p_min))
    symmetrization = BoundReport(
        "symmetrization",
        root**2,
        {"square_root": root},
        params={"p_min": s.p_min},
        rate_only=True,
    )
    log_p2 = math.log(p2)
    terms = {
        "cross": s.sigma_C * s.sigma_R * math.sqrt(log_p2),
        "column": s.sigma_C**2 * log_p2**2,
    }
    matrix_sum = BoundReport(
        "matrix_sum", sum(terms.values()), terms, params={"p2": p2}, rate_only=True
    )
    return symmetrization, matrix_sum


_FAMILY_ALIASES = {
    "gaussian": "gaussian",
    "sub_gaussian": "sub_gaussian",
    "rademacher": "sub_gaussian",
    "heavy_tail": "heavy_tail",
    "bounded": "bounded",
    "bernoulli": "bounded",
}


def unified_bound(
    s: ProfileSummary,
    family: str,
    *,
    alpha: float | None = None,
    B: float | None = None,
    p_max: int | None = None,
    c0: float = 1.0,
    c: float = 1.0,
) -> BoundReport:
    """Family-unified form C0 { (sigma_C + sigma_R + K)^2 - sigma_R^2 } with

        sub-Gaussian  K = sigma_* sqrt(log(p1^p2))
        heavy tail    K = sigma_* sqrt(log(p1^p2)) (log(p1 v p2))^(1/alpha - 1/2)
        bounded       K = B sqrt(log(p1^p2))            (Bernoulli: B = 1)
        Gaussian      K = c sigma_* sqrt(log(p1^p2))

    The heavy-tail family needs the larger dimension p_max; alpha in (0, 2].
    C0 and c are calibration knobs (default 1), so every report is rate-only.
    """
    kind = _FAMILY_ALIASES.get(family)
    if kind is None:
        raise ParameterError(f"unknown family {family!r}; expected one of {sorted(_FAMILY_ALIASES)}")
    if c0 <= 0:
        raise ParameterError("c0 must be positive")
    sqrt_log = math.sqrt(math.log(s.p_min))
    params: dict = {"family": family, "c0": c0}
    if kind == "sub_gaussian":
        K = s.sigma_star * sqrt_log
    elif kind == "heavy_tail":
        if alpha is None or p_max is None:
            raise ParameterError("heavy-tail family needs alpha and p_max")
        if not 0.0 < alpha <= 2.0:
            raise ParameterError("alpha must lie in (0, 2]")
        if p_max < s.p_min:
            raise ParameterError("p_max must be >= p_min")
        K = s.sigma_star * sqrt_log * math.log(p_max) ** (1.0 / alpha - 0.5)
        params.update(alpha=alpha, p_max=p_max)
    elif kind == "bounded":
        bound = 1.0 if family == "bernoulli" else B
        if bound is None:
            raise ParameterError("bounded family needs B")
        K = bound * sqrt_log
        params.update(B=bound)
    else:  # gaussian
        K = c * s.sigma_star * sqrt_log
        params.update(c=c)
    value = c0 * ((s.sigma_C + s.sigma_R + K) ** 2 - s.sigma_R**2)
    return BoundReport(
        "unified_" + kind, value, {"K": K, "inner": value / c0}, params=params, rate_only=True
    )


@dataclass(frozen=True)
class MomentTail:
    moment_bound: float
    tail_threshold: float
    tail_prob: float

    def to_json_dict(self) -> dict:
        return {
            "moment_bound": self.moment_bound,
            "tail_threshold": self.tail_threshold,
            "tail_prob": self.tail_prob,
        }


def moment_and_tail(s: ProfileSummary, b: float, x: float, C: float) -> MomentTail:
    """b-th moment rate and tail pair:

        (E ||.||^b)^(1/b)  <~  (sigma_C + sigma_R + sigma_* sqrt(b v log(p1^p2)))^2 - sigma_C^2
        P{ ||.|| >= C ((sigma_C + sigma_R + sigma_* sqrt(log(p1^p2)) + x)^2 - sigma_C^2) }
            <= exp(-x^2)

    C is a caller-supplied stand-in for the unspecified universal constant.
    Note the subtracted square here is sigma_C^2 while the family-unified form
    subtracts sigma_R^2; transposing Z swaps the two roles, so both pin the
    same rate family.  Each is kept exactly as stated.
    """
    if b <= 0:
        raise ParameterError("b must be positive")
    if x < 0:
        raise ParameterError("x must be nonnegative")
    if C <= 0:
        raise ParameterError("C must be positive")
    log_p = math.log(s.p_min)
    moment = (s.sigma_C + s.sigma_R + s.sigma_star * math.sqrt(max(b, log_p))) ** 2 - s.sigma_C**2
    threshold = C * (
        (s.sigma_C + s.sigma_R + s.sigma_star * math.sqrt(log_p) + x) ** 2 - s.sigma_C**2
    )
    return MomentTail(moment, threshold, math.exp(-x * x))


def structured_rates(kind: str, sigmas, other_dim: int) -> BoundReport:
    """Two-term exact rates for structured profiles (upper and lower coincide):

        rows     sum_i sigma_i^2 + sqrt(p2 sum_i sigma_i^2) max_i sigma_i
        columns  sqrt(p1 sum_j sigma_j^4) + p1 max_j sigma_j^2

    ``sigmas`` is the per-row (or per-column) scale vector; ``other_dim`` is
    the free dimension (p2 for rows, p1 for columns).
    """
    if kind not in ("rows", "columns"):
        raise ParameterError(f"kind must be 'rows' or 'columns', got {kind!r}")
    vec = np.asarray(sigmas, dtype=float)
    if vec.ndim != 1 or vec.size < 1 or np.any(vec < 0) or not np.all(np.isfinite(vec)):
        raise ParameterError("sigmas must be a nonempty nonnegative 1-d vector")
    if other_dim < 1:
        raise ParameterError("other_dim must be >= 1")
    if kind == "rows":
        total = float(np.sum(vec**2))
        terms = {
            "variance_sum": total,
            "cross": math.sqrt(other_dim * total) * float(vec.max()),
        }
    else:
        terms = {
            "fourth_moment": math.sqrt(other_dim * float(np.sum(vec**4))),
            "entry": other_dim * float(vec.max()) ** 2,
        }
    return BoundReport(
        f"structured_{kind}", sum(terms.values()), terms,
        params={"other_dim": other_dim}, rate_only=True,
    )


def lower_bound_rate(s: ProfileSummary, p1: int, p2: int) -> BoundReport:
    """Minimax lower-bound rate over all profiles with the given scales:

        sigma_C^2 + sigma_C sigma_R + sigma_R sigma_* sqrt(log p) + sigma_*^2 log p,
        p = p1 ^ p2,

    valid for admissible tuples
    min(sigma_C, sigma_R) >= sigma_* >= max(sigma_C/sqrt(p1), sigma_R/sqrt(p2)).
    """
    if p1 < 1 or p2 < 1:
        raise ParameterError("p1 and p2 must be >= 1")
    slack = 1.0 + 1e-12
    if s.sigma_star > min(s.sigma_C, s.sigma_R) * slack:
        raise ParameterError("inadmissible: sigma_star > min(sigma_C, sigma_R)")
    if s.sigma_star * slack < max(s.sigma_C / math.sqrt(p1), s.sigma_R / math.sqrt(p2)):
        raise ParameterError("inadmissible: sigma_star < max(sigma_C/sqrt(p1), sigma_R/sqrt(p2))")
    log_p = math.log(min(p1, p2))
    terms = {
        "column": s.sigma_C**2,
        "cross": s.sigma_C * s.sigma_R,
        "sqrt_log": s.sigma_R * s.sigma_star * math.sqrt(log_p),
        "log": s.sigma_star**2 * log_p,
    }
    return BoundReport(
        "lower_bound", sum(terms.values()), terms, params={"p1": p1, "p2": p2}, rate_only=True
    )


@dataclass(frozen=True)
class ClusteringRates:
    upper_rate: float
    snr_threshold: float

    def to_json_dict(self) -> dict:
        return {"upper_rate": self.upper_rate, "snr_threshold": self.snr_threshold}


def clustering_rates(
    mu_norm: float, n: int, sigma_star: float, sigma_tilde: float
) -> ClusteringRates:
    """Misclassification rate bound and consistency threshold for two-component
    spectral clustering with per-coordinate noise scales:

        rate <= min{ 1, (n ||mu|| sigma_* + n sigma_*^2 + sqrt(n) sigma_tilde^2)
                        / (n ||mu||^2) }
        threshold = sigma_* v sigma_tilde / n^(1/4)

    sigma_tilde^4 = sum_i sigma_i^4.  Clustering is consistent iff ||mu||
    exceeds the threshold by a growing factor.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    if mu_norm < 0 or sigma_star < 0 or sigma_tilde < 0:
        raise ParameterError("norms must be nonnegative")
    threshold = max(sigma_star, sigma_tilde / n**0.25)
    if mu_norm == 0.0:
        raise ParameterError("upper rate undefined for mu = 0")
    numerator = n * mu_norm * sigma_star + n * sigma_star**2 + math.sqrt(n) * sigma_tilde**2
    rate = min(1.0, numerator / (n * mu_norm**2))
    return ClusteringRates(rate, threshold)
