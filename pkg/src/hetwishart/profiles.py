"""Variance profiles: per-entry standard deviation grids and their summaries.

A profile assigns every entry (i, j) of a p1-by-p2 random matrix a standard
deviation sigma_ij >= 0.  The three scales that drive all concentration rates
are

    sigma_C^2 = max_j sum_i sigma_ij^2   (largest column sum of variances)
    sigma_R^2 = max_i sum_j sigma_ij^2   (largest row sum of variances)
    sigma_*   = max_ij sigma_ij          (largest single entry)

Profiles store standard deviations, not variances; squares are taken on
demand.  Instances are immutable after construction and safe to share across
worker threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "VarianceProfile",
    "ProfileSummary",
    "summarize",
    "homoskedastic_rows",
    "homoskedastic_columns",
    "lower_bound_profile",
    "profile_to_json",
    "profile_from_json",
    "load_profile",
    "save_profile",
]

# floor/ceil with a relative slack so that e.g. (sqrt(3))**2 = 2.999...96
# still floors to 3; user-facing parameters routinely arrive as squared roots
_REL_SLACK = 1e-12


def _floor_tol(x: float) -> int:
    return int(math.floor(x * (1.0 + _REL_SLACK) + _REL_SLACK))


def _ceil_tol(x: float) -> int:
    return int(math.ceil(x * (1.0 - _REL_SLACK) - _REL_SLACK))


@dataclass(frozen=True)
class VarianceProfile:
    """Immutable p1-by-p2 grid of entrywise standard deviations."""

    sigma: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.sigma, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ParameterError(f"sigma must be a 2-d grid, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("sigma entries must be finite")
        if np.any(arr < 0):
            raise ParameterError("sigma entries must be nonnegative")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "sigma", arr)

    @property
    def p1(self) -> int:
        return self.sigma.shape[0]

    @property
    def p2(self) -> int:
        return self.sigma.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.sigma.shape

    def variances(self) -> np.ndarray:
        return self.sigma**2

    def transpose(self) -> "VarianceProfile":
        return VarianceProfile(self.sigma.T)


@dataclass(frozen=True)
class ProfileSummary:
    """The (sigma_C, sigma_R, sigma_*) scales of a profile plus p1 ^ p2."""

    sigma_C: float
    sigma_R: float
    sigma_star: float
    p_min: int

    def __post_init__(self):
        if self.p_min < 1:
            raise ParameterError("p_min must be >= 1")


def summarize(profile: VarianceProfile) -> ProfileSummary:
    """Column-sum-wise, row-sum-wise and entrywise maximum standard deviations.

    Sums are exactly rounded (fsum), so the summary is bitwise invariant under
    row and column permutations.
    """
    var = profile.variances()
    sigma_c = math.sqrt(max(math.fsum(col) for col in var.T))
    sigma_r = math.sqrt(max(math.fsum(row) for row in var))
    sigma_star = float(profile.sigma.max())
    return ProfileSummary(sigma_c, sigma_r, sigma_star, min(profile.p1, profile.p2))


def _as_sigma_vector(sigmas) -> np.ndarray:
    vec = np.asarray(sigmas, dtype=float)
    if vec.ndim != 1 or vec.size < 1:
        raise ParameterError("sigmas must be a nonempty 1-d vector")
    if not np.all(np.isfinite(vec)) or np.any(vec < 0):
        raise ParameterError("sigmas must be finite and nonnegative")
    return vec


def homoskedastic_rows(sigmas, p2: int) -> VarianceProfile:
    """Profile with sigma_ij = sigmas[i] for every column j."""
    vec = _as_sigma_vector(sigmas)
    if p2 < 1:
        raise ParameterError("p2 must be >= 1")
    return VarianceProfile(np.tile(vec[:, None], (1, p2)))


def homoskedastic_columns(sigmas, p1: int) -> VarianceProfile:
    """Profile with sigma_ij = sigmas[j] for every row i."""
    vec = _as_sigma_vector(sigmas)
    if p1 < 1:
        raise ParameterError("p1 must be >= 1")
    return VarianceProfile(np.tile(vec[None, :], (p1, 1)))


LOWER_BOUND_KINDS = ("single_column", "block", "block_diagonal")


def lower_bound_profile(
    kind: str,
    *,
    sigma_star: float,
    sigma_C: float,
    sigma_R: float,
    p1: int,
    p2: int,
) -> VarianceProfile:
    """Adversarial profiles that attain each term of the minimax lower-bound rate.

    ``single_column``   puts sigma_C/sqrt(p1) in the first column, zero elsewhere
                        (drives the sigma_C^2 term).
    ``block``           puts sigma_* on a k1-by-k2 top-left block with
                        k1 = floor(sigma_C^2/sigma_*^2), k2 = floor(sigma_R^2/sigma_*^2)
                        (drives sigma_C * sigma_R).
    ``block_diagonal``  repeats that k1-by-k2 block m = floor(p1/k1 ^ p2/k2) times
                        down the diagonal (drives the logarithmic terms).

    The parameter tuple must be admissible:
    min(sigma_C, sigma_R) >= sigma_* >= max(sigma_C/sqrt(p1), sigma_R/sqrt(p2)).
    Inadmissible parameters are rejected, never clamped.
    """
    if kind not in LOWER_BOUND_KINDS:
        raise ParameterError(f"unknown lower-bound kind {kind!r}; expected one of {LOWER_BOUND_KINDS}")
    if p1 < 1 or p2 < 1:
        raise ParameterError("p1 and p2 must be >= 1")
    if min(sigma_star, sigma_C, sigma_R) < 0:
        raise ParameterError("sigma_star, sigma_C, sigma_R must be nonnegative")

    slack = 1.0 + _REL_SLACK
    if sigma_star > min(sigma_C, sigma_R) * slack:
        raise ParameterError(
            f"inadmissible: sigma_star > min(sigma_C, sigma_R) ({sigma_star} > {min(sigma_C, sigma_R)})"
        )
    if sigma_star * slack < sigma_C / math.sqrt(p1):
        raise ParameterError(
            f"inadmissible: sigma_star < sigma_C/sqrt(p1) ({sigma_star} < {sigma_C / math.sqrt(p1)})"
        )
    if sigma_star * slack < sigma_R / math.sqrt(p2):
        raise ParameterError(
            f"inadmissible: sigma_star < sigma_R/sqrt(p2) ({sigma_star} < {sigma_R / math.sqrt(p2)})"
        )

    grid = np.zeros((p1, p2))
    if kind == "single_column":
        grid[:, 0] = sigma_C / math.sqrt(p1)
        return VarianceProfile(grid)

    if sigma_star == 0.0:
        # admissibility then forces sigma_C = sigma_R = 0: the zero profile
        return VarianceProfile(grid)

    k1 = max(1, _floor_tol((sigma_C / sigma_star) ** 2))
    k2 = max(1, _floor_tol((sigma_R / sigma_star) ** 2))
    if kind == "block":
        grid[:k1, :k2] = sigma_star
        return VarianceProfile(grid)

    m = max(1, _floor_tol(min(p1 / k1, p2 / k2)))
    for block in range(m):
        grid[block * k1 : (block + 1) * k1, block * k2 : (block + 1) * k2] = sigma_star
    return VarianceProfile(grid)


def profile_to_json(profile: VarianceProfile) -> str:
    """Serialize to the explicit JSON form; floats round-trip bit-exactly."""
    payload = {"kind": "explicit", "sigma": [[float(x) for x in row] for row in profile.sigma]}
    return json.dumps(payload)


def profile_from_json(text: str) -> VarianceProfile:
    """Parse any of the accepted profile JSON forms into a concrete grid.

    Accepted values of "kind": explicit, homoskedastic_rows,
    homoskedastic_columns, lower_bound.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"invalid profile JSON: {exc}") from exc
    if not isinstance(payload, dict) or "kind" not in payload:
        raise ParameterError('profile JSON must be an object with a "kind" field')
    kind = payload["kind"]
    try:
        if kind == "explicit":
            return VarianceProfile(np.asarray(payload["sigma"], dtype=float))
        if kind == "homoskedastic_rows":
            return homoskedastic_rows(payload["sigmas"], int(payload["other_dim"]))
        if kind == "homoskedastic_columns":
            return homoskedastic_columns(payload["sigmas"], int(payload["other_dim"]))
        if kind == "lower_bound":
            params = payload["params"]
            return lower_bound_profile(
                payload["variant"],
                sigma_star=float(params["sigma_star"]),
                sigma_C=float(params["sigma_C"]),
                sigma_R=float(params["sigma_R"]),
                p1=int(params["p1"]),
                p2=int(params["p2"]),
            )
    except KeyError as exc:
        raise ParameterError(f"profile JSON missing field {exc}") from exc
    raise ParameterError(f"unknown profile kind {kind!r}")


def load_profile(path) -> VarianceProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return profile_from_json(fh.read())


def save_profile(profile: VarianceProfile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(profile_to_json(profile))
