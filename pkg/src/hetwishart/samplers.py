"""Random matrix samplers with deterministic, parallel-safe seeding.

Every entry stream is a pure function of (master_seed, replicate_index): each
replicate gets its own counter-based Philox generator keyed by the pair, and
all draws happen in a fixed vectorized order.  Two calls with the same seed
produce bitwise-identical matrices no matter how replicates are scheduled
across workers.

Supported entry families (all independent, mean zero):

  Gaussian          N(0, sigma_ij^2)
  ScaledRademacher  sigma_ij * (+-1), the extreme-kurtosis symmetric sub-Gaussian
  Bounded(B)        sigma_ij * Uniform[-sqrt(3), sqrt(3)], so |entry| <= B
                    whenever sigma_* sqrt(3) <= B
  Bernoulli(theta)  A_ij - theta_ij with A_ij ~ Bernoulli(theta_ij)
  HeavyTail(b)      sigma_ij * G|H|^(b-1) / s_b with G, H independent N(0,1)
                    and s_b^2 = E|H|^(2b-2) = 2^(b-1) Gamma(b-1/2) / Gamma(1/2),
                    variance exactly sigma_ij^2; tail exponent alpha = 2/b
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ParameterError
from .profiles import VarianceProfile

__all__ = [
    "SampleSeed",
    "Gaussian",
    "ScaledRademacher",
    "Bounded",
    "Bernoulli",
    "HeavyTail",
    "NoiseModel",
    "generator",
    "derive_seed",
    "heavy_tail_scale",
    "sample",
    "expected_gram",
    "kappa",
    "model_to_json_dict",
    "model_from_json_dict",
]

_MASK64 = (1 << 64) - 1
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class SampleSeed:
    master_seed: int
    replicate_index: int

    def __post_init__(self):
        if self.replicate_index < 0:
            raise ParameterError("replicate_index must be nonnegative")


def generator(seed: SampleSeed) -> np.random.Generator:
    """Philox generator keyed by (master_seed, replicate_index)."""
    key = np.array([seed.master_seed & _MASK64, seed.replicate_index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(master_seed: int, salt: int) -> int:
    """Splitmix64 step: decorrelated 64-bit seed for an auxiliary stream."""
    z = (master_seed + salt * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class Gaussian:
    kind = "gaussian"


@dataclass(frozen=True)
class ScaledRademacher:
    kind = "rademacher"


@dataclass(frozen=True)
class Bounded:
    B: float
    kind = "bounded"

    def __post_init__(self):
        if not self.B > 0:
            raise ParameterError("B must be positive")


@dataclass(frozen=True)
class Bernoulli:
    theta: np.ndarray = field(repr=False)
    kind = "bernoulli"

    def __post_init__(self):
        arr = np.asarray(self.theta, dtype=float)
        if arr.ndim != 2:
            raise ParameterError("theta must be a 2-d grid")
        if np.any(arr < 0) or np.any(arr > 1):
            raise ParameterError("theta entries must lie in [0, 1]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "theta", arr)

    def implied_profile(self) -> VarianceProfile:
        """The profile the model actually realizes: sigma_ij = sqrt(theta(1-theta))."""
        return VarianceProfile(np.sqrt(self.theta * (1.0 - self.theta)))


@dataclass(frozen=True)
class HeavyTail:
    b: float
    kind = "heavy_tail"

    def __post_init__(self):
        if self.b < 1.0:
            raise ParameterError("b must be >= 1")


NoiseModel = Union[Gaussian, ScaledRademacher, Bounded, Bernoulli, HeavyTail]


def heavy_tail_scale(b: float) -> float:
    """s_b = sqrt(E|H|^(2b-2)) = sqrt(2^(b-1) Gamma(b-1/2) / Gamma(1/2))."""
    if b == 1.0:
        return 1.0
    return math.sqrt(2.0 ** (b - 1.0) * math.gamma(b - 0.5) / math.gamma(0.5))


def _check_dims(profile: VarianceProfile, model: NoiseModel) -> None:
    if isinstance(model, Bernoulli) and model.theta.shape != profile.shape:
        raise ParameterError(
            f"theta grid {model.theta.shape} does not match profile shape {profile.shape}"
        )
    if isinstance(model, Bounded):
        sigma_star = float(profile.sigma.max())
        if sigma_star * _SQRT3 > model.B * (1.0 + 1e-12):
            raise ParameterError(
                f"bounded model needs sigma_* * sqrt(3) <= B ({sigma_star * _SQRT3} > {model.B})"
            )


def sample(profile: VarianceProfile, model: NoiseModel, seed: SampleSeed) -> np.ndarray:
    """Draw one p1-by-p2 matrix; deterministic for a fixed seed.

    Variances are exactly sigma_ij^2 for all families except Bernoulli, whose
    entries are A_ij - theta_ij with variance theta_ij (1 - theta_ij); there the
    profile only fixes the dimensions.
    """
    _check_dims(profile, model)
    rng = generator(seed)
    shape = profile.shape
    sigma = profile.sigma
    if isinstance(model, Gaussian):
        return sigma * rng.standard_normal(shape)
    if isinstance(model, ScaledRademacher):
        signs = rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
        return sigma * signs
    if isinstance(model, Bounded):
        return sigma * rng.uniform(-_SQRT3, _SQRT3, size=shape)
    if isinstance(model, Bernoulli):
        draws = (rng.random(shape) < model.theta).astype(float)
        return draws - model.theta
    if isinstance(model, HeavyTail):
        g = rng.standard_normal(shape)
        if model.b == 1.0:
            return sigma * g
        h = rng.standard_normal(shape)
        w = g * np.abs(h) ** (model.b - 1.0)
        return sigma * (w / heavy_tail_scale(model.b))
    raise ParameterError(f"unknown noise model {model!r}")


def entry_variances(profile: VarianceProfile, model: NoiseModel) -> np.ndarray:
    _check_dims(profile, model)
    if isinstance(model, Bernoulli):
        return model.theta * (1.0 - model.theta)
    return profile.variances()


def expected_gram(profile: VarianceProfile, model: NoiseModel) -> np.ndarray:
    """E ZZ' = diag(sum_j Var(Z_ij)), a p1-by-p1 diagonal matrix."""
    return np.diag(entry_variances(profile, model).sum(axis=1))


def kappa(model: NoiseModel) -> float:
    """Moment norm of the standardized entry: sup_q q^(-1/2) (E|Z|^q)^(1/q).

    Documented constants: Gaussian sqrt(2/pi) and ScaledRademacher 1 and
    Bounded sqrt(3)/2 all attain the sup at q = 1.  HeavyTail uses the
    tail-matched exponent b/2 instead of 1/2 (sup over a dense q grid), and
    Bernoulli reports the worst entry of the grid.  Any unit-variance variable
    has kappa >= 1/sqrt(2) (take q = 2).
    """
    if isinstance(model, Gaussian):
        return math.sqrt(2.0 / math.pi)
    if isinstance(model, ScaledRademacher):
        return 1.0
    if isinstance(model, Bounded):
        return _SQRT3 / 2.0
    if isinstance(model, HeavyTail):
        b = model.b
        s = heavy_tail_scale(b)
        qs = np.exp(np.linspace(0.0, math.log(400.0), 2000))
        # log E|W|^q = log E|G|^q + log E|H|^((b-1)q), both Gamma expressions
        from scipy.special import gammaln

        def log_abs_moment(q):
            return q / 2.0 * math.log(2.0) + gammaln((q + 1.0) / 2.0) - gammaln(0.5)

        vals = [
            math.exp((log_abs_moment(q) + log_abs_moment((b - 1.0) * q)) / q - math.log(s))
            / q ** (b / 2.0)
            for q in qs
        ]
        return max(vals)
    if isinstance(model, Bernoulli):
        theta = np.clip(model.theta, 1e-12, 1.0 - 1e-12)
        sigma = np.sqrt(theta * (1.0 - theta))
        best = 0.0
        for q in np.exp(np.linspace(0.0, math.log(400.0), 400)):
            mom = theta * (1.0 - theta) ** q + (1.0 - theta) * theta**q
            vals = (mom ** (1.0 / q)) / (sigma * math.sqrt(q))
            best = max(best, float(vals.max()))
        return best
    raise ParameterError(f"unknown noise model {model!r}")


def model_to_json_dict(model: NoiseModel) -> dict:
    if isinstance(model, Gaussian):
        return {"model": "gaussian", "params": {}}
    if isinstance(model, ScaledRademacher):
        return {"model": "rademacher", "params": {}}
    if isinstance(model, Bounded):
        return {"model": "bounded", "params": {"B": float(model.B)}}
    if isinstance(model, Bernoulli):
        return {"model": "bernoulli", "params": {"theta": [[float(x) for x in row] for row in model.theta]}}
    if isinstance(model, HeavyTail):
        return {"model": "heavy_tail", "params": {"b": float(model.b)}}
    raise ParameterError(f"unknown noise model {model!r}")


def model_from_json_dict(payload: dict) -> NoiseModel:
    if not isinstance(payload, dict) or "model" not in payload:
        raise ParameterError('noise model JSON must be an object with a "model" field')
    name = payload["model"]
    params = payload.get("params", {})
    try:
        if name == "gaussian":
            return Gaussian()
        if name == "rademacher":
            return ScaledRademacher()
        if name == "bounded":
            return Bounded(B=float(params["B"]))
        if name == "bernoulli":
            return Bernoulli(theta=np.asarray(params["theta"], dtype=float))
        if name == "heavy_tail":
            return HeavyTail(b=float(params["b"]))
    except KeyError as exc:
        raise ParameterError(f"noise model JSON missing parameter {exc}") from exc
    raise ParameterError(f"unknown noise model name {name!r}")
