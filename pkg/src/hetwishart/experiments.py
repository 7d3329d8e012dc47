"""Monte Carlo harness: concentration estimates, tail empirics, rate sweeps,
and the two-component heteroskedastic clustering application.

Everything is deterministic given a master seed.  Replicates are the unit of
parallelism: replicate r of a run always uses the stream keyed by
(master seed, r), results are aggregated in replicate order, and linear
algebra inside a replicate is pinned to one BLAS thread, so a run's output is
byte-identical whether it used 1 worker or 8.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import bounds as bounds_mod
from .errors import ParameterError
from .profiles import VarianceProfile, summarize
from .samplers import NoiseModel, SampleSeed, derive_seed, generator, model_to_json_dict, sample
from .spectral import centered_gram, spectral_norm

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover
    from contextlib import nullcontext

    def threadpool_limits(limits=None):
        return nullcontext()


__all__ = [
    "DEFAULT_QUANTILES",
    "ConcentrationEstimate",
    "concentration_norms",
    "estimate_concentration",
    "TailRow",
    "tail_empirics",
    "SweepRow",
    "evaluate_bound",
    "rate_sweep",
    "sweep_rows_to_csv",
    "ClusteringInstance",
    "generate_mixture",
    "spectral_cluster",
    "misclassification",
    "PhaseRow",
    "phase_diagram",
    "phase_rows_to_csv",
]

DEFAULT_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)

# salt tags keep the derived seed spaces of unrelated streams apart
_SALT_SWEEP_ROW = 1 << 32
_SALT_PHASE_LAMBDA = 2 << 32
_SALT_NOISE = 3 << 32


def _run_replicates(fn: Callable[[int], float], n_reps: int, threads: int) -> np.ndarray:
    """Evaluate fn(0..n_reps-1) with a worker pool; output order is by index."""
    if threads < 1:
        raise ParameterError("threads must be >= 1")
    with threadpool_limits(limits=1):
        if threads == 1:
            values = [fn(r) for r in range(n_reps)]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(fn, range(n_reps)))
    return np.asarray(values, dtype=float)


@dataclass(frozen=True)
class ConcentrationEstimate:
    mean: float
    std_err: float
    n_reps: int
    quantiles: dict[float, float]

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_err": self.std_err,
            "n_reps": self.n_reps,
            "quantiles": {str(k): v for k, v in self.quantiles.items()},
        }


def concentration_norms(
    profile: VarianceProfile,
    model: NoiseModel,
    n_reps: int,
    master_seed: int,
    threads: int = 1,
    tol: float = 1e-8,
) -> np.ndarray:
    """Per-replicate values of ||ZZ' - E ZZ'||, indexed by replicate."""
    if n_reps < 1:
        raise ParameterError("n_reps must be >= 1")

    def one(rep: int) -> float:
        Z = sample(profile, model, SampleSeed(master_seed, rep))
        return spectral_norm(centered_gram(Z, profile, model), tol=tol)

    return _run_replicates(one, n_reps, threads)


def estimate_concentration(
    profile: VarianceProfile,
    model: NoiseModel,
    n_reps: int,
    master_seed: int,
    threads: int = 1,
    quantile_probs: Sequence[float] = DEFAULT_QUANTILES,
) -> ConcentrationEstimate:
    """Monte Carlo summary of E||ZZ' - E ZZ'|| over n_reps replicates."""
    if n_reps < 2:
        raise ParameterError("n_reps must be >= 2")
    norms = concentration_norms(profile, model, n_reps, master_seed, threads)
    probs = sorted(float(p) for p in quantile_probs)
    quantiles = {p: float(np.quantile(norms, p)) for p in probs}
    return ConcentrationEstimate(
        mean=float(norms.mean()),
        std_err=float(norms.std(ddof=1) / math.sqrt(n_reps)),
        n_reps=n_reps,
        quantiles=quantiles,
    )


@dataclass(frozen=True)
class TailRow:
    x: float
    threshold: float
    frequency: float
    tail_prob: float


def tail_empirics(
    profile: VarianceProfile,
    model: NoiseModel,
    n_reps: int,
    x_grid: Sequence[float],
    C: float,
    master_seed: int,
    threads: int = 1,
) -> list[TailRow]:
    """Empirical exceedance frequency of the tail threshold at each x.

    The threshold is C ((sigma_C + sigma_R + sigma_* sqrt(log(p1^p2)) + x)^2
    - sigma_C^2); the predicted tail probability is exp(-x^2).
    """
    s = summarize(profile)
    norms = concentration_norms(profile, model, n_reps, master_seed, threads)
    rows = []
    for x in x_grid:
        mt = bounds_mod.moment_and_tail(s, b=1.0, x=float(x), C=C)
        freq = float(np.mean(norms > mt.tail_threshold))
        rows.append(TailRow(float(x), mt.tail_threshold, freq, mt.tail_prob))
    return rows


def _require_rows_homoskedastic(profile: VarianceProfile) -> np.ndarray:
    if not np.array_equal(profile.sigma, np.tile(profile.sigma[:, :1], (1, profile.p2))):
        raise ParameterError("profile is not rows-homoskedastic")
    return profile.sigma[:, 0]


def _require_columns_homoskedastic(profile: VarianceProfile) -> np.ndarray:
    if not np.array_equal(profile.sigma, np.tile(profile.sigma[:1, :], (profile.p1, 1))):
        raise ParameterError("profile is not columns-homoskedastic")
    return profile.sigma[0, :]


def evaluate_bound(bound_id: str, profile: VarianceProfile, params: dict | None = None) -> float:
    """Resolve a bound identifier against a concrete profile.

    Known ids: gaussian, symmetrization, matrix_sum, lower_bound,
    structured_rows, structured_columns, unified_<family>.
    """
    params = dict(params or {})
    s = summarize(profile)
    if bound_id == "gaussian":
        return bounds_mod.gaussian_upper_bound(
            s, eps1=float(params.get("eps1", 0.1)), eps2=float(params.get("eps2", 0.1))
        ).value
    if bound_id == "symmetrization":
        return bounds_mod.baseline_bounds(s, profile.p2)[0].value
    if bound_id == "matrix_sum":
        return bounds_mod.baseline_bounds(s, profile.p2)[1].value
    if bound_id == "lower_bound":
        return bounds_mod.lower_bound_rate(s, profile.p1, profile.p2).value
    if bound_id == "structured_rows":
        return bounds_mod.structured_rates("rows", _require_rows_homoskedastic(profile), profile.p2).value
    if bound_id == "structured_columns":
        return bounds_mod.structured_rates(
            "columns", _require_columns_homoskedastic(profile), profile.p1
        ).value
    if bound_id.startswith("unified_"):
        family = bound_id[len("unified_"):]
        return bounds_mod.unified_bound(
            s,
            family,
            alpha=params.get("alpha"),
            B=params.get("B"),
            p_max=max(profile.p1, profile.p2),
            c0=float(params.get("c0", 1.0)),
        ).value
    raise ParameterError(f"unknown bound id {bound_id!r}")


@dataclass(frozen=True)
class SweepRow:
    name: str
    p1: int
    p2: int
    model: str
    n_reps: int
    mean: float
    std_err: float
    bound_id: str
    bound: float
    ratio: float


def rate_sweep(
    named_profiles: Iterable[tuple[str, VarianceProfile]],
    model: NoiseModel,
    n_reps: int,
    bound_id: str,
    master_seed: int,
    threads: int = 1,
    bound_params: dict | None = None,
) -> list[SweepRow]:
    """One Monte Carlo estimate + bound evaluation per grid point.

    Each grid point runs on its own derived seed, so adding or removing rows
    never perturbs the others.
    """
    rows = []
    model_name = model_to_json_dict(model)["model"]
    for index, (name, profile) in enumerate(named_profiles):
        row_seed = derive_seed(master_seed, _SALT_SWEEP_ROW | index)
        est = estimate_concentration(profile, model, n_reps, row_seed, threads)
        bound = evaluate_bound(bound_id, profile, bound_params)
        ratio = est.mean / bound if bound > 0 else float("nan")
        rows.append(
            SweepRow(
                name=name,
                p1=profile.p1,
                p2=profile.p2,
                model=model_name,
                n_reps=n_reps,
                mean=est.mean,
                std_err=est.std_err,
                bound_id=bound_id,
                bound=bound,
                ratio=ratio,
            )
        )
    return rows


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def sweep_rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["name", "p1", "p2", "model", "n_reps", "mean", "std_err", "bound_id", "bound", "ratio"]
    )
    for r in rows:
        writer.writerow(
            [r.name, r.p1, r.p2, r.model, r.n_reps, _fmt(r.mean), _fmt(r.std_err),
             r.bound_id, _fmt(r.bound), _fmt(r.ratio)]
        )
    return buf.getvalue()


@dataclass(frozen=True)
class ClusteringInstance:
    """Two-component mixture: observation j is labels[j] * mu + noise, with
    independent N(0, sigmas[i]^2) noise in coordinate i."""

    n: int
    p: int
    mu: np.ndarray
    labels: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        labels = np.asarray(self.labels)
        sigmas = np.asarray(self.sigmas, dtype=float)
        if self.n < 1 or self.p < 1:
            raise ParameterError("n and p must be >= 1")
        if mu.shape != (self.p,):
            raise ParameterError(f"mu must have length p = {self.p}")
        if labels.shape != (self.n,) or not np.all(np.isin(labels, (-1, 1))):
            raise ParameterError("labels must be a length-n vector with entries in {-1, +1}")
        if sigmas.shape != (self.p,) or np.any(sigmas < 0):
            raise ParameterError("sigmas must be a length-p nonnegative vector")
        for name, arr in (("mu", mu), ("labels", labels.astype(int)), ("sigmas", sigmas)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def generate_mixture(instance: ClusteringInstance, seed: SampleSeed) -> np.ndarray:
    """n-by-p observation matrix: row j is labels[j] * mu + heteroskedastic noise."""
    rng = generator(seed)
    noise = rng.standard_normal((instance.n, instance.p)) * instance.sigmas[None, :]
    return instance.labels[:, None] * instance.mu[None, :] + noise


def spectral_cluster(Y: np.ndarray) -> np.ndarray:
    """Signs of the leading eigenvector of YY' (zero maps to +1)."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] < 2:
        raise ParameterError("Y must be a 2-d matrix with n >= 2 rows")
    gram = Y @ Y.T
    _, vecs = np.linalg.eigh((gram + gram.T) / 2.0)
    leading = vecs[:, -1]
    return np.where(leading >= 0.0, 1, -1)


def misclassification(labels: np.ndarray, estimate: np.ndarray) -> float:
    """Normalized Hamming distance minimized over a global sign flip; in [0, 1/2]."""
    l = np.asarray(labels)
    lhat = np.asarray(estimate)
    if l.shape != lhat.shape or l.ndim != 1:
        raise ParameterError("label vectors must be 1-d and of equal length")
    if not (np.all(np.isin(l, (-1, 1))) and np.all(np.isin(lhat, (-1, 1)))):
        raise ParameterError("label entries must be -1 or +1")
    disagreements = int(np.sum(l != lhat))
    return min(disagreements, l.size - disagreements) / l.size


@dataclass(frozen=True)
class PhaseRow:
    lam: float
    mean_misclassification: float
    std_err: float
    n_reps: int


def phase_diagram(
    n: int,
    p: int,
    sigmas,
    lambda_grid: Sequence[float],
    n_reps: int,
    master_seed: int,
    direction: np.ndarray | None = None,
    threads: int = 1,
) -> tuple[list[PhaseRow], float]:
    """Mean misclassification per signal strength lambda, plus the SNR threshold.

    mu = lambda * direction (unit vector, first coordinate axis by default);
    labels are drawn uniformly at random for each replicate.  Returns the rows
    and the threshold sigma_* v sigma_tilde / n^(1/4).
    """
    sigmas = np.asarray(sigmas, dtype=float)
    if sigmas.shape != (p,) or np.any(sigmas < 0):
        raise ParameterError("sigmas must be a length-p nonnegative vector")
    if any(lam < 0 for lam in lambda_grid):
        raise ParameterError("lambda grid entries must be nonnegative")
    if direction is None:
        direction = np.zeros(p)
        direction[0] = 1.0
    else:
        direction = np.asarray(direction, dtype=float)
        norm = float(np.linalg.norm(direction))
        if direction.shape != (p,) or norm == 0.0:
            raise ParameterError("direction must be a nonzero length-p vector")
        direction = direction / norm

    sigma_star = float(sigmas.max())
    sigma_tilde = float(np.sum(sigmas**4) ** 0.25)
    threshold = bounds_mod.clustering_rates(1.0, n, sigma_star, sigma_tilde).snr_threshold

    rows = []
    for lam_index, lam in enumerate(lambda_grid):
        lam_seed = derive_seed(master_seed, _SALT_PHASE_LAMBDA | lam_index)
        noise_seed = derive_seed(lam_seed, _SALT_NOISE)
        mu = float(lam) * direction

        def one(rep: int) -> float:
            labels = generator(SampleSeed(lam_seed, rep)).integers(0, 2, size=n) * 2 - 1
            instance = ClusteringInstance(n=n, p=p, mu=mu, labels=labels, sigmas=sigmas)
            Y = generate_mixture(instance, SampleSeed(noise_seed, rep))
            return misclassification(labels, spectral_cluster(Y))

        values = _run_replicates(one, n_reps, threads)
        rows.append(
            PhaseRow(
                lam=float(lam),
                mean_misclassification=float(values.mean()),
                std_err=float(values.std(ddof=1) / math.sqrt(n_reps)) if n_reps > 1 else 0.0,
                n_reps=n_reps,
            )
        )
    return rows, threshold


def phase_rows_to_csv(rows: Sequence[PhaseRow], threshold: float) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["lambda", "mean_misclassification", "std_err", "n_reps", "snr_threshold"])
    for r in rows:
        writer.writerow(
            [_fmt(r.lam), _fmt(r.mean_misclassification), _fmt(r.std_err), r.n_reps, _fmt(threshold)]
        )
    return buf.getvalue()
