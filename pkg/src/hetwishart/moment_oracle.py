"""Exact combinatorial engine behind the trace-moment method.

For a p1-by-p2 Gaussian matrix Z with independent N(0, sigma_ij^2) entries,
the centered Gram trace moment expands over closed walks on the complete
bipartite graph [p1] x [p2]:

    E tr{(ZZ' - E ZZ')^q}
        = sum over cycles c of  prod_k sigma_{u_k,v_k} sigma_{u_{k+1},v_k}
          * prod_{(i,j)} E G^{alpha_ij(c)} (G^2-1)^{beta_ij(c)},

where a cycle is u_1 -> v_1 -> u_2 -> ... -> u_q -> v_q -> u_1, alpha_ij
counts steps visiting edge (i, j) exactly once, beta_ij counts back-and-forth
steps u_k = u_{k+1}, and G is standard normal.  Everything here evaluates that
expansion exactly: Gaussian moments in exact integer arithmetic, cycles by a
streaming odometer, sums by compensated (exactly rounded) summation.

The comparison checks at the bottom verify, at desk scale, the inequalities
this machinery is used to prove: the homoskedastic comparison, variance
contraction under row merging, diagonal-deletion comparison, and the paired
moment inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator

import numpy as np

from .errors import ParameterError, SizeGuardError
from .profiles import VarianceProfile

__all__ = [
    "MAX_GAUSSIAN_ORDER",
    "MAX_HEAVY_TAIL_ORDER",
    "ENUMERATION_GUARD",
    "ENVELOPE_CONSTANT",
    "double_factorial",
    "gaussian_moment",
    "heavy_tail_moment",
    "BipartiteCycle",
    "EdgeStatistics",
    "CycleShape",
    "edge_statistics",
    "shape_of",
    "enumerate_cycles",
    "cycle_count",
    "exact_trace_moment",
    "exact_trace_moment_by_shape",
    "exact_deleted_diagonal_trace_moment",
    "ComparisonResult",
    "check_gaussian_comparison",
    "check_variance_contraction",
    "check_diagonal_deletion",
    "check_paired_moment",
    "subgaussian_moment_envelope",
]

MAX_GAUSSIAN_ORDER = 64      # guard on alpha + 2*beta for exact integer moments
MAX_HEAVY_TAIL_ORDER = 40    # guard for the Gamma-based heavy-tail moments
ENUMERATION_GUARD = 10**8    # max number of cycles any enumeration may touch
ENVELOPE_CONSTANT = 3.0      # calibrated constant in the sub-Gaussian moment envelope

_REL_SLACK = 1e-12
_COMPARISON_SLACK = 1e-9     # lhs <= rhs * (1 + slack) absorbs float roundoff


def double_factorial(k: int) -> int:
    """k!! = k (k-2) (k-4) ... with the conventions (-1)!! = 1, (-3)!! = -1."""
    if k == -1:
        return 1
    if k == -3:
        return -1
    if k < -3:
        raise ParameterError(f"double factorial undefined for k = {k}")
    result = 1
    while k > 1:
        result *= k
        k -= 2
    return result


@lru_cache(maxsize=None)
def gaussian_moment(alpha: int, beta: int) -> int:
    """Exact E G^alpha (G^2 - 1)^beta for standard normal G.

    Expanding the binomial and using E G^d = (d-1)!! for even d gives

        sum_{j=0}^{beta} (-1)^j C(beta, j) (alpha + 2 beta - 2j - 1)!!,

    an exact integer.  Zero for odd alpha, and for (alpha, beta) = (0, 1).
    Satisfies the sandwich (alpha+2beta-3)!!(alpha+beta-1) <= value
    <= (alpha+2beta-1)!! for even alpha with alpha + 2 beta >= 2.
    """
    if alpha < 0 or beta < 0:
        raise ParameterError("alpha and beta must be nonnegative integers")
    if alpha + 2 * beta > MAX_GAUSSIAN_ORDER:
        raise SizeGuardError(
            f"alpha + 2*beta = {alpha + 2 * beta} exceeds the exact-arithmetic guard {MAX_GAUSSIAN_ORDER}"
        )
    if alpha % 2 == 1:
        return 0
    return sum(
        (-1) ** j * math.comb(beta, j) * double_factorial(alpha + 2 * beta - 2 * j - 1)
        for j in range(beta + 1)
    )


def heavy_tail_moment(alpha: int, beta: int, b: float) -> float:
    """E F^alpha (F^2 - 1)^beta for F = G |H|^(b-1), G, H independent N(0,1).

    For even x, E F^x = (x-1)!! * 2^((b-1)x/2) * Gamma(((b-1)x + 1)/2) / sqrt(pi),
    and the result is the alternating binomial sum over x_j = alpha + 2 beta - 2j.
    F has a stretched-exponential tail with Orlicz exponent 2/b; b = 1 is the
    Gaussian case and is returned exactly from ``gaussian_moment``.
    """
    if alpha < 0 or beta < 0:
        raise ParameterError("alpha and beta must be nonnegative integers")
    if b < 1.0:
        raise ParameterError("b must be >= 1")
    order = alpha + 2 * beta
    if order > MAX_HEAVY_TAIL_ORDER:
        raise SizeGuardError(
            f"alpha + 2*beta = {order} exceeds the heavy-tail guard {MAX_HEAVY_TAIL_ORDER}"
        )
    if alpha % 2 == 1:
        return 0.0
    if b == 1.0:
        return float(gaussian_moment(alpha, beta))
    if (b - 1.0) * order + 1.0 > 340.0:
        raise SizeGuardError(f"Gamma argument overflow for b = {b}, alpha + 2*beta = {order}")
    sqrt_pi = math.sqrt(math.pi)
    terms = []
    for j in range(beta + 1):
        x = order - 2 * j
        exact = (-1) ** j * math.comb(beta, j) * double_factorial(x - 1)
        scale = 2.0 ** ((b - 1.0) * x / 2.0) * math.gamma(((b - 1.0) * x + 1.0) / 2.0) / sqrt_pi
        terms.append(exact * scale)
    return math.fsum(terms)


@dataclass(frozen=True)
class BipartiteCycle:
    """Closed walk u_1 -> v_1 -> u_2 -> ... -> u_q -> v_q -> u_1; indices cyclic."""

    u: tuple[int, ...]
    v: tuple[int, ...]

    def __post_init__(self):
        if len(self.u) != len(self.v) or len(self.u) < 1:
            raise ParameterError("u and v must have equal length q >= 1")

    @property
    def q(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class EdgeStatistics:
    """Per-edge visit counts: alpha single visits, beta back-and-forth visits."""

    alpha: dict[tuple[int, int], int]
    beta: dict[tuple[int, int], int]


@dataclass(frozen=True)
class CycleShape:
    """Relabeled canonical form of a cycle plus its counting statistics.

    Left and right vertices are relabeled independently, in order of first
    appearance, starting from 0.  m_ab maps (alpha, beta) to the number of
    visited edges with exactly those counts.
    """

    canonical: BipartiteCycle
    m_L: int
    m_R: int
    m_ab: tuple[tuple[tuple[int, int], int], ...]

    def m_ab_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.m_ab)


def edge_statistics(cycle: BipartiteCycle) -> EdgeStatistics:
    """Count, per edge (i, j), single visits (alpha) and back-and-forth visits (beta)."""
    alpha: dict[tuple[int, int], int] = {}
    beta: dict[tuple[int, int], int] = {}
    u, v, q = cycle.u, cycle.v, cycle.q
    for k in range(q):
        uk, vk, unext = u[k], v[k], u[(k + 1) % q]
        if uk == unext:
            edge = (uk, vk)
            beta[edge] = beta.get(edge, 0) + 1
        else:
            e1, e2 = (uk, vk), (unext, vk)
            alpha[e1] = alpha.get(e1, 0) + 1
            alpha[e2] = alpha.get(e2, 0) + 1
    return EdgeStatistics(alpha, beta)


def shape_of(cycle: BipartiteCycle) -> CycleShape:
    """Canonical shape: relabel left/right vertices by first appearance."""
    lmap: dict[int, int] = {}
    rmap: dict[int, int] = {}
    cu = []
    cv = []
    for uk, vk in zip(cycle.u, cycle.v):
        if uk not in lmap:
            lmap[uk] = len(lmap)
        if vk not in rmap:
            rmap[vk] = len(rmap)
        cu.append(lmap[uk])
        cv.append(rmap[vk])
    canonical = BipartiteCycle(tuple(cu), tuple(cv))
    stats = edge_statistics(canonical)
    edges = set(stats.alpha) | set(stats.beta)
    counts: dict[tuple[int, int], int] = {}
    for edge in edges:
        key = (stats.alpha.get(edge, 0), stats.beta.get(edge, 0))
        counts[key] = counts.get(key, 0) + 1
    m_ab = tuple(sorted(counts.items()))
    return CycleShape(canonical, len(lmap), len(rmap), m_ab)


def cycle_count(p1: int, p2: int, q: int) -> int:
    return (p1 * p2) ** q


def _guard_enumeration(p1: int, p2: int, q: int) -> int:
    if q < 1:
        raise ParameterError("q must be >= 1")
    count = cycle_count(p1, p2, q)
    if count > ENUMERATION_GUARD:
        raise SizeGuardError(
            f"enumeration of {count} cycles exceeds the guard {ENUMERATION_GUARD}"
        )
    return count


def _iter_raw(p1: int, p2: int, q: int, first_left: int | None = None):
    left = product(range(p1), repeat=q) if first_left is None else (
        (first_left,) + rest for rest in product(range(p1), repeat=q - 1)
    )
    for u in left:
        for v in product(range(p2), repeat=q):
            yield u, v


def enumerate_cycles(
    p1: int, p2: int, q: int, first_left: int | None = None
) -> Iterator[BipartiteCycle]:
    """Stream all (p1*p2)^q length-2q cycles exactly once (odometer order).

    ``first_left`` restricts to cycles with u_1 fixed, the partitioning unit
    for parallel enumeration.
    """
    _guard_enumeration(p1, p2, q)
    if first_left is not None and not 0 <= first_left < p1:
        raise ParameterError(f"first_left must be in [0, {p1})")
    for u, v in _iter_raw(p1, p2, q, first_left):
        yield BipartiteCycle(u, v)


def _sigma_rows(profile: VarianceProfile) -> list[list[float]]:
    return [[float(x) for x in row] for row in profile.sigma]


def _cycle_weight_terms(sig, u, v, q):
    """(sigma product, edge-count dict) for one raw cycle; None if sigma product is 0."""
    s = 1.0
    for k in range(q):
        s *= sig[u[k]][v[k]] * sig[u[(k + 1) % q]][v[k]]
        if s == 0.0:
            return None
    counts: dict[tuple[int, int], list[int]] = {}
    for k in range(q):
        uk, vk, unext = u[k], v[k], u[(k + 1) % q]
        if uk == unext:
            c = counts.setdefault((uk, vk), [0, 0])
            c[1] += 1
        else:
            c = counts.setdefault((uk, vk), [0, 0])
            c[0] += 1
            c = counts.setdefault((unext, vk), [0, 0])
            c[0] += 1
    return s, counts


def exact_trace_moment(
    profile: VarianceProfile, q: int, first_left: int | None = None
) -> float:
    """Exact E tr{(ZZ' - E ZZ')^q} for independent Gaussian entries.

    Sums the bipartite-cycle expansion with exact integer Gaussian moments;
    the outer sum is exactly rounded (fsum), so the result is independent of
    enumeration order.  q = 1 gives exactly 0 (the matrix is centered).
    ``first_left`` restricts to cycles starting at a given left vertex;
    the full moment is the sum of the p1 restricted ones.
    """
    _guard_enumeration(profile.p1, profile.p2, q)
    sig = _sigma_rows(profile)

    def terms():
        for u, v in _iter_raw(profile.p1, profile.p2, q, first_left):
            w = _cycle_weight_terms(sig, u, v, q)
            if w is None:
                continue
            s, counts = w
            m = 1
            for a, b in counts.values():
                g = gaussian_moment(a, b)
                if g == 0:
                    m = 0
                    break
                m *= g
            if m:
                yield s * m

    return math.fsum(terms())


def exact_trace_moment_by_shape(profile: VarianceProfile, q: int) -> float:
    """Same moment, evaluated by grouping cycles with a common shape.

    Each shape's Gaussian-moment product is computed once and multiplied by
    the sum of sigma products over its cycles; agreement with the per-cycle
    route checks the grouping identity the expansion relies on.
    """
    _guard_enumeration(profile.p1, profile.p2, q)
    sig = _sigma_rows(profile)
    sums: dict[tuple, list[float]] = {}
    moments: dict[tuple, int] = {}
    for u, v in _iter_raw(profile.p1, profile.p2, q):
        w = _cycle_weight_terms(sig, u, v, q)
        if w is None:
            continue
        s, _ = w
        shape = shape_of(BipartiteCycle(u, v))
        key = (shape.canonical.u, shape.canonical.v)
        if key not in moments:
            m = 1
            for (a, b), count in shape.m_ab:
                m *= gaussian_moment(a, b) ** count
            moments[key] = m
        if moments[key]:
            sums.setdefault(key, []).append(s)
    return math.fsum(moments[key] * math.fsum(vals) for key, vals in sums.items())


def exact_deleted_diagonal_trace_moment(profile: VarianceProfile, q: int) -> float:
    """Exact E tr{(D(ZZ'))^q} where D zeroes the diagonal of the (uncentered) Gram.

    Only cycles with u_k != u_{k+1} at every step contribute, and the edge
    factors are plain Gaussian moments E G^alpha = (alpha-1)!!.
    """
    _guard_enumeration(profile.p1, profile.p2, q)
    if profile.p1 == 1:
        return 0.0
    sig = _sigma_rows(profile)

    def terms():
        for u in product(range(profile.p1), repeat=q):
            if any(u[k] == u[(k + 1) % q] for k in range(q)):
                continue
            for v in product(range(profile.p2), repeat=q):
                s = 1.0
                for k in range(q):
                    s *= sig[u[k]][v[k]] * sig[u[(k + 1) % q]][v[k]]
                    if s == 0.0:
                        break
                if s == 0.0:
                    continue
                counts: dict[tuple[int, int], int] = {}
                for k in range(q):
                    for edge in ((u[k], v[k]), (u[(k + 1) % q], v[k])):
                        counts[edge] = counts.get(edge, 0) + 1
                m = 1
                for a in counts.values():
                    if a % 2 == 1:
                        m = 0
                        break
                    m *= double_factorial(a - 1)
                if m:
                    yield s * m

    return math.fsum(terms())


@dataclass(frozen=True)
class ComparisonResult:
    lhs: float
    rhs: float
    holds: bool
    cycles_enumerated: int


def _ones_profile(m1: int, m2: int) -> VarianceProfile:
    return VarianceProfile(np.ones((m1, m2)))


@lru_cache(maxsize=128)
def _ones_trace_moment(m1: int, m2: int, q: int) -> float:
    return exact_trace_moment(_ones_profile(m1, m2), q)


@lru_cache(maxsize=128)
def _ones_deleted_trace_moment(p1: int, m: int, q: int) -> float:
    return exact_deleted_diagonal_trace_moment(_ones_profile(p1, m), q)


def _ceil_tol(x: float) -> int:
    return int(math.ceil(x * (1.0 - _REL_SLACK) - _REL_SLACK))


def check_gaussian_comparison(profile: VarianceProfile, q: int) -> ComparisonResult:
    """Verify the heteroskedastic-vs-standard Wishart trace-moment comparison.

    With m1 = ceil(sigma_C^2) + q - 1, m2 = ceil(sigma_R^2) + q - 1 and H an
    m1-by-m2 standard Gaussian matrix,

        E tr{(ZZ' - E ZZ')^q} <= (p1/m1 ^ p2/m2) E tr{(HH' - E HH')^q}.

    Requires sigma_* <= 1 (the comparison is stated in entrywise-normalized
    scale; the ceilings make it non-equivariant under rescaling).
    """
    var = profile.variances()
    sigma_star = float(profile.sigma.max())
    if sigma_star > 1.0 + _REL_SLACK:
        raise ParameterError("comparison requires sigma_* <= 1; rescale the profile first")
    m1 = _ceil_tol(float(var.sum(axis=0).max())) + q - 1
    m2 = _ceil_tol(float(var.sum(axis=1).max())) + q - 1
    m1 = max(m1, 1)
    m2 = max(m2, 1)
    n_cycles = _guard_enumeration(profile.p1, profile.p2, q) + _guard_enumeration(m1, m2, q)
    lhs = exact_trace_moment(profile, q)
    rhs = min(profile.p1 / m1, profile.p2 / m2) * _ones_trace_moment(m1, m2, q)
    return ComparisonResult(lhs, rhs, lhs <= rhs * (1.0 + _COMPARISON_SLACK), n_cycles)


def merge_last_rows(profile: VarianceProfile) -> VarianceProfile:
    """Replace the last two rows by one row with summed variances."""
    if profile.p1 < 2:
        raise ParameterError("need p1 >= 2 to merge the last two rows")
    var = profile.variances()
    merged = np.vstack([var[:-2], var[-2] + var[-1]])
    return VarianceProfile(np.sqrt(merged))


def check_variance_contraction(profile: VarianceProfile, q: int) -> ComparisonResult:
    """Verify that merging the last two rows cannot decrease the trace moment.

    The merged matrix has one fewer row; its last row's variance is the sum of
    the two merged rows' variances.  Checked in expectation (both sides via
    the exact oracle).
    """
    merged = merge_last_rows(profile)
    n_cycles = _guard_enumeration(profile.p1, profile.p2, q) + _guard_enumeration(
        merged.p1, merged.p2, q
    )
    lhs = exact_trace_moment(profile, q)
    rhs = exact_trace_moment(merged, q)
    return ComparisonResult(lhs, rhs, lhs <= rhs * (1.0 + _COMPARISON_SLACK), n_cycles)


def check_diagonal_deletion(profile: VarianceProfile, q: int) -> ComparisonResult:
    """Verify the diagonal-deleted comparison against a standard Gaussian block.

    Column bounds sigma_j = max_i sigma_ij (requires sigma_* <= 1); with
    m = ceil(sum_j sigma_j^4) + q - 1 and H a p1-by-m standard Gaussian matrix,

        E tr{(D(ZZ'))^q} <= E tr{(D(HH'))^q}.
    """
    sigma_star = float(profile.sigma.max())
    if sigma_star > 1.0 + _REL_SLACK:
        raise ParameterError("diagonal-deletion comparison requires sigma_* <= 1")
    col_bounds = profile.sigma.max(axis=0)
    m = max(1, _ceil_tol(float(np.sum(col_bounds**4))) + q - 1)
    n_cycles = _guard_enumeration(profile.p1, profile.p2, q) + _guard_enumeration(
        profile.p1, m, q
    )
    lhs = exact_deleted_diagonal_trace_moment(profile, q)
    rhs = _ones_deleted_trace_moment(profile.p1, m, q)
    return ComparisonResult(lhs, rhs, lhs <= rhs * (1.0 + _COMPARISON_SLACK), n_cycles)


def check_paired_moment(x1: int, x2: int, x3: int, x4: int, x5: int) -> ComparisonResult:
    """Verify the paired-moment inequality for independent standard normals:

        |E Z1^(x1+x5) (Z1^2-1)^x3| * |E Z2^(x2+x5) (Z2^2-1)^x4|
            <= E G^(x1+x2) (G^2-1)^(x3+x4+x5).
    """
    xs = (x1, x2, x3, x4, x5)
    if any(x < 0 for x in xs):
        raise ParameterError("x1..x5 must be nonnegative integers")
    if x1 + x2 + 2 * (x3 + x4 + x5) > MAX_HEAVY_TAIL_ORDER:
        raise SizeGuardError("total order exceeds the paired-moment guard")
    lhs = abs(gaussian_moment(x1 + x5, x3) * gaussian_moment(x2 + x5, x4))
    rhs = gaussian_moment(x1 + x2, x3 + x4 + x5)
    return ComparisonResult(float(lhs), float(rhs), lhs <= rhs + 1e-12, 0)


def subgaussian_moment_envelope(
    alpha: int, beta: int, kappa: float, envelope_constant: float = ENVELOPE_CONSTANT
) -> float:
    """Diagnostic envelope (C kappa)^(alpha+2beta) E G^alpha (G^2-1)^beta.

    kappa is the moment-based norm sup_q q^(-1/2) (E|Z|^q)^(1/q) of the
    standardized entry; any unit-variance variable has kappa >= 1/sqrt(2).
    The constant C is calibration, not a proved optimum.
    """
    if kappa < 1.0 / math.sqrt(2.0) - 1e-12:
        raise ParameterError("kappa must be >= 1/sqrt(2) for a unit-variance variable")
    if alpha % 2 == 1:
        return 0.0
    return (envelope_constant * kappa) ** (alpha + 2 * beta) * gaussian_moment(alpha, beta)
