"""Discrete score distributions and the generators used by the worked example.

All types are immutable after construction (arrays are copied and marked
read-only) and every operation is pure, so the whole module is safe to use
from concurrent threads without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DomainError, StructuralError

PROB_SUM_TOL = 1e-12
PRIOR_CONSISTENCY_TOL = 1e-10


def _validated_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise StructuralError(f"{name} must be one-dimensional")
    if arr.size == 0:
        raise StructuralError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must contain only finite values")
    arr.setflags(write=False)
    return arr


def _require_shared_support(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape or not np.array_equal(a, b):
        raise StructuralError(f"{what} must share the same support")


@dataclass(frozen=True, eq=False)
class DiscreteScoreDist:
    """Probability mass over a strictly increasing, finite score support."""

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "support", _validated_array(self.support, "support"))
        object.__setattr__(self, "probs", _validated_array(self.probs, "probs"))
        if self.support.size != self.probs.size:
            raise StructuralError("support and probs must have the same length")
        if self.support.size > 1 and np.any(np.diff(self.support) <= 0):
            raise StructuralError("support must be strictly increasing (no duplicates)")
        if np.any(self.probs < 0):
            raise DomainError("probs must be non-negative")
        if abs(float(self.probs.sum()) - 1.0) > PROB_SUM_TOL:
            raise DomainError("probs must sum to 1 within 1e-12")

    @property
    def n(self) -> int:
        return int(self.support.size)


@dataclass(frozen=True, eq=False)
class PosteriorCurve:
    """Class-1 posterior probabilities attached to a score support."""

    support: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "support", _validated_array(self.support, "support"))
        object.__setattr__(self, "values", _validated_array(self.values, "values"))
        if self.support.size != self.values.size:
            raise StructuralError("support and values must have the same length")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise DomainError("posterior values must lie in [0, 1]")

    def is_interior(self) -> bool:
        """True when every value is strictly inside (0, 1).

        Solver-based recalibration methods require this of the source curve.
        """
        return bool(np.all(self.values > 0.0) and np.all(self.values < 1.0))


@dataclass(frozen=True, eq=False)
class SourceModel:
    """Source feature distribution, its posterior curve and class-1 prior.

    The prior must equal the mean of the posterior under the feature
    distribution (auto-calibration consistency) within 1e-10.
    """

    feature_dist: DiscreteScoreDist
    posterior: PosteriorCurve
    prior: float

    def __post_init__(self):
        _require_shared_support(
            self.feature_dist.support, self.posterior.support, "feature_dist and posterior"
        )
        if not (0.0 < self.prior < 1.0):
            raise DomainError("source prior must lie strictly inside (0, 1)")
        implied = float(np.dot(self.feature_dist.probs, self.posterior.values))
        if abs(implied - self.prior) > PRIOR_CONSISTENCY_TOL:
            raise DomainError(
                "source prior must equal the posterior mean under the feature "
                f"distribution within 1e-10 (prior={self.prior!r}, mean={implied!r})"
            )

    @property
    def support(self) -> np.ndarray:
        return self.feature_dist.support


@dataclass(frozen=True, eq=False)
class TargetSpec:
    """Target feature distribution and class-1 prior; labels unobserved."""

    feature_dist: DiscreteScoreDist
    prior: float

    def __post_init__(self):
        if not (0.0 < self.prior < 1.0):
            raise DomainError("target prior must lie strictly inside (0, 1)")

    @property
    def support(self) -> np.ndarray:
        return self.feature_dist.support


def binomial_dist(trials: int, success_prob: float, support_map=None) -> DiscreteScoreDist:
    """Binomial pmf over k = 0..trials as a DiscreteScoreDist.

    ``support_map`` optionally relabels the support with trials+1 strictly
    increasing score values. The pmf is computed from exact binomial
    coefficients, so it matches an iterated Bernoulli convolution to float
    precision.
    """
    if int(trials) != trials or trials < 1:
        raise DomainError("trials must be a positive integer")
    trials = int(trials)
    if not np.isfinite(success_prob) or not (0.0 < success_prob < 1.0):
        raise DomainError("success_prob must be finite and strictly inside (0, 1)")
    k = np.arange(trials + 1)
    coeffs = np.array([comb(trials, int(j)) for j in k], dtype=float)
    pmf = coeffs * success_prob**k * (1.0 - success_prob) ** (trials - k)
    if support_map is None:
        support = k.astype(float)
    else:
        support = np.asarray(support_map, dtype=float)
        if support.ndim != 1 or support.size != trials + 1:
            raise StructuralError("support_map must provide trials + 1 score values")
    return DiscreteScoreDist(support, pmf)


def vasicek_mixture_dist(
    trials: int, mean: float, correlation: float, quad_nodes: int = 128
) -> DiscreteScoreDist:
    """Binomial pmf mixed over a Vasicek-distributed success probability.

    The success probability is V(z) = ndtr((ndtri(mean) - sqrt(corr) * z)
    / sqrt(1 - corr)) for a standard normal z, the one-factor law with the
    given mean. The mixture integral is evaluated by Gauss-Hermite quadrature
    and the pmf is renormalized.
    """
    if int(trials) != trials or trials < 1:
        raise DomainError("trials must be a positive integer")
    trials = int(trials)
    if not np.isfinite(mean) or not (0.0 < mean < 1.0):
        raise DomainError("mean must be finite and strictly inside (0, 1)")
    if not np.isfinite(correlation) or not (0.0 < correlation < 1.0):
        raise DomainError(
            "correlation must lie strictly inside (0, 1); "
            "request the degenerate case as a plain binomial instead"
        )
    if int(quad_nodes) != quad_nodes or quad_nodes < 16:
        raise DomainError("quad_nodes must be an integer >= 16")
    nodes, weights = np.polynomial.hermite.hermgauss(int(quad_nodes))
    z = np.sqrt(2.0) * nodes
    w = weights / np.sqrt(np.pi)
    succ = ndtr((ndtri(mean) - np.sqrt(correlation) * z) / np.sqrt(1.0 - correlation))
    k = np.arange(trials + 1)
    coeffs = np.array([comb(trials, int(j)) for j in k], dtype=float)
    # rows: quadrature nodes, columns: k
    pmf_rows = coeffs * succ[:, None] ** k * (1.0 - succ[:, None]) ** (trials - k)
    pmf = w @ pmf_rows
    pmf = pmf / pmf.sum()
    return DiscreteScoreDist(k.astype(float), pmf)


def mean_under(dist: DiscreteScoreDist, curve: PosteriorCurve) -> float:
    """Expectation of the curve values under the distribution."""
    _require_shared_support(dist.support, curve.support, "dist and curve")
    return float(np.dot(dist.probs, curve.values))
