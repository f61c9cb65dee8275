"""Deterministic numerical machinery shared by the recalibration methods.

Everything here is stateless and bit-reproducible: identical inputs give
identical outputs, with no randomness and no global state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit, logit, ndtr, ndtri

from .auc_engine import implied_auc_values
from .dist_core import PosteriorCurve, TargetSpec
from .errors import DegenerateClassError, DomainError, InfeasibleError, NoRootError

MAX_EXPANSIONS = 60
MAX_BISECT_ITER = 260


@dataclass(frozen=True)
class SolverSettings:
    """Tolerances and iteration caps used across the solvers.

    Defaults leave three-plus orders of headroom below the three-decimal
    reporting precision of the results table.
    """

    tol_mean: float = 1e-9
    tol_auc: float = 1e-6
    tol_fixed_point: float = 1e-10
    max_iter: int = 200


DEFAULT_SETTINGS = SolverSettings()


@dataclass(frozen=True)
class SolveDiagnostics:
    """Outcome record of a solver run.

    ``converged`` being True implies every applicable residual met its
    tolerance; residuals that do not apply to a method are ``None``.
    ``bracket`` records the sign-change interval used by the outer search of
    the two-parameter solve so multiple-solution situations stay detectable.
    """

    iterations: int
    converged: bool
    residual_mean: float | None = None
    residual_auc: float | None = None
    residual_fixed_point: float | None = None
    bracket: tuple[float, float] | None = None


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
    *,
    expand_lo: bool = True,
    expand_hi: bool = True,
    max_expansions: int = MAX_EXPANSIONS,
) -> float:
    """Bracketed bisection for a root of a monotone scalar function.

    Returns x with |f(x)| <= tol or bracket width <= tol * max(1, |x|). When
    f(lo) and f(hi) do not differ in sign, the bracket is widened
    geometrically on the permitted sides (each round extends by the current
    width) up to ``max_expansions`` rounds; failure to find a sign change
    raises :class:`NoRootError` carrying the probed interval.
    """
    if not np.isfinite(lo) or not np.isfinite(hi) or lo > hi:
        raise DomainError("bisect_root needs a finite interval with lo <= hi")
    flo = float(f(lo))
    fhi = float(f(hi))
    if lo == hi:
        if abs(flo) <= tol:
            return lo
        raise NoRootError(
            "degenerate interval does not satisfy the tolerance", probed_interval=(lo, hi)
        )
    expansions = 0
    while flo * fhi > 0.0:
        if expansions >= max_expansions or not (expand_lo or expand_hi):
            raise NoRootError(
                f"no sign change over [{lo!r}, {hi!r}] after {expansions} expansions",
                probed_interval=(lo, hi),
            )
        width = hi - lo
        if expand_lo:
            lo = lo - width
            flo = float(f(lo))
        if expand_hi:
            hi = hi + width
            fhi = float(f(hi))
        expansions += 1
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    for _ in range(MAX_BISECT_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval collapsed to adjacent floats
            break
        fmid = float(f(mid))
        if abs(fmid) <= tol:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
        if (hi - lo) <= tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class TransformFamily:
    """A one-link parametric transform eta = link(a * x + b) in solver form.

    ``make_x`` maps the source posterior values to the per-point regressor x
    (it may ignore them when x is attached to the support instead, as in the
    two-parameter scheme). The solver works with an internal slope alpha >= 0
    so the transform is non-decreasing in x; ``literal_sign`` maps the
    internal (alpha, beta) to the family's literal (a, b) convention.
    """

    name: str
    link: Callable[[np.ndarray], np.ndarray]
    make_x: Callable[[np.ndarray], np.ndarray]
    slope_may_vanish: bool
    literal_sign: float = 1.0

    def x_values(self, source_values: np.ndarray) -> np.ndarray:
        x = np.asarray(self.make_x(source_values), dtype=float)
        if not np.all(np.isfinite(x)):
            raise DomainError(
                f"{self.name}: transform regressor is not finite; "
                "source posterior values must lie strictly inside (0, 1)"
            )
        return x

    def to_literal(self, alpha: float, beta: float) -> tuple[float, float]:
        return self.literal_sign * alpha, self.literal_sign * beta

    def posterior_values(self, source_values: np.ndarray, a: float, b: float) -> np.ndarray:
        x = self.x_values(source_values)
        alpha = self.literal_sign * a
        beta = self.literal_sign * b
        return np.asarray(self.link(alpha * x + beta), dtype=float)


def platt_family() -> TransformFamily:
    """eta = sigmoid(a * u + b) on the raw posterior values; a >= 0."""
    return TransformFamily("platt", expit, lambda u: u, slope_may_vanish=True)


def logistic_cspd_family() -> TransformFamily:
    """eta = sigmoid(a * logit(u) + b); strictly increasing needs a > 0."""
    return TransformFamily("logistic_cspd", expit, logit, slope_may_vanish=False)


def normal_cspd_family() -> TransformFamily:
    """eta = ndtr(a * ndtri(u) + b); strictly increasing needs a > 0."""
    return TransformFamily("normal_cspd", ndtr, ndtri, slope_may_vanish=False)


def rob_logit_family(f0_values: np.ndarray) -> TransformFamily:
    """eta_i = 1 / (1 + exp(b + a * ndtri(f0_i))) attached to support points.

    The transform as written is decreasing in the probit of the class-0 CDF
    for a > 0, so the solver works with the sign-flipped internal slope and
    reports the literal (a, b); net effect on the score stays increasing.
    """
    z = ndtri(np.asarray(f0_values, dtype=float))
    return TransformFamily(
        "rob_logit", expit, lambda _u: z, slope_may_vanish=True, literal_sign=-1.0
    )


def solve_qmm_2d(
    family: TransformFamily,
    source_auc_target: float,
    q: float,
    target: TargetSpec,
    source_curve: PosteriorCurve,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> tuple[float, float, SolveDiagnostics]:
    """Fit (a, b) so the transformed curve has mean q and the target AUC.

    Nested solve: for fixed slope the intercept is found by bisection on the
    mean equation, which is strictly monotone because the link is a strictly
    increasing distribution function; the slope is then found by a bracketed
    search on the AUC residual. The slope bracket starts at 1 and expands
    geometrically, capped at 2**60 on either side; if no sign change exists
    an :class:`InfeasibleError` reports the attainable AUC range instead of
    silently clamping.
    """
    weights = target.feature_dist.probs
    x = family.x_values(source_curve.values)
    tol_auc = settings.tol_auc
    evals = 0

    def probe(alpha: float):
        """Solve the mean equation at a fixed slope.

        Returns (auc, beta, healthy): healthy is False when float exhaustion
        keeps the intercept from pinning the mean (extreme slopes make the
        transform a hard step between adjacent representable intercepts), or
        when the resulting values saturate a whole class. Unhealthy probes
        mark the numerically attainable edge of the family.
        """
        nonlocal evals
        evals += 1

        def mean_resid(beta: float) -> float:
            return float(np.dot(weights, family.link(alpha * x + beta))) - q

        try:
            beta = bisect_root(mean_resid, -2.0, 2.0, settings.tol_mean)
        except NoRootError:
            return np.nan, np.nan, False
        values = family.link(alpha * x + beta)
        if abs(float(np.dot(weights, values)) - q) > settings.tol_mean:
            return np.nan, beta, False
        try:
            auc = implied_auc_values(weights, values)
        except DegenerateClassError:
            return np.nan, beta, False
        return auc, beta, True

    def residual(auc: float) -> float:
        return auc - source_auc_target

    # a constant transform (slope 0) has AUC exactly 1/2; families that admit
    # it get the exact degenerate solution instead of a bracketed search
    if family.slope_may_vanish and abs(residual(0.5)) <= tol_auc:
        auc0, beta0, healthy0 = probe(0.0)
        a, b = family.to_literal(0.0, beta0)
        diag = SolveDiagnostics(
            iterations=evals,
            converged=healthy0 and abs(residual(auc0)) <= tol_auc,
            residual_mean=abs(float(np.dot(weights, family.link(0.0 * x + beta0))) - q),
            residual_auc=abs(residual(auc0)),
            bracket=(0.0, 0.0),
        )
        return a, b, diag

    # bracket the slope around 1, expanding geometrically on the side where
    # the AUC residual keeps its sign; upward expansion stops early at the
    # last slope the mean equation can still be solved for
    lo = hi = 1.0
    auc_lo, beta_lo, healthy = probe(lo)
    if not healthy:
        raise InfeasibleError(
            f"{family.name}: mean equation insoluble at unit slope; "
            "the transform family is numerically exhausted"
        )
    auc_hi, beta_hi = auc_lo, beta_lo
    if residual(auc_lo) < -tol_auc:
        for _ in range(MAX_EXPANSIONS):
            trial = hi * 2.0
            auc_trial, beta_trial, healthy = probe(trial)
            if not healthy:
                break  # numerically attainable edge reached
            hi, auc_hi, beta_hi = trial, auc_trial, beta_trial
            if residual(auc_hi) >= -tol_auc:
                break
    elif residual(auc_lo) > tol_auc:
        for _ in range(MAX_EXPANSIONS):
            trial = lo / 2.0
            auc_trial, beta_trial, healthy = probe(trial)
            if not healthy:
                break
            lo, auc_lo, beta_lo = trial, auc_trial, beta_trial
            if residual(auc_lo) <= tol_auc:
                break
        if residual(auc_lo) > tol_auc and family.slope_may_vanish:
            auc_trial, beta_trial, healthy = probe(0.0)
            if healthy:
                lo, auc_lo, beta_lo = 0.0, auc_trial, beta_trial

    bracket = (lo, hi)
    if abs(residual(auc_hi)) <= tol_auc:
        alpha, beta, auc = hi, beta_hi, auc_hi
    elif abs(residual(auc_lo)) <= tol_auc:
        alpha, beta, auc = lo, beta_lo, auc_lo
    elif residual(auc_lo) * residual(auc_hi) > 0.0:
        observed = (min(auc_lo, auc_hi), max(auc_lo, auc_hi))
        raise InfeasibleError(
            f"{family.name}: target AUC {source_auc_target!r} lies outside the AUC "
            f"range [{observed[0]!r}, {observed[1]!r}] attained over the probed slopes",
            attainable_auc_range=observed,
        )
    else:
        alpha, beta, auc = hi, beta_hi, auc_hi
        for _ in range(MAX_BISECT_ITER):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            auc_mid, beta_mid, healthy = probe(mid)
            if not healthy:
                hi = mid  # hardness grows with the slope; retreat downward
                continue
            alpha, beta, auc = mid, beta_mid, auc_mid
            if abs(residual(auc_mid)) <= tol_auc:
                break
            if residual(auc_mid) > 0.0:
                hi = mid
            else:
                lo = mid
            if (hi - lo) <= 1e-14 * max(1.0, abs(mid)):
                break

    mean = float(np.dot(weights, family.link(alpha * x + beta)))
    residual_mean = abs(mean - q)
    residual_auc = abs(auc - source_auc_target)
    a, b = family.to_literal(alpha, beta)
    lit_lo = family.literal_sign * bracket[0]
    lit_hi = family.literal_sign * bracket[1]
    diag = SolveDiagnostics(
        iterations=evals,
        converged=residual_mean <= settings.tol_mean and residual_auc <= tol_auc,
        residual_mean=residual_mean,
        residual_auc=residual_auc,
        bracket=(min(lit_lo, lit_hi), max(lit_lo, lit_hi)),
    )
    return a, b, diag


def fixed_point_f0(
    update: Callable[[np.ndarray], np.ndarray],
    init,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> tuple[np.ndarray, SolveDiagnostics]:
    """Iterate a map on class-0 CDF values until the sup-norm change is small.

    Stops when the largest absolute change across support points is <= tol or
    after ``max_iter`` iterations; the diagnostics record which. On
    non-convergence the last iterate is returned with converged=False, left
    for the caller to judge.
    """
    current = np.array(init, dtype=float, copy=True)
    if current.ndim != 1 or current.size == 0:
        raise DomainError("init must be a non-empty vector")
    if np.any(current <= 0.0) or np.any(current >= 1.0):
        raise DomainError("init values must lie strictly inside (0, 1)")
    if current.size > 1 and np.any(np.diff(current) <= 0.0):
        raise DomainError("init values must be strictly increasing")
    if max_iter < 1:
        raise DomainError("max_iter must be at least 1")
    delta = np.inf
    iterations = 0
    for _ in range(max_iter):
        new = np.asarray(update(current), dtype=float)
        delta = float(np.max(np.abs(new - current)))
        current = new
        iterations += 1
        if delta <= tol:
            break
    converged = delta <= tol
    diag = SolveDiagnostics(
        iterations=iterations, converged=converged, residual_fixed_point=delta
    )
    return current, diag
