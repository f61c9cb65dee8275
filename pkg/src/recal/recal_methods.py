"""The eight recalibration methods.

Each method maps a source model and a target spec to a recalibrated
posterior curve over the shared support, together with the achieved mean,
the implied AUC, the fitted parameters and solver diagnostics. Methods are
pure given their inputs; distinct methods can run concurrently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit, logit, ndtri

from .auc_engine import adjusted_cdf, class_conditionals, implied_auc_values
from .dist_core import (
    PosteriorCurve,
    SourceModel,
    TargetSpec,
    _require_shared_support,
)
from .errors import DomainError, InfeasibleError, NoRootError
from .solvers import (
    DEFAULT_SETTINGS,
    SolveDiagnostics,
    SolverSettings,
    TransformFamily,
    bisect_root,
    fixed_point_f0,
    logistic_cspd_family,
    normal_cspd_family,
    platt_family,
    rob_logit_family,
    solve_qmm_2d,
)


class MethodId(enum.Enum):
    """Closed enumeration of the recalibration methods; names are stable."""

    CAPPED_SCALING = "capped_scaling"
    LABEL_SHIFT = "label_shift"
    FJS = "fjs"
    PLATT = "platt"
    LOGISTIC_CSPD = "logistic_cspd"
    NORMAL_CSPD = "normal_cspd"
    ROC_QMM = "roc_qmm"
    TWO_PARAM_QMM = "two_param_qmm"


# results-table row order
CANONICAL_ORDER: tuple[MethodId, ...] = (
    MethodId.CAPPED_SCALING,
    MethodId.LABEL_SHIFT,
    MethodId.FJS,
    MethodId.PLATT,
    MethodId.ROC_QMM,
    MethodId.TWO_PARAM_QMM,
    MethodId.LOGISTIC_CSPD,
    MethodId.NORMAL_CSPD,
)

DISPLAY_LABELS: dict[MethodId, str] = {
    MethodId.CAPPED_SCALING: "Capped scaling",
    MethodId.LABEL_SHIFT: "Label shift",
    MethodId.FJS: "FJS",
    MethodId.PLATT: "Platt scaling",
    MethodId.ROC_QMM: "ROC QMM",
    MethodId.TWO_PARAM_QMM: "2-param QMM",
    MethodId.LOGISTIC_CSPD: "Logistic CSPD",
    MethodId.NORMAL_CSPD: "Normal CSPD",
}


@dataclass(frozen=True, eq=False)
class RecalResult:
    """Recalibrated posterior curve plus everything needed to audit it."""

    method: MethodId
    posterior: PosteriorCurve
    achieved_mean: float
    implied_auc: float
    params: dict[str, float]
    diagnostics: SolveDiagnostics


def _check_pair(src: SourceModel, tgt: TargetSpec) -> None:
    _require_shared_support(src.support, tgt.support, "source and target")


def _require_interior(src: SourceModel, method: str) -> None:
    if not src.posterior.is_interior():
        raise DomainError(
            f"{method}: source posterior values must lie strictly inside (0, 1)"
        )


def _finish(
    method: MethodId,
    tgt: TargetSpec,
    values: np.ndarray,
    params: dict[str, float],
    diagnostics: SolveDiagnostics,
) -> RecalResult:
    curve = PosteriorCurve(tgt.support, values)
    return RecalResult(
        method=method,
        posterior=curve,
        achieved_mean=float(np.dot(tgt.feature_dist.probs, curve.values)),
        implied_auc=implied_auc_values(tgt.feature_dist.probs, curve.values),
        params=params,
        diagnostics=diagnostics,
    )


def source_implied_auc(src: SourceModel) -> float:
    """Implied AUC of the source posterior under the source features."""
    return implied_auc_values(src.feature_dist.probs, src.posterior.values)


def capped_scaling(
    src: SourceModel, tgt: TargetSpec, settings: SolverSettings = DEFAULT_SETTINGS
) -> RecalResult:
    """Scale the source posterior by t, capping at 1, so the mean hits q.

    The capped mean is continuous and non-decreasing in t with range (0, 1],
    so a bracketed bisection always finds t; the cap can flatten the curve at
    value 1 but nowhere else.
    """
    _check_pair(src, tgt)
    q = tgt.prior
    eta = src.posterior.values
    weights = tgt.feature_dist.probs
    evals = 0

    def mean_resid(t: float) -> float:
        nonlocal evals
        evals += 1
        return float(np.dot(weights, np.minimum(t * eta, 1.0))) - q

    t = bisect_root(mean_resid, 0.0, 2.0, settings.tol_mean, expand_lo=False)
    values = np.minimum(t * eta, 1.0)
    residual = abs(float(np.dot(weights, values)) - q)
    diag = SolveDiagnostics(
        iterations=evals,
        converged=residual <= settings.tol_mean,
        residual_mean=residual,
    )
    return _finish(MethodId.CAPPED_SCALING, tgt, values, {"t": float(t)}, diag)


def label_shift_correct(
    src: SourceModel, tgt: TargetSpec, settings: SolverSettings = DEFAULT_SETTINGS
) -> RecalResult:
    """Posterior correction for a prior moving from p to q with unchanged
    class-conditional feature distributions.

    The achieved mean equals q only when the target feature distribution is
    the corresponding mixture of the source class conditionals; whatever mean
    obtains is recorded, never forced.
    """
    _check_pair(src, tgt)
    _require_interior(src, "label_shift")
    p, q = src.prior, tgt.prior
    eta = src.posterior.values
    num = (q / p) * eta
    den = num + ((1.0 - q) / (1.0 - p)) * (1.0 - eta)
    values = num / den
    diag = SolveDiagnostics(iterations=0, converged=True)
    return _finish(MethodId.LABEL_SHIFT, tgt, values, {}, diag)


def _fjs_values(eta: np.ndarray, p: float, q: float, rho: float) -> np.ndarray:
    num = (q / p) * eta
    den = num + (1.0 / rho) * ((1.0 - q) / (1.0 - p)) * (1.0 - eta)
    return num / den


def fjs_bounds(src: SourceModel, tgt: TargetSpec) -> tuple[float, float]:
    """Closed interval that always contains the factorizable-shift weight."""
    p = src.prior
    eta = src.posterior.values
    weights = tgt.feature_dist.probs
    odds = eta / (1.0 - eta)
    lower = p / ((1.0 - p) * float(np.dot(weights, odds)))
    upper = p / (1.0 - p) * float(np.dot(weights, 1.0 / odds))
    return lower, upper


def fjs_recalibrate(
    src: SourceModel, tgt: TargetSpec, settings: SolverSettings = DEFAULT_SETTINGS
) -> RecalResult:
    """Recalibrate under factorizable joint shift.

    The class-0 density weight rho is the unique root of the mean equation
    and always lies inside :func:`fjs_bounds`; the bisection runs on that
    closed interval with no expansion, and a missing sign change is surfaced
    as infeasibility rather than hidden.
    """
    _check_pair(src, tgt)
    _require_interior(src, "fjs")
    p, q = src.prior, tgt.prior
    eta = src.posterior.values
    weights = tgt.feature_dist.probs
    lower, upper = fjs_bounds(src, tgt)
    evals = 0

    def mean_resid(rho: float) -> float:
        nonlocal evals
        evals += 1
        return float(np.dot(weights, _fjs_values(eta, p, q, rho))) - q

    try:
        rho = bisect_root(
            mean_resid, lower, upper, settings.tol_mean, expand_lo=False, expand_hi=False
        )
    except NoRootError as exc:
        raise InfeasibleError(
            f"fjs: no sign change of the mean equation over the weight bounds "
            f"[{lower!r}, {upper!r}]"
        ) from exc
    values = _fjs_values(eta, p, q, rho)
    residual = abs(float(np.dot(weights, values)) - q)
    diag = SolveDiagnostics(
        iterations=evals,
        converged=residual <= settings.tol_mean,
        residual_mean=residual,
    )
    return _finish(MethodId.FJS, tgt, values, {"rho": float(rho)}, diag)


_PARAMETRIC_FAMILIES = {
    MethodId.PLATT: platt_family,
    MethodId.LOGISTIC_CSPD: logistic_cspd_family,
    MethodId.NORMAL_CSPD: normal_cspd_family,
}


def parametric_cspd_qmm(
    src: SourceModel,
    tgt: TargetSpec,
    family: MethodId,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> RecalResult:
    """Two-parameter transform of the source posterior fitted by quasi moment
    matching: mean q and the source implied AUC.

    ``family`` picks the transform: a sigmoid of an affine map of the raw
    posterior values (Platt), or an affine map in logit or probit space
    composed with the matching distribution function.
    """
    _check_pair(src, tgt)
    _require_interior(src, family.value)
    if family not in _PARAMETRIC_FAMILIES:
        raise DomainError(f"{family!r} is not a parametric transform family")
    fam = _PARAMETRIC_FAMILIES[family]()
    auc_target = source_implied_auc(src)
    a, b, diag = solve_qmm_2d(fam, auc_target, tgt.prior, tgt, src.posterior, settings)
    values = fam.posterior_values(src.posterior.values, a, b)
    return _finish(family, tgt, values, {"a": float(a), "b": float(b)}, diag)


def _roc_posterior(q: float, c: float, f0: np.ndarray) -> np.ndarray:
    # equal-variance normal ROC shape: posterior is a logistic function of
    # the probit of the class-0 CDF
    return expit(logit(q) - c * c / 2.0 + c * ndtri(f0))


def roc_qmm(
    src: SourceModel, tgt: TargetSpec, settings: SolverSettings = DEFAULT_SETTINGS
) -> RecalResult:
    """Recalibrate through a one-parameter ROC shape matched to the source AUC.

    The shape parameter is c = sqrt(2) * ndtri(source implied AUC). The
    unknown class-0 CDF starts from the adjusted CDF of the unconditional
    target features and is refined by fixed-point iteration: posterior from
    the ROC shape, class-0 conditional from that posterior, adjusted CDF
    again. Achieved mean and AUC are approximate by construction and are
    reported, not forced.
    """
    _check_pair(src, tgt)
    q = tgt.prior
    auc_src = source_implied_auc(src)
    if not (0.0 < auc_src < 1.0):
        raise DomainError("roc_qmm: source implied AUC must lie strictly inside (0, 1)")
    c = float(np.sqrt(2.0) * ndtri(auc_src))
    feature = tgt.feature_dist

    def update(f0: np.ndarray) -> np.ndarray:
        eta = _roc_posterior(q, c, f0)
        cc = class_conditionals(feature, PosteriorCurve(feature.support, eta))
        return adjusted_cdf(cc.dist0)

    init = adjusted_cdf(feature)
    f0, diag = fixed_point_f0(update, init, settings.tol_fixed_point, settings.max_iter)
    values = _roc_posterior(q, c, f0)
    return _finish(MethodId.ROC_QMM, tgt, values, {"c": c}, diag)


def two_param_qmm(
    src: SourceModel,
    tgt: TargetSpec,
    settings: SolverSettings = DEFAULT_SETTINGS,
    f0_init: np.ndarray | None = None,
) -> RecalResult:
    """Two-parameter logistic transform of the probit class-0 CDF, alternated
    with refinement of that CDF.

    Each outer step solves (a, b) against the targets (q, source implied AUC)
    at the current class-0 CDF, then refreshes the CDF from the resulting
    posterior exactly as the ROC-based scheme does. The loop stops when the
    CDF values and (a, b) are jointly stable to 1e-9. The reported a is the
    literal parameter of the decreasing-in-probit transform (negative for an
    increasing net effect).
    """
    _check_pair(src, tgt)
    q = tgt.prior
    auc_src = source_implied_auc(src)
    if not (0.0 < auc_src < 1.0):
        raise DomainError(
            "two_param_qmm: source implied AUC must lie strictly inside (0, 1)"
        )
    if settings.max_iter < 1:
        raise DomainError("two_param_qmm: max_iter must be at least 1")
    feature = tgt.feature_dist
    f0 = adjusted_cdf(feature) if f0_init is None else np.array(f0_init, dtype=float)
    joint_tol = 1e-9
    # the inner solves must be pinned well below the joint stability
    # tolerance, otherwise (a, b) jitter at the solver's own stopping
    # granularity and the alternation cycles instead of settling
    inner_settings = replace(
        settings,
        tol_mean=min(settings.tol_mean, 1e-12),
        tol_auc=min(settings.tol_auc, 1e-11),
    )
    a = b = np.nan
    values = None
    inner_diag = None
    iterations = 0
    delta = np.inf
    for _ in range(settings.max_iter):
        fam = rob_logit_family(f0)
        a_new, b_new, inner_diag = solve_qmm_2d(
            fam, auc_src, q, tgt, src.posterior, inner_settings
        )
        values = fam.posterior_values(src.posterior.values, a_new, b_new)
        cc = class_conditionals(feature, PosteriorCurve(feature.support, values))
        f0_new = adjusted_cdf(cc.dist0)
        delta = float(np.max(np.abs(f0_new - f0)))
        if np.isfinite(a):
            delta = max(delta, abs(a_new - a), abs(b_new - b))
        else:
            delta = np.inf
        a, b, f0 = a_new, b_new, f0_new
        iterations += 1
        if delta <= joint_tol:
            break
    converged = (
        delta <= joint_tol
        and inner_diag.residual_mean <= settings.tol_mean
        and inner_diag.residual_auc <= settings.tol_auc
    )
    diag = SolveDiagnostics(
        iterations=iterations,
        converged=converged,
        residual_mean=inner_diag.residual_mean,
        residual_auc=inner_diag.residual_auc,
        residual_fixed_point=delta,
        bracket=inner_diag.bracket,
    )
    return _finish(
        MethodId.TWO_PARAM_QMM, tgt, values, {"a": float(a), "b": float(b)}, diag
    )


def run_method(
    method: MethodId,
    src: SourceModel,
    tgt: TargetSpec,
    settings: SolverSettings = DEFAULT_SETTINGS,
) -> RecalResult:
    """Dispatch a method id to its implementation."""
    if method in _PARAMETRIC_FAMILIES:
        return parametric_cspd_qmm(src, tgt, method, settings)
    if method is MethodId.CAPPED_SCALING:
        return capped_scaling(src, tgt, settings)
    if method is MethodId.LABEL_SHIFT:
        return label_shift_correct(src, tgt, settings)
    if method is MethodId.FJS:
        return fjs_recalibrate(src, tgt, settings)
    if method is MethodId.ROC_QMM:
        return roc_qmm(src, tgt, settings)
    if method is MethodId.TWO_PARAM_QMM:
        return two_param_qmm(src, tgt, settings)
    raise DomainError(f"unknown method {method!r}")
