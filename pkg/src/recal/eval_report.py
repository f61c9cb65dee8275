"""Concave-functional evaluation, the results table and curve-data export.

Rounding happens only at presentation time: the table keeps full precision
internally, prints 3 decimals for display and writes 12 significant digits
to CSV. CSV output is UTF-8 with '.' decimals and LF line endings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .auc_engine import implied_auc_values
from .dist_core import (
    DiscreteScoreDist,
    PosteriorCurve,
    SourceModel,
    TargetSpec,
    _require_shared_support,
    mean_under,
)
from .errors import DomainError, StructuralError
from .recal_methods import CANONICAL_ORDER, DISPLAY_LABELS, RecalResult

CONCAVITY_SLACK = 1e-12

TABLE_CSV_HEADER = "method,mean_probs,auc,mean_functional"
CURVES_CSV_HEADER = "series,support,value"


def _check_concave_on_grid(grid: np.ndarray, values: np.ndarray) -> None:
    # chord test at every interior grid point, with float slack
    for i in range(1, grid.size - 1):
        left, mid, right = grid[i - 1], grid[i], grid[i + 1]
        chord = (values[i - 1] * (right - mid) + values[i + 1] * (mid - left)) / (
            right - left
        )
        if values[i] < chord - CONCAVITY_SLACK:
            raise DomainError(
                f"functional is not concave on its grid near u={mid!r}"
            )


@dataclass(frozen=True, eq=False)
class FunctionalSpec:
    """A concave function C on [0, 1], either built-in sqrt or tabulated.

    Tabulated functionals are evaluated by linear interpolation on a grid
    that must start at 0, end at 1 and pass the midpoint concavity test
    within 1e-12 slack.
    """

    id: str
    grid: np.ndarray | None = None
    grid_values: np.ndarray | None = None

    @classmethod
    def sqrt(cls) -> "FunctionalSpec":
        return cls("sqrt")

    @classmethod
    def tabulated(cls, grid, values) -> "FunctionalSpec":
        g = np.array(grid, dtype=float, copy=True)
        v = np.array(values, dtype=float, copy=True)
        if g.ndim != 1 or g.size < 2 or g.shape != v.shape:
            raise StructuralError("tabulated functional needs matching grid and values")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(v))):
            raise DomainError("tabulated functional must be finite")
        if np.any(np.diff(g) <= 0):
            raise StructuralError("tabulated grid must be strictly increasing")
        if g[0] != 0.0 or g[-1] != 1.0:
            raise DomainError("tabulated grid must cover [0, 1] exactly")
        _check_concave_on_grid(g, v)
        g.setflags(write=False)
        v.setflags(write=False)
        return cls("tabulated", g, v)

    @classmethod
    def from_id(cls, name: str) -> "FunctionalSpec":
        if name == "sqrt":
            return cls.sqrt()
        raise DomainError(f"unknown functional id {name!r}")

    def __call__(self, u):
        arr = np.asarray(u, dtype=float)
        if self.id == "sqrt":
            return np.sqrt(arr)
        return np.interp(arr, self.grid, self.grid_values)


def functional_mean(
    dist: DiscreteScoreDist, curve: PosteriorCurve, functional: FunctionalSpec
) -> float:
    """Expectation of C(curve) under the distribution."""
    _require_shared_support(dist.support, curve.support, "dist and curve")
    return float(np.dot(dist.probs, functional(curve.values)))


def functional_bounds(q: float, functional: FunctionalSpec) -> tuple[float, float]:
    """Jensen bounds for E[C(Z)] over all Z in [0, 1] with mean q.

    Lower bound (1-q) C(0) + q C(1) is attained by a two-point law on
    {0, 1}; upper bound C(q) by the constant q.
    """
    if not (0.0 < q < 1.0):
        raise DomainError("q must lie strictly inside (0, 1)")
    c0 = float(functional(0.0))
    c1 = float(functional(1.0))
    return (1.0 - q) * c0 + q * c1, float(functional(q))


@dataclass(frozen=True)
class TableRow:
    label: str
    mean_probs: float
    auc: float
    mean_functional: float


@dataclass(frozen=True)
class ResultsTable:
    """Source row followed by one row per method, in fixed canonical order."""

    rows: tuple[TableRow, ...]


def build_results_table(
    source: SourceModel,
    target: TargetSpec,
    results: list[RecalResult],
    functional: FunctionalSpec,
) -> ResultsTable:
    """Assemble the results table: a leading Source row evaluated under the
    source features, then each method evaluated under the target features.

    Method rows are ordered canonically regardless of input order; values are
    stored at full precision and rounded only when rendered.
    """
    _require_shared_support(source.support, target.support, "source and target")
    rows = [
        TableRow(
            label="Source",
            mean_probs=mean_under(source.feature_dist, source.posterior),
            auc=implied_auc_values(source.feature_dist.probs, source.posterior.values),
            mean_functional=functional_mean(
                source.feature_dist, source.posterior, functional
            ),
        )
    ]
    seen = set()
    for result in results:
        if result.method in seen:
            raise StructuralError(f"duplicate result for method {result.method.value}")
        seen.add(result.method)
        _require_shared_support(
            target.support, result.posterior.support, "target and result posterior"
        )
    by_method = {result.method: result for result in results}
    for method in CANONICAL_ORDER:
        if method not in by_method:
            continue
        result = by_method[method]
        rows.append(
            TableRow(
                label=DISPLAY_LABELS[method],
                mean_probs=result.achieved_mean,
                auc=result.implied_auc,
                mean_functional=functional_mean(
                    target.feature_dist, result.posterior, functional
                ),
            )
        )
    return ResultsTable(rows=tuple(rows))


def format_table(table: ResultsTable) -> str:
    """Fixed-width display rendering, 3 decimals per cell."""
    label_width = max(len(row.label) for row in table.rows)
    label_width = max(label_width, len("method"))
    lines = [
        f"{'method':<{label_width}}  mean_probs    auc  mean_functional"
    ]
    for row in table.rows:
        lines.append(
            f"{row.label:<{label_width}}  {row.mean_probs:>10.3f}  {row.auc:>5.3f}  "
            f"{row.mean_functional:>15.3f}"
        )
    return "\n".join(lines) + "\n"


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def table_to_csv(table: ResultsTable) -> str:
    """CSV rendering at 12 significant digits."""
    lines = [TABLE_CSV_HEADER]
    for row in table.rows:
        lines.append(
            f"{row.label},{_fmt(row.mean_probs)},{_fmt(row.auc)},{_fmt(row.mean_functional)}"
        )
    return "\n".join(lines) + "\n"


def export_curves(
    source: SourceModel, target: TargetSpec, results: list[RecalResult]
) -> list[tuple[str, float, float]]:
    """Long-format (series, support, value) rows for plotting.

    Emits the source and target feature pmfs, the source posterior curve and
    one posterior series per result, in canonical method order. Posterior
    series of the non-capped methods stay strictly positive, so consumers can
    log-scale the value axis.
    """
    _require_shared_support(source.support, target.support, "source and target")
    rows: list[tuple[str, float, float]] = []

    def emit(series: str, support: np.ndarray, values: np.ndarray) -> None:
        for s, v in zip(support, values):
            rows.append((series, float(s), float(v)))

    emit("source_pmf", source.support, source.feature_dist.probs)
    emit("target_pmf", target.support, target.feature_dist.probs)
    emit("posterior_source", source.support, source.posterior.values)
    by_method = {result.method: result for result in results}
    for method in CANONICAL_ORDER:
        if method not in by_method:
            continue
        result = by_method[method]
        emit(f"posterior_{method.value}", result.posterior.support, result.posterior.values)
    return rows


def curves_to_csv(rows: list[tuple[str, float, float]]) -> str:
    """CSV rendering of curve rows at 12 significant digits."""
    lines = [CURVES_CSV_HEADER]
    for series, support, value in rows:
        lines.append(f"{series},{_fmt(support)},{_fmt(value)}")
    return "\n".join(lines) + "\n"
