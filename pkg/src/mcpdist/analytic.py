"""Analytic distance distributions of the planar Matérn cluster process.

Contact distance
    The survival probability of the contact distance (the distance from an
    independent reference location to the nearest process point) is the void
    probability of a ball of radius r.  Averaging each cluster's vacancy over
    the parent process gives

        S_C(r) = exp(-2 pi lambda_p * I(r)),
        I(r)   = int_0^{r + r_d} (1 - exp(-m_bar * lens_mass(r, x, r_d))) x dx.

    The integrand vanishes identically for x >= r + r_d (disjoint disks), so
    the truncation is exact.  The integral is split at x = r_d and at the
    piecewise boundary x = |r - r_d| of `lens_mass` so every quadrature panel
    is smooth.

Nearest-neighbor distance
    Seen from a point of the process, the rest of the process is the union of
    an independent copy of the whole process and the remainder of the point's
    own cluster, whose center sits at distance x0 with density 2 x0 / r_d**2
    on [0, r_d].  Hence

        S_N(r) = S_C(r) * V(r),
        V(r)   = int_0^{r_d} exp(-m_bar * lens_mass(r, x0, r_d)) * 2 x0 / r_d**2 dx0,

    where V is the probability that none of the reference point's siblings
    falls within r (`own_cluster_vacancy`).

Baselines
    `ppp_contact_cdf` is the contact CDF 1 - exp(-density pi r**2) of a
    homogeneous Poisson process; with density m_bar * lambda_p it is the
    natural first-order stand-in for the cluster process.
    `cluster_size_pmf` is the number-weighted law of the size of the cluster
    a uniformly picked process point belongs to: picking a point favors large
    clusters in proportion to their size, which turns Poisson(m_bar) cluster
    sizes into ell * Poisson(ell; m_bar) / m_bar, i.e. 1 + Poisson(m_bar).

Survivals are computed through exponents (expm1/exp), so CDF values reach
1.0 cleanly instead of overflowing or returning NaN for large arguments.
Evaluation is pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .kernels import MCPParams, lens_mass
from .quadrature import QuadratureConvergenceError, integrate_adaptive

__all__ = [
    "CONTACT",
    "NEAREST_NEIGHBOR",
    "PPP_BASELINE",
    "ALL_DISTRIBUTIONS",
    "DEFAULT_REL_TOL",
    "CdfCurve",
    "CurveEvaluationError",
    "contact_cdf",
    "contact_survival",
    "own_cluster_vacancy",
    "nearest_neighbor_cdf",
    "nearest_neighbor_survival",
    "ppp_contact_cdf",
    "cluster_size_pmf",
    "cdf_curve",
]

CONTACT = "contact"
NEAREST_NEIGHBOR = "nearest_neighbor"
PPP_BASELINE = "ppp_baseline"
ALL_DISTRIBUTIONS = (CONTACT, NEAREST_NEIGHBOR, PPP_BASELINE)

#: Default relative quadrature tolerance; CDF values carry an absolute error
#: of roughly this size.
DEFAULT_REL_TOL = 1e-8

# positive so the relative tolerance governs panel refinement
_ABS_FLOOR = 1e-300


class CurveEvaluationError(RuntimeError):
    """Pointwise CDF evaluation failed; the message names the radius."""


def _check_r(r: float) -> None:
    if not (math.isfinite(r) and r >= 0):
        raise ValueError(f"r must be finite and non-negative, got {r!r}")


def _void_exponent(params: MCPParams, r: float, rel_tol: float) -> float:
    """-log of the contact survival probability (always >= 0)."""
    if r == 0.0:
        return 0.0
    m_bar, r_d = params.m_bar, params.r_d

    def integrand(x: float) -> float:
        return -math.expm1(-m_bar * lens_mass(r, x, r_d)) * x

    kink = abs(r - r_d)
    inner = integrate_adaptive(
        integrand, 0.0, r_d, rel_tol, _ABS_FLOOR,
        points=[kink] if 0.0 < kink < r_d else [],
    )
    outer = integrate_adaptive(
        integrand, r_d, r + r_d, rel_tol, _ABS_FLOOR,
        points=[kink] if r_d < kink < r + r_d else [],
    )
    return 2.0 * math.pi * params.lambda_p * (inner.value + outer.value)


def contact_survival(params: MCPParams, r: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Probability that no process point lies within r of an independent location."""
    _check_r(r)
    return math.exp(-_void_exponent(params, r, rel_tol))


def contact_cdf(params: MCPParams, r: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """CDF of the contact distance (empty-space function) at radius r.

    Raises `QuadratureConvergenceError` (with the partial estimate attached)
    if the outer integral fails to converge.
    """
    _check_r(r)
    return -math.expm1(-_void_exponent(params, r, rel_tol))


def own_cluster_vacancy(params: MCPParams, r: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Probability that no sibling of the reference point lies within r of it.

    This is the nearest-neighbor-specific factor: the reference point's own
    cluster holds 1 + Poisson(m_bar) points, and the Poisson(m_bar) siblings
    are uniform on the cluster disk.  The result is clamped to [0, 1]
    (quadrature roundoff can overshoot by ~1e-15 near r = 0).
    """
    _check_r(r)
    if r == 0.0:
        return 1.0
    m_bar, r_d = params.m_bar, params.r_d

    def integrand(x0: float) -> float:
        return math.exp(-m_bar * lens_mass(r, x0, r_d)) * (2.0 * x0 / (r_d * r_d))

    kink = abs(r_d - r)
    res = integrate_adaptive(
        integrand, 0.0, r_d, rel_tol, _ABS_FLOOR,
        points=[kink] if 0.0 < kink < r_d else [],
    )
    return min(1.0, max(0.0, res.value))


def nearest_neighbor_survival(
    params: MCPParams, r: float, rel_tol: float = DEFAULT_REL_TOL
) -> float:
    """Probability that the nearest neighbor of a typical process point is beyond r."""
    _check_r(r)
    return contact_survival(params, r, rel_tol) * own_cluster_vacancy(params, r, rel_tol)


def nearest_neighbor_cdf(
    params: MCPParams, r: float, rel_tol: float = DEFAULT_REL_TOL
) -> float:
    """CDF of the distance from a typical process point to its nearest neighbor."""
    return 1.0 - nearest_neighbor_survival(params, r, rel_tol)


def ppp_contact_cdf(density: float, r: float) -> float:
    """Contact-distance CDF 1 - exp(-density * pi * r**2) of a homogeneous Poisson process.

    For a Poisson process the nearest-neighbor CDF is identical, so this
    single baseline serves both comparisons at density m_bar * lambda_p.
    """
    if not (math.isfinite(density) and density > 0):
        raise ValueError(f"density must be positive and finite, got {density!r}")
    _check_r(r)
    return -math.expm1(-density * math.pi * r * r)


def cluster_size_pmf(m_bar: float, ell: int) -> float:
    """Number-weighted cluster-size PMF: the size of a uniformly picked point's cluster.

    Zero at ell = 0 (a picked point's cluster contains at least the point
    itself); for ell >= 1 the value is (ell / m_bar) * m_bar**ell *
    exp(-m_bar) / ell!, evaluated in log space, which is the Poisson(m_bar)
    PMF shifted up by one.  The mean is therefore m_bar + 1.
    """
    if not (math.isfinite(m_bar) and m_bar > 0):
        raise ValueError(f"m_bar must be positive and finite, got {m_bar!r}")
    if ell != int(ell) or ell < 0:
        raise ValueError(f"ell must be a non-negative integer, got {ell!r}")
    ell = int(ell)
    if ell == 0:
        return 0.0
    return math.exp((ell - 1) * math.log(m_bar) - m_bar - math.lgamma(ell))


@dataclass(frozen=True, eq=False)
class CdfCurve:
    """CDF values of one or more distance distributions on a shared radial grid."""

    grid: np.ndarray
    series: dict[str, np.ndarray]
    params: MCPParams
    rel_tol: float = DEFAULT_REL_TOL

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        object.__setattr__(self, "grid", grid)
        _check_grid(grid)
        for label, values in self.series.items():
            if label not in ALL_DISTRIBUTIONS:
                raise ValueError(f"unknown distribution label {label!r}")
            values = np.asarray(values, dtype=float)
            self.series[label] = values
            if values.shape != grid.shape:
                raise ValueError(f"series {label!r} does not match the grid length")
            if not (np.all(values >= 0.0) and np.all(values <= 1.0)):
                raise ValueError(f"series {label!r} has values outside [0, 1]")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.series)


def _check_grid(grid: np.ndarray) -> None:
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty one-dimensional array")
    if not np.all(np.isfinite(grid)) or grid[0] < 0:
        raise ValueError("grid radii must be finite and non-negative")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")


def cdf_curve(
    params: MCPParams,
    grid: Iterable[float],
    which: Iterable[str] = ALL_DISTRIBUTIONS,
    rel_tol: float = DEFAULT_REL_TOL,
) -> CdfCurve:
    """Evaluate the requested distributions pointwise on a strictly ascending grid.

    When both the contact and nearest-neighbor series are requested the
    shared void exponent is computed once per radius.  A quadrature failure
    is re-raised as `CurveEvaluationError` naming the offending radius.
    """
    grid = np.asarray(list(grid), dtype=float)
    _check_grid(grid)
    which = tuple(dict.fromkeys(which))
    unknown = [label for label in which if label not in ALL_DISTRIBUTIONS]
    if unknown:
        raise ValueError(f"unknown distribution labels {unknown!r}; choose from {ALL_DISTRIBUTIONS}")
    if not which:
        raise ValueError("at least one distribution must be requested")

    need_exponent = CONTACT in which or NEAREST_NEIGHBOR in which
    series: dict[str, list[float]] = {label: [] for label in which}
    for r in grid.tolist():
        try:
            if need_exponent:
                exponent = _void_exponent(params, r, rel_tol)
            if CONTACT in series:
                series[CONTACT].append(-math.expm1(-exponent))
            if NEAREST_NEIGHBOR in series:
                vacancy = own_cluster_vacancy(params, r, rel_tol)
                series[NEAREST_NEIGHBOR].append(1.0 - math.exp(-exponent) * vacancy)
            if PPP_BASELINE in series:
                series[PPP_BASELINE].append(ppp_contact_cdf(params.m_bar * params.lambda_p, r))
        except QuadratureConvergenceError as exc:
            raise CurveEvaluationError(f"CDF evaluation did not converge at r={r!r}: {exc}") from exc
    return CdfCurve(
        grid=grid,
        series={label: np.asarray(vals) for label, vals in series.items()},
        params=params,
        rel_tol=rel_tol,
    )
