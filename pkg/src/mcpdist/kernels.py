"""Closed-form radial kernels of the planar Matérn cluster process.

A cluster is a disk of radius ``r_d`` whose points are uniform on it. Seen
from the origin, the distance ``z`` of a cluster point whose center sits at
distance ``x`` has a piecewise density proportional to the length of the
circle of radius ``z`` (centred at the origin) that falls inside the cluster
disk:

* the full circle lies inside the disk      -> density 2z / r_d**2
* the circle is clipped by the disk edge    -> density (2z / (pi r_d**2)) *
  acos((z**2 + x**2 - r_d**2) / (2 z x))

The clipped form is the same whether the origin is inside the cluster disk
(x < r_d) or outside it (x > r_d); only the support differs, so both cases
are exposed as separate functions with their own domain checks.

Integrating the density over a ball of radius ``r`` around the origin gives
the probability that one cluster point lands within ``r``; that integral is
the area of the intersection of the two disks divided by the cluster disk
area, computed here in closed form (`lens_mass`) instead of numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "MCPParams",
    "RadialPair",
    "full_circle_density",
    "inner_arc_density",
    "outer_arc_density",
    "lens_mass",
    "own_cluster_mass",
]


@dataclass(frozen=True)
class MCPParams:
    """Parameter triple of a Matérn cluster process.

    lambda_p: density of the parent (cluster-center) Poisson process, per unit area.
    m_bar:    mean number of offspring per cluster.
    r_d:      radius of the disk on which each cluster's offspring are uniform.
    """

    lambda_p: float
    m_bar: float
    r_d: float

    def __post_init__(self) -> None:
        for name in ("lambda_p", "m_bar", "r_d"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class RadialPair:
    """Distances from the origin to a cluster point and to its cluster center.

    point_distance:  ||z|| for an offspring point z.
    center_distance: ||x|| for the parent point x of the same cluster.
    """

    point_distance: float
    center_distance: float

    def __post_init__(self) -> None:
        for name in ("point_distance", "center_distance"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {value!r}")


def _check_radius(r_d: float) -> None:
    if not (math.isfinite(r_d) and r_d > 0):
        raise ValueError(f"r_d must be a positive finite number, got {r_d!r}")


def _clamped_acos(t: float) -> float:
    # roundoff near the support edges pushes the argument past +-1
    return math.acos(min(1.0, max(-1.0, t)))


def _arc_density(z: float, x: float, r_d: float) -> float:
    return (2.0 * z / (math.pi * r_d * r_d)) * _clamped_acos(
        (z * z + x * x - r_d * r_d) / (2.0 * z * x)
    )


def full_circle_density(z: float, x: float, r_d: float) -> float:
    """Distance density 2z/r_d**2 where the whole circle of radius z lies in the cluster disk.

    Valid for a cluster center at distance x < r_d from the origin and
    0 <= z <= r_d - x.
    """
    _check_radius(r_d)
    if not 0.0 <= x < r_d:
        raise ValueError(f"full-circle branch needs 0 <= x < r_d, got x={x!r}, r_d={r_d!r}")
    if not 0.0 <= z <= r_d - x:
        raise ValueError(
            f"z={z!r} outside the full-circle support [0, {r_d - x!r}]; use an arc branch"
        )
    return 2.0 * z / (r_d * r_d)


def inner_arc_density(z: float, x: float, r_d: float) -> float:
    """Clipped-circle distance density for a cluster whose disk contains the origin.

    Valid for 0 < x < r_d and r_d - x <= z <= r_d + x.  At the lower support
    edge the acos factor equals pi and the value matches
    `full_circle_density`; at the upper edge it vanishes.
    """
    _check_radius(r_d)
    if x == 0.0:
        raise ValueError(
            "x=0 is degenerate for the arc branch (support collapses to a point); "
            "the full-circle branch covers the whole disk"
        )
    if not 0.0 < x < r_d:
        raise ValueError(f"inner-arc branch needs 0 < x < r_d, got x={x!r}, r_d={r_d!r}")
    if not (r_d - x <= z <= r_d + x and z > 0.0):
        raise ValueError(
            f"z={z!r} outside the inner-arc support [{r_d - x!r}, {r_d + x!r}]"
        )
    return _arc_density(z, x, r_d)


def outer_arc_density(z: float, x: float, r_d: float) -> float:
    """Clipped-circle distance density for a cluster whose disk excludes the origin.

    Same expression as `inner_arc_density` on the support
    x - r_d <= z <= x + r_d, for x > r_d; it vanishes at both edges.
    """
    _check_radius(r_d)
    if not x > r_d:
        raise ValueError(f"outer-arc branch needs x > r_d, got x={x!r}, r_d={r_d!r}")
    if not x - r_d <= z <= x + r_d:
        raise ValueError(
            f"z={z!r} outside the outer-arc support [{x - r_d!r}, {x + r_d!r}]"
        )
    return _arc_density(z, x, r_d)


def lens_mass(r: float, x: float, r_d: float) -> float:
    """Probability that one point of a cluster at distance x lies within r of the origin.

    Equals |b(o, r) ∩ b(x, r_d)| / (pi r_d**2), evaluated piecewise:

    * 1 when the cluster disk is contained in the ball (r >= x + r_d),
    * 0 when the disks are disjoint (x >= r + r_d),
    * r**2 / r_d**2 when the ball sits inside the cluster disk (x + r <= r_d),
    * otherwise the standard two-circle lens area over pi r_d**2.

    The lens area uses the Heron-style square root of the four-factor
    product, guarded at >= 0, and clamped acos arguments, so the result is
    always a valid probability.
    """
    _check_radius(r_d)
    if not (math.isfinite(r) and r >= 0):
        raise ValueError(f"r must be finite and non-negative, got {r!r}")
    if not (math.isfinite(x) and x >= 0):
        raise ValueError(f"x must be finite and non-negative, got {x!r}")

    if r >= x + r_d:
        return 1.0
    if x >= r + r_d:
        return 0.0
    if x + r <= r_d:
        return (r * r) / (r_d * r_d)

    # proper lens: both r > 0 and x > 0 hold here
    cos_r = (x * x + r * r - r_d * r_d) / (2.0 * x * r)
    cos_d = (x * x + r_d * r_d - r * r) / (2.0 * x * r_d)
    heron = (
        (-x + r + r_d) * (x + r - r_d) * (x - r + r_d) * (x + r + r_d)
    )
    area = (
        r * r * _clamped_acos(cos_r)
        + r_d * r_d * _clamped_acos(cos_d)
        - 0.5 * math.sqrt(max(heron, 0.0))
    )
    return min(1.0, max(0.0, area / (math.pi * r_d * r_d)))


def own_cluster_mass(x0: float, r: float, r_d: float) -> float:
    """Probability that one sibling of the reference point lies within r of it.

    The reference point's own cluster center sits at distance x0 from the
    reference location, and a point of the process always has x0 <= r_d.
    The mass is the same disk-intersection probability as `lens_mass`
    restricted to that range; it reaches 1 once r >= r_d + x0.
    """
    _check_radius(r_d)
    if not (math.isfinite(x0) and 0.0 <= x0 <= r_d):
        raise ValueError(
            f"the reference point's cluster center must satisfy 0 <= x0 <= r_d, got x0={x0!r}"
        )
    return lens_mass(r, x0, r_d)
