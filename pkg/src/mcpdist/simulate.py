"""Monte Carlo samplers for Matérn-cluster-process distance statistics.

These samplers are the independent cross-check for the closed-form CDFs:
they build realizations directly from the process definition (parent Poisson
process, Poisson(m_bar) offspring uniform on a disk of radius r_d) and
record distances, so they share no code path with the quadrature-based
results they validate.

Reproducibility
    Every realization draws from its own substream keyed by
    (sampler namespace, realization index[, redraw attempt]) under the base
    seed, so batch results are bit-identical for a fixed seed regardless of
    the worker count or chunking.

Edge effects
    Parents are generated on a disk dilated by r_d beyond the requested
    window, which covers every cluster able to reach the window.  Parent
    radii come from an arrival construction on the disk-area coordinate
    (gap ~ Exp(1/density)), and each random quantity of a realization is
    drawn from its own substream in parent order.  Enlarging the window
    therefore only appends parents: the realization on the smaller window is
    a bit-exact prefix of the one on the larger window, which makes
    edge-effect freedom directly testable.

Censoring
    Each realization contributes one distance, censored at r_max: samples
    beyond r_max are kept only as a count, and the empirical CDF keeps the
    full realization count in its denominator so it stays unbiased on
    [0, r_max].
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from itertools import count
from pathlib import Path
from typing import Callable

import numpy as np

from .kernels import MCPParams

__all__ = [
    "DEFAULT_MAX_EXPECTED_POINTS",
    "SimulationBudgetError",
    "SimulationConfig",
    "PointSet",
    "EmpiricalCdf",
    "sample_mcp",
    "sample_contact_distance",
    "sample_nn_distance_palm",
    "sample_nn_distance_window",
    "sample_palm_cluster_sizes",
    "sample_window_cluster_sizes",
    "dump_samples",
]

_TWO_PI = 2.0 * math.pi

# sampler namespaces: distinct samplers never share a realization substream
_CONTACT_NS = 0
_PALM_NS = 1
_WINDOW_NS = 2

#: Refuse to generate realizations whose expected offspring count
#: lambda_p * m_bar * pi * (window + r_d)**2 exceeds this cap.
DEFAULT_MAX_EXPECTED_POINTS = 1e8


class SimulationBudgetError(RuntimeError):
    """Expected point count exceeds the configured resource cap."""


@dataclass(frozen=True)
class SimulationConfig:
    """Batch-sampling parameters.

    n_samples: number of independent realizations (one distance each).
    r_max: censoring radius for recorded distances.
    seed: base seed for the per-realization substreams.
    workers: number of processes used to spread realizations; has no effect
        on the output, only on wall time.
    """

    n_samples: int
    r_max: float
    seed: int
    workers: int = 1

    def __post_init__(self) -> None:
        if not (isinstance(self.n_samples, int) and self.n_samples >= 1):
            raise ValueError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if not (isinstance(self.r_max, (int, float)) and math.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError(f"r_max must be positive and finite, got {self.r_max!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if not (isinstance(self.workers, int) and self.workers >= 1):
            raise ValueError(f"workers must be a positive integer, got {self.workers!r}")


@dataclass(frozen=True, eq=False)
class PointSet:
    """One realization: parent locations and per-parent offspring clusters.

    Parents are ordered by ascending distance from the origin and cover the
    disk of radius ``window_radius + r_d``; every offspring lies within r_d
    of its parent.  Statistics measured inside ``window_radius`` are free of
    edge effects.
    """

    parents: np.ndarray  # (n_parents, 2)
    clusters: tuple[np.ndarray, ...]  # per-parent (k_i, 2), absolute coordinates
    window_radius: float

    def __post_init__(self) -> None:
        if self.parents.ndim != 2 or self.parents.shape[1] != 2:
            raise ValueError("parents must be an (n, 2) array")
        if len(self.clusters) != self.parents.shape[0]:
            raise ValueError("need exactly one offspring array per parent")

    @property
    def n_offspring(self) -> int:
        return sum(len(c) for c in self.clusters)

    def all_offspring(self) -> np.ndarray:
        """All offspring stacked into one (n_offspring, 2) array."""
        if not self.clusters:
            return np.empty((0, 2))
        return np.concatenate(self.clusters)


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Sorted censored distance samples with their empirical sub-CDF.

    ``n_total`` counts all realizations; ``n_censored`` of them produced no
    point within ``r_max`` and appear only in the denominator, so
    ``evaluate`` is a valid sub-CDF on [0, r_max].
    """

    sorted_samples: np.ndarray
    n_total: int
    n_censored: int
    r_max: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.sorted_samples, dtype=float)
        object.__setattr__(self, "sorted_samples", samples)
        if samples.ndim != 1:
            raise ValueError("sorted_samples must be one-dimensional")
        if samples.size and (np.any(np.diff(samples) < 0)):
            raise ValueError("sorted_samples must be ascending")
        if samples.size and (samples[0] < 0 or samples[-1] > self.r_max):
            raise ValueError("samples must lie in [0, r_max]")
        if self.n_total < 1:
            raise ValueError("n_total must be >= 1")
        if self.n_censored != self.n_total - samples.size:
            raise ValueError("n_censored inconsistent with sample count")
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError(f"r_max must be positive and finite, got {self.r_max!r}")

    @classmethod
    def from_distances(cls, distances: np.ndarray, r_max: float) -> "EmpiricalCdf":
        """Censor raw distances at r_max and sort the survivors."""
        d = np.asarray(distances, dtype=float)
        kept = np.sort(d[d <= r_max])
        return cls(kept, int(d.size), int(d.size - kept.size), float(r_max))

    def evaluate(self, r: float) -> float:
        """Empirical CDF (#samples <= r) / n_total, defined on [0, r_max]."""
        if not 0.0 <= r <= self.r_max:
            raise ValueError(f"r={r!r} outside the observed range [0, {self.r_max!r}]")
        return float(np.searchsorted(self.sorted_samples, r, side="right")) / self.n_total

    @property
    def censored_fraction(self) -> float:
        return self.n_censored / self.n_total


def _substream(seed: int, key: tuple[int, ...]) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def _poisson_disk_radii(rng: np.random.Generator, density: float, max_radius: float) -> np.ndarray:
    """Ascending radii of a homogeneous Poisson process on a centred disk.

    Works on the area coordinate t = pi * radius**2, where the radii form a
    one-dimensional Poisson arrival process of rate ``density``; drawing
    arrivals until t exceeds the disk area makes the realization on a larger
    disk an exact extension of the one on a smaller disk (same stream).
    """
    area_limit = math.pi * max_radius * max_radius
    mean_count = density * area_limit
    batch = max(32, int(mean_count + 6.0 * math.sqrt(mean_count + 1.0)))
    collected: list[np.ndarray] = []
    offset = 0.0
    while True:
        arrivals = offset + np.cumsum(rng.exponential(1.0 / density, batch))
        collected.append(arrivals[arrivals <= area_limit])
        if arrivals[-1] > area_limit:
            break
        offset = float(arrivals[-1])
        batch = 32
    areas = np.concatenate(collected)
    return np.sqrt(areas / math.pi)


def sample_mcp(
    params: MCPParams,
    window_radius: float,
    rng: np.random.Generator,
    max_expected_points: float = DEFAULT_MAX_EXPECTED_POINTS,
) -> PointSet:
    """Draw one Matérn-cluster-process realization, edge-effect-free in the window.

    Parents form a Poisson process of density lambda_p on the disk of radius
    ``window_radius + r_d``; each gets Poisson(m_bar) offspring uniform on
    its r_d-disk.  Raises `SimulationBudgetError` when the expected offspring
    count exceeds ``max_expected_points``.
    """
    if not (math.isfinite(window_radius) and window_radius > 0):
        raise ValueError(f"window_radius must be positive and finite, got {window_radius!r}")
    generation_radius = window_radius + params.r_d
    expected = params.lambda_p * params.m_bar * math.pi * generation_radius**2
    if expected > max_expected_points:
        raise SimulationBudgetError(
            f"expected point count {expected:.3e} exceeds the cap {max_expected_points:.3e}; "
            "shrink the window or raise max_expected_points"
        )

    radius_rng, angle_rng, count_rng, offset_rng = rng.spawn(4)
    radii = _poisson_disk_radii(radius_rng, params.lambda_p, generation_radius)
    n_parents = radii.size
    if n_parents == 0:
        return PointSet(np.empty((0, 2)), (), float(window_radius))

    angles = _TWO_PI * angle_rng.random(n_parents)
    parents = np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))
    counts = count_rng.poisson(params.m_bar, n_parents)

    uv = offset_rng.random((int(counts.sum()), 2))
    s = params.r_d * np.sqrt(uv[:, 0])
    theta = _TWO_PI * uv[:, 1]
    offsets = np.column_stack((s * np.cos(theta), s * np.sin(theta)))

    clusters = []
    for parent, chunk in zip(parents, np.split(offsets, np.cumsum(counts)[:-1])):
        clusters.append(parent + chunk)
    return PointSet(parents, tuple(clusters), float(window_radius))


def _min_origin_distance(point_set: PointSet) -> float:
    best = math.inf
    for cluster in point_set.clusters:
        if len(cluster):
            best = min(best, float(np.min(np.hypot(cluster[:, 0], cluster[:, 1]))))
    return best


# ---------------------------------------------------------------------------
# contact-distance sampler


def _contact_chunk(
    params: MCPParams, window_radius: float, seed: int, start: int, stop: int
) -> np.ndarray:
    out = np.empty(stop - start)
    for i in range(start, stop):
        rng = _substream(seed, (_CONTACT_NS, i))
        out[i - start] = _min_origin_distance(sample_mcp(params, window_radius, rng))
    return out


def sample_contact_distance(
    params: MCPParams, config: SimulationConfig, window_radius: float | None = None
) -> EmpiricalCdf:
    """Distance from the origin (an independent location) to the nearest process point.

    The generation window defaults to r_max, which the dilated-disk
    construction already makes exact; passing a larger ``window_radius``
    changes no sample (edge-effect freedom).
    """
    window = config.r_max if window_radius is None else float(window_radius)
    if window < config.r_max:
        raise ValueError("window_radius must cover the censoring radius r_max")
    chunk = partial(_contact_chunk, params, window, config.seed)
    distances = np.concatenate(_run_chunks(chunk, config))
    return EmpiricalCdf.from_distances(distances, config.r_max)


# ---------------------------------------------------------------------------
# nearest-neighbor sampler, reduced-palm construction


def _draw_own_cluster(params: MCPParams, rng: np.random.Generator) -> np.ndarray:
    """Sibling points of the reference point's own cluster.

    The cluster center sits at distance x0 from the reference point with
    density 2 x0 / r_d**2 on [0, r_d]; by isotropy it is placed on the
    positive x-axis.  Siblings number Poisson(m_bar): together with the
    reference point itself the cluster size is the number-weighted
    1 + Poisson(m_bar).
    """
    r_d = params.r_d
    x0 = r_d * math.sqrt(rng.random())
    n_siblings = int(rng.poisson(params.m_bar))
    uv = rng.random((n_siblings, 2))
    s = r_d * np.sqrt(uv[:, 0])
    theta = _TWO_PI * uv[:, 1]
    return np.column_stack((x0 + s * np.cos(theta), s * np.sin(theta)))


def _palm_chunk(
    params: MCPParams,
    r_max: float,
    include_background: bool,
    seed: int,
    start: int,
    stop: int,
) -> np.ndarray:
    out = np.empty(stop - start)
    for i in range(start, stop):
        rng = _substream(seed, (_PALM_NS, i))
        own_rng, background_rng = rng.spawn(2)
        siblings = _draw_own_cluster(params, own_rng)
        best = math.inf
        if len(siblings):
            best = float(np.min(np.hypot(siblings[:, 0], siblings[:, 1])))
        if include_background:
            background = sample_mcp(params, r_max, background_rng)
            best = min(best, _min_origin_distance(background))
        out[i - start] = best
    return out


def sample_nn_distance_palm(
    params: MCPParams, config: SimulationConfig, include_background: bool = True
) -> EmpiricalCdf:
    """Nearest-neighbor distance of a typical process point, built from its palm form.

    Each realization is (i) the reference point's own cluster drawn as in
    `_draw_own_cluster` and (ii) an independent full realization of the
    process; the sample is the distance to the nearest point of the union.
    With ``include_background=False`` only the own-cluster siblings compete,
    which isolates the `own_cluster_vacancy` factor of the analytic CDF.
    """
    chunk = partial(_palm_chunk, params, config.r_max, include_background, config.seed)
    distances = np.concatenate(_run_chunks(chunk, config))
    return EmpiricalCdf.from_distances(distances, config.r_max)


def sample_palm_cluster_sizes(params: MCPParams, n_samples: int, seed: int) -> np.ndarray:
    """Own-cluster sizes recorded by the palm sampler (same substreams, same draws)."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    sizes = np.empty(n_samples, dtype=np.int64)
    for i in range(n_samples):
        rng = _substream(seed, (_PALM_NS, i))
        own_rng, _ = rng.spawn(2)
        sizes[i] = len(_draw_own_cluster(params, own_rng)) + 1
    return sizes


# ---------------------------------------------------------------------------
# nearest-neighbor sampler, window construction (independent cross-check)


def _window_realization(
    params: MCPParams, r_max: float, window_radius: float, seed: int, index: int
) -> tuple[float, int, int]:
    """(nearest-neighbor distance, picked cluster size, redraw count) for one realization.

    Picks a uniformly random process point whose r_max-ball lies inside the
    fully generated region and measures the distance to its nearest other
    point; realizations with no eligible point are redrawn from a fresh
    substream.
    """
    pick_limit = window_radius - r_max
    for attempt in count():
        rng = _substream(seed, (_WINDOW_NS, index, attempt))
        pick_rng, process_rng = rng.spawn(2)
        realization = sample_mcp(params, window_radius, process_rng)
        points = realization.all_offspring()
        if len(points) == 0:
            continue
        norms = np.hypot(points[:, 0], points[:, 1])
        eligible = np.flatnonzero(norms <= pick_limit)
        if eligible.size == 0:
            continue
        picked = int(eligible[int(pick_rng.random() * eligible.size)])
        ref = points[picked]
        squared = (points[:, 0] - ref[0]) ** 2 + (points[:, 1] - ref[1]) ** 2
        squared[picked] = np.inf
        nearest = math.sqrt(float(squared.min())) if len(points) > 1 else math.inf
        counts = np.fromiter((len(c) for c in realization.clusters), dtype=np.int64)
        cluster_of = np.repeat(np.arange(counts.size), counts)
        return nearest, int(counts[cluster_of[picked]]), attempt


def _window_chunk(
    params: MCPParams,
    r_max: float,
    window_radius: float,
    seed: int,
    start: int,
    stop: int,
) -> tuple[np.ndarray, np.ndarray, int]:
    distances = np.empty(stop - start)
    sizes = np.empty(stop - start, dtype=np.int64)
    redraws = 0
    for i in range(start, stop):
        d, size, attempts = _window_realization(params, r_max, window_radius, seed, i)
        distances[i - start] = d
        sizes[i - start] = size
        redraws += attempts
    return distances, sizes, redraws


def _default_window(params: MCPParams, r_max: float) -> float:
    # generous multiple of r_max + r_d: the uniform pick over one realization
    # approaches the typical-point law as the window grows
    return 4.0 * (r_max + params.r_d)


def _run_window_chunks(
    params: MCPParams, config: SimulationConfig, window_radius: float | None
) -> tuple[np.ndarray, np.ndarray]:
    window = _default_window(params, config.r_max) if window_radius is None else float(window_radius)
    if window <= config.r_max + params.r_d:
        raise ValueError(
            "window_radius must exceed r_max + r_d (and should exceed it comfortably) "
            "so the picked point's neighborhood is fully generated"
        )
    chunk = partial(_window_chunk, params, config.r_max, window, config.seed)
    parts = _run_chunks(chunk, config)
    distances = np.concatenate([p[0] for p in parts])
    sizes = np.concatenate([p[1] for p in parts])
    redraws = sum(p[2] for p in parts)
    rate = redraws / (config.n_samples + redraws)
    if rate > 0.5:
        warnings.warn(
            f"window sampler redrew {rate:.0%} of realizations (empty pick region); "
            "enlarge the window or densify the process",
            RuntimeWarning,
            stacklevel=3,
        )
    return distances, sizes


def sample_nn_distance_window(
    params: MCPParams, config: SimulationConfig, window_radius: float | None = None
) -> EmpiricalCdf:
    """Nearest-neighbor distance via a uniform pick from a plain realization.

    Independent cross-check of `sample_nn_distance_palm`: size-biasing of the
    picked cluster arises automatically from the uniform pick over points.
    """
    distances, _ = _run_window_chunks(params, config, window_radius)
    return EmpiricalCdf.from_distances(distances, config.r_max)


def sample_window_cluster_sizes(
    params: MCPParams, config: SimulationConfig, window_radius: float | None = None
) -> np.ndarray:
    """Sizes of the clusters picked by the window sampler (frequency ∝ cluster size)."""
    _, sizes = _run_window_chunks(params, config, window_radius)
    return sizes


# ---------------------------------------------------------------------------
# batch plumbing


def _run_chunks(chunk: Callable, config: SimulationConfig) -> list:
    """Split [0, n_samples) into index chunks and run them, possibly in processes.

    Chunk boundaries cannot influence the per-index substreams, and results
    are concatenated in index order, so the output is identical for any
    worker count.
    """
    n = config.n_samples
    if config.workers == 1:
        return [chunk(0, n)]
    n_chunks = min(n, config.workers * 4)
    bounds = np.linspace(0, n, n_chunks + 1).astype(int)
    starts = bounds[:-1].tolist()
    stops = bounds[1:].tolist()
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(chunk, starts, stops))


def dump_samples(ecdf: EmpiricalCdf, path: str | Path) -> None:
    """Write raw distance samples, one per line, with ``inf`` marking censored ones."""
    lines = [repr(float(d)) for d in ecdf.sorted_samples]
    lines.extend(["inf"] * ecdf.n_censored)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
