"""Monte Carlo certification of band coverage and width.

Replications are driven by a counter-based generator (Philox) keyed by
``(seed, replication index)``: every replication's noise depends only on the
seed and its own index, never on execution order, so serial and multi-threaded
runs produce byte-identical reports.  Uniform draws are mapped to normals
through the package's own deterministic bisection inverse of the Gaussian
distribution function.

Coverage is recorded both for the truth ``f`` and for the surrogate candidate
set (the band counts as covering when *some* candidate lies inside it
pointwise, boundary ties included).  Widths and the adaptive level choice are
collected per replication and summarized in a :class:`SimReport`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bands import (
    BandParams,
    adaptive_band_nested,
    bonferroni_band,
    min_feasible_gamma,
    subspace_band,
)
from .errors import DomainError, FeasibilityError
from .specfun import normal_quantile
from .subspace import NestedScale, Subspace, _as_vector, norm2, sup_norm
from .surrogate import surrogate_set

__all__ = [
    "Scenario",
    "SimReport",
    "run",
    "gaussian_draw",
    "make_spoiler",
]

_KINDS = ("adaptive", "bonferroni", "subspace")


@dataclass(frozen=True, eq=False)
class Scenario:
    """One Monte Carlo configuration.

    ``kind`` selects the procedure: ``"adaptive"`` (requires ``scale`` and
    ``params``), ``"bonferroni"`` (requires ``alpha`` and ``sigma``), or
    ``"subspace"`` (requires ``space``, ``alpha`` and ``sigma``).  ``truth``
    is the mean vector; noise is ``N(0, sigma^2)`` per coordinate.
    """

    kind: str
    truth: np.ndarray
    reps: int
    seed: int
    scale: NestedScale | None = None
    params: BandParams | None = None
    space: Subspace | None = None
    alpha: float | None = None
    sigma: float | None = None
    per_coordinate: bool = False

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        truth = _as_vector(self.truth)
        object.__setattr__(self, "truth", truth)
        if not isinstance(self.reps, int) or self.reps < 1:
            raise DomainError(f"reps must be a positive integer, got {self.reps!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise DomainError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if self.kind == "adaptive":
            if not isinstance(self.scale, NestedScale) or not isinstance(self.params, BandParams):
                raise DomainError("adaptive scenarios need scale= and params=")
            if truth.shape[0] != self.scale.n:
                raise DomainError(
                    f"truth has length {truth.shape[0]} but the scale grid is {self.scale.n}"
                )
        else:
            if self.alpha is None or self.sigma is None:
                raise DomainError(f"{self.kind} scenarios need alpha= and sigma=")
            object.__setattr__(self, "alpha", float(self.alpha))
            object.__setattr__(self, "sigma", float(self.sigma))
            if self.kind == "subspace":
                if not isinstance(self.space, Subspace):
                    raise DomainError("subspace scenarios need space=")
                if truth.shape[0] != self.space.n:
                    raise DomainError(
                        f"truth has length {truth.shape[0]} but the subspace grid is {self.space.n}"
                    )

    @property
    def noise_sigma(self) -> float:
        return self.params.sigma if self.kind == "adaptive" else float(self.sigma)

    @property
    def n(self) -> int:
        return self.truth.shape[0]


@dataclass(frozen=True, eq=False)
class SimReport:
    """Aggregated Monte Carlo results.

    Coverage estimates come with binomial standard errors
    ``sqrt(p*(1-p)/reps)``.  ``width_quantiles`` maps probability levels to
    empirical width quantiles; ``prob_width_le`` reports the empirical
    probability that the width is at most the requested threshold (``None``
    when no threshold was given); ``level_histogram`` counts the accepted
    level per replication for adaptive runs (``None`` otherwise).  The raw
    per-replication ``widths`` stay on the object but are not serialized.
    """

    reps: int
    seed: int
    surrogate_coverage: float
    surrogate_se: float
    true_coverage: float
    true_se: float
    width_quantiles: dict
    prob_width_le: dict | None
    level_histogram: dict | None
    widths: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "reps": int(self.reps),
            "seed": int(self.seed),
            "surrogateCoverage": float(self.surrogate_coverage),
            "surrogateCoverageSE": float(self.surrogate_se),
            "trueCoverage": float(self.true_coverage),
            "trueCoverageSE": float(self.true_se),
            "widthQuantiles": {k: float(v) for k, v in self.width_quantiles.items()},
            "probWidthLE": (
                None
                if self.prob_width_le is None
                else {k: float(v) for k, v in self.prob_width_le.items()}
            ),
            "levelHistogram": (
                None
                if self.level_histogram is None
                else {k: int(v) for k, v in self.level_histogram.items()}
            ),
        }


def gaussian_draw(seed: int, rep: int, n: int) -> np.ndarray:
    """The ``n`` standard normal deviates of replication ``rep``.

    Philox keyed by ``(seed mod 2^64, rep)`` produces raw 64-bit words; the
    top 53 bits give uniforms offset into the open interval, which are mapped
    through :func:`~surrband.specfun.normal_quantile`.  Pure function of its
    arguments — the foundation of run-order-independent reproducibility.
    """
    key = np.array([seed % 2**64, rep], dtype=np.uint64)
    raw = np.random.Philox(key=key).random_raw(n)
    u = (raw >> np.uint64(11)) * 2.0**-53 + 2.0**-54
    return normal_quantile(u)


def _covers(band, g: np.ndarray) -> bool:
    return bool(np.all((band.lower <= g) & (g <= band.upper)))


def run(scenario: Scenario, *, width_threshold: float | None = None, threads: int = 1) -> SimReport:
    """Execute the Monte Carlo and aggregate coverage/width statistics.

    ``threads > 1`` splits replications into contiguous chunks executed in a
    thread pool; results are byte-identical to the serial run.  Adaptive
    scenarios are checked for feasibility once up front (raising
    :class:`~surrband.errors.FeasibilityError` before any sampling).
    """
    if not isinstance(threads, int) or threads < 1:
        raise DomainError(f"threads must be a positive integer, got {threads!r}")
    if width_threshold is not None:
        width_threshold = float(width_threshold)
        if not math.isfinite(width_threshold):
            raise DomainError("width_threshold must be finite")

    f = scenario.truth
    n = scenario.n
    sigma = scenario.noise_sigma
    reps = scenario.reps
    seed = scenario.seed

    if scenario.kind == "adaptive":
        floor = min_feasible_gamma(scenario.scale, scenario.params)
        if scenario.params.gamma < floor:
            raise FeasibilityError(scenario.params.gamma, floor)
        candidates = [c.values for c in surrogate_set(scenario.scale, f, scenario.params.tuning)]
    else:
        candidates = [f]

    widths = np.empty(reps, dtype=np.float64)
    cover_true = np.zeros(reps, dtype=bool)
    cover_surr = np.zeros(reps, dtype=bool)
    levels = np.zeros(reps, dtype=np.int64) if scenario.kind == "adaptive" else None

    def build_band(y):
        if scenario.kind == "adaptive":
            return adaptive_band_nested(scenario.scale, y, scenario.params)
        if scenario.kind == "bonferroni":
            return bonferroni_band(y, scenario.alpha, scenario.sigma)
        return subspace_band(
            scenario.space, y, scenario.alpha, scenario.sigma,
            per_coordinate=scenario.per_coordinate,
        )

    def work(lo: int, hi: int) -> None:
        for rep in range(lo, hi):
            y = f + sigma * gaussian_draw(seed, rep, n)
            band = build_band(y)
            widths[rep] = band.width
            cover_true[rep] = _covers(band, f)
            cover_surr[rep] = any(_covers(band, g) for g in candidates)
            if levels is not None:
                levels[rep] = band.selected_level

    if threads == 1:
        work(0, reps)
    else:
        bounds_list = np.linspace(0, reps, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(work, int(lo), int(hi))
                for lo, hi in zip(bounds_list[:-1], bounds_list[1:])
                if hi > lo
            ]
            for fut in futures:
                fut.result()

    def rate(flags: np.ndarray) -> tuple[float, float]:
        p = float(np.count_nonzero(flags)) / reps
        return p, math.sqrt(p * (1.0 - p) / reps)

    p_surr, se_surr = rate(cover_surr)
    p_true, se_true = rate(cover_true)

    q_levels = {0.5, 0.9}
    if scenario.kind == "adaptive":
        q_levels.add(1.0 - scenario.params.gamma)
    width_quantiles = {
        str(q): float(np.quantile(widths, q)) for q in sorted(q_levels)
    }

    prob_width_le = None
    if width_threshold is not None:
        p = float(np.count_nonzero(widths <= width_threshold)) / reps
        prob_width_le = {
            "threshold": width_threshold,
            "prob": p,
            "se": math.sqrt(p * (1.0 - p) / reps),
        }

    level_histogram = None
    if levels is not None:
        top = scenario.scale.m + 1
        level_histogram = {
            str(j): int(np.count_nonzero(levels == j)) for j in range(1, top + 1)
        }

    return SimReport(
        reps=reps,
        seed=seed,
        surrogate_coverage=p_surr,
        surrogate_se=se_surr,
        true_coverage=p_true,
        true_se=se_true,
        width_quantiles=width_quantiles,
        prob_width_le=prob_width_le,
        level_histogram=level_histogram,
        widths=widths,
    )


def make_spoiler(space: Subspace, eps2: float, eps_inf: float, margin: float) -> np.ndarray:
    """A mean vector whose surrogate at this level is the projection.

    Builds the sup-normalized projection residual of the unit spike at the
    maximum-leverage coordinate, then scales it to height
    ``h = eps_inf + margin * (h_max - eps_inf)`` where ``h_max = eps2 /
    norm2(residual)`` is the largest height keeping the two-norm inside the
    cap.  For ``margin`` in ``(0, 1]`` the result has residual two-norm at
    most ``eps2`` and sup norm strictly above ``eps_inf`` — a spoiler by
    construction (``margin == 1`` lands exactly on the two-norm cap).
    Requires ``eps_inf < h_max``; the projection of the returned vector is 0.
    """
    if not isinstance(space, Subspace):
        raise DomainError(f"space must be a Subspace, got {type(space).__name__}")
    eps2 = float(eps2)
    eps_inf = float(eps_inf)
    margin = float(margin)
    if not (math.isfinite(eps2) and eps2 > 0.0):
        raise DomainError(f"eps2 must be positive, got {eps2!r}")
    if not (math.isfinite(eps_inf) and eps_inf >= 0.0):
        raise DomainError(f"eps_inf must be nonnegative, got {eps_inf!r}")
    if not 0.0 < margin <= 1.0:
        raise DomainError(f"margin must lie in (0, 1], got {margin!r}")

    profile = space.leverage_profile()
    i0 = int(np.argmax(profile))
    spike = np.zeros(space.n)
    spike[i0] = 1.0
    resid = spike - space.project(spike)
    peak = sup_norm(resid)
    if peak < 1e-12:
        raise DomainError(
            f"coordinate {i0} lies inside the subspace; no spoiler direction exists"
        )
    direction = resid / peak
    h_max = eps2 / norm2(direction)
    if not eps_inf < h_max:
        raise DomainError(
            f"eps_inf={eps_inf!r} is not below the reachable height "
            f"h_max={h_max!r}; no spoiler exists at this tuning"
        )
    h = eps_inf + margin * (h_max - eps_inf)
    return h * direction
