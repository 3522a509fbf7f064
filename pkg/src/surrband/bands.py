"""Confidence band constructions.

The adaptive procedure walks a nested scale from coarsest to finest level,
accepts the first level whose residual sum of squares passes a chi-square
test at level ``gamma``, and centers the band at that level's projection with
half-width ``sigma * omega_j * z + eps_inf_j``; if every level is rejected it
falls back to the band around the raw data with the unshrunk Gaussian
half-width.  Coverage of the surrogate target holds with probability
``1 - alpha`` (budgeted across levels by ``alpha_split``), and with
probability at least ``1 - gamma`` the band is no wider than the accepted
level's design width.

``gamma_feasible``/``min_feasible_gamma`` quantify when the residual test has
enough power at the configured two-norm cap for that width guarantee to be
meaningful; the adaptive constructors raise
:class:`~surrband.errors.FeasibilityError` below the feasible range.

:func:`bonferroni_band` and :func:`subspace_band` are the two non-adaptive
baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FeasibilityError
from .specfun import chi2_cdf, chi2_quantile, z_upper
from .subspace import NestedScale, Subspace, _as_vector
from .surrogate import SurrogateTuning

__all__ = [
    "BandParams",
    "Band",
    "t_statistic",
    "acceptance_threshold",
    "adaptive_band_nested",
    "adaptive_band_single",
    "gamma_feasible",
    "min_feasible_gamma",
    "level_widths",
    "bonferroni_band",
    "subspace_band",
]


@dataclass(frozen=True)
class BandParams:
    """Parameters of the adaptive band.

    ``alpha_split`` allocates the coverage budget: one entry per level plus a
    final entry for the all-rejected fallback, summing to at most ``alpha``.
    ``tuning`` supplies the per-level residual caps; its length fixes the
    number of levels.
    """

    alpha: float
    gamma: float
    sigma: float
    tuning: SurrogateTuning
    alpha_split: tuple[float, ...]

    def __post_init__(self):
        for name in ("alpha", "gamma"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and 0.0 < v < 1.0):
                raise DomainError(f"{name} must lie in (0, 1), got {v!r}")
            object.__setattr__(self, name, v)
        sigma = float(self.sigma)
        if not (math.isfinite(sigma) and sigma > 0.0):
            raise DomainError(f"sigma must be positive, got {sigma!r}")
        object.__setattr__(self, "sigma", sigma)
        if not isinstance(self.tuning, SurrogateTuning):
            raise DomainError(
                f"tuning must be a SurrogateTuning, got {type(self.tuning).__name__}"
            )
        split = tuple(float(a) for a in self.alpha_split)
        if len(split) != self.tuning.m + 1:
            raise DomainError(
                f"alpha_split must have length m + 1 = {self.tuning.m + 1}, "
                f"got {len(split)}"
            )
        if any(not (math.isfinite(a) and a > 0.0) for a in split):
            raise DomainError(f"alpha_split entries must be positive, got {split!r}")
        if sum(split) > self.alpha * (1.0 + 1e-9) + 1e-15:
            raise DomainError(
                f"alpha_split sums to {sum(split)!r}, exceeding alpha={self.alpha!r}"
            )
        object.__setattr__(self, "alpha_split", split)

    @classmethod
    def equal_split(
        cls, alpha: float, gamma: float, sigma: float, tuning: SurrogateTuning
    ) -> "BandParams":
        """Budget ``alpha`` equally over the ``m`` levels and the fallback."""
        m = tuning.m
        return cls(
            alpha=alpha,
            gamma=gamma,
            sigma=sigma,
            tuning=tuning,
            alpha_split=(float(alpha) / (m + 1),) * (m + 1),
        )

    @property
    def m(self) -> int:
        return self.tuning.m


@dataclass(frozen=True, eq=False)
class Band:
    """A computed confidence band.

    ``width`` is the design width ``2 * half_width`` of the branch taken (the
    band is constant-width by construction).  ``selected_level`` is the
    1-based accepted level, ``m + 1`` for the fallback, and ``None`` for the
    non-adaptive baselines (whose ``accepted`` is also ``None``).
    ``t_stats``/``thresholds`` record the per-level residual statistics and
    acceptance cutoffs of the adaptive walk.
    """

    lower: np.ndarray
    upper: np.ndarray
    center: np.ndarray
    width: float
    selected_level: int | None
    accepted: bool | None
    t_stats: tuple[float, ...] = ()
    thresholds: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        """JSON-friendly summary (arrays omitted; see the CSV writer)."""
        return {
            "width": self.width,
            "selectedLevel": self.selected_level,
            "accepted": self.accepted,
            "tStats": list(self.t_stats),
            "thresholds": [
                (t if math.isfinite(t) else None) for t in self.thresholds
            ],
        }


def t_statistic(space: Subspace, y, sigma: float) -> float:
    """Residual sum of squares ``sum (y - project(y))^2 / sigma^2``."""
    y = _as_vector(y, space.n)
    sigma = float(sigma)
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    resid = y - space.project(y)
    return float(resid @ resid) / (sigma * sigma)


def acceptance_threshold(n: int, d: int, gamma: float) -> float:
    """Residual-test cutoff: the ``1 - gamma`` chi-square quantile on ``n - d``
    degrees of freedom (``+inf`` when ``d == n``: nothing to test)."""
    if d == n:
        return math.inf
    return chi2_quantile(1.0 - float(gamma), n - d)


def _half_width_accepted(space: Subspace, budget: float, sigma: float, eps_inf: float) -> float:
    return sigma * space.omega * z_upper(budget / (2.0 * space.n)) + eps_inf


def _half_width_fallback(n: int, budget: float, sigma: float) -> float:
    return sigma * z_upper(budget / (2.0 * n))


def gamma_feasible(n: int, d: int, eps2: float, alpha: float, sigma: float = 1.0) -> float:
    """Smallest feasible narrowness level for a single-subspace configuration.

    Evaluates the rejection probability that the residual test can still
    guarantee when the residual two-norm sits at the cap ``eps2``: the
    chi-square noncentrality is ``n * eps2^2 / sigma^2``, the acceptance
    budget is ``alpha / 2`` (the single-subspace procedure splits ``alpha``
    evenly between its two branches).  A requested ``gamma`` below this value
    cannot be certified.
    """
    return _feasible_rhs(n, d, eps2, float(alpha) / 2.0, sigma)


def _feasible_rhs(n: int, d: int, eps2: float, prob: float, sigma: float) -> float:
    if not (isinstance(n, int) and isinstance(d, int)):
        raise DomainError("n and d must be integers")
    if not 0 <= d < n:
        raise DomainError(f"need 0 <= d < n; got d={d}, n={n}")
    eps2 = float(eps2)
    sigma = float(sigma)
    if not (math.isfinite(eps2) and eps2 >= 0.0):
        raise DomainError(f"eps2 must be nonnegative, got {eps2!r}")
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    if not 0.0 < prob < 1.0:
        raise DomainError(f"probability budget must lie in (0, 1), got {prob!r}")
    ncp = n * eps2 * eps2 / (sigma * sigma)
    cutoff = chi2_quantile(prob, n - d, ncp)
    return 1.0 - chi2_cdf(cutoff, n - d)


def min_feasible_gamma(scale: NestedScale, params: BandParams) -> float:
    """Smallest ``gamma`` certifiable across all levels of the scale.

    The per-level requirement uses the level's own coverage budget
    ``alpha_split[j]``; fully saturated levels (``d == n``) impose nothing.
    """
    if params.m != scale.m:
        raise DomainError(f"params describe {params.m} levels, scale has {scale.m}")
    n = scale.n
    worst = 0.0
    for j, space in enumerate(scale.levels):
        if space.d == n:
            continue
        worst = max(
            worst,
            _feasible_rhs(n, space.d, params.tuning.eps2[j], params.alpha_split[j], params.sigma),
        )
    return worst


def level_widths(scale: NestedScale, params: BandParams) -> tuple[float, ...]:
    """Design widths per level: ``2 * half_width`` for levels ``1..m`` and the
    fallback, in order.  Independent of the data."""
    if params.m != scale.m:
        raise DomainError(f"params describe {params.m} levels, scale has {scale.m}")
    widths = [
        2.0
        * _half_width_accepted(
            space, params.alpha_split[j], params.sigma, params.tuning.eps_inf[j]
        )
        for j, space in enumerate(scale.levels)
    ]
    widths.append(2.0 * _half_width_fallback(scale.n, params.alpha_split[scale.m], params.sigma))
    return tuple(widths)


def adaptive_band_nested(scale: NestedScale, y, params: BandParams) -> Band:
    """Adaptive band over a nested scale.

    Walks levels coarse to fine, accepts the first level whose residual
    statistic is at most the ``1 - gamma`` chi-square cutoff, and falls back
    to the identity band when all levels reject.  Raises
    :class:`~surrband.errors.FeasibilityError` when ``gamma`` is below
    :func:`min_feasible_gamma` for this configuration.
    """
    if params.m != scale.m:
        raise DomainError(f"params describe {params.m} levels, scale has {scale.m}")
    n = scale.n
    y = _as_vector(y, n)
    feasible_floor = min_feasible_gamma(scale, params)
    if params.gamma < feasible_floor:
        raise FeasibilityError(params.gamma, feasible_floor)

    t_stats = tuple(t_statistic(space, y, params.sigma) for space in scale.levels)
    thresholds = tuple(
        acceptance_threshold(n, space.d, params.gamma) for space in scale.levels
    )
    selected = scale.m + 1
    for j, (t, cutoff) in enumerate(zip(t_stats, thresholds), start=1):
        if t <= cutoff:
            selected = j
            break

    if selected <= scale.m:
        space = scale.levels[selected - 1]
        center = space.project(y)
        half = _half_width_accepted(
            space, params.alpha_split[selected - 1], params.sigma,
            params.tuning.eps_inf[selected - 1],
        )
        accepted = True
    else:
        center = y.copy()
        half = _half_width_fallback(n, params.alpha_split[scale.m], params.sigma)
        accepted = False
    return Band(
        lower=center - half,
        upper=center + half,
        center=center,
        width=2.0 * half,
        selected_level=selected,
        accepted=accepted,
        t_stats=t_stats,
        thresholds=thresholds,
    )


def adaptive_band_single(space: Subspace, y, params: BandParams) -> Band:
    """Single-subspace adaptive band: the one-level nested procedure.

    ``params`` must describe exactly one level (two budget entries; the
    conventional choice is the even split ``(alpha/2, alpha/2)``).
    """
    if not isinstance(space, Subspace):
        raise DomainError(f"space must be a Subspace, got {type(space).__name__}")
    if params.m != 1:
        raise DomainError(
            f"single-subspace band needs a one-level tuning, got m={params.m}"
        )
    return adaptive_band_nested(NestedScale((space,)), y, params)


def bonferroni_band(y, alpha: float, sigma: float) -> Band:
    """Constant-width band around the raw data with union-bound calibration.

    Half-width ``sigma * z_upper(alpha / (2n))``; exact coverage probability
    ``(1 - alpha/n)^n`` for any mean vector.
    """
    y = _as_vector(y)
    n = y.shape[0]
    alpha = float(alpha)
    sigma = float(sigma)
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    half = sigma * z_upper(alpha / (2.0 * n))
    return Band(
        lower=y - half,
        upper=y + half,
        center=y.copy(),
        width=2.0 * half,
        selected_level=None,
        accepted=None,
    )


def subspace_band(
    space: Subspace, y, alpha: float, sigma: float, *, per_coordinate: bool = False
) -> Band:
    """Band around the projection, valid for means inside the subspace.

    Default half-width ``sigma * omega * z_upper(alpha / (2n))`` (uniform);
    with ``per_coordinate=True`` each coordinate instead uses its own
    leverage, giving a narrower band off the peak-leverage coordinates.
    """
    if not isinstance(space, Subspace):
        raise DomainError(f"space must be a Subspace, got {type(space).__name__}")
    y = _as_vector(y, space.n)
    alpha = float(alpha)
    sigma = float(sigma)
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    center = space.project(y)
    z = z_upper(alpha / (2.0 * space.n))
    if per_coordinate:
        half = sigma * space.leverage_profile() * z
        width = 2.0 * float(np.max(half))
    else:
        half = sigma * space.omega * z
        width = 2.0 * half
    return Band(
        lower=center - half,
        upper=center + half,
        center=center,
        width=width,
        selected_level=None,
        accepted=None,
    )
