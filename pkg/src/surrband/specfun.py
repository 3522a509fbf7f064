"""Scalar special functions used throughout the package.

Gaussian tail quantiles, the two-sided Gaussian interval probability ``tau``
and its inverse, central and noncentral chi-square distribution functions and
quantiles, and the calibration constants ``kappa``, ``qconst`` and ``econst``
that size the two-norm tuning radius of the band procedures.

Conventions
-----------
* ``z_upper(p)`` is the upper-tail quantile: ``P(Z > z_upper(p)) = p`` for a
  standard normal ``Z``.
* ``chi2_cdf``/``chi2_quantile`` take the noncentrality in sum-of-squares form:
  ``ncp`` is ``sum(mu_i^2)`` for a shift vector ``mu``, so the distribution is
  that of ``||N(mu, I_df)||^2``.
* ``qconst(m, beta, xi)`` returns the *scaled mean separation* ``c``: the
  separation enters the noncentral distribution as ``ncp = (c*sqrt(m))^2``.

All quantile routines use bracketed bisection on monotone distribution
functions rather than closed-form inverses, so they stay accurate deep in the
tails, and the scalar entry points are memoized (every function here is pure).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "normal_cdf",
    "normal_quantile",
    "z_upper",
    "tau",
    "tau_inv",
    "chi2_cdf",
    "chi2_quantile",
    "kappa",
    "qconst",
    "econst",
    "birge_bounds",
]

# Bisection brackets.  |z| <= 40 covers every double-precision tail
# probability (Phi(-40) underflows to 0), and +/-9.5 covers uniforms in
# [2^-54, 1 - 2^-54], the full range produced by 53-bit generators.
_Z_BRACKET = 40.0
_Z_BRACKET_VEC = 9.5


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise DomainError(message)


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def normal_cdf(x: float) -> float:
    """Standard normal distribution function ``P(Z <= x)``."""
    return float(special.ndtr(float(x)))


def normal_quantile(u):
    """Vectorized standard normal quantile by fixed-count bisection.

    Accepts an array (or scalar) of probabilities in ``[2^-54, 1 - 2^-54]``
    and returns the elementwise quantile of the standard normal distribution.
    Runs exactly 64 bisection steps on ``normal_cdf`` over ``[-9.5, 9.5]``,
    which resolves the root beyond double precision and is fully deterministic
    — the property the Monte Carlo driver relies on for reproducibility.
    """
    u = np.asarray(u, dtype=np.float64)
    lo = np.full(u.shape, -_Z_BRACKET_VEC)
    hi = np.full(u.shape, _Z_BRACKET_VEC)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = special.ndtr(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def z_upper(p: float) -> float:
    """Upper-tail standard normal quantile: the ``z`` with ``P(Z > z) = p``.

    Bisects on the survival form ``normal_cdf(-z)``, which keeps full relative
    accuracy for very small ``p`` (far upper tail).
    """
    p = _check_finite("p", p)
    _require(0.0 < p < 1.0, f"p must lie in (0, 1), got {p!r}")
    lo, hi = -_Z_BRACKET, _Z_BRACKET
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        surv = float(special.ndtr(-mid))
        if surv == p:
            return mid
        if surv > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tau(eps: float) -> float:
    """Probability that a standard normal lands within ``eps/2`` of zero.

    ``tau(eps) = P(|Z| <= eps/2) = 1 - 2*normal_cdf(-eps/2)``; nonnegative
    ``eps`` required.  Strictly increasing, with ``tau(0) = 0``.
    """
    eps = _check_finite("eps", eps)
    _require(eps >= 0.0, f"eps must be nonnegative, got {eps!r}")
    return 1.0 - 2.0 * normal_cdf(-eps / 2.0)


def tau_inv(t: float) -> float:
    """Inverse of :func:`tau` on ``[0, 1)``: the interval length with
    two-sided Gaussian probability ``t``."""
    t = _check_finite("t", t)
    _require(0.0 <= t < 1.0, f"t must lie in [0, 1), got {t!r}")
    return 2.0 * z_upper((1.0 - t) / 2.0)


# --- chi-square -----------------------------------------------------------

# Far-tail cutoff: outside mean +/- (2*sqrt((df+2*ncp)*t) + 2*t) at t=40 the
# exact tail probability is below e^-40 ~ 4e-18, so returning 0 or 1 is well
# inside the 1e-9 accuracy budget.  (A plain multiple-of-standard-deviation
# window is not safe here: at df=1 the tail at 20 standard deviations is
# still ~6e-8.)
_TAIL_EXPONENT = 40.0


def _validate_chi2_args(df: float, ncp: float) -> tuple[float, float]:
    df = _check_finite("df", df)
    ncp = _check_finite("ncp", ncp)
    _require(df > 0.0, f"df must be positive, got {df!r}")
    _require(ncp >= 0.0, f"ncp must be nonnegative, got {ncp!r}")
    return df, ncp


def chi2_cdf(x: float, df: float, ncp: float = 0.0) -> float:
    """Distribution function of ``||N(mu, I_df)||^2`` with ``sum(mu^2) = ncp``.

    The central case is the regularized lower incomplete gamma function; the
    noncentral case is the Poisson(ncp/2) mixture of central distributions,
    truncated two-sided where the Poisson mass falls below 1e-14.  Absolute
    error is below 1e-9 over the supported range.
    """
    df, ncp = _validate_chi2_args(df, ncp)
    x = _check_finite("x", x)
    if x <= 0.0:
        return 0.0

    # Far-tail short-circuit (see _TAIL_EXPONENT note above).
    spread = math.sqrt((df + 2.0 * ncp) * _TAIL_EXPONENT)
    mean = df + ncp
    if x <= mean - 2.0 * spread:
        return 0.0
    if x >= mean + 2.0 * spread + 2.0 * _TAIL_EXPONENT:
        return 1.0

    if ncp == 0.0:
        return float(special.gammainc(df / 2.0, x / 2.0))

    half = ncp / 2.0
    pad = 10.0 * math.sqrt(half) + 30.0
    k_lo = max(0, int(math.floor(half - pad)))
    k_hi = int(math.ceil(half + pad))
    ks = np.arange(k_lo, k_hi + 1, dtype=np.float64)
    log_w = -half + ks * math.log(half) - special.gammaln(ks + 1.0)
    weights = np.exp(log_w)
    terms = special.gammainc(df / 2.0 + ks, x / 2.0)
    value = float(np.dot(weights, terms))
    return min(1.0, max(0.0, value))


@lru_cache(maxsize=None)
def chi2_quantile(u: float, df: float, ncp: float = 0.0) -> float:
    """Quantile of the (non)central chi-square distribution.

    Brackets the root by doubling an initial upper bound of ``df + ncp + 10``
    until the distribution function exceeds ``u``, then bisects until the
    bracket width is below ``1e-12 * max(1, hi)``.
    """
    df, ncp = _validate_chi2_args(df, ncp)
    u = _check_finite("u", u)
    _require(0.0 < u < 1.0, f"u must lie in (0, 1), got {u!r}")
    lo = 0.0
    hi = df + ncp + 10.0
    for _ in range(200):
        if chi2_cdf(hi, df, ncp) >= u:
            break
        lo = hi
        hi *= 2.0
    else:  # pragma: no cover - would need u within 1e-300 of 1
        raise DomainError(f"failed to bracket the chi-square quantile at u={u!r}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
        if chi2_cdf(mid, df, ncp) < u:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- calibration constants ------------------------------------------------


def kappa(alpha: float, gamma: float) -> float:
    """Detection-radius constant ``(2*log(1 + 4*(1-gamma-2*alpha)^2))^(1/4)``.

    Defined for ``0 < alpha < 1`` and ``0 < gamma < 1 - 2*alpha``.
    """
    alpha = _check_finite("alpha", alpha)
    gamma = _check_finite("gamma", gamma)
    _require(0.0 < alpha < 1.0, f"alpha must lie in (0, 1), got {alpha!r}")
    _require(
        0.0 < gamma < 1.0 - 2.0 * alpha,
        f"gamma must lie in (0, 1 - 2*alpha); got alpha={alpha!r}, gamma={gamma!r}",
    )
    delta = 1.0 - gamma - 2.0 * alpha
    return (2.0 * math.log1p(4.0 * delta * delta)) ** 0.25


@lru_cache(maxsize=None)
def qconst(m: int, beta: float, xi: float) -> float:
    """Scaled mean separation at which a level-``xi`` chi-square test on ``m``
    degrees of freedom retains rejection probability ``1 - beta``.

    Returns the root ``c`` of::

        beta = chi2_cdf(t_star, m, (c*sqrt(m))**2),
        t_star = chi2_quantile(1 - xi, m)

    i.e. with the separation expressed as ``c * sqrt(m)`` in root-sum-of-squares
    units.  The left side is strictly decreasing in ``c``, so the root is found
    by bisection on ``[0, 64]``; if no root exists there a
    :class:`~surrband.errors.DomainError` is raised.  Requires
    ``0 < beta < 1 - xi < 1``.
    """
    m = int(m)
    _require(m >= 1, f"m must be a positive integer, got {m!r}")
    beta = _check_finite("beta", beta)
    xi = _check_finite("xi", xi)
    _require(0.0 < xi < 1.0, f"xi must lie in (0, 1), got {xi!r}")
    _require(
        0.0 < beta < 1.0 - xi,
        f"beta must lie in (0, 1 - xi); got beta={beta!r}, xi={xi!r}",
    )
    t_star = chi2_quantile(1.0 - xi, m)

    def accept_prob(c: float) -> float:
        return chi2_cdf(t_star, m, c * c * m)

    lo, hi = 0.0, 64.0
    # accept_prob(0) = 1 - xi > beta by construction of t_star.
    if accept_prob(hi) > beta:  # pragma: no cover - needs beta within e-40 of 1-xi
        raise DomainError(
            f"no separation in [0, 64] reaches acceptance probability {beta!r}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
        if accept_prob(mid) > beta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def econst(m: int, alpha: float, gamma: float) -> float:
    """Achievability constant ``max(qconst(m, alpha, gamma), 2*kappa(alpha, gamma))``."""
    return max(qconst(m, alpha, gamma), 2.0 * kappa(alpha, gamma))


def birge_bounds(z: float, d: float, u: float) -> tuple[float, float]:
    """Two-sided sandwich for noncentral chi-square quantiles.

    For the distribution of ``||N(mu, I_d)||^2`` with ``sum(mu^2) = z``, the
    ``u``-quantile ``q`` satisfies ``lower <= q <= upper`` with::

        lower = z + d - 2*sqrt((2*z + d) * log(1/u))
        upper = z + d + 2*sqrt((2*z + d) * log(1/(1-u))) + 2*log(1/(1-u))

    Returns the pair ``(lower, upper)``.
    """
    z = _check_finite("z", z)
    d = _check_finite("d", d)
    u = _check_finite("u", u)
    _require(z >= 0.0, f"z must be nonnegative, got {z!r}")
    _require(d >= 1.0, f"d must be at least 1, got {d!r}")
    _require(0.0 < u < 1.0, f"u must lie in (0, 1), got {u!r}")
    base = 2.0 * z + d
    lower = z + d - 2.0 * math.sqrt(base * math.log(1.0 / u))
    tail = math.log(1.0 / (1.0 - u))
    upper = z + d + 2.0 * math.sqrt(base * tail) + 2.0 * tail
    return lower, upper
