"""Linear regression subspaces over the uniform design grid.

A :class:`Subspace` is stored as a ``(d, n)`` matrix of basis rows that are
orthonormal with respect to the *normalized* inner product

    ``<f, g> = (1/n) * sum_i f_i * g_i``,

so that ``norm2`` below is the root mean square.  All geometry in this package
(projections, tuning radii, leverage) is expressed in these normalized units;
``sup_norm`` is the plain coordinate maximum.

The module provides constructors for piecewise-constant dyadic block bases and
grid-sampled function systems, a :class:`NestedScale` wrapper that validates a
strictly increasing, genuinely nested chain of subspaces, and the extremal
norm-conversion helpers tied to the leverage number ``omega``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import math

import numpy as np

from .errors import DomainError, RankDeficiencyError

__all__ = [
    "DesignGrid",
    "Subspace",
    "NestedScale",
    "inner_product",
    "norm2",
    "sup_norm",
    "orthonormalize",
    "dyadic_blocks",
    "dyadic_scale",
    "function_basis",
    "cosine_basis",
    "min_two_norm_given_inf",
    "max_inf_norm_given_two",
]

_ORTHO_TOL = 1e-8          # orthonormality acceptance in Subspace validation
_PIVOT_TOL = 1e-12         # relative rank-deficiency pivot
_NESTING_TOL = 1e-10       # sup-norm reconstruction tolerance across levels


def _as_vector(y, n: int | None = None) -> np.ndarray:
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim != 1:
        raise DomainError(f"expected a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("vector entries must be finite")
    if n is not None and arr.shape[0] != n:
        raise DomainError(f"expected a vector of length {n}, got {arr.shape[0]}")
    return arr


def inner_product(f, g) -> float:
    """Normalized inner product ``(1/n) * sum_i f_i g_i``."""
    f = _as_vector(f)
    g = _as_vector(g, f.shape[0])
    return float(f @ g) / f.shape[0]


def norm2(f) -> float:
    """Normalized two-norm (root mean square) ``sqrt((1/n) * sum_i f_i^2)``."""
    f = _as_vector(f)
    return math.sqrt(float(f @ f) / f.shape[0])


def sup_norm(f) -> float:
    """Coordinate maximum ``max_i |f_i|``."""
    f = _as_vector(f)
    return float(np.max(np.abs(f))) if f.size else 0.0


@dataclass(frozen=True)
class DesignGrid:
    """The uniform design ``x_i = i/n`` for ``i = 1..n``."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or int(self.n) < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def x(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=np.float64) / self.n


@dataclass(frozen=True, eq=False)
class Subspace:
    """A ``d``-dimensional subspace with rows orthonormal in normalized units.

    ``omega`` is the leverage number ``max_i sqrt(sum_j basis[j,i]^2 / n)``:
    the largest ratio ``|v_i| / (sqrt(n) * norm2(v))`` achievable by a member
    ``v`` of the subspace.  It always lies in ``(0, 1]``.
    """

    basis: np.ndarray
    omega: float = field(init=False)

    def __post_init__(self):
        b = np.array(self.basis, dtype=np.float64, order="C")
        if b.ndim != 2:
            raise DomainError(f"basis must be 2-d (rows x grid), got shape {b.shape}")
        d, n = b.shape
        if d < 1 or n < 1 or d > n:
            raise DomainError(f"basis shape {b.shape} is not valid (need 1 <= d <= n)")
        if not np.all(np.isfinite(b)):
            raise DomainError("basis entries must be finite")
        gram = b @ b.T / n
        if np.max(np.abs(gram - np.eye(d))) > _ORTHO_TOL:
            raise DomainError(
                "basis rows are not orthonormal under the normalized inner "
                "product; use orthonormalize() first"
            )
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        leverage = np.sum(b * b, axis=0) / n
        object.__setattr__(self, "omega", float(math.sqrt(float(np.max(leverage)))))

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    def coefficients(self, y) -> np.ndarray:
        """Basis coefficients of the projection of ``y``."""
        y = _as_vector(y, self.n)
        return self.basis @ y / self.n

    def project(self, y) -> np.ndarray:
        """Orthogonal projection of ``y`` onto the subspace."""
        return self.coefficients(y) @ self.basis

    def leverage_profile(self) -> np.ndarray:
        """Per-coordinate leverage ``sqrt(sum_j basis[j,i]^2 / n)``.

        The maximum of this profile is ``omega``; entry ``i`` equals the
        ratio ``|v_i| / (sqrt(n)*norm2(v))`` for the subspace member peaking
        at coordinate ``i``.
        """
        return np.sqrt(np.sum(self.basis * self.basis, axis=0) / self.n)


def orthonormalize(rows) -> np.ndarray:
    """Gram-Schmidt orthonormalization in the normalized inner product.

    Runs modified Gram-Schmidt with one re-orthogonalization pass per row.  If
    a row's residual norm falls below ``1e-12 * max(1, norm2(row))`` the row is
    numerically dependent and :class:`~surrband.errors.RankDeficiencyError`
    (naming the row) is raised.
    """
    a = np.array(rows, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DomainError(f"expected a nonempty 2-d array of rows, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("row entries must be finite")
    d, n = a.shape
    out = np.empty_like(a)
    for i in range(d):
        v = a[i].copy()
        for _ in range(2):
            for j in range(i):
                v -= (float(v @ out[j]) / n) * out[j]
        nrm = math.sqrt(float(v @ v) / n)
        row_scale = math.sqrt(float(a[i] @ a[i]) / n)
        if nrm < _PIVOT_TOL * max(1.0, row_scale):
            raise RankDeficiencyError(i)
        out[i] = v / nrm
    return out


def dyadic_blocks(n: int, d: int) -> Subspace:
    """Piecewise-constant subspace on ``d`` consecutive blocks of the grid.

    Block sizes are ``n // d``, with the first ``n % d`` blocks one element
    larger.  When ``d`` divides ``n`` all blocks have size ``n/d`` and
    ``omega == sqrt(d/n)``; in general ``omega == 1/sqrt(min block size)``.
    """
    grid = DesignGrid(n)
    if not isinstance(d, (int, np.integer)):
        raise DomainError(f"d must be an integer, got {d!r}")
    d = int(d)
    if not 1 <= d <= grid.n:
        raise DomainError(f"d must lie in [1, n]; got d={d}, n={grid.n}")
    base, extra = divmod(grid.n, d)
    sizes = [base + 1] * extra + [base] * (d - extra)
    rows = np.zeros((d, grid.n))
    start = 0
    for j, size in enumerate(sizes):
        rows[j, start : start + size] = math.sqrt(grid.n / size)
        start += size
    return Subspace(rows)


def function_basis(n: int, fns: Sequence[Callable[[np.ndarray], np.ndarray]]) -> Subspace:
    """Subspace spanned by functions evaluated on the design grid.

    Each callable receives the grid ``x = (1/n, 2/n, ..., 1)`` and must return
    the vector of its values there; the evaluations are then orthonormalized.
    """
    grid = DesignGrid(n)
    if len(fns) < 1:
        raise DomainError("need at least one basis function")
    rows = np.stack([np.asarray(f(grid.x), dtype=np.float64) for f in fns])
    if rows.shape != (len(fns), grid.n):
        raise DomainError(
            f"basis functions must each return {grid.n} values, got shape {rows.shape}"
        )
    return Subspace(orthonormalize(rows))


def cosine_basis(n: int, d: int) -> Subspace:
    """Low-frequency cosine subspace: ``1, sqrt(2)cos(k pi x)`` for ``k < d``."""
    if not isinstance(d, (int, np.integer)) or int(d) < 1:
        raise DomainError(f"d must be a positive integer, got {d!r}")

    def make(k: int):
        if k == 0:
            return lambda x: np.ones_like(x)
        return lambda x: math.sqrt(2.0) * np.cos(k * math.pi * x)

    return function_basis(n, [make(k) for k in range(int(d))])


@dataclass(frozen=True, eq=False)
class NestedScale:
    """A strictly increasing chain of genuinely nested subspaces.

    Validates that all levels share one grid, dimensions strictly increase,
    and every basis row of each level reconstructs from the next level to
    within ``1e-10`` in sup norm (true nesting, not just growing dimension).
    """

    levels: tuple[Subspace, ...]

    def __post_init__(self):
        levels = tuple(self.levels)
        if len(levels) < 1:
            raise DomainError("a nested scale needs at least one level")
        if not all(isinstance(s, Subspace) for s in levels):
            raise DomainError("levels must be Subspace instances")
        n = levels[0].n
        if any(s.n != n for s in levels):
            raise DomainError("all levels must share the same grid size")
        dims = [s.d for s in levels]
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise DomainError(f"dimensions must strictly increase, got {dims}")
        for j in range(len(levels) - 1):
            finer = levels[j + 1]
            for row in levels[j].basis:
                resid = row - finer.project(row)
                if float(np.max(np.abs(resid))) > _NESTING_TOL:
                    raise DomainError(
                        f"level {j + 1} is not contained in level {j + 2}: "
                        "a basis row fails to reconstruct"
                    )
        object.__setattr__(self, "levels", levels)

    @property
    def n(self) -> int:
        return self.levels[0].n

    @property
    def m(self) -> int:
        """Number of levels."""
        return len(self.levels)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.d for s in self.levels)

    @property
    def omegas(self) -> tuple[float, ...]:
        return tuple(s.omega for s in self.levels)


def dyadic_scale(n: int, dims: Sequence[int]) -> NestedScale:
    """Nested scale of dyadic block subspaces with the given dimensions."""
    return NestedScale(tuple(dyadic_blocks(n, d) for d in dims))


def min_two_norm_given_inf(space: Subspace, eps_inf: float) -> float:
    """Smallest normalized two-norm of a subspace member with sup norm ``eps_inf``.

    Equals ``eps_inf / (sqrt(n) * omega)``; the minimizer is the member whose
    coordinate profile peaks at the maximum-leverage grid point.
    """
    eps_inf = float(eps_inf)
    if not (math.isfinite(eps_inf) and eps_inf >= 0.0):
        raise DomainError(f"eps_inf must be nonnegative and finite, got {eps_inf!r}")
    return eps_inf / (math.sqrt(space.n) * space.omega)


def max_inf_norm_given_two(space: Subspace, eps2: float) -> float:
    """Largest sup norm of a subspace member with normalized two-norm ``eps2``.

    Equals ``eps2 * sqrt(n) * omega`` — the companion extremal identity to
    :func:`min_two_norm_given_inf`.
    """
    eps2 = float(eps2)
    if not (math.isfinite(eps2) and eps2 >= 0.0):
        raise DomainError(f"eps2 must be nonnegative and finite, got {eps2!r}")
    return eps2 * math.sqrt(space.n) * space.omega
