"""Overlapping subdomain decompositions of [-1, 1]^d with cosine windows.

Subdomain ``k`` of a 1D decomposition into ``K`` pieces with overlap
``delta`` is ``(a_k, b_k)`` with

    a_k = (2k - delta) / K - 1,    b_k = (2(k + 1) + delta) / K - 1,

and its window rises on ``(a_k, a_k + r]`` and falls on ``[b_k - r, b_k)``
with half-cosine ramps of width ``r = 2 delta / K``. The first subdomain
has no rising ramp and the last no falling ramp, so the windows sum to one
on the whole of [-1, 1]. At a ramp/plateau breakpoint the ramp formula is
used; at the support ends the window and all its derivatives are zero.

2D decompositions are tensor products of two 1D decompositions; flat
subdomain index ``k = i * ky + j`` for the ``i``-th x-interval and
``j``-th y-interval.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Protocol, runtime_checkable

import numpy as np
from numpy.typing import NDArray

from fbpinn_gn.autodiff.jet import Jet2, cos, jet_const, mul, scale


class DecompositionError(ValueError):
    """Raised when a decomposition is configured or queried inconsistently.

    This includes:
    - Non-positive subdomain counts
    - Overlap outside ``0 < delta < 1``
    - Subdomain indices out of range
    - Points whose dimension does not match the decomposition
    """

    pass


@runtime_checkable
class Decomposition(Protocol):
    """Interface shared by 1D and 2D decompositions.

    The FBPINN model only talks to decompositions through this protocol,
    with coordinates always passed as one jet per axis.
    """

    @property
    def dim(self) -> int: ...

    @property
    def n_subdomains(self) -> int: ...

    def window_at(self, k: int, coords: Sequence[Jet2]) -> Jet2: ...

    def normalize_at(self, k: int, coords: Sequence[Jet2]) -> list[Jet2]: ...

    def cover_mask(self, points: NDArray[np.float64]) -> NDArray[np.bool_]: ...

    def covering_subdomains(self, point: Sequence[float] | float) -> list[int]: ...

    def adjacency(self) -> set[tuple[int, int]]: ...

    def bounds_table(self) -> list[dict[str, Any]]: ...


def _where(mask: NDArray[np.bool_], a: Jet2, b: Jet2) -> Jet2:
    return Jet2(
        np.where(mask, a.val, b.val),
        np.where(mask, a.d1, b.d1),
        np.where(mask, a.d2, b.d2),
    )


def _as_points(points: NDArray[np.float64] | Sequence[float], dim: int) -> NDArray[np.float64]:
    pts = np.asarray(points, dtype=np.float64)
    if dim == 1 and pts.ndim == 1:
        pts = pts[:, None]
    pts = np.atleast_2d(pts)
    if pts.shape[1] != dim:
        raise DecompositionError(f"Expected points with {dim} coordinates, got shape {pts.shape}")
    return pts


@dataclass(frozen=True)
class Decomposition1D:
    """
    K overlapping subintervals of [-1, 1].

    Attributes:
        n_subdomains: Number of subdomains K
        delta: Overlap parameter, ``0 < delta < 1``
    """

    n_subdomains: int
    delta: float

    def __post_init__(self) -> None:
        """Validate decomposition parameters."""
        if self.n_subdomains < 1:
            raise DecompositionError(f"Subdomain count must be positive, got {self.n_subdomains}")
        if not 0.0 < self.delta < 1.0:
            raise DecompositionError(f"Overlap delta must satisfy 0 < delta < 1, got {self.delta}")

    @property
    def dim(self) -> int:
        return 1

    @property
    def ramp(self) -> float:
        """Ramp width ``r = 2 delta / K``."""
        return 2.0 * self.delta / self.n_subdomains

    def _check(self, k: int) -> None:
        if not 0 <= k < self.n_subdomains:
            raise DecompositionError(f"Subdomain index {k} out of range for K={self.n_subdomains}")

    def lower(self, k: int) -> float:
        """Left end ``a_k``."""
        return (2.0 * k - self.delta) / self.n_subdomains - 1.0

    def upper(self, k: int) -> float:
        """Right end ``b_k``."""
        return (2.0 * (k + 1) + self.delta) / self.n_subdomains - 1.0

    def bounds(self) -> NDArray[np.float64]:
        """Array of shape ``(K, 2)`` holding ``(a_k, b_k)``."""
        return np.array([(self.lower(k), self.upper(k)) for k in range(self.n_subdomains)])

    def bounds_table(self) -> list[dict[str, Any]]:
        """Rows ``{k, a_k, b_k}`` for documentation and plotting."""
        return [
            {"k": k, "a_k": self.lower(k), "b_k": self.upper(k)} for k in range(self.n_subdomains)
        ]

    def support(self, k: int) -> tuple[float, float]:
        """Open support of the clamped window (outer ends extend to infinity)."""
        self._check(k)
        lo = -np.inf if k == 0 else self.lower(k)
        hi = np.inf if k == self.n_subdomains - 1 else self.upper(k)
        return lo, hi

    def window(self, k: int, x: Jet2) -> Jet2:
        """
        Window ``ω_k`` evaluated on a jet.

        Args:
            k: Subdomain index
            x: Coordinate jet (scalar or array fields)

        Returns:
            Jet of ``ω_k(x)`` carrying the chain-ruled derivatives of ``x``
        """
        self._check(k)
        a, b, r = self.lower(k), self.upper(k), self.ramp
        xv = np.asarray(x.val, dtype=np.float64)
        lo, hi = self.support(k)

        rising_ramp = scale(1.0 - cos(scale(x - a, np.pi / r)), 0.5)
        falling_ramp = scale(1.0 - cos(scale(x - b, np.pi / r)), 0.5)

        inside = (xv > lo) & (xv < hi)
        rising = (xv > a) & (xv <= a + r) if k > 0 else np.zeros_like(inside)
        falling = (xv >= b - r) & (xv < b) if k < self.n_subdomains - 1 else np.zeros_like(inside)
        plateau = inside & ~rising & ~falling

        zero = jet_const(np.zeros_like(xv))
        one = jet_const(np.ones_like(xv))
        out = _where(plateau, one, zero)
        out = _where(falling, falling_ramp, out)
        out = _where(rising, rising_ramp, out)
        return _match_scalar(out, x)

    def window_values(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Plain window values, shape ``(N, K)``."""
        xs = jet_const(np.asarray(x, dtype=np.float64).reshape(-1))
        return np.stack([self.window(k, xs).val for k in range(self.n_subdomains)], axis=1)

    def normalize(self, k: int, x: Jet2) -> Jet2:
        """Affine map ``n_k(x) = 2 (x - a_k) / (b_k - a_k) - 1`` onto [-1, 1]."""
        self._check(k)
        a, b = self.lower(k), self.upper(k)
        factor = 2.0 / (b - a)
        return Jet2(factor * (x.val - a) - 1.0, factor * x.d1, factor * x.d2)

    def denormalize(self, k: int, s: NDArray[np.float64] | float) -> NDArray[np.float64] | float:
        """Inverse of ``normalize`` on plain values."""
        self._check(k)
        a, b = self.lower(k), self.upper(k)
        return a + (np.asarray(s) + 1.0) * (b - a) / 2.0

    def window_at(self, k: int, coords: Sequence[Jet2]) -> Jet2:
        return self.window(k, coords[0])

    def normalize_at(self, k: int, coords: Sequence[Jet2]) -> list[Jet2]:
        return [self.normalize(k, coords[0])]

    def cover_mask(self, points: NDArray[np.float64]) -> NDArray[np.bool_]:
        """Boolean ``(N, K)`` mask of ``ω_k(x) > 0``."""
        pts = _as_points(points, 1)
        return self.window_values(pts[:, 0]) > 0.0

    def covering_subdomains(self, point: Sequence[float] | float) -> list[int]:
        """All ``k`` with ``ω_k(x) > 0``."""
        mask = self.cover_mask(np.atleast_1d(np.asarray(point, dtype=np.float64)))
        return [int(k) for k in np.flatnonzero(mask[0])]

    def adjacency(self) -> set[tuple[int, int]]:
        """Pairs ``(k, l)``, ``k <= l``, whose open supports intersect."""
        pairs = set()
        for k in range(self.n_subdomains):
            lo_k, hi_k = self.support(k)
            for l in range(k, self.n_subdomains):
                lo_l, hi_l = self.support(l)
                if max(lo_k, lo_l) < min(hi_k, hi_l):
                    pairs.add((k, l))
        return pairs


@dataclass(frozen=True)
class Decomposition2D:
    """
    Tensor-product decomposition of [-1, 1]^2.

    Attributes:
        x_axis: Decomposition along x (``kx`` subdomains)
        y_axis: Decomposition along y (``ky`` subdomains)
    """

    x_axis: Decomposition1D
    y_axis: Decomposition1D

    @classmethod
    def from_counts(cls, kx: int, ky: int, deltax: float, deltay: float) -> "Decomposition2D":
        """Build from per-axis counts and overlaps."""
        return cls(Decomposition1D(kx, deltax), Decomposition1D(ky, deltay))

    @property
    def dim(self) -> int:
        return 2

    @property
    def n_subdomains(self) -> int:
        return self.x_axis.n_subdomains * self.y_axis.n_subdomains

    def index(self, i: int, j: int) -> int:
        """Flat index of the (i, j) subdomain."""
        return i * self.y_axis.n_subdomains + j

    def unravel(self, k: int) -> tuple[int, int]:
        """Per-axis indices of flat subdomain ``k``."""
        if not 0 <= k < self.n_subdomains:
            raise DecompositionError(f"Subdomain index {k} out of range for K={self.n_subdomains}")
        return divmod(k, self.y_axis.n_subdomains)

    def window(self, k: int, x: Jet2, y: Jet2) -> Jet2:
        """``ω_(i,j)(x, y) = ω_i(x) ω_j(y)``."""
        i, j = self.unravel(k)
        return mul(self.x_axis.window(i, x), self.y_axis.window(j, y))

    def normalize(self, k: int, x: Jet2, y: Jet2) -> tuple[Jet2, Jet2]:
        i, j = self.unravel(k)
        return self.x_axis.normalize(i, x), self.y_axis.normalize(j, y)

    def window_at(self, k: int, coords: Sequence[Jet2]) -> Jet2:
        return self.window(k, coords[0], coords[1])

    def normalize_at(self, k: int, coords: Sequence[Jet2]) -> list[Jet2]:
        return list(self.normalize(k, coords[0], coords[1]))

    def window_values(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Plain tensor window values, shape ``(N, kx * ky)``."""
        pts = _as_points(points, 2)
        wx = self.x_axis.window_values(pts[:, 0])
        wy = self.y_axis.window_values(pts[:, 1])
        return (wx[:, :, None] * wy[:, None, :]).reshape(len(pts), -1)

    def cover_mask(self, points: NDArray[np.float64]) -> NDArray[np.bool_]:
        return self.window_values(points) > 0.0

    def covering_subdomains(self, point: Sequence[float] | float) -> list[int]:
        mask = self.cover_mask(np.asarray(point, dtype=np.float64).reshape(1, 2))
        return [int(k) for k in np.flatnonzero(mask[0])]

    def adjacency(self) -> set[tuple[int, int]]:
        """Pairs whose supports intersect along both axes."""
        x_adj = _symmetric(self.x_axis.adjacency())
        y_adj = _symmetric(self.y_axis.adjacency())
        pairs = set()
        for k in range(self.n_subdomains):
            ik, jk = self.unravel(k)
            for l in range(k, self.n_subdomains):
                il, jl = self.unravel(l)
                if (ik, il) in x_adj and (jk, jl) in y_adj:
                    pairs.add((k, l))
        return pairs

    def bounds_table(self) -> list[dict[str, Any]]:
        rows = []
        for k in range(self.n_subdomains):
            i, j = self.unravel(k)
            rows.append(
                {
                    "k": k,
                    "i": i,
                    "j": j,
                    "a_x": self.x_axis.lower(i),
                    "b_x": self.x_axis.upper(i),
                    "a_y": self.y_axis.lower(j),
                    "b_y": self.y_axis.upper(j),
                }
            )
        return rows


def _symmetric(pairs: set[tuple[int, int]]) -> set[tuple[int, int]]:
    return pairs | {(l, k) for k, l in pairs}


def _match_scalar(out: Jet2, x: Jet2) -> Jet2:
    if np.ndim(x.val) == 0:
        return Jet2(float(out.val), float(out.d1), float(out.d2))
    return out
