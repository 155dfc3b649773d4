"""Second-order forward-mode jets.

A ``Jet2`` carries a value together with its first and second derivative
along one fixed spatial direction. Fields may be Python floats or numpy
arrays; all rules are elementwise, so a jet of arrays evaluates a whole
batch of collocation points at once. A parameter tangent is represented
as a ``Jet2`` whose fields carry one extra trailing axis (one column per
parameter), and broadcasting supplies the product rule against ordinary
jets via ``Jet2.expand``.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import NDArray

Real = Union[float, NDArray[np.float64]]


@dataclass(frozen=True)
class Jet2:
    """
    Truncated second-order Taylor value.

    Attributes:
        val: Function value
        d1: First directional derivative
        d2: Second directional derivative
    """

    val: Real
    d1: Real
    d2: Real

    def __add__(self, other: "Jet2 | float") -> "Jet2":
        return add(self, other)

    def __radd__(self, other: float) -> "Jet2":
        return add(self, other)

    def __sub__(self, other: "Jet2 | float") -> "Jet2":
        return sub(self, other)

    def __rsub__(self, other: float) -> "Jet2":
        return add(scale(self, -1.0), other)

    def __neg__(self) -> "Jet2":
        return scale(self, -1.0)

    def __mul__(self, other: "Jet2 | float") -> "Jet2":
        if isinstance(other, Jet2):
            return mul(self, other)
        return scale(self, other)

    def __rmul__(self, other: float) -> "Jet2":
        return scale(self, other)

    def expand(self) -> "Jet2":
        """Add a trailing axis so this jet broadcasts against tangent jets."""
        return Jet2(
            np.asarray(self.val)[..., None],
            np.asarray(self.d1)[..., None],
            np.asarray(self.d2)[..., None],
        )

    def take(self, index: int | NDArray[np.intp] | slice) -> "Jet2":
        """Index every field along the leading axis."""
        return Jet2(
            np.asarray(self.val)[index],
            np.asarray(self.d1)[index],
            np.asarray(self.d2)[index],
        )

    def column(self, j: int) -> "Jet2":
        """Select one tangent column (trailing axis) from a tangent jet."""
        return Jet2(
            np.asarray(self.val)[..., j],
            np.asarray(self.d1)[..., j],
            np.asarray(self.d2)[..., j],
        )

    def as_tuple(self) -> tuple[Real, Real, Real]:
        """Return ``(val, d1, d2)``."""
        return (self.val, self.d1, self.d2)


def jet_var(x: Real) -> Jet2:
    """Seed a coordinate along its own direction: ``(x, 1, 0)``."""
    x = _as_real(x)
    return Jet2(x, _ones_like(x), _zeros_like(x))


def jet_const(c: Real) -> Jet2:
    """Lift a constant: ``(c, 0, 0)``."""
    c = _as_real(c)
    return Jet2(c, _zeros_like(c), _zeros_like(c))


def zeros_like(u: Jet2) -> Jet2:
    """Zero jet with the shape of ``u``."""
    z = _zeros_like(_as_real(u.val))
    return Jet2(z, z, z)


def add(u: Jet2, v: "Jet2 | float") -> Jet2:
    if isinstance(v, Jet2):
        return Jet2(u.val + v.val, u.d1 + v.d1, u.d2 + v.d2)
    return Jet2(u.val + v, u.d1, u.d2)


def sub(u: Jet2, v: "Jet2 | float") -> Jet2:
    if isinstance(v, Jet2):
        return Jet2(u.val - v.val, u.d1 - v.d1, u.d2 - v.d2)
    return Jet2(u.val - v, u.d1, u.d2)


def mul(u: Jet2, v: Jet2) -> Jet2:
    """Product rule: ``(uv, uv' + u'v, uv'' + 2u'v' + u''v)``."""
    return Jet2(
        u.val * v.val,
        u.val * v.d1 + u.d1 * v.val,
        u.val * v.d2 + 2.0 * u.d1 * v.d1 + u.d2 * v.val,
    )


def scale(u: Jet2, c: Real) -> Jet2:
    return Jet2(c * u.val, c * u.d1, c * u.d2)


def _chain(u: Jet2, f0: Real, f1: Real, f2: Real) -> Jet2:
    # f(u) with f0 = f(u.val), f1 = f'(u.val), f2 = f''(u.val)
    return Jet2(f0, f1 * u.d1, f1 * u.d2 + f2 * u.d1 * u.d1)


def tanh(u: Jet2) -> Jet2:
    """``t = tanh(u)``, ``s = 1 - t^2``: ``(t, s u', s u'' - 2 t s u'^2)``."""
    t = np.tanh(u.val)
    s = 1.0 - t * t
    return _chain(u, t, s, -2.0 * t * s)


def sin(u: Jet2) -> Jet2:
    sv, cv = np.sin(u.val), np.cos(u.val)
    return _chain(u, sv, cv, -sv)


def cos(u: Jet2) -> Jet2:
    sv, cv = np.sin(u.val), np.cos(u.val)
    return _chain(u, cv, -sv, -cv)


def powi(u: Jet2, n: int) -> Jet2:
    """Integer power ``u**n`` for ``n >= 0``."""
    if n < 0:
        raise ValueError(f"powi expects a non-negative exponent, got {n}")
    if n == 0:
        return jet_const(_ones_like(_as_real(u.val)))
    f0 = u.val**n
    f1 = n * u.val ** (n - 1)
    f2 = n * (n - 1) * u.val ** (n - 2) if n >= 2 else _zeros_like(_as_real(u.val))
    return _chain(u, f0, f1, f2)


def tanh_jvp(u: Jet2, du: Jet2) -> Jet2:
    """
    Parameter tangent of ``tanh(u)`` given the tangent ``du`` of ``u``.

    ``u`` holds the spatial jet and ``du`` its derivative with respect to
    one or more parameters (trailing axis). The result is the derivative
    of ``tanh(u)`` (all three channels) in the same parameters.

    Args:
        u: Spatial jet, fields broadcastable against ``du``
        du: Tangent jet

    Returns:
        Tangent jet of ``tanh(u)``
    """
    t = np.tanh(u.val)
    s = 1.0 - t * t
    dt = s * du.val
    ds = -2.0 * t * dt
    d1 = ds * u.d1 + s * du.d1
    d2 = (
        ds * u.d2
        + s * du.d2
        - 2.0 * (dt * s + t * ds) * u.d1 * u.d1
        - 4.0 * t * s * u.d1 * du.d1
    )
    return Jet2(dt, d1, d2)


def _as_real(x: Real) -> Real:
    if isinstance(x, np.ndarray):
        return x.astype(np.float64, copy=False)
    return float(x)


def _zeros_like(x: Real) -> Real:
    if isinstance(x, np.ndarray):
        return np.zeros_like(x, dtype=np.float64)
    return 0.0


def _ones_like(x: Real) -> Real:
    if isinstance(x, np.ndarray):
        return np.ones_like(x, dtype=np.float64)
    return 1.0
