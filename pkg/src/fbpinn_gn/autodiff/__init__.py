"""Forward-mode differentiation carriers."""

from fbpinn_gn.autodiff.jet import (
    Jet2,
    add,
    cos,
    jet_const,
    jet_var,
    mul,
    powi,
    scale,
    sin,
    sub,
    tanh,
    tanh_jvp,
    zeros_like,
)

__all__ = [
    "Jet2",
    "add",
    "cos",
    "jet_const",
    "jet_var",
    "mul",
    "powi",
    "scale",
    "sin",
    "sub",
    "tanh",
    "tanh_jvp",
    "zeros_like",
]
