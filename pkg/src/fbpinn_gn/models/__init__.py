"""Networks and PINN models."""

from fbpinn_gn.models.fbpinn import (
    FbpinnModel,
    VanillaPinnModel,
    field_eval,
    loss,
    loss_gradient,
    residual_row,
    residual_rows,
)
from fbpinn_gn.models.mlp import MLP, InitKind, InitScheme, NetworkShapeError, param_count
from fbpinn_gn.models.protocols import PinnModel
from fbpinn_gn.models.residuals import JacobianBlock, ParameterLayout, ResidualJacobian, ResidualRow

__all__ = [
    "FbpinnModel",
    "InitKind",
    "InitScheme",
    "JacobianBlock",
    "MLP",
    "NetworkShapeError",
    "ParameterLayout",
    "PinnModel",
    "ResidualJacobian",
    "ResidualRow",
    "VanillaPinnModel",
    "field_eval",
    "loss",
    "loss_gradient",
    "param_count",
    "residual_row",
    "residual_rows",
]
