"""Finite-basis PINNs trained with Adam or block-sparse Gauss-Newton."""

__version__ = "0.1.0"
