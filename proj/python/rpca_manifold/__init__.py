"""Robust PCA by gradient descent on the fixed-rank matrix manifold."""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
