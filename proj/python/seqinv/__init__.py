"""Spectral cut-off estimation with a noisy operator."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
