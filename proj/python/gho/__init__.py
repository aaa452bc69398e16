"""Generalized harmonic oscillator: exact kernels, modes, states and numerical oracles."""

from ._gho import *  # noqa: F401,F403
from ._gho import __doc__  # noqa: F401
