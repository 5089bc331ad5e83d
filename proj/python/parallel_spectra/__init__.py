"""Hamiltonian triples {H, Hn, Hn^dag} on tight-binding lattices.

Builders for uniform, SSH and custom-graph models, dense spectral analysis
with cross-system matching, eigenstate superposition verification, closed-form
zero modes and parallel time evolution with a probability audit.
"""

from parallel_spectra._core import *  # noqa: F401,F403
from parallel_spectra._core import __version__  # noqa: F401
