"""Quantum emitters coupled to a two-dimensional photonic superlattice bath.

Submodules
----------
lattice        Bloch Hamiltonian, dispersion, mixing angles, density of states.
special        Carlson elliptic integrals, E1, Lambert W.
selfenergy     Closed-form, continued and k-sum self-energies.
spectral       Bound states and unstable poles.
dynamics       Contour decomposition of C_e(t); two-emitter exchange.
wavefunction   Bound-state profiles and their axis asymptotics.
spinmodel      Five-emitter effective model and entangling protocol.
oracle         Brute-force real-space model of the finite lattice.
cli            Command-line front end.
"""

from .errors import ConfigError, ConvergenceError, SingularityError
from .kernels import BACKEND
from .lattice import BathParams
from .selfenergy import EmitterConfig

__version__ = "0.1.0"

__all__ = ["BathParams", "EmitterConfig", "SingularityError", "ConvergenceError", "ConfigError",
           "BACKEND", "__version__"]
