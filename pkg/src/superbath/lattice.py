"""Bloch-space description of the two-sublattice square superlattice bath.

Energies are measured from the bare site frequency (omega_a = 0).  Momenta
are given in the primitive reciprocal coordinates (k1, k2), each in
[-pi, pi).  All functions broadcast over numpy arrays of k1, k2.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "BathParams",
    "MomentumPoint",
    "MixingAngles",
    "Histogram",
    "k_grid",
    "hopping_f",
    "bloch_matrix",
    "dispersion",
    "mixing",
    "bloch_unitary",
    "coupling_weights",
    "density_of_states",
    "sublattice_sign",
]


@dataclass(frozen=True)
class BathParams:
    """Superlattice bath parameters.

    J is the hopping rate, ``delta`` the sublattice offset (A at +delta, B at
    -delta) and N the number of unit cells per primitive direction.
    """

    J: float = 1.0
    delta: float = 1.0
    N: int = 64

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError(f"J must be positive, got {self.J}")
        if not self.delta >= 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N}")

    @property
    def outer_edge(self) -> float:
        """Outer band edge sqrt(16 J^2 + delta^2)."""
        return float(np.sqrt(16.0 * self.J**2 + self.delta**2))

    @property
    def band_edges(self) -> tuple:
        """The four branch points, ordered: (-outer, -delta, +delta, +outer)."""
        w = self.outer_edge
        return (-w, -self.delta, self.delta, w)

    @property
    def upper_band(self) -> tuple:
        return (self.delta, self.outer_edge)

    @property
    def lower_band(self) -> tuple:
        return (-self.outer_edge, -self.delta)


class MomentumPoint(NamedTuple):
    k1: float
    k2: float


class MixingAngles(NamedTuple):
    cos_theta: np.ndarray
    sin_theta: np.ndarray
    phi: np.ndarray


class Histogram(NamedTuple):
    edges: np.ndarray
    centers: np.ndarray
    mass: np.ndarray


def sublattice_sign(sublattice) -> int:
    """+1 for the A sublattice, -1 for B."""
    s = str(sublattice).upper()
    if s == "A":
        return 1
    if s == "B":
        return -1
    raise ValueError(f"sublattice must be 'A' or 'B', got {sublattice!r}")


def k_grid(n):
    """Uniform periodic grid k = 2 pi j / n - pi, j = 0..n-1."""
    return 2.0 * np.pi * np.arange(n) / n - np.pi


def hopping_f(k1, k2, J=1.0):
    """Off-diagonal Bloch element f(k) = J (1 + e^{ik1} + e^{ik2} + e^{i(k1+k2)})."""
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    return J * (1.0 + np.exp(1j * k1)) * (1.0 + np.exp(1j * k2))


def bloch_matrix(k1, k2, p: BathParams):
    """2x2 Bloch Hamiltonian in the (A, B) basis; shape (..., 2, 2)."""
    f = hopping_f(k1, k2, p.J)
    h = np.zeros(np.shape(f) + (2, 2), dtype=complex)
    h[..., 0, 0] = p.delta
    h[..., 1, 1] = -p.delta
    h[..., 0, 1] = f
    h[..., 1, 0] = np.conj(f)
    return h


def dispersion(k1, k2, p: BathParams):
    """Upper-band energy omega(k) = sqrt(delta^2 + 16 J^2 cos^2(k1/2) cos^2(k2/2))."""
    c = np.cos(0.5 * np.asarray(k1, dtype=float)) * np.cos(0.5 * np.asarray(k2, dtype=float))
    return np.sqrt(p.delta**2 + 16.0 * p.J**2 * c * c)


def mixing(k1, k2, p: BathParams) -> MixingAngles:
    """Mixing angles of the Bloch diagonalisation.

    cos(theta) = sqrt((omega + delta) / (2 omega)) >= 0 and
    sin(theta) = -sqrt((omega - delta) / (2 omega)) <= 0, which makes the
    first column of :func:`bloch_unitary` the upper-band eigenvector.  Where
    f(k) vanishes (to roundoff) the phase is set to 0 and (cos, sin) = (1, 0).
    """
    f = hopping_f(k1, k2, p.J)
    af = np.abs(f)
    w = np.sqrt(p.delta**2 + af * af)
    # 1 + e^{i pi} is only zero up to roundoff
    zero = af <= 1e-14 * p.J
    with np.errstate(divide="ignore", invalid="ignore"):
        c2 = np.where(zero, 1.0, (w + p.delta) / (2.0 * w))
        s2 = np.where(zero, 0.0, (w - p.delta) / (2.0 * w))
    phi = np.where(zero, 0.0, np.angle(f))
    return MixingAngles(np.sqrt(c2), -np.sqrt(np.clip(s2, 0.0, None)), phi)


def bloch_unitary(k1, k2, p: BathParams):
    """U_k whose columns are the upper/lower band eigenvectors; shape (..., 2, 2)."""
    c, s, phi = mixing(k1, k2, p)
    e = np.exp(1j * phi)
    u = np.empty(np.shape(c) + (2, 2), dtype=complex)
    u[..., 0, 0] = e * c
    u[..., 0, 1] = e * s
    u[..., 1, 0] = -s
    u[..., 1, 1] = c
    return u


def coupling_weights(k1, k2, sublattice, p: BathParams):
    """Emitter-band weights (|g_u|^2, |g_l|^2); they always sum to 1."""
    c, s, _ = mixing(k1, k2, p)
    if sublattice_sign(sublattice) > 0:
        return c * c, s * s
    return s * s, c * c


def density_of_states(p: BathParams, grid_n=256, bins=200) -> Histogram:
    """Flat histogram of +-omega(k) on a grid_n x grid_n momentum grid.

    Each band carries unit mass, so ``mass.sum() == 2``.
    """
    if grid_n < 64 or bins < 32:
        raise ValueError("density_of_states needs grid_n >= 64 and bins >= 32")
    k = k_grid(grid_n)
    w = dispersion(k[:, None], k[None, :], p).ravel()
    energies = np.concatenate([w, -w])
    edge = p.outer_edge
    edges = np.linspace(-edge, edge, bins + 1)
    counts, _ = np.histogram(energies, bins=edges)
    return Histogram(edges, 0.5 * (edges[1:] + edges[:-1]), counts / float(grid_n * grid_n))
