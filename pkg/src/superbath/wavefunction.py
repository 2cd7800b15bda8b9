"""Bound-state photonic wavefunctions of an A-coupled emitter.

For a bound state at energy E in a gap the bath amplitudes are fixed by the
emitter amplitude C_e through the lattice Green function::

    C_A(k) = g C_e e^{-ik.n_e} (E + delta) / (N (E^2 - w^2))
    C_B(k) = g C_e e^{-ik.n_e} f(k) / (N (E^2 - w^2))

with the unitary transform C(n) = (1/N) sum_k e^{ik.n} C(k), and C_e follows
from unit norm.  B-coupled emitters are the mirror image under
(A, E) -> (B, -E) and are not implemented separately.
"""

from dataclasses import dataclass

import numpy as np

from .lattice import BathParams, dispersion, hopping_f, k_grid
from .selfenergy import EmitterConfig
from .special import gamma0

__all__ = [
    "WavefunctionGrid",
    "bs_momentum_amplitudes",
    "bs_real_space",
    "axis_asymptotics",
    "axis_cut",
]


@dataclass
class WavefunctionGrid:
    """Normalised bound state on the N x N lattice.

    ``C_A[n1, n2]`` and ``C_B[n1, n2]`` are indexed by primitive coordinates
    modulo N; the emitter sits at ``site``.
    """

    C_A: np.ndarray
    C_B: np.ndarray
    C_e: complex
    E_BS: float
    site: tuple = (0, 0)

    @property
    def norm(self) -> float:
        return float(abs(self.C_e) ** 2 + np.sum(np.abs(self.C_A) ** 2)
                     + np.sum(np.abs(self.C_B) ** 2))

    def relative(self, sub, n1, n2):
        """Amplitude on sublattice ``sub`` at offset (n1, n2) from the emitter."""
        grid = self.C_A if sub.upper() == "A" else self.C_B
        N = grid.shape[0]
        return grid[(self.site[0] + n1) % N, (self.site[1] + n2) % N]


def _check(E, e, p):
    if e.sublattice.upper() != "A":
        raise ValueError("wavefunctions are implemented for A-coupled emitters")
    w = p.outer_edge
    if not (E < -w or -p.delta < E < p.delta or E > w):
        raise ValueError(f"E_BS = {E} lies inside a band")


def _kernels(E, p):
    """Green-function numerators/denominator on the momentum grid (emitter at origin)."""
    k = k_grid(p.N)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    w = dispersion(k1, k2, p)
    den = E * E - w * w
    return (E + p.delta) / den, hopping_f(k1, k2, p.J) / den, k1, k2


def bs_momentum_amplitudes(E_BS, e: EmitterConfig, p: BathParams):
    """Normalised (C_A(k), C_B(k), C_e) on the grid ``k_grid(N) x k_grid(N)``."""
    _check(E_BS, e, p)
    ka, kb, k1, k2 = _kernels(E_BS, p)
    phase = np.exp(-1j * (k1 * e.site[0] + k2 * e.site[1]))
    N = p.N
    ca = e.g * phase * ka / N
    cb = e.g * phase * kb / N
    ce = 1.0 / np.sqrt(1.0 + np.sum(np.abs(ca) ** 2) + np.sum(np.abs(cb) ** 2))
    return ca * ce, cb * ce, complex(ce)


def _to_real_space(ck, N):
    # (1/N) sum_k e^{ik.n} C(k) with k_j = 2 pi j / N - pi
    n = np.arange(N)
    sign = np.where((n[:, None] + n[None, :]) % 2 == 0, 1.0, -1.0)
    return sign * np.fft.ifft2(ck) * N


def bs_real_space(E_BS, e: EmitterConfig, p: BathParams) -> WavefunctionGrid:
    """Real-space bound state on the periodic N x N lattice."""
    ca, cb, ce = bs_momentum_amplitudes(E_BS, e, p)
    N = p.N
    return WavefunctionGrid(_to_real_space(ca, N), _to_real_space(cb, N), ce, float(E_BS),
                            e.site)


def axis_asymptotics(n, delta, q_c=np.pi, J=1.0):
    """Long-distance on-axis profile C_A(n, 0) ~ (-1)^n Gamma(0, sqrt2 n delta / q_c) / (pi sqrt2).

    Valid for E_BS = 0 and delta << J; lengths in lattice units, ``delta`` in
    units of J.
    """
    n = np.asarray(n)
    if np.any(n < 1) or np.any(n != np.floor(n)):
        raise ValueError("n must be a positive integer")
    if not 0 < q_c <= np.pi:
        raise ValueError("q_c must lie in (0, pi]")
    x = np.sqrt(2.0) * n * (delta / J) / q_c
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    out = sign * gamma0(x) / (np.pi * np.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def axis_cut(E_BS, p: BathParams, n_max):
    """Unnormalised on-axis kernel (1/N^2) sum_k e^{ik1 n} (E + delta) / (w^2 - E^2), n = 0..n_max.

    This is the quantity the asymptotic formula approximates, i.e. C_A(n, 0)
    with the prefactor g C_e stripped off and J = 1 units.
    """
    ka, _, _, _ = _kernels(E_BS, p)
    N = p.N
    grid = -_to_real_space(ka, N) / N
    return grid[np.arange(n_max + 1) % N, 0].real * p.J
