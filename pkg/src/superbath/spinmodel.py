"""Effective spin model for a star of five emitters and the entangling protocol.

An auxiliary emitter at the centre is surrounded by four arm emitters at
(+-n, 0) and (0, +-n).  In the bound-state dominated regime the bath only
mediates coherent exchange:

* J_a between the centre and each arm (separation (n, 0)),
* J_1 between adjacent arms (separation (n, -n), equivalent to (n, n)),
* J_2 between opposite arms (separation (2n, 0)).

Basis order throughout: (aux, 1, 2, 3, 4) with arms 1, 2, 3, 4 going round
the star, so 1-3 and 2-4 are opposite pairs.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .dynamics import exchange_coupling
from .errors import ConvergenceError
from .lattice import BathParams
from .selfenergy import EmitterConfig

__all__ = [
    "ProtocolConfig",
    "EffectiveCouplings",
    "raman_renormalize",
    "effective_couplings",
    "effective_hamiltonian",
    "symmetric_rotation",
    "protocol_fidelity_closed",
    "protocol_fidelity_sim",
    "initial_state",
    "goal_state",
]


@dataclass(frozen=True)
class ProtocolConfig:
    """Star-protocol parameters; Raman fields are optional (identity if absent)."""

    n: int
    Delta: float = 0.0
    g: float = 0.1
    bath: BathParams = BathParams()
    Gamma_star: float = 0.0
    Omega: Optional[float] = None
    Delta_L: Optional[float] = None
    omega_L: float = 0.0
    detuning_correction: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"arm length n must be a positive integer, got {self.n}")
        if self.Gamma_star < 0:
            raise ValueError("Gamma_star must be non-negative")
        if (self.Omega is None) != (self.Delta_L is None):
            raise ValueError("Omega and Delta_L must be given together")
        if self.Delta_L is not None:
            if self.Delta_L == 0:
                raise ValueError("Delta_L must be non-zero")
            if abs(self.Delta_L) < 10.0 * abs(self.Omega):
                warnings.warn("Raman elimination needs |Delta_L| >> Omega", stacklevel=2)


@dataclass(frozen=True)
class EffectiveCouplings:
    J_a: float
    J_1: float
    J_2: float


def raman_renormalize(cfg: ProtocolConfig):
    """(g_eff, Delta_eff) = (g Omega / Delta_L, Delta - omega_L).

    All bath-induced rates then scale with (Omega / Delta_L)^2, so the ratio
    of coherent to incoherent processes is unchanged.
    """
    if cfg.Delta_L is None:
        return cfg.g, cfg.Delta - cfg.omega_L
    if cfg.Delta_L == 0:
        raise ValueError("Delta_L must be non-zero")
    return cfg.g * cfg.Omega / cfg.Delta_L, cfg.Delta - cfg.omega_L


def effective_couplings(cfg: ProtocolConfig, grid_n=512) -> EffectiveCouplings:
    """Exchange couplings of the star from the two-emitter pole equations."""
    g, D = raman_renormalize(cfg)
    p = cfg.bath
    if not -p.delta < D < p.delta:
        raise ValueError("the effective detuning must lie inside the middle gap")
    n = int(cfg.n)
    centre = EmitterConfig("A", (0, 0), D, g)

    def j(site):
        return exchange_coupling(centre, EmitterConfig("A", site, D, g), p, grid_n).J_ex

    return EffectiveCouplings(j((n, 0)), j((n, -n)), j((2 * n, 0)))


def effective_hamiltonian(c: EffectiveCouplings, Delta, Delta_a=None):
    """5 x 5 Hermitian H_eff in the basis (aux, 1, 2, 3, 4)."""
    Delta_a = Delta if Delta_a is None else Delta_a
    h = np.zeros((5, 5))
    h[0, 0] = Delta_a
    for i in range(1, 5):
        h[i, i] = Delta
        h[0, i] = h[i, 0] = c.J_a
        nxt = 1 + i % 4
        h[i, nxt] = h[nxt, i] = c.J_1
    h[1, 3] = h[3, 1] = c.J_2
    h[2, 4] = h[4, 2] = c.J_2
    return h


def symmetric_rotation():
    """Orthogonal U with columns (aux, S, three non-symmetric arm modes).

    U^T H_eff U is block diagonal with the 2 x 2 block
    [[Delta_a, 2 J_a], [2 J_a, Delta + 2 J_1 + J_2]] in the first two rows.
    """
    u = np.zeros((5, 5))
    u[0, 0] = 1.0
    u[1:, 1] = 0.5
    u[1:, 2] = [0.5, -0.5, 0.5, -0.5]
    u[1:, 3] = [1.0, 0.0, -1.0, 0.0] / np.sqrt(2.0)
    u[1:, 4] = [0.0, 1.0, 0.0, -1.0] / np.sqrt(2.0)
    return u


def initial_state():
    """Auxiliary emitter excited, arms in the ground state."""
    return np.eye(5, dtype=complex)[0]


def goal_state():
    """Symmetric W state of the four arm emitters."""
    v = np.zeros(5, dtype=complex)
    v[1:] = 0.5
    return v


def protocol_fidelity_closed(c: EffectiveCouplings):
    """(F_max, T) for Delta_a = Delta; T is nan (with F_max = 0) when J_a = 0."""
    if c.J_a == 0:
        warnings.warn("J_a = 0: no transfer, T undefined", stacklevel=2)
        return 0.0, float("nan")
    d = 2.0 * c.J_1 + c.J_2
    r = np.sqrt(d * d + 16.0 * c.J_a**2)
    return float(16.0 * c.J_a**2 / r**2), float(np.pi / r)


def protocol_fidelity_sim(cfg: Optional[ProtocolConfig], c: EffectiveCouplings, T,
                          Gamma_star=None):
    """|<goal| exp(-i (H_eff - i Gamma*/2 sum sigma_ee) T) |aux>|^2.

    The loss term acts on all five emitters.  ``cfg`` supplies the detuning,
    the correction flag and the default Gamma*; ``None`` means Delta = 0,
    no correction and no loss.
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    if cfg is None:
        Delta, correct, gamma = 0.0, False, 0.0
    else:
        Delta, correct, gamma = raman_renormalize(cfg)[1], cfg.detuning_correction, cfg.Gamma_star
    if Gamma_star is not None:
        gamma = Gamma_star
    Delta_a = Delta + 2.0 * c.J_1 + c.J_2 if correct else Delta
    h = effective_hamiltonian(c, Delta, Delta_a).astype(complex)
    h -= 0.5j * gamma * np.eye(5)
    psi = _propagate(h, T) @ initial_state()
    return float(abs(np.vdot(goal_state(), psi)) ** 2)


def _propagate(h, T):
    """exp(-i h T) by eigendecomposition, falling back to expm on a bad residual."""
    if np.array_equal(h, h.conj().T):
        w, v = np.linalg.eigh(h)
        return (v * np.exp(-1j * w * T)) @ v.conj().T
    w, v = sla.eig(h)
    scale = max(1.0, float(np.max(np.abs(h))))
    resid = np.max(np.abs(h @ v - v * w)) / scale
    if resid < 1e-12 and np.linalg.cond(v) < 1e8:
        return (v * np.exp(-1j * w * T)) @ np.linalg.inv(v)
    out = sla.expm(-1j * h * T)
    if not np.all(np.isfinite(out)):
        raise ConvergenceError("matrix exponential failed")
    return out
