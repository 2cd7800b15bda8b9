"""Oracle-versus-analytic validation suite used by ``superbath validate``."""

from dataclasses import dataclass

import numpy as np

from . import oracle
from .dynamics import excited_amplitude
from .lattice import BathParams, dispersion, k_grid
from .selfenergy import EmitterConfig, self_energy_analytic, self_energy_ksum
from .spectral import find_bound_states
from .wavefunction import bs_real_space

__all__ = ["CheckResult", "run_suite"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    limit: float
    passed: bool


def _check(name, value, limit, below=True):
    ok = bool(value < limit) if below else bool(value > limit)
    return CheckResult(name, float(value), float(limit), ok)


def run_suite(N=48, t_max=20.0, J=1.0):
    """Compare the finite-lattice oracle with the analytic machinery.

    Reference point: A-coupled emitter, Delta = 0, delta = J, g = J/2.
    """
    p = BathParams(J, J, N)
    e = EmitterConfig("A", (0, 0), 0.0, 0.5 * J)
    out = []

    bare = oracle.build_model(p)
    ev, _ = bare.diagonalize()
    k = k_grid(N)
    w = dispersion(k[:, None], k[None, :], p).ravel()
    ref = np.sort(np.concatenate([w, -w]))
    out.append(_check("bath_spectrum", np.max(np.abs(np.sort(ev) - ref)), 1e-10))

    model = oracle.build_model(p, [e])
    mbs = [b for b in find_bound_states(e, p) if b.gap == "middle"][0]
    E_or, vec = oracle.bound_state_from_spectrum(model, "middle")
    out.append(_check("mbs_energy", abs(E_or - mbs.energy), 5e-3 * J))
    out.append(_check("mbs_residue", abs(abs(vec[-1]) ** 2 - mbs.residue), 5e-3))

    wf = bs_real_space(E_or, e, p)
    psi = np.concatenate([wf.C_A.ravel(), wf.C_B.ravel(), [wf.C_e]])
    out.append(_check("mbs_overlap", abs(np.vdot(vec, psi)) ** 2, 0.99, below=False))

    times = np.linspace(0.0, t_max, 81)
    exact = excited_amplitude(times, e, p).total
    amp = oracle.evolve(model, model.emitter_index(0), times)[:, model.emitter_index(0)]
    out.append(_check("dynamics", np.max(np.abs(exact - amp)), 0.02))

    zs = [0.3 * J, -4.5 * J, 0.1 * J - 0.2j * J]
    rel = max(abs(self_energy_ksum(z, "A", e.g, p, 512) / self_energy_analytic(z, "A", e.g, p) - 1)
              for z in zs)
    out.append(_check("selfenergy_ksum", rel, 1e-3))

    zr = [0.37 * J + 0.5j * J, -4.5 * J, 5.2 * J, 0.2 * J]
    sym = max(abs(self_energy_analytic(z, "A", e.g, p) + self_energy_analytic(-z, "B", e.g, p))
              for z in zr)
    out.append(_check("sublattice_mirror", sym, 1e-10))
    return out
