"""Exact emitter dynamics from the contour decomposition of the resolvent.

The excited-state amplitude is split as::

    C_e(t) = sum_BS R e^{-iEt} + sum_UP R e^{-izt} + sum_edges BCD_edge(t)

where each branch-cut detour runs down the vertical line Re z = E_edge::

    BCD_edge(t) = -(1/2pi) e^{-i E_edge t} int_0^inf dy e^{-yt}
                  [G_left(E_edge - iy) - G_right(E_edge - iy)]

and G_left / G_right use the self-energy of the strip on either side.  The
y-integral is done on a fixed log-spaced Gauss-Legendre rule shared by all
times, so a whole time grid costs one matrix-vector product per edge.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, SingularityError
from .lattice import BathParams
from .selfenergy import (
    REGIONS,
    EmitterConfig,
    collective_self_energy,
    self_energy_analytic,
    self_energy_continued,
)
from .spectral import continued_roots, find_bound_states, find_unstable_poles

__all__ = [
    "DynamicsBreakdown",
    "ExchangeCoupling",
    "detour_rule",
    "branch_cut_contribution",
    "excited_amplitude",
    "two_emitter_amplitudes",
    "exchange_coupling",
    "pair_pole",
]

UP_RESIDUE_CUTOFF = 1e-6
_GAP_KEYS = {"lower": "LBS", "middle": "MBS", "upper": "UBS"}


@dataclass
class DynamicsBreakdown:
    """Per-contribution amplitudes on a time grid; ``total`` is their sum."""

    times: np.ndarray
    contributions: dict
    bound_states: list = field(default_factory=list)
    unstable_poles: list = field(default_factory=list)
    bcd_error: float = 0.0

    @property
    def total(self):
        out = np.zeros(len(self.times), dtype=complex)
        for v in self.contributions.values():
            out = out + v
        return out


@dataclass(frozen=True)
class ExchangeCoupling:
    J_ex: float
    E_plus: float
    E_minus: float
    R: float


def detour_rule(singular=(), panel_width=0.5, order=12, y_min=1e-14, y_max=1e5):
    """Nodes and weights for int_0^inf dy on a log-mapped Gauss-Legendre grid.

    ``singular`` lists (y0, d) pairs for poles lying a distance d from the
    line at height y0; panels are graded geometrically towards each.
    """
    x0, x1 = np.log(y_min), np.log(y_max)
    breaks = [np.linspace(x0, x1, int(np.ceil((x1 - x0) / panel_width)) + 1)]
    for y0, d in singular:
        d = max(float(d), 1e-12)
        steps = d * 2.0 ** np.arange(0, 60)
        pts = np.concatenate([[y0], y0 + steps, y0 - steps])
        pts = pts[(pts > y_min) & (pts < y_max)]
        breaks.append(np.log(pts))
    edges = np.unique(np.concatenate(breaks))
    edges = edges[(edges >= x0) & (edges <= x1)]
    gx, gw = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    y = np.exp(x)
    return y, w * y


def _check_detuning(e, p):
    if p.delta <= 0:
        raise ValueError("the contour decomposition needs delta > 0 (four distinct edges)")
    for edge in p.band_edges:
        if e.Delta == edge:
            raise SingularityError(f"detuning sits exactly on the band edge E = {edge:g}")


def _detour_integrand(e, p, edge_index, y):
    edge = p.band_edges[edge_index]
    left, right = REGIONS[edge_index], REGIONS[edge_index + 1]
    z = edge - 1j * y
    sl = self_energy_continued(z, left, e.sublattice, e.g, p)
    sr = self_energy_continued(z, right, e.sublattice, e.g, p)
    return 1.0 / (z - e.Delta - sl) - 1.0 / (z - e.Delta - sr)


def _line_singularities(e, p):
    """Per edge, (height, distance) of continued-sheet poles close to its detour line."""
    roots = {label: continued_roots(e, p, label) for label in ("II", "IV")}
    out = []
    for i, edge in enumerate(p.band_edges):
        near = []
        for label in (REGIONS[i], REGIONS[i + 1]):
            for z in roots.get(label, []):
                d = abs(z.real - edge)
                if d < 0.5 * p.J:
                    near.append((-z.imag, d))
        out.append(near)
    return out


def _detour_sum(times, e, p, singular, order=12):
    times = np.asarray(times, dtype=float)
    total = np.zeros(times.size, dtype=complex)
    for i, (edge, sing) in enumerate(zip(p.band_edges, singular)):
        y, w = detour_rule(sing, order=order)
        h = _detour_integrand(e, p, i, y)
        damp = np.exp(-np.outer(times, y))
        total += -(damp @ (w * h)) / (2.0 * np.pi) * np.exp(-1j * edge * times)
    return total


def branch_cut_contribution(t, e: EmitterConfig, p: BathParams, tol=1e-7, return_error=False):
    """Sum of the four branch-cut detour contributions at time(s) t >= 0.

    The error estimate compares 12- and 8-point rules on the same panels;
    :class:`ConvergenceError` is raised when it exceeds ``tol``.
    """
    _check_detuning(e, p)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    if e.g == 0.0:
        out = np.zeros(times.size, dtype=complex)
        err = 0.0
    else:
        sing = _line_singularities(e, p)
        out = _detour_sum(times, e, p, sing, order=12)
        err = float(np.max(np.abs(out - _detour_sum(times, e, p, sing, order=8))))
        if err > tol:
            raise ConvergenceError(
                f"branch-cut quadrature error estimate {err:.2e} > {tol:.1e}", err)
    out = out if np.ndim(t) else complex(out[0])
    return (out, err) if return_error else out


def excited_amplitude(times, e: EmitterConfig, p: BathParams) -> DynamicsBreakdown:
    """Excited-state amplitude C_e(t) split into pole and detour contributions."""
    _check_detuning(e, p)
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted and non-negative")
    contrib = {}
    if e.g == 0.0:
        contrib["free"] = np.exp(-1j * e.Delta * times)
        return DynamicsBreakdown(times, contrib)
    bs = find_bound_states(e, p)
    for b in bs:
        contrib[_GAP_KEYS[b.gap]] = b.residue * np.exp(-1j * b.energy * times)
    ups = [u for u in find_unstable_poles(e, p) if abs(u.residue) >= UP_RESIDUE_CUTOFF]
    for u in ups:
        key = f"UP-{u.region}"
        contrib[key] = contrib.get(key, 0.0) + u.residue * np.exp(-1j * u.z * times)
    bcd, err = branch_cut_contribution(times, e, p, return_error=True)
    contrib["BCD"] = np.asarray(bcd, dtype=complex).reshape(times.shape)
    return DynamicsBreakdown(times, contrib, bs, ups, err)


def pair_pole(e: EmitterConfig, n12, p: BathParams, parity, E0, grid_n=1024):
    """Middle-gap pole of the symmetric (+1) / antisymmetric (-1) pair problem.

    Solves E = Delta + Sigma_e(E) + parity * Sigma_12(E) by bracketing
    outward from the single-emitter bound-state energy E0.  Returns
    (energy, residue).
    """
    from scipy.optimize import brentq

    lo, hi = -p.delta, p.delta

    def f(E):
        s = self_energy_analytic(E, "A", e.g, p).real
        c = collective_self_energy(E, n12, e.g, p, grid_n).real
        return E - e.Delta - s - parity * c

    step = 1e-3 * p.J
    a, b = E0, E0
    fa = fb = f(E0)
    while fa * fb > 0:
        step *= 2.0
        a, b = max(E0 - step, lo + 1e-9 * p.J), min(E0 + step, hi - 1e-9 * p.J)
        fa, fb = f(a), f(b)
        if a <= lo + 1e-9 * p.J and b >= hi - 1e-9 * p.J and fa * fb > 0:
            raise ConvergenceError("no middle-gap pole in the pair subspace")
    E = E0 if fa == 0 and a == b else brentq(f, a, b, xtol=1e-15, rtol=1e-15)
    from .selfenergy import self_energy_derivative

    ds = self_energy_derivative(E, "A", e.g, p).real
    dc = collective_self_energy(E, n12, e.g, p, grid_n, derivative=True).real
    return E, 1.0 / (1.0 - ds - parity * dc)


def _pair_setup(e1, e2, p):
    if e1.sublattice.upper() != "A" or e2.sublattice.upper() != "A":
        raise ValueError("pair dynamics is implemented for A-coupled emitters")
    if e1.Delta != e2.Delta or e1.g != e2.g:
        raise ValueError("pair dynamics needs identical Delta and g")
    if not -p.delta < e1.Delta < p.delta:
        raise ValueError("pair dynamics needs Delta inside the middle gap")
    n12 = (e2.site[0] - e1.site[0], e2.site[1] - e1.site[1])
    single = [b for b in find_bound_states(e1, p) if b.gap == "middle"]
    if not single:
        raise ConvergenceError("no single-emitter middle bound state")
    return n12, single[0]


def exchange_coupling(e1: EmitterConfig, e2: EmitterConfig, p: BathParams, grid_n=1024):
    """Exchange rate J_ex = (E_- - E_+)/2 from the pair pole equations."""
    n12, mbs = _pair_setup(e1, e2, p)
    Ep, Rp = pair_pole(e1, n12, p, +1, mbs.energy, grid_n)
    Em, Rm = pair_pole(e1, n12, p, -1, mbs.energy, grid_n)
    return ExchangeCoupling(0.5 * (Em - Ep), Ep, Em, float(np.sqrt(Rp * Rm)))


def two_emitter_amplitudes(times, e1: EmitterConfig, e2: EmitterConfig, p: BathParams,
                           grid_n=1024, collective=True, return_others=False):
    """Amplitudes (C1, C2) with emitter 1 initially excited.

    C_{1,2} = (C_+ +- C_-)/2.  Each C_+- carries its own middle-gap pole from
    Sigma_e +- Sigma_12; the remaining pieces (outer bound states, unstable
    poles, branch-cut detours) are taken from the single-emitter
    decomposition, which is their Sigma_12 -> 0 limit, rescaled by
    (1 - R_pm) / (1 - R) so that C_pm(0) = 1.  With
    ``collective=False`` the cross self-energy is switched off.
    ``return_others=True`` appends the non-pole parts of (C1, C2).
    """
    times = np.asarray(times, dtype=float)
    n12, mbs = _pair_setup(e1, e2, p)
    single = excited_amplitude(times, e1, p)
    rest = single.total - single.contributions["MBS"]
    if not collective:
        zero = np.zeros_like(single.total)
        return (single.total, zero, rest, zero) if return_others else (single.total, zero)
    amps, others = {}, {}
    for parity in (+1, -1):
        E, R = pair_pole(e1, n12, p, parity, mbs.energy, grid_n)
        # rescale the remainder so that each channel keeps unit total weight
        others[parity] = rest * (1.0 - R) / (1.0 - mbs.residue)
        amps[parity] = R * np.exp(-1j * E * times) + others[parity]
    out = (0.5 * (amps[1] + amps[-1]), 0.5 * (amps[1] - amps[-1]))
    if return_others:
        out += (0.5 * (others[1] + others[-1]), 0.5 * (others[1] - others[-1]))
    return out
