"""Poles of the emitter Green function G(z) = 1 / (z - Delta - Sigma(z)).

Real poles in the three gaps are bound states; complex poles on the
continued strips II and IV are unstable poles.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import SingularityError
from .lattice import BathParams
from .selfenergy import (
    EmitterConfig,
    region_of,
    self_energy_analytic,
    self_energy_continued,
    self_energy_derivative,
)
from .special import lambert_w0

__all__ = [
    "BoundState",
    "UnstablePole",
    "markov_shift_rate",
    "find_bound_states",
    "residue_of",
    "find_unstable_poles",
    "mbs_energy_asymptotic",
    "gap_intervals",
    "continued_roots",
]

_EDGE_SHRINKS = (1e-6, 1e-9, 1e-12)
_SAMPLES_PER_GAP = 200


@dataclass(frozen=True)
class BoundState:
    energy: float
    residue: float
    gap: str
    emitter: EmitterConfig
    near_edge: bool = False


@dataclass(frozen=True)
class UnstablePole:
    z: complex
    region: str
    residue: complex


def markov_shift_rate(e: EmitterConfig, p: BathParams):
    """Lamb shift and decay rate from Sigma(Delta + i0): (Re Sigma, -2 Im Sigma)."""
    s = self_energy_analytic(float(e.Delta), e.sublattice, e.g, p)
    return s.real, max(0.0, -2.0 * s.imag)


def gap_intervals(p: BathParams):
    """Open gap intervals keyed by label; the middle gap is absent for delta = 0."""
    w = p.outer_edge
    out = {"lower": (-np.inf, -w)}
    if p.delta > 0:
        out["middle"] = (-p.delta, p.delta)
    out["upper"] = (w, np.inf)
    return out


def _pole_function(e, p):
    def f(E):
        return float(np.real(E - e.Delta - self_energy_analytic(E, e.sublattice, e.g, p)))

    return f


def _gap_root(e, p, lo, hi):
    """Root of f in the open gap (lo, hi), or None; second item flags a near-edge root."""
    f = _pole_function(e, p)
    J = p.J
    scale = max(J, abs(e.Delta), p.outer_edge)
    # open the infinite side until f changes sign there
    if np.isinf(lo):
        a = hi - scale
        while f(a) > 0:
            a = hi - 2.0 * (hi - a)
        lo_pts = [a]
    if np.isinf(hi):
        b = lo + scale
        while f(b) < 0:
            b = lo + 2.0 * (b - lo)
        hi_pts = [b]
    for shrink in _EDGE_SHRINKS:
        eps = shrink * J
        a = lo_pts[0] if np.isinf(lo) else lo + eps
        b = hi_pts[0] if np.isinf(hi) else hi - eps
        xs = np.linspace(a, b, _SAMPLES_PER_GAP)
        vals = np.real(xs - e.Delta - self_energy_analytic(xs, e.sublattice, e.g, p))
        change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
        if change.size:
            i = change[0]
            if vals[i] == 0.0:
                return xs[i], shrink > _EDGE_SHRINKS[0]
            root = brentq(f, xs[i], xs[i + 1], xtol=1e-15 * max(1.0, abs(xs[i])), rtol=1e-15)
            return root, shrink > _EDGE_SHRINKS[0]
        # a root might hide between the shrunk bracket and the edge
        closer_edge_left = not np.isinf(lo) and vals[0] > 0
        closer_edge_right = not np.isinf(hi) and vals[-1] < 0
        if not (closer_edge_left or closer_edge_right):
            return None, False
    return None, False


def _polish(E, e, p):
    """A couple of Newton steps on the real pole equation."""
    for _ in range(3):
        s = self_energy_analytic(E, e.sublattice, e.g, p).real
        ds = self_energy_derivative(E, e.sublattice, e.g, p).real
        step = (E - e.Delta - s) / (1.0 - ds)
        E_new = E - step
        lo, hi = _enclosing_gap(E, p)
        if not lo < E_new < hi:
            break
        E = E_new
        if abs(step) < 1e-15 * max(1.0, abs(E)):
            break
    return E


def _enclosing_gap(E, p):
    for lo, hi in gap_intervals(p).values():
        if lo < E < hi:
            return lo, hi
    return (np.nan, np.nan)


def residue_of(E, e: EmitterConfig, p: BathParams, tol=1e-8):
    """Pole weight 1 / (1 - Sigma'(E)) of a bound state at real energy E."""
    res = (E - e.Delta - self_energy_analytic(E, e.sublattice, e.g, p)).real
    ds = self_energy_derivative(E, e.sublattice, e.g, p).real
    # near an edge the pole equation is steep; accept roundoff-level Newton steps
    if abs(res) > tol * p.J and abs(res / (1.0 - ds)) > 1e-12 * max(1.0, abs(E)):
        raise ValueError(f"E = {E!r} is not a pole (residual {abs(res):.3e})")
    return float(1.0 / (1.0 - ds))


def find_bound_states(e: EmitterConfig, p: BathParams):
    """Bound states (at most one per gap), sorted by energy."""
    out = []
    for label, (lo, hi) in gap_intervals(p).items():
        if e.g == 0.0:
            if lo < e.Delta < hi:
                out.append(BoundState(float(e.Delta), 1.0, label, e))
            continue
        root, near = _gap_root(e, p, lo, hi)
        if root is None:
            continue
        root = _polish(root, e, p)
        out.append(BoundState(float(root), residue_of(root, e, p, tol=1e-9), label, e, near))
    return out


def _newton_batch(F, dF, z0, tol, max_iter=100, max_step=0.5):
    """Vectorised damped Newton; entries that fail to converge come back as nan."""
    z = z0.astype(complex)
    done = np.zeros(z.size, dtype=bool)
    alive = np.ones(z.size, dtype=bool)
    for _ in range(max_iter):
        act = alive & ~done
        if not act.any():
            break
        idx = np.nonzero(act)[0]
        zi = z[idx]
        try:
            with np.errstate(all="ignore"):
                dz = F(zi) / dF(zi)
        except SingularityError:
            dz = np.array([_safe_step(F, dF, v) for v in zi])
        big = np.abs(dz) > max_step
        dz[big] *= max_step / np.abs(dz[big])
        ok = np.isfinite(dz)
        alive[idx[~ok]] = False
        zi = zi - np.where(ok, dz, 0)
        z[idx] = zi
        with np.errstate(all="ignore"):
            conv = ok & (np.abs(dz) < tol)
        if conv.any():
            try:
                res = np.abs(F(zi[conv]))
            except SingularityError:
                res = np.array([abs(_safe_value(F, v)) for v in zi[conv]])
            done[idx[np.nonzero(conv)[0][res < tol]]] = True
    z[~done] = np.nan
    return z


def _safe_value(F, z):
    try:
        return F(z)
    except SingularityError:
        return np.nan


def _safe_step(F, dF, z):
    try:
        return F(z) / dF(z)
    except (SingularityError, ZeroDivisionError):
        return np.nan


def continued_roots(e: EmitterConfig, p: BathParams, label, tol=1e-10):
    """All lower-half-plane roots of z - Delta - Sigma_label(z) reached from the seeds.

    Roots are not filtered by strip; :func:`find_unstable_poles` keeps only
    those inside the strip where the continued formula applies.
    """
    w, d = p.outer_edge, p.delta
    lo, hi = {"II": (-w, -d), "IV": (d, w)}[label]
    width = hi - lo

    def F(z):
        return z - e.Delta - self_energy_continued(z, label, e.sublattice, e.g, p)

    def dF(z):
        return 1.0 - self_energy_derivative(z, e.sublattice, e.g, p, region=label)

    try:
        markov = e.Delta + self_energy_analytic(float(e.Delta), e.sublattice, e.g, p)
    except SingularityError:
        markov = complex(e.Delta, -0.01 * p.J)
    seeds = [complex(np.clip(markov.real, lo + 1e-3 * width, hi - 1e-3 * width),
                     min(markov.imag, -1e-3 * p.J))]
    for x in np.linspace(lo, hi, 11)[1:-1]:
        for y in (0.02, 0.1, 0.4, 1.0):
            seeds.append(complex(x, -y * p.J))
    zs = _newton_batch(F, dF, np.array(seeds), tol * p.J, max_step=0.25 * width)
    found = []
    for z in zs:
        if not (np.isfinite(z) and z.imag < 0):
            continue
        if any(abs(z - q) < 1e-7 * p.J for q in found):
            continue
        found.append(complex(z))
    return sorted(found, key=lambda v: v.real)


def find_unstable_poles(e: EmitterConfig, p: BathParams, tol=1e-10):
    """Complex poles on the continued strips II (lower band) and IV (upper band).

    Newton is seeded at the Markovian estimate Delta + Sigma(Delta + i0)
    and on a grid covering each strip; converged roots outside their strip
    or with Im z >= 0 are discarded.
    """
    if e.g == 0.0 or p.delta == 0.0:
        return []
    poles = []
    for label in ("II", "IV"):
        for z in continued_roots(e, p, label, tol):
            if region_of(z, p) != label:
                continue
            ds = self_energy_derivative(z, e.sublattice, e.g, p, region=label)
            poles.append(UnstablePole(z, label, complex(1.0 / (1.0 - ds))))
    return poles


def mbs_energy_asymptotic(g, delta, J=1.0):
    """Middle bound-state energy for Delta = delta from the inner-edge expansion.

    E = delta - cbrt( g^4 delta / (2 (3 pi)^2 J^3) * W(6144 pi J^4 / (g^2 delta^2))^2 )
    """
    if g == 0:
        return float(delta)
    arg = 6144.0 * np.pi * J**4 / (g * g * delta * delta)
    if arg < 100.0:
        warnings.warn("mbs_energy_asymptotic: coupling too strong for the edge expansion",
                      stacklevel=2)
    w = lambert_w0(arg)
    return float(delta - np.cbrt(g**4 * delta / (2.0 * (3.0 * np.pi) ** 2 * J**3) * w * w))
