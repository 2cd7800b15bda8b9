"""Single-emitter and collective self-energies of the superlattice bath.

The closed form for an emitter on sublattice A (s = +1) or B (s = -1) is::

    Sigma(z) = 2 g^2 / (pi (z - s delta)) * K[16 J^2 / (z^2 - delta^2)]

Real energies are interpreted as E + i0+.  Inside the bands the elliptic
parameter lies on the cut of K, and the side is chosen explicitly from the
sign of E rather than by adding a small imaginary part.

In the lower half plane the five strips separated by the band edges are
labelled I..V.  Strips II and IV (the bands) use the continuation through
the cut, K(m) -> K(m) +/- 2i K(1 - m); the others use the closed form.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import SingularityError
from .lattice import BathParams, sublattice_sign
from .special import carlson_rd, carlson_rf

__all__ = [
    "EmitterConfig",
    "REGIONS",
    "region_of",
    "self_energy_analytic",
    "self_energy_continued",
    "self_energy_derivative",
    "self_energy_ksum",
    "band_edge_expansion",
    "collective_self_energy",
]

REGIONS = ("I", "II", "III", "IV", "V")
# sign of the 2i K(1 - m) term on each continued strip
_CONT_SIGN = {"II": 1.0, "IV": -1.0}


@dataclass(frozen=True)
class EmitterConfig:
    """A two-level emitter coupled locally to one bath site.

    ``site`` is given in primitive coordinates; ``Delta`` is the detuning
    from the bare site frequency and ``g`` the real-space coupling.
    """

    sublattice: str = "A"
    site: tuple = (0, 0)
    Delta: float = 0.0
    g: float = 0.5

    def __post_init__(self):
        sublattice_sign(self.sublattice)
        if not self.g >= 0:
            raise ValueError(f"g must be non-negative, got {self.g}")
        object.__setattr__(self, "site", tuple(int(v) for v in self.site))
        if len(self.site) != 2:
            raise ValueError("site must be an integer pair")

    @property
    def sign(self) -> int:
        return sublattice_sign(self.sublattice)


def region_of(z, p: BathParams):
    """Strip label of Re z; a boundary point belongs to the strip on its right."""
    x = float(np.real(z))
    edges = p.band_edges
    for label, edge in zip(REGIONS, edges):
        if x < edge:
            return label
    return "V"


def _check_edges(z, p, sign, allow_null_edge=True):
    z = np.atleast_1d(z)
    for edge in p.band_edges:
        if allow_null_edge and edge == -sign * p.delta and p.delta > 0:
            continue
        if np.any(z == edge):
            raise SingularityError(f"self-energy is singular at the band edge E = {edge:g}")


def _parameter(z, p):
    """y = 1 - m with signed zeros encoding the +i0 side for real z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    d = z * z - p.delta**2
    with np.errstate(divide="ignore", invalid="ignore"):
        m = 16.0 * p.J**2 / d
    y = 1.0 - m
    real_axis = z.imag == 0.0
    on_cut = real_axis & (m.real > 1.0)
    if np.any(on_cut):
        # E + i0: for E > 0 the parameter approaches the cut from below,
        # i.e. 1 - m from above; the opposite for E < 0.
        y = y.astype(complex)
        y.imag[on_cut & (z.real > 0)] = 0.0
        y.imag[on_cut & (z.real < 0)] = -0.0
    return z, m, y


def _k_dk(y):
    """K and dK/dm evaluated from y = 1 - m (signed zeros preserved)."""
    zero = np.zeros_like(y)
    one = np.ones_like(y)
    rf = carlson_rf(zero, y, one)
    m = 1.0 - y
    e = rf - m / 3.0 * carlson_rd(zero, y, one)
    with np.errstate(divide="ignore", invalid="ignore"):
        dk = (e - y * rf) / (2.0 * m * y)
    small = np.abs(m) < 1e-6
    if np.any(small):
        ms = m[small]
        dk[small] = np.pi / 8.0 * (1.0 + 1.125 * ms + 75.0 / 64.0 * ms * ms)
    return rf, dk


def _evaluate(z, sublattice, g, p, cont=None, derivative=False):
    """Shared closed-form evaluation; ``cont`` is the per-point +-1/0 sign of 2iK(1-m)."""
    sign = sublattice_sign(sublattice)
    scalar = np.ndim(z) == 0
    z, m, y = _parameter(z, p)
    pole = z - sign * p.delta
    null = (pole != 0) & (z == -sign * p.delta)
    k, dk = _k_dk(np.where(null, 0.5, y))
    f = k
    df = dk
    if cont is not None and np.any(cont != 0):
        c = np.broadcast_to(cont, z.shape)
        idx = c != 0
        # K(1 - m): its own parameter is m
        k2, dk2 = _k_dk(m[idx].astype(complex))
        f = f.astype(complex)
        df = df.astype(complex)
        f[idx] = f[idx] + 2j * c[idx] * k2
        df[idx] = df[idx] - 2j * c[idx] * dk2
    with np.errstate(divide="ignore", invalid="ignore"):
        pref = 2.0 * g * g / (np.pi * pole)
        val = np.where(null, 0.0, pref * f)
        if derivative:
            dm = -32.0 * p.J**2 * z / (z * z - p.delta**2) ** 2
            der = -pref / pole * f + pref * df * dm
            # at the null edge Sigma ~ sqrt(x) so the derivative diverges
            der = np.where(null, np.inf, der)
            out = der
        else:
            out = val
    return complex(out[0]) if scalar else out


def self_energy_analytic(z, sublattice, g, p: BathParams):
    """Closed-form self-energy on the physical sheet.

    Real ``z`` means z + i0+.  At the inner band edge where the sublattice
    weight vanishes (-delta for A, +delta for B) the limit 0 is returned; the
    three other band edges raise :class:`SingularityError`.
    """
    sign = sublattice_sign(sublattice)
    _check_edges(z, p, sign)
    if p.delta == 0.0 and np.any(np.atleast_1d(z) == 0.0):
        raise SingularityError("self-energy is singular at E = 0 when delta = 0")
    return _evaluate(z, sublattice, g, p)


def _cont_signs(z, regions, p):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if regions is None:
        regions = [region_of(v, p) for v in z]
    elif isinstance(regions, str):
        regions = [regions] * z.size
    signs = np.array([_CONT_SIGN.get(r, 0.0) for r in regions])
    for v, r in zip(z, regions):
        if r not in REGIONS:
            raise ValueError(f"unknown region {r!r}")
    return signs


def self_energy_continued(z, region, sublattice, g, p: BathParams):
    """Self-energy continued into the lower half plane on strip ``region``.

    ``region`` may be a label, a list of labels (one per z) or None to infer
    it from Re z.  Strips I, III and V return the closed form.
    """
    sign = sublattice_sign(sublattice)
    _check_edges(z, p, sign, allow_null_edge=False)
    return _evaluate(z, sublattice, g, p, cont=_cont_signs(z, region, p))


def self_energy_derivative(z, sublattice, g, p: BathParams, region=None):
    """d Sigma / dz from dK/dm; physical sheet unless a continued ``region`` is given."""
    sign = sublattice_sign(sublattice)
    _check_edges(z, p, sign, allow_null_edge=False)
    cont = None if region is None else _cont_signs(z, region, p)
    return _evaluate(z, sublattice, g, p, cont=cont, derivative=True)


def self_energy_ksum(z, sublattice, g, p: BathParams, grid_n=1024):
    """Finite-lattice self-energy from the band-resolved k-sum."""
    scalar = np.ndim(z) == 0
    val, _ = kernels.lattice_sum(z, int(grid_n), p.delta, p.J, sublattice_sign(sublattice))
    out = g * g * val
    return complex(out[0]) if scalar else out


_EDGE_KINDS = ("inner-upper", "inner-lower", "inner-upper-below")


def band_edge_expansion(x, edge, g, p: BathParams):
    """Leading asymptotics of the A-sublattice self-energy near the inner edges.

    ``inner-upper``: Sigma(delta + x + i0); ``inner-lower``: Sigma(-delta - x + i0);
    ``inner-upper-below``: Sigma(delta - x).  Valid for 0 < x << J.
    """
    if not x > 0:
        raise ValueError("band_edge_expansion requires x > 0")
    d, J = p.delta, p.J
    lg = np.log(d * x / (128.0 * J * J))
    if edge == "inner-upper":
        return g * g / np.sqrt(8.0) * np.sqrt(d / x) * (1.0 + 1j / np.pi * lg)
    if edge == "inner-lower":
        return g * g / np.sqrt(32.0) * np.sqrt(x / d) * (-1.0 + 1j / np.pi * lg)
    if edge == "inner-upper-below":
        return complex(-g * g / (np.sqrt(8.0) * np.pi * J) * np.sqrt(d / x) * (-lg))
    raise ValueError(f"edge must be one of {_EDGE_KINDS}")


def collective_self_energy(z, n12, g, p: BathParams, grid_n=1024, derivative=False):
    """Cross self-energy between two A-coupled emitters separated by ``n12``.

    Evaluated as the k-sum of cos(k.n12) [cos^2 / (z - w) + sin^2 / (z + w)],
    i.e. g^2 times the A-A lattice Green function at separation n12.  The
    symmetric/antisymmetric self-energies are Sigma_e +- this value.
    """
    _check_edges(z, p, 1, allow_null_edge=False)
    scalar = np.ndim(z) == 0
    n1, n2 = (int(v) for v in n12)
    val, der = kernels.lattice_sum(z, int(grid_n), p.delta, p.J, 1, n1, n2)
    out = g * g * (der if derivative else val)
    return complex(out[0]) if scalar else out
