"""Special functions used by the self-energy and wavefunction layers.

Complete elliptic integrals are evaluated through Carlson's symmetric forms
with the duplication algorithm, which works uniformly for complex
parameters.  The parameter convention is used throughout::

    K(m) = int_0^{pi/2} dt / sqrt(1 - m sin^2 t)

The principal branch has a cut along m in [1, inf).  Points on the cut need
an explicit side, ``"above"`` (m + i0) or ``"below"`` (m - i0).
"""

import numpy as np
import scipy.special as sps

from .errors import SingularityError

__all__ = [
    "carlson_rf",
    "carlson_rd",
    "elliptic_K",
    "elliptic_E",
    "elliptic_dK",
    "gamma0",
    "lambert_w0",
    "EULER_GAMMA",
]

EULER_GAMMA = float(np.euler_gamma)

_RF_TOL = 1e-16
_MAX_DUPLICATIONS = 60


def _unwrap(out, scalar):
    return complex(out) if scalar else out


def carlson_rf(x, y, z):
    """Carlson's R_F(x, y, z) for complex arguments (vectorised).

    Arguments must lie in the cut plane C \\ (-inf, 0) with at most one of
    them zero.  A signed-zero imaginary part on a negative real argument
    selects the side of the cut, following the C99 ``csqrt`` convention.
    """
    x, y, z = np.broadcast_arrays(*(np.asarray(a, dtype=complex) for a in (x, y, z)))
    scalar = x.ndim == 0
    x, y, z = (np.atleast_1d(a).copy() for a in (x, y, z))

    a0 = (x + y + z) / 3.0
    q = (3.0 * _RF_TOL) ** (-1.0 / 6.0) * np.maximum.reduce(
        [np.abs(a0 - x), np.abs(a0 - y), np.abs(a0 - z)]
    )
    x0, y0 = x.copy(), y.copy()
    a = a0.copy()
    scale = 1.0
    for _ in range(_MAX_DUPLICATIONS):
        if np.all(scale * q < np.abs(a)):
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        a = (a + lam) * 0.25
        x = (x + lam) * 0.25
        y = (y + lam) * 0.25
        z = (z + lam) * 0.25
        scale *= 0.25
    xx = (a0 - x0) * scale / a
    yy = (a0 - y0) * scale / a
    zz = -(xx + yy)
    e2 = xx * yy - zz * zz
    e3 = xx * yy * zz
    out = (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / np.sqrt(a)
    return _unwrap(out[0], True) if scalar else out


def carlson_rd(x, y, z):
    """Carlson's R_D(x, y, z) for complex arguments (vectorised)."""
    x, y, z = np.broadcast_arrays(*(np.asarray(a, dtype=complex) for a in (x, y, z)))
    scalar = x.ndim == 0
    x, y, z = (np.atleast_1d(a).copy() for a in (x, y, z))

    a0 = (x + y + 3.0 * z) / 5.0
    q = (_RF_TOL / 4.0) ** (-1.0 / 6.0) * np.maximum.reduce(
        [np.abs(a0 - x), np.abs(a0 - y), np.abs(a0 - z)]
    )
    x0, y0 = x.copy(), y.copy()
    a = a0.copy()
    acc = np.zeros_like(a)
    scale = 1.0
    for _ in range(_MAX_DUPLICATIONS):
        if np.all(scale * q < np.abs(a)):
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        acc = acc + scale / (sz * (z + lam))
        a = (a + lam) * 0.25
        x = (x + lam) * 0.25
        y = (y + lam) * 0.25
        z = (z + lam) * 0.25
        scale *= 0.25
    xx = (a0 - x0) * scale / a
    yy = (a0 - y0) * scale / a
    zz = -(xx + yy) / 3.0
    xy = xx * yy
    z2 = zz * zz
    e2 = xy - 6.0 * z2
    e3 = (3.0 * xy - 8.0 * z2) * zz
    e4 = 3.0 * (xy - z2) * z2
    e5 = xy * z2 * zz
    series = (
        1.0
        - 3.0 * e2 / 14.0
        + e3 / 6.0
        + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0
    )
    out = scale * series / (a * np.sqrt(a)) + 3.0 * acc
    return _unwrap(out[0], True) if scalar else out


def _one_minus_m(m, side):
    """Return 1 - m as complex, with a signed zero selecting the cut side."""
    m = np.asarray(m, dtype=complex)
    y = np.atleast_1d(1.0 - m).astype(complex)
    mm = np.atleast_1d(m)
    on_cut = (mm.imag == 0.0) & (mm.real > 1.0)
    if np.any(mm == 1.0):
        raise SingularityError("elliptic integral evaluated at m = 1")
    if np.any(on_cut):
        if side not in ("above", "below"):
            raise ValueError("m on the branch cut [1, inf) requires side='above' or 'below'")
        # m + i0  <->  1 - m - i0
        y.imag[on_cut] = -0.0 if side == "above" else 0.0
    return y, m.ndim == 0


def elliptic_K(m, side=None):
    """Complete elliptic integral of the first kind, K(m).

    Parameters
    ----------
    m : complex or array_like
        Parameter (not modulus).
    side : {"above", "below", None}
        Side of the cut for real m > 1.  Ignored elsewhere.
    """
    y, scalar = _one_minus_m(m, side)
    out = carlson_rf(np.zeros_like(y), y, np.ones_like(y))
    return complex(out[0]) if scalar else out


def elliptic_E(m, side=None):
    """Complete elliptic integral of the second kind, same conventions as K."""
    y, scalar = _one_minus_m(m, side)
    zero, one = np.zeros_like(y), np.ones_like(y)
    mm = 1.0 - y
    out = carlson_rf(zero, y, one) - mm / 3.0 * carlson_rd(zero, y, one)
    return complex(out[0]) if scalar else out


def elliptic_dK(m, side=None):
    """dK/dm = (E - (1 - m) K) / (2 m (1 - m)), with the m -> 0 limit pi/8."""
    y, scalar = _one_minus_m(m, side)
    mm = 1.0 - y
    k = elliptic_K(mm, side)
    e = elliptic_E(mm, side)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (e - y * k) / (2.0 * mm * y)
    small = np.abs(mm) < 1e-6
    if np.any(small):
        ms = mm[small]
        # series: pi/8 (1 + 9/8 m + 75/64 m^2)
        out[small] = np.pi / 8.0 * (1.0 + 1.125 * ms + 75.0 / 64.0 * ms * ms)
    return complex(out[0]) if scalar else out


def gamma0(x):
    """Upper incomplete gamma function Gamma(0, x) = E_1(x) for x > 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("gamma0 requires x > 0 (divergent otherwise)")
    out = sps.exp1(arr)
    return float(out) if arr.ndim == 0 else out


def lambert_w0(x):
    """Principal branch of the Lambert W function for real x >= 0."""
    x = float(x)
    if x < 0.0:
        raise ValueError("lambert_w0 is defined here for x >= 0 only")
    return float(sps.lambertw(x, 0).real)
