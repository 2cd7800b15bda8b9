"""Pure-numpy Brillouin-zone sums (fallback when the extension is not built)."""

import numpy as np

BACKEND = "numpy"


def lattice_sum(zs, n, delta, J, sign, n1=0, n2=0):
    """Weighted lattice sum and its z-derivative.

    Returns ``(S, dS)`` with::

        S(z)  = (1/n^2) sum_k cos(k.r) [w_u(k) / (z - w(k)) + w_l(k) / (z + w(k))]
        dS(z) = -(1/n^2) sum_k cos(k.r) [w_u / (z - w)^2 + w_l / (z + w)^2]

    where r = (n1, n2), w is the upper-band dispersion and (w_u, w_l) are the
    band weights of an emitter on sublattice A (``sign=+1``) or B (``-1``).
    Rows of the grid are accumulated separately and then summed in order,
    so results are deterministic.
    """
    z = np.atleast_1d(np.asarray(zs, dtype=complex)).ravel()
    k = 2.0 * np.pi * np.arange(n) / n - np.pi
    c2 = np.cos(0.5 * k) ** 2
    ca, sa = np.cos(k * n1), np.sin(k * n1)
    cb, sb = np.cos(k * n2), np.sin(k * n2)
    val = np.zeros(z.size, dtype=complex)
    der = np.zeros(z.size, dtype=complex)
    zc = z[:, None]
    for i in range(n):
        w = np.sqrt(delta * delta + 16.0 * J * J * c2[i] * c2)
        with np.errstate(divide="ignore", invalid="ignore"):
            wu = np.where(w == 0.0, 1.0, 0.5 * (w + delta) / w)
            wl = np.where(w == 0.0, 0.0, 0.5 * (w - delta) / w)
        if sign < 0:
            wu, wl = wl, wu
        phase = ca[i] * cb - sa[i] * sb
        a = 1.0 / (zc - w)
        b = 1.0 / (zc + w)
        val += (phase * (wu * a + wl * b)).sum(axis=1)
        der -= (phase * (wu * a * a + wl * b * b)).sum(axis=1)
    norm = 1.0 / (n * n)
    return val * norm, der * norm
