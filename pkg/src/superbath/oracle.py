"""Brute-force real-space model of the finite periodic bath plus emitters.

Basis ordering: A sites (index n1 * N + n2), then B sites (offset N^2),
then the emitters in the order given.  Each A site at n couples with
amplitude J to the B sites at n + d for d in ``B_OFFSETS`` (periodic wrap),
which reproduces f(k) = J (1 + e^{ik1}) (1 + e^{ik2}) under the Fourier
convention of :mod:`superbath.lattice`.  An emitter couples with amplitude g
to its single site.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from .lattice import BathParams, sublattice_sign

__all__ = [
    "RealSpaceModel",
    "B_OFFSETS",
    "MAX_N",
    "MAX_EMITTERS",
    "build_model",
    "evolve",
    "bound_state_from_spectrum",
]

B_OFFSETS = ((0, 0), (-1, 0), (0, -1), (-1, -1))
MAX_N = 128
MAX_EMITTERS = 8


@dataclass
class RealSpaceModel:
    """Single-excitation Hamiltonian with its site bookkeeping.

    ``matrix`` is sparse (CSR); the eigendecomposition is computed lazily and
    cached in ``eigvals`` / ``eigvecs``.
    """

    params: BathParams
    emitters: tuple
    matrix: sp.csr_matrix
    eigvals: np.ndarray = None
    eigvecs: np.ndarray = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def site_index(self, sublattice, n1, n2) -> int:
        N = self.params.N
        off = 0 if sublattice_sign(sublattice) > 0 else N * N
        return off + (n1 % N) * N + (n2 % N)

    def emitter_index(self, j) -> int:
        return 2 * self.params.N**2 + j

    def diagonalize(self):
        if self.eigvals is None:
            self.eigvals, self.eigvecs = sla.eigh(self.matrix.toarray(), overwrite_a=True,
                                                  check_finite=False, driver="evd")
        return self.eigvals, self.eigvecs

    def sublattice_grids(self, vec):
        """Reshape the bath part of ``vec`` into N x N arrays (C_A, C_B)."""
        N = self.params.N
        return vec[: N * N].reshape(N, N), vec[N * N: 2 * N * N].reshape(N, N)


def build_model(p: BathParams, emitters=()) -> RealSpaceModel:
    """Assemble the real-space Hamiltonian (dimension 2 N^2 + number of emitters)."""
    N = p.N
    emitters = tuple(emitters)
    if N > MAX_N:
        raise ValueError(f"N = {N} exceeds the dense-diagonalization budget N <= {MAX_N}")
    if len(emitters) > MAX_EMITTERS:
        raise ValueError(f"at most {MAX_EMITTERS} emitters are supported")
    nn = N * N
    dim = 2 * nn + len(emitters)
    n1, n2 = np.divmod(np.arange(nn), N)
    rows = [np.arange(nn), nn + np.arange(nn)]
    cols = [np.arange(nn), nn + np.arange(nn)]
    vals = [np.full(nn, p.delta), np.full(nn, -p.delta)]
    for d1, d2 in B_OFFSETS:
        b = nn + ((n1 + d1) % N) * N + (n2 + d2) % N
        rows += [np.arange(nn), b]
        cols += [b, np.arange(nn)]
        vals += [np.full(nn, p.J), np.full(nn, p.J)]
    model = RealSpaceModel(p, emitters, None)
    for j, e in enumerate(emitters):
        i = 2 * nn + j
        s = model.site_index(e.sublattice, *e.site)
        rows += [np.array([i]), np.array([i]), np.array([s])]
        cols += [np.array([i]), np.array([s]), np.array([i])]
        vals += [np.array([e.Delta]), np.array([e.g]), np.array([e.g])]
    h = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(dim, dim))
    model.matrix = h.tocsr()
    return model


def evolve(model: RealSpaceModel, initial: int, times):
    """Full state <i| exp(-iHt) |initial> for all i; shape (len(times), dim)."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    ev, U = model.diagonalize()
    coeff = U[initial, :].conj()
    phases = np.exp(-1j * np.outer(times, ev))
    return (phases * coeff[None, :]) @ U.T


def _gap_candidates(model, gap, lo, hi):
    """In-gap eigenpairs: dense if already diagonalized, else Lanczos on a few states."""
    if model.eigvals is not None:
        return model.eigvals, model.eigvecs
    k = max(1, len(model.emitters))
    kwargs = {"sigma": 0.5 * (lo + hi)} if gap == "middle" else {
        "which": "SA" if gap == "lower" else "LA"}
    try:
        return spl.eigsh(model.matrix.tocsc(), k=k, maxiter=20 * model.dim, **kwargs)
    except spl.ArpackNoConvergence as exc:
        # without an isolated state the iteration stalls on the degenerate band edge
        return exc.eigenvalues, exc.eigenvectors


def bound_state_from_spectrum(model: RealSpaceModel, gap):
    """Eigenpair inside ``gap`` ("lower", "middle", "upper"), or None if absent.

    If several eigenvalues fall into the gap, the one with the largest
    emitter weight is returned.
    """
    p = model.params
    w = p.outer_edge
    lo, hi = {"lower": (-np.inf, -w), "middle": (-p.delta, p.delta), "upper": (w, np.inf)}[gap]
    ev, U = _gap_candidates(model, gap, lo, hi)
    margin = 1e-9 * p.J
    idx = np.nonzero((ev > lo + margin) & (ev < hi - margin))[0]
    if idx.size == 0:
        return None
    em = slice(2 * p.N**2, model.dim)
    weights = np.sum(np.abs(U[em, idx]) ** 2, axis=0)
    k = idx[np.argmax(weights)]
    vec = U[:, k].copy()
    # fix the global phase so the emitter amplitude is real and positive
    ref = vec[2 * p.N**2] if model.emitters else vec[np.argmax(np.abs(vec))]
    if ref != 0:
        vec *= abs(ref) / ref
    return float(ev[k]), vec
