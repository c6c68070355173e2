"""Finite Jacobi truncations and a Sturm-count bisection eigensolver.

The zeros of ``p_n`` are the eigenvalues of the leading ``n x n`` block of
the Jacobi matrix, so everything about zero locations reduces to inertia
counts of shifted tridiagonal factorizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coeffs import CoefficientSequence

__all__ = [
    "TridiagonalMatrix",
    "ZeroSet",
    "truncate",
    "sturm_count",
    "sturm_counts",
    "leading_counts",
    "eigenvalues",
    "zeros",
    "bisect_eigenvalue",
    "count_zeros_in",
    "gauss_quadrature",
    "eigenvectors",
    "default_tol",
]

EPS = np.finfo(float).eps
# bisect until the bracket reaches the ulp floor
QUADRATURE_TOL = 1e-300
# eigenvalues closer than this (relative) share one invariant subspace
CLUSTER_GAP = 1e-9


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix with strictly positive off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("diag must be a non-empty vector")
        if e.shape != (d.size - 1,):
            raise ValueError(f"offdiag must have length {d.size - 1}, got {e.size}")
        if np.any(e <= 0):
            raise ValueError("offdiag entries must be strictly positive")
        d.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def __eq__(self, other):
        if not isinstance(other, TridiagonalMatrix):
            return NotImplemented
        return np.array_equal(self.diag, other.diag) and np.array_equal(self.offdiag, other.offdiag)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def drop_first(self) -> "TridiagonalMatrix":
        """Remove the top row and left column."""
        return TridiagonalMatrix(self.diag[1:], self.offdiag[1:])

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros(self.n)
        r[:-1] += self.offdiag
        r[1:] += self.offdiag
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))

    def matvec(self, v):
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Sorted zeros of ``p_n`` with the bisection bracket width of each."""

    n: int
    zeros: np.ndarray
    widths: np.ndarray

    @property
    def tol(self) -> float:
        return float(np.max(self.widths)) if self.n else 0.0

    def __post_init__(self):
        for name in ("zeros", "widths"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def nearest(self, x: float) -> tuple[float, float]:
        """Nearest zero to ``x`` and its bracket width."""
        i = int(np.argmin(np.abs(self.zeros - x)))
        return float(self.zeros[i]), float(self.widths[i])

    def rows(self):
        return [
            {"index": i + 1, "zero": float(z), "bracket_width": float(w)}
            for i, (z, w) in enumerate(zip(self.zeros, self.widths))
        ]


def truncate(seq: CoefficientSequence, n: int) -> TridiagonalMatrix:
    """Leading ``n x n`` block: ``diag = b(1..n)``, ``offdiag = a(1..n-1)``."""
    if n < 1:
        raise ValueError(f"truncation size must be >= 1, got {n}")
    return TridiagonalMatrix(seq.b_array(n), seq.a_array(n - 1))


def _pivmin(T: TridiagonalMatrix) -> float:
    lo, hi = T.gershgorin()
    return EPS * max(1.0, abs(lo), abs(hi))


def sturm_count(T: TridiagonalMatrix, t: float) -> int:
    """Number of eigenvalues of ``T`` strictly below ``t``."""
    guard = _pivmin(T)
    d = T.diag.tolist()
    e2 = (T.offdiag * T.offdiag).tolist()
    t = float(t)
    count = 0
    piv = d[0] - t
    for i in range(T.n):
        if i:
            piv = (d[i] - t) - e2[i - 1] / piv
        if abs(piv) < guard:
            piv = -guard if piv < 0 else guard
        if piv < 0:
            count += 1
    return count


def sturm_counts(T: TridiagonalMatrix, shifts) -> np.ndarray:
    """Vectorized :func:`sturm_count` over an array of shifts."""
    return leading_counts(T, shifts)[-1]


def leading_counts(T: TridiagonalMatrix, shifts) -> np.ndarray:
    """Counts below each shift for every leading block; row ``i`` is size ``i+1``.

    One factorization pass yields the inertia of all leading submatrices.
    """
    t = np.asarray(shifts, dtype=float)
    guard = _pivmin(T)
    d = T.diag
    e2 = T.offdiag * T.offdiag
    out = np.empty((T.n,) + t.shape, dtype=np.int64)
    count = np.zeros(t.shape, dtype=np.int64)
    piv = d[0] - t
    for i in range(T.n):
        if i:
            piv = (d[i] - t) - e2[i - 1] / piv
        small = np.abs(piv) < guard
        if np.any(small):
            piv = np.where(small, np.where(piv < 0, -guard, guard), piv)
        count = count + (piv < 0)
        out[i] = count
    return out


def default_tol(T: TridiagonalMatrix) -> float:
    lo, hi = T.gershgorin()
    return 1e-12 * max(1.0, abs(lo), abs(hi))


def eigenvalues(T: TridiagonalMatrix, tol: float | None = None) -> ZeroSet:
    """All eigenvalues by simultaneous bisection inside the Gershgorin interval.

    Each eigenvalue ``k`` keeps a bracket ``[lo_k, hi_k)`` with
    ``count(lo_k) <= k < count(hi_k)``; the midpoint is reported.
    """
    if tol is None:
        tol = default_tol(T)
    if not tol > 0:
        raise ValueError("tol must be positive")
    glo, ghi = T.gershgorin()
    pad = 2 * _pivmin(T) + 1e-14 * max(1.0, ghi - glo)
    n = T.n
    lo = np.full(n, glo - pad)
    hi = np.full(n, ghi + pad)
    k = np.arange(n)
    # floor on resolvable width: a couple of ulps at the bracket magnitude
    for _ in range(200):
        floor = 4 * EPS * np.maximum(np.abs(lo), np.abs(hi))
        active = (hi - lo) > np.maximum(tol, floor)
        if not np.any(active):
            break
        idx = np.nonzero(active)[0]
        mid = 0.5 * (lo[idx] + hi[idx])
        c = sturm_counts(T, mid)
        right = c > k[idx]
        hi[idx] = np.where(right, mid, hi[idx])
        lo[idx] = np.where(right, lo[idx], mid)
    return ZeroSet(n, 0.5 * (lo + hi), hi - lo)


@lru_cache(maxsize=4096)
def _cached_zeros(seq: CoefficientSequence, n: int, tol: float | None) -> ZeroSet:
    return eigenvalues(truncate(seq, n), tol)


def zeros(seq: CoefficientSequence, n: int, tol: float | None = None) -> ZeroSet:
    """Zeros of ``p_n`` for ``seq`` (cached per sequence, degree and tolerance)."""
    return _cached_zeros(seq, n, tol)


def bisect_eigenvalue(T: TridiagonalMatrix, lo: float, hi: float, tol: float | None = None) -> float:
    """The single eigenvalue in ``(lo, hi)``; raises if there is not exactly one."""
    if tol is None:
        tol = default_tol(T)
    c_lo = sturm_count(T, np.nextafter(lo, math.inf))
    c_hi = sturm_count(T, hi)
    if c_hi - c_lo != 1:
        raise ValueError(f"({lo}, {hi}) holds {c_hi - c_lo} eigenvalues, expected 1")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count(T, mid) > c_lo:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def count_zeros_in(seq: CoefficientSequence, n: int, lo: float, hi: float) -> int:
    """Number of zeros of ``p_n`` in the open interval ``(lo, hi)``."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    if n == 0:
        return 0
    T = truncate(seq, n)
    return sturm_count(T, hi) - sturm_count(T, np.nextafter(lo, math.inf))


def _twisted_pivots(T: TridiagonalMatrix, lam: np.ndarray):
    """Forward and backward ``LDL^T`` pivots of ``T - lam`` (one column per shift)."""
    n, m = T.n, lam.size
    guard = _pivmin(T)
    d = T.diag[:, None] - lam[None, :]
    e2 = (T.offdiag**2)[:, None]

    def fix(piv):
        return np.where(np.abs(piv) < guard, np.where(piv < 0, -guard, guard), piv)

    fwd = np.empty((n, m))
    bwd = np.empty((n, m))
    fwd[0] = fix(d[0])
    for j in range(1, n):
        fwd[j] = fix(d[j] - e2[j - 1] / fwd[j - 1])
    bwd[-1] = fix(d[-1])
    for j in range(n - 2, -1, -1):
        bwd[j] = fix(d[j] - e2[j] / bwd[j + 1])
    return fwd, bwd, fwd + bwd - d


def _twisted_vectors(T: TridiagonalMatrix, fwd, bwd, twist) -> np.ndarray:
    """Unit vectors solving ``(T - lam) z = gamma e_twist``, one per column."""
    n, m = fwd.shape
    e = T.offdiag[:, None]
    z = np.zeros((n, m))
    z[twist, np.arange(m)] = 1.0
    for j in range(n - 2, -1, -1):
        z[j] = np.where(j < twist, -(e[j] / fwd[j]) * z[j + 1], z[j])
    for j in range(1, n):
        z[j] = np.where(j > twist, -(e[j - 1] / bwd[j]) * z[j - 1], z[j])
    return z / np.linalg.norm(z, axis=0)


def _cluster_basis(T: TridiagonalMatrix, lam: np.ndarray) -> np.ndarray:
    """Ritz vectors for a cluster of numerically coincident eigenvalues.

    Twisted vectors at distinct twist indices span the cluster's invariant
    subspace; they are taken greedily in order of ``|gamma|`` and kept when
    independent of those already chosen.
    """
    k = lam.size
    sigma = np.array([lam.mean()])
    fwd, bwd, gamma = _twisted_pivots(T, sigma)
    order = np.argsort(np.abs(gamma[:, 0]))
    basis = []
    for r in order:
        v = _twisted_vectors(T, fwd, bwd, np.array([r]))[:, 0]
        for q in basis:
            v = v - (q @ v) * q
        norm = np.linalg.norm(v)
        if norm > 0.5:
            basis.append(v / norm)
            if len(basis) == k:
                break
    if len(basis) < k:
        # no independent twists found; fall back to a dense solve
        vals, vecs = np.linalg.eigh(T.dense())
        idx = np.argsort(np.abs(vals - sigma[0]))[:k]
        return vecs[:, np.sort(idx)]
    Q = np.array(basis).T
    H = Q.T @ np.column_stack([T.matvec(Q[:, i]) for i in range(k)])
    theta, Y = np.linalg.eigh(0.5 * (H + H.T))
    V = Q @ Y
    scale = max(1.0, *map(abs, T.gershgorin()))
    if theta[-1] - theta[0] <= 8 * k * EPS * scale:
        # indistinguishable nodes: rotate so the first components agree
        c = V[0].copy()
        target = np.full(k, np.linalg.norm(c) / math.sqrt(k))
        u = c - target
        if np.linalg.norm(u) > 0:
            u /= np.linalg.norm(u)
            V = V - 2.0 * np.outer(V @ u, u)
    return V


def eigenvectors(T: TridiagonalMatrix, lam) -> np.ndarray:
    """Unit eigenvectors (columns) for sorted eigenvalues ``lam``.

    Each vector comes from the twisted factorization of ``T - lam`` with the
    twist index minimizing ``|gamma_k|``, propagated outward from there.
    Unlike forward recurrence from the top, this stays accurate for
    eigenvectors localized deep in the matrix. Eigenvalues closer than
    ``CLUSTER_GAP`` (relative) are treated as one cluster and get an
    orthonormal Ritz basis of their joint invariant subspace.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(np.diff(lam) < 0):
        raise ValueError("eigenvalues must be sorted")
    fwd, bwd, gamma = _twisted_pivots(T, lam)
    z = _twisted_vectors(T, fwd, bwd, np.argmin(np.abs(gamma), axis=0))
    scale = max(1.0, *map(abs, T.gershgorin()))
    breaks = np.nonzero(np.diff(lam) > CLUSTER_GAP * scale)[0] + 1
    for group in np.split(np.arange(lam.size), breaks):
        if group.size > 1:
            z[:, group] = _cluster_basis(T, lam[group])
    # fix the sign so the first component is nonnegative (p_0 = 1 > 0)
    z *= np.where(z[0] < 0, -1.0, 1.0)
    return z


def gauss_quadrature(seq: CoefficientSequence, N: int, tol: float | None = QUADRATURE_TOL):
    """Gauss nodes and weights for the measure of ``seq``.

    Nodes are the zeros of ``p_N``, bisected to machine precision by
    default. The weight at a node is ``1 / sum_{j<N} p_j(x)^2``, i.e. the
    squared first component of the unit eigenvector, with ``p_j(x)`` taken
    from :func:`eigenvectors` as ``z_j / z_0``.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    nodes = zeros(seq, N, tol).zeros
    z = eigenvectors(truncate(seq, N), nodes)
    return nodes.copy(), z[0] ** 2
