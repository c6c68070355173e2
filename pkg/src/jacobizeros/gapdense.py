"""Zeros dense in a spectral gap.

The example Jacobi matrix has off-diagonal ``3, 1, 3, 1, ...`` and diagonal
equal to the dyadic ``beta(n)`` on the block ``2 n^2 <= k < 2 (n + 1)^2``.
Its spectrum is ``[-5, -1] u [1, 5]``, yet ``p_j`` with ``j = 2 (n + 1)^2 - 1``
has a zero within ``2 * 3**(-2n)`` of ``beta(n)``.

The trial vector behind that bound is ``phi_j = (p_0(0), ..., p_{j-1}(0))``
for the zero-diagonal period-(3, 1) family, whose entries are ``(-3)**k`` at
even index ``2k`` and zero at odd index. Since ``j`` is odd, ``p_j(0) = 0``
and the zero-diagonal truncation annihilates ``phi_j``; the only residual
comes from diagonal entries ``b_k != beta(n)``, i.e. ``k < 2 n^2``, where
``|b_k - beta(n)| < 2``. Hence

    ||(L_j - beta(n)) phi||^2 / ||phi||^2
        <= 4 sum_{k < n^2} 9^k / sum_{k < (n+1)^2} 9^k
        <= 4 * 9**(n^2 - (n+1)^2) = 4 * 3**(-4n - 2),

and a symmetric matrix with residual ``r`` for a unit vector has an
eigenvalue within ``r`` of the trial value, giving ``2 * 3**(-2n)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .coeffs import SupportModel, beta, beta_exact, make_section4, section4_block
from .tridiag import bisect_eigenvalue, sturm_count, truncate, zeros

__all__ = [
    "ExperimentRecord",
    "SpectrumReport",
    "discriminant",
    "bands",
    "phi_vector",
    "residual_vector",
    "residual_check",
    "run_gap_experiment",
    "gap_zero_cloud",
    "spectrum_report",
    "spectrum_check",
    "block_degree",
]

EXPERIMENT_TOL = 1e-12
FIELDS = ["n", "j", "beta_n", "nearest_zero", "distance", "bound", "residual_sq", "residual_bound", "pass"]


def block_degree(n: int) -> int:
    """Degree ``2 (n + 1)^2 - 1`` whose zero tracks ``beta(n)``."""
    if n < 1:
        raise ValueError(f"block index must be >= 1, got {n}")
    return 2 * (n + 1) ** 2 - 1


def discriminant(a1: float, a2: float, x: float) -> float:
    """Trace of the two-step transfer matrix for period-two ``a`` and zero ``b``."""
    if not a1 > 0 or not a2 > 0:
        raise ValueError("a1 and a2 must be positive")
    return (x * x - (a1 * a1 + a2 * a2)) / (a1 * a2)


def bands(a1: float, a2: float) -> SupportModel:
    """``{x : |discriminant(x)| <= 2}`` as a :class:`SupportModel`."""
    inner, outer = abs(a1 - a2), a1 + a2
    if inner == 0:
        return SupportModel(((-outer, outer),))
    return SupportModel(((-outer, -inner), (inner, outer)))


def phi_vector(j: int) -> list[int]:
    """``(p_0(0), ..., p_{j-1}(0))`` for the zero-diagonal (3, 1) family, exactly."""
    if j < 1 or j % 2 == 0:
        raise ValueError(f"phi_vector needs an odd positive length, got {j}")
    return [(-3) ** (i // 2) if i % 2 == 0 else 0 for i in range(j)]


def residual_vector(n: int) -> list[Fraction]:
    """Exact ``(L_j - beta(n)) phi_j`` for ``j = block_degree(n)``."""
    j = block_degree(n)
    seq = make_section4()
    phi = phi_vector(j)
    bn = beta_exact(n)
    out = []
    for k in range(1, j + 1):
        diag = beta_exact(section4_block(k)) - bn
        val = diag * phi[k - 1]
        if k > 1:
            val += Fraction(seq.a(k - 1)) * phi[k - 2]
        if k < j:
            val += Fraction(seq.a(k)) * phi[k]
        out.append(val)
    return out


def residual_check(n: int) -> tuple[float, float]:
    """``(||(L_j - beta(n)) phi||^2 / ||phi||^2, 4 * 3**(-4n))`` in exact arithmetic.

    Raises ``AssertionError`` if the residual exceeds the bound.
    """
    r = residual_vector(n)
    phi = phi_vector(block_degree(n))
    ratio = Fraction(sum(v * v for v in r)) / sum(p * p for p in phi)
    bound = Fraction(4, 3 ** (4 * n))
    if ratio > bound:
        raise AssertionError(f"residual {float(ratio)} exceeds {float(bound)} at n={n}")
    return float(ratio), float(bound)


@dataclass(frozen=True)
class ExperimentRecord:
    n: int
    j: int
    beta_n: float
    nearest_zero: float
    distance: float
    bound: float
    residual_sq: float
    residual_bound: float
    passed: bool

    def row(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


def experiment_record(n: int, tol: float = EXPERIMENT_TOL) -> ExperimentRecord:
    j = block_degree(n)
    bn = beta(n)
    zs = zeros(make_section4(), j, tol)
    x, width = zs.nearest(bn)
    dist = abs(x - bn)
    bound = 2.0 * 3.0 ** (-2 * n)
    res, res_bound = residual_check(n)
    # bracket width is charged against the bound
    ok = dist + width <= bound and res <= res_bound
    return ExperimentRecord(n, j, bn, x, dist, bound, res, res_bound, ok)


def run_gap_experiment(n_max: int = 5, tol: float = EXPERIMENT_TOL) -> list[ExperimentRecord]:
    """One record per block ``n = 1 .. n_max``."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return [experiment_record(n, tol) for n in range(1, n_max + 1)]


class ClassicalFactViolation(RuntimeError):
    """More than one zero of a single ``p_j`` found in the spectral gap."""


def gap_zero_cloud(j_max: int, lo: float = -1.0, hi: float = 1.0, tol: float = EXPERIMENT_TOL) -> list[tuple[int, float]]:
    """Gap zeros ``(j, x)`` of ``p_j`` in ``(lo, hi)`` for ``j = 1 .. j_max``."""
    if j_max < 1:
        raise ValueError(f"j_max must be >= 1, got {j_max}")
    seq = make_section4()
    full = truncate(seq, j_max)
    out = []
    for j in range(1, j_max + 1):
        T = truncate(seq, j) if j < j_max else full
        c = sturm_count(T, hi) - sturm_count(T, np.nextafter(lo, math.inf))
        if c > 1:
            raise ClassicalFactViolation(f"p_{j} has {c} zeros in ({lo}, {hi})")
        if c == 1:
            out.append((j, bisect_eigenvalue(T, lo, hi, tol)))
    return out


@dataclass(frozen=True)
class SpectrumReport:
    N: int
    tol: float
    below: int  # eigenvalues below -5 - tol
    above: int  # eigenvalues above 5 + tol
    in_gap: int  # eigenvalues in (-1 + tol, 1 - tol)
    endpoint_distance: dict  # band endpoint -> distance to nearest eigenvalue
    approach: float | None
    ok: bool


def _nearest_distance(T, x, start=1e-3, limit=10.0):
    """Distance from ``x`` to the nearest eigenvalue, to relative accuracy ~1e-9,
    from Sturm counts alone."""
    def count(r):
        return sturm_count(T, x + r) - sturm_count(T, np.nextafter(x - r, math.inf))

    r = start
    while count(r) == 0:
        r *= 2
        if r > limit:
            return math.inf
    lo, hi = 0.0, r
    while hi - lo > 1e-9 * hi:
        mid = 0.5 * (lo + hi)
        if count(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def spectrum_report(N: int, tol: float = 1e-6, approach: float | None = None) -> SpectrumReport:
    """Containment of the ``N``-truncation spectrum in ``[-5, -1] u [1, 5]``.

    At most one eigenvalue may sit in the gap. With ``approach`` set, every
    band endpoint ``-5, -1, 1, 5`` must also have an eigenvalue within it.
    """
    if N < 10:
        raise ValueError(f"N must be >= 10, got {N}")
    T = truncate(make_section4(), N)
    below = sturm_count(T, -5.0 - tol)
    above = N - sturm_count(T, np.nextafter(5.0 + tol, math.inf))
    in_gap = sturm_count(T, 1.0 - tol) - sturm_count(T, np.nextafter(-1.0 + tol, math.inf))
    dists = {e: _nearest_distance(T, float(e)) for e in (-5, -1, 1, 5)}
    ok = below == 0 and above == 0 and in_gap <= 1
    if approach is not None:
        ok = ok and all(d <= approach for d in dists.values())
    return SpectrumReport(N, tol, below, above, in_gap, dists, approach, ok)


def spectrum_check(N: int, tol: float = 1e-6) -> bool:
    """Containment check; from ``N = 2000`` on, band endpoints must be
    approached within 0.1 as well."""
    return spectrum_report(N, tol, 0.1 if N >= 2000 else None).ok
