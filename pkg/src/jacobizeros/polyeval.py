"""Evaluation of orthonormal polynomials and the reproducing kernel.

Values of ``p_n`` grow geometrically off the support (``p_{2n}(0) = (-3)^n``
for the period-(3, 1) family), so the recurrence keeps a running scale: the
pair ``(p_k, p_{k+1})`` is renormalized whenever its larger magnitude leaves
``[exp(-64), exp(64)]`` and the log factor is accumulated. Ratios and signs
are exact up to rounding, which is all the certificate checks need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering

import numpy as np

from .coeffs import CoefficientSequence, strip

__all__ = [
    "ScaledPolyValue",
    "KernelValue",
    "KernelOverflowError",
    "scaled_values",
    "eval_p",
    "eval_q",
    "eval_p_exact",
    "eval_p_plain",
    "leading_coeff",
    "log_kernel_diag",
    "kernel_direct",
    "kernel_cd",
]

RESCALE_LOG = 64.0
_HI = math.exp(RESCALE_LOG)
_LO = math.exp(-RESCALE_LOG)


class KernelOverflowError(OverflowError):
    """Raised when a kernel cannot be formed in plain floating point."""


@total_ordering
@dataclass(frozen=True)
class ScaledPolyValue:
    """``sign * exp(log_mag)``; ``sign == 0`` marks an exact zero."""

    sign: int
    log_mag: float
    # the unrescaled float, kept when no renormalization happened
    plain: float | None = field(default=None, compare=False, repr=False)

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.plain is not None:
            return self.plain
        if self.log_mag > 709.0:
            return math.copysign(math.inf, self.sign)
        return self.sign * math.exp(self.log_mag)

    def _key(self):
        if self.sign > 0:
            return (1, self.log_mag)
        if self.sign < 0:
            return (-1, -self.log_mag)
        return (0, 0.0)

    def __lt__(self, other):
        if not isinstance(other, ScaledPolyValue):
            return NotImplemented
        return self._key() < other._key()

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class KernelValue:
    value: float
    n: int
    x: float
    y: float

    def __float__(self):
        return self.value


def scaled_values(seq: CoefficientSequence, x, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Signs and log-magnitudes of ``p_0 .. p_n`` at every point of ``x``.

    Returns two arrays of shape ``(n + 1,) + np.shape(x)``; ``log|p_j|`` is
    ``-inf`` where ``p_j`` vanishes exactly.
    """
    mant, logs = _scaled_parts(seq, x, n)
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(mant)) + logs
    return np.sign(mant).astype(int), logmag


def _scaled_parts(seq, x, n):
    """Mantissas and accumulated log scale factors of ``p_0 .. p_n``."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    a = seq.a_array(n)
    b = seq.b_array(n)
    shape = (n + 1,) + x.shape
    mant = np.empty(shape)
    logs = np.zeros(shape)
    prev = np.zeros(x.shape)
    cur = np.ones(x.shape)
    scale = np.zeros(x.shape)
    mant[0] = cur
    for k in range(n):
        off = a[k - 1] if k > 0 else 0.0
        nxt = ((x - b[k]) * cur - off * prev) / a[k]
        prev, cur = cur, nxt
        big = np.maximum(np.abs(cur), np.abs(prev))
        redo = (big > _HI) | ((big < _LO) & (big > 0))
        if np.any(redo):
            s = np.where(redo, big, 1.0)
            cur = cur / s
            prev = prev / s
            scale = scale + np.log(s)
            # previous entry was stored before this renormalization
        mant[k + 1] = cur
        logs[k + 1] = scale
    return mant, logs


def eval_p(seq: CoefficientSequence, x: float, n: int) -> list[ScaledPolyValue]:
    """``p_0(x), ..., p_n(x)`` in overflow-safe form.

    >>> from jacobizeros.coeffs import make_constant
    >>> [v.value for v in eval_p(make_constant(1, 0), 0.0, 2)]
    [1.0, 0.0, -1.0]
    """
    mant, logs = _scaled_parts(seq, float(x), n)
    out = []
    for m, s in zip(mant.tolist(), logs.tolist()):
        if m == 0:
            out.append(ScaledPolyValue(0, -math.inf))
        else:
            out.append(ScaledPolyValue(1 if m > 0 else -1, math.log(abs(m)) + s, m if s == 0 else None))
    return out


def eval_q(seq: CoefficientSequence, x: float, n: int) -> list[ScaledPolyValue]:
    """Second-kind polynomials: orthonormal polynomials of ``strip(seq)``."""
    return eval_p(strip(seq), x, n)


def eval_p_plain(seq: CoefficientSequence, x, n: int) -> np.ndarray:
    """Unscaled recurrence; entries may overflow to ``inf``."""
    x = np.asarray(x, dtype=float)
    a = seq.a_array(n)
    b = seq.b_array(n)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    prev = np.zeros(x.shape)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n):
            off = a[k - 1] if k > 0 else 0.0
            out[k + 1] = ((x - b[k]) * out[k] - off * prev) / a[k]
            prev = out[k]
    return out


def eval_p_exact(seq: CoefficientSequence, x, n: int) -> list[Fraction]:
    """Rational-arithmetic recurrence (coefficients taken as exact binary floats)."""
    x = Fraction(x)
    vals = [Fraction(1)]
    prev = Fraction(0)
    for k in range(1, n + 1):
        off = Fraction(seq.a(k - 1)) if k > 1 else Fraction(0)
        nxt = ((x - Fraction(seq.b(k))) * vals[-1] - off * prev) / Fraction(seq.a(k))
        prev = vals[-1]
        vals.append(nxt)
    return vals


def leading_coeff(seq: CoefficientSequence, n: int) -> float:
    """``log gamma_n = -sum_{k<=n} log a_k``."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    return -math.fsum(math.log(seq.a(k)) for k in range(1, n + 1))


def log_kernel_diag(seq: CoefficientSequence, x, n: int) -> np.ndarray:
    """``log K_m(x, x)`` for every ``m = 0 .. n`` (leading axis)."""
    _, logmag = scaled_values(seq, x, n)
    return np.logaddexp.accumulate(2.0 * logmag, axis=0)


def _plain_checked(seq, x, n):
    vals = eval_p_plain(seq, x, n)
    if not np.all(np.isfinite(vals)) or np.max(np.abs(vals)) > 1e150:
        raise KernelOverflowError(
            f"|p_j({x})| leaves the representable range for j <= {n}; reduce n"
        )
    return vals


def kernel_direct(seq: CoefficientSequence, x: float, y: float, n: int) -> KernelValue:
    """``K_n(x, y) = sum_{j=0}^n p_j(x) p_j(y)`` with compensated summation."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    px = _plain_checked(seq, x, n)
    py = px if y == x else _plain_checked(seq, y, n)
    return KernelValue(math.fsum((px * py).tolist()), n, float(x), float(y))


def kernel_cd(seq: CoefficientSequence, x: float, y: float, n: int) -> KernelValue:
    """Two-term Christoffel-Darboux form of ``K_n(x, y)``.

    Rejects ``|x - y| < 1e-12 (1 + |x|)``; the confluent limit is not provided.
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if abs(x - y) < 1e-12 * (1 + abs(x)):
        raise ValueError("kernel_cd needs x != y; use kernel_direct on the diagonal")
    px = _plain_checked(seq, x, n + 1)
    py = _plain_checked(seq, y, n + 1)
    num = px[n + 1] * py[n] - py[n + 1] * px[n]
    return KernelValue(seq.a(n + 1) * num / (x - y), n, float(x), float(y))
