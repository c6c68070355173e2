"""Jacobi recurrence coefficient sequences.

A :class:`CoefficientSequence` stands in for the orthogonality measure: it
yields the off-diagonal entries ``a(n) > 0`` and diagonal entries ``b(n)``
(``n >= 1``) of the Jacobi matrix, with the orthonormal polynomials obeying

    x p_n(x) = a_{n+1} p_{n+1}(x) + b_{n+1} p_n(x) + a_n p_{n-1}(x).

Sequences are immutable and hashable by ``(kind, params)``, so downstream
results (truncation eigenvalues in particular) can be cached per sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

import numpy as np

__all__ = [
    "SupportModel",
    "CoefficientSequence",
    "make_constant",
    "make_periodic2",
    "make_section4",
    "make_rank_one",
    "make_explicit",
    "strip",
    "beta",
    "beta_exact",
    "section4_block",
    "to_json",
    "from_json",
    "parse_family",
]


@dataclass(frozen=True)
class SupportModel:
    """Finite union of closed intervals plus isolated points.

    Intervals must be sorted and pairwise disjoint; points must not sit
    inside an interval. Use :meth:`from_pieces` to merge overlapping input.
    """

    intervals: tuple = ()
    points: tuple = ()

    def __post_init__(self):
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        pts = tuple(sorted(float(p) for p in self.points))
        for lo, hi in ivs:
            if not lo <= hi:
                raise ValueError(f"interval [{lo}, {hi}] has lo > hi")
        for (_, hi0), (lo1, _) in zip(ivs, ivs[1:]):
            if not hi0 < lo1:
                raise ValueError("intervals must be sorted and disjoint")
        for p in pts:
            if any(lo < p < hi for lo, hi in ivs):
                raise ValueError(f"point {p} lies inside an interval")
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_pieces(cls, intervals=(), points=()) -> "SupportModel":
        """Build a model from possibly overlapping intervals, merging as needed."""
        merged: list[list[float]] = []
        for lo, hi in sorted((float(lo), float(hi)) for lo, hi in intervals):
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        pts = [p for p in points if not any(lo <= p <= hi for lo, hi in merged)]
        return cls(tuple(map(tuple, merged)), tuple(sorted(set(pts))))

    def dist(self, x: float) -> float:
        """Euclidean distance from ``x`` to the union (0 inside it)."""
        best = math.inf
        for lo, hi in self.intervals:
            best = min(best, max(lo - x, x - hi, 0.0))
        for p in self.points:
            best = min(best, abs(x - p))
        return best

    def contains(self, x: float) -> bool:
        return self.dist(x) == 0.0

    def gaps(self) -> list[tuple[float, float]]:
        """Bounded open gaps between consecutive pieces."""
        pieces = sorted(list(self.intervals) + [(p, p) for p in self.points])
        return [(h, l) for (_, h), (l, _) in zip(pieces, pieces[1:]) if h < l]

    def to_dict(self) -> dict:
        return {"intervals": [list(iv) for iv in self.intervals], "points": list(self.points)}

    def __str__(self) -> str:
        parts = [f"[{lo:g}, {hi:g}]" for lo, hi in self.intervals]
        parts += [f"{{{p:g}}}" for p in self.points]
        return " u ".join(parts) if parts else "{}"


@dataclass(frozen=True)
class CoefficientSequence:
    """Recurrence coefficients ``a(n)``, ``b(n)`` for ``n >= 1``.

    ``known_support`` is informational metadata only; certificate checks take
    the support model as an explicit argument.
    """

    kind: str
    params: tuple
    a_func: Callable[[int], float] = field(compare=False, repr=False)
    b_func: Callable[[int], float] = field(compare=False, repr=False)
    known_support: Optional[SupportModel] = field(default=None, compare=False)

    def a(self, n: int) -> float:
        if n < 1:
            raise ValueError(f"coefficient index must be >= 1, got {n}")
        val = self.a_func(n)
        if not val > 0:
            raise ValueError(f"a({n}) = {val} is not positive")
        return val

    def b(self, n: int) -> float:
        if n < 1:
            raise ValueError(f"coefficient index must be >= 1, got {n}")
        return self.b_func(n)

    def a_array(self, n: int) -> np.ndarray:
        """``a(1), ..., a(n)`` as a float array."""
        return np.array([self.a(k) for k in range(1, n + 1)], dtype=float)

    def b_array(self, n: int) -> np.ndarray:
        """``b(1), ..., b(n)`` as a float array."""
        return np.array([self.b(k) for k in range(1, n + 1)], dtype=float)

    def __str__(self) -> str:
        return format_family(self)


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def make_constant(a: float, b: float) -> CoefficientSequence:
    """Free Jacobi family: ``a(n) = a``, ``b(n) = b``; support ``[b - 2a, b + 2a]``."""
    a = _positive("a", a)
    b = float(b)
    return CoefficientSequence(
        "constant",
        (a, b),
        lambda n: a,
        lambda n: b,
        SupportModel(((b - 2 * a, b + 2 * a),)),
    )


def make_periodic2(a1: float, a2: float, b: float) -> CoefficientSequence:
    """Period-two off-diagonal ``a1, a2, a1, ...`` with constant diagonal ``b``."""
    a1 = _positive("a1", a1)
    a2 = _positive("a2", a2)
    b = float(b)
    inner, outer = abs(a1 - a2), a1 + a2
    if inner == 0.0:
        support = SupportModel(((b - outer, b + outer),))
    else:
        # p_{2n}(b) = (-a1/a2)^n is square-summable iff a1 < a2, and by the
        # x -> 2b - x symmetry that is the only possible gap eigenvalue
        points = (b,) if a1 < a2 else ()
        support = SupportModel(((b - outer, b - inner), (b + inner, b + outer)), points)
    return CoefficientSequence(
        "periodic2",
        (a1, a2, b),
        lambda n: a1 if n % 2 == 1 else a2,
        lambda n: b,
        support,
    )


def _level_of(n: int) -> tuple[int, int]:
    """Return ``(k, offset)`` with ``beta(n) = (offset - (2**k - 1)) / 2**k``."""
    m = n - 2
    k = 1
    while m >= 2 ** (k + 1) - 1:
        m -= 2 ** (k + 1) - 1
        k += 1
    return k, m


def beta_exact(n: int) -> Fraction:
    """Dyadic enumeration: 0, then level k = 1, 2, ... lists j / 2**k for
    j = -(2**k - 1), ..., 2**k - 1 in increasing order."""
    if n < 1:
        raise ValueError(f"beta index must be >= 1, got {n}")
    if n == 1:
        return Fraction(0)
    k, m = _level_of(n)
    return Fraction(m - (2**k - 1), 2**k)


def beta(n: int) -> float:
    return float(beta_exact(n))


def section4_block(k: int) -> int:
    """Block index ``n`` with ``2 n^2 <= k < 2 (n + 1)^2``; ``k = 1`` maps to 1."""
    if k < 1:
        raise ValueError(f"coefficient index must be >= 1, got {k}")
    if k == 1:
        return 1
    n = math.isqrt(k // 2)
    while 2 * (n + 1) ** 2 <= k:
        n += 1
    while 2 * n * n > k:
        n -= 1
    return n


def make_section4() -> CoefficientSequence:
    """Gap-dense example: ``a = 3, 1, 3, 1, ...`` and ``b`` constant equal to
    ``beta(n)`` on each block ``[2 n^2, 2 (n + 1)^2)``."""
    return CoefficientSequence(
        "section4",
        (),
        lambda n: 3.0 if n % 2 == 1 else 1.0,
        lambda k: beta(section4_block(k)),
        SupportModel(((-5.0, -1.0), (1.0, 5.0))),
    )


def make_rank_one(base: CoefficientSequence, b1_new: float) -> CoefficientSequence:
    """Replace ``b(1)`` of ``base``; the support metadata is dropped."""
    b1_new = float(b1_new)
    if b1_new == base.b(1):
        return base
    return CoefficientSequence(
        "rank_one",
        (base, b1_new),
        base.a_func,
        lambda n: b1_new if n == 1 else base.b_func(n),
        None,
    )


def make_explicit(a: Sequence[float], b: Sequence[float]) -> CoefficientSequence:
    """Finite coefficient lists; queries past their length raise ``IndexError``."""
    a = tuple(float(v) for v in a)
    b = tuple(float(v) for v in b)
    for i, v in enumerate(a, 1):
        _positive(f"a[{i}]", v)

    def lookup(values, name):
        def get(n):
            if n > len(values):
                raise IndexError(f"explicit sequence has no {name}({n}); length {len(values)}")
            return values[n - 1]

        return get

    return CoefficientSequence("explicit", (a, b), lookup(a, "a"), lookup(b, "b"), None)


def strip(seq: CoefficientSequence) -> CoefficientSequence:
    """Second-kind coefficients: ``a(n) -> seq.a(n + 1)``, ``b(n) -> seq.b(n + 1)``."""
    if seq.kind in ("constant",):
        return seq
    if seq.kind == "rank_one":
        return strip(seq.params[0])
    return CoefficientSequence(
        "strip",
        (seq,),
        lambda n: seq.a_func(n + 1),
        lambda n: seq.b_func(n + 1),
        None,
    )


# --- serialization ---------------------------------------------------------

_KEYS = {
    "constant": {"a", "b"},
    "periodic2": {"a1", "a2", "b"},
    "section4": set(),
    "rank_one": {"base", "b1"},
    "explicit": {"a", "b"},
    "strip": {"base"},
}


def to_json(seq: CoefficientSequence) -> dict[str, Any]:
    kind, p = seq.kind, seq.params
    if kind == "constant":
        return {"kind": kind, "a": p[0], "b": p[1]}
    if kind == "periodic2":
        return {"kind": kind, "a1": p[0], "a2": p[1], "b": p[2]}
    if kind == "section4":
        return {"kind": kind}
    if kind == "rank_one":
        return {"kind": kind, "base": to_json(p[0]), "b1": p[1]}
    if kind == "explicit":
        return {"kind": kind, "a": list(p[0]), "b": list(p[1])}
    if kind == "strip":
        return {"kind": kind, "base": to_json(p[0])}
    raise ValueError(f"unknown sequence kind {kind!r}")


def from_json(obj: dict[str, Any]) -> CoefficientSequence:
    """Inverse of :func:`to_json`. Unknown kinds or extra keys raise ``ValueError``."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("family spec must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind not in _KEYS:
        raise ValueError(f"unknown family kind {kind!r}")
    extra = set(obj) - _KEYS[kind] - {"kind"}
    missing = _KEYS[kind] - set(obj)
    if extra:
        raise ValueError(f"unexpected fields for {kind}: {sorted(extra)}")
    if missing:
        raise ValueError(f"missing fields for {kind}: {sorted(missing)}")
    if kind == "constant":
        return make_constant(obj["a"], obj["b"])
    if kind == "periodic2":
        return make_periodic2(obj["a1"], obj["a2"], obj["b"])
    if kind == "section4":
        return make_section4()
    if kind == "rank_one":
        return make_rank_one(from_json(obj["base"]), obj["b1"])
    if kind == "explicit":
        if len(obj["a"]) < len(obj["b"]) - 1:
            raise ValueError("explicit family needs len(a) >= len(b) - 1")
        return make_explicit(obj["a"], obj["b"])
    return strip(from_json(obj["base"]))


def _numbers(text: str, count: int, kind: str) -> list[float]:
    parts = [t for t in text.split(",")] if text else []
    if len(parts) != count:
        raise ValueError(f"{kind} expects {count} comma-separated numbers, got {text!r}")
    try:
        return [float(t) for t in parts]
    except ValueError as exc:
        raise ValueError(f"bad number in {kind} spec {text!r}") from exc


def parse_family(text: str) -> CoefficientSequence:
    """Parse the command-line mini-language.

    ``constant:A,B``, ``periodic2:A1,A2,B``, ``section4``,
    ``rank_one:B1@<base>``, ``strip:<base>``, ``explicit:a1,a2,...;b1,b2,...``
    or a JSON object.
    """
    text = text.strip()
    if text.startswith("{"):
        import json

        try:
            return from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON family spec: {exc}") from exc
    kind, _, rest = text.partition(":")
    if kind == "constant":
        return make_constant(*_numbers(rest, 2, kind))
    if kind == "periodic2":
        return make_periodic2(*_numbers(rest, 3, kind))
    if kind == "section4":
        if rest:
            raise ValueError("section4 takes no parameters")
        return make_section4()
    if kind == "rank_one":
        b1, sep, base = rest.partition("@")
        if not sep:
            raise ValueError("rank_one spec is rank_one:B1@<base family>")
        return make_rank_one(parse_family(base), *_numbers(b1, 1, kind))
    if kind == "strip":
        return strip(parse_family(rest))
    if kind == "explicit":
        a_txt, sep, b_txt = rest.partition(";")
        if not sep:
            raise ValueError("explicit spec is explicit:a1,a2,...;b1,b2,...")
        a = [float(t) for t in a_txt.split(",") if t]
        b = [float(t) for t in b_txt.split(",") if t]
        return from_json({"kind": "explicit", "a": a, "b": b})
    raise ValueError(f"unknown family {text!r}")


def format_family(seq: CoefficientSequence) -> str:
    """Mini-language form of ``seq`` (round-trips through :func:`parse_family`)."""
    kind, p = seq.kind, seq.params
    if kind == "constant":
        return f"constant:{p[0]!r},{p[1]!r}"
    if kind == "periodic2":
        return f"periodic2:{p[0]!r},{p[1]!r},{p[2]!r}"
    if kind == "section4":
        return "section4"
    if kind == "rank_one":
        return f"rank_one:{p[1]!r}@{format_family(p[0])}"
    if kind == "strip":
        return f"strip:{format_family(p[0])}"
    return "explicit:" + ",".join(map(repr, p[0])) + ";" + ",".join(map(repr, p[1]))
