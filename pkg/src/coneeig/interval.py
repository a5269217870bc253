"""Outward-rounded real intervals and rectangular complex intervals.

Rounding is directed without touching the FPU rounding mode. Every result
is first computed in round-to-nearest, then an error-free transformation
(TwoSum, Dekker's TwoProduct) tells us on which side of the exact value
the rounded result landed. The endpoint is kept when the result is exact or
already on the safe side, and moved one ulp outward otherwise. When the
error term cannot be trusted (overflow, underflow, infinities) we fall back
to an unconditional one-ulp nudge.

The kernels (``radd``, ``rmul``, ``cmul``, ...) work elementwise on numpy
arrays and on Python floats alike; ``Interval`` and ``CInterval`` are thin
immutable scalar wrappers around them, and ``coneeig.linalg`` uses the same
kernels on whole matrices.
"""

from __future__ import annotations

import decimal
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import DivisionByZeroInterval, ParseError

__all__ = [
    "Interval",
    "CInterval",
    "iv_add",
    "iv_sub",
    "iv_mul",
    "iv_div",
    "iv_sqr",
    "iv_sqrt",
    "iv_mag",
    "iv_mig",
    "iv_hull",
    "civ_add",
    "civ_sub",
    "civ_mul",
    "civ_div",
    "civ_conj",
    "civ_mag",
    "civ_hull",
]

INF = math.inf
MAX_FLOAT = sys.float_info.max

_SPLITTER = 134217729.0  # 2**27 + 1
# Dekker's product is error-free only away from overflow and underflow.
_SPLIT_LIMIT = 2.0**995
_PRODUCT_FLOOR = 2.0**-900


# ---------------------------------------------------------------------------
# error-free transformations
# ---------------------------------------------------------------------------


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    """Return ``(p, e)`` with ``a*b == p + e`` exactly, ``e`` NaN if unknown."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = al * bl - (((p - ah * bh) - al * bh) - ah * bl)
    ok = (
        (np.abs(a) < _SPLIT_LIMIT)
        & (np.abs(b) < _SPLIT_LIMIT)
        & ((np.abs(p) >= _PRODUCT_FLOOR) | (a == 0) | (b == 0))
    )
    return p, np.where(ok, e, np.nan)


def _down(v, err):
    # err carries the sign of (exact - v); NaN means "unknown".
    r = np.where(err >= 0, v, np.nextafter(v, -INF))
    return np.where(np.isnan(r), -INF, r)


def _up(v, err):
    r = np.where(err <= 0, v, np.nextafter(v, INF))
    return np.where(np.isnan(r), INF, r)


def _quot(a, b):
    """Quotient plus the sign of (exact - rounded), NaN when undecidable."""
    q = a / b
    p, e = _two_prod(q, b)
    d, de = _two_sum(a, -p)
    # a - q*b == d - e exactly when d is exact; its sign is that of d - e.
    sign = np.sign(d - e) * np.sign(b)
    return q, np.where((de == 0) & np.isfinite(q), sign, np.nan)


def _root(x):
    s = np.sqrt(x)
    p, e = _two_prod(s, s)
    d, de = _two_sum(x, -p)
    sign = np.sign(d - e)
    return s, np.where((de == 0) & np.isfinite(s), sign, np.nan)


def add_down(a, b):
    with np.errstate(all="ignore"):
        return _down(*_two_sum(a, b))


def add_up(a, b):
    with np.errstate(all="ignore"):
        return _up(*_two_sum(a, b))


def mul_down(a, b):
    with np.errstate(all="ignore"):
        return _down(*_two_prod(a, b))


def mul_up(a, b):
    with np.errstate(all="ignore"):
        return _up(*_two_prod(a, b))


def div_down(a, b):
    with np.errstate(all="ignore"):
        return _down(*_quot(a, b))


def div_up(a, b):
    with np.errstate(all="ignore"):
        return _up(*_quot(a, b))


def sqrt_up(x):
    with np.errstate(all="ignore"):
        return _up(*_root(x))


def sqrt_down(x):
    with np.errstate(all="ignore"):
        return _down(*_root(x))


def sum_up(values):
    """Upward-rounded left-to-right sum of a sequence of arrays/floats."""
    it = iter(values)
    acc = next(it)
    for v in it:
        acc = add_up(acc, v)
    return acc


# ---------------------------------------------------------------------------
# real interval kernels on (lo, hi) pairs
# ---------------------------------------------------------------------------


def radd(alo, ahi, blo, bhi):
    return add_down(alo, blo), add_up(ahi, bhi)


def rsub(alo, ahi, blo, bhi):
    return add_down(alo, -bhi), add_up(ahi, -blo)


def _product_hulls(a_ends, b_ends, pairs):
    """Endpoint products for several interval pairs in one vectorized pass.

    ``pairs`` lists (i, j): interval ``a_ends[i] * b_ends[j]``, where each
    entry of ``a_ends``/``b_ends`` is a (lo, hi) pair. Returns lo, hi stacked
    along a new leading axis, one row per pair.
    """
    arrs = np.broadcast_arrays(*(x for ab in a_ends for x in ab), *(x for ab in b_ends for x in ab))
    na = 2 * len(a_ends)
    left, right = [], []
    for i, j in pairs:
        alo, ahi = arrs[2 * i], arrs[2 * i + 1]
        blo, bhi = arrs[na + 2 * j], arrs[na + 2 * j + 1]
        left += [alo, alo, ahi, ahi]
        right += [blo, bhi, blo, bhi]
    with np.errstate(all="ignore"):
        p, e = _two_prod(np.stack(left), np.stack(right))
        lows, highs = _down(p, e), _up(p, e)
    shape = (len(pairs), 4) + lows.shape[1:]
    return lows.reshape(shape).min(axis=1), highs.reshape(shape).max(axis=1)


def rmul(alo, ahi, blo, bhi):
    lo, hi = _product_hulls([(alo, ahi)], [(blo, bhi)], [(0, 0)])
    return lo[0], hi[0]


def rscale(alo, ahi, s):
    """Multiply an interval by a point float ``s``."""
    with np.errstate(all="ignore"):
        p1, e1 = _two_prod(alo, s)
        p2, e2 = _two_prod(ahi, s)
        d1, d2, u1, u2 = _down(p1, e1), _down(p2, e2), _up(p1, e1), _up(p2, e2)
    return np.minimum(d1, d2), np.maximum(u1, u2)


def rdiv(alo, ahi, blo, bhi):
    if np.any((np.asarray(blo) <= 0) & (np.asarray(bhi) >= 0)):
        raise DivisionByZeroInterval("divisor interval contains 0")
    alo, ahi, blo, bhi = np.broadcast_arrays(alo, ahi, blo, bhi)
    with np.errstate(all="ignore"):
        q, e = _quot(np.stack([alo, alo, ahi, ahi]), np.stack([blo, bhi, blo, bhi]))
        return _down(q, e).min(axis=0), _up(q, e).max(axis=0)


def rsqr(lo, hi):
    with np.errstate(all="ignore"):
        pl, el = _two_prod(lo, lo)
        ph, eh = _two_prod(hi, hi)
        lo2d, lo2u, hi2d, hi2u = _down(pl, el), _up(pl, el), _down(ph, eh), _up(ph, eh)
    straddle = (lo < 0) & (hi > 0)
    new_lo = np.where(straddle, 0.0, np.minimum(lo2d, hi2d))
    new_hi = np.maximum(lo2u, hi2u)
    return new_lo, new_hi


def rmag(lo, hi):
    return np.maximum(np.abs(lo), np.abs(hi))


def rmig(lo, hi):
    return np.where(lo > 0, lo, np.where(hi < 0, -hi, 0.0))


# ---------------------------------------------------------------------------
# rectangle kernels on (re_lo, re_hi, im_lo, im_hi)
# ---------------------------------------------------------------------------


def cadd(a, b):
    return (*radd(a[0], a[1], b[0], b[1]), *radd(a[2], a[3], b[2], b[3]))


def csub(a, b):
    return (*rsub(a[0], a[1], b[0], b[1]), *rsub(a[2], a[3], b[2], b[3]))


def _is_real(a):
    return not (np.any(a[2]) or np.any(a[3]))


def cmul(a, b):
    if _is_real(b):
        lo, hi = _product_hulls([(a[0], a[1]), (a[2], a[3])], [(b[0], b[1])], [(0, 0), (1, 0)])
        return lo[0], hi[0], lo[1], hi[1]
    if _is_real(a):
        lo, hi = _product_hulls([(a[0], a[1])], [(b[0], b[1]), (b[2], b[3])], [(0, 0), (0, 1)])
        return lo[0], hi[0], lo[1], hi[1]
    lo, hi = _product_hulls(
        [(a[0], a[1]), (a[2], a[3])],
        [(b[0], b[1]), (b[2], b[3])],
        [(0, 0), (1, 1), (0, 1), (1, 0)],
    )
    # rr - ii, ri + ir
    return (*rsub(lo[0], hi[0], lo[1], hi[1]), *radd(lo[2], hi[2], lo[3], hi[3]))


def cconj(a):
    return a[0], a[1], -a[3], -a[2]


def cabs2(a):
    """Enclosure of |z|^2 = re^2 + im^2 over the rectangle (a real interval)."""
    return radd(*rsqr(a[0], a[1]), *rsqr(a[2], a[3]))


def cdiv(a, b):
    if _is_real(b):
        return (*rdiv(a[0], a[1], b[0], b[1]), *rdiv(a[2], a[3], b[0], b[1]))
    den_lo, den_hi = cabs2(b)
    if np.any(np.asarray(den_lo) <= 0):
        raise DivisionByZeroInterval("divisor rectangle may contain 0")
    num = cmul(a, cconj(b))
    return (*rdiv(num[0], num[1], den_lo, den_hi), *rdiv(num[2], num[3], den_lo, den_hi))


def cdiv_real(a, dlo, dhi):
    return (*rdiv(a[0], a[1], dlo, dhi), *rdiv(a[2], a[3], dlo, dhi))


def cmag_up(a):
    r = rmag(a[0], a[1])
    i = rmag(a[2], a[3])
    if not np.any(i):
        return r
    both = sqrt_up(add_up(mul_up(r, r), mul_up(i, i)))
    return np.where(i == 0, r, np.where(r == 0, i, both))


def cmig(a):
    """Distance from 0 to the rectangle (round-to-nearest; for pivot choice only)."""
    return np.hypot(rmig(a[0], a[1]), rmig(a[2], a[3]))


def ccontains_zero(a):
    return (a[0] <= 0) & (a[1] >= 0) & (a[2] <= 0) & (a[3] >= 0)


# ---------------------------------------------------------------------------
# scalar types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed real interval ``[lo, hi]`` with float endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"empty interval [{lo!r}, {hi!r}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x) -> Interval:
        return iv_hull(x)

    @property
    def width(self) -> float:
        return float(add_up(self.hi, -self.lo))

    @property
    def mid(self) -> float:
        # halving first avoids overflow; a point is returned as is so
        # subnormals survive
        if self.lo == self.hi:
            return self.lo
        return 0.5 * self.lo + 0.5 * self.hi

    def mag(self) -> float:
        return iv_mag(self)

    def mig(self) -> float:
        return iv_mig(self)

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, str):
            x = Fraction(x)
        # float/Fraction comparisons in Python are exact
        return self.lo <= x <= self.hi

    def intersect(self, other: Interval) -> Interval | None:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def hull(self, other: Interval) -> Interval:
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        return iv_add(self, _as_interval(other))

    __radd__ = __add__

    def __sub__(self, other):
        return iv_sub(self, _as_interval(other))

    def __rsub__(self, other):
        return iv_sub(_as_interval(other), self)

    def __mul__(self, other):
        return iv_mul(self, _as_interval(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return iv_div(self, _as_interval(other))

    def __rtruediv__(self, other):
        return iv_div(_as_interval(other), self)

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


@dataclass(frozen=True, slots=True)
class CInterval:
    """Axis-aligned complex rectangle ``re + im*i``."""

    re: Interval
    im: Interval

    @classmethod
    def from_rect(cls, rect) -> CInterval:
        return cls(Interval(rect[0], rect[1]), Interval(rect[2], rect[3]))

    @property
    def rect(self):
        return (self.re.lo, self.re.hi, self.im.lo, self.im.hi)

    @property
    def mid(self) -> complex:
        return complex(self.re.mid, self.im.mid)

    def mag(self) -> float:
        return civ_mag(self)

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def __contains__(self, z) -> bool:
        if isinstance(z, CInterval):
            return z.re in self.re and z.im in self.im
        if isinstance(z, tuple):
            return z[0] in self.re and z[1] in self.im
        z = complex(z)
        return z.real in self.re and z.imag in self.im

    def intersect(self, other: CInterval) -> CInterval | None:
        re = self.re.intersect(other.re)
        im = self.im.intersect(other.im)
        if re is None or im is None:
            return None
        return CInterval(re, im)

    def conj(self):
        return civ_conj(self)

    def __neg__(self):
        return CInterval(-self.re, -self.im)

    def __add__(self, other):
        return civ_add(self, civ_hull(other))

    __radd__ = __add__

    def __sub__(self, other):
        return civ_sub(self, civ_hull(other))

    def __rsub__(self, other):
        return civ_sub(civ_hull(other), self)

    def __mul__(self, other):
        return civ_mul(self, civ_hull(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return civ_div(self, civ_hull(other))

    def __rtruediv__(self, other):
        return civ_div(civ_hull(other), self)

    def __repr__(self):
        return f"CInterval(re={self.re!r}, im={self.im!r})"


def _iv(pair) -> Interval:
    return Interval(float(pair[0]), float(pair[1]))


def _as_interval(x) -> Interval:
    return x if isinstance(x, Interval) else iv_hull(x)


# ---------------------------------------------------------------------------
# public scalar operations
# ---------------------------------------------------------------------------


def iv_add(a: Interval, b: Interval) -> Interval:
    return _iv(radd(a.lo, a.hi, b.lo, b.hi))


def iv_sub(a: Interval, b: Interval) -> Interval:
    return _iv(rsub(a.lo, a.hi, b.lo, b.hi))


def iv_mul(a: Interval, b: Interval) -> Interval:
    return _iv(rmul(a.lo, a.hi, b.lo, b.hi))


def iv_div(a: Interval, b: Interval) -> Interval:
    """Quotient enclosure; raises DivisionByZeroInterval if ``0 in b``."""
    return _iv(rdiv(a.lo, a.hi, b.lo, b.hi))


def iv_sqr(a: Interval) -> Interval:
    return _iv(rsqr(a.lo, a.hi))


def iv_sqrt(a: Interval) -> Interval:
    if a.hi < 0:
        raise ValueError("sqrt of a negative interval")
    lo = max(a.lo, 0.0)
    return Interval(max(float(sqrt_down(lo)), 0.0), float(sqrt_up(a.hi)))


def iv_mag(a: Interval) -> float:
    """max{|x| : x in a}."""
    return max(abs(a.lo), abs(a.hi))


def iv_mig(a: Interval) -> float:
    """min{|x| : x in a}."""
    return float(rmig(a.lo, a.hi))


def civ_add(a: CInterval, b: CInterval) -> CInterval:
    return CInterval.from_rect([float(v) for v in cadd(a.rect, b.rect)])


def civ_sub(a: CInterval, b: CInterval) -> CInterval:
    return CInterval.from_rect([float(v) for v in csub(a.rect, b.rect)])


def civ_mul(a: CInterval, b: CInterval) -> CInterval:
    return CInterval.from_rect([float(v) for v in cmul(a.rect, b.rect)])


def civ_div(a: CInterval, b: CInterval) -> CInterval:
    """Rectangle enclosing a/b; requires re(b)^2 + im(b)^2 to exclude 0."""
    return CInterval.from_rect([float(v) for v in cdiv(a.rect, b.rect)])


def civ_conj(a: CInterval) -> CInterval:
    return CInterval(a.re, -a.im)


def civ_mag(a: CInterval) -> float:
    """Upper bound on sup{|z| : z in a}."""
    return float(cmag_up(a.rect))


# ---------------------------------------------------------------------------
# hulls
# ---------------------------------------------------------------------------


def _hull_rational(q: Fraction) -> Interval:
    try:
        f = float(q)
    except OverflowError:
        return Interval(MAX_FLOAT, INF) if q > 0 else Interval(-INF, -MAX_FLOAT)
    exact = Fraction(f)
    if exact == q:
        return Interval(f, f)
    if exact < q:
        return Interval(f, math.nextafter(f, INF))
    return Interval(math.nextafter(f, -INF), f)


def iv_hull(x) -> Interval:
    """Tightest float interval containing ``x``.

    ``x`` may be a float, an int, a Fraction/Decimal, or a decimal string such
    as ``"0.4"``; strings are read as exact rationals, so ``"0.4"`` gives a
    one-ulp interval around 2/5 rather than the float nearest to it.
    """
    if isinstance(x, Interval):
        return x
    if isinstance(x, str):
        try:
            q = Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a decimal number: {x!r}") from exc
        return _hull_rational(q)
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (float, np.floating)):
        f = float(x)
        if math.isnan(f):
            raise ParseError("NaN has no interval hull")
        if math.isinf(f):
            # an overflowed literal: everything beyond the largest float
            return Interval(MAX_FLOAT, INF) if f > 0 else Interval(-INF, -MAX_FLOAT)
        return Interval(f, f)
    if isinstance(x, (int, np.integer)):
        return _hull_rational(Fraction(int(x)))
    if isinstance(x, Rational):
        return _hull_rational(Fraction(x))
    if isinstance(x, decimal.Decimal):
        if not x.is_finite():
            raise ParseError(f"non-finite decimal {x}")
        return _hull_rational(Fraction(x))
    raise TypeError(f"cannot build an interval from {type(x).__name__}")


def civ_hull(z) -> CInterval:
    """Rectangle hull of a complex value, a real value, or a ``(re, im)`` pair."""
    if isinstance(z, CInterval):
        return z
    if isinstance(z, Interval):
        return CInterval(z, Interval(0.0, 0.0))
    if isinstance(z, tuple) and len(z) == 2:
        return CInterval(iv_hull(z[0]), iv_hull(z[1]))
    if isinstance(z, (complex, np.complexfloating)):
        return CInterval(iv_hull(float(z.real)), iv_hull(float(z.imag)))
    return CInterval(iv_hull(z), Interval(0.0, 0.0))
