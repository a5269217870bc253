"""Reading and writing matrices, polynomials and interval endpoints.

Matrix files are JSON objects::

    {"n": 2, "entries": [[{"re": 1, "im": 0}, {"re": "0.4", "im": 0}], ...]}

An entry part may be a number (taken as that exact double), a decimal
string (hulled, so "0.4" becomes the tightest interval around 0.4), or an
endpoint pair ``{"lo": ..., "hi": ...}``. A bare number or string stands
for a real entry. Polynomial files are JSON arrays of coefficients in the
same entry syntax, constant term first.

Endpoints are written as decimal strings rounded outward, so a box read
back from a certificate still contains the box that was computed.
"""

from __future__ import annotations

import json
import math
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, ParseError
from .interval import CInterval, Interval, iv_hull
from .linalg import IMatrix

__all__ = [
    "parse_matrix",
    "load_matrix",
    "dump_matrix",
    "parse_poly",
    "load_poly",
    "dec_down",
    "dec_up",
    "interval_to_json",
    "interval_from_json",
    "box_to_json",
    "box_from_json",
    "mid_rem",
    "box_text",
]

_FLOOR = Context(prec=17, rounding=ROUND_FLOOR)
_CEIL = Context(prec=17, rounding=ROUND_CEILING)


def _part(v) -> Interval:
    if isinstance(v, dict):
        if set(v) != {"lo", "hi"}:
            raise ParseError(f"endpoint object needs exactly 'lo' and 'hi': {v!r}")
        lo, hi = _part(v["lo"]).lo, _part(v["hi"]).hi
        if not lo <= hi:
            raise ParseError(f"empty interval {v!r}")
        return Interval(lo, hi)
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise ParseError(f"expected a number or decimal string, got {v!r}")
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return Interval(math.inf, math.inf)
        if s in ("-inf", "-infinity"):
            return Interval(-math.inf, -math.inf)
    elif isinstance(v, float) and not math.isfinite(v):
        raise ParseError(f"non-finite entry {v!r}")
    return iv_hull(v)


def _entry(v) -> CInterval:
    if isinstance(v, dict) and ("re" in v or "im" in v):
        extra = set(v) - {"re", "im"}
        if extra:
            raise ParseError(f"unknown keys {sorted(extra)} in entry")
        return CInterval(_part(v.get("re", 0)), _part(v.get("im", 0)))
    return CInterval(_part(v), Interval(0.0, 0.0))


def _json(text_or_obj):
    if isinstance(text_or_obj, (str, bytes)):
        try:
            return json.loads(text_or_obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    return text_or_obj


def parse_matrix(doc) -> IMatrix:
    """Matrix from JSON text or an already-decoded object."""
    doc = _json(doc)
    if not isinstance(doc, dict) or "entries" not in doc:
        raise ParseError("matrix document must be an object with 'entries'")
    rows = doc["entries"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError("'entries' must be a non-empty list of rows")
    n = doc.get("n", len(rows))
    if isinstance(n, bool) or not isinstance(n, int) or n != len(rows):
        raise ParseError(f"'n' = {n!r} does not match {len(rows)} rows")
    if any(len(r) != n for r in rows):
        raise DimensionMismatch(f"matrix is not {n}x{n}")
    boxes = [[_entry(v) for v in r] for r in rows]
    return IMatrix.hull(boxes)


def load_matrix(path) -> IMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def dump_matrix(m) -> str:
    """JSON for a point matrix; floats are written so they read back bit-exactly."""
    if isinstance(m, IMatrix):
        if not m.is_point():
            raise ValueError("only point matrices can be dumped; use certificates for boxes")
        m = m.mid()
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"need a square matrix, got {a.shape}")
    entries = [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in a]
    return json.dumps({"n": a.shape[0], "entries": entries})


def parse_poly(doc) -> list:
    """Coefficient list (constant first) as exact ``(re, im)`` Fractions.

    Endpoint pairs are rejected: coefficients must be single numbers.
    """
    from .polyroot import exact_complex

    doc = _json(doc)
    if not isinstance(doc, list) or len(doc) < 2:
        raise ParseError("polynomial must be a JSON array of at least two coefficients")
    out = []
    for c in doc:
        if isinstance(c, dict):
            if set(c) - {"re", "im"} or not c:
                raise ParseError(f"bad coefficient {c!r}")
            for part in c.values():
                if isinstance(part, bool) or not isinstance(part, (int, float, str)):
                    raise ParseError(f"bad coefficient {c!r}")
        elif isinstance(c, bool) or not isinstance(c, (int, float, str)):
            raise ParseError(f"bad coefficient {c!r}")
        if isinstance(c, float) and not math.isfinite(c):
            raise ParseError(f"non-finite coefficient {c!r}")
        out.append(exact_complex(c))
    return out


def load_poly(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return parse_poly(fh.read())


def _dec(x: float, ctx: Context) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    short = repr(x)
    if Fraction(short) == Fraction(x):
        return short
    # 17 significant digits land strictly between x and its outward
    # neighbour, so reading back widens by at most one ulp
    return str(ctx.plus(Decimal(x)))


def dec_down(x: float) -> str:
    """Decimal string whose value is <= x, and > the next double below x."""
    return _dec(x, _FLOOR)


def dec_up(x: float) -> str:
    """Decimal string whose value is >= x, and < the next double above x."""
    return _dec(x, _CEIL)


def interval_to_json(iv: Interval) -> dict:
    return {"lo": dec_down(iv.lo), "hi": dec_up(iv.hi)}


def interval_from_json(d) -> Interval:
    return _part(d)


def box_to_json(z: CInterval) -> dict:
    return {"re": interval_to_json(z.re), "im": interval_to_json(z.im)}


def box_from_json(d) -> CInterval:
    return _entry(d)


def _fixed(q: Fraction, exp: int) -> str:
    # q is an integer multiple of 10**exp
    d = Decimal(int(q / Fraction(10) ** exp)).scaleb(exp)
    return format(d, "f") if -30 < exp < 20 else str(d)


def mid_rem(iv: Interval, digits: int = 2) -> str:
    """Base plus remainder range, e.g. ``5.56625+[46,81]e-7``.

    The range is rounded outward, so the printed set contains ``iv``.
    ``digits`` is roughly how many digits the remainder bounds carry.
    """
    lo, hi = iv.lo, iv.hi
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return f"[{dec_down(lo)},{dec_up(hi)}]"
    if lo == hi:
        return dec_down(lo) if Fraction(dec_down(lo)) == Fraction(lo) else f"[{dec_down(lo)},{dec_up(hi)}]"
    flo, fhi = Fraction(lo), Fraction(hi)
    width = fhi - flo
    p = math.floor(math.log10(width)) - (digits - 1)
    unit = Fraction(10) ** p
    top = unit * 10**digits
    mid = (flo + fhi) / 2
    base = Fraction(math.trunc(mid / top)) * top
    lo_u = math.floor((flo - base) / unit)
    hi_u = math.ceil((fhi - base) / unit)
    if base == 0:
        return f"[{lo_u},{hi_u}]e{p}"
    return f"{_fixed(base, p + digits)}+[{lo_u},{hi_u}]e{p}"


def box_text(z: CInterval) -> str:
    return f"{mid_rem(z.re)} + ({mid_rem(z.im)})i"
