"""Certified roots of complex polynomials via the companion matrix.

The roots of ``W(x) = x^n + a_{n-1} x^{n-1} + ... + a_0`` are the
eigenvalues of

    [  0    1    0  ...   0      ]
    [  0    0    1  ...   0      ]
    [            ...             ]
    [ -a0  -a1  -a2 ... -a_{n-1} ]

Coefficients are kept as exact rationals (floats, ints and decimal strings
all convert exactly), so normalizing to a monic polynomial is exact and the
companion hull certifies roots of the polynomial the caller wrote down.
Every root box is double-checked by interval Horner evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cone import EigenEnclosure, VerifyConfig, verify_all
from .errors import ParseError, VerificationFailure, ZeroLeadingCoefficient
from .interval import CInterval, Interval, civ_hull, iv_hull
from .linalg import IMatrix

__all__ = ["Polynomial", "RootEnclosure", "normalize", "companion", "horner", "enclose_roots"]


def exact_complex(v) -> tuple[Fraction, Fraction]:
    """Exact rational (re, im) of a number, decimal string, pair or {"re", "im"} dict."""
    if isinstance(v, dict):
        try:
            return _exact_real(v.get("re", 0)), _exact_real(v.get("im", 0))
        except AttributeError as exc:
            raise ParseError(f"bad coefficient {v!r}") from exc
    if isinstance(v, tuple) and len(v) == 2:
        return _exact_real(v[0]), _exact_real(v[1])
    if isinstance(v, complex):
        return Fraction(v.real), Fraction(v.imag)
    return _exact_real(v), Fraction(0)


def _exact_real(x) -> Fraction:
    if isinstance(x, bool):
        raise ParseError("booleans are not coefficients")
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a decimal number: {x!r}") from exc
    try:
        return Fraction(x)
    except (TypeError, ValueError, OverflowError) as exc:
        raise ParseError(f"not a finite number: {x!r}") from exc


@dataclass(frozen=True)
class Polynomial:
    """Monic polynomial; ``coeffs[i]`` is the exact (re, im) of a_i, leading 1 implicit."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def coeff_hulls(self) -> list[CInterval]:
        return [CInterval(iv_hull(re), iv_hull(im)) for re, im in self.coeffs]

    def __call__(self, z: complex) -> complex:
        acc = 1 + 0j
        for re, im in reversed(self.coeffs):
            acc = acc * z + complex(float(re), float(im))
        return acc


@dataclass(frozen=True)
class RootEnclosure:
    k: int
    box: CInterval
    epsilon: float
    horner: CInterval
    eigen: EigenEnclosure


def normalize(raw) -> Polynomial:
    """Divide the constant-first coefficients c_0..c_n through by c_n (exactly)."""
    cs = [exact_complex(c) for c in raw]
    if len(cs) < 2:
        raise ValueError("need degree >= 1 (at least two coefficients)")
    lr, li = cs[-1]
    if lr == 0 and li == 0:
        raise ZeroLeadingCoefficient("leading coefficient is zero")
    den = lr * lr + li * li
    out = []
    for re, im in cs[:-1]:
        # (re + im i) / (lr + li i)
        out.append(((re * lr + im * li) / den, (im * lr - re * li) / den))
    return Polynomial(tuple(out))


def companion(p: Polynomial) -> IMatrix:
    """Companion matrix (ones on the superdiagonal, -a_i in the last row)."""
    n = p.degree
    rows = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        rows[i][i + 1] = 1
    for j, (re, im) in enumerate(p.coeffs):
        rows[n - 1][j] = (-re, -im)
    return IMatrix.hull([[civ_hull(v) if isinstance(v, tuple) else v for v in row] for row in rows])


def horner(p: Polynomial, z: CInterval) -> CInterval:
    """Interval Horner evaluation of ``p`` over the rectangle ``z``."""
    acc = CInterval(Interval(1.0, 1.0), Interval(0.0, 0.0))
    for a in reversed(p.coeff_hulls()):
        acc = acc * z + a
    return acc


def enclose_roots(p: Polynomial, cfg: VerifyConfig | None = None):
    """Certified root boxes, one entry per root: RootEnclosure or VerificationFailure."""
    out = []
    for res in verify_all(companion(p), cfg):
        if isinstance(res, VerificationFailure):
            out.append(res)
            continue
        h = horner(p, res.value)
        if not h.contains_zero():
            out.append(VerificationFailure(res.k, "interval Horner evaluation excludes 0"))
            continue
        out.append(RootEnclosure(res.k, res.value, res.epsilon, h, res))
    return out
