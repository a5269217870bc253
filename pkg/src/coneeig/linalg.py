"""Dense matrices and vectors of complex rectangles.

Entries are stored as four float64 arrays (re_lo, re_hi, im_lo, im_hi) and
every operation goes through the vectorized kernels of
``coneeig.interval``, so the outward-rounding guarantees carry over
entrywise. Indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DivisionByZeroInterval, IndexOutOfRange, SingularPivot
from .interval import (
    CInterval,
    Interval,
    cadd,
    ccontains_zero,
    cdiv,
    civ_hull,
    cmag_up,
    cmig,
    cmul,
    csub,
    sum_up,
)

__all__ = [
    "IMatrix",
    "IVector",
    "Without",
    "mat_add",
    "mat_sub",
    "mat_mul",
    "mat_vec",
    "scalar_mul",
    "shift_diagonal",
    "sup_norm",
    "submatrix",
    "gj_inverse",
]


class _RectArray:
    __slots__ = ("re_lo", "re_hi", "im_lo", "im_hi")

    _ndim = None

    def __init__(self, re_lo, re_hi, im_lo, im_hi):
        parts = [np.array(x, dtype=np.float64) for x in (re_lo, re_hi, im_lo, im_hi)]
        shape = parts[0].shape
        if any(p.shape != shape for p in parts):
            raise DimensionMismatch("component arrays differ in shape")
        if self._ndim is not None and len(shape) != self._ndim:
            raise DimensionMismatch(f"{type(self).__name__} needs {self._ndim}-d data, got {shape}")
        # NaN fails the comparison, so one check covers both
        if not ((parts[0] <= parts[1]).all() and (parts[2] <= parts[3]).all()):
            if any(np.isnan(p).any() for p in parts):
                raise ValueError("NaN endpoint")
            raise ValueError("lower endpoint above upper endpoint")
        for p in parts:
            p.flags.writeable = False
        self.re_lo, self.re_hi, self.im_lo, self.im_hi = parts

    @classmethod
    def from_rect(cls, rect):
        return cls(*rect)

    @classmethod
    def from_point(cls, values):
        z = np.asarray(values, dtype=np.complex128)
        return cls(z.real, z.real, z.imag, z.imag)

    @classmethod
    def hull(cls, values):
        """Entrywise hull of nested lists (or an array) of anything ``civ_hull`` accepts.

        Lists nest along axes; a tuple is one ``(re, im)`` entry.
        """
        shape = _shape_of(values)
        boxes = [civ_hull(v) for v in _flatten(values)]
        if len(boxes) != int(np.prod(shape, dtype=int)):
            raise DimensionMismatch("ragged input")
        return cls(
            np.reshape([b.re.lo for b in boxes], shape),
            np.reshape([b.re.hi for b in boxes], shape),
            np.reshape([b.im.lo for b in boxes], shape),
            np.reshape([b.im.hi for b in boxes], shape),
        )

    @property
    def rect(self):
        return (self.re_lo, self.re_hi, self.im_lo, self.im_hi)

    @property
    def shape(self):
        return self.re_lo.shape

    def mid(self) -> np.ndarray:
        re = np.where(self.re_lo == self.re_hi, self.re_lo, 0.5 * self.re_lo + 0.5 * self.re_hi)
        im = np.where(self.im_lo == self.im_hi, self.im_lo, 0.5 * self.im_lo + 0.5 * self.im_hi)
        return re + 1j * im

    def radius(self) -> np.ndarray:
        """Half-widths as an upper bound on |z - mid| per entry (componentwise max)."""
        return np.maximum(self.re_hi - self.re_lo, self.im_hi - self.im_lo) / 2

    def is_point(self) -> bool:
        return bool((self.re_lo == self.re_hi).all() and (self.im_lo == self.im_hi).all())

    def contains(self, values) -> bool:
        """True if the point array (complex) lies entrywise inside."""
        z = np.asarray(values, dtype=np.complex128)
        return bool(
            (self.re_lo <= z.real).all()
            and (z.real <= self.re_hi).all()
            and (self.im_lo <= z.imag).all()
            and (z.imag <= self.im_hi).all()
        )

    def encloses(self, other) -> bool:
        return bool(
            (self.re_lo <= other.re_lo).all()
            and (other.re_hi <= self.re_hi).all()
            and (self.im_lo <= other.im_lo).all()
            and (other.im_hi <= self.im_hi).all()
        )

    def contains_zero(self) -> np.ndarray:
        return ccontains_zero(self.rect)

    def _cell(self, idx) -> CInterval:
        return CInterval(
            Interval(self.re_lo[idx], self.re_hi[idx]),
            Interval(self.im_lo[idx], self.im_hi[idx]),
        )

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return all(np.array_equal(x, y) for x, y in zip(self.rect, other.rect))

    __hash__ = None


def _flatten(values):
    if isinstance(values, np.ndarray):
        yield from values.ravel().tolist()
    elif isinstance(values, list):
        for v in values:
            yield from _flatten(v)
    else:
        yield values


def _shape_of(values):
    if isinstance(values, np.ndarray):
        return values.shape
    if isinstance(values, list):
        if not values:
            return (0,)
        return (len(values), *_shape_of(values[0]))
    return ()


class IMatrix(_RectArray):
    """Dense ``rows x cols`` matrix of complex rectangles."""

    __slots__ = ()
    _ndim = 2

    @classmethod
    def identity(cls, n: int) -> IMatrix:
        return cls.from_point(np.eye(n))

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    @property
    def entries(self) -> list[CInterval]:
        return [self._cell((i, j)) for i in range(self.rows) for j in range(self.cols)]

    def __getitem__(self, ij) -> CInterval:
        i, j = ij
        return self._cell((i, j))

    def column(self, j: int) -> IVector:
        return IVector(*(p[:, j] for p in self.rect))

    def __repr__(self):
        return f"IMatrix({self.rows}x{self.cols})"


class IVector(_RectArray):
    """Vector of complex rectangles."""

    __slots__ = ()
    _ndim = 1

    @property
    def dim(self) -> int:
        return self.shape[0]

    @property
    def entries(self) -> list[CInterval]:
        return [self._cell(i) for i in range(self.dim)]

    def __getitem__(self, i) -> CInterval:
        return self._cell(i)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"IVector({self.dim})"


def _rect_of(x):
    if isinstance(x, _RectArray):
        return x.rect
    return civ_hull(x).rect


def mat_add(a: IMatrix, b: IMatrix) -> IMatrix:
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} + {b.shape}")
    return type(a).from_rect(cadd(a.rect, b.rect))


def mat_sub(a: IMatrix, b: IMatrix) -> IMatrix:
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} - {b.shape}")
    return type(a).from_rect(csub(a.rect, b.rect))


def scalar_mul(s, a):
    """Entrywise product of a scalar (complex, real, or CInterval) with ``a``."""
    return type(a).from_rect(cmul(_rect_of(s), a.rect))


def _dot_rows(ar, br):
    """Products ar[..., k] * br[k, ...] summed over k in index order."""
    n = ar[0].shape[-1]
    if n == 0:
        shape = ar[0].shape[:-1] + br[0].shape[1:]
        z = np.zeros(shape)
        return (z, z, z, z)
    if br[0].ndim == 2:
        prods = cmul(tuple(p[:, :, None] for p in ar), tuple(p[None, :, :] for p in br))
        acc = tuple(p[:, 0, :] for p in prods)
        for k in range(1, n):
            acc = cadd(acc, tuple(p[:, k, :] for p in prods))
    else:
        prods = cmul(ar, tuple(p[None, :] for p in br))
        acc = tuple(p[:, 0] for p in prods)
        for k in range(1, n):
            acc = cadd(acc, tuple(p[:, k] for p in prods))
    return acc


def mat_mul(a: IMatrix, b: IMatrix) -> IMatrix:
    """Entrywise enclosure of {AB : A in a, B in b} via interval dot products."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.shape} @ {b.shape}")
    return IMatrix.from_rect(_dot_rows(a.rect, b.rect))


def mat_vec(a: IMatrix, x: IVector) -> IVector:
    if a.cols != x.dim:
        raise DimensionMismatch(f"{a.shape} @ {x.shape}")
    return IVector.from_rect(_dot_rows(a.rect, x.rect))


def shift_diagonal(a: IMatrix, z) -> IMatrix:
    """``a - z*I`` for a scalar ``z``; off-diagonal entries are untouched."""
    if a.rows != a.cols:
        raise DimensionMismatch("shift_diagonal needs a square matrix")
    n = a.rows
    idx = np.arange(n)
    rect = [p.copy() for p in a.rect]
    diag = csub(tuple(p[idx, idx] for p in rect), _rect_of(z))
    for p, d in zip(rect, diag):
        p[idx, idx] = d
    return IMatrix.from_rect(rect)


def sup_norm(a: IMatrix) -> float:
    """Upper bound on the max row sum of entry magnitudes."""
    if a.rows == 0 or a.cols == 0:
        return 0.0
    mags = cmag_up(a.rect)
    row_sums = sum_up(mags[:, j] for j in range(a.cols))
    return float(np.max(row_sums))


@dataclass(frozen=True)
class Without:
    """Index set {0, ..., n-1} minus ``k``."""

    k: int


def _resolve(sel, n: int) -> list[int]:
    if isinstance(sel, Without):
        if not 0 <= sel.k < n:
            raise IndexOutOfRange(f"index {sel.k} outside 0..{n - 1}")
        return [i for i in range(n) if i != sel.k]
    if isinstance(sel, slice):
        return list(range(n))[sel]
    if isinstance(sel, (int, np.integer)):
        sel = [int(sel)]
    out = [int(i) for i in sel]
    for i in out:
        if not 0 <= i < n:
            raise IndexOutOfRange(f"index {i} outside 0..{n - 1}")
    return out


def submatrix(a: IMatrix, rows, cols) -> IMatrix:
    """Rows ``rows`` and columns ``cols`` of ``a``, in the order given.

    Each selector may be an int, a slice/range, a sequence of indices, or
    ``Without(k)``.
    """
    ri = _resolve(rows, a.rows)
    ci = _resolve(cols, a.cols)
    sel = np.ix_(ri, ci)
    return IMatrix.from_rect(tuple(p[sel] for p in a.rect))


def gj_inverse(p: IMatrix) -> IMatrix:
    """Interval Gauss-Jordan inverse.

    The result contains Q^-1 for every point matrix Q in ``p``. Pivots are
    chosen per column by largest mignitude (distance of the rectangle from 0).

    Raises
    ------
    SingularPivot
        If every remaining candidate in some column contains 0.
    """
    if p.rows != p.cols:
        raise DimensionMismatch("gj_inverse needs a square matrix")
    n = p.rows
    eye = np.eye(n)
    zero = np.zeros((n, n))
    aug = [
        np.hstack([p.re_lo, eye]),
        np.hstack([p.re_hi, eye]),
        np.hstack([p.im_lo, zero]),
        np.hstack([p.im_hi, zero]),
    ]
    for c in range(n):
        cand = tuple(x[c:, c] for x in aug)
        quality = np.where(ccontains_zero(cand), -1.0, cmig(cand))
        best = int(np.argmax(quality))
        if quality[best] < 0:
            raise SingularPivot(c)
        r = c + best
        if r != c:
            for x in aug:
                x[[c, r]] = x[[r, c]]
        pivot = tuple(x[c, c] for x in aug)
        try:
            row = cdiv(tuple(x[c] for x in aug), pivot)
        except DivisionByZeroInterval as exc:
            raise SingularPivot(c) from exc
        row = [np.array(v, dtype=np.float64) for v in row]
        row[0][c] = row[1][c] = 1.0
        row[2][c] = row[3][c] = 0.0
        for x, v in zip(aug, row):
            x[c] = v
        others = np.array([i for i in range(n) if i != c], dtype=int)
        if others.size:
            factors = tuple(x[others, c][:, None] for x in aug)
            upd = cmul(factors, tuple(v[None, :] for v in row))
            new = csub(tuple(x[others] for x in aug), upd)
            for x, v in zip(aug, new):
                x[others] = v
            # exact elimination zeroes column c for every point matrix
            for x in aug:
                x[others, c] = 0.0
    return IMatrix(*(x[:, n:] for x in aug))
