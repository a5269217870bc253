"""Cone-condition verification of single eigenpairs.

Given approximate eigenvectors ``P = [x_1 ... x_N]`` of ``A``, the interval
matrix ``J = [P^-1][A][P]`` is nearly diagonal. For an index ``k`` and a
scale ``eps`` we form

    B = D^-1 (J - lam_k I) D,   D = diag(eps, ..., 1 (slot k), ..., eps)

and check, with rigorous rounding,

    ||B[k, :]|| < ||B[!k, !k]^-1||^-1 - ||B[!k, k]||.

That inequality makes ``B`` dominating for the ``({k}, !k)`` split, so
``B`` has exactly one eigenvalue of modulus at most ``||B[k, :]||`` and its
eigenvector lies in the cone ``|y_i| <= |y_k|``. Undoing ``D`` and ``P``
gives the box ``[P] (e_k + eps * ([-1, 1] + [-1, 1] i))`` for an eigenvector
of ``A``, and the interval Rayleigh quotient over that box encloses the
eigenvalue.

All norms are the max-row-sum norm; indices are 0-based.
"""

from __future__ import annotations

import math
import os
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approx import ApproxEigenSet, SolverConfig, approx_eigendecompose, pair_order
from .errors import (
    ExBoundUnavailable,
    NoConvergence,
    SingularPivot,
    VerificationFailure,
    ZeroDenominator,
)
from .interval import (
    CInterval,
    Interval,
    add_down,
    add_up,
    cabs2,
    cadd,
    cconj,
    cdiv_real,
    civ_hull,
    civ_mag,
    cmag_up,
    cmul,
    div_down,
    div_up,
    iv_hull,
    mul_up,
    rdiv,
    rscale,
    sum_up,
)
from .linalg import (
    IMatrix,
    IVector,
    Without,
    gj_inverse,
    mat_mul,
    mat_vec,
    shift_diagonal,
    submatrix,
    sup_norm,
)

__all__ = [
    "BlockSplit",
    "DominanceReport",
    "EigenEnclosure",
    "SearchConfig",
    "VerifyConfig",
    "co_bound",
    "ex_bound",
    "is_dominating",
    "rnorm",
    "similarity",
    "b_epsilon",
    "check_condition",
    "epsilon_search",
    "enclose_eigenvector",
    "rayleigh_enclosure",
    "verify_all",
    "as_imatrix",
]


@dataclass(frozen=True)
class BlockSplit:
    """Partition of the coordinates into E1 (``first``) and E2 (``second``)."""

    first: tuple
    second: tuple

    def __post_init__(self):
        first, second = tuple(self.first), tuple(self.second)
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)
        if not first or not second:
            raise ValueError("both blocks of a split must be non-empty")
        if sorted(first + second) != list(range(len(first) + len(second))):
            raise ValueError("split blocks must partition 0..N-1")

    @classmethod
    def leading(cls, n1: int, n: int) -> BlockSplit:
        return cls(tuple(range(n1)), tuple(range(n1, n)))

    @classmethod
    def around(cls, k: int, n: int) -> BlockSplit:
        """The ({k}, !k) split, coordinate k kept in place."""
        return cls((k,), tuple(i for i in range(n) if i != k))

    @property
    def n1(self) -> int:
        return len(self.first)

    @property
    def n2(self) -> int:
        return len(self.second)

    def check(self, a: IMatrix):
        if a.rows != a.cols or a.rows != self.n1 + self.n2:
            raise ValueError(f"split of size {self.n1}+{self.n2} does not fit {a.shape}")

    def blocks(self, a: IMatrix):
        self.check(a)
        f, s = self.first, self.second
        return (
            submatrix(a, f, f),
            submatrix(a, f, s),
            submatrix(a, s, f),
            submatrix(a, s, s),
        )


@dataclass(frozen=True)
class DominanceReport:
    """Both sides of the dominance test; ``satisfied`` is a proof when True."""

    r: float
    co_bound: float
    ex_bound: float
    lhs: float
    inv_norm_recip: float
    cross: float
    satisfied: bool
    reason: str | None = None


@dataclass(frozen=True)
class SearchConfig:
    eps_start: float = 2.0**-4
    eps_min: float = 2.0**-60
    eps_max: float = 2.0**-1
    factor: float = 2.0**-2
    refine: bool = False
    refine_steps: int = 12
    tighten_value: bool = True

    def __post_init__(self):
        if not 0 < self.factor < 1:
            raise ValueError("factor must lie in (0, 1)")
        if not 0 < self.eps_min <= self.eps_start <= self.eps_max:
            raise ValueError("need 0 < eps_min <= eps_start <= eps_max")


@dataclass(frozen=True)
class VerifyConfig:
    search: SearchConfig = field(default_factory=SearchConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    order: str = "modulus"  # "modulus" (pair_order) or "solver"
    threads: int | None = None  # None reads CONEEIG_THREADS, default 1


@dataclass(frozen=True)
class EigenEnclosure:
    """Certified eigenpair: ``A x = lam x`` for some ``x`` in ``vector``, ``lam`` in ``value``."""

    k: int
    epsilon: float
    vector: IVector
    value: CInterval
    report: DominanceReport
    lambda_tilde: complex
    basis_note: dict = field(default_factory=dict, compare=False)


def _as_iv(r) -> Interval:
    return r if isinstance(r, Interval) else iv_hull(r)


def as_imatrix(a) -> IMatrix:
    """Accept an IMatrix, a numpy array, or nested lists of hull-able values."""
    if isinstance(a, IMatrix):
        return a
    if isinstance(a, np.ndarray) and a.dtype != object:
        return IMatrix.from_point(a)
    return IMatrix.hull(a)


# ---------------------------------------------------------------------------
# block bounds
# ---------------------------------------------------------------------------


def co_bound(a, split: BlockSplit, r=1.0) -> float:
    """Upper bound ||A11|| + (1/r) ||A12|| on the contraction rate."""
    r = _as_iv(r)
    a = as_imatrix(a)
    split.check(a)
    return _co(a, split, r)


def _co(a, split, r):
    f, s = split.first, split.second
    recip = float(div_up(1.0, r.lo))
    return float(add_up(sup_norm(submatrix(a, f, f)), mul_up(recip, sup_norm(submatrix(a, f, s)))))


def _ex_parts(a, split, r):
    f, s = split.first, split.second
    try:
        inv = gj_inverse(submatrix(a, s, s))
    except SingularPivot as exc:
        raise ExBoundUnavailable(f"A22 could not be inverted: {exc}") from exc
    recip = float(div_down(1.0, sup_norm(inv)))
    cross = float(mul_up(r.hi, sup_norm(submatrix(a, s, f))))
    return recip, cross, float(add_down(recip, -cross))


def ex_bound(a, split: BlockSplit, r=1.0) -> float:
    """Lower bound ||A22^-1||^-1 - r ||A21|| on the expansion rate, clamped at 0."""
    a = as_imatrix(a)
    split.check(a)
    return max(_ex_parts(a, split, _as_iv(r))[2], 0.0)


def is_dominating(a, split: BlockSplit, r=1.0) -> DominanceReport:
    r = _as_iv(r)
    a = as_imatrix(a)
    split.check(a)
    co = _co(a, split, r)
    try:
        recip, cross, ex = _ex_parts(a, split, r)
    except ExBoundUnavailable as exc:
        return DominanceReport(float(r.lo), co, 0.0, co, 0.0, math.inf, False, str(exc))
    reason = None
    if ex <= 0:
        reason = "expansion bound is vacuous (<= 0)"
    elif not co < ex:
        reason = "contraction bound does not lie below expansion bound"
    return DominanceReport(float(r.lo), co, max(ex, 0.0), co, recip, cross, co < ex, reason)


def rnorm(a, split: BlockSplit, r=1.0) -> float:
    """max(||A11|| + ||A12||/r, r ||A21|| + ||A22||), rounded up."""
    r = _as_iv(r)
    a11, a12, a21, a22 = split.blocks(as_imatrix(a))
    top = add_up(sup_norm(a11), mul_up(float(div_up(1.0, r.lo)), sup_norm(a12)))
    bottom = add_up(mul_up(r.hi, sup_norm(a21)), sup_norm(a22))
    return float(max(top, bottom))


# ---------------------------------------------------------------------------
# the verification pipeline
# ---------------------------------------------------------------------------


def similarity(a, p):
    """Return ``(J, Pinv)`` with ``J = [P^-1][A][P]``.

    Raises VerificationFailure (k=None) if ``P`` cannot be inverted.
    """
    a = as_imatrix(a)
    pm = IMatrix.from_point(p)
    try:
        pinv = gj_inverse(pm)
    except SingularPivot as exc:
        raise VerificationFailure(None, f"approximate eigenbasis is numerically singular ({exc})") from exc
    return mat_mul(mat_mul(pinv, a), pm), pinv


def _scale_around(m: IMatrix, k: int, eps: float) -> IMatrix:
    rect = [p.copy() for p in m.rect]
    n = m.rows
    others = np.array([i for i in range(n) if i != k], dtype=int)
    if others.size:
        # row k gains eps, column k loses it; the (!k, !k) block is untouched
        for lo, hi in ((0, 1), (2, 3)):
            rlo, rhi = rscale(rect[lo][k, others], rect[hi][k, others], eps)
            clo, chi = rdiv(rect[lo][others, k], rect[hi][others, k], eps, eps)
            rect[lo][k, others], rect[hi][k, others] = rlo, rhi
            rect[lo][others, k], rect[hi][others, k] = clo, chi
    return IMatrix.from_rect(rect)


def b_epsilon(j, k: int, lambda_tilde, eps: float) -> IMatrix:
    """D^-1 (J - lambda_tilde I) D with D = diag(eps, .., 1 at k, .., eps)."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    j = as_imatrix(j)
    if not 0 <= k < j.rows:
        raise IndexError(f"k={k} outside 0..{j.rows - 1}")
    return _scale_around(shift_diagonal(j, lambda_tilde), k, float(eps))


def _inverse_recip(block: IMatrix) -> float:
    if block.rows == 0:
        return math.inf
    return float(div_down(1.0, sup_norm(gj_inverse(block))))


def check_condition(b, k: int, inv_norm_recip: float | None = None) -> DominanceReport:
    """Evaluate ||B[k,:]|| < ||B[!k,!k]^-1||^-1 - ||B[!k,k]|| rigorously.

    ``inv_norm_recip`` may carry a precomputed lower bound for the middle
    term; it does not depend on eps, so searches compute it once.
    """
    b = as_imatrix(b)
    n = b.rows
    lhs = sup_norm(submatrix(b, [k], range(n)))
    cross = sup_norm(submatrix(b, Without(k), [k])) if n > 1 else 0.0
    co = co_bound(b, BlockSplit.around(k, n), 1.0) if n > 1 else lhs
    if inv_norm_recip is None:
        try:
            inv_norm_recip = _inverse_recip(submatrix(b, Without(k), Without(k)))
        except SingularPivot as exc:
            return DominanceReport(1.0, co, 0.0, lhs, 0.0, cross, False, f"B[!k,!k] not invertible: {exc}")
    rhs = float(add_down(inv_norm_recip, -cross))
    ok = lhs < rhs
    reason = None if ok else f"{lhs:.3e} !< {rhs:.3e}"
    return DominanceReport(1.0, co, max(rhs, 0.0), lhs, inv_norm_recip, cross, ok, reason)


_Screen = namedtuple("_Screen", "satisfied reason")


def epsilon_search(j, k: int, lambda_tilde, cfg: SearchConfig | None = None):
    """Smallest grid eps passing ``check_condition``; returns ``(eps, report)``.

    The grid is eps_start * factor**m. From eps_start we descend while the
    condition holds. If eps_start already fails we look upward to eps_max,
    then downward to eps_min, and descend from the first pass found.

    Raises
    ------
    VerificationFailure
        No grid point in [eps_min, eps_max] passes.
    """
    cfg = cfg or SearchConfig()
    j = as_imatrix(j)
    m = shift_diagonal(j, lambda_tilde)
    try:
        recip = _inverse_recip(submatrix(m, Without(k), Without(k)))
    except SingularPivot as exc:
        raise VerificationFailure(k, f"B[!k,!k] not invertible: {exc}") from exc

    def full(eps):
        return check_condition(_scale_around(m, k, eps), k, inv_norm_recip=recip)

    # Screening: the norms of B^eps only scale row k (off the diagonal) by
    # eps and column k by 1/eps, so bounds for them follow from three
    # eps-independent numbers. The grid point finally chosen is re-checked
    # on the explicitly formed B^eps.
    n = m.rows
    others = [i for i in range(n) if i != k]
    mags = cmag_up(m.rect)
    diag = float(mags[k, k])
    row = float(sum_up(mags[k, others])) if others else 0.0
    col = float(mags[others, k].max()) if others else 0.0

    def test(eps):
        lhs = float(add_up(diag, mul_up(row, eps)))
        rhs = float(add_down(recip, -div_up(col, eps)))
        return _Screen(lhs < rhs, f"{lhs:.3e} !< {rhs:.3e}")

    eps, rep = cfg.eps_start, test(cfg.eps_start)
    if not rep.satisfied:
        found = None
        e = eps / cfg.factor
        while e <= cfg.eps_max:
            r = test(e)
            if r.satisfied:
                found = (e, r)
                break
            e /= cfg.factor
        if found is not None:
            # the passing set is an interval in eps, so nothing below e passes
            return found
        e = eps * cfg.factor
        while e >= cfg.eps_min:
            r = test(e)
            if r.satisfied:
                found = (e, r)
                break
            e *= cfg.factor
        if found is None:
            raise VerificationFailure(
                k, f"no eps in [{cfg.eps_min:.3g}, {cfg.eps_max:.3g}] satisfies the cone condition ({rep.reason})"
            )
        eps, rep = found

    failed_at = None
    while True:
        nxt = eps * cfg.factor
        if nxt < cfg.eps_min:
            break
        r = test(nxt)
        if not r.satisfied:
            failed_at = nxt
            break
        eps, rep = nxt, r

    if cfg.refine and failed_at is not None:
        lo, hi = failed_at, eps
        for _ in range(cfg.refine_steps):
            mid = math.sqrt(lo * hi)
            if not lo < mid < hi:
                break
            r = test(mid)
            if r.satisfied:
                hi, eps, rep = mid, mid, r
            else:
                lo = mid

    rep = full(eps)
    while not rep.satisfied:
        # screening and the explicit matrix can disagree in the last bit;
        # move up the grid until the explicit check agrees
        eps /= cfg.factor
        if eps > cfg.eps_max:
            raise VerificationFailure(k, f"cone condition not confirmed on B^eps ({rep.reason})")
        rep = full(eps)
    return eps, rep


def enclose_eigenvector(p, k: int, eps: float) -> IVector:
    """[P] (e_k + eps * box), box = [-1,1] + [-1,1]i off slot k."""
    p = np.asarray(p, dtype=np.complex128)
    n = p.shape[0]
    half = np.full(n, float(eps))
    half[k] = 0.0
    lo_re = -half.copy()
    hi_re = half.copy()
    lo_re[k] = hi_re[k] = 1.0
    v = IVector(lo_re, hi_re, -half, half)
    return mat_vec(IMatrix.from_point(p), v)


def _inner(u_rect, v_rect):
    """Sum_i u_i * conj(v_i), accumulated in index order."""
    prods = cmul(u_rect, cconj(v_rect))
    acc = tuple(c[0] for c in prods)
    for i in range(1, prods[0].shape[0]):
        acc = cadd(acc, tuple(c[i] for c in prods))
    return acc


def rayleigh_enclosure(a, x: IVector) -> CInterval:
    """Interval evaluation of <Ax, x> / <x, x> with <u, v> = sum u_i conj(v_i).

    The denominator is formed as sum |x_i|^2, a real interval.
    """
    a = as_imatrix(a)
    num = _inner(mat_vec(a, x).rect, x.rect)
    sq_lo, sq_hi = cabs2(x.rect)
    den_lo, den_hi = sq_lo[0], sq_hi[0]
    for i in range(1, x.dim):
        den_lo, den_hi = add_down(den_lo, sq_lo[i]), add_up(den_hi, sq_hi[i])
    if not den_lo > 0:
        raise ZeroDenominator("<x, x> enclosure contains 0")
    return CInterval.from_rect([float(v) for v in cdiv_real(num, den_lo, den_hi)])


def _disc_box(center: complex, radius: float) -> CInterval:
    c = civ_hull(complex(center))
    r = Interval(-radius, radius)
    return c + CInterval(r, r)


def _verify_index(a, j, approx: ApproxEigenSet, k, cfg: VerifyConfig, basis_note):
    lam = complex(approx.values[k])
    eps, rep = epsilon_search(j, k, lam, cfg.search)
    vector = enclose_eigenvector(approx.vectors, k, eps)
    try:
        value = rayleigh_enclosure(a, vector)
    except ZeroDenominator as exc:
        raise VerificationFailure(k, str(exc)) from exc
    if cfg.search.tighten_value:
        # the certified eigenvalue of B is within lhs of 0, i.e. lam is
        # within lhs of lambda_tilde
        disc = _disc_box(lam, rep.lhs)
        tight = value.intersect(disc)
        if tight is None:
            raise VerificationFailure(k, "Rayleigh and cone enclosures are disjoint")
        value = tight
    return EigenEnclosure(k, eps, vector, value, rep, lam, basis_note)


def _thread_count(cfg: VerifyConfig) -> int:
    if cfg.threads is not None:
        return max(1, cfg.threads)
    try:
        return max(1, int(os.environ.get("CONEEIG_THREADS", "1")))
    except ValueError:
        return 1


def verify_all(a, cfg: VerifyConfig | None = None, indices=None):
    """Certify eigenpairs of ``a`` (point or interval matrix).

    Returns one entry per requested index, in index order: an
    ``EigenEnclosure`` or a ``VerificationFailure`` instance. Failures never
    abort the batch. Indices refer to the eigenpair order after
    ``cfg.order`` is applied.
    """
    cfg = cfg or VerifyConfig()
    a = as_imatrix(a)
    if a.rows != a.cols:
        raise ValueError(f"need a square matrix, got {a.shape}")
    n = a.rows
    indices = list(range(n)) if indices is None else [int(i) for i in indices]
    for i in indices:
        if not 0 <= i < n:
            raise IndexError(f"index {i} outside 0..{n - 1}")

    if n == 1:
        return [_verify_scalar(a, cfg)]

    try:
        approx = approx_eigendecompose(a.mid(), cfg.solver)
    except NoConvergence as exc:
        approx = exc.partial if isinstance(exc.partial, ApproxEigenSet) else None
        if approx is None:
            return [VerificationFailure(i, f"eigensolver failed: {exc}") for i in indices]
    if cfg.order == "modulus":
        approx = pair_order(approx)
    elif cfg.order != "solver":
        raise ValueError(f"unknown order {cfg.order!r}")
    if not (np.isfinite(approx.values).all() and np.isfinite(approx.vectors).all()):
        return [VerificationFailure(i, "approximate eigenpairs are not finite") for i in indices]

    try:
        j, _ = similarity(a, approx.vectors)
    except VerificationFailure as exc:
        return [VerificationFailure(i, exc.reason) for i in indices]

    note = {"method": cfg.solver.method, "normalize": cfg.solver.normalize, "basis": approx.vectors}

    def run(k):
        try:
            return _verify_index(a, j, approx, k, cfg, note)
        except VerificationFailure as exc:
            return exc if exc.k == k else VerificationFailure(k, exc.reason)

    threads = _thread_count(cfg)
    if threads > 1 and len(indices) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, indices))
    return [run(k) for k in indices]


def _verify_scalar(a: IMatrix, cfg: VerifyConfig):
    value = a[0, 0]
    lam = complex(a.mid()[0, 0])
    radius = civ_mag(value - lam)
    rep = DominanceReport(1.0, radius, math.inf, radius, math.inf, 0.0, True)
    vector = IVector.from_point([1.0])
    return EigenEnclosure(0, cfg.search.eps_min, vector, value, rep, lam, {"method": "trivial"})
