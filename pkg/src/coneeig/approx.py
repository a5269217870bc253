"""Non-verified floating-point eigenpairs used to seed the verification.

Nothing here is rigorous. A poor approximation only makes the later
verification fail; it can never produce a wrong certificate.

Two backends are available:

``"qr"`` (default)
    Householder reduction to Hessenberg form, shifted complex QR for the
    eigenvalues, and inverse iteration for the eigenvectors.
``"lapack"``
    ``numpy.linalg.eig`` (LAPACK ``*geev``), kept for reproducing results
    obtained with that solver, including its eigenvalue order and vector
    scaling when ``normalize="native"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NoConvergence

__all__ = ["SolverConfig", "ApproxEigenSet", "approx_eigendecompose", "pair_order"]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SolverConfig:
    residual_target: float = 1e-10
    max_sweeps: int | None = None  # None means 30 * N
    seed: int = 0
    method: str = "qr"
    normalize: str = "inf"  # "inf" or "native"
    deflation_tol: float = 1e-14


@dataclass(frozen=True)
class ApproxEigenSet:
    """Approximate eigenpairs; column ``i`` of ``vectors`` pairs with ``values[i]``."""

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray

    def __len__(self):
        return len(self.values)


def _hessenberg(a):
    h = np.array(a, dtype=np.complex128)
    n = h.shape[0]
    for j in range(n - 2):
        x = h[j + 1 :, j]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[j + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ h[j + 1 :, :])
        h[:, j + 1 :] -= 2.0 * np.outer(h[:, j + 1 :] @ v, v.conj())
        h[j + 2 :, j] = 0.0
    return h


def _wilkinson(a, b, c, d):
    """Eigenvalue of [[a, b], [c, d]] closest to d."""
    m = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    mu1, mu2 = m + disc, m - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _givens(f, g):
    """(c, s) with [[c, s], [-conj(s), c]] @ [f, g] = [r, 0], c real."""
    if g == 0:
        return 1.0, 0.0
    if f == 0:
        return 0.0, np.conj(g) / abs(g)
    af = abs(f)
    norm = math.hypot(af, abs(g))
    c = af / norm
    s = (f / af) * np.conj(g) / norm
    return c, s


def _qr_eigenvalues(a, cfg: SolverConfig):
    n = a.shape[0]
    h = _hessenberg(a)
    values = np.full(n, np.nan + 0j)
    scale = max(np.abs(h).sum(axis=1).max(), np.finfo(float).tiny)
    max_iter = cfg.max_sweeps if cfg.max_sweeps is not None else 30 * n
    total = 0
    since_deflation = 0
    hi = n - 1
    while hi >= 0:
        lo = hi
        while lo > 0:
            ref = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if ref == 0.0:
                ref = scale
            if abs(h[lo, lo - 1]) <= cfg.deflation_tol * ref:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            values[hi] = h[hi, hi]
            hi -= 1
            since_deflation = 0
            continue
        if total >= max_iter:
            raise NoConvergence(
                f"QR did not converge within {max_iter} sweeps",
                partial=values,
            )
        total += 1
        since_deflation += 1
        if since_deflation % 11 == 0:
            # exceptional shift to break cycles
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * (1 + 1j)
        else:
            shift = _wilkinson(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        w = h[lo : hi + 1, lo : hi + 1]
        m = hi - lo + 1
        w[np.diag_indices(m)] -= shift
        rots = []
        for i in range(m - 1):
            c, s = _givens(w[i, i], w[i + 1, i])
            rows = w[i : i + 2, i:].copy()
            w[i, i:] = c * rows[0] + s * rows[1]
            w[i + 1, i:] = -np.conj(s) * rows[0] + c * rows[1]
            w[i + 1, i] = 0.0
            rots.append((c, s))
        for i, (c, s) in enumerate(rots):
            top = min(i + 2, m - 1)
            cols = w[: top + 1, i : i + 2].copy()
            w[: top + 1, i] = c * cols[:, 0] + np.conj(s) * cols[:, 1]
            w[: top + 1, i + 1] = -s * cols[:, 0] + c * cols[:, 1]
        w[np.diag_indices(m)] += shift
    return values


def _lu_solve_guarded(m, b, floor):
    """Solve m x = b with partial pivoting; pivots below ``floor`` are replaced."""
    a = m.copy()
    x = b.astype(np.complex128).copy()
    n = a.shape[0]
    for c in range(n):
        r = c + int(np.argmax(np.abs(a[c:, c])))
        if r != c:
            a[[c, r]] = a[[r, c]]
            x[[c, r]] = x[[r, c]]
        if abs(a[c, c]) < floor:
            a[c, c] = floor
        f = a[c + 1 :, c] / a[c, c]
        a[c + 1 :, c:] -= np.outer(f, a[c, c:])
        x[c + 1 :] -= f * x[c]
    for c in range(n - 1, -1, -1):
        x[c] = (x[c] - a[c, c + 1 :] @ x[c + 1 :]) / a[c, c]
    return x


def _inverse_iteration(a, lam, rng):
    n = a.shape[0]
    norm = max(np.abs(a).sum(axis=1).max(), 1.0)
    floor = _EPS * norm
    m = a - lam * np.eye(n)
    x = (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)) * 1e-3
    for _ in range(3):
        x = _lu_solve_guarded(m, x, floor)
        big = np.abs(x).max()
        if not np.isfinite(big) or big == 0:
            break
        x = x / big
    return x


def _normalize_inf(v):
    mags = np.abs(v)
    top = mags.max()
    if top == 0:
        return v
    # first component within rounding of the max, so ties break by index
    j = int(np.argmax(mags >= top * (1 - 1e-12)))
    out = v * (np.conj(v[j]) / abs(v[j])) / abs(v[j])
    out[j] = 1.0
    return out


def _residuals(a, values, vectors):
    r = a @ vectors - vectors * values[None, :]
    scale = np.abs(vectors).max(axis=0)
    scale[scale == 0] = 1.0
    return np.abs(r).max(axis=0) / scale


def approx_eigendecompose(a, cfg: SolverConfig | None = None) -> ApproxEigenSet:
    """Approximate all eigenpairs of the square complex matrix ``a``.

    Raises
    ------
    NoConvergence
        If QR exceeds its sweep budget, or some residual misses
        ``cfg.residual_target * max(1, ||a||_inf)``. ``partial`` carries what
        was computed.
    """
    cfg = cfg or SolverConfig()
    a = np.array(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"need a non-empty square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    n = a.shape[0]

    if cfg.method == "lapack":
        # real input goes to the real driver, as it would from a real-typed caller
        values, vectors = np.linalg.eig(a.real if not a.imag.any() else a)
        values = values.astype(np.complex128)
        vectors = vectors.astype(np.complex128)
    elif cfg.method == "qr":
        values = _qr_eigenvalues(a, cfg)
        rng = np.random.default_rng(cfg.seed)
        vectors = np.column_stack([_inverse_iteration(a, lam, rng) for lam in values])
    else:
        raise ValueError(f"unknown eigensolver method {cfg.method!r}")

    if cfg.normalize == "inf":
        vectors = np.column_stack([_normalize_inf(vectors[:, i]) for i in range(n)])
    elif cfg.normalize != "native":
        raise ValueError(f"unknown normalization {cfg.normalize!r}")

    result = ApproxEigenSet(values, vectors, _residuals(a, values, vectors))
    limit = cfg.residual_target * max(1.0, float(np.abs(a).sum(axis=1).max()))
    bad = ~(result.residuals <= limit)
    if bad.any():
        raise NoConvergence(
            f"residuals above {limit:.3g} for pairs {np.flatnonzero(bad).tolist()}",
            partial=result,
        )
    return result


def pair_order(s: ApproxEigenSet, rtol: float = 1e-10) -> ApproxEigenSet:
    """Sort by |value| descending, then arg in [0, 2*pi) ascending.

    Moduli equal to within ``rtol`` (relative) count as ties, so that a
    conjugate pair from a real matrix is ordered by argument rather than by
    rounding noise in its modulus. Remaining ties keep the original order.
    """
    n = len(s.values)
    mods = np.abs(s.values)
    args = np.mod(np.angle(s.values), 2 * np.pi)
    # args within rounding of 2*pi are really 0
    args[args > 2 * np.pi - 1e-12] = 0.0
    by_mod = sorted(range(n), key=lambda i: (-mods[i], i))
    groups, current = [], [by_mod[0]] if n else []
    for i in by_mod[1:]:
        if mods[current[0]] - mods[i] <= rtol * max(mods[current[0]], 1e-300):
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    if current:
        groups.append(current)
    order = [i for g in groups for i in sorted(g, key=lambda i: (args[i], i))]
    return replace(
        s,
        values=s.values[order],
        vectors=s.vectors[:, order],
        residuals=s.residuals[order],
    )
