"""Special functions, quadrature and root finding.

Values on the extended real line are plain floats, with ``-inf``/``+inf``
standing for the two infinities.  Only comparisons, min/max and evaluation
of a CDF are meaningful on them; anything producing a NaN is reported as a
:class:`~distgen.errors.DomainError`.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import ConvergenceError, DomainError, PreconditionError

NEG_INF = -math.inf
POS_INF = math.inf


@dataclass(frozen=True)
class NumericConfig:
    quad_tol: float = 1e-10
    quad_budget: int = 10_000
    special_eps: float = 1e-15
    special_maxit: int = 10_000
    root_tol: float = 1e-12
    root_maxit: int = 400


DEFAULT = NumericConfig()


def ext_real(value) -> float:
    """Coerce to an extended real, rejecting NaN."""
    v = float(value)
    if math.isnan(v):
        raise DomainError("indeterminate value (NaN) on the extended real line")
    return v


def ext_clamp(value: float, lo: float, hi: float) -> float:
    return min(max(ext_real(value), lo), hi)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _finish(out, scalar):
    return float(out) if scalar else out


# ---------------------------------------------------------------- beta


def _beta_cf(a, b, x, eps, maxit):
    # modified Lentz evaluation of the incomplete beta continued fraction
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < tiny, tiny, d)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for i in range(1, maxit + 1):
        m2 = 2 * i
        aa = i * (b - i) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        h = np.where(done, h, h * d * c)
        aa = -(a + i) * (qab + i) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < eps
        if done.all():
            return h
    raise ConvergenceError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(x, a, b, config: NumericConfig = DEFAULT):
    """I_x(a, b), vectorized over x (and broadcast over a, b)."""
    xs, scalar = _as_array(x)
    a_arr, _ = _as_array(a)
    b_arr, _ = _as_array(b)
    if np.any(~(a_arr > 0)) or np.any(~(b_arr > 0)):
        raise DomainError(f"incomplete beta needs a > 0 and b > 0, got a={a}, b={b}")
    if np.any(~((xs >= 0) & (xs <= 1))):
        raise DomainError("incomplete beta needs x in [0, 1]")
    xs, a_arr, b_arr = np.broadcast_arrays(xs, a_arr, b_arr)
    out = np.where(xs >= 1.0, 1.0, 0.0)
    inner = (xs > 0) & (xs < 1)
    if inner.any():
        xi, ai, bi = xs[inner], a_arr[inner], b_arr[inner]
        with np.errstate(divide="ignore"):
            log_front = (gammaln(ai + bi) - gammaln(ai) - gammaln(bi)
                         + ai * np.log(xi) + bi * np.log1p(-xi))
        front = np.exp(log_front)
        direct = xi < (ai + 1.0) / (ai + bi + 2.0)
        val = np.empty_like(xi)
        if direct.any():
            val[direct] = front[direct] * _beta_cf(
                ai[direct], bi[direct], xi[direct], config.special_eps, config.special_maxit
            ) / ai[direct]
        flip = ~direct
        if flip.any():
            val[flip] = 1.0 - front[flip] * _beta_cf(
                bi[flip], ai[flip], 1.0 - xi[flip], config.special_eps, config.special_maxit
            ) / bi[flip]
        out[inner] = np.clip(val, 0.0, 1.0)
    return _finish(out, scalar)


# ---------------------------------------------------------------- gamma


def _gamma_series(s, z, eps, maxit):
    term = 1.0 / s
    total = term.copy()
    ap = s.copy()
    done = np.zeros(z.shape, dtype=bool)
    for _ in range(maxit):
        ap = ap + 1.0
        term = np.where(done, term, term * z / ap)
        total = total + np.where(done, 0.0, term)
        done |= np.abs(term) < np.abs(total) * eps
        if done.all():
            return total * np.exp(-z + s * np.log(z) - gammaln(s))
    raise ConvergenceError("incomplete gamma series did not converge")


def _gamma_cf_upper(s, z, eps, maxit):
    tiny = 1e-300
    b = z + 1.0 - s
    c = np.full_like(z, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(z.shape, dtype=bool)
    for i in range(1, maxit + 1):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < eps
        if done.all():
            return np.exp(-z + s * np.log(z) - gammaln(s)) * h
    raise ConvergenceError("incomplete gamma continued fraction did not converge")


def regularized_lower_gamma(x, shape, rate, config: NumericConfig = DEFAULT):
    """P(shape, rate * x), vectorized over x."""
    xs, scalar = _as_array(x)
    if not (shape > 0 and rate > 0):
        raise DomainError(f"incomplete gamma needs shape > 0 and rate > 0, got {shape}, {rate}")
    if np.any(np.isnan(xs)) or np.any(xs < 0):
        raise DomainError("incomplete gamma needs x >= 0")
    z = rate * xs
    out = np.where(np.isposinf(z), 1.0, 0.0)
    live = (z > 0) & np.isfinite(z)
    if live.any():
        zl = z[live]
        s = np.full_like(zl, float(shape))
        val = np.empty_like(zl)
        use_series = zl < s + 1.0
        if use_series.any():
            val[use_series] = _gamma_series(
                s[use_series], zl[use_series], config.special_eps, config.special_maxit
            )
        cf = ~use_series
        if cf.any():
            val[cf] = 1.0 - _gamma_cf_upper(s[cf], zl[cf], config.special_eps, config.special_maxit)
        out[live] = np.clip(val, 0.0, 1.0)
    return _finish(out, scalar)


# ---------------------------------------------------------------- quadrature

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(15)
_G_WEIGHTS[[1, 3, 5]] = _WG[:3]
_G_WEIGHTS[[13, 11, 9]] = _WG[:3]
_G_WEIGHTS[7] = _WG[3]


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.asarray(f(mid + half * GK_NODES), dtype=float)
    if vals.shape != (15,):
        vals = np.broadcast_to(vals, (15,))
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"integrand is not finite on [{a}, {b}]")
    kronrod = half * float(GK_WEIGHTS @ vals)
    gauss = half * float(_G_WEIGHTS @ vals)
    return kronrod, abs(kronrod - gauss)


def _map_infinite(f, lo, hi):
    """Return (g, a, b) with int_lo^hi f = int_a^b g over a finite range.

    Infinite ends are sent to t = 0, where floating point still resolves
    the integrable singularities that heavy tails produce.
    """
    if math.isfinite(lo) and math.isfinite(hi):
        return f, lo, hi
    if math.isfinite(lo):
        def g(t):
            return f(lo + (1.0 - t) / t) / (t * t)
        return g, 0.0, 1.0
    if math.isfinite(hi):
        def g(t):
            return f(hi - (1.0 - t) / t) / (t * t)
        return g, 0.0, 1.0
    raise ValueError("doubly infinite ranges are split by the caller")


def adaptive_quadrature(
    density: Callable,
    lo: float,
    hi: float,
    tol: float | None = None,
    config: NumericConfig = DEFAULT,
) -> tuple[float, float]:
    """Integrate a vectorized integrand over [lo, hi] by bisecting the worst panel.

    Returns ``(value, err_est)``.  Raises ConvergenceError carrying the best
    estimate once ``config.quad_budget`` panels are in use.
    """
    tol = config.quad_tol if tol is None else tol
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    lo, hi = ext_real(lo), ext_real(hi)
    if lo == hi:
        return 0.0, 0.0
    if lo > hi:
        value, err = adaptive_quadrature(density, hi, lo, tol, config)
        return -value, err
    if math.isinf(lo) and math.isinf(hi):
        left, left_err = adaptive_quadrature(density, lo, 0.0, tol / 2, config)
        right, right_err = adaptive_quadrature(density, 0.0, hi, tol / 2, config)
        return left + right, left_err + right_err
    if math.isinf(hi):
        # a unit panel next to the finite end keeps its singularity (if any)
        # away from the mapped infinite end
        near, near_err = _adaptive_finite(density, lo, lo + 1.0, tol / 2, config)
        far, far_err = _adaptive_finite(*_map_infinite(density, lo + 1.0, hi), tol / 2, config)
        return near + far, near_err + far_err
    if math.isinf(lo):
        near, near_err = _adaptive_finite(density, hi - 1.0, hi, tol / 2, config)
        far, far_err = _adaptive_finite(*_map_infinite(density, lo, hi - 1.0), tol / 2, config)
        return near + far, near_err + far_err
    return _adaptive_finite(density, lo, hi, tol, config)


def _adaptive_finite(g, a, b, tol, config):
    val, err = _gk15(g, a, b)
    heap = [(-err, a, b, val, err)]
    total, total_err = val, err
    while total_err > tol:
        if len(heap) >= config.quad_budget:
            raise ConvergenceError(
                f"quadrature budget of {config.quad_budget} panels exhausted "
                f"(error estimate {total_err:.3g})",
                value=total,
                err_est=total_err,
            )
        _, pa, pb, pval, perr = heapq.heappop(heap)
        pm = 0.5 * (pa + pb)
        if not (pa < pm < pb):
            # panel cannot be split further in floating point
            raise ConvergenceError(
                "quadrature panel collapsed before reaching tolerance",
                value=total,
                err_est=total_err,
            )
        lv, le = _gk15(g, pa, pm)
        rv, re = _gk15(g, pm, pb)
        total += lv + rv - pval
        total_err += le + re - perr
        heapq.heappush(heap, (-le, pa, pm, lv, le))
        heapq.heappush(heap, (-re, pm, pb, rv, re))
        if total_err <= tol:
            # recompute sums to shed accumulated rounding in the running totals
            total = math.fsum(item[3] for item in heap)
            total_err = math.fsum(item[4] for item in heap)
    return total, total_err


def cumulative_quadrature(
    density: Callable,
    lo: float,
    points,
    tol: float | None = None,
    config: NumericConfig = DEFAULT,
) -> np.ndarray:
    """Integrals of ``density`` from ``lo`` to each of ``points`` (finite, >= lo).

    The points are sorted into consecutive segments; every segment gets one
    vectorized GK15 pass and only the ones missing their share of ``tol``
    are refined adaptively.
    """
    tol = config.quad_tol if tol is None else tol
    pts = np.asarray(points, dtype=float)
    flat = pts.ravel()
    if flat.size == 0:
        return pts.copy()
    if np.any(~np.isfinite(flat)) or np.any(flat < lo):
        raise DomainError("cumulative quadrature needs finite points at or above the origin")
    knots, inverse = np.unique(flat, return_inverse=True)
    left = np.concatenate([[lo], knots[:-1]])
    right = knots
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = mid[:, None] + half[:, None] * GK_NODES[None, :]
    vals = np.asarray(density(nodes.ravel()), dtype=float).reshape(nodes.shape)
    if not np.all(np.isfinite(vals)):
        raise DomainError("integrand is not finite inside the integration range")
    kron = half * (vals @ GK_WEIGHTS)
    err = np.abs(kron - half * (vals @ _G_WEIGHTS))
    share = tol / len(knots)
    for k in np.nonzero((err > share) & (right > left))[0]:
        kron[k], _ = adaptive_quadrature(density, left[k], right[k], share, config)
    seg = np.where(right > left, kron, 0.0)
    return np.cumsum(seg)[inverse].reshape(pts.shape)


# ---------------------------------------------------------------- roots


def bracketed_root(
    f: Callable,
    target,
    lo,
    hi,
    tol: float | None = None,
    config: NumericConfig = DEFAULT,
):
    """Smallest-x bisection for f(x) = target with f nondecreasing on [lo, hi].

    Vectorized: ``target``, ``lo`` and ``hi`` broadcast together and ``f``
    must accept arrays.  The returned x always satisfies f(x) >= target, so
    for step functions this is the generalized inverse.
    """
    tol = config.root_tol if tol is None else tol
    tgt, scalar = _as_array(target)
    lo_a, lo_s = _as_array(lo)
    hi_a, hi_s = _as_array(hi)
    scalar = scalar and lo_s and hi_s
    tgt, lo_a, hi_a = (np.array(v, dtype=float) for v in np.broadcast_arrays(tgt, lo_a, hi_a))
    if np.any(~np.isfinite(lo_a)) or np.any(~np.isfinite(hi_a)) or np.any(lo_a > hi_a):
        raise PreconditionError("bracket must be finite with lo <= hi")
    f_lo = np.asarray(f(lo_a), dtype=float)
    f_hi = np.asarray(f(hi_a), dtype=float)
    if np.any(f_lo > tgt) or np.any(f_hi < tgt):
        raise PreconditionError("target is not bracketed: need f(lo) <= target <= f(hi)")
    # points where f(lo) already reaches the target are answered by lo
    hit = f_lo >= tgt
    hi_a = np.where(hit, lo_a, hi_a)
    for _ in range(config.root_maxit):
        width = hi_a - lo_a
        live = width > tol * np.maximum(1.0, np.abs(hi_a))
        if not live.any():
            break
        mid = lo_a + 0.5 * width
        stuck = (mid <= lo_a) | (mid >= hi_a)
        live &= ~stuck
        if not live.any():
            break
        f_mid = np.asarray(f(mid), dtype=float)
        up = live & (f_mid >= tgt)
        down = live & ~(f_mid >= tgt)
        hi_a = np.where(up, mid, hi_a)
        lo_a = np.where(down, mid, lo_a)
    return _finish(hi_a, scalar)


# ---------------------------------------------------------------- masses


def cdf_segment_mass(F, lo, hi, config: NumericConfig = DEFAULT) -> float:
    """Mass F assigns to (lo, hi]; zero for empty or reversed segments."""
    lo, hi = ext_real(lo), ext_real(hi)
    if hi <= lo:
        return 0.0
    if getattr(F, "kind", None) == "density_quadrature":
        a = max(lo, F.support_lo)
        b = min(hi, F.support_hi)
        if b <= a:
            return 0.0
        value, _ = adaptive_quadrature(F.density, a, b, config.quad_tol, config)
        return min(max(value, 0.0), 1.0)
    return max(float(F.eval(hi)) - float(F.eval(lo)), 0.0)
