"""Monotone expressions over the unit cube.

An expression is an immutable tree of nodes evaluated at a point
``(g1, ..., gm)`` of ``[0, 1]^m``.  The node set is closed so that every
node has a sound rule for propagating monotonicity, which lets the
generator check its ordering requirements without sampling.

Build expressions through the helper functions (``add``, ``mul``,
``power`` ...) or :func:`parse`; both canonicalize the tree the same way,
so ``parse(to_text(e), m) == e``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import product as _cartesian
from typing import Sequence

import numpy as np

from .errors import DomainError, ParseError

EQ_TOL = 1e-12


# ------------------------------------------------------------------ nodes


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()

    def __call__(self, *point: float) -> float:
        return evaluate(self, point)


@dataclass(frozen=True)
class Var(Expr):
    index: int  # 1-based, g1 is Var(1)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class PosInf(Expr):
    pass


@dataclass(frozen=True)
class NegInf(Expr):
    pass


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple


@dataclass(frozen=True)
class Product(Expr):
    factors: tuple


@dataclass(frozen=True)
class Power(Expr):
    child: Expr
    alpha: float


@dataclass(frozen=True)
class Complement(Expr):
    child: Expr


@dataclass(frozen=True)
class AffineMix(Expr):
    child: Expr
    theta: float


@dataclass(frozen=True)
class NegLog(Expr):
    child: Expr


@dataclass(frozen=True)
class NegLogComplement(Expr):
    child: Expr


@dataclass(frozen=True)
class Scale(Expr):
    child: Expr
    c: float


@dataclass(frozen=True)
class Ratio(Expr):
    num: Expr
    den: Expr
    den_min: float


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True)
class Exp(Expr):
    child: Expr


@dataclass(frozen=True, eq=False)
class Mass(Expr):
    """F(hi) - F(lo) for a baseline F.

    ``ordered`` records a caller guarantee that lo <= hi everywhere on the
    cube, which lets bounds treat the mass as nonnegative.
    """

    lo: Expr
    hi: Expr
    cdf: object
    ordered: bool = False

    def __eq__(self, other):
        return (isinstance(other, Mass) and self.lo == other.lo and self.hi == other.hi
                and self.cdf is other.cdf and self.ordered == other.ordered)

    def __hash__(self):
        return hash((self.lo, self.hi, id(self.cdf), self.ordered))


ONE = Const(1.0)
ZERO = Const(0.0)
INF = PosInf()
NEG_INF = NegInf()

_UNARY = (Power, Complement, AffineMix, NegLog, NegLogComplement, Scale, Neg, Exp)


def children(e: Expr) -> tuple:
    if isinstance(e, Sum):
        return e.terms
    if isinstance(e, Product):
        return e.factors
    if isinstance(e, _UNARY):
        return (e.child,)
    if isinstance(e, Ratio):
        return (e.num, e.den)
    if isinstance(e, Mass):
        return (e.lo, e.hi)
    return ()


def max_var(e: Expr) -> int:
    """Largest variable index used (0 for constants)."""
    if isinstance(e, Var):
        return e.index
    return max((max_var(c) for c in children(e)), default=0)


def is_constant(e: Expr) -> bool:
    return max_var(e) == 0


# ------------------------------------------------------------------ bounds


def _imul(a, b):
    # interval product with 0 * inf read as 0 (bounds only)
    def m(x, y):
        if x == 0 or y == 0:
            return 0.0
        return x * y
    vals = [m(a[0], b[0]), m(a[0], b[1]), m(a[1], b[0]), m(a[1], b[1])]
    return (min(vals), max(vals))


_WHOLE = (-math.inf, math.inf)


def bounds(e: Expr) -> tuple[float, float]:
    """Enclosure of the expression's range over [0, 1]^m."""
    if isinstance(e, Var):
        return (0.0, 1.0)
    if isinstance(e, Const):
        return (e.value, e.value)
    if isinstance(e, PosInf):
        return (math.inf, math.inf)
    if isinstance(e, NegInf):
        return (-math.inf, -math.inf)
    if isinstance(e, Sum):
        lo = hi = 0.0
        for t in e.terms:
            tl, th = bounds(t)
            lo, hi = lo + tl, hi + th
        if math.isnan(lo) or math.isnan(hi):
            return _WHOLE
        return (lo, hi)
    if isinstance(e, Product):
        acc = (1.0, 1.0)
        for f in e.factors:
            acc = _imul(acc, bounds(f))
        return acc
    if isinstance(e, Power):
        lo, hi = bounds(e.child)
        if e.alpha == 0:
            return (1.0, 1.0)
        if lo < 0:
            return _WHOLE
        return (lo ** e.alpha, hi ** e.alpha)
    if isinstance(e, Complement):
        lo, hi = bounds(e.child)
        return (1.0 - hi, 1.0 - lo)
    if isinstance(e, AffineMix):
        lo, hi = bounds(e.child)
        t = e.theta
        return ((1 - t) * lo + t, (1 - t) * hi + t)
    if isinstance(e, NegLog):
        lo, hi = bounds(e.child)
        if lo < 0:
            return _WHOLE
        return (_neg_log(hi), _neg_log(lo))
    if isinstance(e, NegLogComplement):
        lo, hi = bounds(e.child)
        if hi > 1:
            return _WHOLE
        return (_neg_log(1.0 - lo), _neg_log(1.0 - hi))
    if isinstance(e, Scale):
        lo, hi = bounds(e.child)
        if e.c == 0:
            return (0.0, 0.0)
        return (e.c * lo, e.c * hi)
    if isinstance(e, Neg):
        lo, hi = bounds(e.child)
        return (-hi, -lo)
    if isinstance(e, Exp):
        lo, hi = bounds(e.child)
        return (math.exp(lo), math.exp(hi))
    if isinstance(e, Ratio):
        nlo, nhi = bounds(e.num)
        dlo, dhi = bounds(e.den)
        dlo = max(dlo, e.den_min)
        if dhi < dlo:
            dhi = dlo
        if math.isinf(nlo) or math.isinf(nhi):
            return _WHOLE
        inv = (1.0 / dhi, 1.0 / dlo)
        return _imul((nlo, nhi), inv)
    if isinstance(e, Mass):
        llo, lhi = bounds(e.lo)
        hlo, hhi = bounds(e.hi)
        F = e.cdf.eval
        lo = float(F(hlo)) - float(F(lhi))
        hi = float(F(hhi)) - float(F(llo))
        if e.ordered:
            lo = max(lo, 0.0)
        return (max(lo, -1.0), min(hi, 1.0))
    raise TypeError(f"unknown node {e!r}")


def _neg_log(v: float) -> float:
    if v <= 0:
        return math.inf
    return -math.log(v)


# ------------------------------------------------------------------ builders


def const(c: float) -> Expr:
    c = float(c)
    if math.isnan(c):
        raise DomainError("NaN constant")
    if c == math.inf:
        return INF
    if c == -math.inf:
        return NEG_INF
    return Const(c)


def _const_value(e: Expr) -> float | None:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, PosInf):
        return math.inf
    if isinstance(e, NegInf):
        return -math.inf
    return None


def var(i: int) -> Var:
    if i < 1:
        raise DomainError("variable indices start at 1")
    return Var(int(i))


def _in_unit(e: Expr) -> bool:
    lo, hi = bounds(e)
    return lo >= 0.0 and hi <= 1.0


def add(*terms: Expr) -> Expr:
    flat: list = []
    for t in terms:
        flat.extend(t.terms if isinstance(t, Sum) else (t,))
    total = 0.0
    const_pos = None
    rest: list = []
    for t in flat:
        v = _const_value(t)
        if v is None:
            rest.append(t)
            continue
        if const_pos is None:
            const_pos = len(rest)
        total = total + v
        if math.isnan(total):
            raise DomainError("inf - inf in a sum of constants")
    if not rest:
        return const(total)
    if const_pos is not None and total != 0.0:
        rest.insert(const_pos, const(total))
    if len(rest) == 1:
        return rest[0]
    if len(rest) == 2 and const_pos is not None and total != 0.0:
        c, other = (rest[0], rest[1]) if const_pos == 0 else (rest[1], rest[0])
        cv = c.value if isinstance(c, Const) else None
        if cv is not None:
            if isinstance(other, Neg) and abs(cv - 1.0) <= EQ_TOL and _in_unit(other.child):
                return Complement(other.child)
            if isinstance(other, Scale) and 0.0 < cv < 1.0 and abs(cv + other.c - 1.0) <= EQ_TOL:
                return AffineMix(other.child, cv)
    return Sum(tuple(rest))


def neg(e: Expr) -> Expr:
    v = _const_value(e)
    if v is not None:
        return const(-v)
    if isinstance(e, Neg):
        return e.child
    return Neg(e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def mul(*factors: Expr) -> Expr:
    flat: list = []
    for f in factors:
        flat.extend(f.factors if isinstance(f, Product) else (f,))
    c = 1.0
    rest: list = []
    for f in flat:
        v = _const_value(f)
        if v is None:
            rest.append(f)
        else:
            if (c == 0 and math.isinf(v)) or (math.isinf(c) and v == 0):
                raise DomainError("0 * inf in a product of constants")
            c *= v
    if not rest:
        return const(c)
    if math.isinf(c):
        raise DomainError("infinite coefficient in a product")
    if c == 0.0:
        return ZERO
    core = rest[0] if len(rest) == 1 else Product(tuple(rest))
    if c == 1.0:
        return core
    if c > 0:
        return Scale(core, c)
    return neg(scale(core, -c))


def scale(e: Expr, c: float) -> Expr:
    c = float(c)
    if not c >= 0 or math.isinf(c):
        raise DomainError(f"scale factor must be finite and nonnegative, got {c}")
    return mul(Const(c), e)


def power(e: Expr, alpha: float) -> Expr:
    alpha = float(alpha)
    if not alpha >= 0 or math.isinf(alpha):
        raise DomainError(f"exponent must be finite and nonnegative, got {alpha}")
    v = _const_value(e)
    if v is not None:
        if v < 0:
            raise DomainError("negative base in a constant power")
        return const(v ** alpha)
    if alpha == 0.0:
        return ONE
    if alpha == 1.0:
        return e
    return Power(e, alpha)


def complement(e: Expr) -> Expr:
    return add(ONE, neg(e))


def affine_mix(e: Expr, theta: float) -> Expr:
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"mixing weight must lie in [0, 1], got {theta}")
    return add(Const(theta), scale(e, 1.0 - theta))


def neg_log(e: Expr) -> Expr:
    v = _const_value(e)
    if v is not None:
        if v < 0:
            raise DomainError("-ln of a negative constant")
        return const(_neg_log(v))
    if isinstance(e, Complement):
        return NegLogComplement(e.child)
    return NegLog(e)


def neg_log_complement(e: Expr) -> Expr:
    return neg_log(complement(e))


def ln(e: Expr) -> Expr:
    return neg(neg_log(e))


def exp_(e: Expr) -> Expr:
    v = _const_value(e)
    if v is not None:
        return const(math.exp(v))
    return Exp(e)


def ratio(num: Expr, den: Expr, den_min: float | None = None) -> Expr:
    """num / den with a certified positive denominator.

    Without ``den_min`` the certificate comes from interval bounds; with it,
    the declared bound is checked on a lattice of the cube (and must also be
    positive).
    """
    dv = _const_value(den)
    if dv is not None and den_min is None:
        if not (dv > 0 and math.isfinite(dv)):
            raise DomainError("division by a nonpositive constant")
        return mul(num, Const(1.0 / dv))
    lo, _ = bounds(den)
    if den_min is None:
        if not lo > 0:
            raise DomainError(
                "denominator is not certified positive; use ratio(num, den, lower_bound)"
            )
        den_min = lo
    den_min = float(den_min)
    if not (den_min > 0 and math.isfinite(den_min)):
        raise DomainError("declared denominator lower bound must be positive")
    if lo < den_min:
        m = max(max_var(den), max_var(num), 1)
        pts = lattice(m)
        vals = evaluate_many(den, pts)
        if np.any(vals < den_min * (1 - EQ_TOL)):
            raise DomainError(
                f"declared denominator bound {den_min} fails at a lattice point"
            )
    return Ratio(num, den, den_min)


def mass(lo: Expr, hi: Expr, cdf, ordered: bool = False) -> Expr:
    return Mass(lo, hi, cdf, ordered)


def substitute(e: Expr, mapping: dict) -> Expr:
    """Replace Var(i) by mapping[i] and re-canonicalize through the builders."""
    if isinstance(e, Var):
        return mapping.get(e.index, e)
    if isinstance(e, (Const, PosInf, NegInf)):
        return e
    if isinstance(e, Sum):
        return add(*(substitute(t, mapping) for t in e.terms))
    if isinstance(e, Product):
        return mul(*(substitute(f, mapping) for f in e.factors))
    if isinstance(e, Ratio):
        return ratio(substitute(e.num, mapping), substitute(e.den, mapping), e.den_min)
    if isinstance(e, Mass):
        return Mass(substitute(e.lo, mapping), substitute(e.hi, mapping), e.cdf, e.ordered)
    inner = substitute(e.child, mapping)
    if isinstance(e, Power):
        return power(inner, e.alpha)
    if isinstance(e, Complement):
        return complement(inner)
    if isinstance(e, AffineMix):
        return affine_mix(inner, e.theta)
    if isinstance(e, NegLog):
        return neg_log(inner)
    if isinstance(e, NegLogComplement):
        return neg_log_complement(inner)
    if isinstance(e, Scale):
        return scale(inner, e.c)
    if isinstance(e, Neg):
        return neg(inner)
    if isinstance(e, Exp):
        return exp_(inner)
    raise TypeError(f"unknown node {e!r}")


def lattice(m: int, levels: Sequence[float] | None = None) -> np.ndarray:
    """Corner-plus-interior lattice of [0,1]^m as an (m, N) array.

    9 levels per axis; above three variables the axes are grouped
    cyclically so the point count stays at 9**3.
    """
    levels = np.linspace(0.0, 1.0, 9) if levels is None else np.asarray(levels, float)
    k = min(m, 3)
    grid = np.array(list(_cartesian(levels, repeat=k)), dtype=float).T
    return np.vstack([grid[i % k] for i in range(m)])


# ------------------------------------------------------------------ evaluation


def _check_point(point, m_needed: int):
    arr = np.asarray(point, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.shape[0] < m_needed:
        raise DomainError(f"expression uses g{m_needed} but the point has {arr.shape[0]} entries")
    if np.any(~((arr >= 0) & (arr <= 1))):
        raise DomainError("evaluation point must lie in [0, 1]^m")
    return arr


def _ev(e: Expr, G):
    if isinstance(e, Var):
        return G[e.index - 1]
    if isinstance(e, Const):
        return e.value
    if isinstance(e, PosInf):
        return math.inf
    if isinstance(e, NegInf):
        return -math.inf
    if isinstance(e, Sum):
        acc = 0.0
        for t in e.terms:
            acc = acc + _ev(t, G)
        return acc
    if isinstance(e, Product):
        acc = 1.0
        for f in e.factors:
            acc = acc * _ev(f, G)
        return acc
    if isinstance(e, Power):
        return np.power(_ev(e.child, G), e.alpha)
    if isinstance(e, Complement):
        return 1.0 - _ev(e.child, G)
    if isinstance(e, AffineMix):
        return (1.0 - e.theta) * _ev(e.child, G) + e.theta
    if isinstance(e, NegLog):
        return -np.log(_ev(e.child, G))
    if isinstance(e, NegLogComplement):
        return -np.log1p(-_ev(e.child, G))
    if isinstance(e, Scale):
        return e.c * _ev(e.child, G)
    if isinstance(e, Neg):
        return -_ev(e.child, G)
    if isinstance(e, Exp):
        return np.exp(_ev(e.child, G))
    if isinstance(e, Ratio):
        den = _ev(e.den, G)
        if np.any(np.asarray(den) == 0):
            raise DomainError("ratio denominator is zero")
        return _ev(e.num, G) / den
    if isinstance(e, Mass):
        F = e.cdf.eval
        return np.asarray(F(_ev(e.hi, G)), float) - np.asarray(F(_ev(e.lo, G)), float)
    raise TypeError(f"unknown node {e!r}")


def evaluate_many(e: Expr, G) -> np.ndarray:
    """Evaluate at the columns of an (m, N) array; returns shape (N,)."""
    G = np.asarray(G, dtype=float)
    if G.ndim == 1:
        G = G.reshape(-1, 1)
    need = max_var(e)
    if G.shape[0] < need:
        raise DomainError(f"expression uses g{need} but only {G.shape[0]} rows were given")
    with np.errstate(all="ignore"):
        out = np.broadcast_to(np.asarray(_ev(e, G), dtype=float), (G.shape[1],)).copy()
    if np.any(np.isnan(out)):
        raise DomainError("indeterminate form while evaluating expression")
    return out


def evaluate(e: Expr, point) -> float:
    """Value at a single point of [0,1]^m, on the extended real line."""
    arr = _check_point(point, max_var(e))
    return float(evaluate_many(e, arr.reshape(-1, 1))[0])


def corner_values(e: Expr, m: int | None = None) -> tuple[float, float]:
    m = max(max_var(e), 1) if m is None else m
    return evaluate(e, np.zeros(m)), evaluate(e, np.ones(m))


# ------------------------------------------------------------------ directions


@dataclass(frozen=True)
class Direction:
    """Monotonicity in one variable: sign +1, -1, 0 (constant) or None (unknown)."""

    sign: int | None
    strict: bool = False

    @property
    def name(self) -> str:
        return {1: "nondecreasing", -1: "nonincreasing", 0: "constant", None: "unknown"}[self.sign]

    def __str__(self) -> str:
        if self.strict and self.sign in (1, -1):
            return "strictly " + ("increasing" if self.sign == 1 else "decreasing")
        return self.name


CONST_DIR = Direction(0)
UNKNOWN = Direction(None)
UP = Direction(1)
DOWN = Direction(-1)


def _flip(d: Direction) -> Direction:
    if d.sign in (None, 0):
        return d
    return Direction(-d.sign, d.strict)


def _combine(a: Direction, b: Direction) -> Direction:
    if a.sign is None or b.sign is None:
        return UNKNOWN
    if a.sign == 0:
        return b
    if b.sign == 0:
        return a
    if a.sign == b.sign:
        return Direction(a.sign, a.strict or b.strict)
    return UNKNOWN


def _weaken(d: Direction) -> Direction:
    return Direction(d.sign, False)


def _sign_of_interval(lo: float, hi: float) -> int | None:
    if lo == 0 and hi == 0:
        return 0
    if lo >= 0:
        return 1
    if hi <= 0:
        return -1
    return None


def _product_dirs(factors, m):
    dirs = [infer_direction(f, m) for f in factors]
    bnds = [bounds(f) for f in factors]
    out = []
    for i in range(m):
        moving = [k for k in range(len(factors)) if dirs[k][i].sign != 0]
        if not moving:
            out.append(CONST_DIR)
            continue
        others = [k for k in range(len(factors)) if k not in moving]
        rest = (1.0, 1.0)
        for k in others:
            rest = _imul(rest, bnds[k])
        rest_sign = _sign_of_interval(*rest)
        rest_strict = rest[0] > 0 or rest[1] < 0
        if rest_sign is None:
            out.append(UNKNOWN)
            continue
        if rest_sign == 0:
            out.append(CONST_DIR)
            continue
        if len(moving) == 1:
            d = dirs[moving[0]][i]
            d = d if rest_sign == 1 else _flip(d)
            out.append(d if rest_strict else _weaken(d))
            continue
        if any(bnds[k][0] < 0 for k in moving):
            out.append(UNKNOWN)
            continue
        d = CONST_DIR
        for k in moving:
            d = _combine(d, _weaken(dirs[k][i]))
        if d.sign is None:
            out.append(UNKNOWN)
            continue
        strict = rest_strict and any(
            dirs[k][i].strict and all(bnds[q][0] > 0 for q in moving if q != k) for k in moving
        )
        d = Direction(d.sign, strict)
        out.append(d if rest_sign == 1 else _flip(d))
    return tuple(out)


def _ratio_dirs(e: Ratio, m):
    dn = infer_direction(e.num, m)
    dd = infer_direction(e.den, m)
    nlo, nhi = bounds(e.num)
    share = None
    if isinstance(e.den, Sum) and e.num in e.den.terms and nlo >= 0:
        rest_terms = list(e.den.terms)
        rest_terms.remove(e.num)
        rest = rest_terms[0] if len(rest_terms) == 1 else Sum(tuple(rest_terms))
        if bounds(rest)[0] >= 0:
            share = rest
    out = []
    if share is not None:
        dr = infer_direction(share, m)
        rlo = bounds(share)[0]
        for i in range(m):
            a, r = dn[i], dr[i]
            d = _combine(_weaken(a), _flip(_weaken(r)))
            if d.sign in (1, -1):
                strict = ((a.strict and rlo > 0) or (r.strict and nlo > 0)
                          or (a.strict and r.strict))
                d = Direction(d.sign, strict)
            out.append(d)
        return tuple(out)
    nsign = _sign_of_interval(nlo, nhi)
    for i in range(m):
        a, b = dn[i], dd[i]
        if b.sign == 0:
            out.append(a)
        elif a.sign == 0:
            if nsign is None:
                out.append(UNKNOWN)
            elif nsign == 0:
                out.append(CONST_DIR)
            else:
                d = _flip(b) if nsign == 1 else b
                out.append(d if (nlo > 0 or nhi < 0) else _weaken(d))
        elif nlo >= 0:
            d = _combine(a, _flip(b))
            if d.sign in (1, -1):
                d = Direction(d.sign, a.strict or (b.strict and nlo > 0))
            out.append(d)
        else:
            out.append(UNKNOWN)
    return tuple(out)


def infer_direction(e: Expr, m: int | None = None) -> tuple:
    """Sound per-variable monotonicity, one Direction per g1..gm."""
    m = max(max_var(e), 1) if m is None else m
    if isinstance(e, Var):
        return tuple(Direction(1, True) if i + 1 == e.index else CONST_DIR for i in range(m))
    if isinstance(e, (Const, PosInf, NegInf)):
        return (CONST_DIR,) * m
    if isinstance(e, Sum):
        acc = (CONST_DIR,) * m
        for t in e.terms:
            acc = tuple(_combine(a, b) for a, b in zip(acc, infer_direction(t, m)))
        return acc
    if isinstance(e, Product):
        return _product_dirs(e.factors, m)
    if isinstance(e, Power):
        d = infer_direction(e.child, m)
        if e.alpha == 0:
            return (CONST_DIR,) * m
        if bounds(e.child)[0] < 0:
            return tuple(CONST_DIR if x.sign == 0 else UNKNOWN for x in d)
        return d
    if isinstance(e, (Complement, Neg)):
        return tuple(_flip(x) for x in infer_direction(e.child, m))
    if isinstance(e, AffineMix):
        if e.theta == 1.0:
            return (CONST_DIR,) * m
        return infer_direction(e.child, m)
    if isinstance(e, Scale):
        if e.c == 0:
            return (CONST_DIR,) * m
        return infer_direction(e.child, m)
    if isinstance(e, Exp):
        return infer_direction(e.child, m)
    if isinstance(e, NegLog):
        d = infer_direction(e.child, m)
        if bounds(e.child)[0] < 0:
            return tuple(CONST_DIR if x.sign == 0 else UNKNOWN for x in d)
        return tuple(_flip(x) for x in d)
    if isinstance(e, NegLogComplement):
        d = infer_direction(e.child, m)
        if bounds(e.child)[1] > 1:
            return tuple(CONST_DIR if x.sign == 0 else UNKNOWN for x in d)
        return d
    if isinstance(e, Ratio):
        return _ratio_dirs(e, m)
    if isinstance(e, Mass):
        hi = infer_direction(e.hi, m)
        lo = infer_direction(e.lo, m)
        return tuple(_weaken(_combine(a, _flip(b))) for a, b in zip(hi, lo))
    raise TypeError(f"unknown node {e!r}")


def direction_names(e: Expr, m: int | None = None) -> list[str]:
    return [d.name for d in infer_direction(e, m)]


def is_strict(e: Expr, m: int | None = None) -> bool:
    """True when some variable is certified strictly monotone."""
    return any(d.strict and d.sign in (1, -1) for d in infer_direction(e, m))


# ------------------------------------------------------------------ derivatives


class _NoSymbolic(Exception):
    pass


def _jvp(e: Expr, G, T):
    """Value and directional derivative along tangent rows T."""
    if isinstance(e, Var):
        return G[e.index - 1], T[e.index - 1]
    if isinstance(e, (Const, PosInf, NegInf)):
        return _ev(e, G), 0.0
    if isinstance(e, Sum):
        v, t = 0.0, 0.0
        for term in e.terms:
            a, da = _jvp(term, G, T)
            v, t = v + a, t + da
        return v, t
    if isinstance(e, Product):
        pairs = [_jvp(f, G, T) for f in e.factors]
        v = 1.0
        for a, _ in pairs:
            v = v * a
        t = 0.0
        for k, (_, dk) in enumerate(pairs):
            term = dk
            for q, (a, _) in enumerate(pairs):
                if q != k:
                    term = term * a
            t = t + term
        return v, t
    if isinstance(e, Power):
        a, da = _jvp(e.child, G, T)
        v = np.power(a, e.alpha)
        t = np.where(np.asarray(da) == 0, 0.0, e.alpha * np.power(a, e.alpha - 1.0) * da)
        return v, t
    if isinstance(e, Complement):
        a, da = _jvp(e.child, G, T)
        return 1.0 - a, -da
    if isinstance(e, AffineMix):
        a, da = _jvp(e.child, G, T)
        return (1.0 - e.theta) * a + e.theta, (1.0 - e.theta) * da
    if isinstance(e, NegLog):
        a, da = _jvp(e.child, G, T)
        return -np.log(a), np.where(np.asarray(da) == 0, 0.0, -da / a)
    if isinstance(e, NegLogComplement):
        a, da = _jvp(e.child, G, T)
        return -np.log1p(-a), np.where(np.asarray(da) == 0, 0.0, da / (1.0 - a))
    if isinstance(e, Scale):
        a, da = _jvp(e.child, G, T)
        return e.c * a, e.c * da
    if isinstance(e, Neg):
        a, da = _jvp(e.child, G, T)
        return -a, -da
    if isinstance(e, Exp):
        a, da = _jvp(e.child, G, T)
        v = np.exp(a)
        return v, v * da
    if isinstance(e, Ratio):
        n, dn = _jvp(e.num, G, T)
        d, dd = _jvp(e.den, G, T)
        return n / d, (dn * d - n * dd) / (d * d)
    if isinstance(e, Mass):
        f = getattr(e.cdf, "density", None)
        if f is None:
            raise _NoSymbolic()
        lo, dlo = _jvp(e.lo, G, T)
        hi, dhi = _jvp(e.hi, G, T)
        F = e.cdf.eval
        v = np.asarray(F(hi), float) - np.asarray(F(lo), float)
        t = _density_term(f, hi, dhi) - _density_term(f, lo, dlo)
        return v, t
    raise TypeError(f"unknown node {e!r}")


def _density_term(f, x, dx):
    x = np.asarray(x, float)
    dx = np.broadcast_to(np.asarray(dx, float), x.shape) if x.ndim else np.asarray(dx, float)
    safe = np.where(np.isfinite(x), x, 0.0)
    return np.where((dx == 0) | ~np.isfinite(x), 0.0, np.asarray(f(safe), float) * dx)


def jvp_many(e: Expr, G, T) -> tuple[np.ndarray, np.ndarray, str]:
    """Values and derivatives along T at the columns of G.

    Returns ``(value, derivative, method)`` where method is "symbolic" or
    "finite_difference".
    """
    G = np.asarray(G, dtype=float)
    T = np.asarray(T, dtype=float)
    n = G.shape[1]
    try:
        with np.errstate(all="ignore"):
            v, t = _jvp(e, G, T)
        v = np.broadcast_to(np.asarray(v, float), (n,)).copy()
        t = np.broadcast_to(np.asarray(t, float), (n,)).copy()
        return v, t, "symbolic"
    except _NoSymbolic:
        pass
    v = evaluate_many(e, G)
    h = 1e-6
    t = np.zeros(n)
    for z in range(G.shape[0]):
        if not np.any(T[z] != 0):
            continue
        up = G.copy()
        dn = G.copy()
        up[z] = np.clip(G[z] + h, 0.0, 1.0)
        dn[z] = np.clip(G[z] - h, 0.0, 1.0)
        slope = (evaluate_many(e, up) - evaluate_many(e, dn)) / (up[z] - dn[z])
        t = t + np.where(T[z] == 0, 0.0, slope * T[z])
    return v, t, "finite_difference"


def partial_with_method(e: Expr, var_index: int, point) -> tuple[float, str]:
    m = max(max_var(e), var_index, 1)
    arr = _check_point(point, m)
    m = arr.shape[0]
    if not 1 <= var_index <= m:
        raise DomainError(f"no variable g{var_index}")
    T = np.zeros((m, 1))
    T[var_index - 1, 0] = 1.0
    v, t, method = jvp_many(e, arr.reshape(-1, 1), T)
    if not (np.isfinite(v[0]) and np.isfinite(t[0])):
        raise DomainError("expression or its derivative is not finite at the point")
    return float(t[0]), method


def partial(e: Expr, var_index: int, point) -> float:
    """d e / d g_{var_index} at a point (symbolic, else central difference)."""
    return partial_with_method(e, var_index, point)[0]


# ------------------------------------------------------------------ parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]+\d*)"
    r"|(?P<op>[-+*/^(),]))"
)


class _Parser:
    def __init__(self, text: str, m: int):
        self.text = text
        self.m = m
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = _TOKEN.match(text, pos)
            if match is None or match.end() == pos:
                self.fail("unexpected character", pos + len(text[pos:]) - len(text[pos:].lstrip()))
            kind = match.lastgroup
            start = match.start(kind)
            self.tokens.append((kind, match.group(kind), start))
            pos = match.end()
        self.i = 0

    def fail(self, msg: str, char_pos: int | None = None):
        if char_pos is None:
            char_pos = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        raise ParseError(msg, len(self.text[:char_pos].encode("utf-8")))

    def peek(self, k: int = 0):
        j = self.i + k
        return self.tokens[j] if j < len(self.tokens) else (None, None, len(self.text))

    def take(self, value: str | None = None, kind: str | None = None):
        tok = self.peek()
        if tok[0] is None:
            self.fail("unexpected end of input")
        if value is not None and tok[1] != value:
            self.fail(f"expected {value!r}")
        if kind is not None and tok[0] != kind:
            self.fail(f"expected {kind}")
        self.i += 1
        return tok

    def parse(self) -> Expr:
        if not self.tokens:
            raise ParseError("empty expression", 0)
        e = self.expr()
        if self.i != len(self.tokens):
            self.fail("unexpected trailing input")
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else neg(t))
        return add(*terms) if len(terms) > 1 else terms[0]

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            pos = self.peek()[2]
            rhs = self.unary()
            if op == "*":
                e = mul(e, rhs)
            else:
                try:
                    e = ratio(e, rhs)
                except DomainError as exc:
                    self.fail(str(exc), pos)
        return e

    def unary(self) -> Expr:
        if self.peek()[1] == "-" and self.peek(1)[1] not in ("ln", "inf"):
            self.take()
            return neg(self.unary())
        return self.factor()

    def factor(self) -> Expr:
        base = self.base()
        if self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            if tok[1] == "(":
                self.take()
                _, text, pos = self.take(kind="num")
                self.take(")")
            else:
                _, text, pos = self.take(kind="num")
            try:
                base = power(base, float(text))
            except DomainError as exc:
                self.fail(str(exc), pos)
        return base

    def call_args(self) -> list[Expr]:
        self.take("(")
        args = [self.expr()]
        while self.peek()[1] == ",":
            self.take()
            args.append(self.expr())
        self.take(")")
        return args

    def base(self) -> Expr:
        kind, text, pos = self.peek()
        if kind is None:
            self.fail("unexpected end of input")
        if text == "-":
            nxt = self.peek(1)[1]
            self.take()
            if nxt == "inf":
                self.take()
                return NEG_INF
            self.take("ln")
            (arg,) = self.one_arg(pos)
            return neg_log(arg)
        if kind == "num":
            self.take()
            return const(float(text))
        if text == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind == "name":
            self.take()
            g = re.fullmatch(r"g(\d+)", text)
            if g:
                k = int(g.group(1))
                if not 1 <= k <= self.m:
                    self.fail(f"variable {text} out of range for m={self.m}", pos)
                return Var(k)
            if text == "inf":
                return INF
            if text == "ln":
                (arg,) = self.one_arg(pos)
                return ln(arg)
            if text == "exp":
                (arg,) = self.one_arg(pos)
                return exp_(arg)
            if text == "ratio":
                args = self.call_args()
                if len(args) != 3 or _const_value(args[2]) is None:
                    self.fail("ratio takes (numerator, denominator, constant lower bound)", pos)
                try:
                    return ratio(args[0], args[1], _const_value(args[2]))
                except DomainError as exc:
                    self.fail(str(exc), pos)
            self.fail(f"unknown name {text!r}", pos)
        self.fail(f"unexpected token {text!r}", pos)

    def one_arg(self, pos: int) -> list[Expr]:
        args = self.call_args()
        if len(args) != 1:
            self.fail("function takes one argument", pos)
        return args


def parse(text: str, m: int) -> Expr:
    """Parse an expression over g1..gm."""
    if not isinstance(text, str):
        raise ParseError("expression must be a string", 0)
    if m < 1:
        raise ParseError("arity m must be positive", 0)
    try:
        return _Parser(text, m).parse()
    except ParseError:
        raise
    except DomainError as exc:
        raise ParseError(str(exc), len(text.encode("utf-8"))) from exc


# ------------------------------------------------------------------ printing


def _num(x: float) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "(-inf)"
    s = repr(float(x))
    return f"({s})" if x < 0 else s


def _wrap(e: Expr) -> str:
    if isinstance(e, (Var, PosInf)) or (isinstance(e, Const) and e.value >= 0):
        return to_text(e)
    return f"({to_text(e)})"


def to_text(e: Expr) -> str:
    """Render in the parser's grammar."""
    if isinstance(e, Var):
        return f"g{e.index}"
    if isinstance(e, Const):
        return _num(e.value)
    if isinstance(e, PosInf):
        return "inf"
    if isinstance(e, NegInf):
        return "-inf"
    if isinstance(e, Sum):
        parts = [_wrap(e.terms[0])]
        for t in e.terms[1:]:
            if isinstance(t, Neg):
                parts.append(f"- {_wrap(t.child)}")
            else:
                parts.append(f"+ {_wrap(t)}")
        return " ".join(parts)
    if isinstance(e, Product):
        return "*".join(_wrap(f) for f in e.factors)
    if isinstance(e, Power):
        return f"{_wrap(e.child)}^{_num(e.alpha)}"
    if isinstance(e, Complement):
        return f"1 - {_wrap(e.child)}"
    if isinstance(e, AffineMix):
        return f"{_num(e.theta)} + {_num(1.0 - e.theta)}*{_wrap(e.child)}"
    if isinstance(e, NegLog):
        return f"-ln({to_text(e.child)})"
    if isinstance(e, NegLogComplement):
        return f"-ln(1 - {_wrap(e.child)})"
    if isinstance(e, Scale):
        return f"{_num(e.c)}*{_wrap(e.child)}"
    if isinstance(e, Neg):
        if isinstance(e.child, NegLog):
            return f"ln({to_text(e.child.child)})"
        return f"-{_wrap(e.child)}"
    if isinstance(e, Exp):
        return f"exp({to_text(e.child)})"
    if isinstance(e, Ratio):
        return f"ratio({to_text(e.num)}, {to_text(e.den)}, {_num(e.den_min)})"
    if isinstance(e, Mass):
        raise DomainError("mass nodes have no text form")
    raise TypeError(f"unknown node {e!r}")


def numeric_direction_scan(
    e: Expr, m: int, points: int = 33, fixed: Sequence[float] = (0.0, 0.5, 1.0)
) -> list[float]:
    """Worst violation of the inferred direction, per variable.

    Each variable is swept over ``points`` grid values while the others sit
    at every combination of ``fixed``.  Infinite steps are skipped.
    """
    dirs = infer_direction(e, m)
    sweep = np.linspace(0.0, 1.0, points)
    worst = []
    for i in range(m):
        d = dirs[i]
        bad = 0.0
        for others in _cartesian(fixed, repeat=m - 1):
            G = np.empty((m, points))
            rest = list(others)
            for r in range(m):
                G[r] = sweep if r == i else rest.pop(0)
            vals = evaluate_many(e, G)
            with np.errstate(invalid="ignore"):
                steps = np.diff(vals)
            steps = steps[np.isfinite(steps)]
            if d.sign == 1:
                bad = max(bad, float(np.max(-steps, initial=0.0)))
            elif d.sign == -1:
                bad = max(bad, float(np.max(steps, initial=0.0)))
            elif d.sign == 0:
                bad = max(bad, float(np.max(np.abs(steps), initial=0.0)))
        worst.append(bad)
    return worst


__all__ = [
    "Expr", "Var", "Const", "PosInf", "NegInf", "Sum", "Product", "Power", "Complement",
    "AffineMix", "NegLog", "NegLogComplement", "Scale", "Ratio", "Neg", "Exp", "Mass",
    "Direction", "parse", "to_text", "evaluate", "evaluate_many", "corner_values",
    "infer_direction", "direction_names", "is_strict", "partial", "partial_with_method",
    "jvp_many", "bounds", "max_var", "is_constant", "lattice", "numeric_direction_scan",
    "var", "const", "add", "sub", "neg", "mul", "scale", "power", "complement",
    "affine_mix", "neg_log", "neg_log_complement", "ln", "exp_", "ratio", "mass", "substitute",
    "ONE", "ZERO", "INF", "NEG_INF",
]

