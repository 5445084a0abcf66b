"""Named special cases of the product-form generators.

``subcase(row, bindings)`` builds the GeneratorSpec for one row, filling
in every slot the row fixes.  Ids follow the ``<k>S1C1.2`` / ``<k>S1C1.3``
naming.  Bindings are a dict; expressions may be given as DSL strings.

Common binding keys::

    G        list of baselines G_1..G_m (or a single one)
    F        integrand baseline (rows with a uniform F build it themselves)
    mu, ell, m, nu        limit maps (lists for the n-term rows 1S and 7S)
    u, v, theta, alpha    product-form pieces
    gamma, mu_f, ell_f, nu_f, m_f   univariate maps and mixing weight for rows 15-20
"""
from __future__ import annotations

import math

from . import dsl
from .baseline import make_uniform
from .dsl import Expr
from .errors import DomainError, SpecError
from .generator import (
    COMPLEMENTARY,
    DIRECT,
    GeneratorSpec,
    product_form_complementary,
    product_form_direct,
)

DIRECT_ROWS = tuple(f"{k}S1C1.2" for k in range(1, 23))
COMPLEMENTARY_ROWS = tuple(f"{k}S1C1.3" for k in range(13, 23))
FAST_PATH_ROWS = ("4S1C1.2", "5S1C1.2", "6S1C1.2", "10S1C1.2", "11S1C1.2", "12S1C1.2",
                  "14S1C1.2", "14S1C1.3")


def subcase_ids() -> list[str]:
    return list(DIRECT_ROWS + COMPLEMENTARY_ROWS)


class _Bindings:
    def __init__(self, row: str, raw: dict):
        self.row = row
        self.raw = dict(raw)
        G = self.raw.get("G")
        if G is None:
            raise SpecError(f"{row}: missing binding 'G'")
        self.G = list(G) if isinstance(G, (list, tuple)) else [G]
        self.m = len(self.G)

    def expr(self, key: str, arity: int | None = None) -> Expr:
        if key not in self.raw:
            raise SpecError(f"{self.row}: missing binding {key!r}")
        return _as_expr(self.raw[key], self.m if arity is None else arity)

    def exprs(self, key: str) -> list[Expr]:
        if key not in self.raw:
            raise SpecError(f"{self.row}: missing binding {key!r}")
        val = self.raw[key]
        items = val if isinstance(val, (list, tuple)) else [val]
        return [_as_expr(v, self.m) for v in items]

    def value(self, key: str, default=None):
        if key in self.raw:
            return self.raw[key]
        if default is None:
            raise SpecError(f"{self.row}: missing binding {key!r}")
        return default

    def floats(self, key: str, default=None) -> list[float]:
        val = self.value(key, default)
        return [float(v) for v in (val if isinstance(val, (list, tuple)) else [val])]


def _as_expr(v, m: int) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, str):
        return dsl.parse(v, m)
    if isinstance(v, (int, float)):
        return dsl.const(v)
    raise SpecError(f"cannot use {v!r} as an expression")


def _corner(e: Expr, m: int, which: int) -> float:
    return dsl.corner_values(e, m)[which]


def _uniform(lo: float, hi: float, row: str):
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise DomainError(f"{row}: uniform-slope row needs finite corner values with "
                          f"lo < hi, got [{lo}, {hi}]")
    return make_uniform(lo, hi)


def _pinned(e: Expr, m: int, which: int) -> Expr:
    return dsl.const(_corner(e, m, which))


def _spec(form, U, V, mu, ell, ms, nus, F, b: _Bindings) -> GeneratorSpec:
    return GeneratorSpec(form, U, V, list(mu), list(ell), list(ms), list(nus), F, b.G, b.row)


def _null_pair(ell: Expr, m: int) -> tuple[Expr, Expr]:
    # identical m_j = nu_j make the second sum vanish; pinning them at
    # l_j(0) keeps the lower-corner conditions satisfiable
    c = _pinned(ell, m, 0)
    return c, c


def _one_term_plain(b: _Bindings, mu: Expr, ell: Expr, F) -> GeneratorSpec:
    ms, nus = _null_pair(ell, b.m)
    return _spec(DIRECT, dsl.ONE, dsl.ONE, [mu], [ell], [ms], [nus], F, b)


def _nine(b: _Bindings, ms: Expr, nus: Expr, F) -> GeneratorSpec:
    return _spec(DIRECT, dsl.ONE, dsl.ONE, [dsl.INF], [dsl.NEG_INF], [ms], [nus], F, b)


def _products(b: _Bindings, complementary: bool = False):
    theta = b.floats("theta")
    alpha = b.floats("alpha")
    k = len(theta)
    # a u (or v) slot is free only when some factor actually depends on it
    u_used = any((t > 0 if complementary else t < 1) and a > 0 for t, a in zip(theta, alpha))
    v_used = any((t < 1 if complementary else t > 0) and a > 0 for t, a in zip(theta, alpha))
    u = b.exprs("u") if u_used or "u" in b.raw else [dsl.var(1)] * k
    v = b.exprs("v") if v_used or "v" in b.raw else [dsl.complement(dsl.var(1))] * k
    return u[:k], v[:k], theta, alpha, u, v


def _compose(f: Expr, inner: Expr) -> Expr:
    return dsl.substitute(f, {1: inner})


def _rows_15_20(b: _Bindings, row: int, complementary: bool) -> GeneratorSpec:
    u_all, v_all = b.exprs("u"), b.exprs("v")
    u_k, v_k, theta, alpha, _, _ = _products(b, complementary)
    k = len(theta)
    if len(u_all) != k + 1 or len(v_all) != k + 1:
        raise SpecError(f"{b.row}: u and v need k + 1 = {k + 1} entries (the last feeds the limits)")
    gamma = float(b.value("gamma"))
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"{b.row}: gamma must lie in [0, 1]")
    u_last, v_last = u_all[k], v_all[k]
    if not complementary:
        hi_arg = dsl.affine_mix(u_last, gamma)   # (1 - gamma) u_{k+1} + gamma
        lo_arg = dsl.scale(v_last, gamma)        # gamma v_{k+1}
    else:
        hi_arg = dsl.affine_mix(v_last, gamma)   # (1 - gamma) v_{k+1} + gamma
        lo_arg = dsl.scale(u_last, gamma)        # gamma u_{k+1}
    uni = lambda key: b.expr(key, 1)  # noqa: E731
    inf, ninf = dsl.INF, dsl.NEG_INF
    if not complementary:
        table = {
            15: lambda: (_compose(uni("mu_f"), hi_arg), _compose(uni("ell_f"), hi_arg),
                         _compose(uni("ell_f"), lo_arg), _compose(uni("mu_f"), lo_arg)),
            16: lambda: (_compose(uni("mu_f"), hi_arg), ninf, ninf, _compose(uni("mu_f"), lo_arg)),
            17: lambda: (inf, _compose(uni("ell_f"), hi_arg), _compose(uni("ell_f"), lo_arg), inf),
            18: lambda: (_compose(uni("nu_f"), lo_arg), _compose(uni("m_f"), lo_arg),
                         _compose(uni("m_f"), hi_arg), _compose(uni("nu_f"), hi_arg)),
            19: lambda: (_compose(uni("nu_f"), lo_arg), ninf, ninf, _compose(uni("nu_f"), hi_arg)),
            20: lambda: (inf, _compose(uni("m_f"), lo_arg), _compose(uni("m_f"), hi_arg), inf),
        }
    else:
        table = {
            15: lambda: (_compose(uni("mu_f"), lo_arg), _compose(uni("ell_f"), lo_arg),
                         _compose(uni("ell_f"), hi_arg), _compose(uni("mu_f"), hi_arg)),
            16: lambda: (_compose(uni("mu_f"), lo_arg), ninf, ninf, _compose(uni("mu_f"), hi_arg)),
            17: lambda: (inf, _compose(uni("ell_f"), lo_arg), _compose(uni("ell_f"), hi_arg), inf),
            18: lambda: (_compose(uni("m_f"), lo_arg), _compose(uni("nu_f"), lo_arg),
                         _compose(uni("nu_f"), hi_arg), _compose(uni("m_f"), hi_arg)),
            19: lambda: (_compose(uni("m_f"), lo_arg), ninf, ninf, _compose(uni("m_f"), hi_arg)),
            20: lambda: (inf, _compose(uni("nu_f"), lo_arg), _compose(uni("nu_f"), hi_arg), inf),
        }
    mu, ell, ms, nus = table[row]()
    maker = product_form_complementary if complementary else product_form_direct
    spec = maker(u_k, v_k, theta, alpha, [(mu, ell, ms, nus)], b.value("F"), b.G, b.row)
    return spec


def _direct_row(k: int, b: _Bindings) -> GeneratorSpec:
    m = b.m
    if k == 1:
        mus, ells = b.exprs("mu"), b.exprs("ell")
        if len(mus) != len(ells):
            raise SpecError(f"{b.row}: mu and ell must have the same length")
        pairs = [_null_pair(e, m) for e in ells]
        return _spec(DIRECT, dsl.ONE, dsl.ONE, mus, ells, [p[0] for p in pairs],
                     [p[1] for p in pairs], b.value("F"), b)
    if k == 2:
        u = b.exprs("u")
        alpha = b.floats("alpha")
        v = b.exprs("v") if "v" in b.raw else [dsl.complement(dsl.var(1))] * len(u)
        mu, ell = b.expr("mu"), b.expr("ell")
        ms, nus = _null_pair(ell, m)
        return product_form_direct(u, v, [0.0] * len(u), alpha, [(mu, ell, ms, nus)],
                                   b.value("F"), b.G, b.row)
    if k == 3:
        return _one_term_plain(b, b.expr("mu"), b.expr("ell"), b.value("F"))
    if k == 4:
        mu, ell = b.expr("mu"), b.expr("ell")
        F = _uniform(_corner(ell, m, 1), _corner(mu, m, 1), b.row)
        return _one_term_plain(b, mu, ell, F)
    if k == 5:
        mu = b.expr("mu")
        F = _uniform(_corner(mu, m, 0), _corner(mu, m, 1), b.row)
        return _one_term_plain(b, mu, _pinned(mu, m, 0), F)
    if k == 6:
        ell = b.expr("ell")
        F = _uniform(_corner(ell, m, 1), _corner(ell, m, 0), b.row)
        return _one_term_plain(b, _pinned(ell, m, 0), ell, F)
    if k == 7:
        ms, nus = b.exprs("m"), b.exprs("nu")
        n = len(ms)
        if len(nus) != n:
            raise SpecError(f"{b.row}: m and nu must have the same length")
        # the first term carries all of F's mass, the rest are empty at +inf
        mus = [dsl.INF] * n
        ells = [dsl.NEG_INF] + [dsl.INF] * (n - 1)
        return _spec(DIRECT, dsl.ONE, dsl.ONE, mus, ells, ms, nus, b.value("F"), b)
    if k == 8:
        v = b.exprs("v")
        alpha = b.floats("alpha")
        u = b.exprs("u") if "u" in b.raw else [dsl.var(1)] * len(v)
        return product_form_direct(u, v, [1.0] * len(v), alpha,
                                   [(dsl.INF, dsl.NEG_INF, b.expr("m"), b.expr("nu"))],
                                   b.value("F"), b.G, b.row)
    if k == 9:
        return _nine(b, b.expr("m"), b.expr("nu"), b.value("F"))
    if k == 10:
        ms, nus = b.expr("m"), b.expr("nu")
        F = _uniform(_corner(ms, m, 0), _corner(nus, m, 0), b.row)
        return _nine(b, ms, nus, F)
    if k == 11:
        nus = b.expr("nu")
        F = _uniform(_corner(nus, m, 1), _corner(nus, m, 0), b.row)
        return _nine(b, _pinned(nus, m, 1), nus, F)
    if k == 12:
        ms = b.expr("m")
        F = _uniform(_corner(ms, m, 0), _corner(ms, m, 1), b.row)
        return _nine(b, ms, _pinned(ms, m, 1), F)
    if k == 13:
        return _spec(DIRECT, dsl.ONE, dsl.ONE, [b.expr("mu")], [b.expr("ell")], [b.expr("m")],
                     [b.expr("nu")], b.value("F"), b)
    if k == 14:
        mu, ell, ms, nus = b.expr("mu"), b.expr("ell"), b.expr("m"), b.expr("nu")
        # a translate of the printed slope interval; differences are unchanged
        F = _uniform(_corner(ell, m, 1), _corner(mu, m, 1), b.row)
        return _spec(DIRECT, dsl.ONE, dsl.ONE, [mu], [ell], [ms], [nus], F, b)
    if 15 <= k <= 20:
        return _rows_15_20(b, k, complementary=False)
    if k == 21:
        u, v, theta, alpha, _, _ = _products(b)
        lim = (b.expr("mu"), b.expr("ell"), b.expr("m"), b.expr("nu"))
        return product_form_direct(u, v, theta, alpha, [lim], b.value("F"), b.G, b.row)
    if k == 22:
        u, v, theta, alpha, _, _ = _products(b)
        if any(a <= 0 for a in alpha):
            raise DomainError(f"{b.row}: every alpha must be positive")
        F = b.value("F", make_uniform(0.0, 1.0))
        lim = (dsl.INF, dsl.NEG_INF, dsl.NEG_INF, dsl.INF)
        return product_form_direct(u, v, theta, alpha, [lim], F, b.G, b.row)
    raise SpecError(f"unknown sub-case {b.row!r}")


def _complementary_row(k: int, b: _Bindings) -> GeneratorSpec:
    m = b.m
    if k == 13:
        return _spec(COMPLEMENTARY, dsl.ONE, dsl.ONE, [b.expr("mu")], [b.expr("ell")],
                     [b.expr("m")], [b.expr("nu")], b.value("F"), b)
    if k == 14:
        mu, ell, ms, nus = b.expr("mu"), b.expr("ell"), b.expr("m"), b.expr("nu")
        F = _uniform(_corner(ms, m, 0), _corner(nus, m, 0), b.row)
        return _spec(COMPLEMENTARY, dsl.ONE, dsl.ONE, [mu], [ell], [ms], [nus], F, b)
    if 15 <= k <= 20:
        return _rows_15_20(b, k, complementary=True)
    if k == 21:
        u, v, theta, alpha, _, _ = _products(b, True)
        lim = (b.expr("mu"), b.expr("ell"), b.expr("m"), b.expr("nu"))
        return product_form_complementary(u, v, theta, alpha, [lim], b.value("F"), b.G, b.row)
    if k == 22:
        u, v, theta, alpha, _, _ = _products(b, True)
        if any(a <= 0 for a in alpha):
            raise DomainError(f"{b.row}: every alpha must be positive")
        F = b.value("F", make_uniform(0.0, 1.0))
        lim = (dsl.INF, dsl.NEG_INF, dsl.NEG_INF, dsl.INF)
        return product_form_complementary(u, v, theta, alpha, [lim], F, b.G, b.row)
    raise SpecError(f"unknown sub-case {b.row!r}")


def _parse_row(row: str) -> tuple[int, bool]:
    if row in DIRECT_ROWS:
        return int(row.split("S")[0]), False
    if row in COMPLEMENTARY_ROWS:
        return int(row.split("S")[0]), True
    raise SpecError(f"unknown sub-case {row!r}")


def subcase(row: str, bindings: dict) -> GeneratorSpec:
    """GeneratorSpec for one table row with its fixed slots filled in."""
    k, comp = _parse_row(row)
    b = _Bindings(row, bindings)
    return _complementary_row(k, b) if comp else _direct_row(k, b)


def fast_path(row: str, bindings: dict) -> Expr:
    """Closed-form H of a uniform-slope row, as an expression in g."""
    if row not in FAST_PATH_ROWS:
        raise SpecError(f"{row} has no closed-form fast path")
    b = _Bindings(row, bindings)
    m = b.m
    k, comp = _parse_row(row)

    def c(e, which):
        return dsl.const(_corner(e, m, which))

    def normalized(top: Expr, bottom: float) -> Expr:
        return dsl.mul(top, dsl.const(1.0 / bottom))

    if comp:  # 14S1C1.3
        mu, ell, ms, nus = b.expr("mu"), b.expr("ell"), b.expr("m"), b.expr("nu")
        num = dsl.add(nus, dsl.neg(ms), dsl.neg(mu), ell)
        den = _corner(nus, m, 0) - _corner(ms, m, 0) - _corner(mu, m, 0) + _corner(ell, m, 0)
        return dsl.complement(normalized(num, den)) if den > 0 else _bad(row)
    if k == 4:
        mu, ell = b.expr("mu"), b.expr("ell")
        return normalized(dsl.sub(mu, ell), _corner(mu, m, 1) - _corner(ell, m, 1))
    if k == 5:
        mu = b.expr("mu")
        return normalized(dsl.sub(mu, c(mu, 0)), _corner(mu, m, 1) - _corner(mu, m, 0))
    if k == 6:
        ell = b.expr("ell")
        return normalized(dsl.sub(ell, c(ell, 0)), _corner(ell, m, 1) - _corner(ell, m, 0))
    if k == 10:
        ms, nus = b.expr("m"), b.expr("nu")
        frac = normalized(dsl.sub(nus, ms), _corner(nus, m, 0) - _corner(ms, m, 0))
        return dsl.sub(dsl.ONE, frac)
    if k == 11:
        nus = b.expr("nu")
        return normalized(dsl.sub(nus, c(nus, 0)), _corner(nus, m, 1) - _corner(nus, m, 0))
    if k == 12:
        ms = b.expr("m")
        return normalized(dsl.sub(ms, c(ms, 0)), _corner(ms, m, 1) - _corner(ms, m, 0))
    mu, ell, ms, nus = b.expr("mu"), b.expr("ell"), b.expr("m"), b.expr("nu")  # 14S1C1.2
    num = dsl.add(mu, dsl.neg(ell), dsl.neg(nus), ms)
    den = _corner(mu, m, 1) - _corner(ell, m, 1) - _corner(nus, m, 1) + _corner(ms, m, 1)
    return normalized(num, den)


def _bad(row):
    raise DomainError(f"{row}: degenerate normalizing constant")


__all__ = ["subcase", "subcase_ids", "fast_path", "DIRECT_ROWS", "COMPLEMENTARY_ROWS",
           "FAST_PATH_ROWS"]
