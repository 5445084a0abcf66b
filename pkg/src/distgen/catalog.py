"""Known generalized families with closed forms and generator recipes.

Every entry carries the literature CDF written directly in terms of G and
one or more *routes*: functions building a GeneratorSpec through a table
row of :mod:`distgen.subcases`.  ``reduction_residual`` compares the two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import betaln, gammaln

from . import dsl
from .baseline import (
    BaselineCdf,
    make_beta,
    make_beta_type3,
    make_gamma,
    make_kumaraswamy_kernel,
    make_kummer_beta,
    make_power,
)
from .errors import DomainError, SpecError
from .generator import GeneratorSpec, build
from .numerics import regularized_incomplete_beta, regularized_lower_gamma
from .subcases import subcase


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: tuple            # ((name, domain text, check), ...)
    closed_form: Callable    # (params dict, G values) -> H values
    routes: dict             # row id -> (params dict, Gs) -> GeneratorSpec
    presets: tuple
    degenerate: dict | None = None
    title: str = ""
    notes: tuple = field(default=())

    @property
    def param_names(self) -> tuple:
        return tuple(p[0] for p in self.params)

    def check_params(self, params: dict) -> dict:
        names = self.param_names
        if set(params) != set(names):
            raise DomainError(f"{self.name} expects parameters {list(names)}, got {sorted(params)}")
        out = {}
        for pname, domain, ok in self.params:
            v = float(params[pname])
            if not ok(v):
                raise DomainError(f"{self.name}: {pname}={v} outside {domain}")
            out[pname] = v
        return out


_POS = ("> 0", lambda v: v > 0 and math.isfinite(v))
_REAL = ("finite", math.isfinite)
_NONZERO = ("finite, != 0", lambda v: v != 0 and math.isfinite(v))


def _p(name, dom=_POS):
    return (name, dom[0], dom[1])


G1 = dsl.var(1)


def _ibeta(x, a, b):
    return regularized_incomplete_beta(np.clip(x, 0.0, 1.0), a, b)


def _pgamma(x, a, rate):
    return regularized_lower_gamma(x, a, rate)


def _neg_log1m(g):
    with np.errstate(divide="ignore"):
        return -np.log1p(-g)


def _neg_log(g):
    with np.errstate(divide="ignore"):
        return -np.log(g)


def _mo_ratio(g, b):
    return g / (g + b * (1.0 - g))


def _mo_expr(b: float) -> dsl.Expr:
    # G / (G + b(1 - G)); the denominator never drops below min(1, b)
    return dsl.ratio(G1, dsl.add(G1, dsl.scale(dsl.complement(G1), b)), min(1.0, b))


def _mo_tail_expr(b: float) -> dsl.Expr:
    return dsl.ratio(dsl.scale(dsl.complement(G1), b),
                     dsl.add(G1, dsl.scale(dsl.complement(G1), b)), min(1.0, b))


def _kummer_closed(p, g):
    # term-wise integration of exp(-ct) = sum (-c)^k t^k / k!
    a, b, c = p["a"], p["b"], p["c"]
    g = np.asarray(g, float)
    num = np.zeros_like(g)
    den = 0.0
    for k in range(400):
        lw = k * math.log(abs(c)) - gammaln(k + 1) + betaln(a + k, b) if c != 0 else (
            betaln(a, b) if k == 0 else -math.inf)
        if lw == -math.inf:
            break
        w = math.copysign(math.exp(lw), 1.0 if c <= 0 or k % 2 == 0 else -1.0)
        num = num + w * _ibeta(g, a + k, b)
        den += w
        if abs(w) < 1e-18 * abs(den) and k > abs(c):
            break
    return np.clip(num / den, 0.0, 1.0)


def _silva_closed(p, g):
    a, b, d = p["a"], p["b"], p["delta"]
    return 1.0 - _pgamma(np.power(_neg_log(g), d), a, b)


def _poisson_closed(p, g):
    lam = p["lam"]
    return np.expm1(-lam * np.asarray(g, float)) / math.expm1(-lam)


def _poisson_expr(lam: float, sign: float) -> dsl.Expr:
    # +-exp(-lam G), signed so that it moves the way the row needs
    core = dsl.exp_(dsl.mul(dsl.const(-lam), G1))
    return core if sign * lam > 0 else dsl.neg(core)


def _r(row, F, **bind):
    def make(p, Gs):
        b = {"G": list(Gs), "F": F(p) if F else None}
        b.update({k: (v if isinstance(v, dsl.Expr) else v(p)) for k, v in bind.items()})
        if b["F"] is None:
            del b["F"]
        return subcase(row, b)
    return make


def _entries() -> list[CatalogEntry]:
    one = dsl.ONE
    zero = dsl.ZERO
    E = []
    E.append(CatalogEntry(
        "exponentiated_g", (_p("a"),),
        lambda p, g: np.power(g, p["a"]),
        {
            "3S1C1.2": _r("3S1C1.2", lambda p: make_power(p["a"]), mu=G1, ell=zero),
            "9S1C1.2": _r("9S1C1.2", lambda p: make_power(p["a"]), m=G1, nu=one),
            "5S1C1.2": _r("5S1C1.2", None, mu=lambda p: dsl.power(G1, p["a"])),
        },
        ({"a": 1.0}, {"a": 2.0}, {"a": 0.5}), {"a": 1.0}, "exponentiated G"))
    E.append(CatalogEntry(
        "beta1_g", (_p("a"), _p("b")),
        lambda p, g: _ibeta(g, p["a"], p["b"]),
        {
            "3S1C1.2": _r("3S1C1.2", lambda p: make_beta(p["a"], p["b"]), mu=G1, ell=zero),
            "9S1C1.2": _r("9S1C1.2", lambda p: make_beta(p["a"], p["b"]), m=G1, nu=one),
        },
        ({"a": 1.0, "b": 1.0}, {"a": 2.0, "b": 2.0}, {"a": 0.5, "b": 3.0}),
        {"a": 1.0, "b": 1.0}, "beta1 generalized"))
    E.append(CatalogEntry(
        "mc1_g", (_p("a"), _p("b"), _p("c")),
        lambda p, g: _ibeta(np.power(g, p["c"]), p["a"], p["b"]),
        {
            "3S1C1.2": _r("3S1C1.2", lambda p: make_beta(p["a"], p["b"]),
                          mu=lambda p: dsl.power(G1, p["c"]), ell=zero),
            "9S1C1.2": _r("9S1C1.2", lambda p: make_beta(p["a"], p["b"]),
                          m=lambda p: dsl.power(G1, p["c"]), nu=one),
        },
        ({"a": 1.0, "b": 1.0, "c": 1.0}, {"a": 2.0, "b": 2.0, "c": 0.5},
         {"a": 0.5, "b": 3.0, "c": 2.0}),
        {"a": 1.0, "b": 1.0, "c": 1.0}, "McDonald generalized, first kind"))
    E.append(CatalogEntry(
        "beta3_g", (_p("a"), _p("b")),
        lambda p, g: _ibeta(2.0 * g / (1.0 + g), p["a"], p["b"]),
        {"3S1C1.2": _r("3S1C1.2", lambda p: make_beta_type3(p["a"], p["b"]), mu=G1, ell=zero)},
        ({"a": 1.0, "b": 1.0}, {"a": 2.0, "b": 2.0}, {"a": 0.5, "b": 3.0}),
        None, "beta generalized, third kind"))
    E.append(CatalogEntry(
        "mc3_g", (_p("a"), _p("b"), _p("c")),
        lambda p, g: _ibeta(2.0 * np.power(g, p["c"]) / (1.0 + np.power(g, p["c"])), p["a"], p["b"]),
        {"3S1C1.2": _r("3S1C1.2", lambda p: make_beta_type3(p["a"], p["b"]),
                       mu=lambda p: dsl.power(G1, p["c"]), ell=zero)},
        ({"a": 1.0, "b": 1.0, "c": 2.0}, {"a": 2.0, "b": 3.0, "c": 0.5},
         {"a": 0.5, "b": 2.0, "c": 1.0}),
        None, "McDonald generalized, third kind"))
    E.append(CatalogEntry(
        "kumaraswamy_g", (_p("a"), _p("b")),
        lambda p, g: -np.expm1(p["b"] * np.log1p(-np.power(g, p["a"]))),
        {
            "3S1C1.2": _r("3S1C1.2", lambda p: make_kumaraswamy_kernel(p["a"], p["b"]),
                          mu=G1, ell=zero),
            "9S1C1.2": _r("9S1C1.2", lambda p: make_kumaraswamy_kernel(p["a"], p["b"]),
                          m=G1, nu=one),
            "6S1C1.2": _r("6S1C1.2", None, ell=lambda p: dsl.power(
                dsl.complement(dsl.power(G1, p["a"])), p["b"])),
        },
        ({"a": 1.0, "b": 1.0}, {"a": 2.0, "b": 2.0}, {"a": 0.5, "b": 3.0}),
        {"a": 1.0, "b": 1.0}, "Kumaraswamy G"))
    E.append(CatalogEntry(
        "kumaraswamy_g_type2", (_p("a"), _p("b")),
        lambda p, g: np.power(-np.expm1(p["a"] * np.log1p(-np.asarray(g, float))), p["b"]),
        {
            "3S1C1.2": _r("3S1C1.2", lambda p: make_power(p["b"]),
                          mu=lambda p: dsl.complement(dsl.power(dsl.complement(G1), p["a"])),
                          ell=zero),
            "5S1C1.2": _r("5S1C1.2", None, mu=lambda p: dsl.power(
                dsl.complement(dsl.power(dsl.complement(G1), p["a"])), p["b"])),
        },
        ({"a": 1.0, "b": 1.0}, {"a": 2.0, "b": 2.0}, {"a": 0.5, "b": 3.0}),
        {"a": 1.0, "b": 1.0}, "Kumaraswamy G, second form"))
    E.append(CatalogEntry(
        "marshall_olkin", (_p("b"),),
        lambda p, g: _mo_ratio(np.asarray(g, float), p["b"]),
        {
            "5S1C1.2": _r("5S1C1.2", None, mu=lambda p: _mo_expr(p["b"])),
            "11S1C1.2": _r("11S1C1.2", None, nu=lambda p: _mo_tail_expr(p["b"])),
        },
        ({"b": 1.0}, {"b": 2.0}, {"b": 0.5}), {"b": 1.0}, "Marshall-Olkin"))
    E.append(CatalogEntry(
        "marshall_olkin_g1_jayakumar", (_p("b"), _p("theta")),
        lambda p, g: 1.0 - np.power(1.0 - _mo_ratio(np.asarray(g, float), p["b"]), p["theta"]),
        {"11S1C1.2": _r("11S1C1.2", None,
                        nu=lambda p: dsl.power(_mo_tail_expr(p["b"]), p["theta"]))},
        ({"b": 1.0, "theta": 1.0}, {"b": 2.0, "theta": 2.0}, {"b": 0.5, "theta": 3.0}),
        {"b": 1.0, "theta": 1.0}, "Marshall-Olkin G1 (Jayakumar-Mathew)"))
    E.append(CatalogEntry(
        "marshall_olkin_g1_tahir", (_p("b"), _p("theta")),
        lambda p, g: np.power(_mo_ratio(np.asarray(g, float), p["b"]), p["theta"]),
        {"5S1C1.2": _r("5S1C1.2", None, mu=lambda p: dsl.power(_mo_expr(p["b"]), p["theta"]))},
        ({"b": 1.0, "theta": 1.0}, {"b": 2.0, "theta": 2.0}, {"b": 0.5, "theta": 3.0}),
        {"b": 1.0, "theta": 1.0}, "Marshall-Olkin G1 (Tahir-Nadarajah)"))
    E.append(CatalogEntry(
        "gamma_generated_zografos", (_p("a"), _p("b")),
        lambda p, g: _pgamma(_neg_log1m(np.asarray(g, float)), p["a"], p["b"]),
        {"3S1C1.2": _r("3S1C1.2", lambda p: make_gamma(p["a"], p["b"]),
                       mu=dsl.neg_log_complement(G1), ell=zero)},
        ({"a": 1.0, "b": 1.0}, {"a": 2.0, "b": 2.0}, {"a": 0.5, "b": 3.0}),
        {"a": 1.0, "b": 1.0}, "gamma-generated (Zografos-Balakrishnan)"))
    E.append(CatalogEntry(
        "gamma_generated_cordeiro", (_p("a"), _p("b")),
        lambda p, g: 1.0 - _pgamma(_neg_log(np.asarray(g, float)), p["a"], p["b"]),
        {"9S1C1.2": _r("9S1C1.2", lambda p: make_gamma(p["a"], p["b"]),
                       m=zero, nu=dsl.neg_log(G1))},
        ({"a": 1.0, "b": 1.0}, {"a": 2.0, "b": 2.0}, {"a": 0.5, "b": 3.0}),
        {"a": 1.0, "b": 1.0}, "gamma-generated (Cordeiro)"))
    E.append(CatalogEntry(
        "gamma_g_silva", (_p("a"), _p("b"), _p("delta")),
        _silva_closed,
        {"9S1C1.2": _r("9S1C1.2", lambda p: make_gamma(p["a"], p["b"]),
                       m=zero, nu=lambda p: dsl.power(dsl.neg_log(G1), p["delta"]))},
        ({"a": 1.0, "b": 1.0, "delta": 1.0}, {"a": 2.0, "b": 2.0, "delta": 0.5},
         {"a": 0.5, "b": 3.0, "delta": 2.0}),
        {"a": 1.0, "b": 1.0, "delta": 1.0}, "gamma G (Silva)"))
    E.append(CatalogEntry(
        "kummer_beta_g", (_p("a"), _p("b"), _p("c", _REAL)),
        _kummer_closed,
        {
            "3S1C1.2": _r("3S1C1.2", lambda p: make_kummer_beta(p["a"], p["b"], p["c"]),
                          mu=G1, ell=zero),
            "9S1C1.2": _r("9S1C1.2", lambda p: make_kummer_beta(p["a"], p["b"], p["c"]),
                          m=G1, nu=one),
        },
        ({"a": 1.0, "b": 1.0, "c": 0.0}, {"a": 2.0, "b": 3.0, "c": 1.0},
         {"a": 0.5, "b": 2.0, "c": -1.0}),
        {"a": 1.0, "b": 1.0, "c": 0.0}, "Kummer beta generalized"))
    E.append(CatalogEntry(
        "kumaraswamy_g_poisson", (_p("lam", _NONZERO),),
        _poisson_closed,
        {
            "11S1C1.2": _r("11S1C1.2", None, nu=lambda p: _poisson_expr(p["lam"], 1.0)),
            "12S1C1.2": _r("12S1C1.2", None, m=lambda p: _poisson_expr(p["lam"], -1.0)),
        },
        ({"lam": 1.0}, {"lam": 2.5}, {"lam": -1.5}), None, "Kumaraswamy-G Poisson"))
    return E


_CATALOG = {e.name: e for e in _entries()}


def list_entries() -> list[str]:
    return list(_CATALOG)


def get_entry(name: str) -> CatalogEntry:
    try:
        return _CATALOG[name]
    except KeyError:
        raise SpecError(f"unknown entry {name!r}") from None


def _entry(entry) -> CatalogEntry:
    return entry if isinstance(entry, CatalogEntry) else get_entry(entry)


def closed_form_cdf(entry, params: dict, G: BaselineCdf, x):
    """The literature formula evaluated directly at x."""
    e = _entry(entry)
    p = e.check_params(params)
    xs = np.asarray(x, float)
    with np.errstate(divide="ignore"):
        out = np.clip(np.asarray(e.closed_form(p, G.eval(xs)), float), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def recipe(entry, params: dict, G: BaselineCdf | list, route: str | None = None) -> GeneratorSpec:
    """GeneratorSpec for an entry through one of its routes (the first by default)."""
    e = _entry(entry)
    p = e.check_params(params)
    route = route or next(iter(e.routes))
    if route not in e.routes:
        raise SpecError(f"{e.name} has no route {route!r}; routes: {list(e.routes)}")
    Gs = G if isinstance(G, (list, tuple)) else [G]
    return e.routes[route](p, Gs)


def residual_grid(G: BaselineCdf, grid: int) -> np.ndarray:
    lo, hi = G.window(1e-12, 1 - 1e-12)
    return np.linspace(lo, hi, int(grid))


def reduction_residual(entry, params: dict, G: BaselineCdf, grid: int = 101,
                       route: str | None = None) -> float:
    """max |generated - closed form| over a grid spanning G's support."""
    if int(grid) < 2:
        raise DomainError("grid needs at least 2 points")
    xs = residual_grid(G, grid)
    H = build(recipe(entry, params, G, route))
    return float(np.max(np.abs(H.eval_cdf(xs) - closed_form_cdf(entry, params, G, xs))))


def route_agreement(entry, params: dict, G: BaselineCdf, grid: int = 101) -> float:
    """Largest pointwise gap between any two routes of an entry (0 for one route)."""
    e = _entry(entry)
    xs = residual_grid(G, grid)
    curves = [build(recipe(e, params, G, r)).eval_cdf(xs) for r in e.routes]
    return float(max(np.max(np.abs(c - curves[0])) for c in curves))


def generalized_limits(theta: float, alpha, delta, beta, route: str = "3S1C1.2") -> tuple:
    """Multi-baseline limit pair behind the beta/Kumaraswamy style rows.

    3S1C1.2: l = theta prod (1 - G_i^alpha_i)^delta_i, mu = (1 - theta) prod G_j^beta_j + theta.
    9S1C1.2: m = theta prod G_j^beta_j, nu = (1 - theta) prod (1 - G_i^alpha_i)^delta_i + theta.
    """
    if not (len(alpha) == len(delta) == len(beta)):
        raise SpecError("alpha, delta and beta need one entry per baseline")
    gs = [dsl.var(i + 1) for i in range(len(alpha))]
    tail = dsl.mul(*(dsl.power(dsl.complement(dsl.power(g, a)), d)
                     for g, a, d in zip(gs, alpha, delta)))
    head = dsl.mul(*(dsl.power(g, b) for g, b in zip(gs, beta)))
    if route == "3S1C1.2":
        return dsl.affine_mix(head, theta), dsl.scale(tail, theta)
    if route == "9S1C1.2":
        return dsl.scale(head, theta), dsl.affine_mix(tail, theta)
    raise SpecError(f"no generalized limits for {route!r}")


def generalized_spec(F: BaselineCdf, Gs: list, theta: float, alpha, delta, beta,
                     route: str = "3S1C1.2") -> GeneratorSpec:
    hi, lo = generalized_limits(theta, alpha, delta, beta, route)
    if route == "3S1C1.2":
        return subcase(route, {"G": Gs, "F": F, "mu": hi, "ell": lo})
    return subcase(route, {"G": Gs, "F": F, "m": hi, "nu": lo})


__all__ = [
    "CatalogEntry", "list_entries", "get_entry", "closed_form_cdf", "recipe", "reduction_residual",
    "route_agreement", "residual_grid", "generalized_limits", "generalized_spec",
]

