"""Baseline distributions: the integrand measure F and the composed CDFs G_i."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import betaln, gammaln

from .errors import DomainError, SpecError
from .numerics import (
    DEFAULT,
    NumericConfig,
    adaptive_quadrature,
    bracketed_root,
    cumulative_quadrature,
    regularized_incomplete_beta,
    regularized_lower_gamma,
)

CLOSED_FORM = "closed_form"
DENSITY_QUADRATURE = "density_quadrature"
DISCRETE_STEP = "discrete_step"


@dataclass(frozen=True, eq=False)
class BaselineCdf:
    """A CDF on the real line together with its support metadata.

    ``core`` only has to be correct on the open support; :meth:`eval`
    handles the tails, infinities and scalar/array plumbing.
    """

    family: str
    params: dict
    kind: str
    core: Callable
    support_lo: float
    support_hi: float
    support_convex: bool = True
    density_fn: Callable | None = None
    jumps: tuple | None = None
    _locs: tuple = field(default=(), repr=False)
    _cum: tuple = field(default=(), repr=False)

    @property
    def is_discrete(self) -> bool:
        return self.kind == DISCRETE_STEP

    @property
    def is_continuous(self) -> bool:
        return self.kind != DISCRETE_STEP

    @property
    def density(self) -> Callable | None:
        if self.density_fn is None:
            return None
        return self._density

    def _density(self, x):
        xs = np.asarray(x, dtype=float)
        inside = (xs > self.support_lo) & (xs < self.support_hi)
        out = np.zeros(xs.shape)
        if np.any(inside):
            with np.errstate(all="ignore"):
                out[inside] = self.density_fn(xs[inside])
        return float(out) if xs.ndim == 0 else out

    def eval(self, x):
        """F(x), right-continuous, with F(-inf) = 0 and F(+inf) = 1."""
        xs = np.asarray(x, dtype=float)
        if np.any(np.isnan(xs)):
            raise DomainError("cannot evaluate a CDF at NaN")
        if self.is_discrete:
            idx = np.searchsorted(self._locs, xs, side="right")
            out = np.asarray(self._cum)[idx]
        else:
            out = np.where(xs >= self.support_hi, 1.0, 0.0)
            inside = (xs > self.support_lo) & (xs < self.support_hi)
            if np.any(inside):
                out[inside] = np.clip(self.core(xs[inside]), 0.0, 1.0)
        return float(out) if xs.ndim == 0 else out

    __call__ = eval

    def quantile(self, p, config: NumericConfig = DEFAULT):
        """Generalized inverse inf{x : F(x) >= p} for p in (0, 1]."""
        ps = np.asarray(p, dtype=float)
        if np.any(~((ps > 0) & (ps <= 1))):
            raise DomainError("quantile levels must lie in (0, 1]")
        if self.is_discrete:
            idx = np.searchsorted(np.asarray(self._cum[1:]), ps - 1e-15, side="left")
            out = np.asarray(self._locs)[np.minimum(idx, len(self._locs) - 1)]
            return float(out) if ps.ndim == 0 else out
        lo, hi = self.window(float(np.min(ps)) / 2, 1 - (1 - float(np.max(ps))) / 2)
        lo = min(lo, hi)
        out = bracketed_root(self.eval, np.clip(ps, self.eval(lo), self.eval(hi)), lo, hi,
                             config=config)
        return out

    def window(self, lo_level: float = 1e-10, hi_level: float = 1 - 1e-10) -> tuple[float, float]:
        """Finite interval carrying all but the given tail masses."""
        lo, hi = self.support_lo, self.support_hi
        if math.isinf(lo):
            step = 1.0
            anchor = hi - 1.0 if math.isfinite(hi) else 0.0
            lo = anchor - step
            while self.eval(lo) > lo_level and step < 1e300:
                step *= 2
                lo = anchor - step
        if math.isinf(hi):
            step = 1.0
            anchor = lo + 0.0 if math.isfinite(lo) else 0.0
            hi = anchor + step
            while self.eval(hi) < hi_level and step < 1e300:
                step *= 2
                hi = anchor + step
        return float(lo), float(hi)

    def atoms(self) -> list[float]:
        return list(self._locs) if self.is_discrete else []

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items() if k != "jumps")
        return f"{self.family}({inner})"


def _positive(**kw):
    for name, v in kw.items():
        if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be a positive finite number, got {v!r}")


def _check_normalized(F: BaselineCdf, tol: float = 1e-8) -> BaselineCdf:
    total, _ = adaptive_quadrature(F.density, F.support_lo, F.support_hi, 1e-11)
    if abs(total - 1.0) > tol:
        raise DomainError(f"{F.family} density integrates to {total!r}, not 1")
    return F


# ------------------------------------------------------------------ families


def make_uniform(lo: float = 0.0, hi: float = 1.0) -> BaselineCdf:
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError("uniform needs finite lo < hi")
    width = hi - lo
    name = "uniform01" if (lo, hi) == (0.0, 1.0) else "uniform"
    return BaselineCdf(
        family=name,
        params={} if name == "uniform01" else {"lo": lo, "hi": hi},
        kind=CLOSED_FORM,
        core=lambda x: (x - lo) / width,
        support_lo=float(lo),
        support_hi=float(hi),
        density_fn=lambda x: np.full(np.shape(x), 1.0 / width),
    )


def make_uniform01() -> BaselineCdf:
    return make_uniform(0.0, 1.0)


def make_beta(a: float, b: float) -> BaselineCdf:
    _positive(a=a, b=b)
    log_norm = betaln(a, b)
    return BaselineCdf(
        family="beta",
        params={"a": a, "b": b},
        kind=CLOSED_FORM,
        core=lambda x: regularized_incomplete_beta(x, a, b),
        support_lo=0.0,
        support_hi=1.0,
        density_fn=lambda x: np.exp((a - 1) * np.log(x) + (b - 1) * np.log1p(-x) - log_norm),
    )


def make_power(b: float) -> BaselineCdf:
    _positive(b=b)
    return BaselineCdf(
        family="power",
        params={"b": b},
        kind=CLOSED_FORM,
        core=lambda x: np.power(x, b),
        support_lo=0.0,
        support_hi=1.0,
        density_fn=lambda x: b * np.power(x, b - 1.0),
    )


def make_kumaraswamy_kernel(a: float, b: float) -> BaselineCdf:
    _positive(a=a, b=b)
    return BaselineCdf(
        family="kumaraswamy",
        params={"a": a, "b": b},
        kind=CLOSED_FORM,
        core=lambda x: -np.expm1(b * np.log1p(-np.power(x, a))),
        support_lo=0.0,
        support_hi=1.0,
        density_fn=lambda x: a * b * np.power(x, a - 1) * np.power(1 - np.power(x, a), b - 1),
    )


def make_gamma(shape: float, rate: float) -> BaselineCdf:
    _positive(shape=shape, rate=rate)
    log_norm = shape * math.log(rate) - gammaln(shape)
    return BaselineCdf(
        family="gamma",
        params={"shape": shape, "rate": rate},
        kind=CLOSED_FORM,
        core=lambda x: regularized_lower_gamma(x, shape, rate),
        support_lo=0.0,
        support_hi=math.inf,
        density_fn=lambda x: np.exp(log_norm + (shape - 1) * np.log(x) - rate * x),
    )


def _beta3_core(x, a, b):
    x = np.asarray(x, float)
    # for x > 1 go through 1/(1+x): x/(1+x) rounds to a handful of values near 1
    with np.errstate(divide="ignore", invalid="ignore"):
        small = regularized_incomplete_beta(np.where(x <= 1, x / (1.0 + x), 0.5), a, b)
        large = 1.0 - regularized_incomplete_beta(np.where(x > 1, 1.0 / (1.0 + x), 0.5), b, a)
    out = np.where(x <= 1, small, large)
    return float(out) if out.ndim == 0 else out


def make_beta3(a: float, b: float) -> BaselineCdf:
    """Beta distribution of the third kind on (0, inf) (the beta-prime law)."""
    _positive(a=a, b=b)
    log_norm = betaln(a, b)
    F = BaselineCdf(
        family="beta3",
        params={"a": a, "b": b},
        kind=DENSITY_QUADRATURE,
        core=lambda x: _beta3_core(x, a, b),
        support_lo=0.0,
        support_hi=math.inf,
        density_fn=lambda x: np.exp((a - 1) * np.log(x) - (a + b) * np.log1p(x) - log_norm),
    )
    return _check_normalized(F)


def _quadrature_cdf(density: Callable) -> Callable:
    def core(x):
        return cumulative_quadrature(density, 0.0, x, 1e-12)
    return core


def make_beta_type3(a: float, b: float) -> BaselineCdf:
    """Unit-interval law with density 2^a t^(a-1)(1-t)^(b-1) / (B(a,b)(1+t)^(a+b)).

    The CDF is evaluated by quadrature of the density; the equivalent closed
    form I_{2t/(1+t)}(a, b) is kept for independent checks.
    """
    _positive(a=a, b=b)
    log_norm = betaln(a, b) - a * math.log(2.0)

    def dens(x):
        return np.exp((a - 1) * np.log(x) + (b - 1) * np.log1p(-x)
                      - (a + b) * np.log1p(x) - log_norm)

    F = BaselineCdf(
        family="beta_type3",
        params={"a": a, "b": b},
        kind=DENSITY_QUADRATURE,
        core=_quadrature_cdf(dens),
        support_lo=0.0,
        support_hi=1.0,
        density_fn=dens,
    )
    return _check_normalized(F)


def make_kummer_beta(a: float, b: float, c: float) -> BaselineCdf:
    """Kummer-beta law on (0, 1): density K t^(a-1)(1-t)^(b-1) exp(-c t)."""
    _positive(a=a, b=b)
    if not math.isfinite(c):
        raise DomainError("c must be finite")

    def raw(x):
        return np.exp((a - 1) * np.log(x) + (b - 1) * np.log1p(-x) - c * x - betaln(a, b))

    total, _ = adaptive_quadrature(raw, 0.0, 1.0, 1e-13)
    log_k = -math.log(total)

    def dens(x):
        return np.exp(log_k + (a - 1) * np.log(x) + (b - 1) * np.log1p(-x) - c * x - betaln(a, b))

    F = BaselineCdf(
        family="kummer_beta",
        params={"a": a, "b": b, "c": c},
        kind=DENSITY_QUADRATURE,
        core=_quadrature_cdf(dens),
        support_lo=0.0,
        support_hi=1.0,
        density_fn=dens,
    )
    return _check_normalized(F, 1e-10)


def make_discrete_step(jumps) -> BaselineCdf:
    """Step CDF with masses at strictly increasing locations."""
    pairs = [(float(loc), float(p)) for loc, p in jumps]
    if not pairs:
        raise DomainError("a discrete baseline needs at least one jump")
    locs = [loc for loc, _ in pairs]
    if any(not math.isfinite(x) for x in locs):
        raise DomainError("jump locations must be finite")
    if any(b <= a for a, b in zip(locs, locs[1:])):
        raise DomainError("jump locations must be strictly increasing")
    masses = [p for _, p in pairs]
    if any(not p > 0 for p in masses):
        raise DomainError("jump masses must be positive")
    if abs(math.fsum(masses) - 1.0) > 1e-12:
        raise DomainError(f"jump masses sum to {math.fsum(masses)!r}, not 1")
    cum = [0.0]
    running = 0.0
    for p in masses:
        running += p
        cum.append(running)
    cum[-1] = 1.0
    return BaselineCdf(
        family="discrete",
        params={"jumps": [list(p) for p in pairs]},
        kind=DISCRETE_STEP,
        core=lambda x: x,
        support_lo=locs[0],
        support_hi=locs[-1],
        support_convex=len(locs) == 1,
        jumps=tuple(pairs),
        _locs=tuple(locs),
        _cum=tuple(cum),
    )


def jump_at(F: BaselineCdf, x: float, tol: float = 0.0) -> float:
    """Mass F puts on the single point x (0 for continuous baselines)."""
    if not F.is_discrete or not math.isfinite(x):
        return 0.0
    i = bisect.bisect_left(F._locs, x - tol)
    total = 0.0
    while i < len(F._locs) and F._locs[i] <= x + tol:
        total += F.jumps[i][1]
        i += 1
    return total


def axiom_scan(F: BaselineCdf, points: int = 1001) -> dict:
    """Monotonicity and limit checks on a grid spanning the support window."""
    lo, hi = F.window()
    grid = np.linspace(lo, hi, points)
    vals = F.eval(grid)
    return {
        "max_decrease": float(np.max(-np.diff(vals), initial=0.0)),
        "at_neg_inf": float(F.eval(-math.inf)),
        "at_pos_inf": float(F.eval(math.inf)),
        "below_support": float(F.eval(lo - 1.0)) if math.isfinite(lo) else 0.0,
    }


# ------------------------------------------------------------------ registry

_FAMILIES: dict[str, tuple[Callable, tuple]] = {
    "uniform01": (make_uniform01, ()),
    "uniform": (make_uniform, ("lo", "hi")),
    "beta": (make_beta, ("a", "b")),
    "power": (make_power, ("b",)),
    "kumaraswamy": (make_kumaraswamy_kernel, ("a", "b")),
    "gamma": (make_gamma, ("shape", "rate")),
    "beta3": (make_beta3, ("a", "b")),
    "beta_type3": (make_beta_type3, ("a", "b")),
    "kummer_beta": (make_kummer_beta, ("a", "b", "c")),
    "discrete": (make_discrete_step, ("jumps",)),
}


def family_names() -> list[str]:
    return sorted(_FAMILIES)


def from_spec(family: str, params: dict | None = None) -> BaselineCdf:
    """Build a baseline from its spec-file description."""
    params = dict(params or {})
    if family not in _FAMILIES:
        raise SpecError(f"unknown baseline family {family!r}")
    maker, names = _FAMILIES[family]
    missing = [n for n in names if n not in params]
    extra = [n for n in params if n not in names]
    if missing or extra:
        raise SpecError(
            f"baseline {family!r} expects parameters {list(names)}, got {sorted(params)}"
        )
    return maker(*(params[n] for n in names))


def to_spec(F: BaselineCdf) -> dict:
    return {"family": F.family, "params": dict(F.params)}
