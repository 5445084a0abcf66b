"""Generated distributions H built from a baseline F and monotone limits.

Direct form::

    H(x) = U(g) * sum_j [F(mu_j(g)) - F(l_j(g))] - V(g) * sum_j [F(nu_j(g)) - F(m_j(g))]

Complementary form::

    H(x) = 1 - V(g) * sum_j [F(nu_j(g)) - F(m_j(g))] + U(g) * sum_j [F(mu_j(g)) - F(l_j(g))]

where ``g = (G_1(x), ..., G_m(x))``.  ``validate`` checks the sufficient
conditions (d1..d10 for the direct form, cd1..cd10 for the complementary
form) that make H a CDF; ``build`` refuses specs that fail them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import dsl
from .baseline import BaselineCdf, jump_at, make_uniform01
from .dsl import Expr
from .errors import DomainError, IntegrityError, SpecError, UnsupportedError, ValidationFailed
from .numerics import DEFAULT, NumericConfig, bracketed_root

DIRECT = "direct"
COMPLEMENTARY = "complementary"
MAX_TERMS = 64
EQ_TOL = 1e-12
CLAMP_SLACK = 1e-12

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not_applicable"


# ------------------------------------------------------------------ spec


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """Everything that defines H: the form, the limit maps, F and the G's."""

    form: str
    scale_u: Expr
    scale_v: Expr
    upper: tuple
    lower: tuple
    m_lower: tuple
    v_upper: tuple
    baseline_f: BaselineCdf
    baselines_g: tuple
    label: str = ""

    def __post_init__(self):
        for name in ("upper", "lower", "m_lower", "v_upper", "baselines_g"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.form not in (DIRECT, COMPLEMENTARY):
            raise SpecError(f"form must be {DIRECT!r} or {COMPLEMENTARY!r}, got {self.form!r}")
        n = len(self.upper)
        if not 1 <= n <= MAX_TERMS:
            raise SpecError(f"number of integral terms must be in 1..{MAX_TERMS}, got {n}")
        if not (len(self.lower) == len(self.m_lower) == len(self.v_upper) == n):
            raise SpecError("upper, lower, m_lower and v_upper must have the same length")
        if not self.baselines_g:
            raise SpecError("at least one baseline G is required")
        for F in (self.baseline_f, *self.baselines_g):
            if not isinstance(F, BaselineCdf):
                raise SpecError(f"expected a BaselineCdf, got {type(F).__name__}")
        for name, e in self.named_expressions():
            if not isinstance(e, Expr):
                raise SpecError(f"{name} is not an expression")
            if dsl.max_var(e) > self.m:
                raise SpecError(f"{name} uses g{dsl.max_var(e)} but only {self.m} baselines are given")

    @property
    def n(self) -> int:
        return len(self.upper)

    @property
    def m(self) -> int:
        return len(self.baselines_g)

    def named_expressions(self) -> list[tuple[str, Expr]]:
        out = [("U", self.scale_u), ("V", self.scale_v)]
        for j in range(self.n):
            out += [(f"mu{j + 1}", self.upper[j]), (f"l{j + 1}", self.lower[j]),
                    (f"m{j + 1}", self.m_lower[j]), (f"nu{j + 1}", self.v_upper[j])]
        return out


def direct_spec(F, Gs, *, mu, ell, m=None, nu=None, U=dsl.ONE, V=dsl.ZERO, label="") -> GeneratorSpec:
    """Convenience constructor; single expressions are promoted to 1-term lists."""
    return _spec(DIRECT, F, Gs, mu, ell, m, nu, U, V, label)


def complementary_spec(F, Gs, *, mu, ell, m, nu, U=dsl.ZERO, V=dsl.ONE, label="") -> GeneratorSpec:
    return _spec(COMPLEMENTARY, F, Gs, mu, ell, m, nu, U, V, label)


def _listify(x):
    return list(x) if isinstance(x, (list, tuple)) else [x]


def _spec(form, F, Gs, mu, ell, m, nu, U, V, label):
    mu, ell = _listify(mu), _listify(ell)
    m = _listify(m) if m is not None else [dsl.ZERO] * len(mu)
    nu = _listify(nu) if nu is not None else [dsl.ZERO] * len(mu)
    return GeneratorSpec(form, U, V, mu, ell, m, nu, F, _listify(Gs), label)


# ------------------------------------------------------------------ validation


@dataclass(frozen=True)
class Verdict:
    condition: str
    status: str
    witness: str


@dataclass(frozen=True)
class ValidationReport:
    form: str
    verdicts: tuple

    @property
    def ok(self) -> bool:
        return all(v.status != FAIL for v in self.verdicts)

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status == FAIL]

    def failed_conditions(self) -> list[str]:
        return [v.condition for v in self.failures()]

    def __getitem__(self, condition: str) -> Verdict:
        for v in self.verdicts:
            if v.condition == condition:
                return v
        raise KeyError(condition)

    def render(self) -> str:
        return "\n".join(f"{v.condition:<5} {v.status:<15} {v.witness}" for v in self.verdicts)


def _fmt(x: float) -> str:
    if x == math.inf:
        return "+inf"
    if x == -math.inf:
        return "-inf"
    return f"{x:.12g}"


class _Corners:
    """Corner values of every expression, computed once."""

    def __init__(self, spec: GeneratorSpec):
        m = spec.m
        self.U0, self.U1 = dsl.corner_values(spec.scale_u, m)
        self.V0, self.V1 = dsl.corner_values(spec.scale_v, m)
        c = [[dsl.corner_values(e, m) for e in group]
             for group in (spec.upper, spec.lower, spec.m_lower, spec.v_upper)]
        self.mu0, self.mu1 = [a for a, _ in c[0]], [b for _, b in c[0]]
        self.l0, self.l1 = [a for a, _ in c[1]], [b for _, b in c[1]]
        self.m0, self.m1 = [a for a, _ in c[2]], [b for _, b in c[2]]
        self.nu0, self.nu1 = [a for a, _ in c[3]], [b for _, b in c[3]]

    def all_values(self) -> list[float]:
        return (self.mu0 + self.mu1 + self.l0 + self.l1 + self.m0 + self.m1
                + self.nu0 + self.nu1)


def _close(a: float, b: float) -> bool:
    if a == b:
        return True
    if math.isinf(a) or math.isinf(b):
        return False
    return abs(a - b) <= EQ_TOL * max(1.0, abs(a), abs(b))


def f_equivalent(F: BaselineCdf, a: float, b: float) -> bool:
    """a and b are interchangeable as integration limits: no F-mass between them."""
    return _close(a, b) or abs(float(F.eval(a)) - float(F.eval(b))) <= EQ_TOL


def _leq(a: float, b: float) -> bool:
    return a <= b or _close(a, b)


def _verdict(cond, ok, witness):
    return Verdict(cond, PASS if ok else FAIL, witness)


def _check_nonneg(spec: GeneratorSpec, cond: str) -> Verdict:
    pts = dsl.lattice(spec.m)
    for name, e in (("U", spec.scale_u), ("V", spec.scale_v)):
        try:
            vals = dsl.evaluate_many(e, pts)
        except DomainError as exc:
            return _verdict(cond, False, f"{name} cannot be evaluated on the lattice: {exc}")
        if not np.all(np.isfinite(vals)):
            k = int(np.argmax(~np.isfinite(vals)))
            return _verdict(cond, False, f"{name} = {_fmt(vals[k])} at g = {pts[:, k].tolist()}")
        if np.any(vals < 0):
            k = int(np.argmin(vals))
            return _verdict(cond, False, f"{name} = {_fmt(vals[k])} < 0 at g = {pts[:, k].tolist()}")
    return _verdict(cond, True, f"U, V finite and >= 0 on {pts.shape[1]} lattice points; "
                                f"{spec.baseline_f.describe()} is a CDF")


def _check_directions(spec: GeneratorSpec, cond: str) -> Verdict:
    want_up = [("U", spec.scale_u)]
    want_down = [("V", spec.scale_v)]
    for j in range(spec.n):
        want_up += [(f"mu{j + 1}", spec.upper[j]), (f"m{j + 1}", spec.m_lower[j])]
        want_down += [(f"l{j + 1}", spec.lower[j]), (f"nu{j + 1}", spec.v_upper[j])]
    bad = []
    for allowed, group in (((1, 0), want_up), ((-1, 0), want_down)):
        for name, e in group:
            dirs = dsl.infer_direction(e, spec.m)
            for i, d in enumerate(dirs):
                if d.sign not in allowed:
                    bad.append(f"{name} is {d.name} in g{i + 1}")
    if bad:
        return _verdict(cond, False, "; ".join(bad))
    return _verdict(cond, True, "U, mu_j, m_j nondecreasing; V, l_j, nu_j nonincreasing")


def _discontinuity_check(spec: GeneratorSpec, corners: _Corners, cond: str) -> Verdict:
    F = spec.baseline_f
    if F.is_continuous:
        return _verdict(cond, True, f"{F.describe()} has no jumps")
    for v in corners.all_values():
        if jump_at(F, v) > 0:
            return _verdict(cond, False, f"F jumps at corner value {_fmt(v)}")
    # sweep the diagonal and every lattice line; l_j and nu_j must be constant
    # just to the right of any point they map onto a jump of F
    locs = np.asarray(F.atoms())
    sweep = np.linspace(0.0, 1.0, 1025)
    m = spec.m
    starts = dsl.lattice(m, np.linspace(0.0, 1.0, 5))
    paths = [np.tile(sweep, (m, 1))]
    for i in range(m):
        for k in range(starts.shape[1]):
            G = np.repeat(starts[:, k:k + 1], sweep.size, axis=1)
            G[i] = sweep
            paths.append(G)
    for j in range(spec.n):
        for name, e in ((f"l{j + 1}", spec.lower[j]), (f"nu{j + 1}", spec.v_upper[j])):
            if dsl.is_constant(e):
                continue
            for G in paths:
                vals = dsl.evaluate_many(e, G)
                for a in locs:
                    below = vals < a
                    at = np.abs(vals - a) <= EQ_TOL * max(1.0, abs(a))
                    crossing = np.flatnonzero(below[:-1] != below[1:])
                    for k in crossing:
                        if not (at[k] and vals[k + 1] == vals[k]):
                            t = G[:, k].tolist()
                            return _verdict(
                                cond, False,
                                f"{name} passes through jump {_fmt(a)} of F near g = {t} "
                                "without being constant to its right",
                            )
    return _verdict(cond, True, f"F jumps at {len(locs)} points; no corner value on a jump; "
                                "l_j, nu_j constant right of jump preimages on sampled paths")


def validate(spec: GeneratorSpec) -> ValidationReport:
    """Check every sufficient condition; failures are report entries, not exceptions."""
    if spec.form == DIRECT:
        return ValidationReport(DIRECT, tuple(_validate_direct(spec)))
    return ValidationReport(COMPLEMENTARY, tuple(_validate_complementary(spec)))


def _corners_or_fail(spec, prefix):
    try:
        return _Corners(spec), None
    except DomainError as exc:
        return None, exc


def _validate_direct(spec: GeneratorSpec) -> list[Verdict]:
    out = [_check_nonneg(spec, "d1"), _check_directions(spec, "d2")]
    c, err = _corners_or_fail(spec, "d")
    if c is None:
        for k in range(3, 11):
            out.append(_verdict(f"d{k}", False, f"corner values undefined: {err}"))
        return out
    F = spec.baseline_f
    n = spec.n
    eqF = lambda a, b: f_equivalent(F, a, b)  # noqa: E731

    # d3
    if _close(c.U0, c.V0):
        out.append(_verdict("d3", True, f"vacuous: U0 = V0 = {_fmt(c.U0)}"))
    else:
        bad = []
        if not (c.U0 == 0 or all(eqF(c.mu0[j], c.l0[j]) for j in range(n))):
            bad.append(f"U0 = {_fmt(c.U0)} != 0 and mu_j0 != l_j0 for some j "
                       f"(mu0 = {list(map(_fmt, c.mu0))}, l0 = {list(map(_fmt, c.l0))})")
        if not (c.V0 == 0 or all(eqF(c.m0[j], c.nu0[j]) for j in range(n))):
            bad.append(f"V0 = {_fmt(c.V0)} != 0 and m_j0 != nu_j0 for some j")
        out.append(_verdict("d3", not bad, "; ".join(bad) or
                            f"U0 = {_fmt(c.U0)}, V0 = {_fmt(c.V0)}; lower-corner masses vanish"))
    # d4
    if _close(c.U0, c.V0) and c.U0 != 0:
        bad = [j + 1 for j in range(n)
               if not (eqF(c.mu0[j], c.nu0[j]) and eqF(c.m0[j], c.l0[j]))]
        out.append(_verdict("d4", not bad,
                            f"mu_j0 = nu_j0 and m_j0 = l_j0 fail for j = {bad}" if bad
                            else f"U0 = V0 = {_fmt(c.U0)}; mu_j0 = nu_j0 and m_j0 = l_j0"))
    else:
        out.append(_verdict("d4", True, "vacuous: U0 != V0 or U0 = 0"))
    # d5
    bad = [f"l{j + 1}(0) = {_fmt(c.l0[j])} > mu{j + 1}(0) = {_fmt(c.mu0[j])}"
           for j in range(n) if not _leq(c.l0[j], c.mu0[j])]
    if c.V0 != 0:
        bad += [f"m{j + 1}(1) = {_fmt(c.m1[j])} > nu{j + 1}(1) = {_fmt(c.nu1[j])}"
                for j in range(n) if not _leq(c.m1[j], c.nu1[j])]
    out.append(_verdict("d5", not bad, "; ".join(bad) or "l_j0 <= mu_j0"
                        + ("" if c.V0 == 0 else " and m_j1 <= nu_j1")))
    # d6
    sup, inf = F.support_hi, F.support_lo
    ok = _leq(sup, c.mu1[-1]) and _leq(c.l1[0], inf)
    out.append(_verdict("d6", ok, f"mu{n}(1) = {_fmt(c.mu1[-1])} vs sup = {_fmt(sup)}; "
                                  f"l1(1) = {_fmt(c.l1[0])} vs inf = {_fmt(inf)}"))
    # d7
    out.append(_verdict("d7", _close(c.U1, 1.0), f"U(1,...,1) = {_fmt(c.U1)}"))
    # d8
    if c.V1 == 0:
        out.append(_verdict("d8", True, "V(1,...,1) = 0"))
    else:
        bad = [j + 1 for j in range(n) if not eqF(c.nu1[j], c.m1[j])]
        out.append(_verdict("d8", not bad, f"V1 = {_fmt(c.V1)} and nu_j1 != m_j1 for j = {bad}"
                            if bad else f"V1 = {_fmt(c.V1)}; nu_j1 = m_j1 for all j"))
    # d9
    if n == 1:
        out.append(_verdict("d9", True, "vacuous: n = 1"))
    else:
        bad = [j + 1 for j in range(n - 1) if not eqF(c.mu1[j], c.l1[j + 1])]
        out.append(_verdict("d9", not bad, f"mu_j(1) != l_(j+1)(1) for j = {bad}" if bad
                            else "consecutive terms tile at the upper corner"))
    out.append(_discontinuity_check(spec, c, "d10"))
    return out


def _validate_complementary(spec: GeneratorSpec) -> list[Verdict]:
    out = [_check_nonneg(spec, "cd1"), _check_directions(spec, "cd2")]
    c, err = _corners_or_fail(spec, "cd")
    if c is None:
        for k in range(3, 11):
            out.append(_verdict(f"cd{k}", False, f"corner values undefined: {err}"))
        return out
    F = spec.baseline_f
    n = spec.n
    eqF = lambda a, b: f_equivalent(F, a, b)  # noqa: E731

    # cd3
    if _close(c.U1, c.V1):
        out.append(_verdict("cd3", True, f"vacuous: U1 = V1 = {_fmt(c.U1)}"))
    else:
        bad = []
        if not (c.V1 == 0 or all(eqF(c.m1[j], c.nu1[j]) for j in range(n))):
            bad.append(f"V1 = {_fmt(c.V1)} != 0 and m_j1 != nu_j1 for some j")
        if not (c.U1 == 0 or all(eqF(c.l1[j], c.mu1[j]) for j in range(n))):
            bad.append(f"U1 = {_fmt(c.U1)} != 0 and l_j1 != mu_j1 for some j")
        out.append(_verdict("cd3", not bad, "; ".join(bad) or
                            f"U1 = {_fmt(c.U1)}, V1 = {_fmt(c.V1)}; upper-corner masses vanish"))
    # cd4
    if _close(c.U1, c.V1) and c.U1 != 0:
        bad = [j + 1 for j in range(n)
               if not (eqF(c.mu1[j], c.nu1[j]) and eqF(c.m1[j], c.l1[j]))]
        out.append(_verdict("cd4", not bad,
                            f"mu_j1 = nu_j1 and m_j1 = l_j1 fail for j = {bad}" if bad
                            else f"U1 = V1 = {_fmt(c.U1)}; mu_j1 = nu_j1 and m_j1 = l_j1"))
    else:
        out.append(_verdict("cd4", True, "vacuous: U1 != V1 or U1 = 0"))
    # cd5
    bad = [f"l{j + 1}(0) = {_fmt(c.l0[j])} > mu{j + 1}(0) = {_fmt(c.mu0[j])}"
           for j in range(n) if not _leq(c.l0[j], c.mu0[j])]
    if c.V1 != 0:
        bad += [f"m{j + 1}(1) = {_fmt(c.m1[j])} > nu{j + 1}(1) = {_fmt(c.nu1[j])}"
                for j in range(n) if not _leq(c.m1[j], c.nu1[j])]
    out.append(_verdict("cd5", not bad, "; ".join(bad) or "l_j0 <= mu_j0"
                        + ("" if c.V1 == 0 else " and m_j1 <= nu_j1")))
    # cd6
    sup, inf = F.support_hi, F.support_lo
    ok = _leq(sup, c.nu0[-1]) and _leq(c.m0[0], inf)
    out.append(_verdict("cd6", ok, f"nu{n}(0) = {_fmt(c.nu0[-1])} vs sup = {_fmt(sup)}; "
                                   f"m1(0) = {_fmt(c.m0[0])} vs inf = {_fmt(inf)}"))
    # cd7
    out.append(_verdict("cd7", _close(c.V0, 1.0), f"V(0,...,0) = {_fmt(c.V0)}"))
    # cd8, read for every j
    if c.U0 == 0:
        out.append(_verdict("cd8", True, "U(0,...,0) = 0"))
    else:
        bad = [j + 1 for j in range(n) if not eqF(c.l0[j], c.mu0[j])]
        out.append(_verdict("cd8", not bad, f"U0 = {_fmt(c.U0)} and l_j0 != mu_j0 for j = {bad}"
                            if bad else f"U0 = {_fmt(c.U0)}; l_j0 = mu_j0 for all j"))
    # cd9
    if n == 1:
        out.append(_verdict("cd9", True, "vacuous: n = 1"))
    else:
        bad = [j + 1 for j in range(n - 1) if not eqF(c.nu0[j], c.m0[j + 1])]
        out.append(_verdict("cd9", not bad, f"nu_j(0) != m_(j+1)(0) for j = {bad}" if bad
                            else "consecutive terms tile at the lower corner"))
    out.append(_discontinuity_check(spec, c, "cd10"))
    return out


# ------------------------------------------------------------------ evaluation


def h_expression(spec: GeneratorSpec) -> Expr:
    """H as a single expression of (g1, ..., gm), built from mass nodes."""
    F = spec.baseline_f
    s1 = dsl.add(*(dsl.mass(ell, u, F, ordered=True) for u, ell in zip(spec.upper, spec.lower)))
    s2 = dsl.add(*(dsl.mass(a, b, F, ordered=True) for a, b in zip(spec.m_lower, spec.v_upper)))
    if spec.form == DIRECT:
        return dsl.sub(dsl.mul(spec.scale_u, s1), dsl.mul(spec.scale_v, s2))
    return dsl.add(dsl.ONE, dsl.neg(dsl.mul(spec.scale_v, s2)), dsl.mul(spec.scale_u, s1))


@dataclass(frozen=True, eq=False)
class GeneratedCdf:
    """A validated generator spec, evaluable as a CDF."""

    spec: GeneratorSpec
    report: ValidationReport
    config: NumericConfig = DEFAULT
    _window: tuple = field(default=(), repr=False)

    @property
    def m(self) -> int:
        return self.spec.m

    def g_values(self, xs: np.ndarray) -> np.ndarray:
        return np.vstack([np.asarray(G.eval(xs), float).reshape(-1) for G in self.spec.baselines_g])

    def _sums(self, Gv):
        F = self.spec.baseline_f
        n_pts = Gv.shape[1]
        s1 = np.zeros(n_pts)
        s2 = np.zeros(n_pts)
        # left-to-right in j for determinism
        for u, ell, a, b in zip(self.spec.upper, self.spec.lower, self.spec.m_lower, self.spec.v_upper):
            s1 = s1 + (F.eval(dsl.evaluate_many(u, Gv)) - F.eval(dsl.evaluate_many(ell, Gv)))
            s2 = s2 + (F.eval(dsl.evaluate_many(b, Gv)) - F.eval(dsl.evaluate_many(a, Gv)))
        return s1, s2

    def _combine(self, U, V, s1, s2):
        if self.spec.form == DIRECT:
            return U * s1 - V * s2
        return 1.0 - V * s2 + U * s1

    def eval_cdf(self, x):
        """H(x); values within 1e-12 outside [0, 1] are clamped, larger ones raise."""
        xs = np.asarray(x, dtype=float)
        flat = xs.reshape(-1)
        Gv = self.g_values(flat)
        U = dsl.evaluate_many(self.spec.scale_u, Gv)
        V = dsl.evaluate_many(self.spec.scale_v, Gv)
        s1, s2 = self._sums(Gv)
        with np.errstate(invalid="ignore"):
            h = self._combine(U, V, s1, s2)
        if np.any(np.isnan(h)):
            raise IntegrityError("H evaluated to NaN")
        worst = max(float(np.max(-h, initial=0.0)), float(np.max(h - 1.0, initial=0.0)))
        if worst > CLAMP_SLACK:
            k = int(np.argmax(np.maximum(-h, h - 1.0)))
            raise IntegrityError(f"H({flat[k]!r}) = {h[k]!r} lies outside [0, 1]")
        h = np.clip(h, 0.0, 1.0)
        return float(h[0]) if xs.ndim == 0 else h.reshape(xs.shape)

    __call__ = eval_cdf

    def density_with_method(self, x) -> tuple[np.ndarray | float, str]:
        """Density by the chain-rule formula; falls back to differencing H.

        Returns ``(values, method)`` with method "symbolic" or
        "finite_difference"; the latter if any point needed differencing.
        """
        spec = self.spec
        F = spec.baseline_f
        if F.density is None or any(G.density is None for G in spec.baselines_g):
            raise DomainError("density needs F and every G to have a density")
        xs = np.asarray(x, dtype=float)
        flat = xs.reshape(-1)
        Gv = self.g_values(flat)
        T = np.vstack([np.asarray(G.density(flat), float).reshape(-1) for G in spec.baselines_g])
        f = F.density

        def chain(e):
            v, dv, method = dsl.jvp_many(e, Gv, T)
            return v, dv, method

        methods = set()
        U, dU, mth = chain(spec.scale_u)
        methods.add(mth)
        V, dV, mth = chain(spec.scale_v)
        methods.add(mth)
        s1 = np.zeros(flat.size)
        s2 = np.zeros(flat.size)
        ds1 = np.zeros(flat.size)
        ds2 = np.zeros(flat.size)
        for u, ell, a, b in zip(spec.upper, spec.lower, spec.m_lower, spec.v_upper):
            terms = []
            for e in (u, ell, a, b):
                v, dv, mth = chain(e)
                methods.add(mth)
                terms.append((v, dv))
            (vu, du), (vl, dl), (va, da), (vb, db) = terms
            s1 = s1 + (F.eval(vu) - F.eval(vl))
            s2 = s2 + (F.eval(vb) - F.eval(va))
            ds1 = ds1 + (_f_times(f, vu, du) - _f_times(f, vl, dl))
            ds2 = ds2 + (_f_times(f, vb, db) - _f_times(f, va, da))
        if methods != {"symbolic"}:
            out = self._difference_density(flat)
            return (float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)), "finite_difference"
        # both forms differentiate to the same combination (the 1 is constant)
        with np.errstate(invalid="ignore"):
            dens = _prod(dU, s1) + _prod(U, ds1) - _prod(dV, s2) - _prod(V, ds2)
        dens = np.where(np.abs(dens) < 1e-300, 0.0, dens)
        method = "symbolic"
        # far tails can round 1 - G to 0 while g > 0, leaving inf * tiny
        bad = ~np.isfinite(dens)
        if np.any(bad):
            dens[bad] = self._difference_density(flat[bad])
            method = "finite_difference"
        return (float(dens[0]) if xs.ndim == 0 else dens.reshape(xs.shape)), method

    def _difference_density(self, flat):
        h = 1e-6
        vals = (np.asarray(self.eval_cdf(flat + h)) - np.asarray(self.eval_cdf(flat - h))) / (2 * h)
        return np.maximum(vals, 0.0)

    def eval_density(self, x):
        return self.density_with_method(x)[0]

    def window(self) -> tuple[float, float]:
        """Finite interval holding all but ~1e-10 of every G's mass."""
        if self._window:
            return self._window
        los, his = zip(*(G.window(1e-12, 1 - 1e-12) for G in self.spec.baselines_g))
        w = (float(min(los)), float(max(his)))
        object.__setattr__(self, "_window", w)
        return w

    def quantile(self, p) -> np.ndarray | float:
        """Generalized inverse of H by bracketed bisection."""
        ps = np.asarray(p, dtype=float)
        if np.any(~((ps > 0) & (ps <= 1))):
            raise DomainError("quantile levels must lie in (0, 1]")
        lo, hi = self.window()
        span = max(hi - lo, 1.0)
        lo = lo - 1e-9 * span
        h_lo, h_hi = self.eval_cdf(lo), self.eval_cdf(hi)
        target = np.clip(ps, h_lo, h_hi)
        return bracketed_root(self.eval_cdf, target, lo, hi, config=self.config)

    def sample(self, count: int, seed: int) -> list[float]:
        """Deterministic draws for a given seed.

        Continuous and T7-discrete H use inverse transform; H built from
        discrete G's only is drawn from its jump table.
        """
        from .analysis import classify_nature

        if count < 0:
            raise DomainError("sample count must be nonnegative")
        if count == 0:
            return []
        verdict = classify_nature(self.spec)
        if verdict.nature in ("mixed", "unknown"):
            raise UnsupportedError(f"cannot sample an H of nature {verdict.nature!r}")
        rng = np.random.default_rng(np.uint64(seed % 2**64))
        u = rng.random(count)
        # map [0, 1) to (0, 1] so every level has a finite generalized inverse
        u = 1.0 - u
        if verdict.justification == "C3.1":
            locs, cum = self.jump_table()
            idx = np.searchsorted(cum, u - 1e-15, side="left")
            return [float(v) for v in locs[np.minimum(idx, len(locs) - 1)]]
        return [float(v) for v in np.atleast_1d(self.quantile(u))]

    def jump_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Atoms of H and its cumulative values there (all G discrete)."""
        atoms = sorted({a for G in self.spec.baselines_g for a in G.atoms()})
        locs = np.asarray(atoms, float)
        cum = np.asarray(self.eval_cdf(locs), float)
        keep = np.diff(np.concatenate([[0.0], cum])) > 0
        return locs[keep], cum[keep]


def _f_times(f, x, dx):
    x = np.asarray(x, float)
    dx = np.asarray(dx, float)
    ok = np.isfinite(x) & (dx != 0)
    out = np.zeros(x.shape)
    if np.any(ok):
        with np.errstate(invalid="ignore"):
            out[ok] = np.asarray(f(x[ok]), float) * dx[ok]
    return out


def _prod(a, b):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return np.where((a == 0) | (b == 0), 0.0, a * b)


def build(spec: GeneratorSpec, config: NumericConfig = DEFAULT) -> GeneratedCdf:
    report = validate(spec)
    if not report.ok:
        raise ValidationFailed(report)
    return GeneratedCdf(spec, report, config)


def eval_cdf(H: GeneratedCdf, x):
    return H.eval_cdf(x)


def eval_density(H: GeneratedCdf, x):
    return H.eval_density(x)


def sample(H: GeneratedCdf, count: int, seed: int) -> list[float]:
    return H.sample(count, seed)


# ------------------------------------------------------------------ product forms


def _check_uv(u, v, m):
    for i, e in enumerate(u):
        lo, hi = dsl.corner_values(e, m)
        if not (_close(lo, 0.0) and _close(hi, 1.0)):
            raise DomainError(f"u{i + 1} must satisfy u(0) = 0 and u(1) = 1, got {lo}, {hi}")
    for i, e in enumerate(v):
        lo, hi = dsl.corner_values(e, m)
        if not (_close(lo, 1.0) and _close(hi, 0.0)):
            raise DomainError(f"v{i + 1} must satisfy v(0) = 1 and v(1) = 0, got {lo}, {hi}")


def _product_scalings(u, v, theta, alpha, *, complementary: bool):
    k = len(u)
    if not (len(v) == len(theta) == len(alpha) == k) or k == 0:
        raise SpecError("u, v, theta and alpha must be nonempty and of equal length")
    for t, a in zip(theta, alpha):
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"theta must lie in [0, 1], got {t}")
        if not a >= 0:
            raise DomainError(f"alpha must be nonnegative, got {a}")
    mixed = dsl.mul(*(dsl.power(dsl.affine_mix(w, t), a)
                      for w, t, a in zip(v if complementary else u, theta, alpha)))
    scaled = dsl.mul(*(dsl.power(dsl.scale(w, t), a)
                       for w, t, a in zip(u if complementary else v, theta, alpha)))
    return mixed, scaled


def product_form_direct(u: Sequence[Expr], v: Sequence[Expr], theta, alpha, limits, F, Gs,
                        label: str = "") -> GeneratorSpec:
    """U = prod((1-theta_i) u_i + theta_i)^alpha_i and V = prod(theta_i v_i)^alpha_i.

    ``limits`` is a list of n quadruples (mu_j, l_j, m_j, nu_j).
    """
    Gs = _listify(Gs)
    _check_uv(u, v, len(Gs))
    U, V = _product_scalings(u, v, theta, alpha, complementary=False)
    mu, ell, ms, nus = zip(*limits)
    return GeneratorSpec(DIRECT, U, V, mu, ell, ms, nus, F, Gs, label)


def product_form_complementary(u: Sequence[Expr], v: Sequence[Expr], theta, alpha, limits, F, Gs,
                               label: str = "") -> GeneratorSpec:
    """V = prod((1-theta_i) v_i + theta_i)^alpha_i and U = prod(theta_i u_i)^alpha_i."""
    Gs = _listify(Gs)
    _check_uv(u, v, len(Gs))
    V, U = _product_scalings(u, v, theta, alpha, complementary=True)
    mu, ell, ms, nus = zip(*limits)
    return GeneratorSpec(COMPLEMENTARY, U, V, mu, ell, ms, nus, F, Gs, label)


# ------------------------------------------------------------------ equivalence


def rewrap_as_uniform(H: GeneratedCdf | GeneratorSpec) -> GeneratorSpec:
    """Same H written as a single uniform-F integral from 0 to H itself."""
    spec = H.spec if isinstance(H, GeneratedCdf) else H
    mu = h_expression(spec)
    return GeneratorSpec(DIRECT, dsl.ONE, dsl.ZERO, [mu], [dsl.ZERO], [dsl.ZERO], [dsl.ZERO],
                         make_uniform01(), spec.baselines_g, label=f"rewrap({spec.label})")


__all__ = [
    "DIRECT", "COMPLEMENTARY", "GeneratorSpec", "GeneratedCdf", "ValidationReport", "Verdict",
    "validate", "build", "eval_cdf", "eval_density", "sample", "product_form_direct",
    "product_form_complementary", "rewrap_as_uniform", "h_expression", "direct_spec",
    "complementary_spec", "f_equivalent", "PASS", "FAIL", "NOT_APPLICABLE",
]
