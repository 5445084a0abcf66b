"""Support and nature of generated distributions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dsl
from .generator import GeneratedCdf, GeneratorSpec, f_equivalent

INCREASE_TOL = 1e-10
REFINE_WIDTH = 1e-8


@dataclass(frozen=True)
class SupportSet:
    """Closed intervals plus isolated atoms, both sorted.

    Endpoints are always reported closed; whether an endpoint belongs to
    the support cannot be observed through CDF values.
    """

    intervals: tuple = ()
    atoms: tuple = ()

    def __post_init__(self):
        ivs = sorted((float(a), float(b)) for a, b in self.intervals)
        merged: list = []
        for a, b in ivs:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        atoms = sorted({float(a) for a in self.atoms
                        if not any(lo <= a <= hi for lo, hi in merged)})
        object.__setattr__(self, "intervals", tuple(merged))
        object.__setattr__(self, "atoms", tuple(atoms))

    def contains(self, x: float, tol: float = 0.0) -> bool:
        if any(lo - tol <= x <= hi + tol for lo, hi in self.intervals):
            return True
        return any(abs(x - a) <= tol for a in self.atoms)

    def covers(self, other: SupportSet, tol: float = 0.0) -> bool:
        """other is a subset of self, with endpoints allowed to stick out by tol."""
        for lo, hi in other.intervals:
            if not any(a - tol <= lo and hi <= b + tol for a, b in self.intervals):
                return False
        return all(self.contains(a, tol) for a in other.atoms)

    def render(self) -> str:
        def num(v):
            if math.isinf(v):
                return "inf" if v > 0 else "-inf"
            return f"{v:.10g}"

        lines = []
        if self.intervals:
            lines.append("intervals: " + " U ".join(f"[{num(a)}, {num(b)}]" for a, b in self.intervals))
        if self.atoms:
            lines.append("atoms: " + ", ".join(num(a) for a in self.atoms))
        return "\n".join(lines) if lines else "empty"


@dataclass(frozen=True)
class NatureVerdict:
    nature: str  # discrete, continuous_cdf, continuous_rv, mixed, unknown
    justification: str | None

    def render(self) -> str:
        if self.justification:
            return f"nature: {self.nature} ({self.justification})"
        return f"nature: {self.nature}"


def _baseline_support(G) -> SupportSet:
    if G.is_discrete:
        return SupportSet(atoms=tuple(G.atoms()))
    if G.support_convex:
        return SupportSet(intervals=((G.support_lo, G.support_hi),))
    # a non-convex continuous support is only known through its hull
    return SupportSet(intervals=((G.support_lo, G.support_hi),))


def support_upper_bound(spec: GeneratorSpec) -> SupportSet:
    """Union of the G supports, which always contains the support of H."""
    ivs, atoms = [], []
    for G in spec.baselines_g:
        s = _baseline_support(G)
        ivs.extend(s.intervals)
        atoms.extend(s.atoms)
    return SupportSet(tuple(ivs), tuple(atoms))


def _positive_on_cube(e, m) -> bool:
    lo, _ = dsl.bounds(e)
    if lo > 0:
        return True
    vals = dsl.evaluate_many(e, dsl.lattice(m))
    return bool(np.all(vals > 0))


def _strict_everywhere(exprs, m) -> bool:
    # each variable needs some expression certified strict in it
    dirs = [dsl.infer_direction(e, m) for e in exprs]
    return all(any(d[i].strict and d[i].sign in (1, -1) for d in dirs) for i in range(m))


def t4_conditions(spec: GeneratorSpec) -> dict:
    """Which of the exact-support hypotheses hold: f1 and the two f2 branches."""
    F = spec.baseline_f
    m = spec.m
    sup, inf = F.support_hi, F.support_lo
    mu_n1 = dsl.corner_values(spec.upper[-1], m)[1]
    l_11 = dsl.corner_values(spec.lower[0], m)[1]
    nu_n0 = dsl.corner_values(spec.v_upper[-1], m)[0]
    m_10 = dsl.corner_values(spec.m_lower[0], m)[0]

    def at(a, b):
        return a == b or f_equivalent(F, a, b) and math.isfinite(a) == math.isfinite(b)

    branch_a = (at(mu_n1, sup) and at(l_11, inf) and _positive_on_cube(spec.scale_u, m)
                and _strict_everywhere(list(spec.upper) + list(spec.lower), m))
    branch_b = (at(nu_n0, sup) and at(m_10, inf) and _positive_on_cube(spec.scale_v, m)
                and _strict_everywhere(list(spec.v_upper) + list(spec.m_lower), m))
    return {"f1": bool(F.support_convex), "f2_mu_l": bool(branch_a), "f2_nu_m": bool(branch_b)}


def support_exact_if_T4(spec: GeneratorSpec) -> SupportSet | None:
    """The union of G supports when the exact-support hypotheses certify it."""
    c = t4_conditions(spec)
    if c["f1"] and (c["f2_mu_l"] or c["f2_nu_m"]):
        return support_upper_bound(spec)
    return None


def _scan_window(H: GeneratedCdf) -> tuple[float, float]:
    lo, hi = H.window()
    pad = 1e-3 * max(hi - lo, 1.0)
    return lo - pad, hi + pad


def numeric_support_scan(H: GeneratedCdf, grid_points: int = 1001) -> SupportSet:
    """Where H increases, found on a grid and refined by bisection."""
    lo, hi = _scan_window(H)
    xs = np.linspace(lo, hi, int(grid_points))
    hv = np.asarray(H.eval_cdf(xs), float)
    rising = np.diff(hv) > INCREASE_TOL
    runs = []
    k = 0
    while k < rising.size:
        if rising[k]:
            start = k
            while k + 1 < rising.size and rising[k + 1]:
                k += 1
            runs.append((start, k))
        k += 1
    ivs, atoms = [], []
    for r, (start, end) in enumerate(runs):
        # slow rises hide in the flat cells next to a run, so refine across
        # the whole flat stretch up to the neighbouring run
        left = runs[r - 1][1] + 1 if r else 0
        right = runs[r + 1][0] if r + 1 < len(runs) else xs.size - 1
        a = _refine_left(H, xs[left], xs[start + 1], hv[left])
        b = _refine_right(H, xs[end], xs[right], hv[right])
        if b - a <= 2 * _width(a, b):
            atoms.append(b)
        else:
            ivs.append((a, b))
    return SupportSet(tuple(ivs), tuple(atoms))


def _width(a, b):
    # far out on heavy tails adjacent doubles are wider than REFINE_WIDTH
    return max(REFINE_WIDTH, 4 * np.spacing(max(abs(a), abs(b))))


def _refine_left(H, a, b, h_a):
    # last point where H still equals its value at a
    thr = 1e-14
    while b - a > _width(a, b):
        mid = 0.5 * (a + b)
        if H.eval_cdf(mid) - h_a > thr:
            b = mid
        else:
            a = mid
    return b


def _refine_right(H, a, b, h_b):
    # first point where H has reached its value at b
    thr = 1e-14
    while b - a > _width(a, b):
        mid = 0.5 * (a + b)
        if h_b - H.eval_cdf(mid) > thr:
            a = mid
        else:
            b = mid
    return b


def _all_continuous_maps(spec: GeneratorSpec) -> bool:
    # every node of the closed algebra is continuous where finite; Mass
    # nodes inherit continuity from their baseline
    def ok(e):
        if isinstance(e, dsl.Mass) and e.cdf.is_discrete:
            return False
        return all(ok(c) for c in dsl.children(e))

    return all(ok(e) for _, e in spec.named_expressions())


def classify_nature(spec: GeneratorSpec) -> NatureVerdict:
    F = spec.baseline_f
    Gs = spec.baselines_g
    if all(G.is_discrete for G in Gs):
        return NatureVerdict("discrete", "C3.1")
    U, V = spec.scale_u, spec.scale_v
    unit = (dsl.is_constant(U) and dsl.is_constant(V)
            and dsl.evaluate(U, []) == 1.0 and dsl.evaluate(V, []) == 1.0)
    if F.is_discrete and unit:
        return NatureVerdict("discrete", "T7")
    if F.is_continuous and all(G.is_continuous for G in Gs) and _all_continuous_maps(spec):
        if F.density is not None and all(G.density is not None for G in Gs):
            return NatureVerdict("continuous_rv", "T6")
        return NatureVerdict("continuous_cdf", "T5")
    if any(G.is_discrete for G in Gs) and any(G.is_continuous for G in Gs):
        return NatureVerdict("mixed", None)
    return NatureVerdict("unknown", None)


__all__ = [
    "SupportSet", "NatureVerdict", "support_upper_bound", "support_exact_if_T4", "t4_conditions",
    "numeric_support_scan", "classify_nature",
]
