import math

import numpy as np
import pytest

from distgen import catalog, dsl
from distgen.analysis import (
    SupportSet,
    classify_nature,
    numeric_support_scan,
    support_exact_if_T4,
    support_upper_bound,
    t4_conditions,
)
from distgen.baseline import make_discrete_step, make_gamma, make_uniform
from distgen.generator import build, direct_spec

from _corpus import U01, corpus, discrete_g_spec, disjoint_spec, identity_spec, t7_spec

g1 = dsl.var(1)
CORPUS = corpus()
IDS = [n for n, _ in CORPUS]


# ---------------------------------------------------------------- SupportSet

def test_support_set_merges_and_sorts():
    s = SupportSet(((2, 3), (0, 1), (0.5, 1.5)), (5, 0.7, -1))
    assert s.intervals == ((0.0, 1.5), (2.0, 3.0))
    assert s.atoms == (-1.0, 5.0)
    assert s.render() == "intervals: [0, 1.5] U [2, 3]\natoms: -1, 5"


def test_support_set_queries():
    s = SupportSet(((0, 1),), (2,))
    assert s.contains(1.0) and s.contains(2.0) and not s.contains(1.5)
    assert s.covers(SupportSet(((0.2, 1.0000001),), (2,)), tol=1e-6)
    assert not s.covers(SupportSet(((0.2, 1.5),)))
    assert SupportSet().render() == "empty"
    assert SupportSet(((0, math.inf),)).render() == "intervals: [0, inf]"


# ---------------------------------------------------------------- upper bound

def test_upper_bound_single_uniform():
    assert support_upper_bound(identity_spec()).intervals == ((0.0, 1.0),)


def test_upper_bound_union_of_disjoint():
    assert support_upper_bound(disjoint_spec()).intervals == ((0.0, 1.0), (2.0, 3.0))


def test_upper_bound_discrete():
    spec = direct_spec(U01, [make_discrete_step([(0.0, 0.5), (1.0, 0.5)])], mu=g1, ell=dsl.ZERO)
    s = support_upper_bound(spec)
    assert s.intervals == () and s.atoms == (0.0, 1.0)


# ---------------------------------------------------------------- exact support

def test_t4_beta1_is_exact():
    spec = catalog.recipe("beta1_g", {"a": 2.0, "b": 2.0}, U01)
    assert t4_conditions(spec) == {"f1": True, "f2_mu_l": True, "f2_nu_m": False}
    assert support_exact_if_T4(spec).intervals == ((0.0, 1.0),)
    scan = numeric_support_scan(build(spec))
    (a, b), = scan.intervals
    assert a == pytest.approx(0.0, abs=1e-6) and b == pytest.approx(1.0, abs=1e-6)


def test_t4_declines_without_strict_map():
    # U = g1 carries all the x-dependence; mu is a constant
    spec = direct_spec(U01, [U01], mu=dsl.ONE, ell=dsl.ZERO, U=g1)
    assert build(spec).eval_cdf(0.4) == pytest.approx(0.4)
    assert not t4_conditions(spec)["f2_mu_l"]
    assert support_exact_if_T4(spec) is None


def test_t4_disjoint_mixture():
    spec = disjoint_spec()
    exact = support_exact_if_T4(spec)
    assert exact.intervals == ((0.0, 1.0), (2.0, 3.0))
    scan = numeric_support_scan(build(spec))
    assert len(scan.intervals) == 2 and not scan.atoms
    for (a, b), (c, d) in zip(scan.intervals, exact.intervals):
        assert abs(a - c) <= 1e-6 and abs(b - d) <= 1e-6


# ---------------------------------------------------------------- numeric scan

def test_scan_identity():
    (a, b), = numeric_support_scan(build(identity_spec()), 1001).intervals
    assert a == pytest.approx(0.0, abs=1e-6) and b == pytest.approx(1.0, abs=1e-6)


def test_scan_detects_gap():
    H = build(disjoint_spec())
    scan = numeric_support_scan(H)
    gap = np.linspace(1 + 1e-3, 2 - 1e-3, 1001)
    assert np.ptp(H.eval_cdf(gap)) == 0.0
    assert not any(scan.contains(x) for x in gap)


def test_scan_discrete_atoms():
    scan = numeric_support_scan(build(discrete_g_spec()))
    assert scan.intervals == ()
    assert np.allclose(scan.atoms, [0.0, 1.0, 2.5], atol=1e-6)


def test_scan_t7_atoms_at_preimages():
    # F jumps at 0.25 and 0.75 and mu = g1 = x on [0, 1]
    scan = numeric_support_scan(build(t7_spec()))
    assert np.allclose(scan.atoms, [0.25, 0.75], atol=1e-6)


@pytest.mark.parametrize("name,spec", CORPUS, ids=IDS)
def test_containment(name, spec):
    scan = numeric_support_scan(build(spec))
    assert support_upper_bound(spec).covers(scan, tol=1e-6)


def _band(H, s, level=1e-6):
    lo, hi = H.quantile(np.array([level, 1 - level]))
    out = []
    for a, b in s.intervals:
        a, b = max(a, lo), min(b, hi)
        if b > a:
            out.append((a, b))
    return out


@pytest.mark.parametrize("name,spec", CORPUS, ids=IDS)
def test_equality_when_certified(name, spec):
    # compared where 1e-6 <= H <= 1 - 1e-6: outside that band H can be too
    # flat for double precision to show where it starts rising
    exact = support_exact_if_T4(spec)
    if exact is None:
        return
    H = build(spec)
    want = _band(H, exact)
    got = _band(H, numeric_support_scan(H))
    assert len(got) == len(want)
    for (a, b), (c, d) in zip(got, want):
        assert abs(a - c) <= 1e-6 * max(1.0, abs(c))
        assert abs(b - d) <= 1e-6 * max(1.0, abs(d))


# ---------------------------------------------------------------- nature

def test_nature_all_discrete_g():
    v = classify_nature(discrete_g_spec())
    assert (v.nature, v.justification) == ("discrete", "C3.1")
    assert v.render() == "nature: discrete (C3.1)"


def test_nature_t7():
    v = classify_nature(t7_spec())
    assert (v.nature, v.justification) == ("discrete", "T7")


def test_nature_beta1_has_density():
    v = classify_nature(catalog.recipe("beta1_g", {"a": 2.0, "b": 2.0}, U01))
    assert (v.nature, v.justification) == ("continuous_rv", "T6")


def test_nature_discrete_f_needs_unit_scalings():
    F = make_discrete_step([(0.25, 0.5), (0.75, 0.5)])
    spec = direct_spec(F, [U01], mu=g1, ell=dsl.NEG_INF)
    assert classify_nature(spec).nature == "unknown"


def test_nature_mixed_baselines():
    D = make_discrete_step([(5.0, 1.0)])
    spec = direct_spec(U01, [U01, D], mu=dsl.mul(dsl.const(0.5), dsl.add(g1, dsl.var(2))),
                       ell=dsl.ZERO)
    v = classify_nature(spec)
    assert v.nature == "mixed" and v.render() == "nature: mixed"


def _distinct(h):
    return np.unique(np.round(h, 12)).size


@pytest.mark.parametrize("name,spec", CORPUS, ids=IDS)
def test_discreteness(name, spec):
    if classify_nature(spec).nature != "discrete":
        return
    H = build(spec)
    atoms = {a for G in spec.baselines_g for a in G.atoms()}
    if classify_nature(spec).justification == "T7":
        atoms = set(spec.baseline_f.atoms())
    lo, hi = H.window()
    xs = np.linspace(lo - 1, hi + 1, 10_000)
    assert _distinct(H.eval_cdf(xs)) <= len(atoms) + 1


def _endpoints(spec):
    ends = []
    for G in spec.baselines_g:
        ends += [e for e in (G.support_lo, G.support_hi) if math.isfinite(e)]
    return ends


@pytest.mark.parametrize("name,spec", CORPUS, ids=IDS)
def test_continuity(name, spec):
    """Cells of width 1e-6 rise by at most 1e-4 away from support endpoints.

    At an endpoint H may behave like x^p with small p, where the same cell
    can legitimately rise by far more; there we check there is no atom where
    a support starts and that the rise shrinks with the cell width.
    """
    if classify_nature(spec).nature not in ("continuous_cdf", "continuous_rv"):
        return
    H = build(spec)
    lo, hi = H.window()
    xs = np.linspace(lo, hi, 20_001)
    ends = _endpoints(spec)
    near = np.zeros(xs.size, bool)
    for e in ends:
        near |= np.abs(xs - e) < 1e-3
    jump = H.eval_cdf(xs + 1e-6) - H.eval_cdf(xs)
    assert np.max(jump[~near]) <= 1e-4
    for G in spec.baselines_g:
        # no atom where a baseline's support starts
        if math.isfinite(G.support_lo):
            e = G.support_lo
            assert H.eval_cdf(e) - H.eval_cdf(np.nextafter(e, -math.inf)) <= 1e-12
    for e in ends:
        rises = [H.eval_cdf(e + w) - H.eval_cdf(e) for w in (1e-4, 1e-6, 1e-8, 1e-10)]
        rises += [H.eval_cdf(e) - H.eval_cdf(e - w) for w in (1e-4, 1e-6, 1e-8, 1e-10)]
        up, down = rises[:4], rises[4:]
        # a few ulps of slack: differences of H near 1 are rounding noise
        assert all(b <= a + 1e-15 for a, b in zip(up, up[1:]))
        assert all(b <= a + 1e-15 for a, b in zip(down, down[1:]))


def test_continuity_literal_for_a_regular_spec():
    H = build(catalog.recipe("beta1_g", {"a": 2.0, "b": 2.0}, make_gamma(2.0, 1.0)))
    xs = np.linspace(*H.window(), 20_001)
    assert np.max(H.eval_cdf(xs + 1e-6) - H.eval_cdf(xs)) <= 1e-4


def test_uniform_baseline_support_text():
    H = build(identity_spec(make_uniform(2, 6)))
    assert support_exact_if_T4(H.spec).render() == "intervals: [2, 6]"
