import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from distgen import catalog, dsl
from distgen.baseline import make_beta, make_gamma, make_power
from distgen.errors import DomainError, IntegrityError, SpecError, ValidationFailed
from distgen.generator import (
    FAIL,
    GeneratorSpec,
    build,
    direct_spec,
    h_expression,
    product_form_complementary,
    product_form_direct,
    rewrap_as_uniform,
    validate,
)

from _corpus import U01, catalog_specs, corpus, identity_spec

g1, g2 = dsl.var(1), dsl.var(2)
GRID = np.linspace(0, 1, 101)


# ---------------------------------------------------------------- validation

def test_beta1_passes_every_condition():
    report = validate(catalog.recipe("beta1_g", {"a": 2.0, "b": 2.0}, U01))
    assert report.ok
    assert [v.condition for v in report.verdicts] == [f"d{i}" for i in range(1, 11)]
    assert all(v.status != FAIL for v in report.verdicts)


def test_lower_limit_above_upper_at_zero_fails_d5():
    spec = direct_spec(U01, [U01], mu=dsl.affine_mix(g1, 0.2), ell=dsl.const(0.5))
    report = validate(spec)
    assert not report.ok
    assert "d5" in report.failed_conditions()


def test_scale_not_one_at_top_fails_d7():
    spec = direct_spec(U01, [U01], mu=g1, ell=dsl.ZERO, U=dsl.const(0.9))
    report = validate(spec)
    assert report["d7"].status == FAIL


def test_complementary_report_uses_cd_ids():
    spec = product_form_complementary([g1], [dsl.complement(g1)], [1.0], [1.0],
                                      [(dsl.INF, dsl.NEG_INF, dsl.NEG_INF, dsl.INF)], U01, [U01])
    report = validate(spec)
    assert report.ok
    assert [v.condition for v in report.verdicts] == [f"cd{i}" for i in range(1, 11)]


def test_build_refuses_invalid_spec():
    spec = direct_spec(U01, [U01], mu=g1, ell=dsl.ZERO, U=dsl.const(0.9))
    with pytest.raises(ValidationFailed) as info:
        build(spec)
    assert "d7" in info.value.report.failed_conditions()


def test_spec_structural_errors():
    with pytest.raises(SpecError):
        direct_spec(U01, [U01], mu=g2, ell=dsl.ZERO)
    with pytest.raises(SpecError):
        GeneratorSpec("sideways", dsl.ONE, dsl.ZERO, [g1], [dsl.ZERO], [dsl.ZERO], [dsl.ZERO], U01, [U01])
    with pytest.raises(SpecError):
        direct_spec(U01, [], mu=g1, ell=dsl.ZERO)
    with pytest.raises(SpecError):
        direct_spec(U01, [U01], mu=[g1] * 65, ell=[dsl.ZERO] * 65)


# ---------------------------------------------------------------- evaluation

@pytest.mark.parametrize("G", [U01, make_gamma(2.0, 1.0), make_beta(0.5, 3)], ids=lambda G: G.describe())
def test_identity_generator_returns_g(G):
    H = build(identity_spec(G))
    xs = np.linspace(*G.window(), 57)
    assert np.allclose(H.eval_cdf(xs), G.eval(xs), atol=1e-15, rtol=0)
    assert H.eval_cdf(0.3) == pytest.approx(G.eval(0.3), abs=1e-15)


def test_marshall_olkin_b1_is_g():
    for route in ("5S1C1.2", "11S1C1.2"):
        H = build(catalog.recipe("marshall_olkin", {"b": 1.0}, U01, route))
        assert H.eval_cdf(0.3) == pytest.approx(0.3, abs=1e-15)
        assert np.allclose(H.eval_cdf(GRID), GRID, atol=1e-15)


def test_beta1_quarter_point():
    H = build(catalog.recipe("beta1_g", {"a": 2.0, "b": 2.0}, U01))
    assert H.eval_cdf(0.25) == pytest.approx(0.15625, abs=1e-14)


def test_eval_cdf_shapes():
    H = build(identity_spec())
    assert isinstance(H.eval_cdf(0.5), float)
    assert H.eval_cdf(np.zeros((2, 3))).shape == (2, 3)
    assert H(0.25) == 0.25


def test_out_of_range_value_is_integrity_error():
    # bypasses validation on purpose: V > 0 with nothing to offset it
    spec = direct_spec(U01, [U01], mu=g1, ell=dsl.ZERO, U=dsl.ONE, V=dsl.ONE,
                       m=dsl.ZERO, nu=dsl.ONE)
    assert not validate(spec).ok
    from distgen.generator import GeneratedCdf
    H = GeneratedCdf(spec, validate(spec))
    with pytest.raises(IntegrityError):
        H.eval_cdf(0.5)


def test_form_equivalence_beta1():
    entry = catalog.get_entry("beta1_g")
    for p in entry.presets:
        a = build(catalog.recipe(entry, p, U01, "3S1C1.2")).eval_cdf(GRID)
        b = build(catalog.recipe(entry, p, U01, "9S1C1.2")).eval_cdf(GRID)
        assert np.max(np.abs(a - b)) <= 1e-9


# ---------------------------------------------------------------- density

def test_identity_density_is_g():
    G = make_gamma(2.0, 1.0)
    H = build(identity_spec(G))
    xs = np.linspace(0.1, 8, 23)
    assert np.allclose(H.eval_density(xs), G.density(xs), atol=1e-9, rtol=0)


def test_exponentiated_density():
    H = build(catalog.recipe("exponentiated_g", {"a": 2.0}, U01))
    val, method = H.density_with_method(0.5)
    assert method == "symbolic"
    assert val == pytest.approx(1.0, abs=1e-12)


def test_beta1_density_matches_finite_difference():
    H = build(catalog.recipe("beta1_g", {"a": 2.0, "b": 2.0}, U01))
    fd = (H.eval_cdf(0.5 + 1e-6) - H.eval_cdf(0.5 - 1e-6)) / 2e-6
    assert fd == pytest.approx(1.5, abs=1e-6)
    assert H.eval_density(0.5) == pytest.approx(1.5, abs=1e-12)


def test_density_needs_continuous_parts():
    from _corpus import discrete_g_spec
    H = build(discrete_g_spec())
    with pytest.raises(DomainError):
        H.eval_density(0.5)


def _density_specs():
    out = []
    for name, spec in catalog_specs(make_gamma(2.0, 1.0)):
        F = spec.baseline_f
        if F.density is not None:
            out.append((name, spec))
    return out


@pytest.mark.parametrize("name,spec", _density_specs(), ids=[n for n, _ in _density_specs()])
def test_density_consistency(name, spec):
    H = build(spec)
    lo, hi = H.window()
    inner = np.linspace(lo, hi, 52)[1:-1]
    dens = np.asarray(H.eval_density(inner))
    h = 1e-6
    fd = (H.eval_cdf(inner + h) - H.eval_cdf(inner - h)) / (2 * h)
    assert np.all(np.abs(dens - fd) <= 1e-4 * np.maximum(1.0, dens))
    total = catalog_total_density(H, lo, hi)
    assert total == pytest.approx(1.0, abs=1e-6)


def catalog_total_density(H, lo, hi):
    # independent rule: scipy's QUADPACK, split so endpoint singularities stay at the ends
    v1, _ = integrate.quad(H.eval_density, 0.0, 2.0, limit=200)
    v2, _ = integrate.quad(H.eval_density, 2.0, np.inf, limit=200)
    return v1 + v2


def test_density_in_far_tail_is_finite():
    H = build(catalog.recipe("kumaraswamy_g_type2", {"a": 0.5, "b": 3.0}, make_gamma(2.0, 1.0)))
    vals, method = H.density_with_method(np.array([1.0, 100.0]))
    assert np.all(np.isfinite(vals)) and vals[1] == pytest.approx(0.0, abs=1e-12)
    assert method == "finite_difference"
    assert H.density_with_method(1.0)[1] == "symbolic"


# ---------------------------------------------------------------- product forms

def test_product_form_alpha_zero_reproduces_1s():
    limits = [(g1, dsl.ZERO, dsl.ZERO, dsl.ZERO)]
    spec = product_form_direct([g1], [dsl.complement(g1)], [0.5], [0.0], limits, U01, [U01])
    assert spec.scale_u == dsl.ONE and spec.scale_v == dsl.ONE
    H = build(spec)
    assert np.allclose(H.eval_cdf(GRID), GRID, atol=1e-15)


def test_product_form_theta_zero_gives_row_two_shape():
    u = dsl.power(g1, 2.0)
    spec = product_form_direct([u], [dsl.complement(g1)], [0.0], [1.0],
                               [(g1, dsl.ZERO, dsl.ZERO, dsl.ZERO)], U01, [U01])
    assert spec.scale_v == dsl.ZERO
    assert np.allclose(build(spec).eval_cdf(GRID), GRID**3, atol=1e-15)


def test_product_form_theta_one_makes_u_constant():
    spec = product_form_direct([g1, dsl.power(g1, 3.0)], [dsl.complement(g1)] * 2, [1.0, 1.0],
                               [2.0, 0.5], [(g1, dsl.ZERO, dsl.INF, dsl.INF)], U01, [U01])
    assert spec.scale_u == dsl.ONE


def test_product_form_corner_preconditions():
    lim = [(g1, dsl.ZERO, dsl.ZERO, dsl.ZERO)]
    with pytest.raises(DomainError):
        product_form_direct([dsl.affine_mix(g1, 0.1)], [dsl.complement(g1)], [0.5], [1.0], lim, U01, [U01])
    with pytest.raises(DomainError):
        product_form_direct([g1], [g1], [0.5], [1.0], lim, U01, [U01])
    with pytest.raises(DomainError):
        product_form_direct([g1], [dsl.complement(g1)], [1.5], [1.0], lim, U01, [U01])
    with pytest.raises(SpecError):
        product_form_direct([g1], [dsl.complement(g1)], [0.5, 0.5], [1.0], lim, U01, [U01])


def test_complementary_13s_shape():
    # alpha = 0 leaves H = 1 - (F(nu) - F(m)) + (F(mu) - F(l))
    lim = [(dsl.power(g1, 2.0), dsl.ZERO, dsl.ZERO, dsl.ONE)]
    spec = product_form_complementary([g1], [dsl.complement(g1)], [0.5], [0.0], lim, U01, [U01])
    assert np.allclose(build(spec).eval_cdf(GRID), GRID**2, atol=1e-15)


def test_complementary_22s_closed_form():
    theta, alpha = 0.4, 1.7
    spec = product_form_complementary([g1], [dsl.complement(g1)], [theta], [alpha],
                                      [(dsl.INF, dsl.NEG_INF, dsl.NEG_INF, dsl.INF)], U01, [U01])
    want = 1 - ((1 - theta) * (1 - GRID) + theta) ** alpha + (theta * GRID) ** alpha
    assert np.allclose(build(spec).eval_cdf(GRID), want, atol=1e-14)


def test_complementary_theta_one_is_g():
    spec = product_form_complementary([g1], [dsl.complement(g1)], [1.0], [1.0],
                                      [(dsl.INF, dsl.NEG_INF, dsl.NEG_INF, dsl.INF)], U01, [U01])
    assert np.allclose(build(spec).eval_cdf(GRID), GRID, atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.1, 3.0), st.floats(0.2, 4.0))
def test_scaling_degeneracy(theta, a1, a2):
    limits = [(g1, dsl.ZERO, dsl.ZERO, dsl.ZERO)]
    base = product_form_direct([g1], [dsl.complement(g1)], [theta], [0.0], limits, U01, [U01])
    u = dsl.power(g1, a1)
    v = dsl.complement(dsl.power(g1, a2))
    other = product_form_direct([u], [v], [theta], [0.0], limits, U01, [U01])
    assert np.array_equal(build(base).eval_cdf(GRID), build(other).eval_cdf(GRID))


# ---------------------------------------------------------------- rewrap

def test_rewrap_identity():
    H = build(identity_spec())
    R = build(rewrap_as_uniform(H))
    assert R.spec.baseline_f.family == "uniform01"
    assert np.max(np.abs(R.eval_cdf(GRID) - H.eval_cdf(GRID))) <= 1e-12


@pytest.mark.parametrize("name,params", [("kumaraswamy_g", {"a": 2.0, "b": 3.0}),
                                         ("marshall_olkin", {"b": 2.0})])
def test_rewrap_named_classes(name, params):
    H = build(catalog.recipe(name, params, U01))
    R = build(rewrap_as_uniform(H))
    assert np.max(np.abs(R.eval_cdf(GRID) - H.eval_cdf(GRID))) <= 1e-9


@pytest.mark.parametrize("name,spec", catalog_specs(), ids=[n for n, _ in catalog_specs()])
def test_rewrap_witness_for_catalog(name, spec):
    H = build(spec)
    R = build(rewrap_as_uniform(spec))
    xs = np.linspace(*H.window(), 101)
    assert np.max(np.abs(R.eval_cdf(xs) - H.eval_cdf(xs))) <= 1e-9


def test_h_expression_evaluates_like_h():
    spec = catalog.recipe("kumaraswamy_g", {"a": 2.0, "b": 3.0}, U01)
    e = h_expression(spec)
    assert np.allclose(dsl.evaluate_many(e, GRID[None, :]), build(spec).eval_cdf(GRID), atol=1e-15)


# ---------------------------------------------------------------- axioms over the corpus

@pytest.mark.parametrize("name,spec", corpus(), ids=[n for n, _ in corpus()])
def test_axiom_scan_over_corpus(name, spec):
    H = build(spec)
    lo, hi = H.window()
    xs = np.concatenate([[-math.inf, -1e300], np.linspace(lo, hi, 1001), [1e300, math.inf]])
    h = H.eval_cdf(xs)
    assert np.all(np.diff(h) >= -1e-10)
    assert h[0] <= 1e-8 and h[-1] >= 1 - 1e-8


# ---------------------------------------------------------------- sampling

def test_sample_uniform_ks():
    H = build(identity_spec())
    draws = H.sample(10_000, 20260101)
    res = stats.kstest(draws, "uniform")
    crit = 1.63 / math.sqrt(10_000)  # 1% level, asymptotic
    assert res.statistic < crit


def test_sample_is_deterministic():
    H = build(catalog.recipe("kumaraswamy_g", {"a": 2.0, "b": 3.0}, make_gamma(2.0, 1.0)))
    assert H.sample(50, 7) == H.sample(50, 7)
    assert H.sample(50, 7) != H.sample(50, 8)
    assert H.sample(0, 7) == []
    with pytest.raises(DomainError):
        H.sample(-1, 7)


def test_sample_discrete_g_hits_atoms():
    from _corpus import discrete_g_spec
    H = build(discrete_g_spec())
    draws = H.sample(200, 3)
    assert set(draws) <= {0.0, 1.0, 2.5}
    assert len(set(draws)) == 3


def test_sample_t7_lands_in_f_atoms_preimage():
    from _corpus import t7_spec
    H = build(t7_spec())
    draws = np.array(H.sample(300, 11))
    assert np.all((draws >= 0) & (draws <= 1))


def test_power_subcase_quantile_round_trip():
    H = build(direct_spec(make_power(3.0), [U01], mu=g1, ell=dsl.ZERO))
    ps = np.array([0.05, 0.5, 0.95])
    assert np.allclose(H.quantile(ps), ps ** (1 / 3), atol=1e-10)
