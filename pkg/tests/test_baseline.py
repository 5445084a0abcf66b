import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distgen.baseline import (
    axiom_scan,
    family_names,
    from_spec,
    jump_at,
    make_beta,
    make_beta3,
    make_beta_type3,
    make_discrete_step,
    make_gamma,
    make_kumaraswamy_kernel,
    make_kummer_beta,
    make_power,
    make_uniform,
    make_uniform01,
    to_spec,
)
from distgen.errors import DomainError, SpecError
from distgen.numerics import adaptive_quadrature, cdf_segment_mass, regularized_incomplete_beta

TWO_POINT = [(0.0, 0.5), (1.0, 0.5)]


def test_uniform01_values():
    U = make_uniform01()
    assert U.eval(0.5) == 0.5
    assert U.eval(-1) == 0.0
    assert U.eval(2) == 1.0
    assert U.support_convex and U.kind == "closed_form"


def test_uniform_general_interval():
    U = make_uniform(2, 6)
    assert U.eval(3) == pytest.approx(0.25)
    assert U.quantile(0.75) == pytest.approx(5.0, abs=1e-10)
    with pytest.raises(DomainError):
        make_uniform(1, 1)


def test_beta_values():
    xs = np.linspace(0, 1, 11)
    assert np.allclose(make_beta(1, 1).eval(xs), xs, atol=1e-15)
    assert make_beta(2, 2).eval(0.5) == pytest.approx(0.5, abs=1e-15)
    assert make_beta(2, 2).eval(0.25) == pytest.approx(0.25**2 * (3 - 0.5), abs=1e-14)


def test_power_values():
    assert make_power(1).eval(0.3) == pytest.approx(0.3)
    assert make_power(2).eval(0.5) == pytest.approx(0.25)
    assert make_power(0.5).eval(0.25) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        make_power(0)


def test_kumaraswamy_kernel_values():
    assert make_kumaraswamy_kernel(1, 1).eval(0.3) == pytest.approx(0.3, abs=1e-15)
    assert make_kumaraswamy_kernel(2, 1).eval(0.5) == pytest.approx(0.25, abs=1e-15)
    assert make_kumaraswamy_kernel(2, 3).eval(0.5) == pytest.approx(0.578125, abs=1e-15)


def test_gamma_values():
    G = make_gamma(1, 1)
    assert G.eval(0) == 0.0
    assert G.eval(1.7) == pytest.approx(1 - math.exp(-1.7), abs=1e-15)
    assert make_gamma(2, 1).eval(2) == pytest.approx(1 - 3 * math.exp(-2), abs=1e-14)
    with pytest.raises(DomainError):
        make_gamma(-1, 1)


def test_beta3_values():
    F = make_beta3(1, 1)
    assert F.eval(0) == 0.0
    assert F.eval(math.inf) == 1.0
    quad, _ = adaptive_quadrature(lambda t: (1 + t) ** -2.0, 0, 1, 1e-13)
    assert quad == pytest.approx(0.5, abs=1e-12)
    assert F.eval(1.0) == pytest.approx(quad, abs=1e-12)


@pytest.mark.parametrize("a", [0.5, 1, 2])
@pytest.mark.parametrize("b", [0.5, 1, 2])
@pytest.mark.parametrize("x", [0.1, 1, 10])
def test_beta3_substitution_identity(a, b, x):
    F = make_beta3(a, b)
    by_quadrature = cdf_segment_mass(F, 0.0, x)
    assert by_quadrature == pytest.approx(F.eval(x), abs=1e-8)
    assert F.eval(x) == pytest.approx(regularized_incomplete_beta(x / (1 + x), a, b), abs=1e-15)


def test_beta_type3_closed_form_identity():
    F = make_beta_type3(2, 3)
    xs = np.linspace(0, 1, 41)
    assert np.allclose(F.eval(xs), regularized_incomplete_beta(2 * xs / (1 + xs), 2, 3), atol=1e-10)


def test_kummer_reduces_to_beta_when_c_is_zero():
    xs = np.linspace(0, 1, 101)
    assert np.max(np.abs(make_kummer_beta(2, 3, 0).eval(xs) - make_beta(2, 3).eval(xs))) <= 1e-9
    assert make_kummer_beta(2, 3, 1).eval(0) == 0.0


def test_kummer_two_quadratures_agree():
    F = make_kummer_beta(2, 3, 1)
    dens = lambda t: t * (1 - t) ** 2 * np.exp(-t)  # noqa: E731
    # Gauss-Legendre with many nodes as an independent rule
    nodes, weights = np.polynomial.legendre.leggauss(60)
    total = np.sum(weights * dens(0.5 * (nodes + 1))) * 0.5
    half = np.sum(weights * dens(0.25 * (nodes + 1))) * 0.25
    assert F.eval(0.5) == pytest.approx(half / total, abs=1e-9)


def test_discrete_step_is_right_continuous():
    D = make_discrete_step(TWO_POINT)
    assert D.eval(0) == 0.5
    assert D.eval(-0.5) == 0.0
    assert D.eval(0.5) == 0.5
    assert D.eval(1) == 1.0
    assert D.atoms() == [0.0, 1.0]
    assert jump_at(D, 1.0) == 0.5 and jump_at(D, 0.5) == 0.0


@pytest.mark.parametrize("jumps", [
    [(1.0, 0.5), (0.0, 0.5)],
    [(0.0, 0.5), (1.0, 0.4)],
    [(0.0, 1.5), (1.0, -0.5)],
    [],
])
def test_discrete_step_rejects_bad_jumps(jumps):
    with pytest.raises(DomainError):
        make_discrete_step(jumps)


def test_discrete_quantile_hits_atoms():
    D = make_discrete_step([(0.0, 0.2), (1.0, 0.5), (2.5, 0.3)])
    assert list(D.quantile(np.array([0.1, 0.2, 0.21, 0.7, 0.71, 1.0]))) == [0, 0, 1, 1, 2.5, 2.5]


ALL = [
    make_uniform01(), make_uniform(-3, 5), make_beta(0.5, 0.5), make_beta(5, 1), make_power(0.2),
    make_kumaraswamy_kernel(0.5, 4), make_gamma(0.4, 3), make_gamma(9, 0.5), make_beta3(0.7, 1.2),
    make_beta_type3(0.5, 3), make_kummer_beta(0.5, 2, -1), make_kummer_beta(3, 2, 4),
    make_discrete_step([(-1, 0.1), (0, 0.3), (4, 0.6)]),
]


@pytest.mark.parametrize("F", ALL, ids=lambda F: F.describe())
def test_axiom_scan(F):
    r = axiom_scan(F)
    assert r["max_decrease"] <= 0.0
    assert r["at_neg_inf"] == 0.0 and r["at_pos_inf"] == 1.0
    lo, hi = F.window()
    if not F.atoms():
        assert F.eval(lo) <= 1e-8
    assert F.eval(hi) >= 1 - 1e-8


@pytest.mark.parametrize("F", [F for F in ALL if F.density is not None], ids=lambda F: F.describe())
def test_quantile_inverts_eval(F):
    # the root is located in x, so check the bracket around it rather than F(x) itself
    ps = np.array([0.01, 0.3, 0.5, 0.9, 0.999])
    xs = F.quantile(ps)
    assert np.all(F.eval(xs + 1e-11) >= ps - 1e-12)
    assert np.all(F.eval(xs - 1e-11) <= ps + 1e-12)


QUAD = [F for F in ALL if F.kind == "density_quadrature"]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(QUAD), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_quadrature_masses_add_up(F, a, b, t):
    lo, hi = sorted((a, b))
    lo, hi = lo * 3, hi * 3
    mid = lo + t * (hi - lo)
    whole = cdf_segment_mass(F, lo, hi)
    split = cdf_segment_mass(F, lo, mid) + cdf_segment_mass(F, mid, hi)
    assert split == pytest.approx(whole, abs=2e-10)


def test_registry_round_trip():
    for F in ALL:
        spec = to_spec(F)
        back = from_spec(spec["family"], spec["params"])
        xs = np.linspace(*F.window(), 17)
        assert np.allclose(back.eval(xs), F.eval(xs), atol=0, rtol=0)
    assert "kummer_beta" in family_names()


def test_registry_errors():
    with pytest.raises(SpecError):
        from_spec("zeta", {})
    with pytest.raises(SpecError):
        from_spec("beta", {"a": 1})
    with pytest.raises(SpecError):
        from_spec("beta", {"a": 1, "b": 1, "c": 2})
