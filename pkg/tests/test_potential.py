import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from szegolab.arcs import TWO_PI, Arc, ArcSet, random_arcset
from szegolab.constructions import tiny_arc_instance as _tiny
from szegolab.measures import Measure
from szegolab.potential import (
    EquilibriumError,
    capacity,
    certify_capacity,
    certify_metric_A,
    certify_metric_B,
    discretization_polynomial,
    equilibrium_measure,
    omega_constant,
    piece_budget,
)
from szegolab.szego import szego_en


def symmetric_union(k: int, length: float, phase: float = 0.0) -> ArcSet:
    return ArcSet(Arc.centered(phase + TWO_PI * j / k, length) for j in range(k))


def symmetric_capacity(k: int, length: float) -> float:
    # preimage of one arc of length k*length under z -> z^k
    return math.sin(k * length / 4) ** (1.0 / k)


# closed-form oracles -------------------------------------------------------------


@pytest.mark.parametrize("length", [0.1, 0.5, 1.0, math.pi])
@pytest.mark.parametrize("method", ["energy", "parametric"])
def test_single_arc_capacity(length, method):
    cap = capacity(Arc(0.7, length), method)
    assert cap == pytest.approx(math.sin(length / 4), rel=1e-4)


def test_parametric_single_arc_is_exact():
    for length in (1e-30, 1e-8, 0.3, 6.0):
        assert capacity(Arc(2.0, length), "parametric") == pytest.approx(math.sin(length / 4), rel=1e-12)


def test_full_circle():
    res = equilibrium_measure(ArcSet.full())
    assert abs(res.capacity - 1.0) <= 1e-10
    assert np.allclose(res.density[0], 1 / TWO_PI)


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("method", ["energy", "parametric"])
def test_symmetric_union_capacity(k, method):
    E = symmetric_union(k, 0.4, phase=0.3)
    assert capacity(E, method) == pytest.approx(symmetric_capacity(k, 0.4), rel=1e-5)


# structural properties ------------------------------------------------------------


@settings(max_examples=8)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(2, 4))
def test_energy_and_parametric_agree(seed, p):
    E = random_arcset(np.random.default_rng(seed), p)
    res = equilibrium_measure(E, cross_check=True, rtol=1e-3)
    assert res.diagnostics["cross_check_rel"] <= 1e-3


def test_cross_check_reports_disagreement():
    E = random_arcset(np.random.default_rng(5), 3)
    with pytest.raises(EquilibriumError) as info:
        equilibrium_measure(E, cells=2, cross_check=True, rtol=1e-9)
    assert set(info.value.values) == {"energy", "parametric"}


@settings(max_examples=6)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(1, 4))
def test_potential_flat_on_E_and_larger_off_E(seed, p):
    E = random_arcset(np.random.default_rng(seed), p)
    res = equilibrium_measure(E, method="parametric")
    logcap = res.log_capacity
    inside = np.concatenate([float(a.start) + a.length * np.linspace(0.02, 0.98, 7) for a in E])
    assert np.max(np.abs(res.potential(inside) - logcap)) <= 1e-6 * abs(logcap)
    gaps = np.concatenate([s + g * np.linspace(0, 1, 66)[1:-1] for s, g in E.gaps()])
    assert np.min(res.potential(gaps) - logcap) > 0


@pytest.mark.parametrize("method", ["energy", "parametric"])
def test_density_nonnegative_and_normalized(method):
    E = random_arcset(np.random.default_rng(11), 3)
    res = equilibrium_measure(E, normalization=14.0, method=method)
    assert all(np.all(d >= 0) for d in res.density)
    if method == "parametric":
        assert res.diagnostics["normalization_residual"] < 1e-10
    else:
        # cell masses: density times widths recovers the normalization
        assert res.diagnostics["min_weight"] >= 0


@settings(max_examples=6)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(1, 3), grow=st.floats(0.01, 0.2))
def test_capacity_monotone_under_inclusion(seed, p, grow):
    E = random_arcset(np.random.default_rng(seed), p, min_gap=0.5)
    assert capacity(E) <= capacity(E.widened(grow)) + 1e-9


@settings(max_examples=6)
@given(seed=st.integers(0, 2**32 - 1), phi=st.floats(-10, 10))
def test_rotation_invariance(seed, phi):
    E = random_arcset(np.random.default_rng(seed), 3)
    a = equilibrium_measure(E, method="parametric")
    b = equilibrium_measure(E.rotated(phi), method="parametric")
    assert b.capacity == pytest.approx(a.capacity, rel=1e-9)
    assert capacity(E.rotated(phi)) == pytest.approx(capacity(E), rel=1e-6)


def test_two_arcs_symmetric_under_reflection():
    E = ArcSet([Arc(0.3, 0.8), Arc(-1.1, 0.8)])
    res = equilibrium_measure(E, method="parametric")
    # reflection theta -> -theta maps one arc onto the other and fixes both gaps
    # so each interlacing point is a fixed point of the reflection: 0 or pi
    assert np.allclose(np.sin(res.betas), 0.0, atol=1e-9)
    assert np.allclose(res.density[0], res.density[1][::-1], rtol=1e-9)


def test_tiny_arcs_both_methods_agree():
    E = ArcSet([Arc(0.1, 1e-20), Arc(2.0, 1e-20), Arc(4.0, 2e-20)])
    a, b = capacity(E, "energy"), capacity(E, "parametric")
    assert a == pytest.approx(b, rel=1e-3)
    assert a < 1e-5


def test_bad_inputs():
    with pytest.raises(ValueError):
        equilibrium_measure(ArcSet())
    with pytest.raises(ValueError):
        equilibrium_measure(Arc(0, 1), method="newton")
    with pytest.raises(ValueError):
        equilibrium_measure(Arc(0, 1), normalization=0)


# discretization polynomial --------------------------------------------------------


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_discretization_certificate(seed):
    E = random_arcset(np.random.default_rng(seed), 1 + seed)
    P, cert = discretization_polynomial(E, 14)
    assert cert.passed
    assert P.degree == cert.degree == 2 * cert.N <= 28 * 14
    assert P.monic
    assert cert.critical_points <= 8 * len(E) - 1
    assert cert.max_piece_mass <= 0.25 + 1e-9 and cert.max_piece_length < math.pi / 8


def test_discretization_bound_against_direct_evaluation():
    E = random_arcset(np.random.default_rng(7), 2)
    res = discretization_polynomial(E, 14)
    theta = np.concatenate([float(a.start) + a.length * np.linspace(0.013, 0.987, 101) for a in E])
    logP = res.polynomial.log_abs_on_circle(theta)
    bound = 14 * res.equilibrium.log_capacity + 3 * math.log(2) * res.certificate.N
    assert np.max(logP) <= bound


def test_discretization_tiny_arc():
    P, cert = discretization_polynomial(Arc(1.0, 1e-12), 14)
    assert cert.degree <= 392
    # |P| <= cap^n 2^{3N} on E
    assert cert.max_log_abs_on_E <= 14 * math.log(math.sin(1e-12 / 4)) + 3 * math.log(2) * cert.N


def test_discretization_symmetric_endpoints():
    E = symmetric_union(2, 0.9)
    res = discretization_polynomial(E, 14)
    zeros = sorted(float(a) % TWO_PI for a, _ in res.polynomial.zeros)
    shifted = sorted((z + math.pi) % TWO_PI for z in zeros)
    assert np.allclose(zeros, shifted, atol=1e-9)


def test_discretization_small_n_flags_enlarged_constants():
    _, cert = discretization_polynomial(Arc(0.0, 1.0), 4)
    assert cert.enlarged_constants and cert.N <= piece_budget(4)[0]
    assert omega_constant(14) == (80.0, False)
    assert omega_constant(4)[1]


def test_discretization_rejects_too_many_arcs():
    with pytest.raises(ValueError):
        discretization_polynomial(random_arcset(np.random.default_rng(0), 4), 3)


# certificates ---------------------------------------------------------------------

BITS = 512


def tiny_arc_instance(turns, Omega, width_log=48):
    return _tiny(turns, Omega, width_log, BITS)


def test_metric_A_point_mass():
    n = 3
    W = 2 * 16 * n * math.log(n) + 10
    with mpmath.workprec(768):
        mu = Measure.atoms([Fraction(0)], [1]) + Measure.lebesgue(mpmath.exp(-W))
    cert = certify_metric_A(mu, n, ctx=768)
    assert cert.status == "certified"
    assert len(cert.arcs) == 1 and cert.arcs[0].length < 1e-10
    assert abs((float(cert.arcs[0].center) + math.pi) % TWO_PI - math.pi) < 1e-10


def test_metric_A_lebesgue_precondition():
    cert = certify_metric_A(Measure.lebesgue(), 4)
    assert cert.status == "precondition"


def test_metric_B_single_arc_zero_residual():
    n, Om = 8, 40.0
    mu = Measure.atoms([Fraction(1, 5)], [1])
    with mpmath.workprec(BITS):
        L = float(mpmath.exp(-4 * Om / n))
        arcs = ArcSet([Arc(2 * mpmath.pi / 5 - mpmath.mpf(L) / 2, L)])
    cert = certify_metric_B(arcs, mu, n, Om, ctx=BITS)
    assert cert.status == "certified"
    with mpmath.workprec(BITS):
        assert cert.measured["e_n_upper"] <= 2 * mpmath.exp(-Om / 2)


def test_metric_B_empty_arcs_residual_term():
    n, Om = 6, 30.0
    with mpmath.workprec(BITS):
        mu = Measure.lebesgue(mpmath.exp(-Om))
    cert = certify_metric_B(ArcSet(), mu, n, Om, ctx=BITS)
    with mpmath.workprec(BITS):
        assert cert.measured["norm2"] <= cert.measured["display_bound"]
        assert cert.measured["display_bound"] == mpmath.exp(-Om)  # deg 0: 4^0 * residual


@pytest.mark.parametrize("n", [8, 16])
def test_metric_B_bounds_true_minimum(n):
    turns = [Fraction(1, 7), Fraction(3, 7), Fraction(5, 7)]
    arcs, mu = tiny_arc_instance(turns, 8 * n)
    cert = certify_metric_B(arcs, mu, n, 8 * n, ctx=BITS)
    assert cert.status == "certified"
    true = szego_en(mu, n, BITS).e_n_squared
    with mpmath.workprec(BITS):
        assert true <= cert.measured["certified_e_n_squared"] * (1 + mpmath.mpf(2) ** -200)
        assert cert.measured["certified_e_n_squared"] <= cert.measured["norm2"]


def test_capacity_A_on_atomic_measure():
    arcs, mu = tiny_arc_instance([Fraction(1, 3), Fraction(2, 3)], 64)
    cert = certify_capacity(mu, 8, direction="A", ctx=BITS)
    assert cert.status == "certified"
    assert len(cert.arcs) <= 8
    assert cert.measured["capacity"] <= cert.measured["capacity_bound"]


def test_capacity_A_lebesgue_never_certifies():
    for n in (2, 4, 8):
        assert certify_capacity(Measure.lebesgue(), n, Omega=n, direction="A").status == "precondition"


def test_capacity_B_tiny_arc():
    n, bits = 14, 2048
    Om = 80 * n
    with mpmath.workprec(bits):
        L = float(4 * mpmath.asin(mpmath.exp(-Om / n))) * 0.999
        arcs = ArcSet([Arc(2 * mpmath.pi / 3 - mpmath.mpf(L) / 2, L)])
        eps = mpmath.exp(-Om)
        mu = Measure.atoms([Fraction(1, 3)], [1 - eps]) + Measure.lebesgue(eps)
    cert = certify_capacity(mu, n, Om, "B", arcs=arcs, ctx=bits, verify_norm=True)
    assert cert.status == "certified", cert.failed_checks()
    assert cert.measured["degree"] <= 28 * n


def test_certificate_json_uses_decimal_strings():
    arcs, mu = tiny_arc_instance([Fraction(1, 4)], 64)
    doc = certify_metric_B(arcs, mu, 8, 64, ctx=BITS).to_json()
    assert doc["status"] == "certified"
    assert isinstance(doc["omega"], str) and isinstance(doc["measured"]["norm2"], str)
    assert len(doc["measured"]["norm2"]) > 100
