import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from szegolab.arcs import Arc, ArcSet
from szegolab.polynomials import (
    ConstructionError,
    KernelSpec,
    arc_sup,
    cartan_cover_check,
    circle_grid,
    concentrated_kernel,
    conjugate_indicator,
    denisov_polynomial,
    halasz_polynomial,
    halasz_product,
    outer_function,
    small_off_arc_monic,
    sublevel_arcs,
    vanishing_power_polynomial,
)
from szegolab.szego import CirclePolynomial

GRID = 1 << 14


# Halasz ---------------------------------------------------------------------------


def test_halasz_degree_one_is_one_minus_z():
    H = halasz_polynomial(1)
    assert np.allclose(H.coefficients, [1, -1])
    assert H.sup_on_grid(GRID) == pytest.approx(2.0)


@pytest.mark.parametrize("d", [2, 3, 5, 8, 13])
def test_halasz_constraints_and_bound(d):
    H = halasz_polynomial(d)
    c = H.coefficients
    assert H.degree <= d
    assert abs(c[0] - 1) <= 1e-10
    assert abs(c.sum()) <= 1e-10
    assert H.sup_on_grid(GRID) <= 1 + 2 / d + 1e-6


def test_halasz_product_single_point():
    P = halasz_product([0.0], 2)
    assert np.allclose(P.coefficients, halasz_polynomial(2).coefficients)
    assert abs(P(1.0)) < 1e-12


def test_halasz_product_antipodal():
    P = halasz_product([0.0, math.pi], 8)
    assert P.sup_on_grid(GRID) <= math.exp(2) * (1 + 1e-6)
    assert complex(P.coeffs[0]) == pytest.approx(1)


def test_halasz_product_vanishes_at_points():
    rng = random.Random(5)
    pts = [rng.uniform(0, 2 * math.pi) for _ in range(3)]
    P = halasz_product(pts, 30)
    assert P.degree <= 30
    with mpmath.workprec(256):
        for p in pts:
            assert abs(P.evaluate_mp(mpmath.expj(p))) <= 1e-9
    assert P.sup_on_grid(GRID) <= math.exp(4 * 9 / 30) * (1 + 1e-6)


def test_halasz_product_empty_and_precondition():
    assert np.allclose(halasz_product([], 10).coefficients, [1])
    with pytest.raises(ValueError):
        halasz_product([0.0, 1.0, 2.0], 4)


# kernel ------------------------------------------------------------------------------


def test_kernel_zero_coefficient_is_one():
    k = concentrated_kernel(KernelSpec(32, 0.5))
    assert k.coefficient(0) == 1.0
    assert k.coefficient(32) == 0.0


def test_kernel_l1_grid_stable():
    a = concentrated_kernel(KernelSpec(64, 0.5, grid=1 << 13))
    b = concentrated_kernel(KernelSpec(64, 0.5, grid=1 << 15))
    assert math.isfinite(a.l1)
    # |q| has kinks at sign changes, so the grid rule converges at second order
    assert abs(a.l1 - b.l1) < 1e-4


def test_kernel_tail_decreases():
    k = concentrated_kernel(KernelSpec(64, 0.5))
    assert k.tails[31] < k.tails[0]
    s = np.arange(1, 33)
    assert np.all(k.tails <= k.constant * s ** 0.5 * np.exp(-np.sqrt(s)) + k.noise_floor)


def test_kernel_rejects_bad_gamma():
    with pytest.raises(ValueError):
        KernelSpec(32, 1.0)


def test_kernel_failure_names_offending_s():
    with pytest.raises(ConstructionError) as info:
        concentrated_kernel(KernelSpec(64, 0.8))
    assert isinstance(info.value.achieved, int)


# outer function ---------------------------------------------------------------------------


def test_outer_quarter_measure():
    # E_{+eps} a single arc of normalised length 1/4
    E = ArcSet([Arc.centered(1.0, 0.1)])
    eps = (math.pi / 2 - 0.1) / 2
    F = outer_function(E, eps)
    assert F.measure == pytest.approx(0.25)
    assert F.sup_on_arcs == pytest.approx(math.exp(-4))
    assert np.max(np.abs(F.samples)) <= 1 + 1e-12
    assert abs(F.value_at_zero) == pytest.approx(1 / math.e, abs=1e-12)
    assert math.exp(F.log_mean_value) == pytest.approx(1 / math.e, abs=1e-3)


def _conjugate_error(grid):
    E = ArcSet([Arc(0.5, 0.4), Arc(3.0, 0.7)])
    F = outer_function(E, 0.0, grid=grid)
    th = circle_grid(F.grid)
    far = np.ones_like(th, dtype=bool)
    for a in F.arcs:
        for end in (float(a.start), a.end):
            far &= np.abs(np.angle(np.exp(1j * (th - end)))) > 0.05
    # arg F = -conj(1l) / m away from the jumps
    diff = np.angle(F.samples[far] * np.exp(1j * conjugate_indicator(F.arcs, th[far]) / F.measure))
    return float(np.max(np.abs(diff))) * F.measure


def test_outer_conjugate_matches_closed_form():
    e1, e2 = _conjugate_error(1 << 14), _conjugate_error(1 << 16)
    assert e1 < 1e-3
    # truncation error of the conjugate series decays like 1/grid
    assert e2 < 0.5 * e1


def test_outer_rejects_empty_and_coarse():
    with pytest.raises(ValueError):
        outer_function(ArcSet(), 0.1)
    with pytest.raises(ValueError, match="16 samples"):
        outer_function(ArcSet([Arc(0.0, 1e-3)]), 0.0, grid=1024)


def test_outer_coefficients_bounded():
    F = outer_function(ArcSet([Arc(0.0, 0.5)]), 0.0, n_coeffs=40)
    assert sum(abs(complex(c)) ** 2 for c in F.coeffs) <= 1 + 1e-12


# Denisov -------------------------------------------------------------------------------------


def test_denisov_basic_properties():
    rng = random.Random(2)
    E = ArcSet([Arc.centered(rng.uniform(0, 6.28), 1e-9) for _ in range(4)])
    k, n = 4, 128
    s_k = 2.0 ** -k
    eps = 1 / (k * abs(math.log(s_k)))
    r = denisov_polynomial(E, eps, n)
    assert r.polynomial.degree < n
    assert abs(abs(r.value_at_zero) - 1 / math.e) <= 1e-3
    assert r.sup_circle <= r.kernel.l1 + 1e-9
    assert r.sup_on_E <= r.bound_on_E <= r.shape_bound


def test_denisov_precondition():
    with pytest.raises(ValueError):
        denisov_polynomial(ArcSet([Arc(0.0, 0.01)]), 0.001, 64)


# vanishing power ---------------------------------------------------------------------------------


def test_vanishing_power_examples():
    assert np.allclose(vanishing_power_polynomial([0.0], [0]).coefficients, [-1, 1])
    P = vanishing_power_polynomial([0.0, math.pi], [1, 1])
    assert P.monic and P.degree == 4
    assert np.allclose(P.coefficients, [1, 0, -2, 0, 1])


def test_vanishing_power_arc_bound():
    P = vanishing_power_polynomial([0.0, 2.0], [2, 2])
    I = Arc.centered(0.0, math.exp(-3))
    assert arc_sup(P, I) <= 2 ** 6 * math.exp(-9)


def test_vanishing_power_budget():
    with pytest.raises(ValueError):
        vanishing_power_polynomial([0.0, 1.0], [3, 3], budget=6)


# off-arc ------------------------------------------------------------------------------------------


def test_off_arc_degree_one():
    r = small_off_arc_monic(1, Arc.centered(0.0, 0.5))
    c = r.polynomial.coefficients
    assert c[-1] == 1 and abs(c[0]) <= 1
    assert r.sup_off <= 2


@given(st.integers(1, 40), st.floats(0.05, 3.0), st.floats(0, 6.28))
def test_off_arc_capacity_target(n, length, center):
    J = Arc.centered(center, length)
    r = small_off_arc_monic(n, J, grid=1 << 12)
    assert r.polynomial.monic and r.polynomial.degree == n
    assert r.sup_off <= 2 * math.cos(length / 4) ** n * (1 + 1e-9) + 1e-9
    assert r.sup_on <= r.growth_bound


def test_off_arc_capacity_is_a_floor():
    """No monic polynomial beats cap^n on the complementary arc."""
    J = Arc.centered(0.0, math.pi / 4)
    r = small_off_arc_monic(16, J)
    assert r.sup_off >= math.cos(math.pi / 16) ** 16


@pytest.mark.xfail(strict=True, reason="2cos^16(pi/8) lies below cap^16 of the complement, see decisions ledger")
def test_off_arc_literal_cos_power_example():
    J = Arc.centered(0.0, math.pi / 4)
    small_off_arc_monic(16, J, target=2 * math.cos(math.pi / 8) ** 16, slack=1e-6)


# sublevel sets ------------------------------------------------------------------------------------


def test_sublevel_monomial_empty():
    r = sublevel_arcs(CirclePolynomial.monomial(4), 0.5)
    assert r.arcs.is_empty and r.flag == "empty"


def test_sublevel_full_flag():
    r = sublevel_arcs(CirclePolynomial.monomial(4), 2.0)
    assert r.arcs.is_full and r.flag == "full"


def test_sublevel_z_minus_one():
    r = sublevel_arcs(CirclePolynomial.from_numpy([-1, 1], monic=True), 1)
    assert len(r.arcs) == 1
    a = r.arcs[0]
    assert float(a.start) == pytest.approx(2 * math.pi - math.pi / 3, abs=1e-10)
    assert a.length == pytest.approx(2 * math.pi / 3, abs=1e-10)


def test_sublevel_z2_minus_one():
    r = sublevel_arcs(CirclePolynomial.from_numpy([-1, 0, 1], monic=True), 1)
    centers = sorted(r.arcs, key=lambda a: abs(a.center - math.pi))
    assert len(centers) == 2
    assert centers[0].center == pytest.approx(math.pi, abs=1e-10)
    c = centers[1].center
    assert min(c, 2 * math.pi - c) == pytest.approx(0, abs=1e-10)


@given(st.integers(0, 10_000), st.floats(0.2, 3.0))
def test_sublevel_matches_grid(seed, tau):
    rng = np.random.default_rng(seed)
    z = np.exp(1j * rng.uniform(0, 2 * np.pi, 5)) * rng.uniform(0.7, 1.3, 5)
    P = CirclePolynomial.from_numpy(np.poly(z)[::-1], monic=True)
    r = sublevel_arcs(P, tau)
    assert len(r.arcs) <= P.degree
    th = circle_grid(4096)
    vals = np.abs(P.on_circle(th))
    clear = np.abs(vals - tau) > 1e-6
    assert np.array_equal(r.arcs.contains(th)[clear], (vals <= tau)[clear])


def test_sublevel_tiny_arc():
    """Arcs far below double resolution are recovered with extended precision."""
    P = vanishing_power_polynomial([1.0], [3], ctx=512)
    with mpmath.workprec(512):
        r = sublevel_arcs(P, mpmath.mpf(10) ** -40, ctx=512)
    assert len(r.arcs) == 1
    # |e^{i t} - 1|^4 <= 1e-40  <=>  |t| <= 2 asin(1e-10 / 2)
    assert r.arcs[0].length == pytest.approx(4 * math.asin(0.5e-10), rel=1e-9)


def test_sublevel_level_below_precision_rejected():
    P = vanishing_power_polynomial([1.0], [3])
    with pytest.raises(ValueError, match="precision"):
        sublevel_arcs(P, mpmath.mpf(10) ** -45, ctx=256)


# Cartan ---------------------------------------------------------------------------------------------


def test_cartan_monomial():
    r = cartan_cover_check(CirclePolynomial.monomial(6), 0.5)
    assert r.cover.is_empty and r.passed


def test_cartan_power_of_linear():
    P = vanishing_power_polynomial([0.0], [7])
    r = cartan_cover_check(P, 0.1)
    assert len(r.cover) == 1
    assert r.radii_sum <= 2 * math.e * 0.1
    assert r.passed


def test_cartan_random_monic():
    rng = np.random.default_rng(0)
    for _ in range(100):
        z = np.exp(1j * rng.uniform(0, 2 * np.pi, 8)) * rng.uniform(0.8, 1.2, 8)
        P = CirclePolynomial.from_numpy(np.poly(z)[::-1], monic=True)
        assert cartan_cover_check(P, 0.05).passed
