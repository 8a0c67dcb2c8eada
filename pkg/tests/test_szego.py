import random
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from szegolab.measures import (
    AtomicComponent,
    DensityPiece,
    Measure,
    PiecewiseDensityComponent,
    RieszProductComponent,
    moments,
)
from szegolab.precision import PrecisionContext, to_mpf
from szegolab.szego import (
    CirclePolynomial,
    brute_force_en,
    en_profile,
    gram_toeplitz,
    szego_en,
    toeplitz_det_ratio,
)

CTX = PrecisionContext(256)


def riesz_single():
    return Measure(((1, RieszProductComponent((1,), (1,))),))


def random_mixture(seed, max_atoms=20):
    rng = random.Random(seed)
    k = rng.randint(1, max_atoms)
    turns = rng.sample(range(1, 4096), k)
    atoms = AtomicComponent(tuple(F(t, 4096) for t in turns), tuple(F(rng.randint(1, 50), 50) for _ in turns))
    parts = [(1, atoms)]
    for _ in range(rng.randint(0, 2)):
        a = F(rng.randint(0, 60), 64)
        b = a + F(rng.randint(1, 4), 64)
        piece = rng.choice(
            [
                DensityPiece("constant", (F(rng.randint(1, 9), 10),)),
                DensityPiece("exp_linear", (F(rng.randint(-5, 5), 10), F(rng.randint(-9, 9), 10))),
            ]
        )
        parts.append((F(rng.randint(1, 5), 10), PiecewiseDensityComponent((a, b), (piece,))))
    return Measure(tuple(parts))


def test_gram_examples():
    T = gram_toeplitz(moments(Measure.lebesgue(), 2), 2)
    assert T == mpmath.eye(3)
    T = gram_toeplitz(moments(riesz_single(), 1), 1)
    assert [complex(T[i, j]) for i in range(2) for j in range(2)] == [1, 0.5, 0.5, 1]
    T = gram_toeplitz(moments(Measure.atoms([0, F(1, 2)], [F(1, 2), F(1, 2)]), 1), 1)
    assert T == mpmath.eye(2)


def test_gram_needs_enough_moments():
    with pytest.raises(ValueError):
        gram_toeplitz(moments(Measure.lebesgue(), 2), 3)


def test_lebesgue_extremal_is_monomial():
    for n in (0, 1, 5):
        r = szego_en(Measure.lebesgue(), n)
        assert r.e_n == 1
        assert [complex(c) for c in r.extremal.coeffs] == [0] * n + [1]


def test_eighth_roots():
    prof = en_profile(Measure.roots_of_unity(8), 8)
    with mpmath.workprec(256):
        assert all(abs(r.e_n_squared - 1) < 1e-30 for r in prof[:8])
    assert prof[8].degenerate and prof[8].first_singular_index == 8
    assert prof[8].e_n == 0
    assert szego_en(Measure.roots_of_unity(8), 5).e_n_squared == 1


def test_brute_force_examples():
    assert brute_force_en(Measure.atoms([0, F(1, 2)], [F(1, 2), F(1, 2)]), 1) == 1
    assert brute_force_en(Measure.atoms([0], [1]), 1) == 0
    with mpmath.workprec(256):
        assert abs(brute_force_en(riesz_single(), 1) - mpmath.sqrt(3) / 2) < 1e-70
        assert abs(szego_en(riesz_single(), 1).e_n_squared - mpmath.mpf(3) / 4) < 1e-70


def test_profile_matches_single_calls():
    m = random_mixture(3)
    prof = en_profile(m, 10)
    for n in (0, 4, 10):
        assert prof[n].e_n == szego_en(m, n).e_n


def test_recursion_invariants():
    m = random_mixture(11)
    mom = moments(m, 12)
    prof = en_profile(mom, 12)
    with mpmath.workprec(256):
        c0 = mom.values[0].real
        assert prof[0].e_n_squared == c0
        for r in prof[1:]:
            if r.degenerate:
                break
            prod = c0
            for a in r.recursion_coeffs:
                assert abs(a) <= 1
                prod *= 1 - abs(a) ** 2
            assert abs(prod - r.e_n_squared) < 1e-60 * c0
            assert abs(r.extremal.norm2(mom) - r.e_n_squared) < 1e-60 * c0
            assert r.extremal.monic and r.extremal.degree == r.n
    vals = [r.e_n for r in prof]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


@given(st.integers(0, 10_000), st.integers(0, 30))
def test_oracle_equivalence(seed, n):
    m = random_mixture(seed)
    with mpmath.workprec(256):
        a = szego_en(m, n, CTX).e_n
        b = brute_force_en(m, n, CTX)
        c0 = to_mpf(m.total_mass)
        assert abs(a - b) <= mpmath.mpf("1e-20") * mpmath.sqrt(c0)


@given(st.integers(0, 10_000), st.integers(1, 15))
def test_determinant_identity(seed, n):
    m = random_mixture(seed)
    mom = moments(m, n)
    r = szego_en(mom, n)
    with mpmath.workprec(256):
        if r.degenerate:
            assert abs(mpmath.det(gram_toeplitz(mom, n))) < 1e-30
        else:
            assert abs(r.e_n_squared - toeplitz_det_ratio(mom, n)) <= 1e-40 * mom.values[0].real


@given(st.integers(0, 1000), st.integers(1, 9), st.integers(0, 12))
def test_scaling(seed, c, n):
    m = random_mixture(seed, 8)
    with mpmath.workprec(256):
        a = szego_en(m.scaled(c), n).e_n
        b = mpmath.sqrt(c) * szego_en(m, n).e_n
        assert abs(a - b) < 1e-50 * mpmath.sqrt(c * to_mpf(m.total_mass))


@given(st.integers(0, 1000), st.fractions(0, 1, max_denominator=1000), st.integers(0, 12))
def test_rotation_covariance(seed, phi, n):
    m = random_mixture(seed, 8)
    with mpmath.workprec(256):
        a = szego_en(m.rotated(phi), n).e_n
        b = szego_en(m, n).e_n
        assert abs(a - b) < 1e-50 * mpmath.sqrt(to_mpf(m.total_mass))


@given(st.integers(0, 1000), st.integers(0, 15))
def test_monotone_under_added_mass(seed, n):
    m = random_mixture(seed, 10)
    bigger = m + Measure.atoms([F(1, 3)], [F(1, 10)])
    with mpmath.workprec(256):
        assert szego_en(m, n).e_n <= szego_en(bigger, n).e_n + 1e-60


def test_circle_polynomial_helpers():
    P = CirclePolynomial.from_unimodular_zeros([0.0, np.pi], [1, 1])
    assert P.monic and P.degree == 2
    assert np.allclose(P.coefficients, [-1, 0, 1])
    theta = np.linspace(0.1, 3.0, 5)
    assert np.allclose(np.log(np.abs(P.on_circle(theta))), P.log_abs_on_circle(theta))
    Q = CirclePolynomial.from_numpy([1, 2j, 3])
    assert np.allclose(Q.reversed().coefficients, [3, -2j, 1])
    with pytest.raises(ValueError):
        CirclePolynomial((1, 2), monic=True)
