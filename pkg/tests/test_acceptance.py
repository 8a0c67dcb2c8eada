"""Acceptance suite: fourteen numbered criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
Tolerances are fixed here and never loosened to make a criterion pass.
"""
import math
import random
import time
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest

from szegolab.arcs import TWO_PI, Arc, ArcSet, random_arcset
from szegolab.constructions import (
    AntiNevaiSpec,
    ProNSpec,
    TailSequence,
    anti_nevai_pair,
    dyadic_root_measure,
    dyadic_sandwich,
    halasz_tail_bound,
    monotone_tail_measure,
    pron_pair,
    riesz_measure,
    tiny_arc_instance,
)
from szegolab.measures import AtomicComponent, DensityPiece, Measure, PiecewiseDensityComponent, moments
from szegolab.polynomials import circle_grid, denisov_polynomial, halasz_polynomial
from szegolab.potential import capacity, certify_capacity, certify_metric_B, discretization_polynomial
from szegolab.precision import PrecisionContext, to_mpf
from szegolab.szego import brute_force_en, en_profile, szego_en, toeplitz_det_ratio

BITS = PrecisionContext(256)
TINY_TURNS = ((F(1, 5),), (F(1, 3), F(2, 3)), (F(1, 7), F(3, 7), F(5, 7)))


def num(x, digits=4) -> str:
    return mpmath.nstr(mpmath.mpf(x), digits)


def verdict(number: int, title: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}")
    assert ok, detail


def random_mixture(rng: random.Random) -> Measure:
    k = rng.randint(1, 20)
    turns = rng.sample(range(1, 4096), k)
    parts = [(1, AtomicComponent(tuple(F(t, 4096) for t in turns), tuple(F(rng.randint(1, 50), 50) for _ in turns)))]
    for _ in range(rng.randint(0, 2)):
        a = F(rng.randint(0, 60), 64)
        b = a + F(rng.randint(1, 4), 64)
        piece = rng.choice([
            DensityPiece("constant", (F(rng.randint(1, 9), 10),)),
            DensityPiece("exp_linear", (F(rng.randint(-5, 5), 10), F(rng.randint(-9, 9), 10))),
        ])
        parts.append((F(rng.randint(1, 5), 10), PiecewiseDensityComponent((a, b), (piece,))))
    return Measure(tuple(parts))


def test_criterion_01_invariance_on_roots():
    t0 = time.perf_counter()
    prof = en_profile(Measure.roots_of_unity(8), 8, BITS)
    elapsed = time.perf_counter() - t0
    with BITS.workprec():
        dev = max(abs(r.e_n_squared - 1) for r in prof[:8])
        ok = dev <= mpmath.mpf("1e-30") and prof[8].e_n == 0 and prof[8].degenerate and elapsed < 1
    verdict(1, "uniform measure on 8th roots", ok,
            f"max|e_s^2-1| (s<=7) = {mpmath.nstr(dev, 3)}, e_8 = {mpmath.nstr(prof[8].e_n, 3)}, "
            f"degenerate = {prof[8].degenerate}, {elapsed:.3f}s")


def test_criterion_02_dyadic_sandwich():
    t0 = time.perf_counter()
    K = 12
    a = TailSequence.geometric(F(1, 2), K)
    prof = en_profile(moments(dyadic_root_measure(a, K), 64, ctx=BITS), 64, BITS)
    rows, ok = [], True
    with BITS.workprec():
        for n in range(1, 7):
            lo, hi = dyadic_sandwich(a, K, n)
            e2 = prof[1 << n].e_n_squared
            ok &= to_mpf(lo) < e2 < to_mpf(hi)
            rows.append(f"n={n}: {float(lo):.3e} < {mpmath.nstr(e2, 4)} < {float(hi):.3e}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30
    verdict(2, "dyadic sandwich K=12", ok, "; ".join(rows) + f"; {elapsed:.1f}s")


def test_criterion_03_oracle_equivalence():
    rng = random.Random(20240603)
    worst_brute = worst_det = mpmath.mpf(0)
    degenerate = 0
    with BITS.workprec():
        for _ in range(50):
            mu = random_mixture(rng)
            n = rng.randint(1, 30)
            mom = moments(mu, n, ctx=BITS)
            lev = szego_en(mom, n, BITS)
            degenerate += lev.degenerate
            e0 = mpmath.sqrt(to_mpf(mu.total_mass))
            brute = brute_force_en(mom, n, BITS)
            det = toeplitz_det_ratio(mom, n)
            worst_brute = max(worst_brute, abs(lev.e_n - brute) / e0)
            worst_det = max(worst_det, abs(lev.e_n_squared - det) / e0 ** 2)
        ok = worst_brute <= mpmath.mpf("1e-20") and worst_det <= mpmath.mpf("1e-20")
    verdict(3, "Levinson vs brute force vs determinant ratio, 50 mixtures", ok,
            f"max|lev-brute|/e_0 = {mpmath.nstr(worst_brute, 3)}, "
            f"max|lev^2-det|/e_0^2 = {mpmath.nstr(worst_det, 3)}, degenerate cases {degenerate}")


@pytest.mark.slow
def test_criterion_04_halasz_polynomials():
    theta = circle_grid(1 << 14)
    worst_c, worst_gap, ok = 0.0, -math.inf, True
    for d in range(1, 65):
        H = halasz_polynomial(d, 1 << 14)
        cs = H.coefficients
        c = max(abs(cs[0] - 1), abs(cs.sum()))
        sup = float(np.max(np.abs(H.on_circle(theta))))
        gap = sup - (1 + 2 / d)
        worst_c, worst_gap = max(worst_c, c), max(worst_gap, gap)
        ok &= c <= 1e-10 and gap <= 1e-6 and H.degree <= d
    verdict(4, "Halasz polynomials d=1..64", ok,
            f"max constraint error = {worst_c:.2e}, max(sup - 1 - 2/d) = {worst_gap:.2e}")


def test_criterion_05_monotone_tail_lower_bound():
    a = TailSequence.geometric(F(1, 2), 64)
    rows, ok = [], True
    with BITS.workprec():
        for n in range(1, 9):
            e2 = szego_en(monotone_tail_measure(a, n), n, BITS).e_n_squared
            bound = (n + 1) * sum(a.a(j * (n + 1)) for j in range(1, len(a) // (n + 1) + 1))
            ok &= e2 >= to_mpf(bound)
            rows.append(f"n={n}: {mpmath.nstr(e2, 4)} >= {float(bound):.4f}")
    verdict(5, "monotone-tail lower bound", ok, "; ".join(rows))


def test_criterion_06_halasz_tail_upper_bound():
    a = TailSequence.geometric(F(1, 2), 64)
    rng = np.random.default_rng(6)
    rows, ok = [], True
    for n in (32, 64, 128):
        for _ in range(2):
            turns = [F(int(x), 1 << 24) for x in rng.choice(1 << 24, size=len(a), replace=False)]
            res = halasz_tail_bound(a, turns, n, 0.5, BITS)
            e2 = szego_en(Measure.atoms(turns, a.values), n, BITS).e_n_squared
            with BITS.workprec():
                rule = res.k ** 2 / abs(math.log(float(res.s_k))) <= n / 16
                ok &= rule and res.k >= 1 and res.norm2 <= res.target and e2 <= res.norm2
            rows.append(f"n={n} k={res.k}: e_n^2={mpmath.nstr(e2, 3)} <= int|P|^2={mpmath.nstr(res.norm2, 3)}"
                        f" <= s_k^(1/2)={mpmath.nstr(res.target, 3)}")
    verdict(6, "Halasz-product upper bound, random placements", ok, "; ".join(rows))


def test_criterion_07_denisov_polynomial():
    rng = np.random.default_rng(7)
    k, n = 8, 256
    E = ArcSet([Arc.centered(float(c), 1e-9) for c in rng.uniform(0, TWO_PI, size=k)])
    eps = 1 / (k * math.log(2 ** k))
    r = denisov_polynomial(E, eps, n, 0.5)
    p0 = abs(r.value_at_zero)
    ok = abs(p0 - 1 / math.e) <= 1e-3 and r.polynomial.degree < n and r.sup_on_E <= r.bound_on_E <= r.shape_bound
    verdict(7, "outer function times kernel, n=256, 8 arcs", ok,
            f"|P(0)| = {p0:.6f} (1/e = {1 / math.e:.6f}), degree {r.polynomial.degree}, "
            f"sup_E = {r.sup_on_E:.3e} <= bound {r.bound_on_E:.3e} <= shape {r.shape_bound:.3e}")


def test_criterion_08_capacity_oracles():
    t0 = time.perf_counter()
    ok, worst_single = True, 0.0
    for ell in (0.1, 0.5, 1.0, math.pi):
        rel = abs(capacity(ArcSet([Arc(0.7, ell)])) - math.sin(ell / 4)) / math.sin(ell / 4)
        worst_single = max(worst_single, rel)
    circle = abs(capacity(ArcSet([Arc(0.0, TWO_PI)])) - 1)
    rng = np.random.default_rng(8)
    worst_pair = 0.0
    for _ in range(20):
        E = random_arcset(rng, int(rng.integers(2, 5)))
        ce, cp = capacity(E, "energy"), capacity(E, "parametric")
        worst_pair = max(worst_pair, abs(ce - cp) / cp)
    elapsed = time.perf_counter() - t0
    ok = worst_single <= 1e-4 and circle <= 1e-10 and worst_pair <= 1e-3 and elapsed < 120
    verdict(8, "capacity oracles and method agreement", ok,
            f"single-arc rel err {worst_single:.2e}, |cap(T)-1| = {circle:.2e}, "
            f"energy vs parametric {worst_pair:.2e}, {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_09_discretization():
    rng = np.random.default_rng(9)
    ok, max_deg, worst_excess, worst_margin = True, 0, -math.inf, math.inf
    for _ in range(20):
        E = random_arcset(rng, int(rng.integers(1, 5)))
        c = discretization_polynomial(E, 14, probes=32, strict=False).certificate
        max_deg = max(max_deg, c.degree)
        worst_excess = max(worst_excess, c.max_log_excess)
        worst_margin = min(worst_margin, c.inner_margin)
        ok &= c.degree <= 392 and c.checks["log_bound_on_E"] and c.checks["inner_inequality"]
    verdict(9, "discretization polynomial, 20 unions, n=14", ok,
            f"max degree {max_deg}, max(log|P| - U - 3N log 2) = {worst_excess:.3e}, "
            f"min inner margin = {worst_margin:.3e}")


TINY_CASES = [(n, turns) for n in (8, 16) for turns in TINY_TURNS]


@pytest.mark.parametrize("n, turns", TINY_CASES, ids=[f"n{n}-p{len(t)}" for n, t in TINY_CASES])
def test_criterion_10_metric_B_certificate(n, turns):
    ctx = PrecisionContext(512)
    Om = 8 * n
    arcs, mu = tiny_arc_instance(turns, Om, ctx=ctx)
    cert = certify_metric_B(arcs, mu, n, Om, ctx=ctx)
    true = szego_en(mu, n, ctx).e_n
    with ctx.workprec():
        upper = cert.measured.get("e_n_upper")
        target = 2 * mpmath.exp(-mpmath.mpf(Om) / 2)
        ok = cert.passed and upper is not None and upper <= target and true <= upper
    verdict(10, f"certified e_n, n={n}, {len(turns)} arcs", ok,
            f"szego e_n = {mpmath.nstr(true, 4)} <= certified {mpmath.nstr(upper, 4) if upper else None} "
            f"<= 2e^(-Omega/2) = {mpmath.nstr(target, 4)}; status {cert.status} {cert.failed_checks()}")


@pytest.mark.parametrize("n, turns", TINY_CASES, ids=[f"n{n}-p{len(t)}" for n, t in TINY_CASES])
def test_criterion_11_capacity_A_certificate(n, turns):
    ctx = PrecisionContext(512)
    _, mu = tiny_arc_instance(turns, 8 * n, ctx=ctx)
    cert = certify_capacity(mu, n, direction="A", ctx=ctx)
    m = cert.measured
    with ctx.workprec():
        Om = cert.omega
        ok = (cert.passed and m["capacity"] <= float(mpmath.exp(-Om / (2 * n)))
              and m["residual"] <= mpmath.exp(-Om))
    verdict(11, f"sublevel arcs, n={n}, {len(turns)} arcs", ok,
            f"Omega = -log e_n = {mpmath.nstr(Om, 5)}, cap = {m.get('capacity'):.3e} <= "
            f"{float(mpmath.exp(-Om / (2 * n))):.3e}, residual = {mpmath.nstr(m.get('residual'), 3)}, "
            f"arcs = {m.get('arc_count')}")


def test_criterion_12_riesz_bounds():
    t0 = time.perf_counter()
    rows, ok = [], True
    with BITS.workprec():
        for alpha in (F(3, 10), F(1, 2), F(1)):
            for n in range(5):
                R = riesz_measure([alpha] * (n + 1), [3 ** j for j in range(n + 1)])
                e2 = szego_en(R.moments(ctx=BITS), R.N, BITS).e_n_squared
                lo, hi = R.lower_bound(BITS), R.upper_bound(BITS)
                ok &= lo <= e2 <= hi
            rows.append(f"alpha={alpha}, N_4={R.N}: {mpmath.nstr(lo, 5)} <= {mpmath.nstr(e2, 5)} <= {mpmath.nstr(hi, 5)}")
        single = szego_en(riesz_measure([1], [1]).moments(ctx=BITS), 1, BITS).e_n_squared
        ok &= abs(single - mpmath.mpf(3) / 4) <= mpmath.mpf("1e-25")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 300
    verdict(12, "Riesz product bounds, l_j = 3^j", ok,
            "; ".join(rows) + f"; single factor e_1^2 - 3/4 = {mpmath.nstr(single - 0.75, 3)}; {elapsed:.1f}s")


def test_criterion_13_test_polynomial_identity():
    worst = mpmath.mpf(0)
    with BITS.workprec():
        tol = mpmath.mpf(2) ** (-(BITS.mantissa_bits - 16))
        for alpha in (F(3, 10), F(1, 2), F(1)):
            for n in range(5):
                R = riesz_measure([alpha] * (n + 1), [3 ** j for j in range(n + 1)])
                val = R.test_polynomial(BITS).norm2(R.moments(ctx=BITS))
                worst = max(worst, abs(val - R.upper_bound(BITS)))
        ok = worst <= tol
    verdict(13, "test-polynomial identity", ok, f"max deviation {mpmath.nstr(worst, 3)} (tolerance {mpmath.nstr(tol, 3)})")


@pytest.mark.slow
def test_criterion_14_construction_mechanisms():
    an = anti_nevai_pair(AntiNevaiSpec(), K=6, ctx=BITS)
    integ = an.diagnostics["integrability"]
    ok_an = all(r["H_ok"] and r["log_ok"] for r in integ) and all(r["pass"] for r in an.diagnostics["chain"])
    pn = pron_pair(ProNSpec.scaled((4, 16, 64)), ctx=BITS, ratio_degrees=[3, 15, 63])
    inv = pn.diagnostics["invariance_bound"]
    ok_pn = all(r["pass"] for r in inv) and pn.diagnostics["log_integral_rel_diff"] <= 1e-10
    ratios = ", ".join(f"n={r['n']}: {num(r['ratio'])}" for r in pn.diagnostics["ratio"])
    detail = ("integrability " + ", ".join(f"p={r['p']}: {num(r['H_integral'])} <= {num(r['H_bound'])}" for r in integ)
              + "; invariance " + ", ".join(f"N={r['N']}: {num(r['min_e_sq_below_N'])} >= {num(r['alpha_sq'])}"
                                            for r in inv)
              + f"; ratio e_n(w mu)/e_n(mu) reported: {ratios}")
    verdict(14, "anti-Nevai and bounded-weight diagnostics", ok_an and ok_pn, detail)
