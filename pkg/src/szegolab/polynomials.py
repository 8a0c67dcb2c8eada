"""Explicit test polynomials for upper bounds on ``e_n`` and sublevel-set tools.

Every construction here is checked numerically on a uniform verification
grid (``2**14`` points unless told otherwise). A polynomial ``P`` with
``P(0) != 0`` bounds the Szego minimum through its reversal,
``e_n^2 <= int |P|^2 d rho / |P(0)|^2``, since ``P^*/conj(P(0))`` is monic of
degree ``n`` with ``|P^*| = |P|`` on the circle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np
from mpmath import mp

from .arcs import TWO_PI, Arc, ArcSet, as_arcset
from .precision import PrecisionContext, resolve, to_mpf
from .szego import CirclePolynomial

DEFAULT_GRID = 1 << 14


class ConstructionError(RuntimeError):
    """A construction missed its target bound; ``achieved`` carries the measured value."""

    def __init__(self, message: str, achieved=None):
        super().__init__(message)
        self.achieved = achieved


def circle_grid(grid: int = DEFAULT_GRID) -> np.ndarray:
    return np.arange(grid) * (TWO_PI / grid)


# --------------------------------------------------------------------------
# Halasz polynomials
# --------------------------------------------------------------------------


def halasz_polynomial(d: int, grid: int = DEFAULT_GRID, slack: float = 1e-6) -> CirclePolynomial:
    """Degree-``d`` polynomial with ``H(0) = 1``, ``H(1) = 0`` and small sup norm.

    The coefficients solve the discretised minimax problem
    ``min max_theta |H(e^{i theta})|`` as a second-order cone program; worst
    points from the verification grid are added until the verified sup is
    within ``1 + 2/d + slack``. Coefficients are real, so ``[0, pi]`` suffices.

    Raises
    ------
    ConstructionError
        If the verified sup exceeds ``1 + 2/d + slack``.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    coeffs, sup = _halasz_coeffs(int(d), int(grid))
    bound = 1.0 + 2.0 / d
    if sup > bound + slack:
        raise ConstructionError(f"Halasz optimisation reached sup {sup:.9f} > {bound:.9f} at d={d}", sup)
    return CirclePolynomial(tuple(mpmath.mpf(c) for c in coeffs))


@lru_cache(maxsize=None)
def _halasz_coeffs(d: int, grid: int) -> tuple[tuple[float, ...], float]:
    import cvxpy as cp

    if d == 1:
        return (1.0, -1.0), 2.0
    k = np.arange(d + 1)
    check = circle_grid(grid)
    check = check[check <= math.pi + 1e-15]
    theta = np.linspace(0.0, math.pi, max(256, 24 * d))
    best = None
    for _ in range(8):
        C = np.cos(np.outer(theta, k))
        S = np.sin(np.outer(theta, k))
        h = cp.Variable(d + 1)
        t = cp.Variable()
        cons = [h[0] == 1, cp.sum(h) == 0, cp.norm(cp.vstack([C @ h, S @ h]), 2, axis=0) <= t]
        cp.Problem(cp.Minimize(t), cons).solve(solver=cp.CLARABEL)
        coef = _repair(np.asarray(h.value, dtype=float))
        vals = np.abs(np.polyval(coef[::-1], np.exp(1j * check)))
        sup = float(vals.max())
        if best is None or sup < best[1]:
            best = (coef, sup)
        if sup <= 1.0 + 2.0 / d:
            break
        worst = check[np.argsort(vals)[-8 * (d + 1):]]
        theta = np.union1d(theta, worst)
    coef, sup = best
    return tuple(float(c) for c in coef), sup


def _repair(h: np.ndarray) -> np.ndarray:
    """Impose ``h_0 = 1`` and ``sum h = 0`` exactly (solver output is approximate)."""
    h = h.copy()
    h[0] = 1.0
    h[1:] -= h.sum() / (len(h) - 1)
    return h


def halasz_product(points: Sequence[float], n: int, grid: int = DEFAULT_GRID,
                   ctx: PrecisionContext | int | None = None) -> CirclePolynomial:
    """``P(z) = prod_j H_d(z conj(lambda_j))`` with ``d = floor(n / k)``.

    ``points`` are angles of ``lambda_j`` in radians. ``P(0) = 1`` and ``P``
    vanishes at each ``lambda_j``; ``max |P| <= (1 + 2/d)^k <= e^{4 k^2 / n}``.
    """
    k = len(points)
    if k == 0:
        return CirclePolynomial((mpmath.mpf(1),))
    if 2 * k > n:
        raise ValueError(f"need k <= n/2, got k={k}, n={n}")
    d = n // k
    H = halasz_polynomial(d, grid)
    ctx = resolve(ctx)
    with ctx.workprec():
        out = CirclePolynomial((mpmath.mpf(1),), mantissa_bits=ctx.mantissa_bits)
        for lam in points:
            w = mpmath.expj(-to_mpf(lam))
            factor = CirclePolynomial(tuple(c * w ** j for j, c in enumerate(H.coeffs)), mantissa_bits=ctx.mantissa_bits)
            out = out * factor
        return out


# --------------------------------------------------------------------------
# kernel concentrated near the origin
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelSpec:
    """Degree bound ``n``, tail exponent ``gamma`` and verification grid size."""

    n: int
    gamma: float = 0.5
    grid: int = DEFAULT_GRID
    sharpness: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("gamma must lie strictly inside (0, 1)")
        if self.n < 4:
            raise ValueError("kernel degree bound n must be at least 4")


@dataclass(frozen=True)
class KernelResult:
    """Laurent coefficients ``q_hat[l + n - 1]`` for ``|l| < n`` and measured constants.

    ``l1`` is ``int |q| dm``; ``tails[s - 1]`` is ``int_{s/n <= |x| <= pi} |q| dm``;
    ``constant`` is ``C(gamma) >= max(l1, tail(s) / (s^{1-gamma} e^{-s^gamma}))``.
    """

    spec: KernelSpec
    coeffs: np.ndarray
    l1: float
    tails: np.ndarray
    constant: float
    sharpness: float = 2.0
    noise_floor: float = 0.0

    @property
    def n(self) -> int:
        return self.spec.n

    def coefficient(self, ell: int) -> float:
        if abs(ell) >= self.n:
            return 0.0
        return float(self.coeffs[ell + self.n - 1])

    def tail(self, s: float) -> float:
        """Tail integral at a real ``s >= 1`` (from the grid)."""
        return _tail_from_samples(self._abs_samples(), self.n, s)

    def _abs_samples(self) -> np.ndarray:
        return np.abs(_kernel_samples(self.coeffs, self.n, _kernel_grid(self.spec)))

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ell = np.arange(-(self.n - 1), self.n)
        return np.real(np.exp(1j * np.multiply.outer(x, ell)) @ self.coeffs)


def _kernel_grid(spec: KernelSpec) -> int:
    return max(spec.grid, 64 * spec.n)


def _bump(xi: np.ndarray, gamma: float, sharpness: float) -> np.ndarray:
    """``exp(b - b / (1 - xi^2)^{s})`` on ``|xi| < 1`` with ``s = gamma / (1 - gamma)``."""
    s = gamma / (1.0 - gamma)
    xi = np.asarray(xi, dtype=float)
    inside = np.abs(xi) < 1.0
    out = np.zeros(xi.shape)
    u = 1.0 - xi[inside] ** 2
    with np.errstate(over="ignore", under="ignore"):
        out[inside] = np.exp(sharpness - sharpness / u ** s)
    return out


def _kernel_samples(coeffs: np.ndarray, n: int, M: int) -> np.ndarray:
    c = np.zeros(M, dtype=complex)
    ell = np.arange(-(n - 1), n)
    c[ell % M] = coeffs
    # q(x_j) = sum_l q_hat(l) e^{i l x_j}
    return np.real(np.fft.ifft(c) * M)


def _tail_from_samples(absq: np.ndarray, n: int, s: float) -> float:
    M = len(absq)
    x = np.arange(M) * (TWO_PI / M)
    x = np.where(x > math.pi, x - TWO_PI, x)
    return float(absq[np.abs(x) >= s / n].sum() / M)


SHARPNESS_LADDER = (2.0, 8.0, 32.0)


def concentrated_kernel(spec: KernelSpec) -> KernelResult:
    """Trigonometric polynomial ``q`` of degree ``< n`` concentrated near ``x = 0``.

    Coefficients are ``q_hat(l) = g_hat(l / n)`` for the Gevrey-class bump
    ``g_hat(xi) = exp(b - b / (1 - xi^2)^{gamma/(1-gamma)})`` on ``(-1, 1)``, so
    ``q_hat(0) = 1``. Tail integrals are measured for ``s = 1 .. n/2`` down to
    the double-precision noise floor. The decay is accepted when the ratio
    ``tail(s) / (s^{1-gamma} e^{-s^gamma})`` peaks in the first half of the
    resolved range; ``C(gamma)`` is then the larger of that peak and
    ``int |q| dm``. When ``spec.sharpness`` is ``None``-like (nonpositive) the
    sharpness ``b`` is taken from a short ladder.

    Raises
    ------
    ConstructionError
        If the ratio keeps growing; ``achieved`` is the offending ``s``.
    """
    ladder = SHARPNESS_LADDER if spec.sharpness <= 0 else (spec.sharpness,)
    err = None
    for b in ladder:
        try:
            return _kernel_with_sharpness(spec, b)
        except ConstructionError as exc:
            err = exc
    raise err


def _kernel_with_sharpness(spec: KernelSpec, b: float) -> KernelResult:
    n, gamma = spec.n, spec.gamma
    ell = np.arange(-(n - 1), n)
    coeffs = _bump(ell / n, gamma, b)
    coeffs[n - 1] = 1.0
    M = _kernel_grid(spec)
    absq = np.abs(_kernel_samples(coeffs, n, M))
    l1 = float(absq.sum() / M)
    s_values = np.arange(1, n // 2 + 1)
    tails = np.array([_tail_from_samples(absq, n, s) for s in s_values])
    shape = s_values ** (1.0 - gamma) * np.exp(-(s_values ** gamma))
    floor = 64 * np.finfo(float).eps * float(np.abs(coeffs).sum())
    resolved = s_values[tails > 10 * floor]
    last = int(resolved[-1]) if resolved.size else 1
    ratio = tails / shape
    head = ratio[s_values <= max(1, last // 2)]
    peak = float(head.max())
    back = np.nonzero((s_values > last // 2) & (s_values <= last) & (ratio > peak))[0]
    if back.size:
        s_bad = int(s_values[back[0]])
        raise ConstructionError(
            f"kernel tail ratio still growing at s={s_bad} (ratio {ratio[back[0]]:.3g} > {peak:.3g}, sharpness {b:g})", s_bad
        )
    C = max(l1, peak)
    return KernelResult(spec, coeffs, l1, tails, C, b, floor)


# --------------------------------------------------------------------------
# outer function and the Denisov-type polynomial
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OuterFunctionResult:
    """Outer function with ``|F| = exp(-1l_{E+}/m(E+))`` on the circle.

    ``samples`` are boundary values on the uniform grid; ``coeffs`` holds
    ``F_hat(0 .. N)`` (extended precision); ``value_at_zero`` is ``F(0)``.
    """

    arcs: ArcSet
    measure: float
    samples: np.ndarray
    coeffs: tuple
    value_at_zero: complex
    sup_on_arcs: float
    log_mean_value: float
    mantissa_bits: int

    @property
    def grid(self) -> int:
        return len(self.samples)


def indicator_coefficients(arcs: ArcSet, N: int) -> np.ndarray:
    """Fourier coefficients ``c_l``, ``0 <= l <= N``, of the indicator of ``arcs`` (w.r.t. ``m``)."""
    ell = np.arange(1, N + 1)
    out = np.zeros(N + 1, dtype=complex)
    for a in arcs:
        start = float(a.start)
        out[0] += a.length / TWO_PI
        out[1:] += np.exp(-1j * ell * start) * (1.0 - np.exp(-1j * ell * a.length)) / (1j * TWO_PI * ell)
    return out


def conjugate_indicator(arcs: ArcSet, theta) -> np.ndarray:
    """Closed-form harmonic conjugate ``(1/pi) log|sin((theta-a)/2) / sin((theta-b)/2)|`` summed over arcs."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape)
    with np.errstate(divide="ignore"):
        for arc in arcs:
            a = float(arc.start)
            b = a + arc.length
            out += (np.log(np.abs(np.sin(0.5 * (theta - a)))) - np.log(np.abs(np.sin(0.5 * (theta - b))))) / math.pi
    return out


def outer_function(E, epsilon: float, grid: int = DEFAULT_GRID, n_coeffs: int | None = None,
                   ctx: PrecisionContext | int | None = None) -> OuterFunctionResult:
    """``F = exp[-(1l + i conj(1l)) / m(E_{+eps})]`` for the indicator of ``E_{+eps}``.

    The conjugate function is applied through the multiplier ``-i sign(l)``
    on the exact indicator coefficients, so ``log F`` is analytic:
    ``log F = -(c_0 + 2 sum_{l>0} c_l z^l) / m``. The analytic coefficients
    of ``F`` follow from power-series exponentiation, which gives
    ``F_hat(0) = e^{-1}`` exactly because ``c_0 = m``.
    """
    arcs = as_arcset(E)
    if arcs.is_empty:
        raise ValueError("E must be nonempty")
    wide = arcs.widened(epsilon) if epsilon > 0 else arcs
    mE = wide.normalized_measure
    if not (mE < 1.0):
        raise ValueError(f"m(E_+eps) = {mE:.6g} must be < 1")
    shortest = min(a.length for a in wide)
    if shortest * grid / TWO_PI < 16:
        raise ValueError(
            f"grid of {grid} points resolves the shortest arc ({shortest:.3g} rad) with fewer than 16 samples"
        )
    N = 64 if n_coeffs is None else int(n_coeffs)
    ctx = resolve(ctx)
    # boundary samples: conjugate via the exact coefficients, truncated at the Nyquist frequency
    M = grid
    cl = indicator_coefficients(wide, M // 2)
    spec = np.zeros(M, dtype=complex)
    spec[: M // 2] = 2.0 * cl[: M // 2]
    spec[0] = cl[0]
    analytic = np.fft.ifft(spec) * M  # c_0 + 2 sum_{l>0} c_l e^{i l x} = 1l + i conj(1l)
    theta = circle_grid(M)
    indicator = wide.contains(theta).astype(float)
    conj_part = np.imag(analytic)
    samples = np.exp(-(indicator + 1j * conj_part) / mE)
    log_mean = float(np.mean(-indicator / mE))
    coeffs = _exp_series(wide, mE, N, ctx)
    with ctx.workprec():
        f0 = complex(coeffs[0])
    return OuterFunctionResult(wide, mE, samples, coeffs, f0, math.exp(-1.0 / mE), log_mean, ctx.mantissa_bits)


def _exp_series(arcs: ArcSet, mE: float, N: int, ctx: PrecisionContext) -> tuple:
    """Analytic coefficients of ``exp(L)`` with ``L_0 = -1`` and ``L_l = -2 c_l / m`` (extended precision)."""
    with ctx.workprec():
        m = mpmath.mpf(mE)
        L = [mpmath.mpc(-1)] + [mpmath.mpc(0)] * N
        two_pi = 2 * mp.pi
        for a in arcs:
            start = to_mpf(a.start)
            length = to_mpf(a.length)
            for ell in range(1, N + 1):
                c = mpmath.expj(-ell * start) * -mpmath.expm1(mpmath.mpc(0, -ell) * length) / (mpmath.mpc(0, two_pi * ell))
                L[ell] += -2 * c / m
        F = [mpmath.exp(L[0])] + [mpmath.mpc(0)] * N
        JL = [j * L[j] for j in range(N + 1)]
        for k in range(1, N + 1):
            acc = mpmath.mpc(0)
            for j in range(1, k + 1):
                acc += JL[j] * F[k - j]
            F[k] = acc / k
        return tuple(F)


@dataclass(frozen=True)
class DenisovResult:
    """The product ``P = F * Q`` and the measured ingredients of its bound on ``E``."""

    polynomial: CirclePolynomial
    kernel: KernelResult
    outer: OuterFunctionResult
    value_at_zero: complex
    sup_circle: float
    sup_on_E: float
    bound_on_E: float
    shape_bound: float
    epsilon: float


def denisov_polynomial(E, epsilon: float, n: int, gamma: float = 0.5, grid: int = DEFAULT_GRID,
                       samples_per_arc: int = 64, ctx: PrecisionContext | int | None = None) -> DenisovResult:
    """Polynomial of degree ``< n`` with ``|P(0)| = 1/e`` that is small on ``E``.

    ``P_hat(l) = F_hat(l) q_hat(l)`` for ``0 <= l < n`` where ``F`` is the outer
    function of ``E_{+eps}`` and ``q`` the concentrated kernel. For ``t`` in
    ``E``,

    ``|P(t)| <= tail(eps n) + exp(-1/m(E_{+eps})) * int |q| dm``

    (``bound_on_E``), and ``shape_bound`` is
    ``C(gamma) [exp(-(eps n)^gamma / 2) + exp(-1 / (2 eps k))]`` with the
    measured kernel constant and ``k`` the number of arcs.
    """
    if epsilon * n < 1:
        raise ValueError(f"need eps*n >= 1, got {epsilon * n:.4g}")
    arcs = as_arcset(E)
    kernel = concentrated_kernel(KernelSpec(n, gamma, grid))
    outer = outer_function(arcs, epsilon, grid=max(grid, 64 * n), n_coeffs=n - 1, ctx=ctx)
    ctx = resolve(ctx)
    with ctx.workprec():
        coeffs = tuple(outer.coeffs[ell] * mpmath.mpf(kernel.coefficient(ell)) for ell in range(n))
        P = CirclePolynomial(coeffs, mantissa_bits=ctx.mantissa_bits)
        p0 = complex(P.coeffs[0])
    theta = circle_grid(grid)
    sup_circle = float(np.max(np.abs(P.on_circle(theta))))
    pts = np.concatenate([float(a.start) + a.sample(samples_per_arc) for a in arcs])
    sup_E = float(np.max(np.abs(P.on_circle(pts))))
    s = epsilon * n
    bound = kernel.tail(s) + outer.sup_on_arcs * kernel.l1
    k = len(arcs)
    shape = kernel.constant * (math.exp(-0.5 * s ** gamma) + math.exp(-0.5 / (epsilon * k)))
    return DenisovResult(P, kernel, outer, p0, sup_circle, sup_E, bound, shape, epsilon)


# --------------------------------------------------------------------------
# vanishing-power and off-arc polynomials
# --------------------------------------------------------------------------


def vanishing_power_polynomial(centers: Sequence, multiplicities: Sequence[int], budget: int | None = None,
                               ctx: PrecisionContext | int | None = None) -> CirclePolynomial:
    """Monic ``prod (z - z_l)^{m_l + 1}``; centers are angles (radians or ``Fraction`` turns)."""
    orders = [int(m) + 1 for m in multiplicities]
    if len(orders) != len(centers):
        raise ValueError("centers and multiplicities differ in length")
    if any(o < 1 for o in orders):
        raise ValueError("multiplicities must be nonnegative")
    if budget is not None and sum(orders) > budget:
        raise ValueError(f"degree {sum(orders)} exceeds the budget {budget}")
    return CirclePolynomial.from_unimodular_zeros(list(centers), orders, ctx)


def arc_sup(P: CirclePolynomial, arc: Arc, samples: int = 257) -> float:
    """``max |P|`` over an arc sampled in local coordinates (product form when available)."""
    theta = float(arc.start) + arc.sample(samples)
    return float(np.exp(np.max(P.log_abs_on_circle(theta))))


@dataclass(frozen=True)
class OffArcResult:
    polynomial: CirclePolynomial
    gap: Arc
    sup_off: float
    sup_on: float
    capacity: float
    target: float
    growth_bound: float


REMEZ_CONSTANT = math.pi / 2


def small_off_arc_monic(n: int, J: Arc, grid: int = DEFAULT_GRID, slack: float = 1e-9, target: float | None = None,
                        ctx: PrecisionContext | int | None = None) -> OffArcResult:
    """Monic degree-``n`` polynomial small off the open arc ``J``.

    With ``c = cos(|J|/4)`` (the capacity of the complementary arc) and the
    circle rotated so that ``J`` is centred at ``1``,

    ``M(z) = 2 c^n z^{n/2} T_n((z^{1/2} + z^{-1/2}) / (2c))``,

    a polynomial in ``z`` because ``T_n`` has the parity of ``n``. On the
    complement ``|M| <= 2 c^n``; on ``J`` the growth is at most
    ``2 exp((pi/2) n m(J))``.

    ``target`` defaults to ``2 c^n``; a smaller target that the polynomial
    misses by more than ``slack`` raises :class:`ConstructionError`.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (J.length < math.pi):
        raise ValueError("gap length must be below pi")
    ctx = resolve(ctx)
    alpha = 0.5 * J.length
    with ctx.workprec():
        c = mpmath.cos(to_mpf(alpha) / 2)
        # Chebyshev coefficients t_k of T_n
        tk = _chebyshev_coeffs(n)
        base = [mpmath.mpf(0)] * (n + 1)
        # 2 c^n sum_k t_k ((z+1)/(2c))^k z^{(n-k)/2}
        for k, t in enumerate(tk):
            if t == 0:
                continue
            scale = 2 * c ** n * t / (2 * c) ** k
            binom = [mpmath.binomial(k, i) for i in range(k + 1)]
            shift = (n - k) // 2
            for i, b in enumerate(binom):
                base[i + shift] += scale * b
        rot = mpmath.expj(to_mpf(J.center))
        coeffs = [mpmath.mpc(b) * rot ** (n - j) for j, b in enumerate(base)]
        coeffs[-1] = mpmath.mpc(1)
        P = CirclePolynomial(tuple(coeffs), monic=True, mantissa_bits=ctx.mantissa_bits)
        cap = float(c)
    theta = circle_grid(grid)
    inside = J.contains(theta)
    vals = np.abs(P.on_circle(theta))
    off = np.concatenate([vals[~inside], np.abs(P.on_circle(float(J.start) + np.array([0.0, J.length])))])
    sup_off = float(off.max())
    on_pts = float(J.start) + J.sample(129)
    sup_on = float(max(vals[inside].max() if inside.any() else 0.0, np.abs(P.on_circle(on_pts)).max()))
    tgt = 2 * cap ** n if target is None else float(target)
    if sup_off > tgt * (1 + slack) + slack:
        raise ConstructionError(f"off-arc sup {sup_off:.6g} exceeds target {tgt:.6g}", sup_off)
    growth = 2.0 * math.exp(REMEZ_CONSTANT * n * J.length / TWO_PI)
    return OffArcResult(P, J, sup_off, sup_on, cap, tgt, growth)


@lru_cache(maxsize=None)
def _chebyshev_coeffs(n: int) -> tuple:
    """Integer power-basis coefficients of ``T_n``."""
    t0, t1 = [1], [0, 1]
    if n == 0:
        return tuple(t0)
    for _ in range(n - 1):
        t2 = [0] + [2 * c for c in t1]
        for i, c in enumerate(t0):
            t2[i] -= c
        t0, t1 = t1, t2
    return tuple(t1)


# --------------------------------------------------------------------------
# sublevel sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SublevelResult:
    arcs: ArcSet
    level: float
    flag: str  # "partial", "full" or "empty"
    crossings: tuple


def sublevel_arcs(P: CirclePolynomial, tau, ctx: PrecisionContext | int | None = None) -> SublevelResult:
    """``{theta : |P(e^{i theta})| <= tau}`` as a union of closed arcs.

    Boundary points are the unimodular roots of ``P(z) P^*(z) - tau^2 z^n``,
    the algebraic form of the trigonometric polynomial ``|P|^2 - tau^2``.
    Intervals between consecutive roots are classified at their midpoints in
    extended precision, so arcs far below double resolution are recovered.
    """
    ctx = resolve(ctx)
    with ctx.workprec():
        tau = to_mpf(tau)
        if not (tau > 0):
            raise ValueError("tau must be positive")
        n = P.degree
        angles = _unimodular_roots(P, tau, ctx)
        absq = lambda th: abs(P.evaluate_mp(mpmath.expj(th))) ** 2 - tau ** 2
        if not angles:
            inside = absq(mpmath.mpf(0)) <= 0
            if inside:
                return SublevelResult(ArcSet.full(), float(tau), "full", ())
            return SublevelResult(ArcSet(), float(tau), "empty", ())
        arcs = []
        two_pi = 2 * mp.pi
        k = len(angles)
        for i in range(k):
            a = angles[i]
            b = angles[(i + 1) % k] + (two_pi if i + 1 == k else 0)
            if b - a <= 0:
                continue
            if absq((a + b) / 2) <= 0:
                arcs.append(Arc(a, float(b - a)))
        out = ArcSet(arcs)
        if len(out) > max(n, 1):
            raise ConstructionError(f"{len(out)} sublevel arcs exceed the degree {n}", len(out))
        flag = "full" if out.is_full else ("empty" if out.is_empty else "partial")
        return SublevelResult(out, float(tau), flag, tuple(angles))


def _unimodular_roots(P: CirclePolynomial, tau, ctx: PrecisionContext) -> list:
    n = P.degree
    Pc = list(P.coeffs)
    Ps = [c.conjugate() for c in reversed(Pc)]
    prod = [mpmath.mpc(0)] * (2 * n + 1)
    for i, a in enumerate(Pc):
        if a == 0:
            continue
        for j, b in enumerate(Ps):
            prod[i + j] += a * b
    scale0 = max(abs(c) for c in prod)
    if tau ** 2 < scale0 * ctx.eps * 2 ** 16:
        raise ValueError(
            f"level tau^2 is below the resolution of {ctx.mantissa_bits}-bit precision for this polynomial; raise the precision"
        )
    prod[n] -= tau ** 2
    # strip vanishing high and low coefficients (roots at 0 and infinity are irrelevant)
    scale = max(abs(c) for c in prod)
    if scale == 0:
        return []
    tiny = scale * ctx.eps * 16
    lo, hi = 0, len(prod) - 1
    while lo <= hi and abs(prod[lo]) <= tiny:
        lo += 1
    while hi >= lo and abs(prod[hi]) <= tiny:
        hi -= 1
    core = prod[lo:hi + 1]
    if len(core) <= 1:
        return []
    roots = _poly_roots(core[::-1], ctx)
    two_pi = 2 * mp.pi
    tol = mpmath.mpf(2) ** (-(ctx.mantissa_bits // 4))
    angles = []
    for r in roots:
        if abs(abs(r) - 1) < tol:
            th = mpmath.arg(r) % two_pi
            angles.append(th)
    angles.sort()
    dedup = []
    for a in angles:
        if not dedup or a - dedup[-1] > tol * 1e-3:
            dedup.append(a)
    if len(dedup) > 1 and dedup[0] + two_pi - dedup[-1] <= tol * 1e-3:
        dedup.pop()
    return dedup


def _poly_roots(coeffs_high_first: list, ctx: PrecisionContext) -> list:
    try:
        return list(mpmath.polyroots(coeffs_high_first, maxsteps=400, extraprec=ctx.mantissa_bits))
    except mpmath.libmp.NoConvergence:
        deg = len(coeffs_high_first) - 1
        lead = coeffs_high_first[0]
        C = mpmath.matrix(deg, deg)
        for i in range(1, deg):
            C[i, i - 1] = 1
        for i in range(deg):
            C[i, deg - 1] = -coeffs_high_first[deg - i] / lead
        ev = mpmath.eig(C, left=False, right=False)
        return list(ev)


@dataclass(frozen=True)
class CartanResult:
    cover: ArcSet
    radii_sum: float
    bound: float
    passed: bool


def cartan_cover_check(P: CirclePolynomial, eps: float, ctx: PrecisionContext | int | None = None) -> CartanResult:
    """Cover ``{|P| < eps^deg}`` on the circle by arcs; compare the disk radii with ``2 e eps``."""
    if not P.monic:
        raise ValueError("Cartan check expects a monic polynomial")
    if not (eps > 0):
        raise ValueError("eps must be positive")
    ctx = resolve(ctx)
    with ctx.workprec():
        level = to_mpf(eps) ** P.degree
        res = sublevel_arcs(P, level, ctx)
    radii = math.fsum(a.chord_radius for a in res.arcs)
    bound = 2 * math.e * eps
    return CartanResult(res.arcs, radii, bound, radii <= bound)
