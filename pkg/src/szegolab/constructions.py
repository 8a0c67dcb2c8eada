"""Generators for the measure families used to probe the Szego minimum.

Every family is returned as a :class:`~szegolab.measures.Measure` together
with enough structure to check its defining inequalities at finite level:

* dyadic limit-invariant atomic measures and their tail sandwich,
* atomic measures on roots of unity built from a monotone mass sequence,
* the anti-Nevai pair (a weight with integrable log powers that lifts
  ``e_{2^n}`` to the tail mass of a spread dyadic measure),
* the pair with a bounded weight whose ``e_n`` ratio is pushed down,
* truncated Riesz products with their two-sided ``e_{N_n}`` bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
from mpmath import mp

from .measures import (
    AtomicComponent,
    DensityPiece,
    Measure,
    MomentSequence,
    PiecewiseDensityComponent,
    RieszProductComponent,
    check_lacunary,
    invariance_order,
    moments,
    riesz_moments,
)
from .precision import PrecisionContext, mp_str, resolve, to_fraction, to_mpf
from .szego import CirclePolynomial, en_profile

MAX_DYADIC_LEVEL = 16
SUM_TOLERANCE = 1e-15


# ---------------------------------------------------------------------------
# tail sequences


def _exact(x):
    if isinstance(x, (Fraction, mpmath.mpf)):
        return x
    if isinstance(x, (int, float, str)):
        return to_fraction(x)
    return mpmath.mpf(x)


@dataclass(frozen=True)
class TailSequence:
    """Positive masses ``a_1, a_2, ...`` summing to one, with tails precomputed.

    ``values[j - 1]`` is ``a_j`` and ``tails[k]`` is ``s_k = sum_{j > k} a_j``,
    so ``tails[0] == 1`` and ``tails[len] == 0``. Values stay exact
    ``Fraction`` objects when every input is rational.
    """

    values: tuple
    tails: tuple = field(default=(), repr=False)

    def __post_init__(self) -> None:
        vals = tuple(_exact(v) for v in self.values)
        if not vals:
            raise ValueError("tail sequence needs at least one term")
        if any(not (v > 0) for v in vals):
            raise ValueError("tail sequence terms must be strictly positive")
        exact = all(isinstance(v, Fraction) for v in vals)
        with mp.workprec(256):
            tails = [Fraction(0) if exact else mpmath.mpf(0)]
            for v in reversed(vals):
                tails.append(tails[-1] + v)
            tails.reverse()
            total = tails[0]
            if abs(float(to_mpf(total)) - 1.0) > SUM_TOLERANCE:
                raise ValueError(f"tail sequence sums to {float(to_mpf(total))!r}, expected 1")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "tails", tuple(tails))

    @classmethod
    def from_values(cls, values: Sequence, normalize: bool = True) -> "TailSequence":
        vals = [_exact(v) for v in values]
        if normalize:
            with mp.workprec(256):
                if all(isinstance(v, Fraction) for v in vals):
                    total = sum(vals, Fraction(0))
                else:
                    vals = [to_mpf(v) for v in vals]
                    total = mpmath.fsum(vals)
                if not (total > 0):
                    raise ValueError("tail sequence needs positive total mass")
                vals = [v / total for v in vals]
        return cls(tuple(vals))

    @classmethod
    def geometric(cls, ratio=Fraction(1, 2), length: int = 32) -> "TailSequence":
        """``a_j`` proportional to ``ratio**j``, renormalised over ``length`` terms."""
        r = to_fraction(ratio)
        if not 0 < r < 1:
            raise ValueError("ratio must lie in (0, 1)")
        return cls.from_values([r ** j for j in range(1, length + 1)])

    @classmethod
    def power(cls, p, length: int = 256) -> "TailSequence":
        """``a_j`` proportional to ``j**(-p)``, renormalised over ``length`` terms."""
        p = _exact(p)
        if isinstance(p, Fraction) and p.denominator == 1:
            vals = [Fraction(1, j ** int(p)) for j in range(1, length + 1)]
        else:
            with mp.workprec(256):
                vals = [mpmath.mpf(j) ** (-to_mpf(p)) for j in range(1, length + 1)]
        return cls.from_values(vals)

    @classmethod
    def log_power(cls, p, length: int = 256) -> "TailSequence":
        """``a_j`` proportional to ``1 / (j log^p(j + 1))``, renormalised."""
        with mp.workprec(256):
            pp = to_mpf(_exact(p))
            vals = [1 / (j * mpmath.log(j + 1) ** pp) for j in range(1, length + 1)]
        return cls.from_values(vals)

    def __len__(self) -> int:
        return len(self.values)

    def a(self, j: int):
        """``a_j`` (1-based); zero beyond the stored range."""
        if j < 1:
            raise IndexError("tail sequence is indexed from 1")
        return self.values[j - 1] if j <= len(self.values) else Fraction(0)

    def s(self, k: int):
        """``s_k = sum_{j > k} a_j``; zero beyond the stored range."""
        if k < 0:
            raise IndexError("tail index must be nonnegative")
        return self.tails[k] if k < len(self.tails) else Fraction(0)

    @property
    def is_monotone(self) -> bool:
        return all(x >= y for x, y in zip(self.values, self.values[1:]))

    def residue_sums(self, period: int) -> list:
        """``sum_{j >= 0} a_{r + j * period}`` for ``r = 1 .. period``."""
        out = [Fraction(0)] * period
        for j, v in enumerate(self.values):
            out[j % period] = out[j % period] + v
        return out


# ---------------------------------------------------------------------------
# dyadic limit-invariant measures


def dyadic_level(k: int) -> AtomicComponent:
    """Uniform probability on ``Lambda_{2^{k+1}} minus Lambda_{2^k}`` (odd multiples of ``2^{-k-1}`` turns)."""
    if k < 0:
        raise ValueError("level must be nonnegative")
    den = 1 << (k + 1)
    count = 1 << k
    return AtomicComponent(tuple(Fraction(2 * j + 1, den) for j in range(count)), (Fraction(1, count),) * count)


def dyadic_root_measure(a: TailSequence, K: int) -> Measure:
    """``sum_{k=1}^K a_k rho_k`` with ``rho_k`` uniform on the new ``2^{k+1}``-th roots.

    The component for level ``k`` is kept separate inside the returned
    measure, so ``measure.components[k - 1]`` is ``(a_k, rho_k)`` and is
    invariant under rotation by ``2^{-k}`` turns.
    """
    if K < 1:
        raise ValueError("need at least one level")
    if K > MAX_DYADIC_LEVEL:
        raise ValueError(f"K = {K} needs 2^{K + 1} atoms; the limit is K <= {MAX_DYADIC_LEVEL}")
    if len(a) < K:
        raise ValueError(f"tail sequence has {len(a)} terms, need {K}")
    return Measure(tuple((a.a(k), dyadic_level(k)) for k in range(1, K + 1)))


def dyadic_moments(a: TailSequence, K: int, N: int, ctx: PrecisionContext | int | None = None) -> MomentSequence:
    """Closed-form moments of :func:`dyadic_root_measure`.

    ``rho_k`` has ``c_m = 2 [2^{k+1} | m] - [2^k | m]``, which are integers.
    """
    ctx = resolve(ctx)
    with ctx.workprec():
        vals = []
        for m in range(N + 1):
            c = Fraction(0)
            for k in range(1, K + 1):
                c += a.a(k) * (2 * (m % (1 << (k + 1)) == 0) - (m % (1 << k) == 0))
            vals.append(mpmath.mpc(to_mpf(c)))
        return MomentSequence(tuple(vals), ctx.mantissa_bits)


def dyadic_sandwich(a: TailSequence, K: int, n: int):
    """Lower and upper bounds ``(sum_{k>n} a_k, 4 sum_{k>=n} a_k)`` for ``e_{2^n}^2``, truncated at ``K``."""
    lower = sum((a.a(k) for k in range(n + 1, K + 1)), Fraction(0))
    upper = 4 * sum((a.a(k) for k in range(max(n, 1), K + 1)), Fraction(0))
    return lower, upper


# ---------------------------------------------------------------------------
# monotone tails on roots of unity


def monotone_tail_measure(a: TailSequence, n: int) -> Measure:
    """Atoms ``sum_j a_{k + j(n+1)}`` at ``exp(2 pi i k / (n+1))``, ``k = 1 .. n+1``.

    Raises
    ------
    ValueError
        If ``a`` is not non-increasing, or ``n < 0``.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if not a.is_monotone:
        bad = next(j for j in range(1, len(a)) if a.a(j) < a.a(j + 1))
        raise ValueError(f"tail sequence is not monotone: a_{bad} < a_{bad + 1}")
    period = n + 1
    sums = a.residue_sums(period)
    turns, masses = [], []
    for r in range(1, period + 1):
        m = sums[(r - 1) % period]
        if m > 0:
            turns.append(Fraction(r % period, period))
            masses.append(m)
    return Measure.atoms(turns, masses)


def monotone_tail_bound(a: TailSequence, n: int):
    """``(n + 1) sum_{j >= 1} a_{j (n+1)}``, a lower bound for ``e_n^2`` of the monotone-tail measure."""
    period = n + 1
    return period * sum((a.a(j) for j in range(period, len(a) + 1, period)), Fraction(0))


@dataclass(frozen=True)
class HalaszTailBound:
    """Upper bound for ``e_n^2`` of ``sum a_j delta_{lambda_j}`` from a Halasz product.

    ``P = prod_{j<=k} H_d(z conj(lambda_j))`` has ``P(0) = 1`` and degree at
    most ``n``; its reversal is monic with the same modulus on the circle,
    so ``e_n^2 <= norm2 = int |P|^2 d rho``. The chain
    ``norm2 <= max|P|^2 s_k <= e^{8k^2/n} s_k <= s_k^{1 - sigma}`` holds once
    ``k^2 / log(1/s_k) <= sigma n / 8``.
    """

    n: int
    k: int
    d: int
    sigma: float
    s_k: object
    norm2: mpmath.mpf
    sup_bound: float
    target: mpmath.mpf
    polynomial: CirclePolynomial

    @property
    def holds(self) -> bool:
        return bool(self.norm2 <= self.target)


def halasz_tail_choice(a: TailSequence, n: int, sigma: float = 0.5) -> int:
    """Largest ``k <= n/2`` with ``k^2 <= sigma n log(1/s_k) / 8``."""
    best = 0
    for k in range(1, n // 2 + 1):
        s = a.s(k)
        if s == 0:
            break
        if k * k <= sigma * n * -float(mpmath.log(to_mpf(s))) / 8:
            best = k
    return best


def halasz_tail_bound(a: TailSequence, turns: Sequence, n: int, sigma: float = 0.5,
                      ctx: PrecisionContext | int | None = None) -> HalaszTailBound:
    """Evaluate the Halasz-product bound for atoms ``a_j`` at ``turns[j - 1]``."""
    if len(turns) != len(a):
        raise ValueError("need one angle per mass")
    from .polynomials import halasz_product

    ctx = resolve(ctx)
    k = halasz_tail_choice(a, n, sigma)
    radians = [float(to_fraction(t)) * 2 * math.pi for t in turns[:k]]
    P = halasz_product(radians, n, ctx=ctx)
    mu = Measure.atoms(turns, a.values)
    with ctx.workprec():
        mom = moments(mu, max(P.degree, 0), ctx=ctx)
        norm2 = P.norm2(mom)
        s_k = to_mpf(a.s(k))
        target = s_k ** (1 - mpmath.mpf(sigma))
    d = n // k if k else 0
    return HalaszTailBound(n, k, d, sigma, a.s(k), norm2, (1 + 2 / d) ** (2 * k) if k else 1.0, target, P)


# ---------------------------------------------------------------------------
# anti-Nevai pair


class IntegrabilityError(ValueError):
    """A spreading width is too large for the requested integrability."""

    def __init__(self, message: str, k: int):
        super().__init__(message)
        self.k = k


def default_epsilon(n: int) -> float:
    return 1.0 / math.sqrt(n)


@dataclass(frozen=True)
class AntiNevaiSpec:
    """Parameters of the anti-Nevai construction.

    Attributes
    ----------
    H : {"inverse_abs", "zero"}
        ``inverse_abs`` is ``H(theta) = 1/|theta|`` on ``(-pi, pi]``, whose
        integral diverges while ``H`` stays finite off ``0``; ``zero`` is
        ``H = 0``, for which the weight is a pure step function.
    epsilon : callable
        Target rate ``n -> epsilon_n``; the masses are
        ``a_k`` proportional to ``max(epsilon_{2^k}, 2^{-k})``.
    p_values : tuple of float
        Exponents at which the log-integrability sums are checked.
    eta : tuple of Fraction, optional
        Override for the spreading widths ``eta_1 .. eta_K``.
    """

    H: str = "inverse_abs"
    epsilon: Callable[[int], float] = default_epsilon
    p_values: tuple = (1, 2, 4)
    eta: tuple | None = None

    def __post_init__(self) -> None:
        if self.H not in ("inverse_abs", "zero"):
            raise ValueError(f"unknown H family {self.H!r}")

    def ceiling(self, k: int) -> int:
        """``A_k = 2^{k+1}``: for ``1/|theta|`` the bad set has measure ``1/(pi A_k) < 2^{-k-1}``.

        For ``H = 0`` any ceiling works; the same value keeps the width rule
        (and hence the decay of the level terms) uniform across families.
        """
        return 1 << (k + 1)

    def bad_set_measure(self, k: int) -> float:
        """``m{|arg t| < 2^{-k} pi, max_lambda H(conj(lambda) t) > A_k}``."""
        if self.H == "zero":
            return 0.0
        return min(1.0 / (math.pi * self.ceiling(k)), 2.0 ** (-k))

    def etas(self, K: int) -> list:
        if self.eta is not None:
            if len(self.eta) < K:
                raise ValueError(f"eta override has {len(self.eta)} terms, need {K}")
            return [to_fraction(e) for e in self.eta[:K]]
        out = []
        for k in range(1, K + 1):
            e = Fraction(1, (1 << k) * (self.ceiling(k) ** k + 1))
            if out:
                e = min(e, out[-1] / 2)
            out.append(e)
        return out

    def masses(self, K: int) -> TailSequence:
        raw = [max(float(self.epsilon(1 << k)), 2.0 ** (-k)) for k in range(1, K + 1)]
        return TailSequence.from_values([Fraction(x) for x in raw])


@dataclass(frozen=True)
class SpreadLevel:
    """Level ``k`` of the spread measure: arcs ``lambda X_k`` of length ``eta_k``."""

    k: int
    A: int
    eta: Fraction
    a: object
    intervals: tuple  # ((lo, hi), ...) in turns, within [0, 1)

    @property
    def density(self):
        """Height ``a_k / (2^k eta_k)`` of ``a_k rho~_k`` on ``E_k``."""
        return self.a / ((1 << self.k) * self.eta)

    def component(self) -> PiecewiseDensityComponent:
        """``rho~_k = 1_{E_k} m / (2^k eta_k)``, a probability measure."""
        h = 1 / ((1 << self.k) * self.eta)
        bps, vals = [], []
        for lo, hi in self.intervals:
            if bps:
                vals.append(0)
                bps.append(lo)
            else:
                bps.append(lo)
            vals.append(h)
            bps.append(hi)
        return PiecewiseDensityComponent.step(bps, vals)


def _spread_intervals(k: int, eta: Fraction) -> tuple:
    den = 1 << (k + 1)
    half = eta / 2
    return tuple((Fraction(2 * j + 1, den) - half, Fraction(2 * j + 1, den) + half) for j in range(1 << k))


def _wrap(t: Fraction) -> Fraction:
    """Representative of ``t`` turns in ``(-1/2, 1/2]``."""
    r = t - math.floor(t)
    return r - 1 if r > Fraction(1, 2) else r


def _inverse_power_integral(lo: Fraction, hi: Fraction, p: float):
    """``int |theta|^{-p} dm`` over turns ``[lo, hi]`` not containing ``0``."""
    a, b = sorted((abs(_wrap(lo)), abs(_wrap(hi))))
    a, b = to_mpf(a) * 2 * mp.pi, to_mpf(b) * 2 * mp.pi
    if p == 1:
        return (mpmath.log(b) - mpmath.log(a)) / (2 * mp.pi)
    q = 1 - mpmath.mpf(p)
    return (b ** q - a ** q) / (q * 2 * mp.pi)


@dataclass
class AntiNevaiResult:
    """``mu_0``, the weight ``w`` and the measure ``w mu`` with diagnostics.

    Iterates as ``(mu_0, w, diagnostics)``.
    """

    spec: AntiNevaiSpec
    K: int
    mu0: Measure
    weight: PiecewiseDensityComponent
    weighted: Measure
    levels: tuple
    diagnostics: dict

    def __iter__(self):
        return iter((self.mu0, self.weight, self.diagnostics))


def _mu0(spec: AntiNevaiSpec) -> Measure:
    if spec.H == "zero":
        return Measure.lebesgue(1)
    piece = DensityPiece("exp_neg_inv_abs", (1.0, 0.0))
    return Measure(((1, PiecewiseDensityComponent((Fraction(-1, 2), Fraction(1, 2)), (piece,))),))


def _weight(spec: AntiNevaiSpec, levels: Sequence[SpreadLevel]) -> PiecewiseDensityComponent:
    """``w = 1 + e^{H} sum_k a_k/(2^k eta_k) 1_{E_k}`` as a piecewise density on ``[0, 1)`` turns."""
    events = sorted({b for lv in levels for iv in lv.intervals for b in iv} | {Fraction(0), Fraction(1)})
    bps, pieces = [events[0]], []
    for lo, hi in zip(events, events[1:]):
        mid = (lo + hi) / 2
        c = sum((lv.density for lv in levels for a, b in lv.intervals if a <= mid <= b), Fraction(0))
        if c == 0:
            piece = DensityPiece("constant", (1,))
        elif spec.H == "zero":
            piece = DensityPiece("constant", (1 + c,))
        else:
            cf = float(c)
            piece = DensityPiece("callable", (lambda th, cf=cf: 1.0 + cf * np.exp(1.0 / np.abs(np.mod(th + np.pi, 2 * np.pi) - np.pi)),))
        pieces.append(piece)
        bps.append(hi)
    return PiecewiseDensityComponent(tuple(bps), tuple(pieces))


def anti_nevai_pair(spec: AntiNevaiSpec | None = None, K: int = 6,
                    ctx: PrecisionContext | int | None = None, check_chain: bool = True) -> AntiNevaiResult:
    """Build ``mu_0 = e^{-H_+} m`` and a weight ``w >= 1`` with ``w mu_0 = mu_0 + rho~``.

    Parameters
    ----------
    spec : AntiNevaiSpec, optional
        Family of ``H``, target rate and exponents (defaults shown there).
    K : int
        Number of spread levels.
    ctx : PrecisionContext or int, optional
        Precision for the ``e_{2^n}`` chain.
    check_chain : bool
        Solve the Szego problem for ``w mu`` at degrees ``2^n``, ``n < K``.

    Returns
    -------
    AntiNevaiResult
        ``diagnostics`` records, per ``p``, the bound ``int_E H^p dm <= sum A_k^p 2^k eta_k``
        and the log-power sum ``sum 2^r eta_r log^p(1/eta_r)``; the chain
        ``e_{2^n}(w mu)^2 >= sum_{k > n} a_k`` when requested.

    Raises
    ------
    IntegrabilityError
        If a width ``eta_k`` violates the placement or decay rules; the error
        names the level ``k``.
    """
    spec = spec or AntiNevaiSpec()
    if K < 1:
        raise ValueError("need at least one level")
    ctx = resolve(ctx)
    etas = spec.etas(K)
    a = spec.masses(K)
    levels = []
    with ctx.workprec():
        for k, eta in enumerate(etas, start=1):
            if not eta > 0:
                raise IntegrabilityError(f"eta_{k} must be positive", k)
            if k > 1 and eta > etas[k - 2]:
                raise IntegrabilityError(f"eta_{k} exceeds eta_{k - 1}; widths must decrease", k)
            A = spec.ceiling(k)
            # X_k must sit where max_lambda H(conj(lambda) t) <= A_k
            room = Fraction(1, 1 << (k + 1))
            if spec.H == "inverse_abs":
                if not to_mpf(eta) / 2 <= to_mpf(room) - 1 / (2 * mp.pi * A):
                    raise IntegrabilityError(f"eta_{k} = {float(eta):.3g} leaves the set where H <= A_{k}", k)
            elif not eta < 2 * room:
                raise IntegrabilityError(f"eta_{k} = {float(eta):.3g} makes the arcs of level {k} overlap", k)
            levels.append(SpreadLevel(k, A, eta, a.a(k), _spread_intervals(k, eta)))

        diagnostics: dict = {"masses": [mp_str(to_mpf(v)) for v in a.values],
                             "etas": [str(e) for e in etas],
                             "ceilings": [lv.A for lv in levels],
                             "bad_set_measure": [spec.bad_set_measure(k) for k in range(1, K + 1)]}
        diagnostics["bad_set_ok"] = all(spec.bad_set_measure(k) < 2.0 ** (-k - 1) for k in range(1, K + 1))
        diagnostics["integrability"] = _integrability(spec, levels)

        mu0 = _mu0(spec)
        spread = Measure(tuple((lv.a, lv.component()) for lv in levels))
        weighted = mu0 + spread
        weight = _weight(spec, levels)
        diagnostics["level_invariance"] = [
            invariance_order(Measure(((1, lv.component()),)), 1 << lv.k, tol=1e-30, ctx=ctx) for lv in levels
        ]
        diagnostics["weight_min"] = float(np.min(weight.evaluate(np.linspace(-np.pi, np.pi, 4097))))
        eps_rows = []
        for n in range(K):
            eps_rows.append({"n": n, "epsilon": float(spec.epsilon(1 << n)), "tail": mp_str(to_mpf(a.s(n)))})
        diagnostics["rate"] = eps_rows
        if check_chain and K >= 1:
            diagnostics["chain"] = _anti_nevai_chain(weighted, mu0, a, K, ctx)
    return AntiNevaiResult(spec, K, mu0, weight, weighted, tuple(levels), diagnostics)


def _integrability(spec: AntiNevaiSpec, levels: Sequence[SpreadLevel]) -> list:
    rows = []
    for p in spec.p_values:
        lhs_h = mpmath.mpf(0)
        bound_h = mpmath.mpf(0)
        lhs_log = mpmath.mpf(0)
        bound_log = mpmath.mpf(0)
        terms = []
        for lv in levels:
            size = to_mpf((1 << lv.k) * lv.eta)
            if spec.H == "inverse_abs":
                for lo, hi in lv.intervals:
                    lhs_h += _inverse_power_integral(lo, hi, p)
            bound_h += mpmath.mpf(lv.A) ** p * size
            # E_k pieces at one level are disjoint; the log_+ of the height is bounded by log(1/eta)
            height = to_mpf(lv.density)
            lhs_log += size * max(mpmath.log(height), 0) ** p
            log_term = size * mpmath.log(1 / to_mpf(lv.eta)) ** p
            bound_log += log_term
            terms.append(mpmath.mpf(lv.A) ** p * size + log_term)
        # decay of the level terms past k = p + 1 keeps both series finite
        start = int(math.ceil(p)) + 2
        for k in range(start, len(terms)):
            if terms[k] > terms[k - 1] / 2:
                raise IntegrabilityError(
                    f"level term at k = {k + 1} does not halve (p = {p}); eta_{k + 1} is not small enough", k + 1)
        rows.append({
            "p": p,
            "H_integral": mp_str(lhs_h, 17),
            "H_bound": mp_str(bound_h, 17),
            "H_ok": bool(lhs_h <= bound_h),
            "log_integral": mp_str(lhs_log, 17),
            "log_bound": mp_str(bound_log, 17),
            "log_ok": bool(lhs_log <= bound_log),
            "last_term": mp_str(terms[-1], 17),
        })
    return rows


def _anti_nevai_chain(weighted: Measure, mu0: Measure, a: TailSequence, K: int, ctx: PrecisionContext) -> list:
    top = 1 << (K - 1)
    prof_w = en_profile(weighted, top, ctx)
    prof_0 = en_profile(mu0, top, ctx)
    rows = []
    # mu_0 moments come from double-precision quadrature
    slack = 1e-10
    for n in range(K):
        d = 1 << n
        e2 = prof_w[d].e_n_squared
        tail = to_mpf(a.s(n))
        rows.append({
            "n": n,
            "degree": d,
            "e_sq_weighted": mp_str(e2, 20),
            "e_sq_mu0": mp_str(prof_0[d].e_n_squared, 20),
            "tail": mp_str(tail, 20),
            "pass": bool(e2 >= tail * (1 - slack)),
        })
    return rows


# ---------------------------------------------------------------------------
# bounded weight pushing the ratio down


def _nearest_rational(x) -> Fraction:
    return to_fraction(+to_mpf(x))


@dataclass(frozen=True)
class ProNSpec:
    """Scale schedule and step heights for the bounded-weight construction.

    ``N`` is strictly increasing; ``alphas[k]`` and ``betas[k]`` belong to
    ``N[k]`` and satisfy ``0 < beta_k < alpha_k < 1/2``. The ``alphas`` are
    kept as exact dyadic rationals so that the window ``[0, alpha_k]`` and the
    height ``alpha_k`` agree exactly.
    """

    N: tuple
    alphas: tuple
    betas: tuple

    def __post_init__(self) -> None:
        N = tuple(int(x) for x in self.N)
        if not N or any(x < 1 for x in N):
            raise ValueError("schedule entries must be positive integers")
        if any(y <= x for x, y in zip(N, N[1:])):
            raise ValueError("schedule must be strictly increasing")
        if not len(N) == len(self.alphas) == len(self.betas):
            raise ValueError("schedule, alphas and betas differ in length")
        with mp.workprec(256):
            alphas = tuple(_nearest_rational(x) for x in self.alphas)
            betas = tuple(+to_mpf(x) for x in self.betas)
            for k, (al, be) in enumerate(zip(alphas, betas)):
                if not (0 < be < to_mpf(al) and al < Fraction(1, 2)):
                    raise ValueError(f"level {k}: need 0 < beta < alpha < 1/2, got alpha = {float(al):.4g}, "
                                     f"beta = {mpmath.nstr(be, 4)}")
            if sum(alphas, Fraction(0)) >= 1:
                raise ValueError("sum of alphas must stay below 1 so that the density stays below 1")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)

    @classmethod
    def literal(cls, levels: int) -> "ProNSpec":
        """``N_k = 2^{4^k}``, ``alpha_k = e^{-N_{k-2}}``, ``beta_k = e^{-N_{k+2}}`` for ``k = 2 ..``.

        Only ``levels <= 1`` (that is ``N_2 = 65536``) is accepted: beyond it
        the schedule is numerically meaningless.
        """
        if levels > 1:
            raise ValueError("the literal schedule 2^(4^k) is only materialisable for k = 2")
        with mp.workprec(256):
            N = [2 ** (4 ** k) for k in range(2, 2 + levels)]
            al = [mpmath.exp(-(2 ** (4 ** (k - 2)))) for k in range(2, 2 + levels)]
            be = [mpmath.exp(-(2 ** (4 ** (k + 2)))) for k in range(2, 2 + levels)]
            return cls(tuple(N), tuple(al), tuple(be))

    @classmethod
    def scaled(cls, N=(4, 16, 64), alpha_cap=Fraction(2, 5)) -> "ProNSpec":
        """Schedule with ratio ``r = N_{k+1}/N_k``: ``alpha_k = min(e^{-N_k/r^2}, cap)``, ``beta_k = e^{-r^2 N_k}``.

        With ``r = N_k^3`` this is the literal choice ``alpha_k = e^{-N_{k-2}}``,
        ``beta_k = e^{-N_{k+2}}``; the cap keeps ``alpha_k < 1/2`` at the
        bottom of short schedules.
        """
        N = tuple(int(x) for x in N)
        r = N[1] // N[0] if len(N) > 1 else 4
        with mp.workprec(256):
            al = [min(mpmath.exp(-mpmath.mpf(n) / r ** 2), to_mpf(to_fraction(alpha_cap))) for n in N]
            be = [mpmath.exp(-mpmath.mpf(n) * r ** 2) for n in N]
            return cls(N, tuple(al), tuple(be))


def _level_value(spec: ProNSpec, k: int, t: Fraction):
    u = spec.N[k] * t
    u -= math.floor(u)
    al = spec.alphas[k]
    if u <= al:
        return "alpha"
    if u <= Fraction(1, 2):
        return "beta"
    return "zero"


@dataclass
class ProNResult:
    """Piecewise-constant ``mu'``, ``w`` and ``w mu'`` with diagnostics; iterates as ``(mu, w, diagnostics)``."""

    spec: ProNSpec
    mu: Measure
    weight: PiecewiseDensityComponent
    weighted: Measure
    floor: mpmath.mpf
    diagnostics: dict

    def __iter__(self):
        return iter((self.mu, self.weight, self.diagnostics))


def pron_pair(spec: ProNSpec | None = None, K: int | None = None, ctx: PrecisionContext | int | None = None,
              ratio_degrees: Sequence[int] | None = None, check_bound: bool = True) -> ProNResult:
    """``mu' = floor + sum_k h_{alpha_k, beta_k}(N_k theta)`` and ``w = prod (beta_k/alpha_k)^{g_{alpha_k}(N_k theta)}``.

    ``h_{alpha, beta}`` is ``alpha`` on ``[0, alpha]``, ``beta`` on
    ``(alpha, 1/2]`` and ``0`` on the rest of each period. With finitely many
    levels the set where every ``h`` vanishes has positive measure, so a
    constant ``floor = beta_K^2`` stands in for the omitted levels and keeps
    ``mu' > 0``.

    Parameters
    ----------
    spec : ProNSpec, optional
        Defaults to :meth:`ProNSpec.scaled` with ``N = (4, 16, 64)``.
    K : int, optional
        Use only the first ``K`` levels of ``spec``.
    ctx : PrecisionContext or int, optional
        Working precision (``beta`` values are far below double range).
    ratio_degrees : sequence of int, optional
        Degrees at which ``e_n(w mu) / e_n(mu)`` is reported.
    check_bound : bool
        Solve the Szego problem to check ``e_s(mu)^2 >= alpha_k^2``, ``s < N_k``.
    """
    spec = spec or ProNSpec.scaled()
    if K is not None:
        if not 1 <= K <= len(spec.N):
            raise ValueError(f"K must lie in 1..{len(spec.N)}")
        spec = ProNSpec(spec.N[:K], spec.alphas[:K], spec.betas[:K])
    ctx = resolve(ctx)
    with ctx.workprec():
        betas = [to_mpf(b) for b in spec.betas]
        alphas = [to_mpf(a) for a in spec.alphas]
        floor = betas[-1] ** 2
        cuts = {Fraction(0), Fraction(1)}
        for N, al in zip(spec.N, spec.alphas):
            for j in range(N):
                cuts.update((Fraction(j, N), (j + al) / N, (j + Fraction(1, 2)) / N))
        cuts = sorted(cuts)
        mu_vals, w_vals, logw = [], [], []
        for lo, hi in zip(cuts, cuts[1:]):
            mid = (lo + hi) / 2
            dens = floor
            lw = mpmath.mpf(0)
            for k in range(len(spec.N)):
                kind = _level_value(spec, k, mid)
                if kind == "alpha":
                    dens += alphas[k]
                    lw += mpmath.log(betas[k] / alphas[k])
                elif kind == "beta":
                    dens += betas[k]
            mu_vals.append(dens)
            logw.append(lw)
            w_vals.append(mpmath.exp(lw))
        mu_comp = PiecewiseDensityComponent.step(cuts, mu_vals)
        w_comp = PiecewiseDensityComponent.step(cuts, w_vals)
        wmu_comp = PiecewiseDensityComponent.step(cuts, [a * b for a, b in zip(mu_vals, w_vals)])
        mu = Measure(((1, mu_comp),))
        weighted = Measure(((1, wmu_comp),))

        closed = mpmath.fsum(a * mpmath.log(a / b) for a, b in zip(alphas, betas))
        swept = mpmath.fsum(-lw * to_mpf(hi - lo) for lw, lo, hi in zip(logw, cuts, cuts[1:]))
        diagnostics: dict = {
            "N": list(spec.N),
            "alphas": [mp_str(a, 20) for a in alphas],
            "betas": [mp_str(b, 20) for b in betas],
            "floor": mp_str(floor, 20),
            "density_min": mp_str(min(mu_vals), 20),
            "density_max": mp_str(max(mu_vals), 20),
            "density_in_open_unit": bool(min(mu_vals) > 0 and max(mu_vals) < 1),
            "weight_min": mp_str(min(w_vals), 20),
            "weight_max": mp_str(max(w_vals), 20),
            "weight_in_half_open_unit": bool(min(w_vals) > 0 and max(w_vals) <= 1),
            "log_integral_closed": mp_str(closed, 30),
            "log_integral_swept": mp_str(swept, 30),
            "log_integral_rel_diff": float(abs(closed - swept) / closed),
        }
        if check_bound or ratio_degrees:
            top = spec.N[-1] - 1
            if ratio_degrees:
                top = max(top, max(ratio_degrees))
            prof = en_profile(mu, top, ctx)
            rows = []
            for k, (N, al) in enumerate(zip(spec.N, alphas)):
                worst = min(prof[s].e_n_squared for s in range(N))
                rows.append({"k": k, "N": N, "alpha_sq": mp_str(al ** 2, 20),
                             "min_e_sq_below_N": mp_str(worst, 20), "pass": bool(worst >= al ** 2)})
            diagnostics["invariance_bound"] = rows
            if ratio_degrees:
                prof_w = en_profile(weighted, max(ratio_degrees), ctx)
                diagnostics["ratio"] = [
                    {"n": n, "ratio": mp_str(prof_w[n].e_n / prof[n].e_n, 20)} for n in ratio_degrees
                ]
    return ProNResult(spec, mu, w_comp, weighted, floor, diagnostics)


# ---------------------------------------------------------------------------
# Riesz products


def _sum_squares_diverges(tail) -> bool | None:
    if tail is None:
        return None
    kind = tail[0]
    if kind == "constant":
        return float(tail[1]) != 0.0
    if kind == "power":
        c, q = float(tail[1]), float(tail[2])
        return c != 0.0 and 2 * q <= 1
    raise ValueError(f"unknown tail description {kind!r}; use ('constant', c) or ('power', c, q)")


def riesz_log_factor(alpha) -> mpmath.mpf:
    """``int log(1 + alpha cos theta) dm = log((1 + sqrt(1 - alpha^2)) / 2)``."""
    a = to_mpf(alpha)
    if abs(a) == 1:
        return mpmath.log(mpmath.mpf(1) / 2)
    return mpmath.log((1 + mpmath.sqrt(1 - a * a)) / 2)


@dataclass(frozen=True)
class RieszMeasure:
    """A truncated Riesz product ``prod_{j<=n} (1 + alpha_j cos(ell_j theta))`` with its bounds.

    ``singular`` applies the square-summability criterion to the supplied
    tail description: ``True`` when ``sum alpha_j^2`` diverges (singular limit),
    ``False`` when it converges (absolutely continuous limit) and ``None``
    when no tail was described.
    """

    component: RieszProductComponent
    singular: bool | None

    @property
    def measure(self) -> Measure:
        return Measure(((1, self.component),))

    @property
    def level(self) -> int:
        return self.component.truncation_level

    @property
    def N(self) -> int:
        """``N_n = sum_j ell_j``, the highest order at which moments are exact."""
        return self.component.max_frequency

    def moments(self, N: int | None = None, ctx: PrecisionContext | int | None = None) -> MomentSequence:
        return riesz_moments(self.component, self.N if N is None else N, ctx)

    def lower_bound(self, ctx: PrecisionContext | int | None = None):
        """``prod (1 + sqrt(1 - alpha_j^2)) / 2``."""
        ctx = resolve(ctx)
        with ctx.workprec():
            return mpmath.exp(self.log_lower_bound(ctx))

    def log_lower_bound(self, ctx: PrecisionContext | int | None = None):
        ctx = resolve(ctx)
        with ctx.workprec():
            return mpmath.fsum(riesz_log_factor(a) for a in self.component.alphas)

    def upper_bound(self, ctx: PrecisionContext | int | None = None):
        """``prod (1 - alpha_j^2 / 4)``."""
        ctx = resolve(ctx)
        with ctx.workprec():
            out = mpmath.mpf(1)
            for a in self.component.alphas:
                out *= 1 - to_mpf(a) ** 2 / 4
            return out

    def log_density_integral(self, tol: float = 1e-14, max_points: int = 1 << 22) -> tuple[float, float]:
        """``int log(density) dm`` by the periodic trapezoid rule (doubling until stable).

        Factors with ``|alpha_j| = 1`` have a logarithmic singularity; their
        exact contribution ``log(1/2)`` is added instead of being sampled.

        Returns
        -------
        (value, error estimate)
        """
        exact = 0.0
        regular = []
        for a, l in zip(self.component.alphas, self.component.ells):
            if abs(a) == 1:
                exact += math.log(0.5)
            else:
                regular.append((float(a), l))
        if not regular:
            return exact, 0.0
        M = 8 * max(l for _, l in regular)
        prev = None
        while True:
            theta = np.arange(M) * (2 * np.pi / M)
            logd = np.zeros(M)
            for a, l in regular:
                logd += np.log1p(a * np.cos(l * theta))
            val = float(np.mean(logd))
            if prev is not None and abs(val - prev) <= tol:
                return exact + val, abs(val - prev)
            if M >= max_points:
                return exact + val, abs(val - prev) if prev is not None else math.inf
            prev = val
            M *= 2

    def test_polynomial(self, ctx: PrecisionContext | int | None = None) -> CirclePolynomial:
        """Monic ``prod_j (z^{ell_j} - alpha_j / 2)`` of degree ``N_n``."""
        ctx = resolve(ctx)
        with ctx.workprec():
            P = CirclePolynomial((1,), monic=True, mantissa_bits=ctx.mantissa_bits)
            for a, l in zip(self.component.alphas, self.component.ells):
                cs = [mpmath.mpc(0)] * (l + 1)
                cs[0] = mpmath.mpc(-to_mpf(a) / 2)
                cs[l] = mpmath.mpc(1)
                P = P * CirclePolynomial(tuple(cs), monic=True, mantissa_bits=ctx.mantissa_bits)
            return P


def riesz_measure(alphas: Sequence, ells: Sequence[int], level: int | None = None, tail=None) -> RieszMeasure:
    """Truncated Riesz product using the factors ``0 .. level``.

    Parameters
    ----------
    alphas, ells : sequences
        Coefficients in ``[-1, 1]`` and lacunary frequencies
        (``ell_{j+1} >= 3 ell_j``).
    level : int, optional
        Truncation level ``n``; defaults to the last supplied factor.
    tail : tuple, optional
        ``("constant", c)`` or ``("power", c, q)`` describing ``alpha_j`` for
        large ``j``; drives the singular/absolutely continuous flag.

    Raises
    ------
    LacunarityError
        Naming the first pair of frequencies that violates the growth rule.
    """
    ells = [int(l) for l in ells]
    check_lacunary(ells)
    if level is None:
        level = len(ells) - 1
    if not 0 <= level < min(len(alphas), len(ells)):
        raise ValueError(f"level {level} outside 0..{min(len(alphas), len(ells)) - 1}")
    comp = RieszProductComponent(tuple(alphas[: level + 1]), tuple(ells[: level + 1]))
    return RieszMeasure(comp, _sum_squares_diverges(tail))


# ---------------------------------------------------------------------------
# concentrated instances for the super-exponential criteria


def tiny_arc_instance(turns: Sequence, Omega, width_log: float = 48, ctx: PrecisionContext | int | None = 512):
    """Atoms at ``turns`` carrying all but ``e^{-Omega}`` of the mass, plus that mass spread uniformly.

    Returns ``(arcs, measure)`` where ``arcs`` are centred on the atoms with
    length ``e^{-width_log}``, so ``sum 1/log(1/|I|) = len(turns) / width_log``
    and ``rho(T minus arcs) = e^{-Omega} (1 - m(arcs))``.
    """
    from .arcs import Arc, ArcSet

    turns = [to_fraction(t) for t in turns]
    ctx = resolve(ctx)
    with ctx.workprec():
        eps = mpmath.exp(-mpmath.mpf(Omega))
        L = float(mpmath.exp(-mpmath.mpf(width_log)))
        arcs = ArcSet(Arc(2 * mp.pi * mpmath.mpf(t.numerator) / t.denominator - mpmath.mpf(L) / 2, L) for t in turns)
        mu = Measure.atoms(turns, [(1 - eps) / len(turns)] * len(turns)) + Measure.lebesgue(eps)
    return arcs, mu

