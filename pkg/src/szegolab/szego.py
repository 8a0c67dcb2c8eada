"""Szego minimum problem: ``e_n(rho)^2 = min int |t^n + q_{n-1} t^{n-1} + ... + q_0|^2 d rho``.

The fast path is the Szego (Levinson) recursion for monic orthogonal
polynomials,

    Phi_{k+1}(z) = z Phi_k(z) - conj(alpha_k) Phi_k^*(z),
    E_{k+1} = E_k (1 - |alpha_k|^2),   E_0 = c_0,

where ``Phi_k^*(z) = z^k conj(Phi_k(1/conj z))`` and ``E_k = e_k^2``. The
independent oracle :func:`brute_force_en` solves the normal equations of the
least-squares problem with a dense solver.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from mpmath import mp

from .measures import Measure, MomentSequence, moments
from .precision import PrecisionContext, expj_turns, mp_str, resolve, to_mpf


class DegenerateError(ArithmeticError):
    """A Toeplitz section lost positive definiteness."""


@dataclass(frozen=True)
class CirclePolynomial:
    """Polynomial ``sum_k coeffs[k] z^k`` with extended-precision coefficients.

    When ``zeros`` is given as ``((angle, multiplicity), ...)`` (radians), the
    polynomial is also known in product form ``lead * prod (z - e^{i angle})^mult``;
    evaluation then uses the product, which stays accurate where the expanded
    coefficients suffer cancellation (for example close to a high-order zero).
    """

    coeffs: tuple
    monic: bool = False
    zeros: tuple | None = None
    lead: complex = 1.0
    mantissa_bits: int = 256
    _np: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        with mp.workprec(self.mantissa_bits):
            cs = [c if isinstance(c, mpmath.mpc) else mpmath.mpc(c) for c in self.coeffs]
        while len(cs) > 1 and cs[-1] == 0 and not self.monic:
            cs.pop()
        if not cs:
            cs = [mpmath.mpc(0)]
        if self.monic and cs[-1] != 1:
            raise ValueError("monic polynomial must have leading coefficient exactly 1")
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "_np", np.array([complex(c) for c in cs]))

    # construction -------------------------------------------------------

    @classmethod
    def monomial(cls, n: int) -> "CirclePolynomial":
        return cls((0,) * n + (1,), monic=True, zeros=None)

    @classmethod
    def from_numpy(cls, coeffs: Sequence[complex], monic: bool = False) -> "CirclePolynomial":
        cs = [mpmath.mpc(complex(c)) for c in coeffs]
        if monic:
            cs[-1] = mpmath.mpc(1)
        return cls(tuple(cs), monic=monic)

    @classmethod
    def from_unimodular_zeros(cls, angles: Sequence, multiplicities: Sequence[int] | None = None,
                              ctx: PrecisionContext | int | None = None) -> "CirclePolynomial":
        """Monic ``prod (z - e^{i angle_j})^{m_j}``; angles in radians or ``Fraction`` turns."""
        ctx = resolve(ctx)
        if multiplicities is None:
            multiplicities = [1] * len(angles)
        with ctx.workprec():
            cs = [mpmath.mpc(1)]
            zeros = []
            for a, m in zip(angles, multiplicities):
                if isinstance(a, Fraction):
                    root = expj_turns(a)
                    rad = float(a) * 2 * np.pi
                else:
                    root = mpmath.expj(to_mpf(a))
                    rad = float(a)
                zeros.append((rad, int(m)))
                for _ in range(int(m)):
                    new = [mpmath.mpc(0)] * (len(cs) + 1)
                    for k, c in enumerate(cs):
                        new[k + 1] += c
                        new[k] -= root * c
                    cs = new
        return cls(tuple(cs), monic=True, zeros=tuple(zeros), mantissa_bits=ctx.mantissa_bits)

    # basic properties ---------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def coefficients(self) -> np.ndarray:
        return self._np.copy()

    def value_at_zero(self):
        return self.coeffs[0]

    def reversed(self) -> "CirclePolynomial":
        """``P^*(z) = z^deg conj(P(1/conj z))``."""
        return CirclePolynomial(tuple(c.conjugate() for c in reversed(self.coeffs)), mantissa_bits=self.mantissa_bits)

    def __mul__(self, other: "CirclePolynomial") -> "CirclePolynomial":
        a, b = self.coeffs, other.coeffs
        bits = max(self.mantissa_bits, other.mantissa_bits)
        out = [mpmath.mpc(0)] * (len(a) + len(b) - 1)
        with mp.workprec(bits):
            for i, x in enumerate(a):
                if x == 0:
                    continue
                for j, y in enumerate(b):
                    out[i + j] += x * y
        zeros = None
        if self.zeros is not None and other.zeros is not None:
            zeros = self.zeros + other.zeros
        return CirclePolynomial(tuple(out), monic=self.monic and other.monic, zeros=zeros,
                                lead=self.lead * other.lead, mantissa_bits=bits)

    # evaluation ----------------------------------------------------------

    def __call__(self, z):
        """Double-precision evaluation at complex points."""
        z = np.asarray(z, dtype=complex)
        if self.zeros is not None:
            out = np.full(z.shape, complex(self.lead))
            for a, m in self.zeros:
                out = out * (z - np.exp(1j * a)) ** m
            return out
        return np.polyval(self._np[::-1], z)

    def on_circle(self, theta) -> np.ndarray:
        return self(np.exp(1j * np.asarray(theta, dtype=float)))

    def log_abs_on_circle(self, theta) -> np.ndarray:
        """``log|P(e^{i theta})|``; product form when zeros are known."""
        theta = np.asarray(theta, dtype=float)
        if self.zeros is not None:
            out = np.full(theta.shape, np.log(abs(complex(self.lead))))
            for a, m in self.zeros:
                d = np.abs(2.0 * np.sin(0.5 * (theta - a)))
                with np.errstate(divide="ignore"):
                    out += m * np.log(d)
            return out
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.on_circle(theta)))

    def evaluate_mp(self, z):
        """Horner evaluation at the current mpmath precision."""
        z = mpmath.mpc(z)
        acc = mpmath.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def sup_on_grid(self, grid: int = 1 << 14) -> float:
        theta = np.arange(grid) * (2 * np.pi / grid)
        return float(np.max(np.abs(self.on_circle(theta))))

    def norm2(self, mom: MomentSequence):
        """``int |P|^2 d rho`` from moments (extended precision)."""
        if mom.order < self.degree:
            raise ValueError(f"need moments up to order {self.degree}, have {mom.order}")
        with mp.workprec(mom.mantissa_bits):
            q = self.coeffs
            d = len(q)
            # sum_{j,k} q_k conj(q_j) conj(c_{k-j}), grouped by lag
            total = mpmath.mpf(0)
            for j in range(d):
                total += abs(q[j]) ** 2 * mom.values[0].real
            for lag in range(1, d):
                s = mpmath.mpc(0)
                for j in range(d - lag):
                    s += q[j + lag] * q[j].conjugate()
                total += 2 * (s * mom.values[lag].conjugate()).real
            return total

    def to_json(self) -> dict:
        with mp.workprec(self.mantissa_bits):
            return {
                "degree": self.degree,
                "monic": self.monic,
                "precision_bits": self.mantissa_bits,
                "coefficients": [[mp_str(c.real), mp_str(c.imag)] for c in self.coeffs],
            }


@dataclass(frozen=True)
class SzegoResult:
    """Outcome of the Szego minimum problem at degree ``n``."""

    n: int
    e_n: mpmath.mpf
    e_n_squared: mpmath.mpf
    extremal: CirclePolynomial
    recursion_coeffs: tuple
    degenerate: bool
    first_singular_index: int | None
    condition_estimate: float
    mantissa_bits: int

    def to_json(self) -> dict:
        with mp.workprec(self.mantissa_bits):
            return {
                "n": self.n,
                "e_n": mp_str(self.e_n),
                "e_n_squared": mp_str(self.e_n_squared),
                "degenerate": self.degenerate,
                "first_singular_index": self.first_singular_index,
                "condition_estimate": self.condition_estimate,
                "precision_bits": self.mantissa_bits,
            }


def _as_moments(source: Measure | MomentSequence, order: int, ctx: PrecisionContext) -> MomentSequence:
    if isinstance(source, MomentSequence):
        if source.order < order:
            raise ValueError(f"moment order {source.order} is below required {order}")
        return source
    return moments(source, order, ctx=ctx)


def gram_toeplitz(mom: MomentSequence, n: int) -> mpmath.matrix:
    """Hermitian Toeplitz matrix ``T[j, k] = c_{k-j}`` of size ``n + 1``."""
    if mom.order < n:
        raise ValueError(f"moment order {mom.order} is below required {n}")
    with mp.workprec(mom.mantissa_bits):
        T = mpmath.matrix(n + 1, n + 1)
        for j in range(n + 1):
            for k in range(n + 1):
                T[j, k] = mom[k - j]
        return T


def _levinson(mom: MomentSequence, n_max: int, ctx: PrecisionContext) -> list[SzegoResult]:
    out: list[SzegoResult] = []
    with ctx.workprec():
        c = mom.values
        c0 = c[0].real
        if not (c0 > 0):
            raise ValueError("total mass must be positive")
        thresh = ctx.degeneracy_threshold * c0
        phi = [mpmath.mpc(1)]
        E = +c0
        alphas: list = []
        singular: int | None = None
        for k in range(n_max + 1):
            if singular is None:
                poly = CirclePolynomial(tuple(phi), monic=True, mantissa_bits=ctx.mantissa_bits)
                out.append(SzegoResult(k, mpmath.sqrt(E), +E, poly, tuple(alphas), False, None,
                                       float(c0 / E), ctx.mantissa_bits))
            else:
                # support is exhausted: z^{k-s} Phi_s still annihilates rho
                poly = CirclePolynomial((0,) * (k - singular) + tuple(phi), monic=True, mantissa_bits=ctx.mantissa_bits)
                out.append(SzegoResult(k, mpmath.mpf(0), mpmath.mpf(0), poly, tuple(alphas), True, singular,
                                       float("inf"), ctx.mantissa_bits))
            if k == n_max or singular is not None:
                continue
            # conj(alpha_k) = <z Phi_k, 1> / E_k
            s = mpmath.mpc(0)
            for j, p in enumerate(phi):
                s += p * c[j + 1].conjugate()
            calpha = s / E
            alpha = calpha.conjugate()
            new = [mpmath.mpc(0)] + phi
            deg = len(phi) - 1
            for j in range(deg + 1):
                new[j] -= calpha * phi[deg - j].conjugate()
            phi = new
            E_new = E * (1 - abs(alpha) ** 2)
            # direct residual is more accurate once |alpha| is close to 1
            E_dir = _residual(phi, c)
            E = E_dir if E_dir > 0 else E_new
            alphas.append(alpha)
            if E <= thresh:
                singular = k + 1
    return out


def _residual(phi: list, c: tuple):
    """``<Phi, z^deg> = sum_j phi_j c_{deg-j}``, equal to ``||Phi||^2`` for the orthogonal Phi."""
    deg = len(phi) - 1
    acc = mpmath.mpc(0)
    for j, p in enumerate(phi):
        acc += p * c[deg - j]
    return acc.real


def en_profile(source: Measure | MomentSequence, n_max: int, ctx: PrecisionContext | int | None = None) -> list[SzegoResult]:
    """``e_0 .. e_{n_max}`` from one recursion sweep."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    ctx = resolve(ctx)
    mom = _as_moments(source, n_max, ctx)
    with ctx.workprec():
        return _levinson(mom, n_max, ctx)


def szego_en(source: Measure | MomentSequence, n: int, ctx: PrecisionContext | int | None = None) -> SzegoResult:
    """Solve the Szego minimum problem at degree ``n``.

    Parameters
    ----------
    source : Measure or MomentSequence
        The measure, or its moments ``c_0 .. c_N`` with ``N >= n``.
    n : int
        Degree of the monic competitor.
    ctx : PrecisionContext or int, optional
        Working precision in bits (default 256).

    Returns
    -------
    SzegoResult
        ``e_n``, the monic extremal polynomial, the recursion coefficients and
        a degeneracy flag. A residual below ``2**(-bits/2) * c_0`` marks the
        Toeplitz section singular; ``first_singular_index`` then names the
        first degree whose minimum is zero.
    """
    return en_profile(source, n, ctx)[-1]


def brute_force_en(source: Measure | MomentSequence, n: int, ctx: PrecisionContext | int | None = None) -> mpmath.mpf:
    """``e_n`` from a dense solve of the least-squares normal equations.

    Purely atomic measures with ``M`` atoms use the finite-sum objective
    ``sum_i a_i |z_i^n + sum_k q_k z_i^k|^2`` directly; when ``M <= n`` the
    minimum is zero (a monic polynomial vanishes on the support).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    ctx = resolve(ctx)
    with ctx.workprec():
        if isinstance(source, Measure) and source.is_atomic:
            return _brute_atomic(source, n, ctx)
        mom = _as_moments(source, n, ctx)
        c0 = mom.values[0].real
        if n == 0:
            return mpmath.sqrt(c0)
        # G[j, k] = int t^k conj(t^j) d rho = conj(c_{k-j})
        A = mpmath.matrix(n, n)
        b = mpmath.matrix(n, 1)
        for j in range(n):
            for k in range(n):
                A[j, k] = mom[k - j].conjugate()
            b[j] = mom[n - j].conjugate()
        try:
            x = mpmath.lu_solve(A, -b)
        except ZeroDivisionError:
            return mpmath.mpf(0)
        val = mom.values[0].real
        for j in range(n):
            val += (b[j].conjugate() * x[j]).real
        if val <= ctx.degeneracy_threshold * c0:
            return mpmath.mpf(0)
        return mpmath.sqrt(val)


def _brute_atomic(measure: Measure, n: int, ctx: PrecisionContext):
    atoms = measure.atom_list()
    c0 = to_mpf(measure.total_mass)
    if len(atoms) <= n:
        return mpmath.mpf(0)
    zs = [expj_turns(t) for t, _ in atoms]
    ws = [to_mpf(a) for _, a in atoms]
    if n == 0:
        return mpmath.sqrt(c0)
    # normal equations of the weighted least-squares system V x = -z^n
    A = mpmath.matrix(n, n)
    b = mpmath.matrix(n, 1)
    pw = [[z ** k for k in range(n + 1)] for z in zs]
    for j in range(n):
        for k in range(n):
            A[j, k] = mpmath.fsum(w * p[k] * p[j].conjugate() for w, p in zip(ws, pw))
        b[j] = mpmath.fsum(w * p[n] * p[j].conjugate() for w, p in zip(ws, pw))
    try:
        x = mpmath.lu_solve(A, -b)
    except ZeroDivisionError:
        return mpmath.mpf(0)
    val = mpmath.fsum(w * abs(p[n] + mpmath.fsum(x[k] * p[k] for k in range(n))) ** 2 for w, p in zip(ws, pw))
    if val <= ctx.degeneracy_threshold * c0:
        return mpmath.mpf(0)
    return mpmath.sqrt(val)


def toeplitz_det_ratio(mom: MomentSequence, n: int):
    """``det T_{n+1} / det T_n`` for Gram sections of sizes ``n+1`` and ``n``; equals ``e_n^2``.

    A singular ``T_n`` means ``e_{n-1} = 0``, hence ``e_n = 0``; zero is returned.
    """
    with mp.workprec(mom.mantissa_bits):
        small = mpmath.det(gram_toeplitz(mom, n - 1)).real if n > 0 else mpmath.mpf(1)
        if small == 0:
            return mpmath.mpf(0)
        return mpmath.det(gram_toeplitz(mom, n)).real / small
