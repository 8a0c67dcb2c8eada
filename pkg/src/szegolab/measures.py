"""Measures on the unit circle and their trigonometric moments.

A :class:`Measure` is a weighted mixture of three component kinds: finitely
many atoms, piecewise densities with respect to normalised arc length ``m``,
and truncated Riesz products. Angles inside the measure model are stored as
exact rationals of a full turn (``Fraction``), so roots of unity cancel
exactly; conversion to radians happens only at evaluation time.

Moments follow ``c_m = \\int e^{-i m theta} d rho``. With this convention the
Gram matrix of ``1, t, ..., t^n`` in ``L^2(rho)`` is the Hermitian Toeplitz
matrix ``(c_{k-j})``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np
from mpmath import mp

from .arcs import TWO_PI, Arc, ArcSet, as_arcset
from .precision import PrecisionContext, expj_turns, resolve, to_fraction, to_mpf


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class LacunarityError(ValueError):
    """Frequencies violate ``ell_{j+1} >= 3 ell_j``."""


# --------------------------------------------------------------------------
# components
# --------------------------------------------------------------------------


def _frac_turn(x) -> Fraction:
    t = to_fraction(x)
    return t - math.floor(t)


@dataclass(frozen=True)
class AtomicComponent:
    """Point masses ``sum_j a_j delta_{exp(2 pi i t_j)}``; ``t_j`` in turns."""

    turns: tuple
    masses: tuple

    def __post_init__(self) -> None:
        turns = tuple(_frac_turn(t) for t in self.turns)
        masses = tuple(m if isinstance(m, (Fraction, mpmath.mpf)) else to_fraction(m) for m in self.masses)
        if len(turns) != len(masses):
            raise ValueError("turns and masses differ in length")
        if not turns:
            raise ValueError("atomic component needs at least one atom")
        if any(not (m > 0) for m in masses):
            raise ValueError("atom masses must be strictly positive")
        if len(set(turns)) != len(turns):
            raise ValueError("atom angles must be pairwise distinct")
        object.__setattr__(self, "turns", turns)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def from_radians(cls, angles: Iterable[float], masses: Iterable) -> "AtomicComponent":
        return cls(tuple(Fraction(float(a) / TWO_PI) for a in angles), tuple(masses))

    @property
    def angles(self) -> np.ndarray:
        return np.array([float(t) * TWO_PI for t in self.turns])

    def mass(self):
        if all(isinstance(m, Fraction) for m in self.masses):
            return sum(self.masses, Fraction(0))
        return mpmath.fsum(to_mpf(m) for m in self.masses)

    def moments(self, N: int) -> list:
        out = [mpmath.mpc(0)] * (N + 1)
        out[0] = mpmath.mpc(to_mpf(self.mass()))
        if N == 0:
            return out
        # group atoms by mass so each root-of-unity factor is computed once
        for t, a in zip(self.turns, self.masses):
            a = to_mpf(a)
            if t.denominator <= 4096:
                for m in range(1, N + 1):
                    out[m] += a * _root_cache(m * t)
            else:
                z = expj_turns(-t)
                zm = mpmath.mpc(1)
                for m in range(1, N + 1):
                    zm *= z
                    out[m] += a * zm
        return out

    def rotated(self, phi: Fraction) -> "AtomicComponent":
        return AtomicComponent(tuple(t + phi for t in self.turns), self.masses)


_ROOTS: dict = {}


def _root_cache(t: Fraction):
    """``exp(-2 pi i t)`` memoised per (rational, precision)."""
    r = t - math.floor(t)
    key = (r, mp.prec)
    v = _ROOTS.get(key)
    if v is None:
        if len(_ROOTS) > 200_000:
            _ROOTS.clear()
        v = expj_turns(-r)
        _ROOTS[key] = v
    return v


# density families whose moments are computed in closed form at working precision
CLOSED_FAMILIES = ("constant", "exp_linear", "trig")
QUADRATURE_FAMILIES = ("exp_neg_inv_abs", "callable")


@dataclass(frozen=True)
class DensityPiece:
    """One smooth piece of a density with respect to ``m``.

    Families
    --------
    ``constant``        params ``(value,)``
    ``exp_linear``      params ``(a, b)``: ``exp(a + b (theta - theta_left))``
    ``trig``            params ``((k, c_k), ...)`` with ``c_0`` real; density
                        ``c_0 + 2 Re sum_{k>0} c_k e^{i k theta}``
    ``exp_neg_inv_abs`` params ``(scale, center_turns)``:
                        ``exp(-scale / |theta - center|)``, difference in (-pi, pi]
    ``callable``        params ``(f,)``, ``f`` maps radians (ndarray) to values
    """

    family: str
    params: tuple

    def __post_init__(self) -> None:
        if self.family not in CLOSED_FAMILIES + QUADRATURE_FAMILIES:
            raise ValueError(f"unknown density family {self.family!r}")
        params = tuple(self.params)
        if self.family == "constant":
            v = params[0]
            v = v if isinstance(v, (Fraction, mpmath.mpf)) else to_fraction(v)
            if v < 0:
                raise ValueError("constant density must be nonnegative")
            params = (v,)
        elif self.family == "trig":
            coeffs = tuple((int(k), complex(c) if not isinstance(c, mpmath.mpc) else c) for k, c in params)
            if any(k < 0 for k, _ in coeffs):
                raise ValueError("trig density takes nonnegative frequencies only")
            params = coeffs
        object.__setattr__(self, "params", params)

    @property
    def closed_form(self) -> bool:
        return self.family in CLOSED_FAMILIES

    def evaluate(self, theta: np.ndarray, theta_left: float) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        f = self.family
        if f == "constant":
            return np.full(theta.shape, float(self.params[0]))
        if f == "exp_linear":
            a, b = (float(p) for p in self.params)
            return np.exp(a + b * (theta - theta_left))
        if f == "trig":
            out = np.zeros(theta.shape)
            for k, c in self.params:
                c = complex(c)
                if k == 0:
                    out += c.real
                else:
                    out += 2.0 * np.real(c * np.exp(1j * k * theta))
            return out
        if f == "exp_neg_inv_abs":
            scale, center = float(self.params[0]), float(self.params[1]) * TWO_PI
            d = np.abs(np.mod(theta - center + math.pi, TWO_PI) - math.pi)
            with np.errstate(divide="ignore", over="ignore"):
                return np.where(d > 0, np.exp(-scale / np.where(d > 0, d, 1.0)), 0.0)
        return np.asarray(self.params[0](theta), dtype=float)

    def moment_closed(self, m: int, lo, hi, exact: tuple | None = None) -> mpmath.mpc:
        """``int_lo^hi density(theta) e^{-i m theta} dtheta / 2pi``; lo, hi in turns (mpf).

        ``hi - lo`` is passed separately accurate via the mpf arithmetic of the
        caller, so pieces of length far below double spacing keep full
        relative precision.
        """
        two_pi = 2 * mp.pi
        L = (hi - lo) * two_pi
        th0 = lo * two_pi
        if self.family == "constant":
            if exact is not None and m:
                # rational endpoints: exact phases make full-turn integrals vanish exactly
                return to_mpf(self.params[0]) * _freq_int_exact(-m, *exact)
            return to_mpf(self.params[0]) * _exp_int(0, m, th0, L)
        if self.family == "exp_linear":
            a, b = to_mpf(self.params[0]), to_mpf(self.params[1])
            return mpmath.exp(a) * _exp_int(b, m, th0, L)
        total = mpmath.mpc(0)
        for k, c in self.params:
            c = mpmath.mpc(c)
            if exact is not None:
                f = lambda q: _freq_int_exact(q, *exact)
            else:
                f = lambda q: _exp_int_freq(q, th0, L)
            if k == 0:
                total += c.real * f(-m)
            else:
                total += c * f(k - m) + c.conjugate() * f(-k - m)
        return total


def _exp_int(b, m: int, th0, L):
    """``(1/2pi) int_0^L e^{b x} e^{-i m (th0 + x)} dx`` with expm1 for short L."""
    lam = mpmath.mpc(b, -m)
    pref = mpmath.expj(-m * th0) / (2 * mp.pi)
    if lam == 0:
        return pref * L
    return pref * mpmath.expm1(lam * L) / lam


def _freq_int_exact(k: int, t0: Fraction, t1: Fraction):
    """``(1/2pi) int e^{i k theta} dtheta`` over turns ``[t0, t1]`` with exact phases."""
    if k == 0:
        return mpmath.mpc(to_mpf(t1 - t0))
    d = t1 - t0
    if d.denominator > 1 and d < Fraction(1, 1 << 20):
        # short piece: the expm1 form keeps relative accuracy
        return _exp_int_freq(k, to_mpf(t0) * 2 * mp.pi, to_mpf(d) * 2 * mp.pi)
    return (expj_turns(k * t1) - expj_turns(k * t0)) / mpmath.mpc(0, 2 * mp.pi * k)


def _exp_int_freq(k: int, th0, L):
    """``(1/2pi) int_th0^{th0+L} e^{i k theta} dtheta``."""
    if k == 0:
        return mpmath.mpc(L / (2 * mp.pi))
    lam = mpmath.mpc(0, k)
    return mpmath.expj(k * th0) * mpmath.expm1(lam * L) / lam / (2 * mp.pi)


@dataclass(frozen=True)
class PiecewiseDensityComponent:
    """Density ``breakpoints[i] <= t <= breakpoints[i+1]`` -> ``pieces[i]`` (turns)."""

    breakpoints: tuple
    pieces: tuple

    def __post_init__(self) -> None:
        bps = tuple(to_fraction(b) if not isinstance(b, Fraction) else b for b in self.breakpoints)
        if len(bps) != len(self.pieces) + 1:
            raise ValueError("need exactly one more breakpoint than pieces")
        if any(b1 <= b0 for b0, b1 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if bps[-1] - bps[0] > 1:
            raise ValueError("density pieces span more than one turn")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @classmethod
    def constant(cls, value=1, start=0, stop=1) -> "PiecewiseDensityComponent":
        return cls((to_fraction(start), to_fraction(stop)), (DensityPiece("constant", (value,)),))

    @classmethod
    def step(cls, breakpoints: Sequence, values: Sequence) -> "PiecewiseDensityComponent":
        return cls(tuple(breakpoints), tuple(DensityPiece("constant", (v,)) for v in values))

    def intervals(self):
        for b0, b1, piece in zip(self.breakpoints, self.breakpoints[1:], self.pieces):
            yield b0, b1, piece

    def mass(self, tol: float = 1e-14):
        return self.moments(0, tol)[0].real

    def moments(self, N: int, tol: float = 1e-13) -> list:
        out = [mpmath.mpc(0)] * (N + 1)
        for b0, b1, piece in self.intervals():
            lo, hi = to_mpf(b0), to_mpf(b1)
            if piece.closed_form:
                exact = (b0, b1) if piece.family != "exp_linear" else None
                for m in range(N + 1):
                    out[m] += piece.moment_closed(m, lo, hi, exact)
            else:
                a = float(b0) * TWO_PI
                b = float(b1) * TWO_PI
                vals = quad_moments(lambda th, p=piece, a=a: p.evaluate(th, a), a, b, N, tol)
                for m in range(N + 1):
                    out[m] += mpmath.mpc(vals[m])
        return out

    def evaluate(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape)
        t0 = float(self.breakpoints[0])
        u = np.mod(theta / TWO_PI - t0, 1.0) + t0
        for b0, b1, piece in self.intervals():
            sel = (u >= float(b0)) & (u <= float(b1))
            if sel.any():
                out[sel] = piece.evaluate(theta[sel], float(b0) * TWO_PI)
        return out

    def mass_in(self, arcs: ArcSet, tol: float = 1e-13):
        total = mpmath.mpf(0)
        for b0, b1, piece in self.intervals():
            lo, hi = to_mpf(b0), to_mpf(b1)
            for a in arcs:
                for x0, x1 in _periodic_intersections(lo, hi, a):
                    if piece.closed_form:
                        total += piece.moment_closed(0, x0, x1).real
                    else:
                        f0, f1 = float(x0) * TWO_PI, float(x1) * TWO_PI
                        val = quad_moments(lambda th, p=piece, l=float(b0) * TWO_PI: p.evaluate(th, l), f0, f1, 0, tol)
                        total += mpmath.mpf(val[0].real)
        return total

    def rotated(self, phi: Fraction) -> "PiecewiseDensityComponent":
        pieces = []
        for p in self.pieces:
            if p.family == "trig":
                shift = 2 * math.pi * float(phi)
                pieces.append(DensityPiece("trig", tuple((k, complex(c) * complex(math.cos(k * shift), -math.sin(k * shift))) for k, c in p.params)))
            elif p.family == "exp_neg_inv_abs":
                pieces.append(DensityPiece(p.family, (p.params[0], to_fraction(p.params[1]) + phi)))
            elif p.family == "callable":
                f = p.params[0]
                s = float(phi) * TWO_PI
                pieces.append(DensityPiece("callable", (lambda th, f=f, s=s: f(np.asarray(th) - s),)))
            else:
                pieces.append(p)
        return PiecewiseDensityComponent(tuple(b + phi for b in self.breakpoints), tuple(pieces))


def _periodic_intersections(lo, hi, arc: Arc):
    """Pieces of ``[lo, hi]`` (turns, mpf) inside ``arc`` taken mod 1."""
    if arc.is_full:
        return [(lo, hi)]
    a0 = to_mpf(arc.start) / (2 * mp.pi)
    a1 = a0 + to_mpf(arc.length) / (2 * mp.pi)
    out = []
    k0 = int(mpmath.floor(lo - a1)) - 1
    for k in range(k0, k0 + 4):
        x0 = max(lo, a0 + k)
        x1 = min(hi, a1 + k)
        if x1 > x0:
            out.append((x0, x1))
    return out


@dataclass(frozen=True)
class RieszProductComponent:
    """Density ``prod_j (1 + alpha_j cos(ell_j (theta - shift)))`` (shift in turns)."""

    alphas: tuple
    ells: tuple
    shift: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        alphas = tuple(a if isinstance(a, (Fraction, mpmath.mpf)) else to_fraction(a) for a in self.alphas)
        ells = tuple(int(l) for l in self.ells)
        if len(alphas) != len(ells) or not ells:
            raise ValueError("alphas and ells must be nonempty and of equal length")
        if any(a < -1 or a > 1 for a in alphas):
            raise ValueError("Riesz coefficients must lie in [-1, 1]")
        check_lacunary(ells)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "ells", ells)
        object.__setattr__(self, "shift", to_fraction(self.shift))

    @property
    def truncation_level(self) -> int:
        return len(self.ells) - 1

    @property
    def max_frequency(self) -> int:
        return sum(self.ells)

    def mass(self):
        return Fraction(1)

    def coefficient(self, m: int):
        """Fourier coefficient ``c_m`` of the truncated product (exact up to rounding)."""
        eps = greedy_signed_representation(abs(m), self.ells)
        if eps is None:
            return mpmath.mpc(0)
        val = mpmath.mpf(1)
        for e, a in zip(eps, self.alphas):
            if e:
                val *= to_mpf(a) / 2
        val = mpmath.mpc(val)
        if self.shift and m:
            val *= expj_turns(-m * self.shift)
        return val

    def moments(self, N: int) -> list:
        return [self.coefficient(m) for m in range(N + 1)]

    def evaluate(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float) - float(self.shift) * TWO_PI
        out = np.ones(theta.shape)
        for a, l in zip(self.alphas, self.ells):
            out *= 1.0 + float(a) * np.cos(l * theta)
        return out

    def mass_in(self, arcs: ArcSet):
        total = mpmath.mpf(0)
        Nn = self.max_frequency
        coeffs = self.moments(Nn)
        for a in arcs:
            if a.is_full:
                total += 1
                continue
            th0 = to_mpf(a.start)
            L = to_mpf(a.length)
            acc = mpmath.mpc(L / (2 * mp.pi))
            for m in range(1, Nn + 1):
                c = coeffs[m]
                if c == 0:
                    continue
                # density term c_m e^{-i m theta} + conj(c_m) e^{i m theta}
                acc += c * _exp_int_freq(-m, th0, L) + c.conjugate() * _exp_int_freq(m, th0, L)
            total += acc.real
        return total

    def rotated(self, phi: Fraction) -> "RieszProductComponent":
        return RieszProductComponent(self.alphas, self.ells, self.shift + phi)


def check_lacunary(ells: Sequence[int]) -> None:
    if any(l <= 0 for l in ells):
        raise LacunarityError("frequencies must be positive integers")
    for j in range(len(ells) - 1):
        if ells[j + 1] < 3 * ells[j]:
            raise LacunarityError(
                f"lacunarity violated at pair (ell_{j}, ell_{j + 1}) = ({ells[j]}, {ells[j + 1]}): need ell_{j + 1} >= 3 ell_{j}"
            )


Component = AtomicComponent | PiecewiseDensityComponent | RieszProductComponent


@dataclass(frozen=True)
class Measure:
    """Nonnegative mixture ``sum_i w_i * component_i``."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self) -> None:
        comps = []
        for item in self.components:
            if isinstance(item, (AtomicComponent, PiecewiseDensityComponent, RieszProductComponent)):
                w, c = Fraction(1), item
            else:
                w, c = item
            if not isinstance(w, (Fraction, mpmath.mpf)):
                w = to_fraction(w)
            if w < 0:
                raise ValueError("component weights must be nonnegative")
            comps.append((w, c))
        object.__setattr__(self, "components", tuple(comps))
        if not comps:
            raise ValueError("measure needs at least one component")
        if not (self.total_mass > 0):
            raise ValueError("measure must have positive total mass")

    @classmethod
    def lebesgue(cls, mass=1) -> "Measure":
        return cls(((mass, PiecewiseDensityComponent.constant(1)),))

    @classmethod
    def atoms(cls, turns, masses) -> "Measure":
        return cls(((1, AtomicComponent(tuple(turns), tuple(masses))),))

    @classmethod
    def roots_of_unity(cls, k: int, mass=1) -> "Measure":
        """Uniform measure of total ``mass`` on the k-th roots of unity."""
        m = to_fraction(mass) / k if not isinstance(mass, mpmath.mpf) else mass / k
        return cls.atoms([Fraction(j, k) for j in range(k)], [m] * k)

    @property
    def total_mass(self):
        total = Fraction(0)
        exact = True
        parts = []
        for w, c in self.components:
            cm = c.mass()
            if isinstance(w, Fraction) and isinstance(cm, Fraction):
                total += w * cm
            else:
                exact = False
                parts.append(to_mpf(w) * to_mpf(cm))
        if exact:
            return total
        return to_mpf(total) + mpmath.fsum(parts)

    def __add__(self, other: "Measure") -> "Measure":
        return Measure(self.components + other.components)

    def scaled(self, c) -> "Measure":
        c = c if isinstance(c, (Fraction, mpmath.mpf)) else to_fraction(c)
        return Measure(tuple((c * w, comp) for w, comp in self.components))

    def rotated(self, phi) -> "Measure":
        """Rotate by ``phi`` turns."""
        phi = to_fraction(phi)
        return Measure(tuple((w, comp.rotated(phi)) for w, comp in self.components))

    @property
    def is_atomic(self) -> bool:
        return all(isinstance(c, AtomicComponent) for _, c in self.components)

    def atom_list(self) -> list[tuple[Fraction, object]]:
        """All atoms as ``(turn, weighted mass)``; merges coincident angles."""
        acc: dict = {}
        for w, c in self.components:
            if isinstance(c, AtomicComponent):
                for t, a in zip(c.turns, c.masses):
                    val = w * a if isinstance(w, type(a)) else to_mpf(w) * to_mpf(a)
                    acc[t] = acc[t] + val if t in acc else val
        return sorted(acc.items())

    def mass_in(self, arcs, ctx: PrecisionContext | None = None, tol: float = 1e-13):
        """``rho(E)`` for a closed arc set ``E``."""
        arcs = as_arcset(arcs)
        ctx = resolve(ctx)
        with ctx.workprec():
            if arcs.is_empty:
                return mpmath.mpf(0)
            total = mpmath.mpf(0)
            for w, c in self.components:
                w = to_mpf(w)
                if isinstance(c, AtomicComponent):
                    for t, a in zip(c.turns, c.masses):
                        if _turn_in_arcs(t, arcs):
                            total += w * to_mpf(a)
                elif isinstance(c, PiecewiseDensityComponent):
                    total += w * c.mass_in(arcs, tol)
                else:
                    total += w * c.mass_in(arcs)
            return total

    def mass_outside(self, arcs, ctx: PrecisionContext | None = None, tol: float = 1e-13):
        ctx = resolve(ctx)
        with ctx.workprec():
            return to_mpf(self.total_mass) - self.mass_in(arcs, ctx, tol)

    def density(self, theta) -> np.ndarray:
        """Absolutely continuous part of the density w.r.t. ``m`` (double precision)."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape)
        for w, c in self.components:
            if isinstance(c, (PiecewiseDensityComponent, RieszProductComponent)):
                out += float(w) * c.evaluate(theta)
        return out


def _turn_in_arcs(t: Fraction, arcs: ArcSet) -> bool:
    ang = to_mpf(t) * 2 * mp.pi
    for a in arcs:
        if a.is_full:
            return True
        off = mpmath.fmod(ang - to_mpf(a.start), 2 * mp.pi)
        if off < 0:
            off += 2 * mp.pi
        if off <= to_mpf(a.length):
            return True
    return False


# --------------------------------------------------------------------------
# moments
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentSequence:
    """``c_0 .. c_N`` with ``c_m = int e^{-i m theta} d rho`` and ``c_{-m} = conj(c_m)``."""

    values: tuple
    mantissa_bits: int = 256
    convention: str = "c_m = int exp(-i m theta) d rho"

    @property
    def order(self) -> int:
        return len(self.values) - 1

    @property
    def total_mass(self):
        return self.values[0].real

    def __getitem__(self, m: int):
        if m < 0:
            return self.values[-m].conjugate()
        return self.values[m]

    def __len__(self) -> int:
        return len(self.values)

    def as_complex(self) -> np.ndarray:
        return np.array([complex(v) for v in self.values])

    def truncated(self, n: int) -> "MomentSequence":
        if n > self.order:
            raise ValueError(f"moment order {self.order} is below requested {n}")
        return MomentSequence(self.values[: n + 1], self.mantissa_bits, self.convention)


def moments(measure: Measure, N: int, tol: float = 1e-13, ctx: PrecisionContext | int | None = None) -> MomentSequence:
    """Moments ``c_0..c_N`` of ``measure``.

    Atomic, Riesz and closed-form density contributions are exact to working
    precision; other densities use adaptive Gauss-Legendre quadrature with
    absolute error at most ``tol`` per moment.
    """
    if N < 0:
        raise ValueError("moment order must be nonnegative")
    if not (tol > 0):
        raise ValueError("tol must be positive")
    ctx = resolve(ctx)
    with ctx.workprec():
        out = [mpmath.mpc(0)] * (N + 1)
        for w, c in measure.components:
            w = to_mpf(w)
            if w == 0:
                continue
            if isinstance(c, PiecewiseDensityComponent):
                vals = c.moments(N, tol)
            else:
                vals = c.moments(N)
            for m in range(N + 1):
                out[m] += w * vals[m]
        out[0] = mpmath.mpc(out[0].real)
        return MomentSequence(tuple(out), ctx.mantissa_bits)


GL_ORDER = 24
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


def quad_moments(f: Callable, a: float, b: float, N: int, tol: float = 1e-13, max_panels: int = 1 << 16) -> np.ndarray:
    """``(1/2pi) int_a^b f(theta) e^{-i m theta} dtheta`` for ``m = 0..N``.

    Composite Gauss-Legendre with panel count proportional to the highest
    frequency; panels are doubled until two successive estimates agree to
    ``tol``.
    """
    if not (b > a):
        return np.zeros(N + 1, dtype=complex)
    panels = max(4, int(math.ceil((b - a) * (N + 1) / math.pi)))

    def estimate(k: int) -> np.ndarray:
        edges = np.linspace(a, b, k + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel() * np.asarray(f(x), dtype=float) / TWO_PI
        out = np.empty(N + 1, dtype=complex)
        z = np.exp(-1j * x)
        zm = np.ones_like(z)
        for m in range(N + 1):
            out[m] = np.dot(w, zm)
            zm *= z
        return out

    prev = estimate(panels)
    while True:
        panels *= 2
        cur = estimate(panels)
        err = float(np.max(np.abs(cur - prev)))
        if err <= tol:
            return cur
        if panels >= max_panels:
            raise QuadratureError("density moment quadrature did not converge", err)
        prev = cur


# --------------------------------------------------------------------------
# Riesz products and invariance
# --------------------------------------------------------------------------


def greedy_signed_representation(m: int, ells: Sequence[int]) -> tuple[int, ...] | None:
    """The unique ``eps in {-1,0,1}^{n+1}`` with ``sum eps_j ell_j = m``, or ``None``.

    Lacunarity makes the sum of all smaller frequencies less than half of the
    next one, so the sign of each digit is forced, largest frequency first.
    """
    ells = [int(l) for l in ells]
    check_lacunary(ells)
    eps = [0] * len(ells)
    r = int(m)
    below = [0] * len(ells)
    for j in range(1, len(ells)):
        below[j] = below[j - 1] + ells[j - 1]
    for j in range(len(ells) - 1, -1, -1):
        if abs(r) > below[j]:
            s = 1 if r > 0 else -1
            eps[j] = s
            r -= s * ells[j]
    if r != 0:
        return None
    return tuple(eps)


def riesz_moments(spec: RieszProductComponent, N: int, ctx: PrecisionContext | int | None = None) -> MomentSequence:
    """Moments of the Riesz product up to the order where truncation is faithful."""
    limit = spec.max_frequency
    if N > limit:
        raise ValueError(f"moment order {N} outside the valid range 0..{limit} (sum of ells) for this truncation")
    if N < 0:
        raise ValueError("moment order must be nonnegative")
    ctx = resolve(ctx)
    with ctx.workprec():
        return MomentSequence(tuple(spec.moments(N)), ctx.mantissa_bits)


def invariance_order(measure: Measure | MomentSequence, k: int, tol: float = 1e-20, order: int | None = None,
                     ctx: PrecisionContext | int | None = None) -> bool:
    """Whether all moments ``c_m`` with ``k`` not dividing ``m`` vanish up to ``order``.

    This is the moment form of invariance under rotation by ``2 pi / k``.
    ``order`` defaults to ``4k`` for a measure, or to the full length of a
    supplied moment sequence.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if isinstance(measure, MomentSequence):
        mom = measure
        if order is not None:
            mom = mom.truncated(order)
    else:
        mom = moments(measure, order if order is not None else 4 * k, ctx=ctx)
    with mp.workprec(mom.mantissa_bits):
        c0 = abs(mom.values[0])
        for m in range(1, mom.order + 1):
            if m % k and abs(mom.values[m]) > tol * c0:
                return False
    return True
