"""Working-precision handling shared by the extended-precision routines."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

DEFAULT_BITS = 256


@dataclass(frozen=True)
class PrecisionContext:
    """Binary mantissa length used by every mpmath computation."""

    mantissa_bits: int = DEFAULT_BITS

    def __post_init__(self) -> None:
        if int(self.mantissa_bits) < 53:
            raise ValueError("mantissa_bits must be at least 53")

    @property
    def eps(self):
        return mpmath.mpf(2) ** (-self.mantissa_bits)

    @property
    def degeneracy_threshold(self):
        """Relative residual below which a Toeplitz section counts as singular."""
        return mpmath.mpf(2) ** (-(self.mantissa_bits // 2))

    def workprec(self):
        return mp.workprec(self.mantissa_bits)

    @property
    def decimal_digits(self) -> int:
        return int(math.ceil(self.mantissa_bits * math.log10(2))) + 1


def resolve(ctx: PrecisionContext | int | None) -> PrecisionContext:
    if ctx is None:
        return PrecisionContext()
    if isinstance(ctx, PrecisionContext):
        return ctx
    return PrecisionContext(int(ctx))


def to_mpf(x):
    """Convert int, float, Fraction, str or mpf to an mpf at the current precision."""
    if isinstance(x, mpmath.mpf):
        return +x
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, str):
        if "/" in x:
            return to_mpf(Fraction(x))
        return mpmath.mpf(x)
    return mpmath.mpf(x)


def to_fraction(x) -> Fraction:
    """Exact rational from int/Fraction/str; floats via their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not an angle")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        return Fraction(int(man)) * (Fraction(2) ** int(exp))
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def expj_turns(t: Fraction):
    """``exp(2*pi*i*t)`` for a rational ``t``, exact at quarter turns."""
    r = t - math.floor(t)
    if r == 0:
        return mpmath.mpc(1)
    if r == Fraction(1, 2):
        return mpmath.mpc(-1)
    if r == Fraction(1, 4):
        return mpmath.mpc(0, 1)
    if r == Fraction(3, 4):
        return mpmath.mpc(0, -1)
    return mpmath.expjpi(2 * to_mpf(r))


def mp_str(x, digits: int | None = None) -> str:
    """Decimal string of an mpf/mpc/float at full working precision."""
    if digits is None:
        digits = mp.dps + 3
    if isinstance(x, mpmath.mpc):
        return f"{mpmath.nstr(x.real, digits, strip_zeros=False)}{'+' if x.imag >= 0 else '-'}{mpmath.nstr(abs(x.imag), digits, strip_zeros=False)}j"
    if isinstance(x, (int, Fraction)):
        return str(x)
    return mpmath.nstr(mpmath.mpf(x), digits, strip_zeros=False)
