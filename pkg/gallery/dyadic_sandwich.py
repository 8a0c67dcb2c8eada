"""Tail sums bracketing e_{2^n}^2 for a convex combination of dyadic root measures."""
import argparse
from fractions import Fraction

from szegolab.constructions import TailSequence, dyadic_root_measure, dyadic_sandwich
from szegolab.measures import moments
from szegolab.precision import PrecisionContext, to_mpf
from szegolab.szego import en_profile


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--levels", type=int, default=10, help="number of dyadic levels K")
    p.add_argument("--ratio", type=Fraction, default=Fraction(1, 2), help="geometric ratio of the masses")
    args = p.parse_args()
    K = args.levels
    ctx = PrecisionContext(128)
    a = TailSequence.geometric(args.ratio, K)
    top = min(K - 1, 6)
    prof = en_profile(moments(dyadic_root_measure(a, K), 1 << top, ctx=ctx), 1 << top, ctx)
    print(f"{'n':>3} {'2^n':>5} {'lower':>12} {'e^2':>12} {'upper':>12}")
    with ctx.workprec():
        for n in range(1, top + 1):
            lo, hi = dyadic_sandwich(a, K, n)
            e2 = prof[1 << n].e_n_squared
            print(f"{n:3d} {1 << n:5d} {float(lo):12.5e} {float(e2):12.5e} {float(hi):12.5e}"
                  f"{'' if to_mpf(lo) < e2 < to_mpf(hi) else '  outside'}")


if __name__ == "__main__":
    main()
