"""Two-sided bounds for e^2 of truncated Riesz products with frequencies 3^j."""
import argparse
from fractions import Fraction

from szegolab.constructions import riesz_measure
from szegolab.precision import PrecisionContext
from szegolab.szego import szego_en


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--alpha", type=Fraction, default=Fraction(1, 2), help="common factor amplitude in (0, 1]")
    p.add_argument("--factors", type=int, default=5, help="largest number of factors")
    args = p.parse_args()
    ctx = PrecisionContext(256)
    print(f"{'factors':>7} {'N':>5} {'lower':>12} {'e_N^2':>12} {'upper':>12} {'log-integral':>13}")
    for m in range(1, args.factors + 1):
        R = riesz_measure([args.alpha] * m, [3 ** j for j in range(m)])
        e2 = szego_en(R.moments(ctx=ctx), R.N, ctx).e_n_squared
        quad, _ = R.log_density_integral()
        print(f"{m:7d} {R.N:5d} {float(R.lower_bound(ctx)):12.6f} {float(e2):12.6f} "
              f"{float(R.upper_bound(ctx)):12.6f} {quad:13.6f}")


if __name__ == "__main__":
    main()
