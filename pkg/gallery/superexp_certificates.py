"""Certificates for tiny-arc measures whose e_n decays like e^{-Omega/2}."""
import argparse
from fractions import Fraction

import mpmath

from szegolab.constructions import tiny_arc_instance
from szegolab.potential import certify_capacity, certify_metric_B
from szegolab.precision import PrecisionContext
from szegolab.szego import szego_en


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--degrees", type=int, nargs="+", default=[8, 16])
    p.add_argument("--arcs", type=int, default=2, help="number of tiny arcs (equally spaced)")
    args = p.parse_args()
    ctx = PrecisionContext(512)
    turns = [Fraction(2 * j + 1, 2 * args.arcs) for j in range(args.arcs)]
    print(f"{'n':>3} {'Omega':>6} {'e_n':>11} {'certified':>11} {'2e^-O/2':>11} {'cap':>10} {'status':>10}")
    for n in args.degrees:
        Om = 8 * n
        arcs, mu = tiny_arc_instance(turns, Om, ctx=ctx)
        cert_b = certify_metric_B(arcs, mu, n, Om, ctx=ctx)
        cert_a = certify_capacity(mu, n, direction="A", ctx=ctx)
        e = szego_en(mu, n, ctx).e_n
        with ctx.workprec():
            print(f"{n:3d} {Om:6d} {mpmath.nstr(e, 4):>11} {mpmath.nstr(cert_b.measured['e_n_upper'], 4):>11} "
                  f"{mpmath.nstr(2 * mpmath.exp(-mpmath.mpf(Om) / 2), 4):>11} "
                  f"{cert_a.measured['capacity']:10.3e} {cert_b.status:>10}")


if __name__ == "__main__":
    main()
