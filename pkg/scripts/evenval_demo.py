"""Normalized volumes of the even-valuation set around 0, level by level,
next to the two subsequence limits and the resulting density."""
import argparse
from fractions import Fraction

from pdens.cells import normalize_1d
from pdens.density import local_density, volume_on_ball, volume_on_sphere
from pdens.dsl import Environment, parse

ap = argparse.ArgumentParser()
ap.add_argument("--p", type=int, default=5)
ap.add_argument("--levels", type=int, default=8)
args = ap.parse_args()

env = Environment(args.p)
env.add(parse(f"prime {args.p}; set E = evenval(0);").items[0])
E = env.sets["E"]
q = Fraction(args.p)
print(f"{'n':>3} {'ball * q^n':>12} {'sphere / ((1-1/q) q^-n)':>26}")
for n in range(args.levels):
    b = volume_on_ball(E, 0, n) * q ** n
    s = volume_on_sphere(E, 0, n) * q ** n / (1 - 1 / q)
    print(f"{n:>3} {str(b):>12} {str(s):>26}")
rep = local_density(E, 0)
print("ball limits:", [str(v) for v in rep.theta_ball_sequence.branch_limits()])
print("density:", rep.density)
