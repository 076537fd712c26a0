"""Branch-count multiplicities against the deformation-set enclosure."""
import argparse

from pdens.cone import sc_cross_check, sc_multiplicity
from pdens.dsl import default_group
from pdens.gallery import germ

ap = argparse.ArgumentParser()
ap.add_argument("--depth", type=int, default=12)
args = ap.parse_args()

cases = [("squares", (1,)), ("squares", (2,)), ("evenval", (5,)), ("parabolas", (1, 0)),
         ("graph_pair", (1, 0)), ("ray", (1, 1)), ("ray", (1, 0))]
for name, z in cases:
    g = germ(name)
    X = g.build()
    grp = default_group(X)
    exact = sc_multiplicity(X, g.point, grp).multiplicity_at(z)
    iv = sc_cross_check(X, g.point, grp, z, depth=args.depth)
    print(f"{name:>11} z={z}: exact={exact} in [{float(iv.lo):.9f}, {float(iv.hi):.9f}]"
          f" -> {exact in iv}")
