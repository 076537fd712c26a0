"""Exact Crofton integral against the density for the curve germs of the
gallery, with a Monte Carlo estimate of the integral as a sanity check."""
import argparse
import time

from pdens.cone import sc_multiplicity
from pdens.crofton import crofton_monte_carlo, verify_crofton
from pdens.dsl import default_group
from pdens.gallery import GERMS

ap = argparse.ArgumentParser()
ap.add_argument("--samples", type=int, default=300)
args = ap.parse_args()

for g in GERMS:
    if "crofton" not in g.tags:
        continue
    X = g.build()
    t = time.time()
    check = verify_crofton(X, g.point)
    dt = time.time() - t
    phi = sc_multiplicity(X, g.point, default_group(X)).step_function()
    mc = crofton_monte_carlo(phi, g.point, samples=args.samples)
    print(f"{g.name:>12} p={g.p} density={check.lhs} crofton={check.rhs} "
          f"equal={check.equal} mc~{mc:.3f} cells={check.report.cells_evaluated} ({dt:.2f}s)")
