"""Entropy of the measure of maximal entropy and the periodic-orbit census.

For the full 2-shift with unit roof the flow entropy is log 2 and the
number of closed orbits of length at most T grows like e^{hT}/(hT).  With
roof 1 on ``a`` and 2 on ``b`` the entropy drops to log of the golden ratio.
"""
import math
from fractions import Fraction
from pathlib import Path

from symflow import Cylinder, growth_table, load_model, mme_flow, s_of_t

MODELS = Path(__file__).parent / "models"

for name in ("g2r1.json", "g2r12.json", "gm.json"):
    m = load_model(MODELS / name)
    res = mme_flow(m.graph, m.roof)
    print(f"{m.name}: h = {res.h:.12g}, base entropy / mean roof = {res.base_entropy / res.mean_roof:.12g}")

m = load_model(MODELS / "g2r1.json")
print("\nT  pi(T)  pi(T) hT e^{-hT}")
for row in growth_table(m.graph, m.roof, 16, 16):
    print(f"{row.T!s:>2} {row.pi:>6} {row.ratio:.4f}")

# orbits through [a] weighted by e^{-hL}: only integer lengths exist
A, eps = Cylinder(("a",)), Fraction(1, 10)
for T in (Fraction(6), Fraction(13, 2)):
    print(f"S({T}) = {s_of_t(m.graph, m.roof, A, T, eps, math.log(2))}")
