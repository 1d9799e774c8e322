"""Constant-roof recoding of a flow whose orbit lengths lie in a lattice.

The two-cycle with roof 1 and 3 has every closed-orbit length in 4Z, so it is
not weakly mixing; it recodes to a single loop with constant roof 4.
"""
from pathlib import Path

from symflow import cycle_lattice, load_model, mme_flow, recode_constant, verify_spectrum

for name in ("twocycle.json", "g2r12.json"):
    m = load_model(Path(__file__).parent / "models" / name)
    lat = cycle_lattice(m.graph, m.roof)
    res = recode_constant(m.graph, m.roof)
    print(f"{m.name}: c = {lat.c}, recoded to {len(res.graph.vertices)} vertices with roof {res.c}")
    print(f"  spectra agree to T=12: {verify_spectrum(m.graph, m.roof, res, 12)}")
    print(f"  entropy {mme_flow(m.graph, m.roof).h:.12g} -> {mme_flow(res.graph, res.roof).h:.12g}")
