"""Certified bounds on the Bowen-Walters distance and the comparison lemma.

Each distance is returned as an interval [lo, hi]; the lemma inequalities are
checked with the conservative end of each interval.
"""
from fractions import Fraction
from pathlib import Path

from symflow import FlowPoint, SeqPoint, check_bw_lemma, dr_interval, load_model

m = load_model(Path(__file__).parent / "models" / "g2r12.json")
r = m.roof
x = SeqPoint.periodic("ab")
z = FlowPoint(x, Fraction(1, 4))
for w in (FlowPoint(x, Fraction(1, 2)), FlowPoint(SeqPoint.periodic("a"), Fraction(0))):
    for K in (2, 4, 6):
        iv = dr_interval(r, z, w, K)
        print(f"d({z}, {w}) with K={K}: [{iv.lo:.6g}, {iv.hi:.6g}]")
    report = check_bw_lemma(r, z, w, Fraction(1, 2))
    status = "all hold" if all(c.passed for c in report.checks) else "FAILED"
    print(f"  lemma checks: {status}")
