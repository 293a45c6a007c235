"""
Minimal models and their orbits
===============================

p-adic descent on the resultant, then the family [x^3 - c^2 y^3 : xy^2]
whose minimal models split into one GL(2,Z)-orbit per positive divisor of c.
"""

from minred.dynamics import EndoModel, conjugate, model_height
from minred.forms import IntegerMatrix2
from minred.minimal import all_minimal_orbits, p_minimal_model, reduced_model, vp

# a non-minimal model: conjugate a minimal one by diag(3, 1)
p = 3
f = conjugate(EndoModel([1, 0, -p], [0, 1, 0]), IntegerMatrix2(p, 0, 0, 1))
trace = []
g, gamma = p_minimal_model(f, p, trace)
print(f, " v_3(Res) =", vp(f.resultant, p))
for step, v0, v1, ok in trace:
    print(f"  try {step}: {v0} -> {v1}", "accepted" if ok else "")
print("minimal:", g, " v_3(Res) =", vp(g.resultant, p), " via", gamma)

print()
for c in (1, 2, 4, 6, 12, 30):
    f = EndoModel([1, 0, 0, -c * c], [0, 0, 1, 0])
    orbits = all_minimal_orbits(f)
    print(f"c = {c:2d}: {len(orbits)} orbits")
    for rep, M in orbits:
        print("    ", rep, "  matrix", M)

# smallest height across the orbits
h, gamma, report = reduced_model(EndoModel([1, 0, 0, -36], [0, 0, 1, 0]))
print("\nreduced model for c = 6:", h, " height", model_height(h))
for row in report.orbits:
    print("   orbit of", row["representative"], "-> height", row["height"])
