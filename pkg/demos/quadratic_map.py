"""
Smallest-height conjugate of a quadratic map
============================================

f = [50x^2 + 795xy + 2120y^2 : 265x^2 + 106y^2].  Its fixed-point form is a
stable cubic, so it drives the search; reducing that cubic alone is cheaper
but lands on a worse model.
"""

from minred.dynamics import EndoModel, model_height, period_form, reduce_fixed_form, reduced_conjugate
from minred.forms import act, UnimodularMatrix

f = EndoModel([50, 795, 2120], [265, 0, 106])
print("f =", f, " height", model_height(f), " Res", f.resultant)

phi = period_form(f, 1)
print("fixed-point form:", phi)

gamma, h, stats = reduced_conjugate(f)
print("\nsearch on the model itself")
print("  gamma =", gamma, " f^gamma =", h)
print("  height", model_height(h))
print("  bound", round(stats.initial_bound, 4), "->", round(stats.final_bound, 4),
      "after", stats.nodes_expanded, "nodes")

gamma2, h2, stats2 = reduce_fixed_form(f)
print("\nsearch on the fixed-point form only")
print("  gamma =", gamma2, " f^gamma =", h2)
print("  height", model_height(h2))
print("  bound", round(stats2.initial_bound, 4), "->", round(stats2.final_bound, 4),
      "after", stats2.nodes_expanded, "nodes")

# the form-optimal shift makes the cubic small, not the map
print("  phi shifted by x -> x - y:", act(phi, UnimodularMatrix(1, -1, 0, 1)))
