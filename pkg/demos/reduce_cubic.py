"""
Reducing a binary cubic
=======================

Walk through the smallest-size and smallest-height representatives of
F = -2x^3 + 2x^2y + 3xy^2 + 127y^3 and dump the search tree as an SVG.
Run from the repository root: python demos/reduce_cubic.py
"""

import math

from minred.covariant import covariant_point, eps_fallback, eps_profile, fallback_cosh_bound, recentered_form
from minred.forms import BinaryForm, height_inf, size
from minred.reduce import smallest_representative
from minred.svg import write_tree

F = BinaryForm([-2, 2, 3, 127])
print("F =", F)
print("size", size(F), "height", height_inf(F))

# the covariant point sits inside the fundamental domain already
cov = covariant_point(F)
print("z(F) =", cov.z, " theta =", round(cov.theta, 4))

# move z(F) to j; the growth profile of R around j controls the search radius
F0 = recentered_form(F, cov.z)
for delta in (0.5, 1.0, 2.0, 4.0):
    print(f"  eps_F({delta}) >= {eps_profile(F0, delta):.6g}   (cosh delta)^3 = {math.cosh(delta) ** 3:.6g}")

# the cruder cubic bound, for comparison
print("fallback radius:", round(fallback_cosh_bound(size(F), cov.theta, 3, eps_fallback(F0)), 4))

gamma, G, stats = smallest_representative(F, "euclidean", record=True)
print("\nsmallest size:", size(G), "at gamma =", gamma)
print("  F.gamma =", G)
print("  bound", round(stats.initial_bound, 4), "->", round(stats.final_bound, 4),
      "after", stats.nodes_expanded, "nodes")
write_tree(stats, "cubic_tree.svg", title=str(F))
print("  search tree written to cubic_tree.svg")

gamma, G, stats = smallest_representative(F, "max")
print("\nsmallest height:", height_inf(G), "at gamma =", gamma)
print("  F.gamma =", G)
print("  bound", round(stats.initial_bound, 4), "->", round(stats.final_bound, 4),
      "after", stats.nodes_expanded, "nodes")

# the height minimizer is far from j, which is why the height search is wider
z_min = covariant_point(G).z
print("  z of the minimizer:", z_min, " cosh dist to j:", round((z_min.t**2 + z_min.u**2 + 1) / (2 * z_min.u), 5))
