"""Spectra of the density-weighted Laplacian on balls.

The operator -e^{-+r^2} div(e^{+-r^2} grad psi) is unitarily
equivalent to the oscillator -Laplace + r^2 shifted by +-n, so every
weighted level should match an oscillator level plus or minus the
dimension.  The two signs diverge in the large-ball limit: with the
growing density e^{+r^2} the ratio of the first two levels decreases
toward (lambda2 - n is pinned while lambda1 - n grows slower), while
with the decaying density e^{-r^2} the bottom level slides to zero and
the ratio blows up.
"""

import numpy as np

from ppwlab.gaussian import ratio_limits, solve_gaussian

print("shift relation on the unit planar disk")
for sign, shift in (("plus", +2), ("minus", -2)):
    g = solve_gaussian(sign, 2, 1.0, k=2)
    print(f"  sign={sign:5s}  levels {g.lambda1_pm:12.8f} "
          f"{g.lambda2_pm:12.8f}   oscillator {shift:+d}: "
          f"{g.crosscheck1:12.8f} {g.crosscheck2:12.8f}   "
          f"max dev {max(g.deviation1, g.deviation2):.1e}")

# exact anchors: (1 - r^2) e^{-r^2/2} solves the planar oscillator on
# the unit disk with eigenvalue 6, so the weighted levels are 8 and 4
g = solve_gaussian("plus", 2, 1.0, k=1)
print(f"  closed-form check: lambda1(+) = {g.lambda1_pm:.12f} (exact 8)")

print("\nratio across radii")
R = np.array([0.5, 1.0, 2.0, 4.0])
tab = ratio_limits("plus", 2, R)
print("  growing density, ratio decreasing:",
      np.array2string(tab.ratio, precision=5))
for r in R[1:]:
    g = solve_gaussian("minus", 2, float(r), k=2)
    print(f"  decaying density R={r:3.1f}: lambda1 = {g.lambda1_pm:.3e}, "
          f"ratio = {g.ratio:.3e}")
