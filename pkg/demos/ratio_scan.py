"""Eigenvalue ratio of -Laplace + r^2 on growing balls.

The planar free-membrane ratio j_{1,1}^2 / j_{0,1}^2 = 2.539 is the
small-ball limit; as the ball grows the confining term takes over and
the ratio slides down to the oscillator value (n+2)/n.  The gap
margin lambda2 - (1 + 2/n) lambda1 stays nonnegative the whole way,
hitting zero exactly in the oscillator limit.
"""

import numpy as np

from ppwlab.special import ppw_constant
from ppwlab.verify import scan_ratio

for n in (2, 3):
    sc = scan_ratio(n, "power:k=1,alpha=2", 0.5, 6.0, 12)
    print(f"n = {n}:  free-ball constant {ppw_constant(n):.6f}, "
          f"oscillator limit {(n + 2) / n:.6f}")
    print("     R    lambda1    lambda2      ratio     gap margin")
    for R, l1, l2, rat, m in zip(sc.R, sc.lambda1, sc.lambda2,
                                 sc.ratio, sc.eqlambda_margin):
        print(f"  {R:4.1f}  {l1:9.4f}  {l2:9.4f}  {rat:9.6f}  {m:12.4e}")
    assert np.all(np.diff(sc.ratio) <= 1e-8)
    print()
