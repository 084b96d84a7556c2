"""Tabulate the coefficient invariants of the scaled linearly dependent family.

``|alpha|^2 - |beta|^2`` stays at ``1 - |lambda|^2`` and the master relation
returns the prescribed ``c t + d``.  Run with ``python demos/family_invariants.py``.
"""

from __future__ import annotations

import numpy as np

from flowlab.families import LinDepScaled
from flowlab.paths import Poly, Sinusoid

spec = LinDepScaled(lam=0.4, r=Poly((0.4, 0.3)), phi=Sinusoid(0.5, 2.0, 0.0), c=0.7, d=-0.2)
t = np.linspace(0.0, 1.0, 6)
c = spec.coefficients(t)
print("   t    |a|^2-|b|^2    Im(a'conj(a) - b'conj(b))    c t + d")
for row in zip(t, np.abs(c.alpha) ** 2 - np.abs(c.beta) ** 2, c.master, 0.7 * t - 0.2):
    print("{:5.2f}   {:.12f}   {:+.12f}              {:+.4f}".format(*(np.real(v) for v in row)))
