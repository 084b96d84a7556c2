"""Trace a few Kirchhoff particles and show that each orbit is a circle.

Run with ``python demos/kirchhoff_orbits.py``.
"""

from __future__ import annotations

import numpy as np

from flowlab import LabeledFlow, trajectory

flow = LabeledFlow.from_preset("kirchhoff", A=1.0, k=1.0, lam=0.5, c=1.0)
times = np.linspace(0.0, 2 * np.pi, 12, endpoint=False)  # one full period

for a in (-1.0, 1.0, 2.0):
    tr = trajectory(flow, complex(a, 0.0), times)
    centre = complex(tr.x.mean(), tr.y.mean())
    radii = np.abs(tr.x + 1j * tr.y - centre)
    print(f"label a = {a:+.1f}: centre {centre:.4f}, radius {radii.mean():.6f} "
          f"(spread {np.ptp(radii):.1e})")
