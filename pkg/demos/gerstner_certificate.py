"""Run the verification suite on a Gerstner wave and print the report.

The same report is what ``flowlab verify`` writes to JSON.  Run with
``python demos/gerstner_certificate.py [k] [g]``.
"""

from __future__ import annotations

import sys

from flowlab import LabeledFlow, run_suite
from flowlab.verification import suite_passed

k = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
g = float(sys.argv[2]) if len(sys.argv) > 2 else 9.81

flow = LabeledFlow.from_preset("gerstner", k=k, g=g)
reports = run_suite(flow)
for r in reports:
    status = "pass" if r.passed else "FAIL"
    print(f"{r.name:30s} {status}  residual {r.max_residual:.2e} / tol {r.tolerance:.0e}")
print("certified" if suite_passed(reports) else "not certified")
