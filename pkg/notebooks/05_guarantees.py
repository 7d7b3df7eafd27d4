"""
Recovery guarantees: restricted isometry constants and error-bound constants
============================================================================

The sufficient conditions are inequalities in two D-RIP constants.  This
script evaluates them on the standard worked settings, computes D-RIP
constants by brute force on a tiny instance, and reports the resulting
error bound.
"""

import numpy as np

from optdual import make_rng
from optdual.experiments import remarks_report
from optdual.frames import Frame
from optdual.ripanalysis import (
    GuaranteeParams,
    drip_constant_bruteforce,
    rip_constant_bruteforce,
    sufficient_condition_canonical,
)

report = remarks_report()
print("Parseval, general dual, a=3s, b=12s:  delta_2s <", round(report["parseval_general_dual_delta_2s_threshold"], 4))
for k, v in report["general_frame_delta_8s_thresholds"].items():
    print(f"a=7s, b=8s, {k}:  delta_8s < {v:.4f}")
print("Parseval, canonical dual, rho=1/4:", report["parseval_canonical_condition"])
for k, v in report["parseval_canonical_constants"].items():
    print(f"  c1=29/40, c2=1/10, {k}: C0={v['C0']:.2f}  C1={v['C1']:.2f}")

###############################################################################
# Brute force on a tiny instance: a Parseval 6x8 frame and a near-isometric Phi.
rng = make_rng(3)
Q, _ = np.linalg.qr(rng.standard_normal((8, 6)))
frame = Frame(Q.T)
U, _ = np.linalg.qr(rng.standard_normal((6, 6)))
Phi = U + 0.03 * rng.standard_normal((6, 6))
d2, d4 = (drip_constant_bruteforce(Phi, frame, k) for k in (2, 4))
print(f"\nRIP of Phi: gamma_2={rip_constant_bruteforce(Phi, 2):.4f}; D-RIP: delta_2={d2:.4f}, delta_4={d4:.4f}")
r = sufficient_condition_canonical(GuaranteeParams.from_frame(frame, 1, 1, 4, d2, d4))
print(f"condition holds: {r.condition_holds}; C0={r.C0:.2f}, C1={r.C1:.2f}")
