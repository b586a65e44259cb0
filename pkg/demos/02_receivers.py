"""The four combining detectors, seen on one noisy symbol pair and in aggregate.

All of them sum per-branch differential products. They differ in how much each
branch counts and whether its correlation angle is rotated out first.
"""

import numpy as np

from mdpsk_div import BranchStatistics, DecisionInput, ReceiverKind, combine, decide
from mdpsk_div.receivers import weights

stats = [BranchStatistics.from_rho(0.9987 * np.exp(0.1526j), 9.0),
         BranchStatistics.from_rho(0.9960 * np.exp(0.2539j), 21.0)]
w = weights(stats)
phases = [s.rho_phase for s in stats]
print("optimum weights:", np.round(w, 4), " angles:", np.round(phases, 4))

rng = np.random.default_rng(0)
n, m = 200_000, 3
c_prev = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
c_prev *= np.sqrt([[s.snr / 2] for s in stats])
c_cur = np.array([s.rho for s in stats])[:, None] * c_prev
noise = rng.standard_normal((4, 2, n)) * np.sqrt(0.5)
r_prev = c_prev + noise[0] + 1j * noise[1]
r_cur = c_cur * np.exp(2j * np.pi * m / 8) + noise[2] + 1j * noise[3]

inp = DecisionInput(r_cur, r_prev, w, phases)
for kind in ReceiverKind:
    m_hat = decide(combine(inp, kind), 8)
    print(f"{kind.name:18s} ({int(kind)}): symbol error rate {np.mean(m_hat != m):.4f}")
print("\nThe phase-correcting receivers (17, 19) beat the ones that ignore the drift (18, 20).")
