# Preparing the non-Gaussian resource
#
# A squeezed vacuum sits in two memories.  Weak pulses try to knock one
# photon out of each side; every pulse that sees nothing on one arm
# leaves the squeezing a little weaker.  How many misses can we afford?

# %%
import numpy as np

from distillery import MaltingParams, max_attempts, subtracted_logneg, tmss_logneg
from distillery.malting import averaged_gain, cumulative_prob, subtraction_probs

params = MaltingParams(lam=0.2, T=0.99)
th = max_attempts(params)
print("threshold f_c =", th.f_c, " (small-loss estimate:", th.asymptotic, ")")
print("break-even squeezing R =", th.root)

# %%
# Entanglement of the heralded state against the number of misses.  The
# squeezed vacuum we started from is the horizontal line to beat.

baseline = tmss_logneg(params.lam)
for f in (0, 20, 40, int(th.f_c), int(th.f_c) + 1, 80):
    n_f = subtracted_logneg(params.mu(f))
    print(f"f = {f:3d}  mu = {params.mu(f):.5f}  N_f = {n_f:.4f}  beats TMSS: {n_f >= baseline}")

# %%
# Success is rare per pulse but it accumulates.

probs = subtraction_probs(params, int(th.f_c))
print("P_0 =", probs[0], " P_fc =", probs[-1])
print("succeed within f_c pulses:", cumulative_prob(params, int(th.f_c)))

# %%
# The averaged gain weighs the better state against the extra waiting.

for T in (0.75, 0.8, 0.9, 0.95):
    print(T, [round(averaged_gain(MaltingParams(lam, T)), 3) for lam in (0.1, 0.2, 0.3)])
