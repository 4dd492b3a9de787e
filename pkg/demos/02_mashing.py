# Mashing: pumping entanglement into one state
#
# Two copies meet on a balanced beamsplitter on each side; if both
# ancilla outputs are empty, the kept modes are more entangled.  Feeding
# fresh resources in round after round approaches a fixed point.

# %%
import numpy as np

from distillery import iterate, limiting_state, logneg_pure, subtracted_state, tmss
from distillery.mashing import build_operator

resource = subtracted_state(0.2, 60)
trace = iterate(resource, 5)
limit = logneg_pure(limiting_state(resource)).log_negativity

for k, n in enumerate(trace.negativities):
    print(f"round {k}: logneg {n:.6f}  (limit {limit:.6f})")
print("heralding probabilities:", np.round(trace.heralding_probs, 5))

# %%
# In matrix form one round is a lower-triangular map whose diagonal is
# 1, 1/2, 1/4, ...  That spectrum is why a handful of rounds is enough.

op = build_operator(subtracted_state(0.2, 8))
print(np.round(op.matrix[:5, :5], 4))
print("eigenvalues:", op.eigenvalues[:6])

# %%
# The squeezed vacuum is already a fixed point: mashing cannot improve it,
# which is why the non-Gaussian resource is needed in the first place.

g = tmss(0.2, 40)
print("TMSS unchanged:", np.allclose(iterate(g, 3).states[-1].coeffs, g.coeffs, atol=1e-14))
