# Waiting costs coherence
#
# While the next resource is being prepared the held state dephases.  Past
# some strength v the three distilled rounds no longer beat the plain
# squeezed vacuum.

# %%
import numpy as np

from distillery import subtracted_state, tmss_logneg
from distillery.figures import break_even_v, dephased_negativities

lam = 0.2
for v in np.arange(0.0, 2.01, 0.25):
    negs = dephased_negativities(lam, v, iterations=3, truncation=40)
    print(f"v = {v:4.2f}  " + "  ".join(f"{n:.4f}" for n in negs))
print("TMSS level:", round(tmss_logneg(lam), 4))

# %%
# Where does it cross?  The answer depends on how the Gaussian damping is
# scaled against the photon-number difference, so both scalings are shown.

for conv in ("collective", "schmidt-index"):
    print(conv, [round(break_even_v(l, truncation=40, convention=conv), 3) for l in (0.15, 0.2, 0.25)])
