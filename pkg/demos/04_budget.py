# How many rounds fit in a memory lifetime?
#
# Each round eats one malted resource, and every resource costs up to
# f_c pulses.  A time-bandwidth product B caps the total.

# %%
from distillery import MaltingParams, max_iterations
from distillery.budget import RamanParams, raman_mapping

params = MaltingParams(0.15, 0.75)
for conv in ("worst_case_fc", "best_case_f0"):
    rep = max_iterations(params, 20000, conv)
    print(conv, "i_m =", rep.i_m, " mu =", round(rep.mu, 5), " p_s_inf =", round(rep.p_s_inf, 5))

# %%
# Lower transmissivity means fewer tolerated misses but a faster click,
# and on balance more rounds.

for T in (0.8, 0.9, 0.95):
    print(T, [max_iterations(MaltingParams(0.2, T), B).i_m for B in (1e3, 1e4, 1e5, 1e6)])

# %%
# A Raman memory sets T through its control pulse.

raman = RamanParams.mode_matched(tau=1e-9, d=1000.0, gamma=2e7, Omega=9e9, Delta_S=6e10,
                                 delta=1e9)
print("C_S, C_BS, T =", raman_mapping(raman))
