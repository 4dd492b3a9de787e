"""Time-bandwidth accounting and the Raman-memory parameter map.

A run of ``i`` mashing rounds consumes ``i + 1`` malted resources.  In
the worst case each resource costs ``f_c`` memory operations and is
obtained with probability ``P_bar_c``; every round then succeeds with
probability at least ``p_s_inf``.  The largest admissible ``i`` obeys

    (i + 1) f_c / (P_bar_c p_s_inf**i) <= B .

When the exact threshold gives ``f_c = 0`` the left side vanishes for
every ``i``.  By default the attempt count is floored at one operation
per resource (``min_operations=1``), with ``P_bar`` and ``mu`` taken at
that same attempt count.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError, OverCoupledError
from .malting import MaltingParams, cumulative_prob, max_attempts

MAX_SCAN = 1_000_000


class MuConvention(str, Enum):
    WORST_CASE_FC = "worst_case_fc"
    BEST_CASE_F0 = "best_case_f0"


def p_s_infinity(mu: float) -> float:
    """Mashing success probability at the fixed point of a subtracted resource.

    Equals ``1 / sum (n+1)**2 mu**(2n)``, the inverse squared norm of the
    unnormalized resource.
    """
    if not 0.0 <= mu < 1.0:
        raise DomainError(f"mu must lie in [0, 1), got {mu}")
    m2 = mu * mu
    return (1 - m2) ** 3 / (1 + m2)


@dataclass(frozen=True)
class BudgetReport:
    f_c: float
    f_eff: int
    mu: float
    P_bar_c: float
    p_s_inf: float
    i_m: float
    B: float
    mu_convention: MuConvention
    feasible: bool
    trivially_satisfied: bool = False
    lhs_curve: tuple[tuple[int, float], ...] = field(default=(), repr=False)

    def cost(self, i: int) -> float:
        return (i + 1) * self.f_eff / (self.P_bar_c * self.p_s_inf**i)


def iteration_cost(i: int, f_eff: float, p_bar: float, p_s_inf: float) -> float:
    return (i + 1) * f_eff / (p_bar * p_s_inf**i)


def max_iterations(
    params: MaltingParams,
    B: float,
    convention: MuConvention | str = MuConvention.WORST_CASE_FC,
    min_operations: int = 1,
) -> BudgetReport:
    """Largest iteration count affordable within ``B`` clock cycles.

    ``convention`` picks the resource squeezing fed into ``p_s_inf``:
    ``worst_case_fc`` uses ``mu = lam T**(f_eff+2)``, ``best_case_f0``
    uses ``mu = lam T**2``.  If even ``i = 0`` exceeds ``B`` the report
    has ``i_m = 0`` and ``feasible=False``.
    """
    if not B > 0:
        raise DomainError("B must be positive")
    convention = MuConvention(convention)
    if params.T >= 1.0:
        raise DomainError("T = 1 never subtracts; no resource can be malted")
    fc = max_attempts(params).f_c
    if fc < 0:
        raise DomainError(f"no attempt beats the squeezed vacuum (f_c = {fc})")
    f_eff = max(int(fc), min_operations)
    mu = params.mu(f_eff) if convention is MuConvention.WORST_CASE_FC else params.mu(0)
    p_bar = cumulative_prob(params, f_eff)
    ps = p_s_infinity(mu)
    if f_eff == 0:
        warnings.warn("f_c = 0: the cost expression vanishes, any i fits", RuntimeWarning)
        return BudgetReport(fc, 0, mu, p_bar, ps, math.inf, B, convention, True, True)
    curve = []
    i = 0
    while True:
        c = iteration_cost(i, f_eff, p_bar, ps)
        curve.append((i, c))
        if c > B:
            break
        i += 1
        if i > MAX_SCAN:
            raise RuntimeError("iteration scan did not terminate")
    feasible = i > 0
    return BudgetReport(
        fc, f_eff, mu, p_bar, ps, max(i - 1, 0), B, convention, feasible, False, tuple(curve)
    )


@dataclass(frozen=True)
class RamanParams:
    """Raman-memory knobs in SI units.

    tau: pulse duration (s); d: resonant optical depth; gamma:
    excited-state linewidth (rad/s); Omega: control Rabi frequency
    (rad/s); Delta_S / Delta_BS: squeezer / beamsplitter detunings
    (rad/s); delta: Stokes splitting (rad/s).
    """

    tau: float
    d: float
    gamma: float
    Omega: float
    Delta_S: float
    Delta_BS: float
    delta: float = 0.0

    def __post_init__(self):
        for name in ("tau", "d", "gamma", "Delta_S", "Delta_BS"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.Omega < 0 or self.delta < 0:
            raise DomainError("Omega and delta must be >= 0")

    @classmethod
    def mode_matched(cls, tau, d, gamma, Omega, Delta_S, delta) -> "RamanParams":
        return cls(tau, d, gamma, Omega, Delta_S, Delta_S + delta, delta)

    @property
    def is_mode_matched(self) -> bool:
        return math.isclose(self.Delta_BS, self.Delta_S + self.delta, rel_tol=1e-12)


def raman_mapping(params: RamanParams) -> tuple[float, float, float]:
    """Return ``(C_S, C_BS, T_eff)`` with ``C**2 = tau d gamma Omega**2 / Delta**2``."""
    g = params.tau * params.d * params.gamma * params.Omega**2
    cs2 = g / params.Delta_S**2
    cbs2 = g / params.Delta_BS**2
    if cbs2 > 1.0 + 1e-12:
        raise OverCoupledError(f"C_BS**2 = {cbs2:.4g} exceeds 1")
    cbs2 = min(cbs2, 1.0)  # absorb round-off at full retrieval
    return math.sqrt(cs2), math.sqrt(cbs2), math.sqrt(1.0 - cbs2)
