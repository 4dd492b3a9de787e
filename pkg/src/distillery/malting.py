"""Resource preparation: squeezed-state generation and memory-based subtraction.

Trajectory model used throughout.  Each failed weak pulse is a
single-arm vacuum event ``T**n`` acting on one memory, which maps a
squeezed vacuum with parameter ``x`` to one with ``x T``.  Success is a
simultaneous click on both arms, ``sqrt(1 - T**2) T**n a`` per arm.
After ``f`` failures the heralded state is ``sum (n+1) mu**n |nn>``
with ``x = lam T**f`` and ``mu = x T**2``, and the joint probability of
the whole trajectory is

    P_f = (1 - T**2)**2 x**2 (1 - lam**2) (1 + mu**2) / (1 - mu**2)**3 .

:func:`kraus_trajectory_prob` recomputes ``P_f`` by applying those Kraus
operators to a truncated two-mode state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .entanglement import subtracted_logneg, tmss_logneg
from .errors import DomainError
from .fock import DEFAULT_EPS_TRUNC, SchmidtPureState, subtracted_state


@dataclass(frozen=True)
class MaltingParams:
    lam: float
    T: float

    def __post_init__(self):
        if not 0.0 <= self.lam < 1.0:
            raise DomainError(f"lambda must lie in [0, 1), got {self.lam}")
        if not 0.0 < self.T <= 1.0:
            raise DomainError(f"T must lie in (0, 1], got {self.T}")

    @property
    def eta(self) -> float:
        return 1.0 - self.T

    def x(self, f: int) -> float:
        return self.lam * self.T**f

    def mu(self, f: int) -> float:
        return self.lam * self.T ** (f + 2)


@dataclass(frozen=True)
class MaltingOutcome:
    """Result of one malting run.

    ``f`` counts failed pulses before the double click.  A failed run
    (cap exhausted) has ``succeeded=False``, ``f`` equal to the cap
    and no state.
    """

    f: int
    x: float
    mu: float
    trajectory_prob: float
    state: Optional[SchmidtPureState]
    succeeded: bool = True


def tmss_generation_prob(lam: float) -> float:
    if not 0.0 <= lam < 1.0:
        raise DomainError(f"lambda must lie in [0, 1), got {lam}")
    return 1.0 - lam * lam


def subtraction_prob(params: MaltingParams, f: int) -> float:
    """Joint probability of ``f`` vacuum events then a double click."""
    if f < 0:
        raise DomainError("f must be >= 0")
    x = params.x(f)
    mu = params.mu(f)
    return (
        (1 - params.T**2) ** 2
        * x * x
        * (1 - params.lam**2)
        * (1 + mu * mu)
        / (1 - mu * mu) ** 3
    )


def subtraction_probs(params: MaltingParams, f_max: int) -> np.ndarray:
    """``[P_0, ..., P_{f_max}]`` in one vectorized pass."""
    if f_max < 0:
        raise DomainError("f_max must be >= 0")
    f = np.arange(f_max + 1)
    x = params.lam * params.T**f
    mu = x * params.T**2
    return (1 - params.T**2) ** 2 * x**2 * (1 - params.lam**2) * (1 + mu**2) / (1 - mu**2) ** 3


def cumulative_prob(params: MaltingParams, f: int) -> float:
    """Probability of succeeding within the first ``f + 1`` pulses."""
    return float(math.fsum(subtraction_probs(params, f)))


def kraus_trajectory_prob(params: MaltingParams, f: int, truncation: int = 60) -> float:
    """``P_f`` from explicit Kraus operators on a truncated two-mode state."""
    if f < 0:
        raise DomainError("f must be >= 0")
    n = np.arange(truncation + 1)
    lam, t = params.lam, params.T
    psi = np.diag(math.sqrt(1 - lam * lam) * lam**n)  # psi[a, b], normalized TMSS
    vacuum = np.diag(t**n.astype(float))
    lower = np.diag(np.sqrt(n[1:].astype(float)), k=1)  # annihilation operator
    click = math.sqrt(1 - t * t) * vacuum @ lower
    for _ in range(f):
        psi = vacuum @ psi  # one failed pulse on Alice's memory
    psi = click @ psi @ click.T
    return float(np.sum(psi * psi))


def cubic_root(lam: float) -> float:
    """Unique root in (0, 1) of ``r**3 + (1-2 lam) r**2 + (2-lam) r - lam``.

    The subtracted state with ``mu = R`` is exactly as entangled as the
    squeezed vacuum with parameter ``lam``.
    """
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")

    def cubic(r):
        return r**3 + (1 - 2 * lam) * r**2 + (2 - lam) * r - lam

    lo, hi = cubic(0.0), cubic(1.0)
    if not (lo < 0 < hi):
        raise DomainError("cubic has no sign change on (0, 1)")
    return brentq(cubic, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)


@dataclass(frozen=True)
class MaxAttempts:
    """Attempt threshold.  ``f_c`` is ``math.inf`` for a lossless splitter."""

    f_c: float
    root: float
    asymptotic: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.f_c)


def max_attempts(params: MaltingParams) -> MaxAttempts:
    """Largest ``f`` whose subtracted state still beats the squeezed vacuum.

    Uses ``floor(log(R / lam) / log T) - 2``; the small-``eta`` form
    ``floor(log(lam / R) / eta) - 2`` is returned alongside.  ``f_c`` may
    be negative, meaning that not even the first attempt pays off.
    """
    if params.lam == 0:
        raise DomainError("lambda = 0 gives no entangled resource")
    root = cubic_root(params.lam)
    if params.T == 1.0:
        return MaxAttempts(math.inf, root, math.inf)
    exact = math.floor(math.log(root / params.lam) / math.log(params.T)) - 2
    approx = math.floor(math.log(params.lam / root) / params.eta) - 2
    return MaxAttempts(exact, root, approx)


def outcome_for(params: MaltingParams, f: int, eps_trunc: float = DEFAULT_EPS_TRUNC,
                truncation: Optional[int] = None) -> MaltingOutcome:
    mu = params.mu(f)
    return MaltingOutcome(
        f=f,
        x=params.x(f),
        mu=mu,
        trajectory_prob=subtraction_prob(params, f),
        state=subtracted_state(mu, truncation, eps_trunc),
    )


def sample_attempts(
    params: MaltingParams, cap: int, size: int, seed: Optional[int] = None
) -> np.ndarray:
    """Draw ``size`` trajectory lengths; ``-1`` marks no success by ``cap``."""
    probs = subtraction_probs(params, cap)
    fail = max(0.0, 1.0 - probs.sum())
    rng = np.random.default_rng(seed)
    draws = rng.choice(cap + 2, size=size, p=np.append(probs, fail) / (probs.sum() + fail))
    return np.where(draws == cap + 1, -1, draws)


def malt(
    params: MaltingParams,
    f: Optional[int] = None,
    seed: Optional[int] = None,
    cap: Optional[int] = None,
    eps_trunc: float = DEFAULT_EPS_TRUNC,
) -> MaltingOutcome:
    """Prepare a resource, either at a fixed ``f`` or by sampling.

    With ``f=None`` the number of failed pulses is drawn from ``P_f``
    restricted to ``f <= cap`` (default: the threshold ``f_c``).  A run
    that never succeeds comes back with ``succeeded=False``.
    """
    if f is not None:
        if f < 0:
            raise DomainError("f must be >= 0")
        return outcome_for(params, f, eps_trunc)
    if cap is None:
        fc = max_attempts(params).f_c
        if not math.isfinite(fc) or fc < 0:
            raise DomainError("sampling needs a finite, non-negative cap")
        cap = int(fc)
    drawn = int(sample_attempts(params, cap, 1, seed)[0])
    if drawn < 0:
        return MaltingOutcome(cap, params.x(cap), params.mu(cap),
                              1.0 - cumulative_prob(params, cap), None, succeeded=False)
    return outcome_for(params, drawn, eps_trunc)


def averaged_gain(params: MaltingParams, baseline: str = "tmss") -> float:
    """``P_bar_{f_c} N_{f_c} / (P_bar_0 N_base)``.

    ``baseline="tmss"`` divides by the squeezed vacuum's negativity (the
    entanglement one starts from); ``"first_attempt"`` divides by the
    negativity of the state heralded at ``f = 0``.
    """
    if params.T >= 1.0:
        raise DomainError("T = 1 never clicks; the gain is undefined")
    fc = max_attempts(params).f_c
    if fc < 0:
        raise DomainError(f"no attempt beats the squeezed vacuum (f_c = {fc})")
    fc = int(fc)
    if baseline == "tmss":
        base = tmss_logneg(params.lam)
    elif baseline == "first_attempt":
        base = subtracted_logneg(params.mu(0))
    else:
        raise DomainError(f"unknown baseline {baseline!r}")
    return cumulative_prob(params, fc) * subtracted_logneg(params.mu(fc)) / (
        cumulative_prob(params, 0) * base
    )
