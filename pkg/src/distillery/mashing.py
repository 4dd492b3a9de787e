"""Vacuum-heralded mashing: the binomial recursion and its linear-map view.

One mashing round interferes the held state with a fresh resource on a
50:50 beamsplitter per side and keeps the vacuum-heralded branch.  On
Schmidt coefficients this is the lower-triangular map

    alpha'_n = 2**-n * sum_t binom(n, t) alpha_{n-t} resource_t ,

whose diagonal is ``resource_0 / 2**k``.  With ``resource_0 = 1`` the
spectrum is ``{1, 1/2, 1/4, ...}`` whatever the resource, so iterating
converges geometrically (rate 1/2) to the eigenvalue-1 eigenvector.

Weights ``binom(n, k) / 2**n`` come from a halving Pascal triangle, so
nothing overflows even for cutoffs in the hundreds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .decoherence import dephase, embed_pure
from .entanglement import logneg_mixed, logneg_pure
from .errors import DegenerateResourceError, DomainError, TruncationMismatchError
from .fock import SchmidtCorrelatedDensity, SchmidtPureState, normalize


@lru_cache(maxsize=16)
def half_binomial_table(n_max: int) -> np.ndarray:
    """``W[n, k] = binom(n, k) / 2**n`` for ``0 <= k <= n <= n_max``."""
    w = np.zeros((n_max + 1, n_max + 1))
    w[0, 0] = 1.0
    for n in range(1, n_max + 1):
        w[n, 0] = 0.5 * w[n - 1, 0]
        w[n, 1 : n + 1] = 0.5 * (w[n - 1, 1 : n + 1] + w[n - 1, 0:n])
    w.setflags(write=False)
    return w


@lru_cache(maxsize=16)
def _gather_plan(size: int) -> tuple[np.ndarray, np.ndarray]:
    j, k = np.indices((size, size))
    diff = j - k
    lower = diff >= 0
    diff = np.where(lower, diff, 0)
    weights = np.where(lower, half_binomial_table(size - 1)[j, diff], 0.0)
    return weights, diff


def operator_matrix(resource: np.ndarray) -> np.ndarray:
    """Lower-triangular ``M[j, k] = binom(j, k) 2**-j resource[j - k]``."""
    resource = np.asarray(resource)
    weights, diff = _gather_plan(resource.size)
    return weights * resource[diff]


@dataclass(frozen=True)
class MashingOperator:
    resource: SchmidtPureState
    matrix: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        # triangular: the spectrum is the diagonal
        return np.diag(self.matrix).copy()

    def apply(self, coeffs) -> np.ndarray:
        return self.matrix @ np.asarray(coeffs, dtype=float)


def build_operator(psi_0: SchmidtPureState) -> MashingOperator:
    if psi_0.coeffs[0] == 0:
        raise DegenerateResourceError("resource has no vacuum component")
    mat = operator_matrix(psi_0.coeffs)
    mat.setflags(write=False)
    return MashingOperator(psi_0, mat)


def _check_pair(a, b) -> None:
    if a.truncation != b.truncation:
        raise TruncationMismatchError(
            f"truncations differ: {a.truncation} vs {b.truncation}"
        )


def _propagated_tail(above: float, psi: SchmidtPureState, phi: SchmidtPureState) -> float:
    # The heralded projection is a contraction, so input truncation error
    # reaches the output at most as ||psi (x) phi - psi_t (x) phi_t||.
    delta = math.sqrt(psi.tail_bound) * math.sqrt(phi.norm2 + phi.tail_bound) + math.sqrt(
        psi.norm2
    ) * math.sqrt(phi.tail_bound)
    return (math.sqrt(above) + delta) ** 2


def mash_pure(
    psi_i: SchmidtPureState, psi_0: SchmidtPureState
) -> tuple[SchmidtPureState, float]:
    """One vacuum-heralded round on pure Schmidt states.

    Returns the unnormalized output (``alpha_0`` is the product of the
    inputs' ``alpha_0``) and the physical heralding probability
    computed from the normalized inputs.  The output is evaluated up to
    ``2N`` photons so that the probability includes weight that is then
    cut off; that weight goes into ``tail_bound``.
    """
    _check_pair(psi_i, psi_0)
    if np.any(psi_i.coeffs < 0) or np.any(psi_0.coeffs < 0):
        raise DomainError("mashing expects non-negative Schmidt coefficients")
    n = psi_i.truncation
    full = operator_matrix(psi_0.padded(2 * n)) @ psi_i.padded(2 * n)
    denom = psi_i.norm2 * psi_0.norm2
    if denom <= 0:
        raise DomainError("cannot mash the zero state")
    prob = float(np.dot(full, full)) / denom
    above = float(np.dot(full[n + 1 :], full[n + 1 :]))
    return SchmidtPureState(full[: n + 1], _propagated_tail(above, psi_i, psi_0)), prob


def _vacuum_gauge(psi_0: SchmidtPureState) -> np.ndarray:
    a0 = psi_0.coeffs[0]
    if a0 == 0:
        raise DegenerateResourceError("resource has no vacuum component")
    return psi_0.coeffs / a0


def limiting_state_by_iteration(
    psi_0: SchmidtPureState, tol: float = 1e-15, max_rounds: int = 2000
) -> SchmidtPureState:
    """Fixed point found by applying the map until it stops moving."""
    res = _vacuum_gauge(psi_0)
    mat = operator_matrix(res)
    x = res.copy()
    for _ in range(max_rounds):
        nxt = mat @ x
        if np.max(np.abs(nxt - x)) <= tol * np.max(np.abs(nxt)):
            return SchmidtPureState(nxt)
        x = nxt
    raise RuntimeError(f"mashing iteration did not settle within {max_rounds} rounds")


def limiting_state(
    psi_0: SchmidtPureState, verify: bool = False, rtol: float = 1e-9
) -> SchmidtPureState:
    """Eigenvalue-1 eigenvector of the mashing map, with ``alpha_0 = 1``.

    Solved by forward substitution on ``(I - M) x = 0``.  With ``verify``
    the result is cross-checked against plain iteration of the map.
    """
    res = _vacuum_gauge(psi_0)
    n_max = res.size - 1
    w = half_binomial_table(n_max)
    x = np.zeros(n_max + 1)
    x[0] = 1.0
    for n in range(1, n_max + 1):
        t = np.arange(1, n + 1)
        x[n] = np.dot(w[n, t], x[n - t] * res[t]) / (1.0 - 2.0**-n)
    out = SchmidtPureState(x)
    if verify:
        other = limiting_state_by_iteration(psi_0).coeffs
        err = np.max(np.abs(other - x)) / np.max(np.abs(x))
        if err > rtol:
            raise RuntimeError(f"fixed-point solvers disagree (relative error {err:.2e})")
    return out


def mash_mixed(
    rho_i: SchmidtCorrelatedDensity, rho_0: SchmidtCorrelatedDensity, check: bool = True
) -> tuple[SchmidtCorrelatedDensity, float]:
    """One vacuum-heralded round on Schmidt-correlated densities.

    Implements ``c'_{NM} = 2**-(N+M) sum binom(N,n) binom(M,m)
    c_{N-n, M-m} c0_{nm}``.  For each resource row ``n`` the inner sum
    over ``m`` is the pure-state operator built from ``c0[n, :]``, so a
    round costs ``N`` dense matrix products.

    Returns the trace-normalized output and the heralding probability
    (trace of the unnormalized output for trace-normalized inputs).
    """
    _check_pair(rho_i, rho_0)
    if check:
        rho_i.check_psd()
        rho_0.check_psd()
    n_max = rho_i.truncation
    size = 2 * n_max + 1
    dtype = np.result_type(rho_i.cmat, rho_0.cmat)
    ci = np.zeros((size, size), dtype=dtype)
    c0 = np.zeros((size, size), dtype=dtype)
    ci[: n_max + 1, : n_max + 1] = rho_i.cmat / rho_i.trace
    c0[: n_max + 1, : n_max + 1] = rho_0.cmat / rho_0.trace
    w = half_binomial_table(size - 1)
    weights, diff = _gather_plan(size)
    out = np.zeros((size, size), dtype=dtype)
    shifted = np.zeros_like(ci)
    for n in range(n_max + 1):
        row_op = weights * c0[n][diff]
        shifted[:] = 0
        shifted[n:] = ci[: size - n]
        out += w[:, n][:, None] * (shifted @ row_op.T)
    out = 0.5 * (out + out.conj().T)
    prob = float(np.real(np.trace(out)))
    kept = out[: n_max + 1, : n_max + 1]
    kept_tr = float(np.real(np.trace(kept)))
    tail = (prob - kept_tr) / kept_tr + rho_i.tail_bound + rho_0.tail_bound
    return SchmidtCorrelatedDensity(kept / kept_tr, max(tail, 0.0)), prob


@dataclass(frozen=True)
class IterationTrace:
    """States ``psi^0 .. psi^i`` plus per-round heralding probabilities.

    ``negativities[k]`` belongs to ``states[k]``; ``heralding_probs[k]``
    is the success probability of the round that produced
    ``states[k + 1]``.
    """

    states: tuple
    heralding_probs: tuple[float, ...]
    negativities: tuple[float, ...]

    def __post_init__(self):
        if len(self.states) != len(self.negativities) or len(self.states) != len(
            self.heralding_probs
        ) + 1:
            raise ValueError("inconsistent trace lengths")

    @property
    def rounds(self) -> int:
        return len(self.heralding_probs)

    @property
    def cumulative_probs(self) -> tuple[float, ...]:
        return tuple(float(p) for p in np.cumprod(self.heralding_probs))


State = Union[SchmidtPureState, SchmidtCorrelatedDensity]


def _negativity(state: State) -> float:
    if isinstance(state, SchmidtPureState):
        return logneg_pure(state).log_negativity
    return logneg_mixed(state, check=False).log_negativity


def iterate(
    resource: State,
    count: int,
    dephasing_v: float = 0.0,
    v_resource: float = 0.0,
    start: Optional[State] = None,
    convention: str = "collective",
) -> IterationTrace:
    """Run ``count`` mashing rounds against a fixed resource.

    Before every round the held state is dephased with strength
    ``dephasing_v``; the resource is dephased once with ``v_resource``
    (default 0: freshly malted copies are taken as pure).  Without any
    dephasing and with pure inputs the pure-state recursion is used.
    """
    if count < 0:
        raise DomainError("count must be >= 0")
    if dephasing_v < 0 or v_resource < 0:
        raise DomainError("dephasing strengths must be >= 0")
    held = resource if start is None else start
    pure = (
        isinstance(resource, SchmidtPureState)
        and isinstance(held, SchmidtPureState)
        and dephasing_v == 0
        and v_resource == 0
    )
    probs: list[float] = []
    if pure:
        states: list[State] = [held]
        for _ in range(count):
            held, p = mash_pure(held, resource)
            states.append(held)
            probs.append(p)
    else:
        rho_0 = embed_pure(resource) if isinstance(resource, SchmidtPureState) else resource
        rho_0 = dephase(rho_0, v_resource, convention)
        rho = embed_pure(held) if isinstance(held, SchmidtPureState) else held
        states = [rho]
        for _ in range(count):
            rho, p = mash_mixed(dephase(rho, dephasing_v, convention), rho_0, check=False)
            states.append(rho)
            probs.append(p)
    return IterationTrace(
        tuple(states), tuple(probs), tuple(_negativity(s) for s in states)
    )
