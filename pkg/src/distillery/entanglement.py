"""Logarithmic negativity (base 2) for Schmidt-form states.

Two fast paths and one dense reference:

* pure states: ``log2((sum |alpha_n|)**2 / sum alpha_n**2)``;
* Schmidt-correlated mixtures: the partial transpose of
  ``sum c_nm |nn><mm|`` splits into 1x1 blocks ``c_nn`` and 2x2 blocks
  ``[[0, c_nm], [c_mn, 0]]`` on ``{|nm>, |mn>}``, so the trace norm is
  ``sum_n c_nn + 2 sum_{n<m} |c_nm|``;
* :func:`logneg_partial_transpose_oracle` expands the full two-mode
  matrix and eigensolves it; the test-suite ties the fast paths to it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import CapacityError, DomainError, InvalidStateError
from .fock import SchmidtCorrelatedDensity, SchmidtPureState

ORACLE_MAX_TRUNCATION = 64


class NegativityMethod(str, Enum):
    SCHMIDT_CLOSED_FORM = "schmidt_closed_form"
    SCHMIDT_CORRELATED = "schmidt_correlated"
    PARTIAL_TRANSPOSE_ORACLE = "partial_transpose_oracle"


@dataclass(frozen=True)
class NegativityResult:
    log_negativity: float
    method: NegativityMethod

    def __float__(self):
        return self.log_negativity


def _log2_clipped(trace_norm: float) -> float:
    # trace norm of a normalized state is >= 1; round-off can dip below
    return max(0.0, math.log2(trace_norm))


def logneg_pure(state: SchmidtPureState) -> NegativityResult:
    a = np.abs(state.coeffs)
    norm2 = float(np.dot(a, a))
    if norm2 <= 0:
        raise InvalidStateError("log-negativity of the zero state is undefined")
    return NegativityResult(
        _log2_clipped(float(a.sum()) ** 2 / norm2), NegativityMethod.SCHMIDT_CLOSED_FORM
    )


def logneg_mixed(rho: SchmidtCorrelatedDensity, check: bool = True) -> NegativityResult:
    """Closed-form log-negativity of a Schmidt-correlated density.

    The density is trace-normalized internally.  With ``check`` the
    matrix is first tested for positivity (tolerance ``1e-10 * trace``).
    """
    if check:
        rho.check_psd()
    tr = rho.trace
    if tr <= 0:
        raise InvalidStateError("log-negativity of a zero-trace density is undefined")
    upper = np.abs(np.triu(rho.cmat, 1)).sum()
    return NegativityResult(
        _log2_clipped((tr + 2.0 * upper) / tr), NegativityMethod.SCHMIDT_CORRELATED
    )


def expand_to_two_mode(rho: SchmidtCorrelatedDensity) -> np.ndarray:
    """Dense ``(N+1)**2`` square matrix of ``rho`` in the ``|a b>`` basis."""
    d = rho.truncation + 1
    full = np.zeros((d * d, d * d), dtype=rho.cmat.dtype)
    diag_index = np.arange(d) * (d + 1)  # |nn> sits at n*d + n
    full[np.ix_(diag_index, diag_index)] = rho.cmat
    return full


def partial_transpose(full: np.ndarray, d: int) -> np.ndarray:
    """Transpose the second subsystem of a ``d*d`` bipartite operator."""
    t = full.reshape(d, d, d, d)  # [a, b, a', b']
    return t.transpose(0, 3, 2, 1).reshape(d * d, d * d)


def logneg_partial_transpose_oracle(rho: SchmidtCorrelatedDensity) -> NegativityResult:
    if rho.truncation > ORACLE_MAX_TRUNCATION:
        raise CapacityError(
            f"dense oracle limited to truncation {ORACLE_MAX_TRUNCATION}, got {rho.truncation}"
        )
    tr = rho.trace
    if tr <= 0:
        raise InvalidStateError("log-negativity of a zero-trace density is undefined")
    d = rho.truncation + 1
    pt = partial_transpose(expand_to_two_mode(rho), d)
    evals = np.linalg.eigvalsh(pt)
    return NegativityResult(
        _log2_clipped(float(np.abs(evals).sum()) / tr),
        NegativityMethod.PARTIAL_TRANSPOSE_ORACLE,
    )


def tmss_logneg(lam: float) -> float:
    """Closed form ``log2((1 + lam) / (1 - lam))`` for the squeezed vacuum."""
    if not 0 <= lam < 1:
        raise DomainError("lambda must lie in [0, 1)")
    return math.log2((1 + lam) / (1 - lam))


def subtracted_logneg(mu: float) -> float:
    """Closed form for ``sum (n+1) mu**n |nn>``."""
    if not 0 <= mu < 1:
        raise DomainError("mu must lie in [0, 1)")
    return math.log2((1 + mu) ** 3 / ((1 - mu) * (1 + mu * mu)))
