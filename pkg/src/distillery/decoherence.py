"""Phenomenological dephasing of states held in the memories."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidStateError
from .fock import SchmidtCorrelatedDensity, SchmidtPureState, normalize

# Exponent prefactor applied to (n - m)**2 * v**2 on the Schmidt sector.
#   "collective": rho_{pq;rs} * exp(-(p+q-r-s)**2 v**2 / 2) with p=q=n, r=s=m,
#                 which gives exp(-2 (n-m)**2 v**2).
#   "schmidt-index": exp(-(n-m)**2 v**2 / 2), i.e. the same Gaussian applied
#                 to the Schmidt index difference (v rescaled by 2).
DEPHASING_CONVENTIONS = {"collective": 2.0, "schmidt-index": 0.5}


@dataclass(frozen=True)
class DephasingParams:
    v: float
    convention: str = "collective"

    def __post_init__(self):
        if self.v < 0:
            raise DomainError(f"dephasing strength must be >= 0, got {self.v}")
        if self.convention not in DEPHASING_CONVENTIONS:
            raise DomainError(f"unknown dephasing convention {self.convention!r}")


def dephasing_factors(truncation: int, v: float, convention: str = "collective") -> np.ndarray:
    params = DephasingParams(v, convention)
    n = np.arange(truncation + 1)
    diff2 = (n[:, None] - n[None, :]) ** 2
    return np.exp(-DEPHASING_CONVENTIONS[params.convention] * diff2 * params.v**2)


def dephase(
    rho: SchmidtCorrelatedDensity, v: float, convention: str = "collective"
) -> SchmidtCorrelatedDensity:
    """Damp the coherences ``c_nm`` by a Gaussian in ``n - m``.

    The diagonal (and hence the trace) is untouched: the factor is
    exactly 1 there.
    """
    if v == 0:
        DephasingParams(v, convention)
        return rho
    return SchmidtCorrelatedDensity(
        rho.cmat * dephasing_factors(rho.truncation, v, convention), rho.tail_bound
    )


def embed_pure(psi: SchmidtPureState) -> SchmidtCorrelatedDensity:
    """Rank-one density ``c = alpha alpha^T`` of the normalized state."""
    if psi.norm2 <= 0:
        raise InvalidStateError("cannot embed the zero state")
    unit, _ = normalize(psi)
    return SchmidtCorrelatedDensity(np.outer(unit.coeffs, unit.coeffs), unit.tail_bound)
