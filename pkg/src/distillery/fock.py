"""Truncated Fock-space states for two-mode Schmidt-correlated systems.

Pure states are stored as a single Schmidt coefficient sequence
``alpha_n`` (amplitude of ``|n>_A |n>_B``), mixed states as the matrix
``c_nm`` of ``|nn><mm|`` elements.  Pure states are kept unnormalized
with ``alpha_0 = 1`` while they are pushed through the protocol;
:func:`normalize` hands back the discarded squared norm, which is the
heralding probability wherever one is needed.

The module also contains a slow but explicit beamsplitter oracle that
builds the two-mode unitary on every photon-number block and contracts
it against two Schmidt states.  It is the reference the fast binomial
recursion in :mod:`distillery.mashing` is checked against.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .errors import (
    CapacityError,
    DivergentStateError,
    DomainError,
    InvalidDensityError,
    InvalidStateError,
    TruncationMismatchError,
)

DEFAULT_EPS_TRUNC = 1e-12
MAX_AUTO_TRUNCATION = 20000
STATE_SCHEMA = "distillery-state-v1"
ORACLE_MAX_TRUNCATION = 28


def _frozen_array(values, dtype=float, ndim=1) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != ndim:
        raise InvalidStateError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SchmidtPureState:
    """Pure state ``sum_n alpha_n |n>|n>`` truncated at ``n = N``.

    ``tail_bound`` bounds ``sum_{n>N} alpha_n**2`` for the untruncated
    state in the same (unnormalized) gauge as ``coeffs``.
    """

    coeffs: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        arr = _frozen_array(self.coeffs)
        if arr.size == 0:
            raise InvalidStateError("a state needs at least one coefficient")
        if not np.all(np.isfinite(arr)):
            raise InvalidStateError("coefficients must be finite")
        if self.tail_bound < 0 or not math.isfinite(self.tail_bound):
            raise InvalidStateError("tail_bound must be finite and >= 0")
        object.__setattr__(self, "coeffs", arr)

    @property
    def truncation(self) -> int:
        return self.coeffs.size - 1

    @property
    def norm2(self) -> float:
        return float(np.dot(self.coeffs, self.coeffs))

    def padded(self, truncation: int) -> np.ndarray:
        """Coefficients zero-padded (never cut) to the given cutoff."""
        if truncation < self.truncation:
            raise ValueError("padding cannot shrink a state")
        out = np.zeros(truncation + 1)
        out[: self.coeffs.size] = self.coeffs
        return out

    def __len__(self):
        return self.coeffs.size


@dataclass(frozen=True)
class SchmidtCorrelatedDensity:
    """Mixed state ``sum_nm c_nm |nn><mm|`` truncated at ``n, m <= N``."""

    cmat: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        arr = np.array(self.cmat, copy=True)
        if not np.iscomplexobj(arr):
            arr = arr.astype(float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise InvalidDensityError(f"cmat must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidDensityError("cmat entries must be finite")
        scale = max(float(np.max(np.abs(arr))), 1e-300)
        if np.max(np.abs(arr - arr.conj().T)) > 1e-12 * scale:
            raise InvalidDensityError("cmat is not Hermitian")
        if np.min(np.real(np.diag(arr))) < -1e-12 * scale:
            raise InvalidDensityError("cmat has negative diagonal entries")
        arr.setflags(write=False)
        object.__setattr__(self, "cmat", arr)

    @property
    def truncation(self) -> int:
        return self.cmat.shape[0] - 1

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.cmat)))

    def normalized(self) -> "SchmidtCorrelatedDensity":
        tr = self.trace
        if tr <= 0:
            raise InvalidDensityError("cannot normalize a density with zero trace")
        return SchmidtCorrelatedDensity(self.cmat / tr, self.tail_bound / tr)

    def check_psd(self, rtol: float = 1e-10) -> None:
        """Raise unless every eigenvalue is >= ``-rtol * trace``."""
        evals = np.linalg.eigvalsh(self.cmat)
        if evals.min() < -rtol * max(self.trace, 0.0):
            raise InvalidDensityError(
                f"density is not positive semidefinite (min eigenvalue {evals.min():.3e})"
            )


@dataclass(frozen=True)
class BeamsplitterSpec:
    """Real two-port beamsplitter with amplitude transmissivity ``T``.

    Creation operators transform as ``a+ -> T a+ - R b+`` and
    ``b+ -> R a+ + T b+``.  With that sign choice, projecting the second
    output port onto vacuum gives the non-negative amplitudes
    ``T**j * R**k * sqrt(binom(j+k, k))``.
    """

    transmissivity: float
    phase_convention: str = field(default="real-minus-r")

    def __post_init__(self):
        if not 0.0 <= self.transmissivity <= 1.0:
            raise DomainError("transmissivity must lie in [0, 1]")
        if self.phase_convention != "real-minus-r":
            raise DomainError(f"unknown phase convention {self.phase_convention!r}")

    @property
    def reflectivity(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.transmissivity**2))

    @classmethod
    def balanced(cls) -> "BeamsplitterSpec":
        return cls(math.sqrt(0.5))


# ---------------------------------------------------------------- constructors


def normalize(state: SchmidtPureState) -> tuple[SchmidtPureState, float]:
    """Return ``(unit-norm copy, squared norm before rescaling)``."""
    norm2 = state.norm2
    if norm2 <= 0.0:
        raise InvalidStateError("cannot normalize the zero state")
    scale = 1.0 / math.sqrt(norm2)
    return SchmidtPureState(state.coeffs * scale, state.tail_bound / norm2), norm2


def _check_squeezing(value: float, name: str) -> None:
    if value < 0:
        raise DomainError(f"{name} must be >= 0, got {value}")
    if value >= 1:
        raise DivergentStateError(f"{name} must be < 1, got {value}")


def geometric_tails(lam: float, truncation: int) -> tuple[float, float]:
    """Amplitude and squared tails ``sum_{n>N} lam**n``, ``sum_{n>N} lam**(2n)``."""
    k = truncation + 1
    return lam**k / (1.0 - lam), lam ** (2 * k) / (1.0 - lam * lam)


def subtracted_tails(mu: float, truncation: int) -> tuple[float, float]:
    """Tails of ``(n+1) mu**n``: amplitude sum and squared sum beyond ``N``."""
    k = truncation + 1
    amp = mu**k * ((k + 1) - k * mu) / (1.0 - mu) ** 2
    y = mu * mu
    sq = y**k * (k * k * (1 - y) ** 2 + 2 * k * (1 - y) + 1 + y) / (1 - y) ** 3
    return amp, sq


def auto_truncation(
    tails: Callable[[int], tuple[float, float]], eps_trunc: float = DEFAULT_EPS_TRUNC
) -> int:
    """Smallest cutoff whose amplitude and squared tails are both <= eps_trunc.

    The amplitude (l1) tail is included because log-negativity depends on
    ``sum_n alpha_n`` linearly; a squared tail of 1e-12 alone would leave
    negativities wrong at the 1e-6 level.
    """
    if not eps_trunc > 0:
        raise DomainError("eps_trunc must be positive")
    for n in range(MAX_AUTO_TRUNCATION + 1):
        amp, sq = tails(n)
        if amp <= eps_trunc and sq <= eps_trunc:
            return n
    raise DivergentStateError(
        f"no cutoff below {MAX_AUTO_TRUNCATION} reaches tail {eps_trunc}"
    )


def tmss(
    lam: float, truncation: int | None = None, eps_trunc: float = DEFAULT_EPS_TRUNC
) -> SchmidtPureState:
    """Two-mode squeezed vacuum with ``alpha_n = lam**n`` (``alpha_0 = 1``)."""
    _check_squeezing(lam, "lambda")
    if truncation is None:
        truncation = 0 if lam == 0 else auto_truncation(
            lambda n: geometric_tails(lam, n), eps_trunc
        )
    coeffs = lam ** np.arange(truncation + 1, dtype=float)
    return SchmidtPureState(coeffs, geometric_tails(lam, truncation)[1])


def subtracted_state(
    mu: float, truncation: int | None = None, eps_trunc: float = DEFAULT_EPS_TRUNC
) -> SchmidtPureState:
    """Photon-subtracted resource, ``alpha_n = (n + 1) mu**n``."""
    _check_squeezing(mu, "mu")
    if truncation is None:
        truncation = 0 if mu == 0 else auto_truncation(
            lambda n: subtracted_tails(mu, n), eps_trunc
        )
    n = np.arange(truncation + 1, dtype=float)
    return SchmidtPureState((n + 1) * mu**n, subtracted_tails(mu, truncation)[1])


# ------------------------------------------------------- beamsplitter oracle


def beamsplitter_blocks(max_photons: int, bs: BeamsplitterSpec) -> list[np.ndarray]:
    """Matrices of the two-mode beamsplitter on every n-photon block.

    ``blocks[n][m, j] = <m, n-m| U |j, n-j>``.  Columns are generated by
    applying the transformed creation operators one photon at a time,
    which avoids the cancellations of the explicit double-binomial sum.
    Round-off still grows roughly like ``2**(n/2)`` ulps, so the work is
    done in extended precision; blocks stay unitary to ~1e-12 up to
    ``n = 2 * ORACLE_MAX_TRUNCATION``.
    """
    # extended precision keeps accumulated round-off below 1e-14 at n ~ 100
    ld = np.longdouble
    t = ld(bs.transmissivity)
    r = np.sqrt(np.maximum(ld(0), ld(1) - t * t))
    work = [np.ones((1, 1), dtype=ld)]
    for n in range(1, max_photons + 1):
        prev = work[-1]
        m = np.arange(n + 1, dtype=ld)
        up = np.sqrt(m)  # a+ lands on |m> from |m-1>
        stay = np.sqrt(ld(n) - m)  # b+ keeps m, raises the second mode
        block = np.empty((n + 1, n + 1), dtype=ld)
        src = np.zeros(n + 2, dtype=ld)
        for j in range(n + 1):
            # src[m + 1] = amplitude of |m, n-1-m>, padded on both ends
            if j > 0:
                src[1 : n + 1] = prev[:, j - 1]
                block[:, j] = (t * up * src[:-1] - r * stay * src[1:]) / np.sqrt(ld(j))
            else:
                src[1 : n + 1] = prev[:, 0]
                block[:, j] = (r * up * src[:-1] + t * stay * src[1:]) / np.sqrt(ld(n))
        work.append(block)
    return [b.astype(float) for b in work]


def projection_table(
    psi: SchmidtPureState,
    phi: SchmidtPureState,
    bs: BeamsplitterSpec,
    outcome_a: int,
    outcome_b: int,
    blocks: list[np.ndarray] | None = None,
) -> np.ndarray:
    """Full two-mode output table ``C[m_A, m_B]`` after heralding.

    ``psi`` sits in the kept modes (A1, B1), ``phi`` in the ancilla
    modes (A2, B2).  Each side is sent through ``U`` and its ancilla
    output is projected onto ``|outcome_a>`` (Alice) or ``|outcome_b>``
    (Bob).  Inputs are used as given (no normalization), so the squared
    Frobenius norm of the result is the heralding weight.
    """
    if psi.truncation != phi.truncation:
        raise TruncationMismatchError(
            f"truncations differ: {psi.truncation} vs {phi.truncation}"
        )
    n_max = psi.truncation
    if n_max > ORACLE_MAX_TRUNCATION:
        raise CapacityError(
            f"beamsplitter oracle limited to truncation {ORACLE_MAX_TRUNCATION}, got {n_max}"
        )
    top = 2 * n_max
    if outcome_a < 0 or outcome_b < 0:
        raise DomainError("detector outcomes must be >= 0")
    if max(outcome_a, outcome_b) > top:
        raise DomainError(f"outcome exceeds the reachable photon number {top}")
    if blocks is None:
        blocks = beamsplitter_blocks(top, bs)
    table = np.zeros((top + 1, top + 1))
    alpha, beta = psi.coeffs, phi.coeffs
    for n in range(n_max + 1):
        for k in range(n_max + 1):
            total = n + k
            if total < max(outcome_a, outcome_b):
                continue
            block = blocks[total]
            amp_a = block[total - outcome_a, n]
            amp_b = block[total - outcome_b, n]
            table[total - outcome_a, total - outcome_b] += alpha[n] * beta[k] * amp_a * amp_b
    return table


def beamsplitter_vacuum_projection_oracle(
    psi: SchmidtPureState,
    phi: SchmidtPureState,
    bs: BeamsplitterSpec | None = None,
    outcome_a: int = 0,
    outcome_b: int = 0,
) -> Union[SchmidtPureState, np.ndarray]:
    """Reference heralded projection built from explicit unitary blocks.

    Equal outcomes return a :class:`SchmidtPureState` cut back to the
    input truncation; its ``tail_bound`` holds the squared weight that
    landed above the cutoff.  Unequal outcomes break the Schmidt form
    and the raw ``(2N+1, 2N+1)`` table is returned instead.
    """
    bs = BeamsplitterSpec.balanced() if bs is None else bs
    table = projection_table(psi, phi, bs, outcome_a, outcome_b)
    if outcome_a != outcome_b:
        return table
    diag = np.diag(table)
    n_max = psi.truncation
    return SchmidtPureState(diag[: n_max + 1], float(np.dot(diag[n_max + 1 :], diag[n_max + 1 :])))


# ------------------------------------------------------------------ file I/O


def _fmt(x: float) -> str:
    # 17 significant digits round-trips every double
    return format(float(x), ".16e")


def _fmt_list(values) -> str:
    return "[" + ", ".join(_fmt(v) for v in values) + "]"


def state_to_json(
    state: Union[SchmidtPureState, SchmidtCorrelatedDensity], normalized: bool = False
) -> str:
    if isinstance(state, SchmidtPureState):
        kind = "pure"
        body = f'"coefficients": {_fmt_list(state.coeffs)}'
    elif isinstance(state, SchmidtCorrelatedDensity):
        if np.iscomplexobj(state.cmat) and np.any(np.imag(state.cmat) != 0):
            raise InvalidDensityError("complex densities are not serializable in v1")
        kind = "mixed"
        rows = ",\n    ".join(_fmt_list(np.real(row)) for row in state.cmat)
        body = f'"cmat": [\n    {rows}\n  ]'
    else:
        raise TypeError(f"cannot serialize {type(state).__name__}")
    text = (
        "{\n"
        f'  "schema": "{STATE_SCHEMA}",\n'
        f'  "kind": "{kind}",\n'
        f'  "truncation": {state.truncation},\n'
        f"  {body},\n"
        f'  "normalized": {"true" if normalized else "false"},\n'
        f'  "tail_bound": {_fmt(state.tail_bound)}\n'
        "}\n"
    )
    json.loads(text)  # cheap guard against formatting slips
    return text


def state_from_json(text: str) -> Union[SchmidtPureState, SchmidtCorrelatedDensity]:
    doc = json.loads(text)
    if doc.get("schema") != STATE_SCHEMA:
        raise InvalidStateError(f"unsupported schema {doc.get('schema')!r}")
    tail = float(doc.get("tail_bound", 0.0))
    if doc["kind"] == "pure":
        state = SchmidtPureState(doc["coefficients"], tail)
    elif doc["kind"] == "mixed":
        state = SchmidtCorrelatedDensity(np.array(doc["cmat"], dtype=float), tail)
    else:
        raise InvalidStateError(f"unknown state kind {doc['kind']!r}")
    if state.truncation != doc["truncation"]:
        raise InvalidStateError("truncation field disagrees with the data length")
    return state


def save_state(state, path, normalized: bool = False) -> None:
    Path(path).write_text(state_to_json(state, normalized), encoding="utf-8")


def load_state(path) -> Union[SchmidtPureState, SchmidtCorrelatedDensity]:
    return state_from_json(Path(path).read_text(encoding="utf-8"))
