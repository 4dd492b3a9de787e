"""Sweeps that regenerate the data behind the protocol's headline plots.

Every sweep returns ``(header, rows)``.  Rows come back in grid order
no matter how many worker threads evaluate them, and :func:`write_csv`
prints floats with 17 significant digits, so output is byte-stable.

The entanglement sweeps use the ideal subtracted resource ``mu = lam``
(weak-beamsplitter losses switched off) unless a finite ``T`` is given,
in which case the first-attempt value ``mu = lam T**2`` is used.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .budget import MuConvention, max_iterations
from .entanglement import logneg_pure, tmss_logneg
from .fock import subtracted_state, tmss
from .malting import MaltingParams
from .mashing import iterate, limiting_state

FIG3_HEADER = ("lambda", "N_tmss", "N_sub", "N_iter1", "N_iter2", "N_iter3", "N_limit")
FIG4_HEADER = ("lambda", "B", "T", "i_m")
FIG6_HEADER = ("lambda", "v", "iter", "logneg")

FIG3_LAMBDAS = tuple(round(0.05 * k, 2) for k in range(1, 11))
FIG4_LAMBDAS = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3)
FIG4_BS = tuple(float(round(10 ** (3 + 0.5 * k))) for k in range(7))
FIG4_TS = (0.8, 0.9, 0.95)
FIG6_LAMBDAS = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3)
FIG6_VS = tuple(0.25 * k for k in range(9))


def worker_count() -> int:
    env = os.environ.get("DISTILLERY_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def ordered_map(fn: Callable, items: Sequence) -> list:
    workers = min(worker_count(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _resource_mu(lam: float, T: float) -> float:
    return lam * T**2


def fig3_row(lam: float, truncation: int = 60, T: float = 1.0) -> tuple:
    resource = subtracted_state(_resource_mu(lam, T), truncation)
    trace = iterate(resource, 3)
    limit = limiting_state(resource)
    return (
        lam,
        logneg_pure(tmss(lam, truncation)).log_negativity,
        *trace.negativities,
        logneg_pure(limit).log_negativity,
    )


def fig3(lambdas: Iterable[float] = FIG3_LAMBDAS, truncation: int = 60, T: float = 1.0):
    rows = ordered_map(lambda lam: fig3_row(lam, truncation, T), list(lambdas))
    return FIG3_HEADER, rows


def fig4(
    lambdas: Iterable[float] = FIG4_LAMBDAS,
    Bs: Iterable[float] = FIG4_BS,
    Ts: Iterable[float] = FIG4_TS,
    convention: MuConvention | str = MuConvention.WORST_CASE_FC,
):
    grid = [(lam, B, T) for lam in lambdas for B in Bs for T in Ts]

    def point(p):
        lam, B, T = p
        report = max_iterations(MaltingParams(lam, T), B, convention)
        return (lam, B, T, int(report.i_m))

    return FIG4_HEADER, ordered_map(point, grid)


def dephased_negativities(
    lam: float,
    v: float,
    iterations: int = 3,
    truncation: int = 40,
    T: float = 1.0,
    convention: str = "collective",
) -> tuple[float, ...]:
    resource = subtracted_state(_resource_mu(lam, T), truncation)
    return iterate(resource, iterations, dephasing_v=v, convention=convention).negativities


def fig6(
    lambdas: Iterable[float] = FIG6_LAMBDAS,
    vs: Iterable[float] = FIG6_VS,
    iterations: int = 3,
    truncation: int = 40,
    T: float = 1.0,
    convention: str = "collective",
):
    grid = [(lam, v) for lam in lambdas for v in vs]

    def point(p):
        lam, v = p
        negs = dephased_negativities(lam, v, iterations, truncation, T, convention)
        return [(lam, v, k, negs[k]) for k in range(1, iterations + 1)]

    rows = [row for block in ordered_map(point, grid) for row in block]
    return FIG6_HEADER, rows


def break_even_v(
    lam: float,
    iterations: int = 3,
    truncation: int = 40,
    T: float = 1.0,
    convention: str = "collective",
    v_max: float = 10.0,
) -> float:
    """Dephasing strength at which distillation only recovers the squeezed vacuum.

    Returns ``0`` if even noiseless distillation falls short and ``inf``
    if the distilled state stays ahead up to ``v_max``.
    """
    target = tmss_logneg(lam)

    def excess(v):
        return dephased_negativities(lam, v, iterations, truncation, T, convention)[-1] - target

    if excess(0.0) <= 0:
        return 0.0
    if excess(v_max) > 0:
        return math.inf
    return brentq(excess, 0.0, v_max, xtol=1e-8)


FIGURES = {"fig3": fig3, "fig4": fig4, "fig6": fig6}


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(header: Sequence[str], rows: Iterable[Sequence], stream=None) -> str:
    """Write rows as CSV (LF endings, 17-digit floats); returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def gnuplot_stub(name: str, csv_path: str) -> str:
    """Minimal gnuplot script for a figure CSV written by :func:`write_csv`."""
    head = f"set datafile separator ','\nset key autotitle columnhead\nfile = '{csv_path}'\n"
    if name == "fig3":
        body = "plot for [c=2:7] file using 1:c with lines\n"
    elif name == "fig4":
        body = "set logscale x\nplot file using 2:4:3 with points palette\n"
    elif name == "fig6":
        body = "plot for [k=1:3] file using 1:($3==k ? $4 : 1/0):2 with points palette\n"
    else:
        raise KeyError(name)
    return head + body
