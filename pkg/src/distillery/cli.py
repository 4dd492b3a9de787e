"""Command-line front end: ``distillery {malt,distill,budget,figure,state}``.

Settings are resolved as flags > ``--config`` JSON file > defaults.
Tabular data goes to ``--out`` (or stdout); a short human summary goes
to stderr.  Exit codes: 0 success, 2 bad input, 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from . import figures
from .budget import MuConvention, max_iterations
from .decoherence import dephase, embed_pure
from .entanglement import logneg_mixed, logneg_pure, subtracted_logneg
from .errors import DistilleryError, DomainError
from .fock import (
    DEFAULT_EPS_TRUNC,
    SchmidtPureState,
    load_state,
    state_to_json,
    subtracted_state,
    tmss,
)
from .malting import (
    MaltingParams,
    averaged_gain,
    cumulative_prob,
    malt,
    max_attempts,
    subtraction_probs,
)
from .mashing import iterate, limiting_state

REFERENCE_BUDGET = {"lam": 0.15, "T": 0.75, "B": 20000.0, "i_m": 54}


@dataclass
class RunConfig:
    lam: float = 0.2
    T: float = 0.99
    v: float = 0.0
    B: float = 20000.0
    iterations: int = 3
    eps_trunc: float = DEFAULT_EPS_TRUNC
    seed: Optional[int] = None
    output_path: Optional[str] = None
    format: str = "csv"
    mu_convention: str = MuConvention.WORST_CASE_FC.value

    def validate(self) -> "RunConfig":
        if not 0 < self.eps_trunc <= 1e-6:
            raise DomainError("eps_trunc must lie in (0, 1e-6]")
        if self.format not in ("csv", "json"):
            raise DomainError(f"unknown format {self.format!r}")
        if self.v < 0:
            raise DomainError("v must be >= 0")
        if self.iterations < 0:
            raise DomainError("iterations must be >= 0")
        MuConvention(self.mu_convention)
        return self


# flag dest -> RunConfig field, and the JSON config keys accepted for each
_FIELD_FOR_KEY = {
    "lambda": "lam", "lam": "lam", "T": "T", "v": "v", "B": "B",
    "iters": "iterations", "iterations": "iterations",
    "eps_trunc": "eps_trunc", "seed": "seed", "out": "output_path",
    "output_path": "output_path", "format": "format", "mu_convention": "mu_convention",
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        for key, val in doc.items():
            if key not in _FIELD_FOR_KEY:
                raise DomainError(f"unknown config key {key!r}")
            values[_FIELD_FOR_KEY[key]] = val
    for key, name in _FIELD_FOR_KEY.items():
        val = getattr(args, key, None)
        if val is not None:
            values[name] = val
    known = {f.name for f in fields(RunConfig)}
    cfg = RunConfig(**{k: v for k, v in values.items() if k in known})
    return cfg.validate()


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda", dest="lambda", type=float, help="initial squeezing")
    parser.add_argument("--T", type=float, help="weak-beamsplitter transmissivity")
    parser.add_argument("--v", type=float, help="dephasing strength per round")
    parser.add_argument("--B", type=float, help="time-bandwidth product")
    parser.add_argument("--iters", type=int, help="mashing rounds")
    parser.add_argument("--eps-trunc", dest="eps_trunc", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output file (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--mu-convention", dest="mu_convention",
                        choices=[c.value for c in MuConvention])
    parser.add_argument("--config", help="JSON file with default settings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="distillery", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("malt", help="attempt threshold and subtraction probabilities")
    _common(p)

    p = sub.add_parser("distill", help="malt a resource and run mashing rounds")
    _common(p)

    p = sub.add_parser("budget", help="iterations affordable within B clock cycles")
    _common(p)
    p.add_argument("--curve", action="store_true", help="emit the cost curve instead")

    p = sub.add_parser("figure", help="regenerate figure data")
    p.add_argument("name", choices=sorted(figures.FIGURES))
    p.add_argument("--truncation", type=int, help="Fock cutoff (default 60 / 40)")
    p.add_argument("--gnuplot", help="also write a gnuplot script here")
    _common(p)

    p = sub.add_parser("state", help="write or inspect state files")
    p.add_argument("action", choices=("dump", "load"))
    p.add_argument("path", nargs="?", help="state file to load")
    p.add_argument("--resource", choices=("tmss", "subtracted", "limit"), default="tmss")
    p.add_argument("--mixed", action="store_true", help="dump as a density matrix")
    _common(p)
    return parser


def _emit(cfg: RunConfig, header, rows, doc, stdout) -> None:
    if cfg.format == "json":
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = figures.write_csv(header, rows)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text, encoding="utf-8", newline="\n")
    else:
        stdout.write(text)


def cmd_malt(cfg: RunConfig, stdout, stderr) -> None:
    params = MaltingParams(cfg.lam, cfg.T)
    th = max_attempts(params)
    if not th.bounded:
        raise DomainError("T = 1 never clicks; the attempt threshold is unbounded")
    fc = int(th.f_c)
    header = ("f", "x", "mu", "P_f", "P_bar_f", "logneg")
    rows = []
    if fc >= 0:
        probs = subtraction_probs(params, fc)
        for f, p in enumerate(probs):
            mu = params.mu(f)
            rows.append((f, params.x(f), mu, float(p), cumulative_prob(params, f),
                         subtracted_logneg(mu)))
    gain = averaged_gain(params) if fc >= 0 else None
    p_bar = cumulative_prob(params, fc) if fc >= 0 else 0.0
    print(f"f_c = {fc}", file=stderr)
    print(f"R = {th.root:.15g}  (small-eta estimate f_c ~ {th.asymptotic})", file=stderr)
    print(f"P_bar_c = {p_bar:.6g}", file=stderr)
    if gain is not None:
        print(f"averaged gain = {gain:.6g}", file=stderr)
    doc = {
        "lambda": cfg.lam, "T": cfg.T, "f_c": fc, "R": th.root,
        "f_c_asymptotic": th.asymptotic, "P_bar_c": p_bar, "averaged_gain": gain,
        "table": [dict(zip(header, r)) for r in rows],
    }
    _emit(cfg, header, rows, doc, stdout)


def cmd_distill(cfg: RunConfig, stdout, stderr) -> None:
    params = MaltingParams(cfg.lam, cfg.T)
    th = max_attempts(params)
    if not th.bounded or th.f_c < 0:
        raise DomainError(f"no usable attempt threshold (f_c = {th.f_c})")
    if cfg.seed is None:
        outcome = malt(params, f=int(th.f_c), eps_trunc=cfg.eps_trunc)
    else:
        outcome = malt(params, seed=cfg.seed, cap=int(th.f_c), eps_trunc=cfg.eps_trunc)
        if not outcome.succeeded:
            raise DomainError(f"malting failed within {int(th.f_c) + 1} attempts (seed {cfg.seed})")
    trace = iterate(outcome.state, cfg.iterations, dephasing_v=cfg.v)
    probs = (1.0,) + trace.heralding_probs
    cum = (1.0,) + trace.cumulative_probs
    header = ("round", "logneg", "heralding_prob", "cumulative_prob")
    rows = [(k, trace.negativities[k], probs[k], cum[k]) for k in range(trace.rounds + 1)]
    print(f"resource: f = {outcome.f}, mu = {outcome.mu:.6g}, P_f = {outcome.trajectory_prob:.6g}",
          file=stderr)
    print(f"logneg: resource {trace.negativities[0]:.6f} -> final {trace.negativities[-1]:.6f}",
          file=stderr)
    doc = {"f": outcome.f, "mu": outcome.mu, "P_f": outcome.trajectory_prob, "v": cfg.v,
           "rounds": [dict(zip(header, r)) for r in rows]}
    _emit(cfg, header, rows, doc, stdout)


def cmd_budget(cfg: RunConfig, stdout, stderr, curve: bool = False) -> None:
    params = MaltingParams(cfg.lam, cfg.T)
    reports = {c: max_iterations(params, cfg.B, c) for c in MuConvention}
    header = ("mu_convention", "f_c", "f_eff", "mu", "P_bar_c", "p_s_inf", "i_m", "feasible")
    rows = [(c.value, int(r.f_c), r.f_eff, r.mu, r.P_bar_c, r.p_s_inf,
             r.i_m if math.isinf(r.i_m) else int(r.i_m), r.feasible)
            for c, r in reports.items()]
    for c, r in reports.items():
        flag = "" if r.feasible else "  [infeasible: B below the cost of a single resource]"
        print(f"{c.value}: i_m = {r.i_m} (f_c = {int(r.f_c)}, operations per resource = "
              f"{r.f_eff}, mu = {r.mu:.6g}){flag}", file=stderr)
    ref = REFERENCE_BUDGET
    if (math.isclose(cfg.lam, ref["lam"]) and math.isclose(cfg.T, ref["T"])
            and math.isclose(cfg.B, ref["B"])):
        for c, r in reports.items():
            print(f"reference i_m = {ref['i_m']}; {c.value} gives {r.i_m} "
                  f"(difference {r.i_m - ref['i_m']:+d})", file=stderr)
    chosen = reports[MuConvention(cfg.mu_convention)]
    doc = {c.value: {**{k: v for k, v in asdict(r).items() if k != "lhs_curve"},
                     "mu_convention": c.value, "lhs_curve": [list(p) for p in r.lhs_curve]}
           for c, r in reports.items()}
    if curve:
        header = ("i", "cost", "within_budget")
        rows = [(i, cost, cost <= cfg.B) for i, cost in chosen.lhs_curve]
    _emit(cfg, header, rows, doc, stdout)


def cmd_figure(cfg: RunConfig, name: str, truncation: Optional[int], gnuplot: Optional[str],
               stdout, stderr) -> None:
    if name == "fig3":
        header, rows = figures.fig3(truncation=truncation or 60)
    elif name == "fig4":
        header, rows = figures.fig4(convention=cfg.mu_convention)
    elif name == "fig6":
        header, rows = figures.fig6(truncation=truncation or 40)
    else:
        raise DomainError(f"unknown figure {name!r}")
    doc = {"figure": name, "columns": list(header), "rows": [list(r) for r in rows]}
    _emit(cfg, header, rows, doc, stdout)
    if gnuplot:
        Path(gnuplot).write_text(figures.gnuplot_stub(name, cfg.output_path or f"{name}.csv"),
                                 encoding="utf-8")
    print(f"{name}: {len(rows)} rows", file=stderr)


def cmd_state(cfg: RunConfig, action: str, path: Optional[str], resource: str, mixed: bool,
              stdout, stderr) -> None:
    if action == "load":
        if not path:
            raise DomainError("state load needs a path")
        state = load_state(path)
        if isinstance(state, SchmidtPureState):
            print(f"pure state, truncation {state.truncation}, norm^2 {state.norm2:.17g}, "
                  f"logneg {logneg_pure(state).log_negativity:.17g}", file=stdout)
        else:
            print(f"mixed state, truncation {state.truncation}, trace {state.trace:.17g}, "
                  f"logneg {logneg_mixed(state).log_negativity:.17g}", file=stdout)
        return
    if resource == "tmss":
        state = tmss(cfg.lam, eps_trunc=cfg.eps_trunc)
    else:
        state = subtracted_state(cfg.lam, eps_trunc=cfg.eps_trunc)
        if resource == "limit":
            state = limiting_state(state)
    normalized = False
    if mixed:
        state = dephase(embed_pure(state), cfg.v)
        normalized = True
    text = state_to_json(state, normalized)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text, encoding="utf-8", newline="\n")
    else:
        stdout.write(text)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "malt":
            cmd_malt(cfg, stdout, stderr)
        elif args.command == "distill":
            cmd_distill(cfg, stdout, stderr)
        elif args.command == "budget":
            cmd_budget(cfg, stdout, stderr, curve=args.curve)
        elif args.command == "figure":
            cmd_figure(cfg, args.name, args.truncation, args.gnuplot, stdout, stderr)
        elif args.command == "state":
            cmd_state(cfg, args.action, args.path, args.resource, args.mixed, stdout, stderr)
    except (DistilleryError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except (AssertionError, RuntimeError) as exc:
        print(f"internal error: {exc}", file=stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
