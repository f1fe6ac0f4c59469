"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 model/runtime error.
"""

from __future__ import annotations

import argparse
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import extract, paradox
from .config import (
    ConfigError,
    ScenarioConfig,
    load_config,
    parse_number,
    parse_waveform,
    waveform_section,
)
from .energy import energy_balance
from .oneport import OnePortModel, simulate_current_driven
from .signals import CapacitanceProfile, ModelError
from .twoport import (
    MechanicalCapModel,
    TwoPortModel,
    simulate_state_modulated,
    simulate_two_port,
    simulate_voltage_driven,
)

EXIT_OK, EXIT_USAGE, EXIT_MODEL = 0, 2, 3


class UsageError(Exception):
    pass


def bundled_scenarios() -> list[str]:
    root = resources.files("tvcap") / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".cfg"))


def resolve_scenario(name: str) -> Path:
    """A path on disk, or the name of a bundled scenario (``harvesting``)."""
    p = Path(name)
    if p.exists():
        return p
    fname = name if name.endswith(".cfg") else f"{name}.cfg"
    bundled = resources.files("tvcap") / "scenarios" / fname
    if bundled.is_file():
        return Path(str(bundled))
    return p


def _initial_charge(cfg: ScenarioConfig, C0: float) -> float:
    if "V0" in cfg.values and "Q0" in cfg.values:
        if not math.isclose(cfg.values["Q0"], C0 * cfg.values["V0"], rel_tol=1e-12, abs_tol=1e-15):
            raise ConfigError("Q0 and V0 disagree with C(0)", "V0")
    if "V0" in cfg.values:
        return C0 * cfg.values["V0"]
    return cfg.values.get("Q0", 0.0)


def run_scenario(cfg: ScenarioConfig):
    """Simulate a parsed scenario; returns ``(trajectory, report, lines)``."""
    kind = cfg.kind
    w = cfg.waveforms
    period = cfg.values.get("period")
    if kind == "paradox":
        s = paradox.ParadoxScenario(cfg.number("Q0"), cfg.number("C0"),
                                    cfg.number("T", 1.0), cfg.number("k", 2.0))
        r = paradox.run_paradox(s)
        lines = [f"S_before {r.S_before:.12g} J", f"S_after  {r.S_after:.12g} J",
                 f"W_mech   {r.W_mech:.12g} J", f"residual {r.residual:.3e} J",
                 f"closed-form limit {paradox.closed_form_limit(s):.12g} J"]
        return None, None, lines

    t_end, dt = cfg.number("t_end"), cfg.number("dt")
    if kind == "oneport":
        cap = CapacitanceProfile(w["C"])
        Q0 = _initial_charge(cfg, cap(0.0))
        traj = simulate_current_driven(OnePortModel.from_charge(cap, Q0), w["I"], t_end, dt)
        report = energy_balance(traj, period)
        lines = [f"final V {traj.V[-1]:.12g} V"]
    elif kind == "twoport":
        if "U" in w:
            U, C0 = w["U"], cfg.number("C0")
        else:
            cap = CapacitanceProfile(w["C"])
            U, C0 = cap.rate, cfg.number("C0", cap(0.0))
        Q0 = _initial_charge(cfg, C0)
        traj = simulate_two_port(TwoPortModel(Q0, C0), w["I"], U, t_end, dt)
        report = energy_balance(traj, period)
        lines = [f"final V {traj.V[-1]:.12g} V", f"final C {traj.C[-1]:.12g} F"]
    elif kind == "inductor-dual":
        ind = CapacitanceProfile(w["C"])
        Phi0 = _initial_charge(cfg, ind(0.0))
        dual = simulate_voltage_driven(ind, w["I"], t_end, dt, I0=Phi0 / ind(0.0))
        traj = dual
        report = dual.energy_balance(period)
        lines = [f"final I {dual.I[-1]:.12g} A"]
    elif kind == "mechanical":
        model = MechanicalCapModel(cfg.number("J"), w["C"], cfg.values.get("Q0", 0.0),
                                   cfg.values.get("Theta0", 0.0), cfg.values.get("P0", 0.0))
        mech = simulate_state_modulated(model, w["I"], w["tau"], t_end, dt)
        traj = mech
        report = energy_balance(mech.as_two_port())
        H = mech.hamiltonian()
        lines = [f"H(0) {H[0]:.12g} J", f"H(end) {H[-1]:.12g} J"]
    else:  # pragma: no cover - rejected by the parser
        raise ConfigError(f"unknown kind {kind}", "kind")
    return traj, report, lines


def cmd_simulate(args) -> int:
    cfg = load_config(resolve_scenario(args.config))
    traj, report, lines = run_scenario(cfg)
    print(f"scenario: {cfg.kind} ({args.config})")
    for line in lines:
        print(line)
    if report is not None:
        print(report.summary())
    out = args.out or cfg.out
    if out and traj is not None:
        traj.to_csv(out)
        print(f"trajectory written to {out}")
    if args.report and report is not None:
        report.to_csv(args.report)
    if args.lissajous:
        base = getattr(traj, "base", traj)
        if not hasattr(base, "Cdot"):
            base = traj.as_two_port()
        period = cfg.values.get("period")
        loops = extract.lissajous(base, period)
        loops.to_csv(args.lissajous)
        for k, a in enumerate(loops.loop_areas):
            print(f"loop {k}: closed integral V dQ = {a:.12g} J")
    return EXIT_OK


def _capacitance_arg(spec: str) -> CapacitanceProfile:
    kind, sep, params = spec.partition(":")
    if not sep:
        raise UsageError("--capacitance must look like KIND:PARAMS, e.g. fourier:0.5,2,0,1")
    try:
        return CapacitanceProfile(parse_waveform(kind, params))
    except ValueError as exc:
        raise UsageError(f"--capacitance: {exc}") from None


def cmd_extract(args) -> int:
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    cap = _capacitance_arg(args.capacitance)
    period = parse_number(args.period)
    try:
        problem = extract.ExtractionProblem(cap, period, args.order, steps=args.steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cap.check_positive(0.0, period, period / args.steps)
    form = extract.build_energy_form(problem)
    ref = extract.harvesting_profile()
    ref_norm = float(np.linalg.norm(ref.coefficient_vector())) if args.norm is None else args.norm
    unit = extract.synthesize_extraction_current(problem, 1.0, form)
    best = extract.synthesize_extraction_current(problem, ref_norm, form)

    print(f"period {period:.12g} s, order {problem.order}, steps/period {problem.steps}")
    print(f"verdict: {best.verdict}")
    print(f"{'k':>3s} {'a_k (cos)':>22s} {'b_k (sin)':>22s}")
    for k in range(problem.order):
        print(f"{k + 1:>3d} {best.coefficients[2 * k]:>22.15g} {best.coefficients[2 * k + 1]:>22.15g}")
    print(f"energy per cycle at unit norm      {unit.energy_per_cycle: .12g} J")
    print(f"energy per cycle at norm {ref_norm:.6g}  {best.energy_per_cycle: .12g} J")
    print(f"mean power at norm {ref_norm:.6g}        {best.energy_per_cycle / period: .12g} W")
    if args.out:
        Path(args.out).write_text("[scenario]\n" + waveform_section("I", best.current))
        print(f"current written to {args.out}")
    if args.matrix:
        form.to_csv(args.matrix)
    return EXIT_OK


def cmd_paradox(args) -> int:
    if not args.C0 > 0:
        raise UsageError("--C0 must be positive")
    if not args.k > 0:
        raise UsageError("--k must be positive")
    if any(not T > 0 for T in args.T_sweep):
        raise UsageError("--T-sweep values must be positive")
    rows = paradox.sweep(args.Q, args.C0, args.k, args.T_sweep, steps=args.steps)
    limit = paradox.closed_form_limit(paradox.ParadoxScenario(args.Q, args.C0, 0.0, args.k))
    header = "T,S_before,S_after,W_mech,residual"
    print(header)
    lines = [",".join(f"{v:.17g}" for v in (r.T, r.S_before, r.S_after, r.W_mech, r.residual))
             for r in rows]
    print("\n".join(lines))
    print(f"# closed-form limit (T -> 0): W_mech = {limit:.17g}")
    if args.out:
        Path(args.out).write_text(header + "\n" + "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tvcap", description="Time-varying capacitor energy laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a scenario file and print its energy report")
    s.add_argument("config", help="scenario file, or the name of a bundled scenario")
    s.add_argument("--out", help="trajectory CSV (overrides the file's 'out')")
    s.add_argument("--report", help="energy report CSV")
    s.add_argument("--lissajous", help="(Q, V) CSV; loop areas are printed")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("extract", help="synthesize a worst-case periodic current")
    e.add_argument("--period", required=True, help="capacitance period [s], e.g. 4*pi")
    e.add_argument("--order", type=int, required=True, help="number of harmonics N")
    e.add_argument("--capacitance", required=True, help="KIND:PARAMS, e.g. fourier:0.5,2,0,1")
    e.add_argument("--steps", type=int, default=4096, help="RK4 steps per period")
    e.add_argument("--norm", type=float, help="coefficient norm (default: that of the built-in harvesting profile)")
    e.add_argument("--out", help="write the current as a scenario waveform spec")
    e.add_argument("--matrix", help="write the energy form matrix as CSV")
    e.set_defaults(func=cmd_extract)

    p = sub.add_parser("paradox", help="capacitance ramp at fixed charge, swept over ramp durations")
    p.add_argument("--Q", type=float, default=1.0)
    p.add_argument("--C0", type=float, default=1.0)
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--T-sweep", dest="T_sweep", type=float, nargs="+", default=[1.0, 0.1, 0.01, 0.001])
    p.add_argument("--steps", type=int, default=1000, help="RK4 steps per ramp")
    p.add_argument("--out", help="write the table as CSV")
    p.set_defaults(func=cmd_paradox)

    sub.add_parser("scenarios", help="list bundled scenario files").set_defaults(
        func=lambda args: print("\n".join(bundled_scenarios())) or EXIT_OK)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"tvcap {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"tvcap {args.command}: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ValueError as exc:
        print(f"tvcap {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
