"""Command-line front end.

Each subcommand reads a scenario (preset, config file, ``--set`` overrides),
writes CSV data and a ``summary.txt`` into the output directory and exits
with 0 on success, 2 on configuration errors, 3 when the requested scenario
is infeasible and 4 when a numerical convergence check fails.
"""

import argparse
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import io
from .config import PRESETS, ConfigError, build_config
from .errors import ConvergenceError, DomainError, InfeasibleError, TruncationError

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_CONVERGENCE = 0, 2, 3, 4
OUT_ENV = "DARKSTATE_OUT"


class Infeasible(Exception):
    """Raised by a command to request exit code 3 after writing its outputs."""


# -- shared construction --------------------------------------------------------

def _grid(cfg):
    from .pulses import TimeGrid
    return TimeGrid(cfg.t_start, cfg.t_end, cfg.n_points)


def _pulse(cfg, grid):
    from .pulses import load_pulse_csv, make_pulse
    if cfg.pulse == "file":
        return load_pulse_csv(cfg.pulse_file, grid)
    return make_pulse(cfg.pulse, grid, 1.0, cfg.delay)


def _schedule(cfg, params, grid, pulse):
    from .control import load_schedule_csv, sech_matched_cos_theta, solve_impedance_matching
    if cfg.schedule == "analytic":
        return sech_matched_cos_theta(params, grid)
    if cfg.schedule == "solved":
        start = None if math.isnan(cfg.cos_theta_start) else cfg.cos_theta_start
        return solve_impedance_matching(params, pulse, cos_theta_start=start)
    sched = load_schedule_csv(cfg.schedule_file, params)
    sched.grid.require_same(grid)
    return sched


def _margin_items(report):
    items = {f"margin_{k}": float(v) for k, v in report.ratios.items()}
    items["adiabatic"] = report.ok
    return items


# -- subcommands ----------------------------------------------------------------

def cmd_load(cfg, out):
    from .control import check_adiabaticity, require_feasible
    from .reduced import asymptotic_amplitude, integrate_dark_state
    params = cfg.params()
    grid = _grid(cfg)
    pulse = _pulse(cfg, grid)
    sched = _schedule(cfg, params, grid, pulse)
    sched.to_csv(out / "schedule.csv")
    require_feasible(sched)
    summary = {"command": "load", "pulse": cfg.pulse, "schedule": cfg.schedule}
    if cfg.model in ("reduced", "both"):
        traj = integrate_dark_state(params, pulse, sched)
        traj.to_csv(out / "trajectory.csv")
        summary.update({
            "asymptotic_abs_D": asymptotic_amplitude(traj, cfg.delay, 1.0),
            "abs_D_sq_end": float(traj.population[-1]),
            "reflected_fraction": traj.reflected_energy(),
            "ledger_error": float(np.max(np.abs(traj.ledger() - 1.0))),
        })
    if cfg.model in ("full", "both"):
        from .full import ModeBank, encode_input_modes, integrate_full
        bank = ModeBank.make(params.gamma, 1.0, cfg.delta_max_T, cfg.n_modes)
        full = integrate_full(params, bank, encode_input_modes(pulse, bank), sched)
        full.to_csv(out / "full_trajectory.csv")
        summary["full_abs_D_sq_end"] = float(full.population[-1])
        summary["full_norm_drift"] = float(np.max(np.abs(full.norm - full.norm[0])))
        if cfg.model == "both":
            from .reduced import integrate_dark_state as reduced_run
            ref = reduced_run(params, pulse, sched.with_omega_cap(params, full.omega_cap))
            summary["max_population_deviation"] = float(
                np.max(np.abs(full.population - ref.population)))
    if params.gamma_a > 0:
        summary.update(_margin_items(check_adiabaticity(params, sched, cfg.margin)))
    return summary


def cmd_cycle(cfg, out):
    from .cycle import default_plan, run_cycle, sech_fit
    from .figures import hold_scan
    params = cfg.params()
    plan = default_plan(params, cfg.load_end, cfg.hold, cfg.t_start,
                        (cfg.t_end - cfg.t_start) / (cfg.n_points - 1))
    pulse = _pulse(cfg, plan.load_schedule.grid)
    res = run_cycle(plan, pulse)
    res.to_csv(out / "cycle.csv")
    amp, centre, width, resid = sech_fit(res.release)
    summary = {"command": "cycle", "t_store": res.t0, "t_release": res.t1}
    summary.update({f"ledger_{k}": float(v) for k, v in res.ledger.items()})
    summary.update({"ledger_closure": res.closure, "release_peak_time": res.release.peak_time(),
                    "sech_fit_centre": float(centre), "sech_fit_width": float(width),
                    "sech_fit_residual": resid})
    if cfg.holds:
        holds, released, rate = hold_scan(params, cfg.holds, load_end=cfg.load_end,
                                          t_start=cfg.t_start)
        io.write_csv(out / "hold_scan.csv", ["hold", "released"], [holds, released])
        summary["hold_decay_rate_T"] = rate
        summary["gamma_c_T"] = cfg.gamma_c_T
    return summary


def cmd_synthesize(cfg, out):
    from .control import check_adiabaticity, sech_cos_theta
    params = cfg.params()
    grid = _grid(cfg)
    pulse = _pulse(cfg, grid)
    sched = _schedule(cfg, params, grid, pulse)
    sched.to_csv(out / "schedule.csv")
    summary = {"command": "synthesize", "pulse": cfg.pulse, "schedule": cfg.schedule,
               "feasible": sched.feasible, "clamp_events": sched.clamp_events}
    if sched.window is not None:
        summary["window_start"], summary["window_end"] = sched.window
    if cfg.pulse == "sech" and cfg.delay == 0 and params.gamma_T >= 4:
        ref = sech_cos_theta(grid.times, params.gamma_T)
        summary["max_error_vs_closed_form"] = float(np.max(np.abs(sched.cos_theta - ref)))
    summary.update(_margin_items(check_adiabaticity(params, sched, cfg.margin)))
    if sched.diagnostic:
        summary["diagnostic"] = sched.diagnostic
    if not sched.feasible:
        raise Infeasible(summary)
    return summary


def cmd_fig3(cfg, out):
    from .figures import constant_angle_scan, resample
    params = cfg.params()
    entries = constant_angle_scan(params, cfg.gamma_eff_T, cfg.fig3_dt, cfg.t_start)
    t = np.linspace(cfg.t_start, cfg.t_end, 1001)
    cols, arrs = ["t", "phi_in"], [t, resample(entries[0].times, entries[0].phi_in, t)]
    for e in entries:
        cols.append(f"phi_out_{e.gamma_eff_T:g}")
        arrs.append(np.real(resample(e.times, e.phi_out, t)))
    io.write_csv(out / "fig3.csv", cols, arrs)
    g = [e.gamma_eff_T for e in entries]
    ov = [e.overlap for e in entries]
    wd = [e.tail_width for e in entries]
    io.write_csv(out / "fig3_metrics.csv", ["gamma_eff_T", "overlap", "tail_width", "reflected"],
                 [g, ov, wd, [e.reflected for e in entries]])
    order = np.argsort(g)
    return {"command": "fig3",
            "overlap_monotone": bool(np.all(np.diff(np.asarray(ov)[order]) < 0)),
            "tail_width_monotone": bool(np.all(np.diff(np.asarray(wd)[order]) < 0))}


def cmd_sweep_timing(cfg, out):
    from .control import require_feasible
    from .reduced import fit_power_law, timing_sensitivity
    params = cfg.params()
    grid = _grid(cfg)
    pulse = _pulse(cfg, grid)
    sched = _schedule(cfg, params, grid, pulse)
    require_feasible(sched)
    deltas = np.asarray(cfg.delays)
    amps = timing_sensitivity(params, sched, deltas, pulse, cfg.workers)
    loss = 1.0 - amps
    io.write_csv(out / "timing.csv", ["delta", "abs_D", "loss"], [deltas, amps, loss])
    a, p = fit_power_law(deltas, loss)
    return {"command": "sweep-timing", "power_law_prefactor": a, "power_law_exponent": p}


def cmd_polarization(cfg, out):
    from .cycle import PolarizationState, default_plan, run_polarization_cycle
    params = cfg.params()
    plan = default_plan(params, cfg.load_end, cfg.hold, cfg.t_start,
                        (cfg.t_end - cfg.t_start) / (cfg.n_points - 1))
    pulse = _pulse(cfg, plan.load_schedule.grid)
    rng = np.random.default_rng(cfg.seed)
    model = "reduced" if cfg.model == "both" else cfg.model
    rows = []
    for _ in range(cfg.n_qubits):
        q = PolarizationState.random(rng)
        r = run_polarization_cycle(plan, pulse, q, model)
        phase_err = abs(np.angle(np.exp(1j * (r.stored_relative_phase
                                             - np.angle(q.alpha / q.beta)))))
        rows.append((q.alpha, q.beta, r.released.alpha, r.released.beta, r.fidelity, phase_err))
    cols = list(zip(*rows))
    io.write_csv(out / "polarization.csv",
                 ["re_alpha", "im_alpha", "re_beta", "im_beta", "re_alpha_out", "im_alpha_out",
                  "re_beta_out", "im_beta_out", "fidelity", "stored_phase_error"],
                 [np.real(cols[0]), np.imag(cols[0]), np.real(cols[1]), np.imag(cols[1]),
                  np.real(cols[2]), np.imag(cols[2]), np.real(cols[3]), np.imag(cols[3]),
                  cols[4], cols[5]])
    return {"command": "polarization", "model": model, "n_qubits": cfg.n_qubits,
            "min_fidelity": float(min(cols[4])), "max_stored_phase_error": float(max(cols[5]))}


def cmd_oracle_classical(cfg, out):
    from .classical import MirrorCavity, quantum_matching_residual, roundtrip_simulate
    from .control import sech_matched_cos_theta
    from .pulses import make_sech
    params = cfg.params()
    grid = _grid(cfg)
    pulse = make_sech(grid)
    cav = MirrorCavity(cfg.mirror_R, cfg.mirror_zeta, cfg.tau_c)
    rt = roundtrip_simulate(cav, np.real(pulse.values), grid)
    resid = quantum_matching_residual(params, sech_matched_cos_theta(params, grid), pulse)
    rt.to_csv(out / "classical.csv", resid)
    return {"command": "oracle-classical", "delay_samples": rt.delay_samples,
            "resampled": rt.resampled, "recursion_vs_ode": rt.ode_deviation(),
            "cavity_gamma_T": cav.gamma, "cavity_gamma_int_T": cav.gamma_int,
            "max_quantum_matching_residual": float(np.nanmax(np.abs(resid)))}


def cmd_check_adiabaticity(cfg, out):
    from .control import check_adiabaticity
    params = cfg.params()
    grid = _grid(cfg)
    sched = _schedule(cfg, params, grid, _pulse(cfg, grid))
    rep = check_adiabaticity(params, sched, cfg.margin)
    names = sorted(rep.ratios)
    io.write_csv(out / "adiabaticity.csv", names, [[rep.ratios[k]] for k in names])
    summary = {"command": "check-adiabaticity", "required_margin": cfg.margin}
    summary.update(_margin_items(rep))
    if not rep.ok:
        raise Infeasible(summary)
    return summary


COMMANDS = {
    "load": (cmd_load, "load a packet into the dark state"),
    "cycle": (cmd_cycle, "load, hold and release"),
    "synthesize": (cmd_synthesize, "build an impedance-matching drive schedule"),
    "fig3": (cmd_fig3, "constant mixing-angle loading for several cavity widths"),
    "sweep-timing": (cmd_sweep_timing, "loss versus arrival-time error"),
    "polarization": (cmd_polarization, "store and release random polarization qubits"),
    "oracle-classical": (cmd_oracle_classical, "Fabry-Perot round-trip cross-check"),
    "check-adiabaticity": (cmd_check_adiabaticity, "adiabaticity margins of a schedule"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="darkstate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one configuration key (repeatable)")
        p.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./darkstate_out)")
    return parser


def _out_dir(args):
    out = Path(args.out or os.environ.get(OUT_ENV) or "darkstate_out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        cfg = build_config(args.preset, args.config, args.set)
    except (ConfigError, OSError) as exc:
        print(f"darkstate: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _out_dir(args)
    code = EXIT_OK
    try:
        summary = func(cfg, out)
    except Infeasible as exc:
        summary, code = exc.args[0], EXIT_INFEASIBLE
        print(f"darkstate: infeasible scenario: {summary.get('diagnostic', '')}",
              file=sys.stderr)
    except InfeasibleError as exc:
        print(f"darkstate: infeasible scenario: {exc}", file=sys.stderr)
        summary, code = {"command": args.command, "error": str(exc)}, EXIT_INFEASIBLE
    except ConvergenceError as exc:
        print(f"darkstate: convergence failure: {exc}", file=sys.stderr)
        summary, code = {"command": args.command, "error": str(exc)}, EXIT_CONVERGENCE
    except (ConfigError, DomainError, TruncationError, OSError) as exc:
        print(f"darkstate: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    summary["exit_code"] = code
    io.write_summary(out / "summary.txt", summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
