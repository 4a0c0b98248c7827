"""Command-line sweeps that write CSV tables of the energy-efficiency results.

Every command prints a header row followed by one row per grid point, in
grid order. Output goes to ``--output`` when given, otherwise to
``$QOS_EFFCAP_OUTPUT_DIR/<command>.csv`` when that variable is set, and to
stdout otherwise. Exit status is 0 on success, 2 for invalid input and 3
when a numerical solver or estimator fails.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import asymptotics, effcap, queue_sim, training
from .errors import EffCapError, EstimationError, SolverError
from .fading import parse_model

ENV_OUTPUT_DIR = "QOS_EFFCAP_OUTPUT_DIR"

CURVE_COLUMNS = "model,theta,B,snr,eb_n0_db,spectral_eff,r_opt,alpha_opt"
COLUMNS = {
    "curve-wideband": CURVE_COLUMNS,
    "curve-lowpower": CURVE_COLUMNS,
    "curve-training": "gamma,theta,B,snr,eb_n0_db,spectral_eff,r_opt,alpha_opt,rho_opt,snr_eff",
    "alpha-star": "model,regime,theta,alpha_star",
    "limits": "model,regime,theta,alpha_star,eb_n0_db,s0,qos_param,is_minimum",
    "rho-opt": "snr,rho_opt,snr_eff",
    "simulate": queue_sim.DECAY_HEADER,
    "validate": queue_sim.DECAY_HEADER + ",theta,ratio,mgf_error,passed",
    "ebmin": "theta,B,gamma,snr_star,eb_min_db,interior",
}

T_DEFAULT = 2e-3
PBAR_DEFAULT = 1e4
B_DEFAULT = 1e5

_THETAS = "0,0.001,0.01,0.1,1"
_NAKAGAMI = ["nakagami:m=0.6", "nakagami:m=1", "nakagami:m=2", "nakagami:m=5"]

#: named figure reproductions: argument vectors fed back into the parser
PRESETS = {
    "fig3": ["curve-wideband", "--model", "rayleigh:gamma=1", "--theta", _THETAS,
             "--pbar-over-n0", "1e4", "--snr-lo", "1e-5", "--snr-hi", "1"],
    "fig4": ["curve-wideband", "--model", *_NAKAGAMI, "--theta", "0.01",
             "--pbar-over-n0", "1e4", "--snr-lo", "1e-5", "--snr-hi", "1"],
    "fig5": ["curve-lowpower", "--model", "rayleigh:gamma=1", "--theta", _THETAS,
             "--B", "1e5", "--snr-lo", "1e-5", "--snr-hi", "10"],
    "fig6": ["curve-lowpower", "--model", *_NAKAGAMI, "--theta", "0.01",
             "--B", "1e5", "--snr-lo", "1e-5", "--snr-hi", "10"],
    "fig7": ["curve-lowpower", "--model", "rayleigh:gamma=1", "--theta", "0.001",
             "--B", "1e5", "--snr-lo", "1e-5", "--snr-hi", "10"],
    "fig8": ["rho-opt", "--B", "1e7", "--snr-lo", "1e-4", "--snr-hi", "1e4", "--points", "81"],
    "fig9": ["curve-training", "--theta", "1,0.1,0.01,0.001", "--B", "1e5",
             "--snr-lo", "1e-4", "--snr-hi", "10"],
    "fig10": ["curve-training", "--theta", "0.01", "--B", "1e4,1e5,1e6,1e7",
              "--snr-lo", "1e-4", "--snr-hi", "10"],
    "fig11": ["ebmin", "--theta", "0,0.001,0.01,0.1", "--B", "1e4,1e5,1e6,1e7"],
}


class UsageError(Exception):
    """Bad command-line input that argparse itself cannot catch."""


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _float_list(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _count(text: str) -> int:
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1 or v != float(text):
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text!r}")
    return v


def _thetas(args, name="theta"):
    values = getattr(args, name)
    if not values:
        raise UsageError(f"--{name}: the list is empty")
    for v in values:
        if not (v >= 0 and math.isfinite(v)):
            raise UsageError(f"--{name}: values must be >= 0, got {v!r}")
    return values


def _positives(values, flag):
    if not values:
        raise UsageError(f"{flag}: the list is empty")
    if any(not (v > 0 and math.isfinite(v)) for v in values):
        raise UsageError(f"{flag}: values must be positive")
    return values


def _models(args):
    out = []
    for text in args.model:
        try:
            out.append(parse_model(text))
        except EffCapError as exc:
            raise UsageError(f"--model {text!r}: {exc}") from None
    return out


def _grid(args):
    lo, hi, n = args.snr_lo, args.snr_hi, args.points
    if not lo < hi:
        raise UsageError(f"--snr-lo must be below --snr-hi (got {lo!r}, {hi!r})")
    if n < 2:
        raise UsageError("--points must be at least 2")
    return np.linspace(lo, hi, n) if args.linear else np.geomspace(lo, hi, n)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


def _row(*values) -> str:
    return ",".join(_fmt(v) for v in values)


# ---------------------------------------------------------------------------
# commands; each returns the CSV body lines (without header)
# ---------------------------------------------------------------------------

def _curve_wideband(args):
    rows = []
    for model in _models(args):
        for theta in _thetas(args):
            for snr in _grid(args):
                B = args.pbar_over_n0 / snr
                p = effcap.optimize_rate(effcap.SystemParams(args.T, B, theta, snr), model)
                rows.append(_row(str(model), theta, B, snr, p.bit_energy_db,
                                 p.spectral_efficiency, p.r_opt, p.alpha_opt))
    return rows


def _curve_lowpower(args):
    rows = []
    for model in _models(args):
        for theta in _thetas(args):
            for snr in _grid(args):
                p = effcap.optimize_rate(effcap.SystemParams(args.T, args.B, theta, snr), model)
                rows.append(_row(str(model), theta, args.B, snr, p.bit_energy_db,
                                 p.spectral_efficiency, p.r_opt, p.alpha_opt))
    return rows


def _curve_training(args):
    rows = []
    for B in _positives(args.B, "--B"):
        for theta in _thetas(args):
            for snr in _grid(args):
                p = training.optimize_rate_training(
                    training.TrainingParams(args.gamma, args.T, B, theta, snr))
                rows.append(_row(args.gamma, theta, B, snr, p.bit_energy_db, p.spectral_efficiency,
                                 p.r_opt, p.alpha_opt, p.rho_opt, p.snr_eff))
    return rows


def _limits_results(args):
    for model in _models(args):
        for theta in _thetas(args):
            if args.regime == "wideband":
                res = asymptotics.wideband_limits(theta, args.T, args.pbar_over_n0, model)
            else:
                res = asymptotics.lowpower_limits(theta, args.T, args.B, model)
            yield model, theta, res


def _alpha_star(args):
    return [_row(str(m), r.regime, theta, r.alpha_star) for m, theta, r in _limits_results(args)]


def _limits(args):
    return [_row(str(m), r.regime, theta, r.alpha_star, r.eb_n0_zero_db, r.wideband_slope,
                 r.qos_param, bool(r.is_minimum))
            for m, theta, r in _limits_results(args)]


def _rho_opt(args):
    snrs = args.snr if args.snr else _grid(args)
    rows = []
    for snr in _positives(list(snrs), "--snr"):
        rho = training.optimal_training_fraction(snr, args.gamma, args.T, args.B)
        rows.append(_row(snr, rho, training.effective_snr(rho, snr, args.gamma, args.T, args.B)))
    return rows


def _simulate(args):
    (model,) = _models(args)
    if args.alpha is not None:
        alpha = args.alpha
    elif args.snr and args.B:
        alpha = float(effcap.outage_threshold(args.rate, args.B[0], args.snr[0]))
    else:
        raise UsageError("simulate needs --alpha, or --snr and --B to derive it")
    trace = queue_sim.simulate_queue(args.arrival_rate, args.rate, model, alpha, args.T,
                                     args.n_frames, args.seed)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            queue_sim.write_trace_csv(trace, fh)
    est = queue_sim.estimate_decay_rate(trace, (args.fit_lo, args.fit_hi))
    return queue_sim.decay_record(est).splitlines()[1:]


def _validate(args):
    (model,) = _models(args)
    rows = []
    for theta in _thetas(args):
        if theta == 0:
            raise UsageError("--theta: validation needs theta > 0")
        rep = queue_sim.validate_effective_capacity(
            theta, args.snr[0], args.T, args.B[0], model, args.n_frames, args.seed,
            arrival_scale=args.arrival_scale, window=(args.fit_lo, args.fit_hi))
        est = rep.estimate
        if est is None:
            raise EstimationError("queue is unstable at this load; no decay estimate")
        rows.append(_row(est.theta_hat, est.fit_range[0], est.fit_range[1], est.r_squared,
                         est.n_frames, theta, rep.ratio, rep.mgf_error, rep.passed))
    return rows


def _ebmin(args):
    rows = []
    grid = _grid(args)
    for theta in _thetas(args):
        for B in _positives(args.B, "--B"):
            scan = training.min_bit_energy_scan(theta, args.T, B, args.gamma, grid)
            rows.append(_row(theta, B, args.gamma, scan.snr_star, scan.eb_min_db, scan.interior))
    return rows


HANDLERS = {
    "curve-wideband": _curve_wideband,
    "curve-lowpower": _curve_lowpower,
    "curve-training": _curve_training,
    "alpha-star": _alpha_star,
    "limits": _limits,
    "rho-opt": _rho_opt,
    "simulate": _simulate,
    "validate": _validate,
    "ebmin": _ebmin,
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qos-effcap",
        description="Energy efficiency of fixed-rate transmission under queueing (QoS) constraints.",
        epilog="Presets: " + ", ".join(PRESETS) + ". Run `qos-effcap --preset fig4` "
               "to reproduce a figure's data.")
    parser.add_argument("--preset", choices=sorted(PRESETS, key=lambda s: int(s[3:])),
                        help="run a stored figure sweep instead of a subcommand")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, help_text, *, models=True, theta=True, grid=False, regime=False):
        p = sub.add_parser(name, help=help_text,
                           description=f"{help_text}\n\nCSV columns: {COLUMNS[name]}",
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        if models:
            p.add_argument("--model", nargs="+", default=["rayleigh:gamma=1"],
                           help="fading model(s), e.g. rayleigh:gamma=1, nakagami:m=2, "
                                "gamma:n=3,lambda=3")
        if theta:
            p.add_argument("--theta", type=_float_list, default=[0.01],
                           help="comma-separated QoS exponents in 1/bit")
        p.add_argument("--T", type=_positive, default=T_DEFAULT, help="frame duration in s")
        if grid:
            p.add_argument("--snr-lo", type=_positive, default=1e-4)
            p.add_argument("--snr-hi", type=_positive, default=10.0)
            p.add_argument("--points", type=_count, default=60)
            p.add_argument("--linear", action="store_true", help="linear instead of log grid")
        if regime:
            p.add_argument("--regime", choices=("wideband", "lowpower"), required=True)
        p.add_argument("--output", "-o", help="CSV path (default: stdout or $%s)" % ENV_OUTPUT_DIR)
        p.add_argument("--plot-script", help="also write a gnuplot script for the CSV")
        return p

    p = add("curve-wideband", "spectral efficiency vs bit energy as B grows at fixed P/N0", grid=True)
    p.add_argument("--pbar-over-n0", type=_positive, default=PBAR_DEFAULT, help="P/N0 in Hz")

    p = add("curve-lowpower", "spectral efficiency vs bit energy as power drops at fixed B", grid=True)
    p.add_argument("--B", type=_positive, default=B_DEFAULT, help="bandwidth in Hz")

    p = add("curve-training", "curves with a pilot-estimated channel", models=False, grid=True)
    p.add_argument("--B", type=_float_list, default=[B_DEFAULT], help="comma-separated bandwidths")
    p.add_argument("--gamma", type=_positive, default=1.0, help="mean channel power gain")

    for name, text in (("alpha-star", "optimal outage threshold in the zero-SE limit"),
                       ("limits", "minimum bit energy and wideband slope")):
        p = add(name, text, regime=True)
        p.add_argument("--B", type=_positive, default=B_DEFAULT, help="bandwidth (lowpower)")
        p.add_argument("--pbar-over-n0", type=_positive, default=PBAR_DEFAULT, help="P/N0 (wideband)")

    p = add("rho-opt", "optimal pilot energy fraction", models=False, theta=False, grid=True)
    p.add_argument("--snr", type=_float_list, help="explicit SNR list (overrides the grid)")
    p.add_argument("--gamma", type=_positive, default=1.0)
    p.add_argument("--B", type=_positive, default=1e7)

    for name, text in (("simulate", "simulate the buffered link and fit the tail decay rate"),
                       ("validate", "compare the simulated decay rate with theta")):
        p = add(name, text, theta=(name == "validate"))
        p.add_argument("--snr", type=_float_list, default=[1.0])
        p.add_argument("--B", type=_float_list, default=[B_DEFAULT])
        p.add_argument("--n-frames", type=_count, default=queue_sim.DEFAULT_FRAMES)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--fit-lo", type=_positive, default=queue_sim.FIT_WINDOW[0])
        p.add_argument("--fit-hi", type=_positive, default=queue_sim.FIT_WINDOW[1])
        if name == "simulate":
            p.add_argument("--arrival-rate", type=float, required=True, help="bits/s")
            p.add_argument("--rate", type=float, required=True, help="transmission rate, bits/s")
            p.add_argument("--alpha", type=float, help="outage threshold (else from --snr, --B)")
            p.add_argument("--trace", help="write the per-frame trace CSV here")
        else:
            p.add_argument("--arrival-scale", type=_positive, default=1.0,
                           help="load as a multiple of the effective capacity")

    p = add("ebmin", "minimum bit energy over SNR with a trained channel", models=False, grid=True)
    p.add_argument("--B", type=_float_list, default=[1e4, 1e5, 1e6, 1e7])
    p.add_argument("--gamma", type=_positive, default=1.0)
    return parser


def plot_script(command: str, csv_path: str) -> str:
    """Gnuplot commands that draw the CSV written by ``command``."""
    cols = COLUMNS[command].split(",")
    x, y = {
        "rho-opt": ("snr", "rho_opt"),
        "alpha-star": ("theta", "alpha_star"),
        "limits": ("theta", "eb_n0_db"),
        "ebmin": ("B", "eb_min_db"),
        "simulate": ("n_frames", "theta_hat"),
        "validate": ("theta", "ratio"),
    }.get(command, ("eb_n0_db", "spectral_eff"))
    logx = x in ("snr", "B", "theta")
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{x}'",
        f"set ylabel '{y}'",
    ]
    if logx:
        lines.append("set logscale x")
    lines.append(f"plot '{csv_path}' using {cols.index(x) + 1}:{cols.index(y) + 1} with linespoints")
    return "\n".join(lines) + "\n"


def _destination(args):
    if args.output:
        return args.output
    out_dir = os.environ.get(ENV_OUTPUT_DIR)
    if out_dir:
        return os.path.join(out_dir, f"{args.preset or args.command}.csv")
    return None


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.preset:
        if args.command:
            print("error: --preset cannot be combined with a subcommand", file=sys.stderr)
            return 2
        preset = args.preset
        args = parser.parse_args(PRESETS[preset])
        args.preset = preset
    if not args.command:
        parser.print_usage(sys.stderr)
        print("error: a subcommand or --preset is required", file=sys.stderr)
        return 2

    try:
        rows = HANDLERS[args.command](args)
    except (UsageError, ValueError) as exc:
        # ParameterError and DomainError derive from ValueError
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, EstimationError, ArithmeticError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3

    text = COLUMNS[args.command] + "\n" + "".join(r + "\n" for r in rows)
    dest = _destination(args)
    if dest is None:
        if args.plot_script:
            print("error: --plot-script needs a CSV file (--output or $%s)" % ENV_OUTPUT_DIR,
                  file=sys.stderr)
            return 2
        sys.stdout.write(text)
    else:
        parent = os.path.dirname(dest)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(dest, "w", newline="") as fh:
            fh.write(text)
        if args.plot_script:
            with open(args.plot_script, "w") as fh:
                fh.write(plot_script(args.command, dest))
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
