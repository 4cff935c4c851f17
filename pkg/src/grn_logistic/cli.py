"""``grn`` command-line front end.

Exit codes: 0 success, 1 an analysis did not converge (or a simulation
failed), 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .dde_sim import HistorySpec, integrate
from .equilibrium import solve_equilibrium
from .errors import DomainError, SimulationError, UnsupportedConfigurationError
from .hopf import find_hopf, hopf_coefficients, numerical_transversality, replica
from .lipschitz import DomainBox, comparison_table, lipschitz
from .model import PRESETS, DelayConfig, Formulation, get_preset, jacobian, load_config
from .param_fit import TimeSeries, fit
from .report import run_full_analysis
from .sigmoid import HillParams, match_steepness, match_weighted_basal_slope, match_weighted_custom_threshold
from .stability import classify

FORMULATIONS = [f.value for f in Formulation]
LOGISTIC = [Formulation.LINEAR_ADDITIVE.value, Formulation.WEIGHTED.value]


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _load(args):
    if args.config:
        return load_config(args.config)
    return get_preset(args.preset or "vinoth-table1")


def _params(args):
    return _load(args).params_for(args.formulation)


# --- subcommands ---------------------------------------------------------

def cmd_match(args) -> int:
    result = {}
    if args.hill_theta is not None or args.hill_n is not None:
        if args.hill_theta is None or args.hill_n is None:
            raise UsageError("--hill-theta and --hill-n must be given together")
        result["steepness"] = {"theta": args.hill_theta, "n": args.hill_n,
                               "lambda": match_steepness(HillParams(args.hill_theta, args.hill_n))}
    if args.g_basal is not None:
        if args.threshold is None:
            m = match_weighted_basal_slope(args.g_basal)
        else:
            m = match_weighted_custom_threshold(args.g_basal, args.threshold)
        result["weighted"] = {"g_basal": args.g_basal, "kappa": m.kappa, "theta": m.theta,
                              "lambda": m.lam, "basal_rate": m.basal_rate()}
    elif args.threshold is not None:
        raise UsageError("--threshold requires --g-basal")
    if not result:
        raise UsageError("give --g-basal and/or --hill-theta with --hill-n")
    _emit(_dump(result), args.out)
    return 0


def cmd_equilibrium(args) -> int:
    p = _params(args)
    eq = solve_equilibrium(args.formulation, p, guess=args.guess, tol=args.tol)
    _emit(eq.to_json(), args.out)
    return 0 if eq.converged else 1


def cmd_stability(args) -> int:
    p = _params(args)
    eq = solve_equilibrium(args.formulation, p)
    out = {"formulation": args.formulation, "equilibrium": eq.to_dict()}
    if eq.converged:
        out["stability"] = classify(jacobian(args.formulation, p, eq.point)).to_dict()
    _emit(_dump(out), args.out)
    return 0 if eq.converged else 1


def cmd_hopf(args) -> int:
    p = _params(args)
    eq = solve_equilibrium(args.formulation, p)
    if not eq.converged:
        _emit(_dump({"formulation": args.formulation, "equilibrium": eq.to_dict(), "points": []}), args.out)
        return 1
    c = hopf_coefficients(args.formulation, p, eq.point)
    if args.no_beta:
        c = c.with_beta(0.0)
    base = find_hopf(c, grid_density=args.grid_density)
    points = [replica(h, k) for h in base for k in range(args.k_max + 1)]
    points.sort(key=lambda h: (h.tau_c, h.omega_c))
    out = {
        "formulation": args.formulation,
        "equilibrium": {"A": eq.point.A, "B": eq.point.B},
        "coefficients": {"alpha_A": c.alpha_A, "alpha_B": c.alpha_B, "beta": c.beta,
                         "gamma_A": c.gamma_A, "gamma_B": c.gamma_B},
        "points": [h.to_dict() for h in points],
    }
    if base:
        out["primary"] = dict(base[0].to_dict(),
                              numerical_transversality=numerical_transversality(c, base[0]))
    _emit(_dump(out), args.out)
    return 0 if base else 1


def cmd_lipschitz(args) -> int:
    cfg = _load(args)
    box = DomainBox(args.A_max, args.B_max)
    forms = LOGISTIC if args.formulation == "both" else [args.formulation]
    if Formulation.HILL.value in forms:
        raise UsageError("Lipschitz bounds are available for the logistic formulations only")
    reports = {f: lipschitz(f, cfg.params_for(f), box) for f in forms}
    out = {f: r.to_dict() for f, r in reports.items()}
    if len(reports) == 2:
        out["comparison"] = comparison_table(reports[LOGISTIC[0]], reports[LOGISTIC[1]])
    _emit(_dump(out), args.out)
    return 0


def cmd_simulate(args) -> int:
    cfg = _load(args)
    p = cfg.params_for(args.formulation)
    if args.tau_s is not None:
        if any(v is not None for v in (args.tau_1, args.tau_2, args.tau_12, args.tau_21)):
            raise UsageError("--tau-s cannot be combined with individual delays")
        delays = DelayConfig.symmetric(args.tau_s)
    else:
        base = cfg.delays
        delays = DelayConfig(*(base_v if v is None else v for v, base_v in
                               zip((args.tau_1, args.tau_2, args.tau_12, args.tau_21), base.as_tuple())))
    history = HistorySpec.constant(*args.history)
    try:
        traj = integrate(args.formulation, p, delays, history, t_end=args.t_end, dt=args.dt)
    except (SimulationError, DomainError) as exc:
        print(f"grn simulate: {exc}", file=sys.stderr)
        return 1
    if args.format == "csv":
        _emit(traj.to_csv(), args.out)
    else:
        _emit(_dump({"metadata": traj.metadata, "t": traj.times.tolist(),
                     "A": traj.A.tolist(), "B": traj.B.tolist()}), args.out)
    return 0


def cmd_fit(args) -> int:
    p = _params(args)
    data = TimeSeries.from_csv(args.data)
    init = {}
    for item in args.init or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--init expects name=value, got {item!r}")
        init[name.strip()] = float(value)
    history = HistorySpec.constant(*args.history) if args.history else None
    res = fit(data, args.formulation, args.free, p, init, history=history, dt=args.dt,
              max_iter=args.max_iter)
    _emit(_dump(res.to_dict()), args.out)
    return 0 if res.converged else 1


def cmd_report(args) -> int:
    cfg = _load(args)
    rep = run_full_analysis(cfg.core, k_max=args.k_max)
    _emit(rep.to_json(), args.out)
    for msg in rep.messages:
        print(f"grn report: {msg}", file=sys.stderr)
    return 0 if rep.converged else 1


# --- parser --------------------------------------------------------------

def _add_source(sp):
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--preset", choices=None, metavar="NAME",
                   help=f"built-in parameter set ({', '.join(PRESETS)}); default vinoth-table1")
    g.add_argument("--config", metavar="PATH", help="parameter file (key = value, sectioned)")


def _add_formulation(sp, choices=FORMULATIONS, default="linear-additive"):
    sp.add_argument("--formulation", choices=choices, default=default,
                    help=f"model variant (default {default})")


def _add_out(sp, what="JSON"):
    sp.add_argument("--out", metavar="PATH", help=f"write {what} here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grn",
        description="Two-gene delay network with logistic regulation: matching, equilibria, "
                    "stability, Hopf points, Lipschitz bounds, simulation and fitting. "
                    "Concentrations in nM, times in min.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to standard error")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sp = sub.add_parser("match", help="Hill-to-logistic parameter matching",
                        description="Slope matching lambda = n/theta (1/nM) and weighted-activation "
                                    "parameters from a basal rate (nM/min).")
    sp.add_argument("--g-basal", type=float, help="basal production rate g (nM/min)")
    sp.add_argument("--threshold", type=float,
                    help="custom activation threshold (nM/min); default equals --g-basal")
    sp.add_argument("--hill-theta", type=float, help="Hill threshold (nM)")
    sp.add_argument("--hill-n", type=float, help="Hill coefficient (dimensionless)")
    _add_out(sp)
    sp.set_defaults(func=cmd_match)

    sp = sub.add_parser("equilibrium", help="delay-free equilibrium by Newton iteration",
                        description="Solve for the steady state (nM); residual in nM/min.")
    _add_source(sp)
    _add_formulation(sp)
    sp.add_argument("--guess", type=float, nargs=2, metavar=("A", "B"),
                    help="starting point in nM (default: the repression thresholds)")
    sp.add_argument("--tol", type=float, default=1e-10, help="residual tolerance, nM/min (default 1e-10)")
    _add_out(sp)
    sp.set_defaults(func=cmd_equilibrium)

    sp = sub.add_parser("stability", help="delay-free stability of the equilibrium",
                        description="Trace (1/min), determinant (1/min^2), discriminant, eigenvalues "
                                    "(1/min) and classification of the Jacobian at equilibrium.")
    _add_source(sp)
    _add_formulation(sp)
    _add_out(sp)
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("hopf", help="delay-induced Hopf points for symmetric self-delays",
                        description="Certified purely imaginary roots (omega in rad/min, tau in min, "
                                    "transversality in 1/min^2) and their delay replicas, sorted by tau.")
    _add_source(sp)
    _add_formulation(sp)
    sp.add_argument("--k-max", type=int, default=3, help="replicas per branch (default 3)")
    sp.add_argument("--grid-density", type=int, default=60, help="seeds per axis (default 60)")
    sp.add_argument("--no-beta", action="store_true", help="drop the cross-coupling term beta")
    _add_out(sp)
    sp.set_defaults(func=cmd_hopf)

    sp = sub.add_parser("lipschitz", help="global Lipschitz bounds",
                        description="L_F (1/min) and L_DF (1/(nM min)) over [0, A_max] x [0, B_max] nM.")
    _add_source(sp)
    _add_formulation(sp, choices=LOGISTIC + ["both"], default="both")
    sp.add_argument("--A-max", type=float, default=500.0, help="upper bound on A, nM (default 500)")
    sp.add_argument("--B-max", type=float, default=500.0, help="upper bound on B, nM (default 500)")
    _add_out(sp)
    sp.set_defaults(func=cmd_lipschitz)

    sp = sub.add_parser("simulate", help="integrate the (delay) system with RK4",
                        description="Fixed-step RK4 from a constant history. Output CSV columns "
                                    "t (min), A (nM), B (nM).")
    _add_source(sp)
    _add_formulation(sp)
    sp.add_argument("--tau-s", type=float, help="symmetric self-delay tau_1 = tau_2 (min)")
    for name in ("tau-1", "tau-2", "tau-12", "tau-21"):
        sp.add_argument(f"--{name}", type=float, help=f"delay {name.replace('-', '_')} (min)")
    sp.add_argument("--history", type=float, nargs=2, default=(10.0, 10.0), metavar=("A", "B"),
                    help="constant history in nM (default 10 10)")
    sp.add_argument("--t-end", type=float, default=20.0, help="final time, min (default 20)")
    sp.add_argument("--dt", type=float, default=0.01, help="step size, min (default 0.01)")
    sp.add_argument("--format", choices=["csv", "json"], default="csv", help="output format (default csv)")
    _add_out(sp, "the trajectory")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("fit", help="least-squares parameter estimation from a t,A,B CSV",
                        description="Levenberg-Marquardt on log-parameters; delay-free only. "
                                    "sse in nM^2.")
    _add_source(sp)
    _add_formulation(sp)
    sp.add_argument("--data", required=True, metavar="CSV", help="observations with header t,A,B")
    sp.add_argument("--free", nargs="+", required=True, metavar="NAME",
                    help="parameters to estimate, e.g. lambda_A lambda_B")
    sp.add_argument("--init", nargs="*", metavar="NAME=VALUE", help="starting values (positive)")
    sp.add_argument("--history", type=float, nargs=2, metavar=("A", "B"),
                    help="constant history in nM (default: first observation)")
    sp.add_argument("--dt", type=float, default=0.01, help="integration step, min (default 0.01)")
    sp.add_argument("--max-iter", type=int, default=100, help="iteration budget (default 100)")
    _add_out(sp)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("report", help="full comparison of both logistic formulations",
                        description="Equilibria, stability, Hopf points, replicas and Lipschitz "
                                    "bounds with cross-formulation ratios, as versioned JSON.")
    _add_source(sp)
    sp.add_argument("--k-max", type=int, default=3, help="Hopf replicas to list (default 3)")
    _add_out(sp)
    sp.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, KeyError, TypeError, OSError, UnsupportedConfigurationError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"grn {args.command}: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
