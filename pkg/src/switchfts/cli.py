"""Command-line front end: ``switchfts {analyze,decompose,simulate,verify,rate,figures}``.

Reports are JSON on stdout. Exact quantities are ratio strings; the only
floats appear under keys ending in ``_approx``. Modes are printed 1-based.

Exit codes: 0 when the verdict asked about holds, 2 when it does not, 1 on
errors (bad input, budget exceeded, ...).
"""

from __future__ import annotations

import argparse
import json
import random
import sys as _sys
from fractions import Fraction
from pathlib import Path

from . import formats
from .ladder import Ladder
from .linalg import to_fraction
from .normalform import decompose, extract_xi, verify_normal_form
from .rate import (
    NotFts,
    arbitrarily_fast,
    decay_certificate,
    lower_bound_rate_mi,
    scalar_min_rate_md,
    scalar_min_rate_mi,
)
from .simulate import BudgetExceeded, adversarial_decay, exhaustive_fts_check, simulate
from .synthesis import GainSet, certify_gains, decide_fts, reduce_inputs
from .system import ModeKind, SwitchedSystem

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2

fs = formats.frac_str
mj = formats.matrix_to_json


class CliError(Exception):
    pass


def _modes(arg, default="both") -> list[ModeKind]:
    arg = arg or default
    return [ModeKind.MD, ModeKind.MI] if arg == "both" else [ModeKind.parse(arg)]


def _single_mode(arg, default="md") -> ModeKind:
    if arg == "both":
        raise CliError("this command needs --mode md or --mode mi")
    return ModeKind.parse(arg or default)


def _vector(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(to_fraction(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"bad vector {text!r}: {exc}") from None


def _load(args) -> tuple[SwitchedSystem, dict]:
    sys = formats.parse_system(args.system)
    head = {
        "command": " ".join(["switchfts"] + args.argv),
        "system": {"path": str(args.system), "digest": formats.system_digest(sys),
                   "n": sys.n, "m": sys.m, "M": sys.M},
    }
    if args.reduce_inputs:
        sys, T = reduce_inputs(sys)
        head["input_reduction"] = {"T": mj(T), "m_reduced": sys.m}
    return sys, head


def _ladder_json(ladder: Ladder) -> dict:
    return {
        "dims": ladder.dims,
        "p": ladder.p,
        "fixed_point_basis": mj(ladder.fixed_point.basis),
        "Q_p": mj(ladder.Q_p),
        "U_p": [mj(u) for u in ladder.U_p],
    }


def _gains_from_analysis(sys, kind) -> GainSet:
    verdict = decide_fts(sys, kind)
    return verdict.witness if verdict.witness is not None else GainSet.zero(sys, kind)


def _resolve_gains(sys, args) -> GainSet:
    if args.gains in (None, "analysis", "from-analysis"):
        return _gains_from_analysis(sys, _single_mode(args.mode))
    gains = formats.parse_gains(args.gains)
    formats.check_gains(sys, gains)
    return gains


def cmd_analyze(args) -> tuple[dict, int]:
    sys, report = _load(args)
    report["verdicts"] = {}
    all_true = True
    for kind in _modes(args.mode):
        v = decide_fts(sys, kind)
        entry = {"fts": v.is_fts, "horizon": v.horizon, "ladder": _ladder_json(v.ladder)}
        if v.witness is not None:
            entry["gains"] = [mj(k) for k in v.witness.gains]
            cert = certify_gains(sys, v.witness, v.ladder)
            entry["certified"] = cert.ok
        else:
            entry["gains"] = None
        if not v.is_fts:
            entry["blocking_subspace_basis"] = mj(v.blocking_subspace.basis)
        report["verdicts"][kind.value] = entry
        all_true &= v.is_fts
    return report, EXIT_OK if all_true else EXIT_NEGATIVE


def _nf_json(nf, rep) -> dict:
    M = nf.system.M
    return {
        "n_p": nf.n_p,
        "horizon": nf.horizon,
        "T": mj(nf.T),
        "T_inv": mj(nf.T_inv),
        "K_base": [mj(k) for k in nf.K_base.gains],
        "blocks": [
            {
                "mode": j + 1,
                "A_yy": mj(nf.A_yy[j]),
                "A_yxi": mj(nf.A_yxi[j]),
                "A_xiy": mj(nf.A_xiy[j]),
                "A_xixi": mj(nf.A_xixi[j]),
                "B_y": mj(nf.B_y[j]),
                "B_xi": mj(nf.B_xi[j]),
            }
            for j in range(M)
        ],
        "verify": {
            "lower_left_zero": rep.lower_left_zero,
            "y_nilpotent": rep.y_nilpotent,
            "products_checked": rep.products_checked,
            "xi_fixed_point_dim": rep.xi_fixed_point_dim,
            "ok": rep.ok,
        },
    }


def cmd_decompose(args) -> tuple[dict, int]:
    sys, report = _load(args)
    report["normal_forms"] = {}
    ok = True
    for kind in _modes(args.mode, "mi"):
        nf = decompose(sys, kind)
        rep = verify_normal_form(nf)
        report["normal_forms"][kind.value] = _nf_json(nf, rep)
        ok &= rep.ok
        if args.xi_out:
            path = Path(args.xi_out)
            if len(_modes(args.mode, "mi")) > 1:
                path = path.with_name(f"{path.stem}_{kind.value}{path.suffix}")
            path.write_text(formats.dumps_system(extract_xi(nf)) if nf.n_p < sys.n else "")
            report["normal_forms"][kind.value]["xi_system_file"] = str(path)
    return report, EXIT_OK if ok else EXIT_NEGATIVE


def _sigma(args, sys, gains, x0, steps):
    spec = args.sigma or "adversarial"
    if spec == "adversarial":
        return list(adversarial_decay(sys, gains, x0, steps).trajectory.sigma)
    if spec.startswith("random:"):
        rng = random.Random(int(spec.split(":", 1)[1]))
        return [rng.randrange(sys.M) for _ in range(steps)]
    try:
        seq = [int(s) - 1 for s in spec.split(",") if s.strip()]
    except ValueError:
        raise CliError(f"bad --sigma {spec!r}") from None
    if any(not 0 <= j < sys.M for j in seq):
        raise CliError(f"--sigma modes must lie in 1..{sys.M}")
    if len(seq) < steps:
        raise CliError(f"--sigma has {len(seq)} entries, need {steps}")
    return seq


def cmd_simulate(args) -> tuple[dict, int]:
    sys, report = _load(args)
    gains = _resolve_gains(sys, args)
    x0 = _vector(args.x0) if args.x0 else (Fraction(1),) * sys.n
    if len(x0) != sys.n:
        raise CliError(f"--x0 has {len(x0)} entries, system has n = {sys.n}")
    steps = args.steps
    sigma = _sigma(args, sys, gains, x0, steps)
    traj = simulate(sys, gains, x0, sigma, steps)
    nsq = traj.norms_sq()
    ratios = [fs(b / a) if a else None for a, b in zip(nsq, nsq[1:])]
    report["simulation"] = {
        "gains": formats.gains_to_dict(gains),
        "x0": formats.vector_to_json(x0),
        "sigma": [j + 1 for j in traj.sigma],
        "states": [formats.vector_to_json(x) for x in traj.states],
        "norm_sq": [fs(v) for v in nsq],
        "ratio_sq": ratios,
        "first_zero_step": next((t for t, v in enumerate(nsq) if v == 0), None),
    }
    if args.csv:
        formats.write_trajectory_csv(traj, args.csv)
        report["simulation"]["csv"] = str(args.csv)
    if args.plot:
        from .plotting import plot_norm_log

        plot_norm_log([traj], args.plot)
        report["simulation"]["plot"] = str(args.plot)
    if args.plot_states:
        from .plotting import plot_states

        plot_states([traj], args.plot_states)
        report["simulation"]["plot_states"] = str(args.plot_states)
    return report, EXIT_OK


def _initial_set(args, sys, gains):
    spec = args.initial or "basis"
    if spec == "basis":
        return None
    if spec == "ladder":
        v = decide_fts(sys, gains.mode_kind)
        return v.ladder.fixed_point.vectors()
    return [_vector(part) for part in spec.split(";")]


def cmd_verify(args) -> tuple[dict, int]:
    sys, report = _load(args)
    gains = _resolve_gains(sys, args)
    initial = _initial_set(args, sys, gains)
    horizon = args.horizon
    if horizon is None:
        horizon = decide_fts(sys, gains.mode_kind).ladder.p
    rep = exhaustive_fts_check(sys, gains, horizon, initial, budget=args.budget, threads=args.threads)
    out = {
        "gains": formats.gains_to_dict(gains),
        "horizon": rep.horizon,
        "initial_states": "basis" if initial is None else [formats.vector_to_json(x) for x in initial],
        "sequences_checked": rep.sequences_checked,
        "all_reach_zero": rep.all_reach_zero,
        "counterexample": None,
    }
    if rep.counterexample is not None:
        x0, seq = rep.counterexample
        final = simulate(sys, gains, x0, seq).states[-1]
        out["counterexample"] = {
            "x0": formats.vector_to_json(x0),
            "sigma": [j + 1 for j in seq],
            "final_state": formats.vector_to_json(final),
        }
    report["verification"] = out
    return report, EXIT_OK if rep.all_reach_zero else EXIT_NEGATIVE


def cmd_rate(args) -> tuple[dict, int]:
    sys, report = _load(args)
    code = EXIT_OK
    if args.scalar:
        if sys.n != 1 or sys.m > 1:
            raise CliError("--scalar needs n = 1 and m <= 1 (extract a scalar residual with decompose --xi-out)")
        a = [A[0, 0] for A in sys.A]
        b = [B[0, 0] if sys.m else Fraction(0) for B in sys.B]
        out = {}
        for kind in _modes(args.mode):
            if kind is ModeKind.MI:
                rho, k = scalar_min_rate_mi(a, b)
                out["mi"] = {"rho_star": fs(rho), "k_star": fs(k)}
            else:
                out["md"] = {"rho_star": fs(scalar_min_rate_md(a, b))}
        report["scalar_rate"] = out
    elif args.lower_bound:
        samples, seed = args.lower_bound
        est = lower_bound_rate_mi(sys, int(samples), int(seed))
        report["lower_bound"] = {
            "alpha_approx": est.alpha_approx,
            "direction_approx": list(est.direction_approx),
            "samples": est.samples,
            "seed": est.seed,
            "certified": False,
            "note": "heuristic sampled estimate, not a certified bound",
        }
    elif args.certificate:
        kind = _single_mode(args.mode)
        rho = to_fraction(args.certificate)
        if args.gains:
            gains = formats.parse_gains(args.gains)
            formats.check_gains(sys, gains)
        else:
            v = decide_fts(sys, kind)
            if not v.is_fts:
                raise NotFts(f"system is not fixed-time stabilizable under {kind.value} feedback")
            gains = v.witness
        cert = decay_certificate(sys, gains, rho)
        report["certificate"] = {
            "rho": fs(cert.rho),
            "C": fs(cert.C),
            "mu": fs(cert.mu),
            "horizon": cert.horizon,
            "gains": formats.gains_to_dict(gains),
        }
    else:
        out = {}
        for kind in _modes(args.mode):
            v = arbitrarily_fast(sys, kind)
            out[kind.value] = {"arbitrarily_fast": v.arbitrarily_fast, "fts_horizon": v.fts_horizon}
            if not v.arbitrarily_fast:
                code = EXIT_NEGATIVE
        report["rate_verdicts"] = out
    return report, code


def cmd_figures(args) -> tuple[dict, int]:
    """Trajectory figures in the style of the worked example: MD path, MI paths, MI norm decay."""
    from .plotting import plot_norm_log, plot_states

    sys, report = _load(args)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    x0 = _vector(args.x0) if args.x0 else (Fraction(1),) * sys.n
    files = {}
    md = decide_fts(sys, ModeKind.MD)
    mi = decide_fts(sys, ModeKind.MI)
    if md.witness is not None:
        traj = adversarial_decay(sys, md.witness, x0, args.steps).trajectory
        formats.write_trajectory_csv(traj, out / "md_trajectory.csv")
        subspaces = [md.ladder.E(k) for k in range(1, md.ladder.p)]
        plot_states([traj], out / "md_trajectory.svg", labels=["MD closed loop"], subspaces=subspaces)
        files["md"] = ["md_trajectory.csv", "md_trajectory.svg"]
    if mi.witness is not None:
        Ep = mi.ladder.fixed_point
        inside = Ep.vectors()[0]
        generic = adversarial_decay(sys, mi.witness, x0, args.steps).trajectory
        fixed = adversarial_decay(sys, mi.witness, inside, args.steps).trajectory
        formats.write_trajectory_csv(generic, out / "mi_generic.csv")
        formats.write_trajectory_csv(fixed, out / "mi_fixed_point.csv")
        plot_states([fixed, generic], out / "mi_trajectories.svg",
                    labels=["x0 in E_p", "generic x0"], subspaces=[Ep])
        plot_norm_log([generic], out / "mi_norm.svg", labels=["generic x0"])
        files["mi"] = ["mi_generic.csv", "mi_fixed_point.csv", "mi_trajectories.svg", "mi_norm.svg"]
    report["figures"] = {"outdir": str(out), "files": files}
    return report, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=["md", "mi", "both"], default=None)
    common.add_argument("--reduce-inputs", action="store_true", help="drop redundant input directions first")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--budget", type=int, default=10**6, help="max sequence-state pairs to enumerate")

    parser = argparse.ArgumentParser(prog="switchfts", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="ladders, FTS verdicts and gains")
    p.add_argument("system")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("decompose", parents=[common], help="normal form (default --mode mi)")
    p.add_argument("system")
    p.add_argument("--xi-out", help="write the residual system to this file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("simulate", parents=[common], help="closed-loop trajectory")
    p.add_argument("system")
    p.add_argument("--gains", default="analysis", help="'analysis' (synthesized) or a gains file")
    p.add_argument("--sigma", default="adversarial", help="'adversarial', 'random:SEED' or '1,2,1,...'")
    p.add_argument("--x0", help="comma-separated initial state (default all ones)")
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--csv")
    p.add_argument("--plot", help="SVG path for the log-scale norm plot")
    p.add_argument("--plot-states", help="SVG path for the state-space path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="exhaustive check of gains over all switching sequences")
    p.add_argument("system")
    p.add_argument("--gains", default="analysis")
    p.add_argument("--horizon", type=int, help="default: the ladder's fixed-point index")
    p.add_argument("--initial", default="basis",
                   help="'basis', 'ladder' (basis of the fixed point) or 'x;y;...' vectors")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rate", parents=[common], help="growth-rate analysis")
    p.add_argument("system")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--scalar", action="store_true", help="exact minimal rate of a scalar system")
    g.add_argument("--lower-bound", nargs=2, metavar=("SAMPLES", "SEED"))
    g.add_argument("--certificate", metavar="RHO", help="decay constants (C, rho) for FTS gains")
    p.add_argument("--gains", help="gains file for --certificate (default: synthesized)")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("figures", parents=[common], help="trajectory CSVs and SVG figures")
    p.add_argument("system")
    p.add_argument("--outdir", default="figures")
    p.add_argument("--x0")
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv=None) -> int:
    argv = list(_sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        report, code = args.func(args)
    except (CliError, formats.ParseError, BudgetExceeded, NotFts, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=_sys.stderr)
        return EXIT_ERROR
    print(json.dumps(report, indent=2))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
