"""Command-line front end.

Subcommands: simulate, gvp, gas, dermoune, fuzz.  All tables are CSV with a
fixed header and 17-significant-digit floats, so re-running with identical
input and flags is byte-identical and every float round-trips.  Exit codes:
0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import gas as gaslib
from .dynamics import ShockTimeline, simulate
from .errors import InadmissibleData, StickyError
from .flow import dermoune_identity_residuals, right_derivative_check
from .gvp import gvp_equivalence_check
from .instances import Instance, instance_document, load_instance, random_instance
from .testfunctions import covering_test_functions
from .tolerances import Tolerances
from .verify import (
    conservation_suite,
    horizon_of,
    inject_velocity_fault,
    run_instance_suites,
)

OK, VERIFICATION_FAILURE, INPUT_ERROR = 0, 1, 2


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_manifest(out_dir: Path, command: str, instance_text: str | None,
                    params: dict, outputs: list[str]) -> None:
    doc = {
        "command": command,
        "instance": json.loads(instance_text) if instance_text else None,
        "parameters": params,
        "outputs": sorted(outputs),
    }
    (out_dir / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _intervals_str(intervals) -> str:
    return "|".join(f"{g}-{d}" for g, d in intervals)


def _effective_t_end(args_t_end, inst: Instance, timeline: ShockTimeline) -> float:
    if args_t_end is not None:
        return args_t_end
    if inst.t_end is not None:
        return inst.t_end
    return horizon_of(timeline)


def _load(args) -> tuple[Instance, Tolerances]:
    inst = load_instance(args.instance)
    tol = inst.tolerances
    if args.tol_abs is not None or args.tol_rel is not None:
        tol = Tolerances(
            abs_tol=args.tol_abs if args.tol_abs is not None else tol.abs_tol,
            rel_tol=args.tol_rel if args.tol_rel is not None else tol.rel_tol,
        )
    return inst, tol


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    inst, tol = _load(args)
    out = _out_dir(args)
    timeline = simulate(inst.data, tol=tol)
    t_end = _effective_t_end(args.t_end, inst, timeline)

    event_rows = []
    for e in timeline.events:
        if e.time > t_end:
            continue
        for grp in e.groups:
            c = grp.merged
            event_rows.append([
                e.time, c.left_index, c.right_index,
                ";".join(f"{g}-{d}" for g, d in grp.members),
                c.mass, c.acceleration, c.velocity_at_formation, c.position_at_formation,
            ])
    _write_csv(out / "events.csv",
               ["time", "left_index", "right_index", "members",
                "mass", "acceleration", "velocity", "position"],
               event_rows)

    ts = sorted(set(np.linspace(0.0, t_end, args.samples).tolist())
                | {s for s in timeline.event_times if s <= t_end})
    xs = timeline.sample_positions(ts)
    vs = timeline.sample_velocities(ts)
    n = inst.data.n
    rows = []
    for i, t in enumerate(ts):
        accs = timeline.accelerations_at(t)
        rows.append([t, *xs[i], *vs[i], *accs])
    header = (["t"] + [f"x{j}" for j in range(n)] + [f"v{j}" for j in range(n)]
              + [f"theta{j}" for j in range(n)])
    _write_csv(out / "trajectory.csv", header, rows)

    _write_manifest(out, "simulate", instance_document(inst.data, inst.t_end, inst.seed),
                    {"t_end": t_end, "samples": args.samples,
                     "tol_abs": tol.abs_tol, "tol_rel": tol.rel_tol},
                    ["events.csv", "trajectory.csv"])
    return OK


def cmd_gvp(args) -> int:
    inst, tol = _load(args)
    if not inst.data.gvp_admissible:
        print("error: acceleration profile increases with position; the endpoint "
              "certification is only guaranteed for non-increasing profiles "
              "(an increasing pair re-crosses after its shock and the interval "
              "inequality fails beyond the second crossing)", file=sys.stderr)
        return INPUT_ERROR
    out = _out_dir(args)
    times = [float(s) for s in args.times.split(",")]
    report = gvp_equivalence_check(inst.data, times, tol)
    rows = []
    for e in report.entries:
        rows.append([
            e.time,
            "MATCH" if e.match else "MISMATCH",
            _intervals_str(e.simulated),
            _intervals_str(e.reconstructed) if e.reconstructed else "-",
            e.error or "",
            ";".join(str(i) for i in e.ties),
        ])
    _write_csv(out / "gvp_report.csv",
               ["time", "verdict", "simulated", "reconstructed", "error", "tie_indices"],
               rows)
    _write_manifest(out, "gvp", instance_document(inst.data, inst.t_end, inst.seed),
                    {"times": times, "tol_abs": tol.abs_tol, "tol_rel": tol.rel_tol},
                    ["gvp_report.csv"])
    return OK if report.all_match else VERIFICATION_FAILURE


def _residual_row(r: gaslib.ResidualReport) -> list:
    return [r.equation, r.test_function, r.window[0], r.window[1], r.lhs,
            r.transport, r.source, r.jump, r.residual, r.residual_without_jumps,
            r.quad_error, r.passes]


_RESIDUAL_HEADER = ["equation", "test_function", "t1", "t2", "lhs", "transport",
                    "source", "jump", "residual", "residual_without_jumps",
                    "quad_error", "passes"]


def cmd_gas(args) -> int:
    inst, tol = _load(args)
    out = _out_dir(args)
    try:
        t1s, t2s = args.window.split(":")
        t1, t2 = float(t1s), float(t2s)
    except ValueError:
        print(f"error: bad --window {args.window!r}, expected t1:t2", file=sys.stderr)
        return INPUT_ERROR
    timeline = simulate(inst.data, tol=tol)

    xs = np.concatenate([timeline.positions_at(t1), timeline.positions_at(t2)])
    pos_fs = covering_test_functions(xs, pad=0.5 * (1.0 + float(np.ptp(xs))))
    vs = np.concatenate([timeline.velocities_at(t1), timeline.velocities_at(t2),
                         timeline.velocities_at_left(t2)])
    vel_fs = covering_test_functions(vs, pad=0.5 * (1.0 + float(np.ptp(vs))))

    pos_rows, vel_rows = [], []
    all_pass = True
    for f in pos_fs:
        for r in gaslib.position_space_residuals(timeline, f, t1, t2):
            pos_rows.append(_residual_row(r))
            all_pass &= r.passes
    for f in vel_fs:
        for r in gaslib.velocity_space_residuals(timeline, f, t1, t2, tol=tol):
            vel_rows.append(_residual_row(r))
            all_pass &= r.passes
    _write_csv(out / "position_residuals.csv", _RESIDUAL_HEADER, pos_rows)
    _write_csv(out / "velocity_residuals.csv", _RESIDUAL_HEADER, vel_rows)

    cong_rows = []
    for tc in gaslib.velocity_coincidence_times(timeline, t2, tol):
        if not t1 <= tc <= t2:
            continue
        fields = gaslib.velocity_space_fields(timeline, tc, tol)
        for (v, wt), w, a in zip(fields.mu.atoms, fields.w, fields.a):
            if a > 0.0:
                cong_rows.append([tc, v, wt, w, a])
    _write_csv(out / "congestion.csv",
               ["t", "velocity", "weight", "w", "a"], cong_rows)

    _write_manifest(out, "gas", instance_document(inst.data, inst.t_end, inst.seed),
                    {"window": [t1, t2], "tol_abs": tol.abs_tol, "tol_rel": tol.rel_tol},
                    ["position_residuals.csv", "velocity_residuals.csv", "congestion.csv"])
    return OK if all_pass else VERIFICATION_FAILURE


def cmd_dermoune(args) -> int:
    inst, tol = _load(args)
    out = _out_dir(args)
    times = [float(s) for s in args.times.split(",")]
    timeline = simulate(inst.data, tol=tol)
    id_rows, der_rows = [], []
    all_pass = True
    for t in times:
        res = dermoune_identity_residuals(timeline, t)
        ok = (res.r_pos <= 1e-12 * (1.0 + res.scale_pos)
              and res.r_vel <= 1e-12 * (1.0 + res.scale_vel)
              and res.r_acc <= 1e-12 * (1.0 + res.scale_acc))
        all_pass &= ok
        id_rows.append([t, res.r_pos, res.r_vel, res.r_acc, ok])
        gap = timeline.time_to_next_event(t)
        h_list = [h for h in (1e-2, 1e-3, 1e-4) if h < gap]
        for probe in right_derivative_check(timeline, t, h_list).probes:
            der_rows.append([t, probe.h, probe.max_pos_error,
                             probe.max_pos_error_vs_predicted, probe.max_vel_error])
    _write_csv(out / "dermoune.csv",
               ["t", "r_pos", "r_vel", "r_acc", "passes"], id_rows)
    _write_csv(out / "derivatives.csv",
               ["t", "h", "pos_fd_error", "pos_fd_error_vs_predicted", "vel_fd_error"],
               der_rows)
    _write_manifest(out, "dermoune", instance_document(inst.data, inst.t_end, inst.seed),
                    {"times": times, "tol_abs": tol.abs_tol, "tol_rel": tol.rel_tol},
                    ["dermoune.csv", "derivatives.csv"])
    return OK if all_pass else VERIFICATION_FAILURE


def cmd_fuzz(args) -> int:
    if args.count < 1:
        print("error: --count must be at least 1", file=sys.stderr)
        return INPUT_ERROR
    out = _out_dir(args)
    rows = []
    failures = 0
    for k in range(args.count):
        rng = np.random.default_rng(args.seed + k)
        data = random_instance(rng, args.n_max)
        if args.inject_failure:
            timeline = inject_velocity_fault(simulate(data))
            results = [conservation_suite(timeline)]
        else:
            results = run_instance_suites(data, rng, with_oracle=args.with_oracle)
        failed = [r for r in results if not r.passed]
        if failed:
            failures += 1
            repro = out / f"failure_{args.seed + k}.json"
            repro.write_text(instance_document(data, seed=args.seed + k) + "\n")
        rows.append([args.seed + k, data.n,
                     ";".join(r.name for r in results if r.passed),
                     ";".join(f"{r.name}:{r.detail}" for r in failed)])
    rows.sort(key=lambda r: r[0])
    _write_csv(out / "fuzz_summary.csv", ["seed", "n", "passed", "failed"], rows)
    _write_manifest(out, "fuzz", None,
                    {"count": args.count, "n_max": args.n_max, "seed": args.seed,
                     "inject_failure": args.inject_failure},
                    ["fuzz_summary.csv"])
    print(f"{args.count - failures}/{args.count} instances passed")
    return OK if failures == 0 else VERIFICATION_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stickygas",
        description="Sticky-particle simulation, variational partition checks, "
                    "and weak-solution residuals.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("instance", help="instance JSON file")
        p.add_argument("--out-dir", required=True, help="output directory")
        p.add_argument("--tol-abs", type=float, default=None)
        p.add_argument("--tol-rel", type=float, default=None)

    p = sub.add_parser("simulate", help="run the dynamics, export events and trajectories")
    common(p)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gvp", help="compare variational partitions against simulation")
    common(p)
    p.add_argument("--times", required=True, help="comma-separated times")
    p.set_defaults(func=cmd_gvp)

    p = sub.add_parser("gas", help="weak-solution residual tables over a window")
    common(p)
    p.add_argument("--window", required=True, help="t1:t2")
    p.set_defaults(func=cmd_gas)

    p = sub.add_parser("dermoune", help="conditional-expectation identity residuals")
    common(p)
    p.add_argument("--times", required=True, help="comma-separated times")
    p.set_defaults(func=cmd_dermoune)

    p = sub.add_parser("fuzz", help="randomized verification campaign")
    common(p, instance=False)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--with-oracle", action="store_true",
                   help="also run the time-stepped oracle comparison")
    p.add_argument("--inject-failure", action="store_true",
                   help="perturb a merged velocity to confirm the harness detects it")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except InadmissibleData as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except StickyError as exc:
        print(f"error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
