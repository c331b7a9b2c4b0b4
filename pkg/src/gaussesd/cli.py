"""Command-line front end.

Subcommands: evolve, esd, sweep, oracle-check, dump-config.
Exit codes: 0 ok, 2 config error, 3 physics-domain error, 4 oracle failure.
All numeric output is rendered with 12 significant digits; identical
configurations produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import fock
from .channel import ChannelParams, evolve, sample_trajectory
from .config import (
    OutputSpec,
    RunConfig,
    TimeGrid,
    dump_config,
    parse_config_file,
)
from .errors import (
    ConfigError,
    CutoffInsufficient,
    GaussEsdError,
    NonNegligibleImaginaryPart,
    StepTooLarge,
)
from .esd import (
    EsdKind,
    initial_entanglement_threshold,
    t_esd_analytic_symmetric,
    t_esd_numeric,
)
from .states import GaussianParams, cm_from_params, simon_criterion

SIGN_TOL = 1e-12

MOMENT_FIELDS = ("n1", "n2", "m1", "m2", "ms", "mc")


def _fmt(x) -> str:
    if isinstance(x, int):
        return str(x)
    value = float(x)
    if value == 0.0:
        value = 0.0  # normalize -0.0
    return format(value, ".12g")


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _render_table(header: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(header)]
        lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
        return "\n".join(lines) + "\n"
    body = ",\n".join(
        "    [" + ", ".join(_fmt(cell) for cell in row) + "]" for row in rows
    )
    cols = ", ".join(f'"{name}"' for name in header)
    return "{\n  \"columns\": [" + cols + "],\n  \"rows\": [\n" + body + "\n  ]\n}\n"


def _sign(s: float) -> int:
    return 1 if s > SIGN_TOL else (-1 if s < -SIGN_TOL else 0)


def _load_config(args) -> RunConfig:
    cfg = parse_config_file(args.config) if args.config else RunConfig()
    if getattr(args, "t_max", None) is not None:
        cfg = RunConfig(
            state=cfg.state,
            channel=cfg.channel,
            time=TimeGrid(t_max=args.t_max, n_points=cfg.time.n_points),
            sweep=cfg.sweep,
            output=cfg.output,
            oracle=cfg.oracle,
        )
    out_path = args.out if getattr(args, "out", None) else cfg.output.path
    out_fmt = args.format if getattr(args, "format", None) else cfg.output.format
    return RunConfig(
        state=cfg.state,
        channel=cfg.channel,
        time=cfg.time,
        sweep=cfg.sweep,
        output=OutputSpec(path=out_path, format=out_fmt),
        oracle=cfg.oracle,
    )


def cmd_evolve(args) -> int:
    cfg = _load_config(args)
    traj = sample_trajectory(cfg.state, cfg.channel, cfg.time.t_max, cfg.time.n_points)
    header = ["t", "n1", "n2", "m1", "m2", "ms", "mc", "S"]
    rows = [
        [t, cm.n1, cm.n2, cm.m1, cm.m2, cm.ms, cm.mc, s]
        for t, cm, s in zip(traj.times, traj.states, traj.simon)
    ]
    _write_text(cfg.output.path, _render_table(header, rows, cfg.output.format))
    return 0


def _analytic_applicable(cfg: RunConfig) -> bool:
    p, ch = cfg.state, cfg.channel
    return (
        p.z1 == p.z2
        and p.nu1 == 0.0
        and p.nu2 == 0.0
        and p.r > 0.0
        and ch.nb1 == 0.0
        and ch.nb2 == 0.0
        and ch.gamma1 == ch.gamma2
    )


def cmd_esd(args) -> int:
    cfg = _load_config(args)
    numeric = t_esd_numeric(cfg.state, cfg.channel, cfg.time.t_max)
    lines = [f"kind: {numeric.kind.value}"]
    if numeric.t_esd is not None:
        lines.append(f"t_esd_numeric: {_fmt(numeric.t_esd)}")

    analytic = None
    if _analytic_applicable(cfg):
        analytic = t_esd_analytic_symmetric(cfg.state.z1, cfg.state.r, cfg.channel.gamma1)
        lines.append(f"kind_analytic: {analytic.kind.value}")
        if analytic.t_esd is not None:
            lines.append(f"t_esd_analytic: {_fmt(analytic.t_esd)}")
        if numeric.t_esd is not None and analytic.t_esd is not None:
            rel = abs(numeric.t_esd - analytic.t_esd) / analytic.t_esd
            lines.append(f"relative_difference: {_fmt(rel)}")
    else:
        lines.append("kind_analytic: not-applicable")

    if cfg.state.z1 == 0.0 and cfg.state.z2 == 0.0:
        r_min = initial_entanglement_threshold(cfg.state.nu1, cfg.state.nu2)
        lines.append(f"initial_entanglement_threshold: {_fmt(r_min)}")

    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if cfg.output.path != "-":
        rows = [[line.split(": ")[0], line.split(": ")[1]] for line in lines]
        _write_text(cfg.output.path, _render_table(["field", "value"], rows, cfg.output.format))
    return 0


def _sweep_row_task(task):
    index, variable, value, state, channel, times = task
    if variable == "z0":
        p = GaussianParams(z1=value, z2=value, r=state.r, nu1=state.nu1, nu2=state.nu2)
    else:
        p = GaussianParams(z1=state.z1, z2=state.z2, r=value, nu1=state.nu1, nu2=state.nu2)
    rows = []
    for t in times:
        s = simon_criterion(evolve(p, channel, t))
        rows.append([value, t, s, _sign(s)])
    return index, rows


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    if cfg.sweep is None:
        raise ConfigError("sweep command requires a [sweep] section in the config")
    sweep = cfg.sweep
    values = sweep.values()
    times = [cfg.time.t_max * i / (cfg.time.n_points - 1) for i in range(cfg.time.n_points)]

    if sweep.variable == "nu":
        header = ["nu1", "nu2", "S0", "sign"]
        rows = []
        for nu1 in values:
            for nu2 in values:
                p = GaussianParams(z1=cfg.state.z1, z2=cfg.state.z2, r=cfg.state.r,
                                   nu1=nu1, nu2=nu2)
                s = simon_criterion(cm_from_params(p))
                rows.append([nu1, nu2, s, _sign(s)])
    elif sweep.variable == "t":
        header = ["t", "S", "sign"]
        rows = []
        for t in values:
            s = simon_criterion(evolve(cfg.state, cfg.channel, t))
            rows.append([t, s, _sign(s)])
    else:
        header = [sweep.variable, "t", "S", "sign"]
        tasks = [
            (i, sweep.variable, value, cfg.state, cfg.channel, times)
            for i, value in enumerate(values)
        ]
        workers = args.workers if args.workers else (os.cpu_count() or 1)
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_sweep_row_task, tasks, chunksize=4))
        else:
            results = [_sweep_row_task(task) for task in tasks]
        results.sort(key=lambda item: item[0])
        rows = [row for _, chunk in results for row in chunk]

    _write_text(cfg.output.path, _render_table(header, rows, cfg.output.format))
    return 0


# Default verification suite for oracle-check: inside the certified domain
# and passing the strict tail gate at cutoff 20.
DEFAULT_ORACLE_SUITE = (
    (0.0, 0.3, 0.0),
    (0.2, 0.3, 0.25),
    (0.2, 0.5, 0.5),
)
ORACLE_GAMMA = 0.25
ORACLE_GAMMA_T = (0.5, 1.0, 2.0)
ADVISORY_TAIL_TOL = 1e-3


def _oracle_single(p, ch, times, cutoff, dt, tail_tol):
    """Integrate one configuration, returning rows (t, per-moment deviation,
    max deviation) against the closed-form evolution."""
    rows = []
    rho = fock.build_initial_state(p, cutoff, tail_tol=tail_tol)
    t_prev = 0.0
    worst = 0.0
    for t in times:
        rho = fock.integrate(rho, ch, t - t_prev, dt=dt, tail_tol=tail_tol)
        t_prev = t
        got = fock.moments(rho)
        want = evolve(p, ch, t)
        devs = [abs(getattr(got, f) - getattr(want, f)) for f in MOMENT_FIELDS]
        worst = max(worst, max(devs))
        rows.append([t] + devs + [max(devs)])
    return rows, worst


def cmd_oracle_check(args) -> int:
    cfg = _load_config(args)
    cutoff = cfg.oracle.cutoff
    dt = cfg.oracle.dt if cfg.oracle.dt > 0 else None

    if args.config:
        gamma_max = max(cfg.channel.gamma1, cfg.channel.gamma2)
        times = cfg.oracle.times or tuple(gt / gamma_max for gt in ORACLE_GAMMA_T)
        suite = [(cfg.state, cfg.channel, tuple(sorted(times)))]
    else:
        suite = [
            (
                GaussianParams.symmetric(z, r),
                ChannelParams.symmetric(ORACLE_GAMMA, nb),
                tuple(gt / ORACLE_GAMMA for gt in ORACLE_GAMMA_T),
            )
            for z, r, nb in DEFAULT_ORACLE_SUITE
        ]

    header = ["config", "t"] + [f"dev_{f}" for f in MOMENT_FIELDS] + ["max_dev"]
    rows = []
    advisory = False
    worst = 0.0
    for idx, (p, ch, times) in enumerate(suite):
        inside = all(
            fock.in_certified_domain(p, ch, t, cutoff) for t in times
        )
        tail_tol = fock.TAIL_TOL
        if not inside:
            advisory = True
            tail_tol = ADVISORY_TAIL_TOL
            sys.stderr.write(
                "warning: parameters outside certified domain; output is advisory\n"
            )
        chunk, chunk_worst = _oracle_single(p, ch, times, cutoff, dt, tail_tol)
        worst = max(worst, chunk_worst)
        for row in chunk:
            rows.append([idx] + row)

    table = _render_table(header, rows, cfg.output.format)
    sys.stdout.write(table)
    sys.stdout.write(f"max_deviation: {_fmt(worst)}\n")
    if cfg.output.path != "-":
        _write_text(cfg.output.path, table)

    if advisory:
        sys.stdout.write("status: advisory (outside certified domain)\n")
        return 0
    if worst >= 1e-3:
        sys.stdout.write("status: FAIL (deviation >= 1e-3)\n")
        return 4
    sys.stdout.write("status: pass\n")
    return 0


def cmd_dump_config(args) -> int:
    cfg = _load_config(args)
    text = dump_config(cfg)
    _write_text(cfg.output.path if cfg.output.path != "-" else "-", text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussesd",
        description="Two-mode Gaussian states in thermal channels: evolution, "
        "separability, entanglement sudden death.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, desc in (
        ("evolve", cmd_evolve, "write the evolved moments and Simon value on a time grid"),
        ("esd", cmd_esd, "classify the entanglement decay and report separation times"),
        ("sweep", cmd_sweep, "emit grid data for parameter sweeps"),
        ("oracle-check", cmd_oracle_check, "compare closed forms against the Fock integrator"),
        ("dump-config", cmd_dump_config, "print the fully explicit configuration"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", metavar="PATH", help="configuration file")
        p.add_argument("--out", metavar="PATH", help="output path ('-' for stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        p.add_argument("--workers", type=int, default=0,
                       help="worker processes for sweeps (default: CPU count)")
        p.add_argument("--t-max", type=float, dest="t_max", help="override [time] t_max")
        p.add_argument("--seed", type=int, help="reserved; dynamics are deterministic")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except (CutoffInsufficient, StepTooLarge, NonNegligibleImaginaryPart) as exc:
        sys.stderr.write(f"oracle error: {exc}\n")
        return 4
    except (GaussEsdError, ValueError, OverflowError) as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
