"""Command-line interface.

Commands: decompose, kernel, evolve, compose, verify. All numeric
output is printed with %.12e formatting (locale-independent); identical
inputs produce byte-identical output. Exit codes: 0 ok, 1 verification
failure, 2 parse error, 3 focal point, 4 boundary leak.
"""

from __future__ import annotations

import argparse
import functools
import json
import sys
from dataclasses import dataclass, field

from .errors import BoundaryLeakError, FocalPointError
from .lie_core import QuadraticGenerator, normal_order, to_su11
from .oracle import Grid, grid_evolve
from .propagator import GaussianWavepacket, convolve, kernel_from_abcd
from .symplectic import (
    AbcdMatrix,
    ScheduleError,
    abcd_from_generator,
    compose,
    load_schedule,
    sr_from_abcd,
)
from .verify import run_all
from .coherent_iwop import kernel_via_iwop

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_FOCAL_POINT = 3
EXIT_BOUNDARY_LEAK = 4


@dataclass
class RunConfig:
    """Parsed invocation: one command plus its inputs and output routing."""

    command: str
    generator: QuadraticGenerator | None = None
    q: float = 0.0
    big_q: float = 0.0
    check: bool = False
    schedule_path: str | None = None
    packet: GaussianWavepacket | None = None
    x_min: float = -40.0
    x_max: float = 40.0
    n_points: int = 4096
    steps: int = 1000
    out_format: str = "text"
    output: str | None = None
    inject_fault: bool = False
    lines: list[str] = field(default_factory=list, repr=False)


def _fmt(x: float) -> str:
    return "%.12e" % x


def _fmt_complex(z: complex) -> str:
    return f"{_fmt(z.real)} {_fmt(z.imag)}"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_decompose(cfg: RunConfig) -> int:
    g = cfg.generator
    p = to_su11(g)
    f = normal_order(g)
    m = abcd_from_generator(g)
    res_u = abs(f.s) ** 2 - abs(f.r) ** 2 - 1.0
    res_s = m.det() - 1.0
    if cfg.out_format == "json":
        payload = {
            "tau": {"re": p.tau.real, "im": p.tau.imag},
            "sigma": p.sigma,
            "delta_sq": p.delta_sq,
            "s": {"re": f.s.real, "im": f.s.imag},
            "r": {"re": f.r.real, "im": f.r.imag},
            "abcd": {"a": m.a, "b": m.b, "c": m.c, "d": m.d},
            "residual_unitarity": res_u,
            "residual_symplectic": res_s,
        }
        _emit(cfg, _json_dump(payload))
    else:
        lines = [
            f"tau                 = {_fmt_complex(p.tau)}",
            f"sigma               = {_fmt(p.sigma)}",
            f"delta_sq            = {_fmt(p.delta_sq)}",
            f"s                   = {_fmt_complex(f.s)}",
            f"r                   = {_fmt_complex(f.r)}",
            f"A                   = {_fmt(m.a)}",
            f"B                   = {_fmt(m.b)}",
            f"C                   = {_fmt(m.c)}",
            f"D                   = {_fmt(m.d)}",
            f"residual_unitarity  = {_fmt(res_u)}",
            f"residual_symplectic = {_fmt(res_s)}",
        ]
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_kernel(cfg: RunConfig) -> int:
    g = cfg.generator
    value = kernel_from_abcd(abcd_from_generator(g)).evaluate(cfg.q, cfg.big_q)
    diff = None
    if cfg.check:
        diff = abs(value - kernel_via_iwop(g, cfg.q, cfg.big_q))
    if cfg.out_format == "json":
        payload = {"re": value.real, "im": value.imag}
        if diff is not None:
            payload["check_diff"] = diff
        _emit(cfg, _json_dump(payload))
    else:
        lines = [_fmt_complex(value)]
        if diff is not None:
            lines.append(f"check_diff = {_fmt(diff)}")
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_evolve(cfg: RunConfig) -> int:
    schedule = load_schedule(cfg.schedule_path)
    packet = cfg.packet
    grid0 = Grid.from_wavepacket(
        packet, x_min=cfg.x_min, x_max=cfg.x_max, n_points=cfg.n_points,
        dt=1.0 / cfg.steps,
    )

    if schedule:
        grid = grid_evolve(schedule, grid0, steps=cfg.steps)
        total = functools.reduce(lambda acc, g: compose(abcd_from_generator(g), acc),
                                 schedule, AbcdMatrix.identity())
        state = convolve(kernel_from_abcd(total), packet)
        kernel_route = state.evaluate(grid.x)
    else:
        # Nothing to apply: both routes are the initial packet itself.
        grid = grid0
        kernel_route = packet.evaluate(grid.x)

    x = grid.x
    grid_route = grid.amplitudes
    diff = abs(kernel_route - grid_route)
    l2 = float((diff**2).sum() ** 0.5 * grid.spacing**0.5)

    rows = ["x,re_kernel_route,im_kernel_route,re_grid_route,im_grid_route,abs_diff"]
    for i in range(x.size):
        rows.append(
            ",".join(
                (
                    _fmt(x[i]),
                    _fmt(kernel_route[i].real),
                    _fmt(kernel_route[i].imag),
                    _fmt(grid_route[i].real),
                    _fmt(grid_route[i].imag),
                    _fmt(diff[i]),
                )
            )
        )
    rows.append(f"l2_diff,{_fmt(l2)}")
    _emit(cfg, "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_compose(cfg: RunConfig) -> int:
    schedule = load_schedule(cfg.schedule_path)
    total = functools.reduce(lambda acc, g: compose(abcd_from_generator(g), acc),
                             schedule, AbcdMatrix.identity())
    f = sr_from_abcd(total)
    res = total.det() - 1.0
    if cfg.out_format == "json":
        payload = {
            "abcd": {"a": total.a, "b": total.b, "c": total.c, "d": total.d},
            "s": {"re": f.s.real, "im": f.s.imag},
            "r": {"re": f.r.real, "im": f.r.imag},
            "residual_symplectic": res,
            "steps": len(schedule),
        }
        _emit(cfg, _json_dump(payload))
    else:
        lines = [
            f"steps               = {len(schedule)}",
            f"A                   = {_fmt(total.a)}",
            f"B                   = {_fmt(total.b)}",
            f"C                   = {_fmt(total.c)}",
            f"D                   = {_fmt(total.d)}",
            f"s                   = {_fmt_complex(f.s)}",
            f"r                   = {_fmt_complex(f.r)}",
            f"residual_symplectic = {_fmt(res)}",
        ]
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    summary = run_all(inject_fault=cfg.inject_fault)
    _emit(cfg, _json_dump(summary))
    return EXIT_OK if summary["pass"] else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadprop",
        description="Gaussian propagators of quadratic Hamiltonians",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_generator(p):
        p.add_argument("alpha", type=float, help="coefficient of p^2")
        p.add_argument("beta", type=float, help="coefficient of qp+pq")
        p.add_argument("gamma", type=float, help="coefficient of q^2")

    def add_output(p):
        p.add_argument("-o", "--output", default=None, help="write to file instead of stdout")

    p = sub.add_parser("decompose", help="su(1,1) parameters, (s, r) factors and ABCD matrix")
    add_generator(p)
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    add_output(p)

    p = sub.add_parser("kernel", help="propagator kernel value K(Q, q)")
    add_generator(p)
    p.add_argument("q", type=float, help="initial coordinate")
    p.add_argument("Q", type=float, help="final coordinate")
    p.add_argument("--check", action="store_true",
                   help="recompute through the coherent-state route and report the difference")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    add_output(p)

    p = sub.add_parser("evolve", help="wavepacket evolution, kernel route vs grid route, CSV")
    p.add_argument("schedule", help="step-schedule file (alpha beta gamma per line)")
    p.add_argument("--center-q", type=float, default=0.0)
    p.add_argument("--center-p", type=float, default=1.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--packet-phase", type=float, default=0.0)
    p.add_argument("--x-min", type=float, default=-40.0)
    p.add_argument("--x-max", type=float, default=40.0)
    p.add_argument("--n-points", type=int, default=4096)
    p.add_argument("--steps", type=int, default=1000,
                   help="Crank-Nicolson sub-steps per schedule entry")
    add_output(p)

    p = sub.add_parser("compose", help="compose a schedule into one ABCD matrix")
    p.add_argument("schedule", help="step-schedule file")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    add_output(p)

    p = sub.add_parser("verify", help="run every invariant suite, JSON summary")
    p.add_argument("--inject-fault", action="store_true",
                   help="perturb one check on purpose (harness self-test)")
    add_output(p)

    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    cfg.output = getattr(args, "output", None)
    if args.command in ("decompose", "kernel"):
        cfg.generator = QuadraticGenerator(args.alpha, args.beta, args.gamma)
        cfg.out_format = "json" if args.json else "text"
    if args.command == "kernel":
        cfg.q = args.q
        cfg.big_q = args.Q
        cfg.check = args.check
    if args.command == "evolve":
        cfg.schedule_path = args.schedule
        cfg.packet = GaussianWavepacket(
            center_q=args.center_q,
            center_p=args.center_p,
            width=args.width,
            phase=args.packet_phase,
        )
        cfg.x_min = args.x_min
        cfg.x_max = args.x_max
        cfg.n_points = args.n_points
        cfg.steps = args.steps
        cfg.out_format = "csv"
    if args.command == "compose":
        cfg.schedule_path = args.schedule
        cfg.out_format = "json" if args.json else "text"
    if args.command == "verify":
        cfg.inject_fault = args.inject_fault
        cfg.out_format = "json"
    return cfg


_DISPATCH = {
    "decompose": cmd_decompose,
    "kernel": cmd_kernel,
    "evolve": cmd_evolve,
    "compose": cmd_compose,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        return _DISPATCH[cfg.command](cfg)
    except (ScheduleError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FocalPointError as exc:
        print(f"focal point: B=0 ({exc})", file=sys.stderr)
        return EXIT_FOCAL_POINT
    except BoundaryLeakError as exc:
        print(f"boundary leak: {exc}", file=sys.stderr)
        return EXIT_BOUNDARY_LEAK


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
