"""Command-line entry point.

    kerr-spectroscopy sweep <cfg> [--out DIR] [--workers N]
    kerr-spectroscopy transitions <cfg>
    kerr-spectroscopy eigensystem <cfg>
    kerr-spectroscopy validate <cfg>

``<cfg>`` is a path or the name of a bundled config (``fig3``, ``fig4.cfg``).
Exit codes: 0 success, 1 invalid configuration, 2 runtime failure, 64 usage.
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .analytic import analytic_eigensystem, transition_table
from .artifacts import format_transitions, mhz
from .config import ConfigError, RunConfig, parse_config
from .hamiltonian import ParameterError, build_qubit_h0
from .lindblad import IntegrationError
from .spectroscopy import SweepError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 64

EIGEN_TOL = 1e-9


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


def bundled_configs() -> list[str]:
    root = resources.files("kerr_spectroscopy") / "configs"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".cfg"))


def read_config_text(name: str) -> str:
    """Text of a config given as a path or as a bundled name."""
    path = Path(name)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    bundled = name if name.endswith(".cfg") else name + ".cfg"
    if path.parent == Path(".") and bundled in bundled_configs():
        return (resources.files("kerr_spectroscopy") / "configs" / bundled).read_text(encoding="utf-8")
    raise FileNotFoundError(f"no config file {name!r} (bundled: {', '.join(bundled_configs())})")


def load(name: str) -> RunConfig:
    return parse_config(read_config_text(name))


def _cmd_validate(cfg: RunConfig, args) -> int:
    cfg.validate()
    p = cfg.system_params()
    print(f"ok: omega_1 + omega_2 = {p.omega[0] + p.omega[1]:.9g}, omega_3 + omega_4 = {p.omega[2] + p.omega[3]:.9g} rad/us")
    return EXIT_OK


def _cmd_transitions(cfg: RunConfig, args) -> int:
    print(format_transitions(transition_table(cfg.system_params())))
    return EXIT_OK


def _cmd_eigensystem(cfg: RunConfig, args) -> int:
    params = cfg.system_params()
    system = analytic_eigensystem(params)
    h0 = build_qubit_h0(params)
    numeric = np.linalg.eigvalsh(h0)
    scale = max(1.0, float(np.abs(h0).max()))
    print(f"{'state':<6} {'analytic (MHz)':>16} {'numeric (MHz)':>16} {'|dE| (rad/us)':>14} {'residual':>10}")
    worst = 0.0
    for n in range(1, 7):
        e = system.energy(n)
        nearest = numeric[np.argmin(np.abs(numeric - e))]
        v = system.state(n)
        residual = float(np.linalg.norm(h0 @ v - e * v)) / scale
        worst = max(worst, abs(nearest - e), residual)
        print(f"E{n:<5} {mhz(e):>16.9f} {mhz(nearest):>16.9f} {abs(nearest - e):>14.3e} {residual:>10.2e}")
    if worst > EIGEN_TOL:
        print(f"analytic and numeric eigensystems disagree by {worst:.3e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_sweep(cfg: RunConfig, args) -> int:
    from .pipeline import run

    out = args.out if args.out is not None else cfg.output_dir
    result, manifest = run(cfg, out, workers=args.workers)
    for peak in result.peaks:
        label = "+".join(peak.assigned) if peak.assigned else "unassigned"
        print(f"peak at {mhz(peak.delta):+.4f} MHz  P_e = {peak.height:.4g}  {label}")
    print(f"wrote {', '.join(sorted(manifest.artifacts))} and manifest.json to {out}")
    return EXIT_OK


COMMANDS = {
    "sweep": (_cmd_sweep, "run the detuning sweep and write artifacts"),
    "transitions": (_cmd_transitions, "print the analytic transition table"),
    "eigensystem": (_cmd_eigensystem, "print E1..E6 with analytic-vs-numeric residuals"),
    "validate": (_cmd_validate, "check configuration invariants only"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kerr-spectroscopy", description="Four-body interaction spectroscopy of coupled Kerr resonators.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="config path or bundled name")
        if name == "sweep":
            p.add_argument("--out", help="output directory (default: [output] directory)")
            p.add_argument("--workers", type=int, help="worker processes (default: [sweep] workers)")
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "workers", None) is not None and args.workers < 1:
        print("kerr-spectroscopy: error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load(args.config)
    except (ConfigError, ParameterError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    handler, _ = COMMANDS[args.command]
    try:
        return handler(cfg, args)
    except (ConfigError, ParameterError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SweepError, IntegrationError, OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
