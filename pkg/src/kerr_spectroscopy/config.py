"""Run configuration files.

The format is INI (``configparser``) with the sections below.  Frequencies
are written in the unit named by ``[frequencies] units``: ``MHz-ordinary``
(values are f, converted to 2*pi*f rad/us) or ``rad/us`` (used as is).  The
conversion happens once, in :meth:`RunConfig.system_params` and friends;
:class:`RunConfig` itself keeps the numbers as written so that
``parse_config(cfg.to_text()) == cfg``.

    [frequencies]   units, omega, omega_rot*, omega_drive*, kerr*
    [couplings]     g, J12, J13, J14, J23, J24, J34
    [drive]         lambda, lambda_2
    [dissipation]   gamma
    [sweep]         delta_min, delta_max, n_points, T, observable_mode*,
                    initial_state*, prominence*, merge_radius*,
                    assign_tolerance*, workers*
    [solver]        method*, dt_max*, rel_tol*, abs_tol*, record_stride*
    [output]        directory*, csv*, svg*, transitions*, peaks*

Keys marked * are optional.  Vectors are four comma-separated numbers;
``omega`` holds the shifted frequencies.  ``T`` and ``dt_max`` are in us.
``initial_state`` is four occupation digits, mode 1 first (``0000``).
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import SystemParams, coupling_matrix
from .lindblad import SolverConfig
from .spectroscopy import DEFAULT_PROMINENCE, SweepPlan

UNITS = {"MHz-ordinary": 2 * math.pi, "rad/us": 1.0}
PAIRS = ("J12", "J13", "J14", "J23", "J24", "J34")


class ConfigError(ValueError):
    """Malformed configuration text; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


def to_internal(value: float, units: str) -> float:
    return value * UNITS[units]


def from_internal(value: float, units: str) -> float:
    return value / UNITS[units]


Vec4 = tuple[float, float, float, float]


@dataclass(frozen=True)
class RunConfig:
    """Everything a sweep needs, in the units written in the file."""

    omega: Vec4
    g: float
    J: dict
    lambda_rabi: float
    lambda_probe: float
    gamma: float
    delta_min: float
    delta_max: float
    n_points: int
    T: float
    units: str = "MHz-ordinary"
    omega_rot: Vec4 | None = None
    omega_drive: Vec4 | None = None
    kerr: Vec4 = (0.0, 0.0, 0.0, 0.0)
    observable_mode: int = 4
    initial_state: str = "0000"
    prominence: float = DEFAULT_PROMINENCE
    merge_radius: float | None = None
    assign_tolerance: float | None = None
    workers: int = 1
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_dir: str = "results"
    write_csv: bool = True
    write_svg: bool = True
    write_transitions: bool = True
    write_peaks: bool = True

    def __post_init__(self):
        if self.units not in UNITS:
            raise ConfigError(f"unknown units {self.units!r}; use one of {sorted(UNITS)}")
        if set(self.J) != set(PAIRS):
            raise ConfigError(f"couplings need exactly {', '.join(PAIRS)}")
        if not re.fullmatch(r"[01]{4}", self.initial_state):
            raise ConfigError(f"initial_state must be four 0/1 digits, got {self.initial_state!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not 0 < self.prominence < 1:
            raise ConfigError("prominence must lie in (0, 1)")

    def _f(self, x):
        return to_internal(x, self.units)

    def _vec(self, v):
        return None if v is None else np.array([self._f(x) for x in v])

    def system_params(self) -> SystemParams:
        """Physical parameters in rad/us with the probe on resonance."""
        J = coupling_matrix(**{k: self._f(v) for k, v in self.J.items()})
        return SystemParams.from_shifted(
            self._vec(self.omega),
            J,
            g=self._f(self.g),
            lambda_rabi=self._f(self.lambda_rabi),
            lambda_probe=self._f(self.lambda_probe),
            gamma=self._f(self.gamma),
            kerr=self._vec(self.kerr),
            omega_rot=self._vec(self.omega_rot),
            omega_drive=self._vec(self.omega_drive),
        )

    def sweep_plan(self) -> SweepPlan:
        return SweepPlan(
            self._f(self.delta_min),
            self._f(self.delta_max),
            self.n_points,
            self.T,
            self.observable_mode,
            tuple(int(c) for c in self.initial_state),
        )

    def peak_settings(self) -> tuple[float, float, float]:
        """(prominence, merge radius, assignment tolerance); radii default to gamma."""
        radius = self.gamma if self.merge_radius is None else self.merge_radius
        tol = radius if self.assign_tolerance is None else self.assign_tolerance
        return self.prominence, self._f(radius), self._f(tol)

    def validate(self) -> None:
        """Build every derived object, raising on the first violated invariant."""
        self.system_params()
        self.sweep_plan()

    def to_text(self) -> str:
        def num(x):
            return repr(float(x))

        def vec(v):
            return ", ".join(num(x) for x in v)

        def flag(b):
            return "yes" if b else "no"

        lines = ["[frequencies]", f"units = {self.units}", f"omega = {vec(self.omega)}"]
        if self.omega_rot is not None:
            lines.append(f"omega_rot = {vec(self.omega_rot)}")
        if self.omega_drive is not None:
            lines.append(f"omega_drive = {vec(self.omega_drive)}")
        lines.append(f"kerr = {vec(self.kerr)}")
        lines += ["", "[couplings]", f"g = {num(self.g)}"]
        lines += [f"{k} = {num(self.J[k])}" for k in PAIRS]
        lines += ["", "[drive]", f"lambda = {num(self.lambda_rabi)}", f"lambda_2 = {num(self.lambda_probe)}"]
        lines += ["", "[dissipation]", f"gamma = {num(self.gamma)}"]
        lines += [
            "", "[sweep]",
            f"delta_min = {num(self.delta_min)}",
            f"delta_max = {num(self.delta_max)}",
            f"n_points = {self.n_points}",
            f"T = {num(self.T)}",
            f"observable_mode = {self.observable_mode}",
            f"initial_state = {self.initial_state}",
            f"prominence = {num(self.prominence)}",
        ]
        if self.merge_radius is not None:
            lines.append(f"merge_radius = {num(self.merge_radius)}")
        if self.assign_tolerance is not None:
            lines.append(f"assign_tolerance = {num(self.assign_tolerance)}")
        lines.append(f"workers = {self.workers}")
        s = self.solver
        lines += [
            "", "[solver]",
            f"method = {s.method}",
            f"dt_max = {num(s.dt_max)}",
            f"rel_tol = {num(s.rel_tol)}",
            f"abs_tol = {num(s.abs_tol)}",
            f"record_stride = {s.record_stride}",
        ]
        lines += [
            "", "[output]",
            f"directory = {self.output_dir}",
            f"csv = {flag(self.write_csv)}",
            f"svg = {flag(self.write_svg)}",
            f"transitions = {flag(self.write_transitions)}",
            f"peaks = {flag(self.write_peaks)}",
        ]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        """SHA-256 of the canonical serialization."""
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)


SCHEMA = {
    "frequencies": ({"units", "omega"}, {"omega_rot", "omega_drive", "kerr"}),
    "couplings": ({"g", *PAIRS}, set()),
    "drive": ({"lambda", "lambda_2"}, set()),
    "dissipation": ({"gamma"}, set()),
    "sweep": (
        {"delta_min", "delta_max", "n_points", "T"},
        {"observable_mode", "initial_state", "prominence", "merge_radius", "assign_tolerance", "workers"},
    ),
    "solver": (set(), {"method", "dt_max", "rel_tol", "abs_tol", "record_stride"}),
    "output": (set(), {"directory", "csv", "svg", "transitions", "peaks"}),
}


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    """Line number of each (section, key) for error messages."""
    where, section = {}, None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.fullmatch(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
        elif section and line and line[0] not in "#;":
            key = re.split(r"[=:]", line, maxsplit=1)[0].strip()
            where[(section, key)] = n
    return where


def parse_config(text: str) -> RunConfig:
    """Parse configuration text into a :class:`RunConfig`.

    Raises :class:`ConfigError` for syntax and schema problems and
    :class:`~kerr_spectroscopy.hamiltonian.ParameterError` when the physical
    parameters violate an invariant.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("expected a [section] header", exc.lineno) from exc
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(exc.message.split(": ", 1)[-1], exc.lineno) from exc
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"cannot parse {exc.errors[0][1].strip()!r}", lineno) from exc
    lines = _key_lines(text)

    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", lines.get((section, None)))
        required, optional = SCHEMA[section]
        for key in cp[section]:
            if key not in required | optional:
                raise ConfigError(f"unknown key {key!r} in [{section}]", lines.get((section, key)))
    for section, (required, _) in SCHEMA.items():
        if required and section not in cp:
            raise ConfigError(f"missing section [{section}]")
        for key in sorted(required):
            if key not in cp[section]:
                raise ConfigError(f"missing key {key!r} in [{section}]")

    def get(section, key, convert, default=None):
        if section not in cp or key not in cp[section]:
            return default
        raw = cp[section][key]
        try:
            return convert(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}", lines.get((section, key))) from exc

    def number(raw):
        x = float(raw)
        if not math.isfinite(x):
            raise ValueError("not a finite number")
        return x

    def vec4(raw):
        parts = [p for p in re.split(r"[,\s]+", raw.strip()) if p]
        if len(parts) != 4:
            raise ValueError(f"expected 4 values, got {len(parts)}")
        return tuple(number(p) for p in parts)

    def integer(raw):
        return int(raw)

    def boolean(raw):
        lowered = raw.strip().lower()
        if lowered not in cp.BOOLEAN_STATES:
            raise ValueError("expected yes/no")
        return cp.BOOLEAN_STATES[lowered]

    def units(raw):
        raw = raw.strip()
        if raw not in UNITS:
            raise ValueError(f"use one of {', '.join(sorted(UNITS))}")
        return raw

    defaults = SolverConfig()
    try:
        solver = SolverConfig(
            dt_max=get("solver", "dt_max", number, defaults.dt_max),
            rel_tol=get("solver", "rel_tol", number, defaults.rel_tol),
            abs_tol=get("solver", "abs_tol", number, defaults.abs_tol),
            method=get("solver", "method", str.strip, defaults.method),
            record_stride=get("solver", "record_stride", integer, defaults.record_stride),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[solver] {exc}") from exc

    cfg = RunConfig(
        units=get("frequencies", "units", units),
        omega=get("frequencies", "omega", vec4),
        omega_rot=get("frequencies", "omega_rot", vec4),
        omega_drive=get("frequencies", "omega_drive", vec4),
        kerr=get("frequencies", "kerr", vec4, (0.0, 0.0, 0.0, 0.0)),
        g=get("couplings", "g", number),
        J={k: get("couplings", k, number) for k in PAIRS},
        lambda_rabi=get("drive", "lambda", number),
        lambda_probe=get("drive", "lambda_2", number),
        gamma=get("dissipation", "gamma", number),
        delta_min=get("sweep", "delta_min", number),
        delta_max=get("sweep", "delta_max", number),
        n_points=get("sweep", "n_points", integer),
        T=get("sweep", "T", number),
        observable_mode=get("sweep", "observable_mode", integer, 4),
        initial_state=get("sweep", "initial_state", str.strip, "0000"),
        prominence=get("sweep", "prominence", number, DEFAULT_PROMINENCE),
        merge_radius=get("sweep", "merge_radius", number),
        assign_tolerance=get("sweep", "assign_tolerance", number),
        workers=get("sweep", "workers", integer, 1),
        solver=solver,
        output_dir=get("output", "directory", str.strip, "results"),
        write_csv=get("output", "csv", boolean, True),
        write_svg=get("output", "svg", boolean, True),
        write_transitions=get("output", "transitions", boolean, True),
        write_peaks=get("output", "peaks", boolean, True),
    )
    try:
        cfg.sweep_plan()
    except ValueError as exc:
        raise ConfigError(f"[sweep] {exc}") from exc
    cfg.system_params()
    return cfg


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
