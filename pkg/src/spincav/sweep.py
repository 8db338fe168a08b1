"""Configuration, parameter sweeps and tabular output.

Config files are YAML with two optional sections::

    physical:
      wavelength_nm: 1550
      rotation_freq_kHz: 9.4      # both cavities; or rotation_freq_L_kHz / _R_kHz
    sweep:
      variable: detuning_Delta    # or rotation_freq
      start: -40                  # kappa units for detuning, Hz for rotation
      stop: 40
      num_points: 801
      directions: [cw, ccw]
      engine: both                # numeric | analytic | both
      cutoff: 4                   # or [n_max_L, n_max_R]

Every physical key carries its unit in the name; see :data:`PHYSICAL_KEYS`.
Omitted keys take the published device values.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import yaml

from . import analytic, observables
from .dynamics import RESIDUAL_TOL, SteadyStateError, build_hamiltonian, liouvillian, steady_state
from .fock import FockDims
from .params import Direction, PhysicalParams, ValidationError, derive_model, fizeau_shift, decay_rate

# config key -> (PhysicalParams field, multiplier to SI)
PHYSICAL_KEYS = {
    "wavelength_nm": ("wavelength_vacuum", 1e-9),
    "quality_factor_L": ("quality_factor_L", 1.0),
    "quality_factor_R": ("quality_factor_R", 1.0),
    "refractive_index_L": ("refractive_index_L", 1.0),
    "refractive_index_R": ("refractive_index_R", 1.0),
    "n2_m2_per_W": ("nonlinear_index_n2", 1.0),
    "mode_volume_um3": ("mode_volume_Veff", 1e-18),
    "radius_L_um": ("radius_L", 1e-6),
    "radius_R_um": ("radius_R", 1e-6),
    "rotation_freq_L_kHz": ("rotation_freq_L", 1e3),
    "rotation_freq_R_kHz": ("rotation_freq_R", 1e3),
    "power_fW": ("drive_power_Pin", 1e-15),
    "dn_dlambda_per_m": ("dispersion_dn_dlambda", 1.0),
    "theta_rad": ("waveguide_phase_theta", 1.0),
}
# shorthands setting both cavities
SHARED_KEYS = {
    "quality_factor": ("quality_factor_L", "quality_factor_R"),
    "refractive_index": ("refractive_index_L", "refractive_index_R"),
    "radius_um": ("radius_L_um", "radius_R_um"),
    "rotation_freq_kHz": ("rotation_freq_L_kHz", "rotation_freq_R_kHz"),
}

VARIABLES = ("detuning_Delta", "rotation_freq")
ENGINES = ("numeric", "analytic", "both")
OBSERVABLES = ("transmission_breakdown", "g2_output", "g2_cavity", "analytic_g2")

COLUMNS = (
    "sweep_value",
    "direction",
    "detuning_kappa",
    "t_left",
    "t_right",
    "t_interference",
    "t_total",
    "g2_output_numeric",
    "g2_output_analytic",
    "g2_cavity_L_numeric",
    "g2_cavity_L_analytic",
    "solver_residual",
    "error",
)
TIMING_COLUMN = "wall_time_ms"


class ConfigError(ValueError):
    """``code`` is ``PARSE_ERROR`` or ``VALIDATION_ERROR``; ``problems`` lists every issue."""

    def __init__(self, code: str, problems: list[str]):
        self.code = code
        self.problems = list(problems)
        super().__init__(f"{code}: " + "; ".join(self.problems))


@dataclass(frozen=True)
class SweepSpec:
    variable: str = "detuning_Delta"
    start: float = -40.0
    stop: float = 40.0
    num_points: int = 801
    directions: tuple[Direction, ...] = (Direction.CW, Direction.CCW)
    observables: tuple[str, ...] = OBSERVABLES
    cutoff: FockDims = field(default_factory=FockDims)
    engine: str = "both"
    # rotation sweeps only: None locks Delta = +Delta_F (CW) / -Delta_F (CCW);
    # a number fixes Delta in kappa units
    rotation_detuning: float | None = None
    tolerance: float = RESIDUAL_TOL

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(Direction.parse(d) for d in self.directions))
        object.__setattr__(self, "observables", tuple(self.observables))
        problems = self.violations()
        if problems:
            raise ConfigError("VALIDATION_ERROR", problems)

    def violations(self) -> list[str]:
        problems = []
        if self.variable not in VARIABLES:
            problems.append(f"sweep.variable must be one of {VARIABLES} (got {self.variable!r})")
        if self.engine not in ENGINES:
            problems.append(f"sweep.engine must be one of {ENGINES} (got {self.engine!r})")
        unknown = set(self.observables) - set(OBSERVABLES)
        if unknown:
            problems.append(f"unknown observables {sorted(unknown)}")
        if not self.directions:
            problems.append("sweep.directions must not be empty")
        if int(self.num_points) < 1:
            problems.append("sweep.num_points must be >= 1")
        elif int(self.num_points) >= 2 and not self.start < self.stop:
            problems.append(f"sweep.start must be < sweep.stop (got {self.start}, {self.stop})")
        if self.variable == "rotation_freq" and self.start < 0:
            problems.append("rotation sweep must start at >= 0 Hz")
        if not self.tolerance > 0:
            problems.append("sweep.tolerance must be > 0")
        return problems

    def grid(self) -> list[float]:
        n = int(self.num_points)
        if n == 1:
            return [float(self.start)]
        step = (self.stop - self.start) / (n - 1)
        return [self.start + i * step for i in range(n)]


@dataclass
class SweepRow:
    sweep_value: float
    direction: Direction
    detuning_kappa: float = math.nan
    t_left: float = math.nan
    t_right: float = math.nan
    t_interference: float = math.nan
    t_total: float = math.nan
    g2_output_numeric: float = math.nan
    g2_output_analytic: float = math.nan
    g2_cavity_L_numeric: float = math.nan
    g2_cavity_L_analytic: float = math.nan
    solver_residual: float = math.nan
    error: str = ""
    wall_time_ms: float = math.nan

    def add_error(self, code: str):
        self.error = code if not self.error else f"{self.error};{code}"


# -- configuration -----------------------------------------------------------

def physical_from_dict(data: dict | None) -> PhysicalParams:
    data = dict(data or {})
    problems = []
    for short, (left, right) in SHARED_KEYS.items():
        if short in data:
            value = data.pop(short)
            data.setdefault(left, value)
            data.setdefault(right, value)
    kwargs = {}
    for key, value in data.items():
        if key not in PHYSICAL_KEYS:
            problems.append(f"physical.{key}: unknown field")
            continue
        name, scale = PHYSICAL_KEYS[key]
        try:
            kwargs[name] = float(value) * scale
        except (TypeError, ValueError):
            problems.append(f"physical.{key}: expected a number (got {value!r})")
    if problems:
        raise ConfigError("VALIDATION_ERROR", problems)
    defaults = PhysicalParams()
    trial = {f.name: kwargs.get(f.name, getattr(defaults, f.name)) for f in fields(PhysicalParams)}
    try:
        return PhysicalParams(**trial)
    except ValidationError as exc:
        raise ConfigError("VALIDATION_ERROR", exc.problems) from None


def _dims(value) -> FockDims:
    if isinstance(value, (list, tuple)):
        return FockDims(int(value[0]), int(value[1]))
    return FockDims.square(int(value))


def spec_from_dict(data: dict | None) -> SweepSpec:
    data = dict(data or {})
    known = {f.name for f in fields(SweepSpec)}
    problems = [f"sweep.{k}: unknown field" for k in data if k not in known]
    kwargs = {k: v for k, v in data.items() if k in known}
    try:
        if "cutoff" in kwargs:
            kwargs["cutoff"] = _dims(kwargs["cutoff"])
        for key in ("start", "stop", "tolerance"):
            if key in kwargs:
                kwargs[key] = float(kwargs[key])
        if kwargs.get("rotation_detuning") is not None:
            kwargs["rotation_detuning"] = float(kwargs["rotation_detuning"])
        if "num_points" in kwargs:
            kwargs["num_points"] = int(kwargs["num_points"])
        for key in ("directions", "observables"):
            if key in kwargs and isinstance(kwargs[key], str):
                kwargs[key] = [kwargs[key]]
        if "directions" in kwargs:
            kwargs["directions"] = tuple(Direction.parse(d) for d in kwargs["directions"])
    except (TypeError, ValueError) as exc:
        problems.append(str(exc))
    if problems:
        raise ConfigError("VALIDATION_ERROR", problems)
    return SweepSpec(**kwargs)


def load_config(path: str | os.PathLike | None) -> tuple[PhysicalParams, SweepSpec]:
    """Read a YAML config; ``None`` or an empty file gives all defaults."""
    if path is None:
        return PhysicalParams(), SweepSpec()
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("PARSE_ERROR", [f"{path}: {exc.strerror or exc}"]) from None
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError("PARSE_ERROR", [f"{where}: {problem}"]) from None
    if not isinstance(data, dict):
        raise ConfigError("PARSE_ERROR", [f"{path}: top level must be a mapping"])
    problems = [f"{k}: unknown section" for k in data if k not in ("physical", "sweep")]
    phys = spec = None
    for section, build in (("physical", physical_from_dict), ("sweep", spec_from_dict)):
        try:
            value = build(data.get(section))
        except ConfigError as exc:
            problems.extend(exc.problems)
            continue
        if section == "physical":
            phys = value
        else:
            spec = value
    if problems:
        raise ConfigError("VALIDATION_ERROR", problems)
    return phys, spec


# -- sweeps ------------------------------------------------------------------

def point_model(params: PhysicalParams, spec: SweepSpec, value: float, direction: Direction):
    """Model in kappa units for one grid point."""
    kappa = decay_rate(params, "L")
    if spec.variable == "detuning_Delta":
        return derive_model(params, value * kappa, direction).in_kappa_units()
    params = params.with_rotation(value)
    if spec.rotation_detuning is None:
        sign = 1.0 if direction is Direction.CW else -1.0
        # track the left (Kerr) cavity resonance
        detuning = sign * fizeau_shift(params, "L")
    else:
        detuning = spec.rotation_detuning * kappa
    return derive_model(params, detuning, direction).in_kappa_units()


def evaluate_point(params: PhysicalParams, spec: SweepSpec, value: float, direction: Direction) -> SweepRow:
    t0 = time.perf_counter()
    row = SweepRow(sweep_value=value, direction=direction)
    m = point_model(params, spec, value, direction)
    row.detuning_kappa = m.detuning_Delta
    wanted = set(spec.observables)

    if spec.engine in ("numeric", "both"):
        try:
            h = build_hamiltonian(m, spec.cutoff)
            rho = steady_state(liouvillian(h, m), spec.cutoff, tol=spec.tolerance)
            row.solver_residual = rho.residual
            if rho.invariant_violations():
                row.add_error("INVARIANT_VIOLATION")
        except SteadyStateError as exc:
            row.add_error(type(exc).__name__)
            rho = None
        if rho is not None:
            if "transmission_breakdown" in wanted:
                try:
                    tb = observables.transmission(rho, m)
                    row.t_left, row.t_right = tb.t_left, tb.t_right
                    row.t_interference, row.t_total = tb.t_interference, tb.t_total
                except observables.ObservableError as exc:
                    row.add_error(exc.code)
            if "g2_output" in wanted:
                try:
                    row.g2_output_numeric = observables.g2_output(rho, m).g2_output
                except observables.ObservableError as exc:
                    row.add_error(exc.code)
            if "g2_cavity" in wanted:
                try:
                    row.g2_cavity_L_numeric = observables.g2_cavity(rho, "L")
                except observables.ObservableError as exc:
                    row.add_error(exc.code)

    if spec.engine in ("analytic", "both") and wanted & {"analytic_g2", "g2_output", "g2_cavity"}:
        try:
            amps = analytic.steady_amplitudes(m)
            row.g2_output_analytic = analytic.g2_output_analytic(amps, m.kappa_R / m.kappa_L)
            row.g2_cavity_L_analytic = analytic.g2_cavity_analytic(amps)
        except analytic.AnalyticError as exc:
            row.add_error(exc.code)

    row.wall_time_ms = (time.perf_counter() - t0) * 1e3
    return row


def _evaluate(task):
    return evaluate_point(*task)


def run_sweep(spec: SweepSpec, params: PhysicalParams, workers: int = 1) -> list[SweepRow]:
    """Evaluate every (grid value, direction) pair; rows ordered by direction then grid."""
    tasks = [(params, spec, v, d) for d in spec.directions for v in spec.grid()]
    if workers <= 1 or len(tasks) < 2:
        return [_evaluate(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


# -- output ------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, Direction):
        return value.value
    if isinstance(value, float):
        return "" if math.isnan(value) else f"{value:.12g}"
    return str(value)


def _columns(timing: bool) -> tuple[str, ...]:
    return COLUMNS + (TIMING_COLUMN,) if timing else COLUMNS


def emit(rows: list[SweepRow], fmt: str, path: str | os.PathLike, timing: bool = False) -> None:
    """Write rows as CSV (header line + one line per row) or JSON lines.

    Floats carry 12 significant digits; missing values are empty (CSV) or
    ``null`` (JSON). Timing is excluded by default so reruns are byte-identical.
    """
    if not rows:
        raise ValueError("no rows to emit")
    cols = _columns(timing)
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            if fmt == "csv":
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(cols)
                for row in rows:
                    writer.writerow([_fmt(getattr(row, c)) for c in cols])
            elif fmt in ("jsonl", "json-lines"):
                for row in rows:
                    obj = {}
                    for c in cols:
                        text = _fmt(getattr(row, c))
                        if c in ("direction", "error"):
                            obj[c] = text
                        else:
                            obj[c] = float(text) if text else None
                    fh.write(json.dumps(obj) + "\n")
            else:
                raise ValueError(f"unknown output format {fmt!r}")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from None


def read_rows(path: str | os.PathLike) -> list[SweepRow]:
    """Parse a file written by :func:`emit` (format inferred from content)."""
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
    else:
        records = list(csv.DictReader(text.splitlines()))
    rows = []
    for rec in records:
        kwargs = {}
        for key, value in rec.items():
            if key == "direction":
                kwargs[key] = Direction.parse(value)
            elif key == "error":
                kwargs[key] = value or ""
            else:
                kwargs[key] = math.nan if value in (None, "") else float(value)
        rows.append(SweepRow(**kwargs))
    return rows


def rows_as_dicts(rows: list[SweepRow]) -> list[dict]:
    return [asdict(r) for r in rows]


def with_overrides(spec: SweepSpec, **overrides) -> SweepSpec:
    return replace(spec, **{k: v for k, v in overrides.items() if v is not None})
