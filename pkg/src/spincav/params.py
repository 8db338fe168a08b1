"""Experimental parameters and the dimensionless model derived from them.

Everything downstream of this module works with angular rates. The helpers
here are the only place SI inputs (wavelengths, powers, volumes) are touched.

Conventions
-----------
- Each cavity couples to two drop-filter waveguides at rate ``kappa`` each, so
  the total energy decay rate is ``2 kappa = omega / Q``.
- ``rotation_freq_*`` is the rotation frequency ``Omega / 2 pi`` in Hz.
- The left cavity is the Kerr (nonlinear) cavity; the right one is linear.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields, replace

from scipy import constants as C


class Direction(str, enum.Enum):
    """Input port of the weak probe.

    ``CW`` drives from Port 1 (clockwise modes, output at Port 2);
    ``CCW`` drives from Port 2 (counter-clockwise modes, output at Port 1).
    """

    CW = "cw"
    CCW = "ccw"

    @classmethod
    def parse(cls, value: "Direction | str") -> "Direction":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown direction {value!r}; expected 'cw' or 'ccw'") from None


class Side(str, enum.Enum):
    L = "L"
    R = "R"


class ValidationError(ValueError):
    """Raised when a parameter set violates one or more invariants.

    ``problems`` lists every violated invariant, not just the first.
    """

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class PhysicalParams:
    """SI-unit experimental inputs. Defaults are the published device values."""

    wavelength_vacuum: float = 1550e-9
    quality_factor_L: float = 2.5e9
    quality_factor_R: float = 2.5e9
    refractive_index_L: float = 1.4
    refractive_index_R: float = 1.4
    nonlinear_index_n2: float = 3e-14
    mode_volume_Veff: float = 147e-18
    radius_L: float = 30e-6
    radius_R: float = 30e-6
    rotation_freq_L: float = 9.4e3
    rotation_freq_R: float = 9.4e3
    drive_power_Pin: float = 0.2e-15
    dispersion_dn_dlambda: float = 0.0
    waveguide_phase_theta: float = math.pi / 2

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValidationError(problems)

    def violations(self) -> list[str]:
        problems = []
        for name in ("wavelength_vacuum", "quality_factor_L", "quality_factor_R",
                     "mode_volume_Veff", "radius_L", "radius_R"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                problems.append(f"{name} must be finite and > 0 (got {value!r})")
        for name in ("refractive_index_L", "refractive_index_R"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 1):
                problems.append(f"{name} must be > 1 (got {value!r})")
        for name in ("rotation_freq_L", "rotation_freq_R", "drive_power_Pin", "nonlinear_index_n2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                problems.append(f"{name} must be finite and >= 0 (got {value!r})")
        for name in ("dispersion_dn_dlambda", "waveguide_phase_theta"):
            if not math.isfinite(getattr(self, name)):
                problems.append(f"{name} must be finite")
        return problems

    def with_rotation(self, rotation_freq: float) -> "PhysicalParams":
        """Both cavities spinning at the same ``Omega / 2 pi`` (Hz)."""
        return replace(self, rotation_freq_L=rotation_freq, rotation_freq_R=rotation_freq)

    @property
    def angular_frequency(self) -> float:
        return 2 * math.pi * C.c / self.wavelength_vacuum


def _side(p: PhysicalParams, side: Side | str, stem: str) -> float:
    return getattr(p, f"{stem}_{Side(side).value}")


def fizeau_shift(p: PhysicalParams, side: Side | str) -> float:
    """Rotation-induced (Sagnac-Fizeau) shift of one cavity, in rad/s."""
    n = _side(p, side, "refractive_index")
    r = _side(p, side, "radius")
    omega_rot = 2 * math.pi * _side(p, side, "rotation_freq")
    lam = p.wavelength_vacuum
    drag = 1 - 1 / n**2 - (lam / n) * p.dispersion_dn_dlambda
    return n * r * omega_rot * p.angular_frequency / C.c * drag


def kerr_strength(p: PhysicalParams) -> float:
    """Kerr interaction strength ``U`` of the left cavity, in rad/s."""
    w = p.angular_frequency
    return C.hbar * w**2 * C.c * p.nonlinear_index_n2 / (p.refractive_index_L**2 * p.mode_volume_Veff)


def decay_rate(p: PhysicalParams, side: Side | str) -> float:
    """Per-waveguide decay rate ``kappa = omega / (2 Q)``, in rad/s."""
    return p.angular_frequency / (2 * _side(p, side, "quality_factor"))


def photon_flux(p: PhysicalParams) -> float:
    """Input photon flux ``P_in / (hbar omega)`` in photons per second."""
    return p.drive_power_Pin / (C.hbar * p.angular_frequency)


def drive_amplitude(p: PhysicalParams, kappa: float) -> float:
    """Drive amplitude ``sqrt(kappa P_in / (hbar omega))`` for a cavity with decay ``kappa``."""
    if p.drive_power_Pin < 0:
        raise ValidationError([f"drive_power_Pin must be >= 0 (got {p.drive_power_Pin!r})"])
    return math.sqrt(kappa * photon_flux(p))


@dataclass(frozen=True)
class ModelParams:
    """Rates entering the Hamiltonian and master equation.

    Any consistent unit works (rad/s from :func:`derive_model`, or units of
    ``kappa_L`` after :meth:`in_kappa_units`); every observable is a ratio.
    ``coupling_J_eff`` is real, i.e. the ``theta = pi/2`` reduction is applied.
    """

    kappa_L: float
    kappa_R: float
    detuning_Delta: float
    fizeau_L: float
    fizeau_R: float
    kerr_U: float
    drive_eps_L: float
    drive_eps_R: float
    coupling_J_eff: float
    direction: Direction = Direction.CW
    theta: float = math.pi / 2

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        problems = []
        for f in fields(self):
            if f.name == "direction":
                continue
            if not math.isfinite(getattr(self, f.name)):
                problems.append(f"{f.name} must be finite")
        if not self.kappa_L > 0:
            problems.append(f"kappa_L must be > 0 (got {self.kappa_L!r})")
        if not self.kappa_R > 0:
            problems.append(f"kappa_R must be > 0 (got {self.kappa_R!r})")
        if not self.kerr_U >= 0:
            problems.append(f"kerr_U must be >= 0 (got {self.kerr_U!r})")
        if problems:
            raise ValidationError(problems)

    @property
    def detunings(self) -> tuple[float, float]:
        """Direction-resolved ``(Delta_L, Delta_R)`` entering the Hamiltonian."""
        if self.direction is Direction.CW:
            return self.detuning_Delta - self.fizeau_L, self.detuning_Delta + self.fizeau_R
        return self.detuning_Delta + self.fizeau_L, self.detuning_Delta - self.fizeau_R

    def in_kappa_units(self) -> "ModelParams":
        """Copy with every rate divided by ``kappa_L``."""
        k = self.kappa_L
        return replace(
            self,
            kappa_L=1.0,
            kappa_R=self.kappa_R / k,
            detuning_Delta=self.detuning_Delta / k,
            fizeau_L=self.fizeau_L / k,
            fizeau_R=self.fizeau_R / k,
            kerr_U=self.kerr_U / k,
            drive_eps_L=self.drive_eps_L / k,
            drive_eps_R=self.drive_eps_R / k,
            coupling_J_eff=self.coupling_J_eff / k,
        )

    def with_direction(self, direction: Direction | str) -> "ModelParams":
        return replace(self, direction=Direction.parse(direction))

    def with_detuning(self, detuning: float) -> "ModelParams":
        return replace(self, detuning_Delta=detuning)


def model_from_kappa(
    detuning: float,
    fizeau: float,
    kerr: float,
    eps: float,
    direction: Direction | str = Direction.CW,
    kappa_R: float = 1.0,
) -> ModelParams:
    """Symmetric model directly in units of ``kappa_L = 1``.

    Both cavities share the Fizeau shift and see drives ``eps * sqrt(kappa_j)``.
    """
    return ModelParams(
        kappa_L=1.0,
        kappa_R=kappa_R,
        detuning_Delta=detuning,
        fizeau_L=fizeau,
        fizeau_R=fizeau,
        kerr_U=kerr,
        drive_eps_L=eps,
        drive_eps_R=eps * math.sqrt(kappa_R),
        coupling_J_eff=-math.sqrt(kappa_R),
        direction=direction,
    )


def derive_model(
    p: PhysicalParams,
    detuning_Delta: float,
    direction: Direction | str = Direction.CW,
    allow_non_hermitian: bool = False,
) -> ModelParams:
    """Assemble :class:`ModelParams` (rad/s) from experimental inputs.

    The waveguide-induced coupling is ``i sqrt(kL kR) exp(i theta)``, which is
    real only for ``theta = pi/2``. Other phases are rejected unless
    ``allow_non_hermitian`` is set, in which case only the real part is kept.
    """
    theta = p.waveguide_phase_theta
    if not allow_non_hermitian and not math.isclose(theta, math.pi / 2, rel_tol=0, abs_tol=1e-12):
        raise ValidationError([f"waveguide_phase_theta must be pi/2 (got {theta!r})"])
    kL = decay_rate(p, Side.L)
    kR = decay_rate(p, Side.R)
    coupling = 1j * math.sqrt(kL * kR) * complex(math.cos(theta), math.sin(theta))
    return ModelParams(
        kappa_L=kL,
        kappa_R=kR,
        detuning_Delta=detuning_Delta,
        fizeau_L=fizeau_shift(p, Side.L),
        fizeau_R=fizeau_shift(p, Side.R),
        kerr_U=kerr_strength(p),
        drive_eps_L=drive_amplitude(p, kL),
        drive_eps_R=drive_amplitude(p, kR),
        coupling_J_eff=coupling.real,
        direction=Direction.parse(direction),
        theta=theta,
    )
