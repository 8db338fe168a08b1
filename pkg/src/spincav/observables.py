"""Transmission and photon-statistics observables of a steady state.

The transmitted field is ``a_out = sqrt(kL) a_L - i sqrt(kR) a_R`` (vacuum
inputs at the drop ports contribute nothing to normally ordered moments).
For CW driving it leaves Port 2, for CCW driving Port 1; in both cases the
moments are taken on the state's own modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import DensityMatrix, mode_operators
from .fock import expectation
from .params import Direction, ModelParams, Side

ZERO_FLUX = 1e-30


class ObservableError(ValueError):
    """Raised when a ratio observable has a vanishing denominator."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


@dataclass(frozen=True)
class TransmissionBreakdown:
    t_left: float
    t_right: float
    t_interference: float
    t_total: float
    direction: Direction


@dataclass(frozen=True)
class CorrelationReport:
    g2_output: float
    g2_cavity_L: float
    g2_cavity_R: float
    output_flux: float
    # signed numerator contributions, in the order
    # (left self, right self, cross number, left-heavy cross, right-heavy cross, pair exchange)
    term_breakdown: tuple[float, float, float, float, float, float]

    @property
    def numerator(self) -> float:
        return math.fsum(self.term_breakdown)


TERM_NAMES = (
    "left_self",
    "right_self",
    "cross_number",
    "left_cross",
    "right_cross",
    "pair_exchange",
)


def photon_flux_in(m: ModelParams) -> float:
    """Input photon flux ``eps_L^2 / kappa_L`` in the model's rate unit."""
    return m.drive_eps_L**2 / m.kappa_L


def _moments(rho: DensityMatrix):
    aL, aR = mode_operators(rho.dims)
    aLd, aRd = aL.dag(), aR.dag()
    ev = lambda op: expectation(rho, op)  # noqa: E731
    return {
        "nL": ev(aLd @ aL).real,
        "nR": ev(aRd @ aR).real,
        "LR": ev(aLd @ aR),
        "LLLL": ev(aLd @ aLd @ aL @ aL).real,
        "RRRR": ev(aRd @ aRd @ aR @ aR).real,
        "LRLR": ev(aLd @ aRd @ aL @ aR).real,
        "LLLR": ev(aLd @ aLd @ aL @ aR),
        "LRRR": ev(aLd @ aRd @ aR @ aR),
        "LLRR": ev(aLd @ aLd @ aR @ aR),
    }


def _output_flux(mo, m: ModelParams) -> float:
    kL, kR = m.kappa_L, m.kappa_R
    return kL * mo["nL"] + kR * mo["nR"] - 2 * math.sqrt(kL * kR) * (1j * mo["LR"]).real


def transmission(rho: DensityMatrix, m: ModelParams) -> TransmissionBreakdown:
    """Split transmission into left path, right path and their interference."""
    flux = photon_flux_in(m)
    if flux <= 0:
        raise ObservableError("ZERO_DRIVE", "input photon flux is zero")
    mo = _moments(rho)
    kL, kR = m.kappa_L, m.kappa_R
    t_left = kL * mo["nL"] / flux
    t_right = kR * mo["nR"] / flux
    t_int = -2 * math.sqrt(kL * kR) * (1j * mo["LR"]).real / flux
    return TransmissionBreakdown(t_left, t_right, t_int, t_left + t_right + t_int, m.direction)


def _terms(mo, m: ModelParams) -> tuple[float, ...]:
    kL, kR = m.kappa_L, m.kappa_R
    s = math.sqrt(kL * kR)
    return (
        kL**2 * mo["LLLL"],
        kR**2 * mo["RRRR"],
        4 * kL * kR * mo["LRLR"],
        -4 * kL * s * (1j * mo["LLLR"]).real,
        -4 * kR * s * (1j * mo["LRRR"]).real,
        -2 * kL * kR * mo["LLRR"].real,
    )


def g2_terms(rho: DensityMatrix, m: ModelParams) -> tuple[float, ...]:
    """Six signed numerator contributions, ordered as :data:`TERM_NAMES`."""
    return _terms(_moments(rho), m)


def _cavity_g2(mo, side: Side) -> float:
    n = mo["nL"] if side is Side.L else mo["nR"]
    if n <= ZERO_FLUX:
        raise ObservableError("ZERO_POPULATION", f"mode {side.value} is empty")
    pairs = mo["LLLL"] if side is Side.L else mo["RRRR"]
    return pairs / n**2


def g2_cavity(rho: DensityMatrix, mode: Side | str) -> float:
    """Intracavity ``<a+ a+ a a> / <a+ a>^2`` of one mode."""
    return _cavity_g2(_moments(rho), Side(mode))


def g2_output(rho: DensityMatrix, m: ModelParams) -> CorrelationReport:
    """Equal-time correlation of the transmitted field with its six-term split."""
    mo = _moments(rho)
    out = _output_flux(mo, m)
    if out < ZERO_FLUX:
        raise ObservableError("ZERO_FLUX", f"output flux {out:.3g} below {ZERO_FLUX:g}")
    terms = _terms(mo, m)

    def cavity(side):
        try:
            return _cavity_g2(mo, side)
        except ObservableError:
            return float("nan")

    return CorrelationReport(
        g2_output=math.fsum(terms) / out**2,
        g2_cavity_L=cavity(Side.L),
        g2_cavity_R=cavity(Side.R),
        output_flux=out,
        term_breakdown=terms,
    )


def output_operator(rho_or_dims, m: ModelParams):
    """Explicit ``a_out`` as a :class:`~spincav.fock.FockOperator` (for cross-checks)."""
    dims = getattr(rho_or_dims, "dims", rho_or_dims)
    aL, aR = mode_operators(dims)
    return math.sqrt(m.kappa_L) * aL + (-1j * math.sqrt(m.kappa_R)) * aR


def mean_photon_numbers(rho: DensityMatrix) -> tuple[float, float]:
    mo = _moments(rho)
    return mo["nL"], mo["nR"]


__all__ = [
    "CorrelationReport",
    "ObservableError",
    "TERM_NAMES",
    "TransmissionBreakdown",
    "g2_cavity",
    "g2_output",
    "g2_terms",
    "mean_photon_numbers",
    "output_operator",
    "photon_flux_in",
    "transmission",
]
