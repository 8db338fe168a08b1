"""Weak-drive analytic model truncated at two photons.

The state ``C00|00> + C10|10> + C01|01> + C11|11> + C20|20> + C02|02>`` evolves
under the non-Hermitian Hamiltonian ``H - i kL n_L - i kR n_R``. Setting
``C00 = 1`` and keeping only the upward drive couplings, the stationary
amplitudes follow from a 2x2 solve (one photon) and a 3x3 solve (two photons).

This module does not touch :mod:`spincav.fock` or :mod:`spincav.dynamics`;
it is the independent check on the master-equation path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .params import Direction, ModelParams

SQRT2 = math.sqrt(2.0)
_COND_LIMIT = 1e14


class AnalyticError(ValueError):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


@dataclass(frozen=True)
class AmplitudeSet:
    c00: complex
    c10: complex
    c01: complex
    c11: complex
    c20: complex
    c02: complex

    @property
    def pair_combination(self) -> complex:
        """``C20 - sqrt(2) i C11``; vanishes when the two pair paths cancel."""
        return self.c20 - SQRT2 * 1j * self.c11

    def satisfies_weak_drive(self, one_photon_max: float = 0.3, ratio: float = 0.3) -> bool:
        one = max(abs(self.c10), abs(self.c01))
        two = max(abs(self.c20), abs(self.c11), abs(self.c02))
        return abs(self.c00) == 1 and one <= one_photon_max and two <= ratio * max(one, 1e-300)


def _solve(matrix: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    if not np.isfinite(matrix).all() or np.linalg.cond(matrix) > _COND_LIMIT:
        raise AnalyticError("SINGULAR_SYSTEM", f"{what} system is singular")
    return np.linalg.solve(matrix, rhs)


def steady_amplitudes(m: ModelParams) -> AmplitudeSet:
    """Perturbative stationary amplitudes of the two-photon-truncated state."""
    dL, dR = m.detunings
    kL, kR = m.kappa_L, m.kappa_R
    J = m.coupling_J_eff
    U = m.kerr_U
    # raising parts of the drive term: <10|H|00> and <01|H|00>
    up_L = 1j * m.drive_eps_L
    up_R = -1j * m.drive_eps_R * cmath.exp(1j * m.theta)

    one = np.array([[dL - 1j * kL, J],
                    [J, dR - 1j * kR]], dtype=complex)
    c10, c01 = _solve(one, -np.array([up_L, up_R]), "one-photon")

    two = np.array([
        [2 * dL + 2 * U - 2j * kL, SQRT2 * J, 0],
        [SQRT2 * J, dL + dR - 1j * (kL + kR), SQRT2 * J],
        [0, SQRT2 * J, 2 * dR - 2j * kR],
    ], dtype=complex)
    source = np.array([
        SQRT2 * up_L * c10,
        up_L * c01 + up_R * c10,
        SQRT2 * up_R * c01,
    ])
    c20, c11, c02 = _solve(two, -source, "two-photon")
    return AmplitudeSet(1.0 + 0j, complex(c10), complex(c01), complex(c11), complex(c20), complex(c02))


def g2_output_analytic(a: AmplitudeSet, kappa_ratio: float = 1.0, include_right_path: bool = True) -> float:
    """Output-field ``g2(0)`` from the truncated amplitudes.

    The numerator is ``|sqrt2 kL C20 - 2i sqrt(kL kR) C11 - sqrt2 kR C02|^2``.
    With ``include_right_path`` the one-photon flux is ``|sqrt(kL) C10 - i sqrt(kR) C01|^2``;
    without it only ``|C10|^2`` is kept, which is the usual short form valid
    when the right cavity is far off resonance. ``kappa_ratio`` is ``kR / kL``.
    """
    r = kappa_ratio
    pair = SQRT2 * a.c20 - 2j * math.sqrt(r) * a.c11 - SQRT2 * r * a.c02
    flux = a.c10 - 1j * math.sqrt(r) * a.c01 if include_right_path else a.c10
    if abs(flux) == 0:
        raise AnalyticError("ZERO_AMPLITUDE", "one-photon output amplitude vanishes")
    return abs(pair) ** 2 / abs(flux) ** 4


def g2_cavity_analytic(a: AmplitudeSet, mode: str = "L") -> float:
    """Intracavity ``2 |C20|^2 / |C10|^4`` (left) or ``2 |C02|^2 / |C01|^4`` (right)."""
    one, two = (a.c10, a.c20) if mode == "L" else (a.c01, a.c02)
    if abs(one) == 0:
        raise AnalyticError("ZERO_AMPLITUDE", f"one-photon amplitude of mode {mode} vanishes")
    return 2 * abs(two) ** 2 / abs(one) ** 4


def transmission_analytic(a: AmplitudeSet, m: ModelParams) -> float:
    """Lowest-order total transmission ``|sqrt(kL) C10 - i sqrt(kR) C01|^2 / flux_in``."""
    flux_in = m.drive_eps_L**2 / m.kappa_L
    if flux_in == 0:
        raise AnalyticError("ZERO_AMPLITUDE", "no drive")
    return abs(math.sqrt(m.kappa_L) * a.c10 - 1j * math.sqrt(m.kappa_R) * a.c01) ** 2 / flux_in


def _close(x: float, y: float, rel: float) -> bool:
    return math.isclose(x, y, rel_tol=rel, abs_tol=rel * max(abs(x), abs(y), 1e-300))


def optimal_amplitudes(m: ModelParams, rel_tol: float = 1e-6) -> AmplitudeSet:
    """Closed-form amplitudes at the blockade optimum.

    Requires ``Delta = Delta_F = U`` for CW or ``Delta = -Delta_F = -U`` for CCW
    (left cavity resonant), with identical cavities. The two-photon amplitudes
    are the large-``U`` approximations; the one-photon values ``C10 = eps/kappa``,
    ``C01 = 0`` are exact there.
    """
    k, U, eps = m.kappa_L, m.kerr_U, m.drive_eps_L
    sign = 1.0 if m.direction is Direction.CW else -1.0
    problems = []
    if not _close(m.detuning_Delta, sign * m.fizeau_L, rel_tol):
        problems.append("left cavity not resonant")
    if not _close(m.fizeau_L, U, rel_tol):
        problems.append("Fizeau shift differs from Kerr strength")
    if not (_close(m.fizeau_L, m.fizeau_R, rel_tol) and _close(m.kappa_L, m.kappa_R, rel_tol)
            and _close(m.drive_eps_L, m.drive_eps_R, rel_tol)):
        problems.append("cavities are not identical")
    if U <= 0:
        problems.append("Kerr strength must be positive")
    if problems:
        raise AnalyticError("CONDITION_VIOLATED", "; ".join(problems))

    e2 = eps**2
    c20 = -e2 * ((2 * U**2 - k**2) * 1j + sign * 4 * U * k) / (2 * SQRT2 * U**3 * k)
    c11 = e2 * (1j * U * k + (k**2 - sign * 2 * U**2)) / (4 * U**3 * k)
    c02 = -e2 / (4 * SQRT2 * U**2)
    return AmplitudeSet(1.0 + 0j, complex(eps / k), 0j, complex(c11), complex(c20), complex(c02))


def g2_optimal(direction: Direction | str, U_over_kappa: float) -> tuple[float, float]:
    """Large-``U`` limits ``(g2_output, g2_cavity_L)`` at the optimum."""
    if not U_over_kappa > 0:
        raise ValueError("U_over_kappa must be positive")
    u = float(U_over_kappa)
    cavity = 1 / u**2
    if Direction.parse(direction) is Direction.CW:
        return 25 / (16 * u**4), cavity
    return 4 / u**2, cavity
