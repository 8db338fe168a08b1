"""Hamiltonian, Lindblad superoperator and steady-state solvers.

Vectorization is column-stacking throughout: ``vec(A X B) = (B^T kron A) vec(X)``,
so ``rho = vec_rho.reshape(D, D, order="F")``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .fock import FockDims, FockOperator, annihilation
from .params import Direction, ModelParams, Side

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
HERMITIAN_TOL = 1e-12
# bordered matrix with a degenerate nullspace is singular; flag it well before
# double precision runs out
NON_UNIQUE_COND = 1e13


class SteadyStateError(RuntimeError):
    pass


class NonUniqueSteadyState(SteadyStateError):
    """Numerical nullspace of the Liouvillian has dimension > 1."""


class NoConvergence(SteadyStateError):
    """Neither solver reached the residual tolerance."""


@dataclass(frozen=True)
class Hamiltonian:
    dims: FockDims
    operator: FockOperator
    direction: Direction

    @property
    def matrix(self) -> sp.csr_matrix:
        return self.operator.matrix

    def hermiticity_error(self) -> float:
        """``max|H - H^dag| / max|H|`` (0 for the zero operator)."""
        m = self.operator.csr
        scale = float(abs(m).max()) if m.nnz else 0.0
        if scale == 0.0:
            return 0.0
        diff = m - m.conj().T
        return (float(abs(diff).max()) if diff.nnz else 0.0) / scale


@dataclass(frozen=True)
class DensityMatrix:
    dims: FockDims
    matrix: np.ndarray
    residual: float = float("nan")
    method: str = ""
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.matrix.shape != (self.dims.size, self.dims.size):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match {self.dims}")

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def invariant_violations(self, tol: float = 1e-10) -> list[str]:
        m = self.matrix
        problems = []
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > tol:
            problems.append(f"not Hermitian (max deviation {herm:.3g})")
        if abs(self.trace - 1) > tol:
            problems.append(f"trace {self.trace:.12g} != 1")
        lam_min = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if lam_min < -tol:
            problems.append(f"negative eigenvalue {lam_min:.3g}")
        return problems

    def fidelity_with_pure(self, psi: np.ndarray) -> float:
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return float(np.real(psi.conj() @ self.matrix @ psi))

    @classmethod
    def from_pure(cls, dims: FockDims, psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(dims, np.outer(psi, psi.conj()))


def mode_operators(dims: FockDims) -> tuple[FockOperator, FockOperator]:
    return annihilation(dims, Side.L), annihilation(dims, Side.R)


def build_hamiltonian(m: ModelParams, dims: FockDims) -> Hamiltonian:
    """Direction-resolved two-cavity Hamiltonian in the drive frame.

    Both cavities are driven (amplitudes ``eps_L`` and ``eps_R exp(i theta)``)
    for either direction; the direction only changes the detunings.
    """
    aL, aR = mode_operators(dims)
    aLd, aRd = aL.dag(), aR.dag()
    dL, dR = m.detunings
    drive_up = m.drive_eps_L * aLd - (m.drive_eps_R * complex(math.cos(m.theta), math.sin(m.theta))) * aRd
    h = (
        dL * (aLd @ aL)
        + m.kerr_U * (aLd @ aLd @ aL @ aL)
        + dR * (aRd @ aR)
        + m.coupling_J_eff * (aLd @ aR + aRd @ aL)
        + 1j * (drive_up - drive_up.dag())
    )
    return Hamiltonian(dims, h, m.direction)


def _lindblad_dissipator(c: sp.csr_matrix, ident: sp.spmatrix) -> sp.csr_matrix:
    n = (c.conj().T @ c).tocsr()
    return (
        sp.kron(c.conj(), c)
        - 0.5 * sp.kron(ident, n)
        - 0.5 * sp.kron(n.T, ident)
    ).tocsr()


def liouvillian_from(h: sp.spmatrix, collapse: list[tuple[float, sp.spmatrix]]) -> sp.csr_matrix:
    """Superoperator for ``-i[H, rho] + sum_k rate_k L[c_k] rho``."""
    d = h.shape[0]
    ident = sp.identity(d, dtype=complex, format="csr")
    h = sp.csr_matrix(h, dtype=complex)
    L = -1j * (sp.kron(ident, h) - sp.kron(h.T, ident))
    for rate, c in collapse:
        if rate:
            L = L + rate * _lindblad_dissipator(sp.csr_matrix(c, dtype=complex), ident)
    return sp.csr_matrix(L)


def liouvillian(h: Hamiltonian, m: ModelParams) -> sp.csr_matrix:
    """``L`` with ``vec(d rho/dt) = L vec(rho)``; decay rates ``2 kappa_L``, ``2 kappa_R``."""
    aL, aR = mode_operators(h.dims)
    return liouvillian_from(h.operator.csr, [(2 * m.kappa_L, aL.csr), (2 * m.kappa_R, aR.csr)])


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d, order="F")


def relative_residual(L: sp.spmatrix, rho: np.ndarray) -> float:
    """``||L vec(rho)||_2 / (||L||_F ||vec(rho)||_2)``."""
    x = vec(rho)
    norm_L = spla.norm(L)
    denom = norm_L * np.linalg.norm(x)
    if denom == 0:
        return 0.0 if norm_L == 0 else float("inf")
    return float(np.linalg.norm(L @ x) / denom)


def _finish(dims: FockDims, rho: np.ndarray, L, method: str, **info) -> DensityMatrix:
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    return DensityMatrix(dims, rho, relative_residual(L, rho), method, info)


def _solve_direct(L: sp.csr_matrix, dims: FockDims) -> DensityMatrix:
    d = dims.size
    trace_row = np.zeros(d * d, dtype=complex)
    trace_row[np.arange(d) * (d + 1)] = 1.0
    # replace the |0><0| row: it is minus the sum of the other diagonal rows
    A = sp.lil_matrix(L)
    A[0, :] = trace_row
    A = sp.csc_matrix(A)
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    try:
        lu = spla.splu(A)
    except RuntimeError as exc:
        raise NonUniqueSteadyState(f"bordered Liouvillian is singular: {exc}") from None
    x = lu.solve(b)
    inv = spla.LinearOperator(A.shape, matvec=lu.solve, rmatvec=lambda y: lu.solve(y, trans="H"),
                              dtype=complex)
    cond = spla.norm(A, 1) * spla.onenormest(inv)
    if not np.all(np.isfinite(x)) or cond > NON_UNIQUE_COND:
        raise NonUniqueSteadyState(f"bordered Liouvillian condition number {cond:.3g}")
    return _finish(dims, unvec(x, d), L, "direct", condition=float(cond))


def _solve_integrate(
    L: sp.csr_matrix,
    dims: FockDims,
    kappa: float = 1.0,
    t_max_kappa: float = 50.0,
    tol: float = 1e-10,
) -> DensityMatrix:
    """Propagate from vacuum until ``||rho(t + 1/kappa) - rho(t)||_1 <= tol``."""
    d = dims.size
    rho0 = np.zeros((d, d), dtype=complex)
    rho0[0, 0] = 1.0
    y = vec(rho0)
    step = 1.0 / kappa
    t = 0.0
    prev = rho0
    while t < t_max_kappa / kappa:
        sol = solve_ivp(lambda _t, v: L @ v, (t, t + step), y, method="DOP853",
                        rtol=1e-12, atol=1e-14)
        if not sol.success:
            raise NoConvergence(f"time integration failed at t={t:g}: {sol.message}")
        y = sol.y[:, -1]
        t += step
        cur = unvec(y, d)
        change = float(np.sum(np.linalg.svd(cur - prev, compute_uv=False)))
        prev = cur
        if change <= tol:
            return _finish(dims, cur, L, "integrate", t_final=t, last_change=change)
    raise NoConvergence(f"no convergence by t = {t_max_kappa:g}/kappa (last change {change:.3g})")


def steady_state(
    L: sp.spmatrix,
    dims: FockDims,
    method: str = "auto",
    tol: float = RESIDUAL_TOL,
    kappa: float = 1.0,
) -> DensityMatrix:
    """Trace-one null vector of ``L``.

    ``method`` is ``"direct"`` (bordered sparse LU), ``"integrate"`` (adaptive
    time stepping from vacuum) or ``"auto"`` (direct, then integration if the
    direct residual exceeds ``tol``). ``kappa`` sets the time unit for the
    integrator.
    """
    L = sp.csr_matrix(L, dtype=complex)
    if L.shape != (dims.size**2, dims.size**2):
        raise ValueError(f"superoperator shape {L.shape} does not match {dims}")
    if method not in ("auto", "direct", "integrate"):
        raise ValueError(f"unknown steady-state method {method!r}")

    if method in ("auto", "direct"):
        rho = _solve_direct(L, dims)
        if rho.residual <= tol or method == "direct":
            if rho.residual > tol:
                raise NoConvergence(f"direct residual {rho.residual:.3g} exceeds {tol:g}")
            return rho
        log.warning("direct residual %.3g > %.3g, falling back to time integration", rho.residual, tol)

    rho = _solve_integrate(L, dims, kappa=kappa)
    if rho.residual > tol:
        raise NoConvergence(f"integrated residual {rho.residual:.3g} exceeds {tol:g}")
    return rho


def solve(m: ModelParams, dims: FockDims | None = None, method: str = "auto") -> DensityMatrix:
    """Convenience: Hamiltonian, Liouvillian and steady state in units of ``kappa_L``."""
    dims = dims or FockDims()
    mk = m.in_kappa_units()
    L = liouvillian(build_hamiltonian(mk, dims), mk)
    return steady_state(L, dims, method=method)
