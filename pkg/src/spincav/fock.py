"""Truncated two-mode Fock space.

Basis states ``|n_L, n_R>`` are ordered row-major: the index of ``|n_L, n_R>``
is ``n_L * (n_max_R + 1) + n_R``. Operators are stored as CSR matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np
import scipy.sparse as sp

from .params import Side


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class FockDims:
    n_max_L: int = 4
    n_max_R: int = 4

    def __post_init__(self):
        if int(self.n_max_L) < 2 or int(self.n_max_R) < 2:
            raise ValueError(
                f"photon cutoffs must be >= 2 per mode (got {self.n_max_L}, {self.n_max_R})"
            )

    @classmethod
    def square(cls, n_max: int) -> "FockDims":
        return cls(n_max, n_max)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_max_L + 1, self.n_max_R + 1

    @property
    def size(self) -> int:
        return (self.n_max_L + 1) * (self.n_max_R + 1)

    def index(self, n_L: int, n_R: int) -> int:
        if not (0 <= n_L <= self.n_max_L and 0 <= n_R <= self.n_max_R):
            raise IndexError(f"|{n_L},{n_R}> outside cutoff {self.shape}")
        return n_L * (self.n_max_R + 1) + n_R

    def basis_state(self, n_L: int, n_R: int) -> np.ndarray:
        psi = np.zeros(self.size, dtype=complex)
        psi[self.index(n_L, n_R)] = 1.0
        return psi

    def projector(self, n_L: int, n_R: int) -> np.ndarray:
        psi = self.basis_state(n_L, n_R)
        return np.outer(psi, psi.conj())


class FockOperator:
    """Immutable operator on a :class:`FockDims` space.

    Supports ``+``, ``-``, ``*`` (scalar or operator product), ``@``, and
    :meth:`dag`. Mixing operators from different cutoffs raises
    :class:`DimensionMismatch`.
    """

    __slots__ = ("dims", "_matrix")
    __array_priority__ = 100

    def __init__(self, dims: FockDims, matrix):
        m = sp.csr_matrix(matrix, dtype=complex)
        if m.shape != (dims.size, dims.size):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match dims {dims}")
        m.sum_duplicates()
        m.eliminate_zeros()
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "_matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("FockOperator is immutable")

    @property
    def matrix(self) -> sp.csr_matrix:
        return self._matrix.copy()

    @property
    def csr(self) -> sp.csr_matrix:
        # read-only by convention; avoids copies in the hot path
        return self._matrix

    def toarray(self) -> np.ndarray:
        return self._matrix.toarray()

    @classmethod
    def identity(cls, dims: FockDims) -> "FockOperator":
        return cls(dims, sp.identity(dims.size, dtype=complex, format="csr"))

    @classmethod
    def zero(cls, dims: FockDims) -> "FockOperator":
        return cls(dims, sp.csr_matrix((dims.size, dims.size), dtype=complex))

    def _check(self, other: "FockOperator"):
        if self.dims != other.dims:
            raise DimensionMismatch(f"cannot combine operators on {self.dims} and {other.dims}")

    def __add__(self, other):
        if isinstance(other, FockOperator):
            self._check(other)
            return FockOperator(self.dims, self._matrix + other._matrix)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, FockOperator):
            self._check(other)
            return FockOperator(self.dims, self._matrix - other._matrix)
        return NotImplemented

    def __neg__(self):
        return FockOperator(self.dims, -self._matrix)

    def __mul__(self, other):
        if isinstance(other, FockOperator):
            return self @ other
        if isinstance(other, Number):
            return FockOperator(self.dims, self._matrix * complex(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return FockOperator(self.dims, self._matrix * complex(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number):
            return FockOperator(self.dims, self._matrix / complex(other))
        return NotImplemented

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            self._check(other)
            return FockOperator(self.dims, self._matrix @ other._matrix)
        return NotImplemented

    def dag(self) -> "FockOperator":
        return FockOperator(self.dims, self._matrix.conj().T)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self._matrix @ np.asarray(psi, dtype=complex)

    def commutator(self, other: "FockOperator") -> "FockOperator":
        return self @ other - other @ self

    def allclose(self, other: "FockOperator", atol: float = 0.0) -> bool:
        self._check(other)
        diff = self._matrix - other._matrix
        return diff.nnz == 0 or float(abs(diff).max()) <= atol

    def __repr__(self):
        return f"FockOperator(dims={self.dims}, nnz={self._matrix.nnz})"


def _ladder(n_max: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n_max + 1)), 1, format="csr", dtype=complex)


def annihilation(dims: FockDims, mode: Side | str) -> FockOperator:
    """Ladder operator ``a`` on ``mode`` tensored with identity on the other mode."""
    mode = Side(mode)
    if mode is Side.L:
        m = sp.kron(_ladder(dims.n_max_L), sp.identity(dims.n_max_R + 1), format="csr")
    else:
        m = sp.kron(sp.identity(dims.n_max_L + 1), _ladder(dims.n_max_R), format="csr")
    return FockOperator(dims, m)


def creation(dims: FockDims, mode: Side | str) -> FockOperator:
    return annihilation(dims, mode).dag()


def number(dims: FockDims, mode: Side | str) -> FockOperator:
    a = annihilation(dims, mode)
    return a.dag() @ a


def expectation(rho, op: FockOperator) -> complex:
    """``Tr(rho O)`` for a density matrix (array or :class:`DensityMatrix`)."""
    mat = getattr(rho, "matrix", rho)
    mat = np.asarray(mat)
    if mat.shape != (op.dims.size, op.dims.size):
        raise DimensionMismatch(f"density matrix shape {mat.shape} does not match {op.dims}")
    # Tr(rho O) = sum_ij rho_ji O_ij
    coo = op.csr.tocoo()
    return complex(np.sum(mat[coo.col, coo.row] * coo.data))
