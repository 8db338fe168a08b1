import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spincav.fock import (
    DimensionMismatch,
    FockDims,
    FockOperator,
    annihilation,
    creation,
    expectation,
    number,
)


def test_dims_invariants():
    assert FockDims(2, 3).size == 12
    assert FockDims(2, 3).index(1, 2) == 1 * 4 + 2
    with pytest.raises(ValueError):
        FockDims(1, 4)


def test_ladder_action():
    dims = FockDims(2, 2)
    aL = annihilation(dims, "L")
    assert np.allclose(aL.apply(dims.basis_state(1, 0)), dims.basis_state(0, 0))
    assert np.allclose(aL.apply(dims.basis_state(2, 1)), np.sqrt(2) * dims.basis_state(1, 1))
    aR = annihilation(dims, "R")
    assert np.allclose(aR.apply(dims.basis_state(2, 1)), dims.basis_state(2, 0))


@pytest.mark.parametrize("mode", ["L", "R"])
def test_number_operator(mode):
    dims = FockDims(3, 4)
    n = number(dims, mode)
    for nL in range(4):
        for nR in range(5):
            psi = dims.basis_state(nL, nR)
            expected = nL if mode == "L" else nR
            assert np.allclose(n.apply(psi), expected * psi)
    n_max = 3 if mode == "L" else 4
    eig = np.unique(np.round(np.linalg.eigvalsh(n.toarray()), 12))
    assert np.array_equal(eig, np.arange(n_max + 1))


def test_commutators():
    dims = FockDims(3, 3)
    aL, aR = annihilation(dims, "L"), annihilation(dims, "R")
    comm = aL.commutator(aL.dag()).toarray()
    for nL in range(4):
        for nR in range(4):
            i = dims.index(nL, nR)
            expected = 1.0 if nL < 3 else -3.0
            assert comm[i, i] == pytest.approx(expected)
    assert np.count_nonzero(comm - np.diag(np.diag(comm))) == 0
    assert aL.commutator(aR).toarray().any() == False  # noqa: E712


def _random_op(dims, rng):
    m = rng.normal(size=(dims.size, dims.size)) + 1j * rng.normal(size=(dims.size, dims.size))
    return FockOperator(dims, m)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_adjoint_antihomomorphism(seed):
    rng = np.random.default_rng(seed)
    dims = FockDims(2, 2)
    A, B = _random_op(dims, rng), _random_op(dims, rng)
    assert np.allclose((A @ B).dag().toarray(), (B.dag() @ A.dag()).toarray(), atol=1e-12)
    assert np.array_equal(A.dag().dag().toarray(), A.toarray())


def test_algebra_and_mismatch():
    d1, d2 = FockDims(2, 2), FockDims(3, 2)
    a = annihilation(d1, "L")
    assert np.allclose((2 * a + a * 3 - a / 1).toarray(), 4 * a.toarray())
    assert np.allclose((a * a.dag()).toarray(), a.toarray() @ a.dag().toarray())
    with pytest.raises(DimensionMismatch):
        a + annihilation(d2, "L")
    with pytest.raises(DimensionMismatch):
        FockOperator(d1, np.eye(4))
    with pytest.raises(AttributeError):
        a.dims = d2


def test_expectation():
    dims = FockDims(2, 2)
    n = number(dims, "L")
    assert expectation(dims.projector(0, 0), n) == 0
    assert expectation(dims.projector(1, 0), n) == 1
    mixed = np.eye(dims.size) / dims.size
    assert expectation(mixed, FockOperator.identity(dims)) == pytest.approx(1.0)
    with pytest.raises(DimensionMismatch):
        expectation(np.eye(4), n)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_hermitian_expectation_is_real(seed):
    rng = np.random.default_rng(seed)
    dims = FockDims(2, 3)
    x = rng.normal(size=(dims.size, dims.size)) + 1j * rng.normal(size=(dims.size, dims.size))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    a, b = annihilation(dims, "L"), creation(dims, "R")
    h = a @ b + (a @ b).dag() + number(dims, "R")
    val = expectation(rho, h)
    assert abs(val.imag) <= 1e-12 * max(1.0, abs(val.real))
