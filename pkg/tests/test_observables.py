import math

import numpy as np
import pytest

from spincav import analytic
from spincav.dynamics import DensityMatrix, solve
from spincav.fock import FockDims, expectation
from spincav.observables import (
    ObservableError,
    g2_cavity,
    g2_output,
    g2_terms,
    mean_photon_numbers,
    output_operator,
    photon_flux_in,
    transmission,
)
from spincav.params import model_from_kappa

from conftest import DEVICE_EPS_OVER_KAPPA as EPS

F = 20.2638273  # device Fizeau shift in kappa units
U = 20.00246825


def device_model(detuning, direction, kerr=U, eps=EPS):
    return model_from_kappa(detuning, F, kerr, eps, direction)


def test_photon_flux_in():
    assert photon_flux_in(model_from_kappa(0, 0, 0, 0.0)) == 0.0
    assert photon_flux_in(model_from_kappa(0, 0, 0, 0.08)) == pytest.approx(0.0064, rel=1e-14)


@pytest.mark.parametrize("direction, main, other", [("cw", "t_left", "t_right"), ("ccw", "t_right", "t_left")])
def test_path_at_positive_peak(dims, direction, main, other):
    m = device_model(F, direction)
    tb = transmission(solve(m, dims), m)
    assert getattr(tb, main) >= 0.95
    assert getattr(tb, other) <= 0.01
    assert abs(tb.t_interference) <= 0.01
    assert tb.t_total == tb.t_left + tb.t_right + tb.t_interference
    assert tb.direction.value == direction


@pytest.mark.parametrize("direction", ["cw", "ccw"])
@pytest.mark.parametrize("sign", [1, -1])
def test_path_separation_and_small_interference(dims, direction, sign):
    m = device_model(sign * F, direction)
    tb = transmission(solve(m, dims), m)
    through_left = (direction == "cw") == (sign > 0)
    assert (tb.t_left if through_left else tb.t_right) > 0.9
    assert abs(tb.t_interference) <= 0.05


def test_far_detuned_tail(dims):
    m = device_model(100.0, "cw")
    tb = transmission(solve(m, dims), m)
    lorentz = analytic.transmission_analytic(analytic.steady_amplitudes(m), m)
    assert tb.t_total <= 0.01
    assert tb.t_total == pytest.approx(lorentz, rel=1e-3)


def test_zero_drive_errors(dims):
    m = device_model(F, "cw", eps=0.0)
    rho = solve(m, dims)
    with pytest.raises(ObservableError) as info:
        transmission(rho, m)
    assert info.value.code == "ZERO_DRIVE"
    with pytest.raises(ObservableError) as info:
        g2_output(rho, m)
    assert info.value.code == "ZERO_FLUX"
    with pytest.raises(ObservableError) as info:
        g2_cavity(rho, "L")
    assert info.value.code == "ZERO_POPULATION"


@pytest.mark.parametrize("detuning", [-25.0, -F, 0.0, 8.0, F])
@pytest.mark.parametrize("direction", ["cw", "ccw"])
def test_linear_output_is_coherent(dims, detuning, direction):
    m = device_model(detuning, direction, kerr=0.0)
    assert g2_output(solve(m, dims), m).g2_output == pytest.approx(1.0, abs=1e-6)


def test_blockade_at_optimum(dims):
    cw = device_model(F, "cw")
    ccw = device_model(-F, "ccw")
    g21 = g2_output(solve(cw, dims), cw).g2_output
    g12 = g2_output(solve(ccw, dims), ccw).g2_output
    assert g21 == pytest.approx(25 / (16 * 20.0**4), rel=0.05)
    assert g12 == pytest.approx(4 / 20.0**2, rel=0.05)


def test_optimum_exact_point(optimum_cw, optimum_ccw, dims):
    rho = solve(optimum_cw, dims)
    assert g2_output(rho, optimum_cw).g2_output == pytest.approx(9.766e-6, rel=0.02)
    assert g2_cavity(rho, "L") == pytest.approx(2.5e-3, rel=0.02)
    assert g2_output(solve(optimum_ccw, dims), optimum_ccw).g2_output == pytest.approx(0.01, rel=0.02)


def test_cavity_g2_simple_states():
    dims = FockDims(2, 2)
    assert g2_cavity(DensityMatrix(dims, dims.projector(1, 0)), "L") == 0.0
    # coherent state built from Poisson amplitudes on a generous cutoff
    big = FockDims(30, 2)
    alpha = 0.7 + 0.2j
    n = np.arange(31)
    amp = np.exp(-abs(alpha) ** 2 / 2) * alpha**n / np.sqrt([float(math.factorial(k)) for k in n])
    psi = np.kron(amp, [1.0, 0.0, 0.0])
    rho = DensityMatrix.from_pure(big, psi)
    assert g2_cavity(rho, "L") == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("detuning, direction", [(F, "cw"), (-F, "ccw"), (-F, "cw"), (3.0, "ccw"), (-12.0, "cw")])
def test_six_terms_match_direct_output_moments(dims, detuning, direction):
    m = device_model(detuning, direction)
    rho = solve(m, dims)
    rep = g2_output(rho, m)
    out = output_operator(rho, m)
    direct_num = expectation(rho, out.dag() @ out.dag() @ out @ out)
    direct_flux = expectation(rho, out.dag() @ out)
    assert abs(direct_num.imag) <= 1e-12 * abs(direct_num)
    assert math.fsum(rep.term_breakdown) == pytest.approx(direct_num.real, rel=1e-10)
    assert rep.output_flux == pytest.approx(direct_flux.real, rel=1e-10)
    assert rep.numerator == pytest.approx(rep.g2_output * rep.output_flux**2, rel=1e-10)
    assert g2_terms(rho, m) == rep.term_breakdown


def test_transmission_total_equals_output_flux(dims):
    m = device_model(5.0, "cw")
    rho = solve(m, dims)
    tb = transmission(rho, m)
    assert tb.t_total * photon_flux_in(m) == pytest.approx(g2_output(rho, m).output_flux, rel=1e-12)


def test_reciprocity_gap_is_kerr_saturation(dims):
    """T21 - T12 never exceeds the two-photon saturation 2 (eps/kappa)^2 of the Kerr cavity."""
    worst = 0.0
    for detuning in np.linspace(-40, 40, 81):
        cw, ccw = device_model(detuning, "cw"), device_model(detuning, "ccw")
        t21 = transmission(solve(cw, dims), cw).t_total
        t12 = transmission(solve(ccw, dims), ccw).t_total
        worst = max(worst, abs(t21 - t12))
    assert worst <= 2 * EPS**2


def test_reciprocity_at_weaker_drive(dims):
    for detuning in np.linspace(-40, 40, 41):
        cw, ccw = device_model(detuning, "cw", eps=EPS / 2), device_model(detuning, "ccw", eps=EPS / 2)
        t21 = transmission(solve(cw, dims), cw).t_total
        t12 = transmission(solve(ccw, dims), ccw).t_total
        assert abs(t21 - t12) <= 0.01


def test_linear_cavity_coherent_where_it_transmits(dims):
    checked = 0
    for detuning in np.linspace(-40, 40, 41):
        for direction in ("cw", "ccw"):
            m = device_model(detuning, direction)
            rho = solve(m, dims)
            if transmission(rho, m).t_right >= 0.1:
                checked += 1
                assert g2_cavity(rho, "R") == pytest.approx(1.0, abs=1e-3)
    assert checked >= 4


@pytest.mark.parametrize("detuning, direction", [(0.0, "cw"), (2.0, "cw"), (-22.0, "ccw"), (-F, "cw")])
def test_linear_cavity_statistics_follow_amplitudes(dims, detuning, direction):
    """Off its own resonance the linear cavity inherits the Kerr cavity's statistics."""
    m = device_model(detuning, direction)
    amps = analytic.steady_amplitudes(m)
    assert g2_cavity(solve(m, dims), "R") == pytest.approx(analytic.g2_cavity_analytic(amps, "R"), rel=0.02)
