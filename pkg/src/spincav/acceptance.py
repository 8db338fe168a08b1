"""Acceptance checks at the published device parameters.

Each ``criterion_*`` function returns a :class:`CriterionResult`. Sweeps are
shared through an :class:`AcceptanceContext` so the full set costs one
detuning spectrum and one rotation sweep.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import analytic
from .dynamics import build_hamiltonian, liouvillian, solve, steady_state
from .fock import FockDims
from .observables import g2_cavity, g2_output, mean_photon_numbers, transmission
from .params import (
    Direction,
    PhysicalParams,
    decay_rate,
    derive_model,
    drive_amplitude,
    fizeau_shift,
    kerr_strength,
    model_from_kappa,
)
from .sweep import SweepRow, SweepSpec, run_sweep

CW, CCW = Direction.CW, Direction.CCW

# below this mean photon number a fourth moment is under double-precision noise
POPULATION_FLOOR = 1e-12


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


@dataclass
class AcceptanceContext:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    cutoff: FockDims = field(default_factory=FockDims)
    spectrum_points: int = 801
    rotation_points: int = 201
    workers: int = 1
    _spectrum: list[SweepRow] | None = None
    _rotation: list[SweepRow] | None = None
    spectrum_seconds: float = 0.0

    @property
    def kappa(self) -> float:
        return decay_rate(self.params, "L")

    @property
    def fizeau(self) -> float:
        return fizeau_shift(self.params, "L") / self.kappa

    @property
    def kerr(self) -> float:
        return kerr_strength(self.params) / self.kappa

    @property
    def eps(self) -> float:
        return drive_amplitude(self.params, self.kappa) / self.kappa

    def model(self, detuning_kappa: float, direction: Direction, params: PhysicalParams | None = None):
        p = params or self.params
        return derive_model(p, detuning_kappa * self.kappa, direction).in_kappa_units()

    def spectrum(self) -> list[SweepRow]:
        if self._spectrum is None:
            spec = SweepSpec("detuning_Delta", -40.0, 40.0, self.spectrum_points, cutoff=self.cutoff)
            t0 = time.perf_counter()
            self._spectrum = run_sweep(spec, self.params, workers=self.workers)
            self.spectrum_seconds = time.perf_counter() - t0
        return self._spectrum

    def rotation(self) -> list[SweepRow]:
        if self._rotation is None:
            spec = SweepSpec("rotation_freq", 0.0, 20e3, self.rotation_points, cutoff=self.cutoff)
            self._rotation = run_sweep(spec, self.params, workers=self.workers)
        return self._rotation


def _by_direction(rows, direction):
    rows = [r for r in rows if r.direction is direction]
    return np.array([r.sweep_value for r in rows]), rows


def _point(ctx: AcceptanceContext, detuning: float, direction: Direction, cutoff: FockDims | None = None):
    m = ctx.model(detuning, direction)
    rho = solve(m, cutoff or ctx.cutoff)
    return m, rho


def criterion_1(ctx: AcceptanceContext) -> CriterionResult:
    rows = ctx.spectrum()
    x, cw = _by_direction(rows, CW)
    _, ccw = _by_direction(rows, CCW)
    t21 = np.array([r.t_total for r in cw])
    t12 = np.array([r.t_total for r in ccw])
    gap = float(np.max(np.abs(t21 - t12)))
    ok = gap <= 0.01 and ctx.spectrum_seconds <= 300
    parts = [f"max|T21-T12|={gap:.2e}"]
    for label, t in (("T21", t21), ("T12", t12)):
        for sign, mask in ((-1, x < 0), (1, x > 0)):
            i = int(np.argmax(np.where(mask, t, -np.inf)))
            peak, where = t[i], x[i]
            ok &= peak >= 0.95 and abs(where - sign * ctx.fizeau) <= 0.5
            parts.append(f"{label} peak {peak:.4f}@{where:+.2f}")
    parts.append(f"DeltaF={ctx.fizeau:.3f}, sweep {ctx.spectrum_seconds:.0f}s")
    return CriterionResult(1, "classical reciprocity", bool(ok), ", ".join(parts))


def criterion_2(ctx: AcceptanceContext) -> CriterionResult:
    f = ctx.fizeau
    checks = [(+f, CW, "t_left"), (+f, CCW, "t_right"), (-f, CW, "t_right"), (-f, CCW, "t_left")]
    ok = True
    parts = []
    for detuning, direction, path in checks:
        m, rho = _point(ctx, detuning, direction)
        tb = transmission(rho, m)
        value = getattr(tb, path)
        ok &= value >= 0.9 and abs(tb.t_interference) <= 0.05
        parts.append(f"{direction.value}@{detuning:+.2f}: {path}={value:.4f} |TI|={abs(tb.t_interference):.1e}")
    return CriterionResult(2, "path separation", bool(ok), "; ".join(parts))


def _optimum_values(ctx: AcceptanceContext):
    f = ctx.fizeau
    m21, rho21 = _point(ctx, +f, CW)
    m12, rho12 = _point(ctx, -f, CCW)
    return {
        "g21": g2_output(rho21, m21).g2_output,
        "g12": g2_output(rho12, m12).g2_output,
        "gLcw": g2_cavity(rho21, "L"),
        "gLccw": g2_cavity(rho12, "L"),
    }


def criterion_3(ctx: AcceptanceContext) -> CriterionResult:
    v = _optimum_values(ctx)
    ratio = v["g12"] / v["g21"]
    ok = v["g21"] <= 3e-5 and 0.005 <= v["g12"] <= 0.02 and ratio >= 300
    detail = f"g21={v['g21']:.3e}, g12={v['g12']:.3e}, g12/g21={ratio:.0f} (U={ctx.kerr:.2f}, DeltaF={ctx.fizeau:.2f})"
    return CriterionResult(3, "nonreciprocal blockade", bool(ok), detail)


def criterion_4(ctx: AcceptanceContext) -> CriterionResult:
    v = _optimum_values(ctx)
    r_ccw = v["g12"] / v["gLccw"]
    r_cw = v["gLcw"] / v["g21"]
    ok = 3 <= r_ccw <= 5 and 150 <= r_cw <= 400
    return CriterionResult(4, "enhancement ratios", bool(ok),
                           f"g12/gL,ccw={r_ccw:.2f}, gL,cw/g21={r_cw:.1f}")


def criterion_5(ctx: AcceptanceContext, u: float = 20.0) -> CriterionResult:
    closed_out_cw, closed_cav = analytic.g2_optimal(CW, u)
    closed_out_ccw, _ = analytic.g2_optimal(CCW, u)
    ok = True
    parts = []
    for direction, detuning, closed_out in ((CW, u, closed_out_cw), (CCW, -u, closed_out_ccw)):
        m = model_from_kappa(detuning, u, u, ctx.eps, direction)
        rho = solve(m, ctx.cutoff)
        num_out = g2_output(rho, m).g2_output
        amps = analytic.steady_amplitudes(m)
        ana_out = analytic.g2_output_analytic(amps)
        ok &= 1 / 1.5 <= num_out / closed_out <= 1.5
        ok &= abs(ana_out / closed_out - 1) <= 0.02
        parts.append(f"{direction.value}: num/closed={num_out / closed_out:.4f}, ana/closed={ana_out / closed_out:.4f}")
        if direction is CW:
            num_cav = g2_cavity(rho, "L")
            ana_cav = analytic.g2_cavity_analytic(amps)
            ok &= 1 / 1.5 <= num_cav / closed_cav <= 1.5
            ok &= abs(ana_cav / closed_cav - 1) <= 0.02
            parts.append(f"cavity: num/closed={num_cav / closed_cav:.4f}, ana/closed={ana_cav / closed_cav:.4f}")
    return CriterionResult(5, "closed-form agreement", bool(ok), "; ".join(parts))


def criterion_6(ctx: AcceptanceContext) -> CriterionResult:
    rows = ctx.rotation()
    x, cw = _by_direction(rows, CW)
    _, ccw = _by_direction(rows, CCW)
    g21 = np.array([r.g2_output_numeric for r in cw])
    g12 = np.array([r.g2_output_numeric for r in ccw])
    where = float(x[int(np.nanargmin(g21))])
    at_rest = abs(g21[0] / g12[0] - 1)
    ok = abs(where - 9.4e3) <= 500 and at_rest <= 0.05 and x[0] == 0.0
    return CriterionResult(6, "rotation sweep", bool(ok),
                           f"argmin g21 at {where / 1e3:.2f} kHz (min {np.nanmin(g21):.3e}), "
                           f"|g21/g12-1| at rest={at_rest:.1e}")


def criterion_7(ctx: AcceptanceContext) -> CriterionResult:
    worst, worst_at, n = 0.0, None, 0
    for label, rows in (("spectrum", ctx.spectrum()), ("rotation", ctx.rotation())):
        for r in rows:
            pairs = ((r.g2_output_numeric, r.g2_output_analytic, "out"),
                     (r.g2_cavity_L_numeric, r.g2_cavity_L_analytic, "cavL"))
            for num, ana, which in pairs:
                if not (num > 1e-7 and r.t_total > 0.1):
                    continue
                n += 1
                dev = abs(ana - num) / num
                if not dev <= worst:
                    worst, worst_at = dev, (label, which, r.direction.value, r.sweep_value)
    ok = n > 0 and worst <= 0.10
    return CriterionResult(7, "oracle equivalence", bool(ok),
                           f"{n} comparisons, worst relative deviation {worst:.2%} at {worst_at}")


def _coherent_product(dims: FockDims, alpha_L: complex, alpha_R: complex) -> np.ndarray:
    def coherent(alpha, n_max):
        n = np.arange(n_max + 1)
        fact = np.array([math.factorial(int(k)) for k in n], dtype=float)
        return np.exp(-abs(alpha) ** 2 / 2) * alpha**n / np.sqrt(fact)

    return np.kron(coherent(alpha_L, dims.n_max_L), coherent(alpha_R, dims.n_max_R))


def criterion_8(ctx: AcceptanceContext) -> CriterionResult:
    linear = replace(ctx.params, nonlinear_index_n2=0.0)
    worst_g2, worst_fid, checked = 0.0, 1.0, 0
    for detuning in np.arange(-40.0, 40.1, 5.0):
        for direction in (CW, CCW):
            m = ctx.model(float(detuning), direction, params=linear)
            rho = solve(m, ctx.cutoff)
            values = [g2_output(rho, m).g2_output]
            nL, nR = mean_photon_numbers(rho)
            if nL > POPULATION_FLOOR:
                values.append(g2_cavity(rho, "L"))
            if nR > POPULATION_FLOOR:
                values.append(g2_cavity(rho, "R"))
            checked += len(values)
            worst_g2 = max(worst_g2, max(abs(v - 1) for v in values))
            amps = analytic.steady_amplitudes(m)
            psi = _coherent_product(ctx.cutoff, amps.c10, amps.c01)
            worst_fid = min(worst_fid, rho.fidelity_with_pure(psi))
    ok = worst_g2 <= 1e-4 and worst_fid >= 0.999
    return CriterionResult(8, "linear limit", bool(ok),
                           f"{checked} g2 values, max|g2-1|={worst_g2:.1e}, min fidelity={worst_fid:.8f}")


def criterion_9(ctx: AcceptanceContext) -> CriterionResult:
    rows = ctx.spectrum() + ctx.rotation()
    worst_res = max(r.solver_residual for r in rows)
    errors = sorted({r.error for r in rows if r.error})
    ok = worst_res <= 1e-8 and not errors

    problems = []
    for detuning in (-ctx.fizeau, 0.0, ctx.fizeau):
        for direction in (CW, CCW):
            m = ctx.model(detuning, direction)
            h = build_hamiltonian(m, ctx.cutoff)
            ok &= h.hermiticity_error() <= 1e-12
            rho = steady_state(liouvillian(h, m), ctx.cutoff)
            problems += rho.invariant_violations()

    big = FockDims(ctx.cutoff.n_max_L + 1, ctx.cutoff.n_max_R + 1)
    worst_conv = 0.0
    for detuning, direction in ((ctx.fizeau, CW), (-ctx.fizeau, CCW), (-ctx.fizeau, CW), (ctx.fizeau, CCW)):
        m = ctx.model(detuning, direction)
        small_rho, big_rho = solve(m, ctx.cutoff), solve(m, big)
        a = [transmission(small_rho, m).t_total, g2_output(small_rho, m).g2_output, g2_cavity(small_rho, "L")]
        b = [transmission(big_rho, m).t_total, g2_output(big_rho, m).g2_output, g2_cavity(big_rho, "L")]
        worst_conv = max(worst_conv, max(abs(x / y - 1) for x, y in zip(a, b)))
    ok &= not problems and worst_conv <= 0.01
    detail = (f"max residual {worst_res:.1e} over {len(rows)} points, row errors {errors or 'none'}, "
              f"invariant violations {len(problems)}, cutoff {ctx.cutoff.n_max_L}->{big.n_max_L} "
              f"max change {worst_conv:.1e}")
    return CriterionResult(9, "numerical hygiene", bool(ok), detail)


def criterion_10(ctx: AcceptanceContext) -> CriterionResult:
    scaled = []
    for u in (10.0, 20.0, 40.0):
        m = model_from_kappa(u, u, u, ctx.eps, CW)
        rho = solve(m, ctx.cutoff)
        scaled.append(g2_output(rho, m).g2_output * u**4)
    spread = max(scaled) / min(scaled) - 1
    ok = spread <= 0.05
    return CriterionResult(10, "scaling law", bool(ok),
                           "g21*(U/kappa)^4 = " + ", ".join(f"{s:.4f}" for s in scaled) + f" (spread {spread:.2%})")


CRITERIA = (
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
)


def run_criterion(fn, ctx: AcceptanceContext) -> CriterionResult:
    t0 = time.perf_counter()
    result = fn(ctx)
    result.seconds = time.perf_counter() - t0
    return result


def run_all(ctx: AcceptanceContext | None = None, echo=print) -> list[CriterionResult]:
    ctx = ctx or AcceptanceContext()
    results = []
    for fn in CRITERIA:
        result = run_criterion(fn, ctx)
        if echo:
            echo(result.line())
        results.append(result)
    return results
