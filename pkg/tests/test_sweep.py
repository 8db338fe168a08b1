import json
import math

import pytest

from spincav.fock import FockDims
from spincav.params import Direction, PhysicalParams
from spincav.sweep import (
    COLUMNS,
    ConfigError,
    SweepRow,
    SweepSpec,
    emit,
    evaluate_point,
    load_config,
    physical_from_dict,
    read_rows,
    run_sweep,
)


def small_spec(**kw):
    base = dict(start=-25.0, stop=25.0, num_points=5, cutoff=FockDims(3, 3))
    base.update(kw)
    return SweepSpec(**base)


def write(tmp_path, text, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_no_config_and_empty_file_give_defaults(tmp_path):
    assert load_config(None) == (PhysicalParams(), SweepSpec())
    assert load_config(write(tmp_path, "")) == (PhysicalParams(), SweepSpec())


def test_partial_override_keeps_other_defaults(tmp_path):
    params, spec = load_config(write(tmp_path, "physical:\n  power_fW: 2.0\n  radius_um: 40\nsweep:\n  num_points: 11\n"))
    default = PhysicalParams()
    assert params.drive_power_Pin == pytest.approx(2e-15)
    assert params.radius_L == params.radius_R == pytest.approx(40e-6)
    assert params.wavelength_vacuum == default.wavelength_vacuum
    assert spec.num_points == 11 and spec.start == SweepSpec().start


def test_negative_quality_factor_is_validation_error(tmp_path):
    with pytest.raises(ConfigError) as err:
        load_config(write(tmp_path, "physical:\n  quality_factor_L: -5\n"))
    assert err.value.code == "VALIDATION_ERROR"
    assert any("quality_factor_L" in p for p in err.value.problems)


def test_unknown_key_is_validation_error():
    with pytest.raises(ConfigError) as err:
        physical_from_dict({"wavelength": 1550})
    assert err.value.code == "VALIDATION_ERROR"


def test_malformed_yaml_reports_line(tmp_path):
    with pytest.raises(ConfigError) as err:
        load_config(write(tmp_path, "physical:\n  power_fW: 1\n  radius_um: [40\n"))
    assert err.value.code == "PARSE_ERROR"
    assert ":4:" in err.value.problems[0] or ":3:" in err.value.problems[0]


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ConfigError) as err:
        load_config(tmp_path / "absent.yaml")
    assert err.value.code == "PARSE_ERROR"


def test_grid_endpoints():
    assert small_spec().grid() == [-25.0, -12.5, 0.0, 12.5, 25.0]


def test_one_row_gives_header_plus_line(tmp_path):
    row = evaluate_point(PhysicalParams(), small_spec(), 20.26, Direction.CW)
    out = tmp_path / "one.csv"
    emit([row], "csv", out)
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0].split(",") == list(COLUMNS)
    assert "wall_time_ms" not in lines[0]


def test_timing_column_is_opt_in(tmp_path):
    row = evaluate_point(PhysicalParams(), small_spec(), 0.0, Direction.CW)
    out = tmp_path / "t.csv"
    emit([row], "csv", out, timing=True)
    assert out.read_text().splitlines()[0].endswith("wall_time_ms")


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_round_trip_to_twelve_digits(tmp_path, fmt):
    rows = run_sweep(small_spec(), PhysicalParams())
    out = tmp_path / f"rows.{fmt}"
    emit(rows, fmt, out)
    back = read_rows(out)
    assert len(back) == len(rows) == 10
    for a, b in zip(rows, back):
        assert a.direction is b.direction and a.error == b.error
        for name in COLUMNS:
            if name in ("direction", "error"):
                continue
            x, y = getattr(a, name), getattr(b, name)
            assert (math.isnan(x) and math.isnan(y)) or y == pytest.approx(x, rel=1e-11, abs=1e-300)


def test_jsonl_uses_null_for_missing(tmp_path):
    row = SweepRow(sweep_value=1.0, direction=Direction.CCW, error="ZERO_DRIVE")
    out = tmp_path / "r.jsonl"
    emit([row], "jsonl", out)
    rec = json.loads(out.read_text())
    assert rec["t_total"] is None and rec["direction"] == "ccw" and rec["error"] == "ZERO_DRIVE"


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(ValueError):
        emit([], "xml", tmp_path / "x")


def test_rows_ordered_direction_then_grid():
    rows = run_sweep(small_spec(engine="analytic"), PhysicalParams())
    assert [r.direction for r in rows] == [Direction.CW] * 5 + [Direction.CCW] * 5
    assert [r.sweep_value for r in rows[:5]] == small_spec().grid()


def test_reruns_are_byte_identical(tmp_path):
    spec = small_spec()
    emit(run_sweep(spec, PhysicalParams()), "csv", tmp_path / "a.csv")
    emit(run_sweep(spec, PhysicalParams()), "csv", tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_parallel_matches_serial(tmp_path):
    spec = small_spec()
    emit(run_sweep(spec, PhysicalParams(), workers=1), "csv", tmp_path / "s.csv")
    emit(run_sweep(spec, PhysicalParams(), workers=2), "csv", tmp_path / "p.csv")
    assert (tmp_path / "s.csv").read_bytes() == (tmp_path / "p.csv").read_bytes()


def test_zero_drive_point_records_error():
    row = evaluate_point(physical_from_dict({"power_fW": 0.0}), small_spec(), 0.0, Direction.CW)
    assert "ZERO_DRIVE" in row.error
    assert math.isnan(row.t_total)
    assert row.solver_residual <= 1e-8


def test_spectrum_peaks_follow_direction():
    spec = small_spec(start=-20.2638273, stop=20.2638273, num_points=2)
    rows = {(r.direction, r.sweep_value > 0): r for r in run_sweep(spec, PhysicalParams())}
    assert rows[(Direction.CW, True)].t_left > 0.95
    assert rows[(Direction.CW, False)].t_right > 0.95
    assert rows[(Direction.CCW, True)].t_right > 0.95
    assert rows[(Direction.CCW, False)].t_left > 0.95


def test_rotation_sweep_at_rest_is_reciprocal():
    spec = small_spec(variable="rotation_freq", start=0.0, stop=9.4e3, num_points=2)
    rows = run_sweep(spec, PhysicalParams())
    rest = [r for r in rows if r.sweep_value == 0.0]
    spun = [r for r in rows if r.sweep_value > 0]
    assert rest[0].g2_output_numeric == pytest.approx(rest[1].g2_output_numeric, rel=1e-9)
    cw, ccw = sorted(spun, key=lambda r: r.direction.value == "ccw")
    assert cw.g2_output_numeric < 1e-3 < ccw.g2_output_numeric
