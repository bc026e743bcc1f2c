"""Transient solver checks: conservation laws, waveform structure, window
arithmetic, and failure modes."""

from __future__ import annotations

import io
import math

import numpy as np
import pytest

import harmflow as hf
from harmflow import presets
from harmflow.simulator import (
    CHANNEL_IDS,
    SampleGridError,
    SolverError,
    WindowError,
    last_cycles_window,
)


def _window_rms(x):
    return math.sqrt(float(np.mean(np.asarray(x) ** 2)))


# --- configuration validation -------------------------------------------------


def test_solver_config_validation():
    with pytest.raises(ValueError):
        hf.SolverConfig(dt_s=0.0)
    with pytest.raises(ValueError):
        hf.SolverConfig(duration_s=-1.0)
    with pytest.raises(ValueError):
        hf.SolverConfig(diode_on_ohm=1.0, diode_off_ohm=1e5)
    with pytest.raises(ValueError):
        hf.SolverConfig(max_switch_iterations=0)


def test_load_validation():
    with pytest.raises(ValueError):
        hf.RectifierLoad(front_end_inductance_h=0.0)
    with pytest.raises(ValueError):
        hf.RectifierLoad(load_resistance_ohm=-5.0)


def test_scenario_requires_ten_periods():
    with pytest.raises(ValueError, match="10 fundamental periods"):
        hf.Scenario(
            basis=presets.bundled_basis(),
            load=presets.bundled_load(),
            solver=hf.SolverConfig(duration_s=0.1),
        )


# --- basic runs ------------------------------------------------------------------


def test_zero_source_run_is_silent():
    basis = hf.SystemBasis(fundamental_hz=50.0, source_vrms=0.0, source_inductance_h=0.0016)
    scenario = hf.Scenario(
        basis=basis,
        load=presets.bundled_load(),
        bank=presets.bundled_bank(basis),
        solver=hf.SolverConfig(dt_s=1e-4, duration_s=0.2),
    )
    waves = hf.run(scenario)
    for name, samples in waves.channels.items():
        assert np.max(np.abs(samples)) < 1e-12, name


def test_channel_contract(baseline_run):
    _, waves, _ = baseline_run
    assert set(waves.channels) == set(CHANNEL_IDS)
    lengths = {len(v) for v in waves.channels.values()}
    assert lengths == {waves.n_samples}
    assert waves.n_samples == 50000
    assert waves.sample_rate_hz == pytest.approx(1e5)


def test_no_bank_filter_channels_zero(baseline_run):
    _, waves, _ = baseline_run
    for ph in "abc":
        assert np.max(np.abs(waves.channels[f"i_filter_{ph}"])) == 0.0


def test_filter_channels_active(filtered_run):
    _, waves, _ = filtered_run
    for ph in "abc":
        assert np.max(np.abs(waves.channels[f"i_filter_{ph}"])) > 0.1


def test_determinism():
    solver = hf.SolverConfig(dt_s=5e-5, duration_s=0.2)
    w1 = hf.run(presets.filtered_scenario(solver))
    w2 = hf.run(presets.filtered_scenario(solver))
    for name in CHANNEL_IDS:
        assert np.array_equal(w1.channels[name], w2.channels[name]), name
    assert w1.flagged_steps == w2.flagged_steps


# --- conservation and structure ----------------------------------------------------


@pytest.mark.parametrize("fixture", ["baseline_run", "filtered_run"])
def test_kcl_at_pcc(fixture, request):
    _, waves, _ = request.getfixturevalue(fixture)
    peak = max(np.max(np.abs(waves.channels[f"i_src_{p}"])) for p in "abc")
    for ph in "abc":
        residual = np.abs(
            waves.channels[f"i_src_{ph}"]
            - waves.channels[f"i_bridge_{ph}"]
            - waves.channels[f"i_filter_{ph}"]
        )
        assert np.max(residual) < 1e-6 * peak


def test_periodic_steady_state(settled_filtered_run):
    scenario, waves, _ = settled_filtered_run
    spp = round(waves.sample_rate_hz / scenario.basis.fundamental_hz)
    i_a = waves.channels["i_src_a"]
    last = i_a[-spp:]
    prev = i_a[-2 * spp : -spp]
    assert _window_rms(last - prev) < 1e-3 * _window_rms(last)


def test_three_phase_symmetry(settled_filtered_run):
    scenario, waves, _ = settled_filtered_run
    spp = round(waves.sample_rate_hz / scenario.basis.fundamental_hz)
    assert spp % 3 == 0
    shift = spp // 3
    window = hf.steady_state_window(waves, scenario.basis, 5)
    i_a = waves.channels["i_src_a"]
    i_b = waves.channels["i_src_b"]
    delayed_a = i_a[window.start - shift : window.stop - shift]
    diff = i_b[window.start : window.stop] - delayed_a
    assert _window_rms(diff) < 5e-3 * _window_rms(i_a[window.start : window.stop])


def test_dc_current_never_reverses(baseline_run):
    scenario, waves, _ = baseline_run
    window = hf.steady_state_window(waves, scenario.basis, 5)
    i_dc = waves.channels["i_dc"][window.start : window.stop]
    assert np.min(i_dc) > -1e-6 * float(np.mean(i_dc))


def test_filter_current_matches_frequency_domain_model(filtered_run):
    # Cross-check the two solver paths: the fundamental phasor ratio of
    # filter current to PCC voltage from the transient run must equal the
    # bank admittance from the frequency-domain model.
    import cmath

    scenario, waves, _ = filtered_run
    window = hf.steady_state_window(waves, scenario.basis, 5)
    sl = slice(window.start, window.stop)
    f1 = scenario.basis.fundamental_hz
    spec_v = hf.spectrum(waves.channels["v_pcc_a"][sl], waves.sample_rate_hz, f1, 1)
    spec_i = hf.spectrum(waves.channels["i_filter_a"][sl], waves.sample_rate_hz, f1, 1)
    measured = (spec_i.magnitudes[0] / spec_v.magnitudes[0]) * cmath.exp(
        1j * float(spec_i.phases_rad[0] - spec_v.phases_rad[0])
    )
    predicted = 1.0 / hf.bank_impedance(scenario.bank, f1)
    assert abs(measured - predicted) / abs(predicted) < 1e-3


def test_thd_grid_independence(baseline_run, baseline_run_half_dt):
    scenario, waves, _ = baseline_run
    _, waves_half, _ = baseline_run_half_dt
    thds = []
    for w in (waves, waves_half):
        window = hf.steady_state_window(w, scenario.basis, 5)
        spec = hf.spectrum(
            w.channels["i_src_a"][window.start : window.stop],
            w.sample_rate_hz,
            scenario.basis.fundamental_hz,
            50,
        )
        thds.append(spec.thd)
    assert abs(thds[0] - thds[1]) < 1e-3


# --- energy audit -------------------------------------------------------------------


@pytest.mark.parametrize("fixture", ["baseline_run", "filtered_run"])
def test_energy_audit_balances(fixture, request):
    scenario, waves, _ = request.getfixturevalue(fixture)
    window = hf.steady_state_window(waves, scenario.basis, 5)
    audit = hf.energy_audit(waves, scenario, window)
    assert audit.relative_imbalance < 1e-3
    assert audit.source_energy_j > 0.0
    assert audit.dissipated_j == pytest.approx(
        audit.dissipated_load_j + audit.dissipated_filter_j + audit.dissipated_bridge_j
    )


def test_energy_audit_no_bank_has_zero_filter_term(baseline_run):
    scenario, waves, _ = baseline_run
    window = hf.steady_state_window(waves, scenario.basis, 5)
    audit = hf.energy_audit(waves, scenario, window)
    assert audit.dissipated_filter_j == 0.0


def test_energy_audit_zero_source_all_terms_vanish():
    basis = hf.SystemBasis(fundamental_hz=50.0, source_vrms=0.0, source_inductance_h=0.0016)
    scenario = hf.Scenario(
        basis=basis,
        load=presets.bundled_load(),
        solver=hf.SolverConfig(dt_s=1e-4, duration_s=0.2),
    )
    waves = hf.run(scenario)
    audit = hf.energy_audit(waves, scenario, hf.steady_state_window(waves, basis, 3))
    assert audit.source_energy_j == pytest.approx(0.0, abs=1e-20)
    assert audit.dissipated_j == pytest.approx(0.0, abs=1e-20)
    assert audit.stored_delta_j == pytest.approx(0.0, abs=1e-20)
    assert audit.relative_imbalance == 0.0


def test_energy_imbalance_shrinks_with_dt():
    # Trapezoidal bookkeeping errors scale like dt^2, so two halvings cut
    # the defect by roughly 16x; require at least 8x to absorb switching
    # scatter.  Coarse steps keep the defect above the rounding floor.
    imbalances = {}
    for dt in (1e-4, 2.5e-5):
        scenario = presets.baseline_scenario(hf.SolverConfig(dt_s=dt, duration_s=0.5))
        waves = hf.run(scenario)
        window = hf.steady_state_window(waves, scenario.basis, 5)
        imbalances[dt] = hf.energy_audit(waves, scenario, window).relative_imbalance
    assert imbalances[1e-4] < 1e-3
    assert imbalances[2.5e-5] < 1e-3
    assert imbalances[1e-4] / imbalances[2.5e-5] >= 8.0


def test_energy_audit_rejects_bad_window(baseline_run):
    scenario, waves, _ = baseline_run
    with pytest.raises(WindowError):
        hf.energy_audit(waves, scenario, range(0, waves.n_samples + 5))


# --- switching behavior ---------------------------------------------------------------


def test_iteration_cap_flags_steps():
    solver = hf.SolverConfig(dt_s=1e-4, duration_s=0.2, max_switch_iterations=1)
    waves = hf.run(presets.baseline_scenario(solver))
    assert len(waves.flagged_steps) > 0
    assert all(1 <= k < waves.n_samples for k in waves.flagged_steps)


def test_default_iteration_budget_converges(baseline_run, filtered_run):
    assert baseline_run[1].flagged_steps == ()
    assert filtered_run[1].flagged_steps == ()


def test_singular_matrix_names_step():
    solver = hf.SolverConfig(
        dt_s=1e-4, duration_s=0.2, diode_on_ohm=1e-3, diode_off_ohm=math.inf
    )
    with pytest.raises(SolverError, match="step 1"):
        hf.run(presets.baseline_scenario(solver))


# --- windows ----------------------------------------------------------------------------


def test_steady_state_window_example(baseline_run):
    scenario, waves, _ = baseline_run
    window = hf.steady_state_window(waves, scenario.basis, 5)
    assert window == range(40000, 50000)


def test_last_cycles_window_arithmetic():
    assert last_cycles_window(50000, 1e5, 50.0, 5) == range(40000, 50000)
    assert last_cycles_window(14000, 1e5, 50.0, 5) == range(4000, 14000)


def test_window_rejects_overlong_request(baseline_run):
    scenario, waves, _ = baseline_run
    with pytest.raises(WindowError):
        hf.steady_state_window(waves, scenario.basis, 24)


def test_window_rejects_incommensurate_grid():
    channels = {"x": np.zeros(1000)}
    waves = hf.WaveformSet(sample_rate_hz=100025.0, channels=channels)
    basis = presets.bundled_basis()
    with pytest.raises(SampleGridError, match="T1/k"):
        hf.steady_state_window(waves, basis, 2)


# --- CSV export --------------------------------------------------------------------------


def test_waveform_csv_layout():
    solver = hf.SolverConfig(dt_s=1e-4, duration_s=0.2)
    waves = hf.run(presets.baseline_scenario(solver))
    buf = io.StringIO()
    waves.write_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    header = lines[0].split(",")
    assert header == ["t_s", *CHANNEL_IDS]
    assert len(lines) == 1 + waves.n_samples
    row = lines[3].split(",")
    assert len(row) == 1 + len(CHANNEL_IDS)
    assert float(row[0]) == pytest.approx(2e-4, rel=1e-12)
    # full round-trip precision
    assert float(row[1]) == waves.channels["v_src_a"][2]
