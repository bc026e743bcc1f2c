#!/usr/bin/env python3
"""Grid-convergence sweep: rerun the baseline scenario over a range of time
steps and tabulate THD and the energy-audit imbalance.

Runs are independent, so they may execute in parallel; the worker count is
capped by the HARMFLOW_THREADS environment variable (default 1).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import harmflow as hf
from harmflow import presets
from harmflow.cli import sweep_thread_cap


def run_one(dt: float, filtered: bool) -> tuple[float, float, float]:
    solver = hf.SolverConfig(dt_s=dt, duration_s=0.5)
    scenario = (
        presets.filtered_scenario(solver) if filtered else presets.baseline_scenario(solver)
    )
    waves = hf.run(scenario)
    window = hf.steady_state_window(waves, scenario.basis, 5)
    spec = hf.spectrum(
        waves.channels["i_src_a"][window.start : window.stop],
        waves.sample_rate_hz,
        scenario.basis.fundamental_hz,
        50,
    )
    audit = hf.energy_audit(waves, scenario, window)
    return dt, spec.thd, audit.relative_imbalance


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--dts",
        default="1e-4,5e-5,2.5e-5,1e-5,5e-6",
        help="comma list of time steps [s]; each must divide the period",
    )
    parser.add_argument(
        "--filtered", action="store_true", help="sweep the filtered scenario"
    )
    args = parser.parse_args()
    dts = [float(v) for v in args.dts.split(",")]

    workers = sweep_thread_cap()
    print(f"sweeping {len(dts)} steps with {workers} worker(s)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda dt: run_one(dt, args.filtered), dts))

    print(f"{'dt [s]':>10} {'THD [%]':>10} {'energy imbalance':>18}")
    for dt, thd, imbalance in sorted(rows, reverse=True):
        print(f"{dt:>10.2e} {100 * thd:>10.4f} {imbalance:>18.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
