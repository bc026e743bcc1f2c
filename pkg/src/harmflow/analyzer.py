"""Synchronous harmonic analysis over integer-period windows.

When the analyzed window spans an exact whole number of fundamental cycles,
the DFT bins at multiples of the fundamental are leakage-free, so harmonic
content is read directly off the transform with a rectangular window and no
zero padding.  Magnitudes are reported as RMS (peak / sqrt(2)); phases are
referenced to cos(2*pi*h*f1*t) at the start of the window.

THD uses the aggregate definition sqrt(sum of squared harmonic RMS values,
h >= 2) over the fundamental RMS.  The DC component is computed and
reported but excluded from THD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

DEFAULT_MAX_ORDER = 50
IEEE519_THD_LIMIT = 0.05


class AnalysisError(ValueError):
    """Raised for window-contract violations or out-of-domain spectra."""


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Per-order harmonic content of one channel.

    ``magnitudes[k]`` is the RMS magnitude at ``orders[k]`` times the
    fundamental; ``dc`` is the mean of the window.
    """

    fundamental_hz: float
    orders: np.ndarray
    magnitudes: np.ndarray
    phases_rad: np.ndarray
    thd: float
    rms_total: float
    dc: float

    def __post_init__(self) -> None:
        orders = np.asarray(self.orders, dtype=int)
        mags = np.asarray(self.magnitudes, dtype=float)
        phases = np.asarray(self.phases_rad, dtype=float)
        if not (len(orders) == len(mags) == len(phases)) or len(orders) < 1:
            raise AnalysisError("orders, magnitudes and phases must match in length")
        if orders[0] != 1:
            raise AnalysisError("spectrum must start at the fundamental (order 1)")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "magnitudes", mags)
        object.__setattr__(self, "phases_rad", phases)
        if mags[0] > 0.0:
            thd_check = math.sqrt(float(np.sum(mags[1:] ** 2))) / mags[0]
            if not math.isclose(thd_check, self.thd, rel_tol=1e-12, abs_tol=1e-300):
                raise AnalysisError(
                    f"stored thd {self.thd!r} does not match magnitudes ({thd_check!r})"
                )
        # Parseval: harmonic plus DC power cannot exceed the window power
        # (equality only for band-limited content).
        power = float(np.sum(mags**2)) + self.dc**2
        if power > self.rms_total**2 * (1.0 + 1e-9) + 1e-300:
            raise AnalysisError(
                f"harmonic power {power!r} exceeds total power {self.rms_total**2!r}"
            )

    def magnitude(self, order: int) -> float:
        idx = int(order) - 1
        if not 0 <= idx < len(self.magnitudes):
            raise AnalysisError(f"order {order} not in spectrum")
        return float(self.magnitudes[idx])

    def write_csv(self, out: IO[str]) -> None:
        """Header ``order,frequency_hz,magnitude_rms,phase_rad``; the DC
        component appears as order 0."""
        out.write("order,frequency_hz,magnitude_rms,phase_rad\n")
        out.write(f"0,0.0,{abs(float(self.dc))!r},0.0\n")
        for h, m, p in zip(self.orders, self.magnitudes, self.phases_rad):
            out.write(
                f"{int(h)},{float(h * self.fundamental_hz)!r},"
                f"{float(m)!r},{float(p)!r}\n"
            )

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            self.write_csv(fh)


@dataclass(frozen=True)
class PowerReport:
    """Active/apparent power and the two power-factor figures."""

    active_power_w: float
    apparent_power_va: float
    true_power_factor: float
    displacement_power_factor: float

    def __post_init__(self) -> None:
        if not abs(self.true_power_factor) <= 1.0:
            raise AnalysisError(
                f"true power factor {self.true_power_factor!r} outside [-1, 1]"
            )
        if abs(self.true_power_factor) > abs(self.displacement_power_factor) + 1e-12:
            raise AnalysisError(
                "true power factor cannot exceed displacement power factor "
                f"({self.true_power_factor!r} vs {self.displacement_power_factor!r})"
            )


@dataclass(frozen=True)
class ComplianceResult:
    """Outcome of a distortion-limit check."""

    passed: bool
    thd: float
    limit: float


def _window_layout(
    n_samples: int, sample_rate_hz: float, fundamental_hz: float, max_order: int
) -> tuple[int, float]:
    """Validate the synchronous-window contract; return (periods, samples/period)."""
    if n_samples < 2:
        raise AnalysisError("window must contain at least 2 samples")
    if sample_rate_hz <= 0.0 or fundamental_hz <= 0.0:
        raise AnalysisError("sample rate and fundamental must be positive")
    if max_order < 1:
        raise AnalysisError(f"max_order must be >= 1, got {max_order}")
    periods_f = n_samples * fundamental_hz / sample_rate_hz
    periods = round(periods_f)
    if periods < 1 or abs(periods_f - periods) > 1e-6:
        raise AnalysisError(
            f"window spans {periods_f!r} fundamental periods; an exact integer "
            "number of whole periods is required"
        )
    spp = n_samples / periods
    if spp < 2 * max_order:
        raise AnalysisError(
            f"order {max_order} exceeds the Nyquist guard: {spp:g} samples per "
            f"period supports at most order {int(spp // 2)}"
        )
    return periods, spp


def spectrum(
    samples: Sequence[float],
    sample_rate_hz: float,
    fundamental_hz: float,
    max_order: int = DEFAULT_MAX_ORDER,
) -> HarmonicSpectrum:
    """Harmonic magnitudes/phases at h*f1 for h = 1..max_order.

    The window must span an exact integer number of fundamental periods and
    carry at least ``2 * max_order`` samples per period.
    """
    x = np.asarray(samples, dtype=float)
    periods, _ = _window_layout(len(x), sample_rate_hz, fundamental_hz, max_order)
    bins = np.fft.rfft(x)
    coeff = 2.0 * bins[np.arange(1, max_order + 1) * periods] / len(x)
    mags = np.abs(coeff) / math.sqrt(2.0)
    phases = np.angle(coeff)
    dc = float(bins[0].real) / len(x)
    rms_total = float(np.sqrt(np.mean(x * x)))
    thd = (
        float(np.sqrt(np.sum(mags[1:] ** 2)) / mags[0]) if mags[0] > 0.0 else math.nan
    )
    return HarmonicSpectrum(
        fundamental_hz=fundamental_hz,
        orders=np.arange(1, max_order + 1),
        magnitudes=mags,
        phases_rad=phases,
        thd=thd,
        rms_total=rms_total,
        dc=dc,
    )


def thd_of(spec: HarmonicSpectrum) -> float:
    """Recompute sqrt(sum_{h>=2} mag_h^2) / mag_1 from the stored magnitudes."""
    m = spec.magnitudes
    if not m[0] > 0.0:
        raise AnalysisError("THD is undefined for a zero fundamental")
    return float(np.sqrt(np.sum(m[1:] ** 2)) / m[0])


def power_report(
    v_samples: Sequence[float],
    i_samples: Sequence[float],
    sample_rate_hz: float,
    fundamental_hz: float,
) -> PowerReport:
    """Active power, apparent power, and true/displacement power factors.

    P is the window mean of v*i and S the product of the window RMS values;
    the displacement factor is the cosine of the angle between the
    fundamental phasors of v and i.
    """
    v = np.asarray(v_samples, dtype=float)
    i = np.asarray(i_samples, dtype=float)
    if len(v) != len(i):
        raise AnalysisError("voltage and current windows must have equal length")
    spec_v = spectrum(v, sample_rate_hz, fundamental_hz, max_order=1)
    spec_i = spectrum(i, sample_rate_hz, fundamental_hz, max_order=1)
    p = float(np.mean(v * i))
    s = spec_v.rms_total * spec_i.rms_total
    if s == 0.0:
        raise AnalysisError("apparent power is zero; power factor undefined")
    if spec_v.magnitudes[0] == 0.0 or spec_i.magnitudes[0] == 0.0:
        raise AnalysisError("fundamental component missing; displacement undefined")
    dpf = math.cos(float(spec_v.phases_rad[0] - spec_i.phases_rad[0]))
    tpf = p / s
    # Guard rounding at |PF| = 1 (Cauchy-Schwarz guarantees |P| <= S).
    tpf = max(-1.0, min(1.0, tpf))
    return PowerReport(
        active_power_w=p,
        apparent_power_va=s,
        true_power_factor=tpf,
        displacement_power_factor=dpf,
    )


def ieee519_check(
    spec: HarmonicSpectrum, thd_limit: float = IEEE519_THD_LIMIT
) -> ComplianceResult:
    """Aggregate-THD compliance: passes only when THD is strictly below the
    limit (a value exactly at the limit fails)."""
    thd = thd_of(spec)
    return ComplianceResult(passed=thd < thd_limit, thd=thd, limit=thd_limit)
