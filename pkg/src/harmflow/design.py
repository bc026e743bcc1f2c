"""Closed-form sizing of shunt harmonic filter branches.

A single-tuned branch is a series R-L-C connected phase to neutral.  The
capacitor is sized from a reactive-power budget at the fundamental,

    Q_var = V^2 / Xc,        Xc = 1 / (2*pi*f*C),

the inductor is tuned so the inductive and capacitive reactances cancel at
the target harmonic,

    L = 1 / ((2*pi*h*f)^2 * C),

and the damping resistor follows from the chosen quality factor

    q = sqrt(L/C) / R.

A second-order high-pass branch keeps the series capacitor but places R in
parallel with L.  Its corner frequency satisfies the same L-C relation and
its quality factor uses the reciprocal convention q = R / X_L, with X_L
evaluated at the corner (where X_L = X_C).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

TWO_PI = 2.0 * math.pi

# Recommended quality-factor ranges.  Out-of-range values warn rather than
# fail: practical designs (including the bundled reference bank) sometimes
# sit just outside them.
SINGLE_TUNED_Q_RANGE = (20.0, 100.0)
HIGH_PASS_Q_RANGE = (0.5, 5.0)

SIX_PULSE_ORDERS = (5, 7, 11, 13)

_REL_TOL = 1e-9


class DesignError(ValueError):
    """Raised when a design quantity is outside its mathematical domain."""


class QualityFactorWarning(UserWarning):
    """Chosen quality factor lies outside the recommended range."""


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0.0:
            raise DesignError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class SystemBasis:
    """Electrical context shared by design and simulation.

    ``source_vrms`` is the per-phase (phase-to-neutral) RMS voltage.  Use
    :meth:`from_line_to_line` when the known figure is the line-to-line
    voltage instead.
    """

    fundamental_hz: float = 50.0
    source_vrms: float = 220.0
    source_inductance_h: float = 0.0016

    def __post_init__(self) -> None:
        if not self.fundamental_hz > 0.0:
            raise DesignError(
                f"fundamental_hz must be positive, got {self.fundamental_hz!r}"
            )
        # Zero volts is allowed so unexcited networks can be simulated.
        if self.source_vrms < 0.0:
            raise DesignError(
                f"source_vrms must be non-negative, got {self.source_vrms!r}"
            )
        if self.source_inductance_h < 0.0:
            raise DesignError(
                "source_inductance_h must be non-negative, got "
                f"{self.source_inductance_h!r}"
            )

    @classmethod
    def from_line_to_line(
        cls, fundamental_hz: float, line_vrms: float, source_inductance_h: float
    ) -> "SystemBasis":
        """Build a basis from a line-to-line RMS voltage."""
        return cls(fundamental_hz, line_vrms / math.sqrt(3.0), source_inductance_h)

    @property
    def period_s(self) -> float:
        return 1.0 / self.fundamental_hz


@dataclass(frozen=True)
class SingleTunedFilter:
    """Series R-L-C shunt branch tuned to one harmonic order."""

    order: float
    capacitance_f: float
    inductance_h: float
    resistance_ohm: float
    quality_factor: float

    def __post_init__(self) -> None:
        _require_positive(
            capacitance_f=self.capacitance_f,
            inductance_h=self.inductance_h,
            resistance_ohm=self.resistance_ohm,
            quality_factor=self.quality_factor,
        )
        if self.order < 2.0:
            raise DesignError(f"harmonic order must be >= 2, got {self.order!r}")
        q_check = math.sqrt(self.inductance_h / self.capacitance_f) / self.resistance_ohm
        if not math.isclose(q_check, self.quality_factor, rel_tol=_REL_TOL):
            raise DesignError(
                f"stored quality factor {self.quality_factor!r} does not match "
                f"sqrt(L/C)/R = {q_check!r}"
            )

    @property
    def tuned_hz(self) -> float:
        """Frequency where the branch reactances cancel."""
        return 1.0 / (TWO_PI * math.sqrt(self.inductance_h * self.capacitance_f))


@dataclass(frozen=True)
class HighPassFilter:
    """Shunt branch with C in series with a parallel R-L damping section."""

    capacitance_f: float
    inductance_h: float
    resistance_ohm: float
    quality_factor: float
    corner_hz: float

    def __post_init__(self) -> None:
        _require_positive(
            capacitance_f=self.capacitance_f,
            inductance_h=self.inductance_h,
            resistance_ohm=self.resistance_ohm,
            quality_factor=self.quality_factor,
            corner_hz=self.corner_hz,
        )
        corner_check = 1.0 / (TWO_PI * math.sqrt(self.inductance_h * self.capacitance_f))
        if not math.isclose(corner_check, self.corner_hz, rel_tol=_REL_TOL):
            raise DesignError(
                f"stored corner {self.corner_hz!r} Hz does not match "
                f"1/(2*pi*sqrt(LC)) = {corner_check!r} Hz"
            )
        q_check = self.resistance_ohm / (TWO_PI * self.corner_hz * self.inductance_h)
        if not math.isclose(q_check, self.quality_factor, rel_tol=_REL_TOL):
            raise DesignError(
                f"stored quality factor {self.quality_factor!r} does not match "
                f"R/X_L at the corner = {q_check!r}"
            )


FilterBranch = SingleTunedFilter | HighPassFilter


@dataclass(frozen=True)
class FilterBank:
    """Ordered collection of shunt branches sharing one bus.

    Single-tuned orders must be strictly increasing and at most one
    high-pass branch is allowed; its corner must sit above the highest
    tuned frequency.
    """

    fundamental_hz: float
    branches: tuple[FilterBranch, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.fundamental_hz > 0.0:
            raise DesignError(
                f"fundamental_hz must be positive, got {self.fundamental_hz!r}"
            )
        object.__setattr__(self, "branches", tuple(self.branches))
        orders = [b.order for b in self.single_tuned]
        if any(prev >= nxt for prev, nxt in zip(orders, orders[1:])):
            raise DesignError(f"tuned orders must be strictly increasing, got {orders}")
        hp = self.high_pass
        if len(hp) > 1:
            raise DesignError("at most one high-pass branch is allowed")
        if hp and self.single_tuned:
            top = max(b.tuned_hz for b in self.single_tuned)
            if hp[0].corner_hz <= top:
                raise DesignError(
                    f"high-pass corner {hp[0].corner_hz!r} Hz must lie above the "
                    f"highest tuned frequency {top!r} Hz"
                )

    @property
    def single_tuned(self) -> tuple[SingleTunedFilter, ...]:
        return tuple(b for b in self.branches if isinstance(b, SingleTunedFilter))

    @property
    def high_pass(self) -> tuple[HighPassFilter, ...]:
        return tuple(b for b in self.branches if isinstance(b, HighPassFilter))


def reactive_power_of_capacitor(c: float, basis: SystemBasis) -> float:
    """Fundamental-frequency reactive power V^2/Xc drawn by capacitance ``c``."""
    _require_positive(capacitance=c)
    xc = 1.0 / (TWO_PI * basis.fundamental_hz * c)
    return basis.source_vrms**2 / xc


def capacitor_from_reactive_power(q_var: float, basis: SystemBasis) -> float:
    """Capacitance supplying ``q_var`` VAR at the fundamental; inverse of
    :func:`reactive_power_of_capacitor`."""
    _require_positive(reactive_power=q_var)
    if basis.source_vrms == 0.0:
        raise DesignError("cannot size a capacitor against a zero-volt basis")
    xc = basis.source_vrms**2 / q_var
    return 1.0 / (TWO_PI * basis.fundamental_hz * xc)


def tune_inductor(c: float, order: float, basis: SystemBasis) -> float:
    """Inductance resonating with ``c`` at ``order`` times the fundamental."""
    _require_positive(capacitance=c, order=order)
    if order < 1.0:
        raise DesignError(f"harmonic order must be >= 1, got {order!r}")
    w = TWO_PI * order * basis.fundamental_hz
    return 1.0 / (w * w * c)


def resistor_from_quality(l: float, c: float, q: float) -> float:
    """Series resistance giving quality factor ``q``: R = sqrt(L/C)/q."""
    _require_positive(inductance=l, capacitance=c, quality_factor=q)
    return math.sqrt(l / c) / q


def design_single_tuned(
    basis: SystemBasis,
    order: float,
    c: float,
    q: float,
    q_range: tuple[float, float] = SINGLE_TUNED_Q_RANGE,
) -> SingleTunedFilter:
    """Size a series R-L-C branch tuned to ``order`` times the fundamental."""
    _require_positive(capacitance=c, quality_factor=q)
    if order < 2.0:
        raise DesignError(f"harmonic order must be >= 2, got {order!r}")
    if not q_range[0] <= q <= q_range[1]:
        warnings.warn(
            f"single-tuned quality factor {q:.4g} outside recommended range "
            f"[{q_range[0]:g}, {q_range[1]:g}]",
            QualityFactorWarning,
            stacklevel=2,
        )
    l = tune_inductor(c, order, basis)
    r = resistor_from_quality(l, c, q)
    return SingleTunedFilter(
        order=order,
        capacitance_f=c,
        inductance_h=l,
        resistance_ohm=r,
        quality_factor=q,
    )


def design_high_pass(
    basis: SystemBasis,
    corner_hz: float,
    c: float,
    q: float,
    q_range: tuple[float, float] = HIGH_PASS_Q_RANGE,
) -> HighPassFilter:
    """Size a high-pass branch with the given corner frequency.

    L places the corner at ``corner_hz`` for the chosen capacitor and the
    damping resistor follows from R = q * X_L(corner).
    """
    _require_positive(corner_hz=corner_hz, capacitance=c, quality_factor=q)
    if not q_range[0] <= q <= q_range[1]:
        warnings.warn(
            f"high-pass quality factor {q:.4g} outside recommended range "
            f"[{q_range[0]:g}, {q_range[1]:g}]",
            QualityFactorWarning,
            stacklevel=2,
        )
    w = TWO_PI * corner_hz
    l = 1.0 / (w * w * c)
    r = q * w * l
    return HighPassFilter(
        capacitance_f=c,
        inductance_h=l,
        resistance_ohm=r,
        quality_factor=q,
        corner_hz=corner_hz,
    )


def design_bank(
    basis: SystemBasis,
    orders: Sequence[float],
    c_per_branch: float,
    st_q: float | Sequence[float],
    hp_corner_hz: float,
    hp_q: float,
) -> FilterBank:
    """Design one single-tuned branch per order plus one high-pass branch.

    ``st_q`` may be a single quality factor shared by every tuned branch or
    one value per order.
    """
    orders = tuple(orders)
    if not orders:
        raise DesignError("at least one tuned order is required")
    if isinstance(st_q, (int, float)):
        qs = (float(st_q),) * len(orders)
    else:
        qs = tuple(float(v) for v in st_q)
        if len(qs) != len(orders):
            raise DesignError(
                f"expected {len(orders)} quality factors, got {len(qs)}"
            )
    branches: list[FilterBranch] = [
        design_single_tuned(basis, h, c_per_branch, q) for h, q in zip(orders, qs)
    ]
    branches.append(design_high_pass(basis, hp_corner_hz, c_per_branch, hp_q))
    return FilterBank(fundamental_hz=basis.fundamental_hz, branches=tuple(branches))


def design_bank_six_pulse(
    basis: SystemBasis,
    c_per_branch: float,
    st_q: float | Sequence[float],
    hp_corner_hz: float,
    hp_q: float,
) -> FilterBank:
    """Standard six-pulse bank: tuned branches at orders 5, 7, 11, 13 plus a
    high-pass branch for the residual high-order content."""
    return design_bank(basis, SIX_PULSE_ORDERS, c_per_branch, st_q, hp_corner_hz, hp_q)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def bank_to_dict(bank: FilterBank) -> dict:
    branches = []
    for b in bank.branches:
        if isinstance(b, SingleTunedFilter):
            branches.append(
                {
                    "kind": "single_tuned",
                    "order": b.order,
                    "c_farads": b.capacitance_f,
                    "l_henries": b.inductance_h,
                    "r_ohms": b.resistance_ohm,
                    "q": b.quality_factor,
                }
            )
        else:
            branches.append(
                {
                    "kind": "high_pass",
                    "corner_hz": b.corner_hz,
                    "c_farads": b.capacitance_f,
                    "l_henries": b.inductance_h,
                    "r_ohms": b.resistance_ohm,
                    "q": b.quality_factor,
                }
            )
    return {"fundamental_hz": bank.fundamental_hz, "branches": branches}


def _branch_from_dict(doc: dict, where: str) -> FilterBranch:
    known_common = {"kind", "c_farads", "l_henries", "r_ohms", "q"}
    kind = doc.get("kind")
    if kind == "single_tuned":
        allowed = known_common | {"order"}
    elif kind == "high_pass":
        allowed = known_common | {"corner_hz"}
    else:
        raise DesignError(f"{where}.kind must be 'single_tuned' or 'high_pass', got {kind!r}")
    unknown = set(doc) - allowed
    if unknown:
        raise DesignError(f"unknown key {sorted(unknown)[0]!r} in {where}")
    missing = allowed - set(doc)
    if missing:
        raise DesignError(f"missing key {sorted(missing)[0]!r} in {where}")
    try:
        if kind == "single_tuned":
            return SingleTunedFilter(
                order=float(doc["order"]),
                capacitance_f=float(doc["c_farads"]),
                inductance_h=float(doc["l_henries"]),
                resistance_ohm=float(doc["r_ohms"]),
                quality_factor=float(doc["q"]),
            )
        return HighPassFilter(
            capacitance_f=float(doc["c_farads"]),
            inductance_h=float(doc["l_henries"]),
            resistance_ohm=float(doc["r_ohms"]),
            quality_factor=float(doc["q"]),
            corner_hz=float(doc["corner_hz"]),
        )
    except DesignError as exc:
        raise DesignError(f"{where}: {exc}") from None


def bank_from_dict(doc: dict, where: str = "bank") -> FilterBank:
    if not isinstance(doc, dict):
        raise DesignError(f"{where} must be a JSON object")
    unknown = set(doc) - {"fundamental_hz", "branches"}
    if unknown:
        raise DesignError(f"unknown key {sorted(unknown)[0]!r} in {where}")
    if "fundamental_hz" not in doc or "branches" not in doc:
        raise DesignError(f"{where} requires keys 'fundamental_hz' and 'branches'")
    branches = [
        _branch_from_dict(b, f"{where}.branches[{i}]")
        for i, b in enumerate(doc["branches"])
    ]
    return FilterBank(
        fundamental_hz=float(doc["fundamental_hz"]), branches=tuple(branches)
    )


def bank_to_json(bank: FilterBank) -> str:
    """Serialize with full round-trip float precision."""
    return json.dumps(bank_to_dict(bank), indent=2)


def bank_from_json(text: str) -> FilterBank:
    return bank_from_dict(json.loads(text))
