"""Fixed-step time-domain simulation of a three-phase six-pulse rectifier
with an optional shunt filter bank at the point of common coupling.

Topology: three ideal sine sources (phases 0 / -120 / -240 degrees) feed the
PCC through the per-phase source inductance; filter branches hang off the
PCC wye-connected to the source neutral; each phase continues through the
rectifier front-end inductance to a six-pulse diode bridge whose DC bus
carries the parallel R-C load.  The front-end inductance sets the
commutation overlap, rounds the line current, and makes the bridge draw
lagging reactive power at the fundamental.

Integration is the implicit trapezoidal rule at fixed dt, assembled as
modified nodal analysis with companion models.  Every filter branch reduces
to a Norton equivalent at its PCC node, so the system solves for eight node
voltages plus the three source branch currents.  Diodes are two-state
resistors; conduction states are resolved per step by fixed-point iteration
(turn on when the anode-cathode voltage exceeds zero, turn off when the
current falls below zero).  Because the matrix depends only on the diode
state word, LU factorizations are cached per state.

All states start at zero; analysis windows exclude the start-up transient.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import IO, Mapping

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .design import FilterBank, SystemBasis

TWO_PI = 2.0 * math.pi

CHANNEL_IDS = (
    "v_src_a", "v_src_b", "v_src_c",
    "v_pcc_a", "v_pcc_b", "v_pcc_c",
    "i_src_a", "i_src_b", "i_src_c",
    "i_bridge_a", "i_bridge_b", "i_bridge_c",
    "i_filter_a", "i_filter_b", "i_filter_c",
    "v_dc", "i_dc",
)

# Node numbering: PCC a/b/c, bridge AC terminals a/b/c, DC rails + and -;
# then three source branch currents.
_PCC = (0, 1, 2)
_BT = (3, 4, 5)
_P, _N = 6, 7
_NUM_NODES = 8
_NUM_UNKNOWNS = 11


class SolverError(RuntimeError):
    """Raised when the transient solve cannot proceed (singular matrix)."""


class WindowError(ValueError):
    """Requested analysis window does not fit the waveform."""


class SampleGridError(ValueError):
    """Sample grid is incommensurate with the fundamental period."""


@dataclass(frozen=True)
class RectifierLoad:
    """Six-pulse bridge load: per-phase front-end inductance into the bridge,
    parallel R-C on the DC bus."""

    front_end_inductance_h: float = 0.023
    load_resistance_ohm: float = 78.0
    load_capacitance_f: float = 50e-6

    def __post_init__(self) -> None:
        for name in (
            "front_end_inductance_h",
            "load_resistance_ohm",
            "load_capacitance_f",
        ):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-step solver settings.

    Defaults resolve a 50 Hz system with 2000 samples per cycle and leave
    ample settling time before the analysis window.
    """

    dt_s: float = 1e-5
    duration_s: float = 0.5
    diode_on_ohm: float = 1e-3
    diode_off_ohm: float = 1e6
    max_switch_iterations: int = 10

    def __post_init__(self) -> None:
        if not self.dt_s > 0.0:
            raise ValueError(f"dt_s must be positive, got {self.dt_s!r}")
        if not self.duration_s > 0.0:
            raise ValueError(f"duration_s must be positive, got {self.duration_s!r}")
        if not self.diode_on_ohm > 0.0:
            raise ValueError(f"diode_on_ohm must be positive, got {self.diode_on_ohm!r}")
        if not self.diode_off_ohm / self.diode_on_ohm >= 1e6:
            raise ValueError(
                "diode_off_ohm / diode_on_ohm must be at least 1e6, got "
                f"{self.diode_off_ohm / self.diode_on_ohm!r}"
            )
        if self.max_switch_iterations < 1:
            raise ValueError(
                f"max_switch_iterations must be >= 1, got {self.max_switch_iterations!r}"
            )


@dataclass(frozen=True)
class Scenario:
    """Complete simulation case: source, rectifier load, optional bank."""

    basis: SystemBasis
    load: RectifierLoad
    bank: FilterBank | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self) -> None:
        min_duration = 10.0 * self.basis.period_s
        if self.solver.duration_s < min_duration:
            raise ValueError(
                f"duration_s must cover at least 10 fundamental periods "
                f"({min_duration!r} s), got {self.solver.duration_s!r}"
            )


@dataclass(frozen=True)
class WaveformSet:
    """Multichannel fixed-rate time series produced by the simulator.

    ``channels`` holds the external contract channels (see ``CHANNEL_IDS``);
    ``i_dc`` is the bridge output current into the DC bus and ``v_dc`` the
    DC bus voltage.  ``aux`` carries solver bookkeeping traces (per-branch
    filter states and the bridge terminal voltages) consumed by
    :func:`energy_audit`; they are not part of the CSV export.
    """

    sample_rate_hz: float
    channels: Mapping[str, np.ndarray]
    flagged_steps: tuple[int, ...] = ()
    aux: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.sample_rate_hz > 0.0:
            raise ValueError("sample_rate_hz must be positive")
        lengths = {len(v) for v in self.channels.values()}
        if len(lengths) != 1 or lengths.pop() < 2:
            raise ValueError("all channels must share one length >= 2")

    @property
    def n_samples(self) -> int:
        return len(next(iter(self.channels.values())))

    @property
    def dt_s(self) -> float:
        return 1.0 / self.sample_rate_hz

    def time(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.dt_s

    def write_csv(self, out: IO[str]) -> None:
        """First column ``t_s`` then one column per contract channel."""
        out.write("t_s," + ",".join(CHANNEL_IDS) + "\n")
        columns = [self.time()] + [np.asarray(self.channels[c]) for c in CHANNEL_IDS]
        rows = np.column_stack(columns).tolist()
        out.write("\n".join(",".join(map(repr, row)) for row in rows))
        out.write("\n")

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            self.write_csv(fh)


def run(scenario: Scenario) -> WaveformSet:
    """Integrate the scenario and return its waveforms.

    Deterministic for identical inputs.  Steps whose diode-state iteration
    hits the cap are recorded in ``flagged_steps`` rather than raised.
    """
    return _TransientSolver(scenario).run()


class _TransientSolver:
    def __init__(self, scenario: Scenario) -> None:
        self.scenario = scenario
        cfg = scenario.solver
        self.dt = cfg.dt_s
        self.n_samples = int(round(cfg.duration_s / cfg.dt_s))
        if self.n_samples < 2:
            raise ValueError("duration_s must span at least two samples")
        self.g_on = 1.0 / cfg.diode_on_ohm
        self.g_off = 1.0 / cfg.diode_off_ohm
        self.max_iter = cfg.max_switch_iterations

        basis = scenario.basis
        load = scenario.load
        dt = self.dt
        self.r_ls = 2.0 * basis.source_inductance_h / dt
        self.g_fe = dt / (2.0 * load.front_end_inductance_h)
        self.g_cdc = 2.0 * load.load_capacitance_f / dt
        self.g_rl = 1.0 / load.load_resistance_ohm

        st = scenario.bank.single_tuned if scenario.bank else ()
        hp = scenario.bank.high_pass if scenario.bank else ()
        self.n_st = len(st)
        self.n_hp = len(hp)
        self.st_r = np.array([b.resistance_ohm for b in st])
        self.st_l = np.array([b.inductance_h for b in st])
        self.st_c = np.array([b.capacitance_f for b in st])
        self.st_rleq = 2.0 * self.st_l / dt
        self.st_rceq = dt / (2.0 * self.st_c)
        self.st_g = 1.0 / (self.st_r + self.st_rleq + self.st_rceq)
        self.hp_r = np.array([b.resistance_ohm for b in hp])
        self.hp_l = np.array([b.inductance_h for b in hp])
        self.hp_c = np.array([b.capacitance_f for b in hp])
        self.hp_rceq = dt / (2.0 * self.hp_c)
        self.hp_glp = dt / (2.0 * self.hp_l)
        self.hp_rsec = 1.0 / (1.0 / self.hp_r + self.hp_glp)
        self.hp_g = 1.0 / (self.hp_rceq + self.hp_rsec)

        self._base_matrix = self._assemble_base()
        self._lu_cache: dict[int, tuple] = {}

        t = np.arange(self.n_samples) * dt
        vpeak = math.sqrt(2.0) * basis.source_vrms
        offsets = np.array([0.0, -TWO_PI / 3.0, -2.0 * TWO_PI / 3.0])
        self.esrc = vpeak * np.sin(
            TWO_PI * basis.fundamental_hz * t[:, None] + offsets[None, :]
        )

    def _assemble_base(self) -> np.ndarray:
        a = np.zeros((_NUM_UNKNOWNS, _NUM_UNKNOWNS))
        g_shunt = float(np.sum(self.st_g) + np.sum(self.hp_g))
        for ph in range(3):
            a[_PCC[ph], _PCC[ph]] += g_shunt
            a[_PCC[ph], _NUM_NODES + ph] = -1.0
            a[_NUM_NODES + ph, _PCC[ph]] = 1.0
            a[_NUM_NODES + ph, _NUM_NODES + ph] = self.r_ls
        pairs = [(_PCC[ph], _BT[ph], self.g_fe) for ph in range(3)]
        pairs += [(_P, _N, self.g_rl), (_P, _N, self.g_cdc)]
        for j, k, g in pairs:
            a[j, j] += g
            a[k, k] += g
            a[j, k] -= g
            a[k, j] -= g
        return a

    def _factored(self, state: np.ndarray, step: int):
        key = int(np.dot(state, 1 << np.arange(6)))
        cached = self._lu_cache.get(key)
        if cached is not None:
            return cached
        a = self._base_matrix.copy()
        g_d = np.where(state, self.g_on, self.g_off)
        for ph in range(3):
            for other, g in ((_P, g_d[ph]), (_N, g_d[3 + ph])):
                a[_BT[ph], _BT[ph]] += g
                a[other, other] += g
                a[_BT[ph], other] -= g
                a[other, _BT[ph]] -= g
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", LinAlgWarning)
                lu = lu_factor(a, check_finite=False)
        except np.linalg.LinAlgError:
            raise SolverError(f"singular system matrix at step {step}") from None
        if np.abs(np.diag(lu[0])).min() < 1e-250:
            raise SolverError(f"singular system matrix at step {step}")
        self._lu_cache[key] = lu
        return lu

    def run(self) -> WaveformSet:
        n = self.n_samples
        n_st, n_hp = self.n_st, self.n_hp
        dt = self.dt

        channels = np.zeros((n, len(CHANNEL_IDS)))
        channels[:, 0:3] = self.esrc

        # Aux layout: ST branch currents and capacitor voltages, HP branch
        # current / inductor current / capacitor voltage / damping voltage,
        # each (branch, phase) flattened, then the bridge terminal voltages.
        aux_groups = [
            ("st_i", 3 * n_st), ("st_vc", 3 * n_st),
            ("hp_i", 3 * n_hp), ("hp_il", 3 * n_hp),
            ("hp_vc", 3 * n_hp), ("hp_vrl", 3 * n_hp),
            ("v_bt", 3),
        ]
        aux = np.zeros((n, sum(width for _, width in aux_groups)))
        aux_slices: dict[str, slice] = {}
        pos = 0
        for name, width in aux_groups:
            aux_slices[name] = slice(pos, pos + width)
            pos += width

        # Histories (all-zero initial conditions).
        i_src = np.zeros(3)
        v_ls = np.zeros(3)
        i_fe = np.zeros(3)
        v_fe = np.zeros(3)
        st_i = np.zeros((n_st, 3))
        st_vl = np.zeros((n_st, 3))
        st_vc = np.zeros((n_st, 3))
        hp_i = np.zeros((n_hp, 3))
        hp_il = np.zeros((n_hp, 3))
        hp_vc = np.zeros((n_hp, 3))
        hp_vrl = np.zeros((n_hp, 3))
        i_cdc = 0.0
        v_cdc = 0.0

        st_rleq = self.st_rleq[:, None]
        st_rceq = self.st_rceq[:, None]
        st_g = self.st_g[:, None]
        hp_rceq = self.hp_rceq[:, None]
        hp_glp = self.hp_glp[:, None]
        hp_rsec = self.hp_rsec[:, None]
        hp_g = self.hp_g[:, None]

        state = np.zeros(6, dtype=bool)
        flagged: list[int] = []
        b = np.zeros(_NUM_UNKNOWNS)

        for k in range(1, n):
            st_el = -st_rleq * st_i - st_vl
            st_e = st_el + st_vc + st_rceq * st_i
            hp_hl = hp_il + hp_glp * hp_vrl
            hp_e = hp_vc + hp_rceq * hp_i - hp_rsec * hp_hl
            h_fe = i_fe + self.g_fe * v_fe
            h_c = -self.g_cdc * v_cdc - i_cdc
            e_hist = -self.r_ls * i_src - v_ls

            b[0:3] = self.st_g @ st_e + self.hp_g @ hp_e - h_fe
            b[3:6] = h_fe
            b[_P] = -h_c
            b[_N] = h_c
            b[8:11] = self.esrc[k] - e_hist

            converged = False
            for it in range(self.max_iter):
                x = lu_solve(self._factored(state, k), b, check_finite=False)
                vd = np.empty(6)
                vd[0:3] = x[3:6] - x[_P]
                vd[3:6] = x[_N] - x[3:6]
                new_state = (~state & (vd > 0.0)) | (state & (vd >= 0.0))
                if np.array_equal(new_state, state):
                    converged = True
                    break
                if it < self.max_iter - 1:
                    state = new_state
            if not converged:
                flagged.append(k)

            vp = x[0:3]
            v_bt = x[3:6]
            i_src = x[8:11].copy()
            v_ls = self.r_ls * i_src + e_hist

            v_fe = vp - v_bt
            i_fe = self.g_fe * v_fe + h_fe

            st_inew = st_g * (vp[None, :] - st_e)
            st_vl = st_rleq * st_inew + st_el
            st_vc = st_vc + st_rceq * (st_inew + st_i)
            st_i = st_inew

            hp_inew = hp_g * (vp[None, :] - hp_e)
            hp_vc = hp_vc + hp_rceq * (hp_inew + hp_i)
            hp_vrl = (hp_inew - hp_hl) * hp_rsec
            hp_il = hp_glp * hp_vrl + hp_hl
            hp_i = hp_inew

            v_cdc = x[_P] - x[_N]
            i_cdc = self.g_cdc * v_cdc + h_c

            g_upper = np.where(state[0:3], self.g_on, self.g_off)
            i_dc = float(np.dot(g_upper, v_bt - x[_P]))
            i_filter = st_inew.sum(axis=0) + hp_inew.sum(axis=0)

            row = channels[k]
            row[3:6] = vp
            row[6:9] = i_src
            row[9:12] = i_fe
            row[12:15] = i_filter
            row[15] = v_cdc
            row[16] = i_dc

            arow = aux[k]
            arow[aux_slices["st_i"]] = st_inew.ravel()
            arow[aux_slices["st_vc"]] = st_vc.ravel()
            arow[aux_slices["hp_i"]] = hp_inew.ravel()
            arow[aux_slices["hp_il"]] = hp_il.ravel()
            arow[aux_slices["hp_vc"]] = hp_vc.ravel()
            arow[aux_slices["hp_vrl"]] = hp_vrl.ravel()
            arow[aux_slices["v_bt"]] = v_bt

        channel_map = {name: channels[:, i] for i, name in enumerate(CHANNEL_IDS)}
        aux_map = {name: aux[:, sl] for name, sl in aux_slices.items()}
        return WaveformSet(
            sample_rate_hz=1.0 / dt,
            channels=channel_map,
            flagged_steps=tuple(flagged),
            aux=aux_map,
        )


def last_cycles_window(
    n_samples: int, sample_rate_hz: float, fundamental_hz: float, n_cycles: int
) -> range:
    """Sample index range covering the last ``n_cycles`` whole fundamental
    periods of an ``n_samples``-long record.

    The sample grid must contain an integer number of samples per period
    and the record must span at least ``n_cycles + 2`` periods so the
    window excludes the start-up transient.
    """
    if n_cycles < 1:
        raise WindowError(f"n_cycles must be >= 1, got {n_cycles!r}")
    spp_f = sample_rate_hz / fundamental_hz
    spp = round(spp_f)
    if spp < 2 or abs(spp_f - spp) > 1e-6 * spp:
        raise SampleGridError(
            f"{spp_f!r} samples per fundamental period is not an integer; "
            "pick dt = T1/k for an integer k"
        )
    if n_samples < (n_cycles + 2) * spp:
        raise WindowError(
            f"waveform spans {n_samples / spp:g} periods; need at least "
            f"{n_cycles + 2} to window the last {n_cycles}"
        )
    return range(n_samples - n_cycles * spp, n_samples)


def steady_state_window(w: WaveformSet, basis: SystemBasis, n_cycles: int) -> range:
    """Last ``n_cycles`` whole fundamental periods of the waveform set."""
    return last_cycles_window(
        w.n_samples, w.sample_rate_hz, basis.fundamental_hz, n_cycles
    )


@dataclass(frozen=True)
class EnergyAudit:
    """Energy bookkeeping over a window: source input vs dissipation plus
    stored-energy change.

    ``dissipated_j`` is the sum of the load, filter-resistor, and bridge
    (diode) terms, which are also reported separately.
    """

    source_energy_j: float
    dissipated_j: float
    dissipated_load_j: float
    dissipated_filter_j: float
    dissipated_bridge_j: float
    stored_delta_j: float
    imbalance_j: float
    relative_imbalance: float


def energy_audit(w: WaveformSet, scenario: Scenario, window: range) -> EnergyAudit:
    """Trapezoidal energy balance of the run over ``window``.

    Source energy is matched against resistive dissipation (load, filter
    resistors, diode conduction/blocking) and the net change of every
    inductor and capacitor energy.  The relative imbalance is the defect
    normalized by the largest term.
    """
    if window.start < 0 or window.stop > w.n_samples or len(window) < 2:
        raise WindowError(f"window {window!r} does not fit the waveform")
    sl = slice(window.start, window.stop)
    dt = w.dt_s
    ch = w.channels
    basis, load = scenario.basis, scenario.load

    v_src = np.stack([ch[f"v_src_{p}"][sl] for p in "abc"])
    i_src = np.stack([ch[f"i_src_{p}"][sl] for p in "abc"])
    i_bridge = np.stack([ch[f"i_bridge_{p}"][sl] for p in "abc"])
    v_dc = ch["v_dc"][sl]
    i_dc = ch["i_dc"][sl]
    v_bt = w.aux["v_bt"][sl].T

    e_source = float(trapezoid(np.sum(v_src * i_src, axis=0), dx=dt))

    p_load = v_dc**2 / load.load_resistance_ohm
    p_bridge = np.sum(v_bt * i_bridge, axis=0) - v_dc * i_dc

    st = scenario.bank.single_tuned if scenario.bank else ()
    hp = scenario.bank.high_pass if scenario.bank else ()
    n_win = len(v_dc)
    st_i = w.aux["st_i"][sl].reshape(n_win, len(st), 3)
    st_vc = w.aux["st_vc"][sl].reshape(n_win, len(st), 3)
    hp_il = w.aux["hp_il"][sl].reshape(n_win, len(hp), 3)
    hp_vc = w.aux["hp_vc"][sl].reshape(n_win, len(hp), 3)
    hp_vrl = w.aux["hp_vrl"][sl].reshape(n_win, len(hp), 3)
    p_filter = np.zeros(n_win)
    for j, branch in enumerate(st):
        p_filter = p_filter + branch.resistance_ohm * np.sum(st_i[:, j, :] ** 2, axis=1)
    for j, branch in enumerate(hp):
        p_filter = p_filter + np.sum(hp_vrl[:, j, :] ** 2, axis=1) / branch.resistance_ohm
    e_load = float(trapezoid(p_load, dx=dt))
    e_bridge = float(trapezoid(p_bridge, dx=dt))
    e_filter = float(trapezoid(p_filter, dx=dt))
    e_diss = e_load + e_bridge + e_filter

    def stored(idx: int) -> float:
        e = 0.5 * basis.source_inductance_h * float(np.sum(i_src[:, idx] ** 2))
        e += 0.5 * load.front_end_inductance_h * float(np.sum(i_bridge[:, idx] ** 2))
        e += 0.5 * load.load_capacitance_f * v_dc[idx] ** 2
        for j, branch in enumerate(st):
            e += 0.5 * branch.inductance_h * float(np.sum(st_i[idx, j, :] ** 2))
            e += 0.5 * branch.capacitance_f * float(np.sum(st_vc[idx, j, :] ** 2))
        for j, branch in enumerate(hp):
            e += 0.5 * branch.inductance_h * float(np.sum(hp_il[idx, j, :] ** 2))
            e += 0.5 * branch.capacitance_f * float(np.sum(hp_vc[idx, j, :] ** 2))
        return e

    stored_delta = stored(-1) - stored(0)
    imbalance = e_source - e_diss - stored_delta
    scale = max(abs(e_source), abs(e_diss), abs(stored_delta), 1e-30)
    return EnergyAudit(
        source_energy_j=e_source,
        dissipated_j=e_diss,
        dissipated_load_j=e_load,
        dissipated_filter_j=e_filter,
        dissipated_bridge_j=e_bridge,
        stored_delta_j=stored_delta,
        imbalance_j=imbalance,
        relative_imbalance=abs(imbalance) / scale,
    )
