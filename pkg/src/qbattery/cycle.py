"""Charging cycle, time-maximized ergotropy and repeated charging.

One cycle: attach a fresh charger, evolve jointly for time t, trace the charger
out. By default the battery state handed back is expressed in the frame
co-rotating with the free battery Hamiltonian (``frame="rotating"``); this
multiplies coherences by exp(i (E_j - E_k) t) and changes neither populations
nor any ergotropy. It matters only when a later cycle interferes with
coherences left by an earlier one (multi-mode batteries with a superposed
charger). ``frame="lab"`` keeps the plain Schrodinger-picture state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import ergo, qla
from .model import BatteryChargerModel
from .oracle import rabi_frequency
from .search import golden_section, parabolic_polish

log = logging.getLogger(__name__)

TAU_GRID = 2001
TAU_TOL = 1e-10
STALL_GAIN = 1e-9
STALL_CYCLES = 3
FULL_CHARGE_RTOL = 1e-6
ZERO_ERGO = 1e-12


@dataclass(frozen=True)
class CycleRecord:
    m: int
    tau: float
    e_max: float
    populations: np.ndarray = field(repr=False)
    per_mode_ergotropy: tuple[float, ...] = ()
    daemonic: ergo.DaemonicReport | None = None
    state: np.ndarray | None = field(default=None, repr=False)


@dataclass
class ChargeTrajectory:
    records: list[CycleRecord]
    terminated: str  # full_charge | max_cycles | stalled
    gapless_cycle: int | None = None

    @property
    def e_max(self) -> np.ndarray:
        return np.array([r.e_max for r in self.records])

    @property
    def taus(self) -> np.ndarray:
        return np.array([r.tau for r in self.records])


def _frame_phases(model: BatteryChargerModel) -> np.ndarray:
    e = np.diag(model.battery_hamiltonian).real
    return e[:, None] - e[None, :]


def joint_state(model: BatteryChargerModel, rho_b, rho_a, t: float, frame: str = "rotating") -> np.ndarray:
    """Battery-charger state after evolving rho_a (x) rho_b for time t."""
    rho = qla.kron(rho_a, rho_b)
    if rho.shape[0] != model.joint_dim:
        raise ValueError("initial states do not match the model dimensions")
    out = qla.evolve(model.h_total, t, rho, model.spectrum)
    if frame == "rotating":
        e0 = np.diag(model.h_a + model.h_b).real
        out = out * np.exp(1j * t * (e0[:, None] - e0[None, :]))
    elif frame != "lab":
        raise ValueError(f"unknown frame {frame!r}")
    return out


def battery_states(model: BatteryChargerModel, rho_b, rho_a, ts, frame: str = "rotating") -> np.ndarray:
    """Reduced battery states for every t in ``ts``; shape (len(ts), d_b, d_b)."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    rho = qla.kron(rho_a, rho_b)
    if rho.shape[0] != model.joint_dim:
        raise ValueError("initial states do not match the model dimensions")
    da, db = model.charger_dim, model.battery_dim
    out = np.empty((len(ts), db, db), dtype=complex)
    chunk = max(1, 4_000_000 // (model.joint_dim ** 2))
    for s in range(0, len(ts), chunk):
        joint = qla.evolve_many(model.spectrum, ts[s:s + chunk], rho)
        out[s:s + chunk] = np.einsum("tixiy->txy", joint.reshape(-1, da, db, da, db))
    if frame == "rotating":
        out *= np.exp(1j * ts[:, None, None] * _frame_phases(model)[None])
    elif frame != "lab":
        raise ValueError(f"unknown frame {frame!r}")
    return qla.hermitize(out)


def charge_once(model: BatteryChargerModel, rho_b_in, rho_a_in, t: float, frame: str = "rotating") -> np.ndarray:
    """Tr_a[U(t) (rho_a (x) rho_b) U(t)^dagger] with a fresh charger."""
    rho_b = battery_states(model, rho_b_in, rho_a_in, [t], frame)[0]
    return qla.clamp_psd(rho_b)


def ergotropy_curve(model: BatteryChargerModel, rho_b_in, rho_a_in, ts) -> np.ndarray:
    states = battery_states(model, rho_b_in, rho_a_in, ts, frame="lab")
    return ergo.ergotropy_batch(states, np.diag(model.battery_hamiltonian).real)


def default_window(model: BatteryChargerModel) -> tuple[float, float]:
    """First period of the one-excitation Rabi oscillation."""
    if model.n_modes == 1:
        return 0.0, float(2 * np.pi / rabi_frequency(1, model.g, model.delta))
    return 0.0, float(2 * np.pi / model.g)


def find_tau(model: BatteryChargerModel, rho_b_in, rho_a_in, window=None, *, grid: int = TAU_GRID,
             tol: float = TAU_TOL) -> tuple[float | None, float]:
    """Earliest time in ``window`` maximizing the battery ergotropy.

    Uniform grid scan, then golden-section refinement of every grid-local
    maximum that could beat the best grid value, then a parabolic polish.
    Returns ``(None, 0.0)`` when the ergotropy vanishes on the whole window.
    """
    t_lo, t_hi = window if window is not None else default_window(model)
    if not t_hi > t_lo:
        raise ValueError("empty time window")
    ts = np.linspace(t_lo, t_hi, grid)
    e = ergotropy_curve(model, rho_b_in, rho_a_in, ts)
    scale = max(1.0, float(np.max(np.abs(e))))
    if np.max(e) <= ZERO_ERGO * scale:
        return None, 0.0

    def f(t):
        return float(ergotropy_curve(model, rho_b_in, rho_a_in, [t])[0])

    padded = np.concatenate([[-np.inf], e, [-np.inf]])
    peaks = np.flatnonzero((padded[1:-1] >= padded[:-2]) & (padded[1:-1] >= padded[2:]) & (e > ZERO_ERGO * scale))
    # a grid value can undershoot its true peak by about one second difference
    second = np.abs(np.diff(e, 2))
    slack = 2.0 * float(second.max()) if len(second) else 0.0
    candidates = peaks[e[peaks] >= e[peaks].max() - slack]
    h = ts[1] - ts[0]
    found = []
    for i in candidates:
        a, b = ts[max(i - 1, 0)], ts[min(i + 1, grid - 1)]
        t, v, _ = golden_section(f, a, b, tol=tol, maximize=True)
        if v < e[i]:
            t, v = ts[i], e[i]
        t, v, _ = parabolic_polish(f, t, v, min(1e-5, h / 4), t_lo, t_hi, maximize=True)
        found.append((t, v))
    best = max(v for _, v in found)
    tie = 1e-9 * max(1.0, abs(best))
    tau = min(t for t, v in found if v >= best - tie)
    e_tau = max(v for t, v in found if t == tau)
    return float(tau), float(e_tau)


def per_mode_ergotropies(rho_b, model: BatteryChargerModel) -> list[float]:
    """Ergotropy of each mode's reduced state against its own Hamiltonian."""
    if model.n_modes < 2:
        raise ValueError("per-mode ergotropies need a multi-mode model")
    out = []
    for i in range(model.n_modes):
        red = qla.partial_trace(rho_b, model.mode_dims, [i])
        out.append(ergo.ergotropy(red, model.mode_hamiltonian(i)))
    return out


def is_full_charge(e_max: float, model: BatteryChargerModel) -> bool:
    return e_max >= model.max_energy - FULL_CHARGE_RTOL * min(model.mode_freqs)


def repeat_cycles(model: BatteryChargerModel, rho_b_in, charger: np.ndarray | Callable[[int], np.ndarray],
                  max_cycles: int, with_daemonic: bool = False, *, window=None,
                  frame: str = "rotating", gapless_threshold: float = 1e-3,
                  opt_kwargs: dict | None = None, keep_states: bool = False) -> ChargeTrajectory:
    """Apply the charging cycle until full charge, ``max_cycles``, or a stall.

    Each cycle runs for its own ergotropy-maximizing time tau_m. ``charger`` is
    either a fixed density matrix (fresh copy every cycle) or a callable m -> state.
    """
    from . import measopt

    if max_cycles < 1:
        raise ValueError("max_cycles must be >= 1")
    supply = charger if callable(charger) else (lambda m: charger)
    rho_b = qla.as_matrix(rho_b_in)
    records: list[CycleRecord] = []
    flat = 0
    reason = "max_cycles"
    gapless_cycle = None
    for m in range(1, max_cycles + 1):
        rho_a = supply(m)
        tau, e_max = find_tau(model, rho_b, rho_a, window)
        if tau is None:
            tau, e_max = 0.0, 0.0
        report = None
        if with_daemonic and tau > 0:
            rho_ab = joint_state(model, rho_b, rho_a, tau, frame)
            report = measopt.daemonic_report(rho_ab, model, tau, gapless_threshold=gapless_threshold,
                                             **(opt_kwargs or {}))
            if gapless_cycle is None and report.gapless:
                gapless_cycle = m
        rho_b = charge_once(model, rho_b, rho_a, tau, frame)
        modes = tuple(per_mode_ergotropies(rho_b, model)) if model.n_modes > 1 else ()
        records.append(CycleRecord(m, tau, e_max, np.diag(rho_b).real.copy(), modes, report,
                                   rho_b if keep_states else None))
        log.debug("cycle %d: tau=%.6g e_max=%.12g", m, tau, e_max)
        if is_full_charge(e_max, model):
            reason = "full_charge"
            break
        gain = e_max - records[-2].e_max if len(records) > 1 else np.inf
        flat = flat + 1 if gain < STALL_GAIN else 0
        if flat >= STALL_CYCLES:
            reason = "stalled"
            break
    return ChargeTrajectory(records, reason, gapless_cycle)


def simultaneous_charging_check(trajectory: ChargeTrajectory, model: BatteryChargerModel) -> list[bool]:
    """Per cycle: collective and every per-mode ergotropy strictly positive at tau_m."""
    thr = 1e-9 * min(model.mode_freqs)
    return [r.e_max > thr and len(r.per_mode_ergotropy) > 0 and all(e > thr for e in r.per_mode_ergotropy)
            for r in trajectory.records]
