"""Regression checks that pin the simulation to the closed-form and reported results.

Each ``check_*`` function runs one criterion and returns a :class:`Check`.
``run_all`` is what ``qbattery verify`` calls; the acceptance tests call the
functions one by one.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import cycle, ergo, measopt, oracle, qla
from .model import battery_init, build_multimode, build_single_mode, charger_init, truncated_populations


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        name, passed, detail = fn(*args, **kwargs)
        return Check(name, bool(passed), detail, time.perf_counter() - t0)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _qubit_charger():
    return charger_init("excited_level", 2).rho


def _qubit_grid(alpha_points=37, gamma_points=24):
    a, g = np.meshgrid(np.linspace(0, np.pi, alpha_points),
                       np.linspace(0, 2 * np.pi, gamma_points, endpoint=False), indexing="ij")
    return measopt.qubit_vectors(a.ravel(), g.ravel()).reshape(alpha_points, gamma_points, 2, 2)


def report_at_tau(model, rho_b, rho_a, **opt_kwargs):
    tau, e_max = cycle.find_tau(model, rho_b, rho_a)
    if tau is None:
        raise ValueError("no ergotropy in the search window")
    rho_ab = cycle.joint_state(model, rho_b, rho_a, tau)
    return measopt.daemonic_report(rho_ab, model, tau, **opt_kwargs)


@_timed
def check_vacuum_closed_form(points: int = 401, limit: float = 1e-9, budget_s: float = 5.0):
    """Ground battery, resonance: ergotropy and daemonic ergotropy on a 37x24 basis grid vs closed form."""
    t0 = time.perf_counter()
    m = build_single_mode(11, 1.0, g=1.0, delta=0.0)
    rho_b, rho_a = battery_init("ground", 11).rho, _qubit_charger()
    ts = np.linspace(0.0, 2 * np.pi, points)
    e = cycle.ergotropy_curve(m, rho_b, rho_a, ts)
    err_e = float(np.max(np.abs(e - oracle.ergo_vacuum(1.0, 0.0, 1.0, ts))))
    bases = _qubit_grid().reshape(-1, 2, 2)
    states = cycle.battery_states(m, rho_b, rho_a, ts)  # warm the same code path once
    del states
    err_d = 0.0
    for t in ts:
        ev = ergo.DaemonicEvaluator(cycle.joint_state(m, rho_b, rho_a, t), m)
        err_d = max(err_d, float(np.max(np.abs(ev(bases) - oracle.daemonic_vacuum(1.0, 0.0, 1.0, t)))))
    dt = time.perf_counter() - t0
    ok = err_e <= limit and err_d <= limit and dt < budget_s
    return "1 vacuum closed form", ok, f"max|dE|={err_e:.2e} max|dEbar|={err_d:.2e} runtime={dt:.2f}s"


@_timed
def check_detuned_gap(deltas=(0.02, 0.05, 0.1), limit: float = 1e-6):
    """Optimized gap at tau equals omega delta^2 / 4 Omega_1^2; resonance closes gap and band."""
    parts, ok = [], True
    rho_a = _qubit_charger()
    for d in deltas:
        m = build_single_mode(11, 1.0, g=1.0, delta=d)
        rep = report_at_tau(m, battery_init("ground", 11).rho, rho_a)
        err = abs(rep.gap - oracle.gap_vacuum(1.0, d, 1.0))
        ok &= err <= limit
        parts.append(f"d={d}: L={rep.gap:.6e} err={err:.1e}")
    m = build_single_mode(11, 1.0, g=1.0, delta=0.0)
    rep = report_at_tau(m, battery_init("ground", 11).rho, rho_a)
    ok &= abs(rep.gap) <= 1e-9 and abs(rep.band) <= 1e-9
    parts.append(f"d=0: L={rep.gap:.1e} band={rep.band:.1e}")
    return "2 detuned gap and band collapse", ok, "; ".join(parts)


@_timed
def check_ladder(d_b: int = 11, budget_s: float = 10.0):
    """Resonant ground-state ladder: E_max(m) = m, tau_m = pi / (2 sqrt m), full at m = d_b - 1."""
    t0 = time.perf_counter()
    m = build_single_mode(d_b, 1.0, g=1.0, delta=0.0)
    traj = cycle.repeat_cycles(m, battery_init("ground", d_b).rho, _qubit_charger(), max_cycles=3 * d_b)
    dt = time.perf_counter() - t0
    ms = np.arange(1, len(traj.records) + 1)
    n = d_b - 1
    ok = len(traj.records) == n and traj.terminated == "full_charge"
    e_err = float(np.max(np.abs(traj.e_max - ms))) if len(ms) else np.inf
    t_err = float(np.max(np.abs(traj.taus - np.array([oracle.tau_ladder(k, 1.0) for k in ms]))))
    ok = ok and e_err <= 1e-9 and t_err <= 1e-8 and dt < budget_s
    return "3 ladder to full charge", ok, (f"cycles={len(ms)} ({traj.terminated}) max|E-m|={e_err:.1e} "
                                           f"max|tau-tau_m|={t_err:.1e} runtime={dt:.2f}s")


@_timed
def check_detuned_slowdown(d_b: int = 11, delta: float = 0.1):
    """Detuning costs cycles: full charge takes more than d_b - 1 rounds."""
    m = build_single_mode(d_b, 1.0, g=1.0, delta=delta)
    traj = cycle.repeat_cycles(m, battery_init("ground", d_b).rho, _qubit_charger(), max_cycles=200)
    n = len(traj.records)
    ok = traj.terminated == "full_charge" and n > d_b - 1
    return "4 detuned slowdown", ok, f"full charge after {n} cycles ({traj.terminated})"


def random_passive(rng, d_b: int) -> np.ndarray:
    r = np.sort(rng.dirichlet(np.ones(d_b)))[::-1]
    return r / r.sum()


@_timed
def check_recursion_vs_dense(cases: int = 50, seed: int = 7, limit: float = 1e-10):
    """Population recursion agrees with dense evolution on random passive inputs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    rho_a = _qubit_charger()
    models = {}
    for _ in range(cases):
        d_b = int(rng.integers(3, 12))
        delta = float(rng.choice([0.0, 0.1]))
        key = (d_b, delta)
        if key not in models:
            models[key] = build_single_mode(d_b, 1.0, g=1.0, delta=delta)
        m = models[key]
        t = float(rng.uniform(0.0, 2 * np.pi))
        n_cycles = int(rng.integers(1, 6))
        r = random_passive(rng, d_b)
        rho = np.diag(r).astype(complex)
        for _ in range(n_cycles):
            rho = cycle.charge_once(m, rho, rho_a, t)
            r = oracle.recursion_step(r, 1.0, delta, t)
        worst = max(worst, float(np.max(np.abs(np.diag(rho).real - r))))
    return "5 recursion vs dense", worst <= limit, f"{cases} cases, max population error {worst:.2e}"


def truncated_report(r0: float, r1: float | None, delta: float):
    pops = truncated_populations(r0, r1)
    m = build_single_mode(11, 1.0, g=1.0, delta=delta)
    rho_b = battery_init("truncated", 11, populations=pops).rho
    return report_at_tau(m, rho_b, _qubit_charger())


@_timed
def check_reported_values():
    """Reported spot values for two- and three-level truncated mixtures."""
    rows = []
    ok = True
    rep = truncated_report(0.9, None, 0.1)
    a = measopt.fold_alpha(rep.argmin_params[0])
    good = abs(rep.gap - 2e-3) <= 1e-3 and abs(a) <= 0.02 * np.pi
    ok &= good
    rows.append(f"trunc2 d=0.1: L={rep.gap:.3e} alpha={a / np.pi:.3f}pi {'ok' if good else 'off'}")
    rep = truncated_report(0.43, 0.42, 0.0)
    a = measopt.fold_alpha(rep.argmin_params[0])
    checks = (abs(rep.t - 1.46 * np.pi) <= 0.01 * np.pi, abs(rep.gap - 1.1e-2) <= 2e-3, abs(a - 0.12 * np.pi) <= 0.02 * np.pi)
    ok &= all(checks)
    rows.append(f"trunc3 d=0: tau={rep.t / np.pi:.4f}pi L={rep.gap:.3e} alpha={a / np.pi:.3f}pi "
                f"{'ok' if all(checks) else 'off ' + str([int(c) for c in checks])}")
    rep = truncated_report(0.43, 0.42, 0.1)
    a = measopt.fold_alpha(rep.argmin_params[0])
    checks = (abs(rep.gap - 1.4e-2) <= 2e-3, abs(a - 0.14 * np.pi) <= 0.02 * np.pi)
    ok &= all(checks)
    rows.append(f"trunc3 d=0.1: tau={rep.t / np.pi:.4f}pi L={rep.gap:.3e} alpha={a / np.pi:.3f}pi "
                f"{'ok' if all(checks) else 'off ' + str([int(c) for c in checks])}")
    return "6 reported spot values", ok, "; ".join(rows)


THERMAL_GAPLESS = (1.7, 2.0, 3.0, 5.0, 10.0)
THERMAL_GAPPED = (0.5, 1.0)


@_timed
def check_thermal_window(threshold: float = 1e-3):
    """Thermal inputs: gapless for beta >= 1.7, gapped at 0.5 and 1; E_max and Ebar_min fall toward 1."""
    m = build_single_mode(11, 1.0, g=1.0, delta=0.0)
    betas = sorted(THERMAL_GAPPED + THERMAL_GAPLESS)
    reps = {b: report_at_tau(m, battery_init("thermal", 11, beta=b).rho, _qubit_charger(),
                             gapless_threshold=threshold) for b in betas}
    ok = all(reps[b].gapless for b in THERMAL_GAPLESS) and all(not reps[b].gapless for b in THERMAL_GAPPED)
    e_max = np.array([reps[b].ergotropy for b in betas])
    e_min = np.array([reps[b].daemonic_min for b in betas])
    mono = bool(np.all(np.diff(e_max) <= 1e-12) and np.all(np.diff(e_min) <= 1e-12)
                and np.all(e_max >= 1 - 1e-9) and np.all(e_min >= 1 - 1e-9))
    near = abs(reps[2.0].ergotropy - 1.0) <= 0.02
    ok = ok and mono and near
    gaps = " ".join(f"{b:g}:{reps[b].gap:.1e}" for b in betas)
    return "7 thermal gapless window", ok, f"L(beta) {gaps}; monotone={mono} |Emax(2)-1|={abs(reps[2.0].ergotropy - 1):.1e}"


def double_mode_model(dims=(3, 3), omegas=(1.0, 1.2), g: float = 1.0):
    return build_multimode(list(dims), list(omegas), g=g)


def _mode_ergotropies_batch(states, model) -> np.ndarray:
    out = []
    for i in range(model.n_modes):
        red = qla.partial_trace(states, model.mode_dims, [i])
        out.append(ergo.ergotropy_batch(red, np.diag(model.mode_hamiltonian(i)).real))
    return np.stack(out, axis=-1)


def simultaneous_at_cycle(theta: float, phi: float = 0.0, cycles: int = 2, model=None) -> list[bool]:
    model = model if model is not None else double_mode_model()
    rho_b = battery_init("ground", model.battery_dim).rho
    rho_a = charger_init("superposition", model.charger_dim, theta=theta, phi=phi).rho
    traj = cycle.repeat_cycles(model, rho_b, rho_a, max_cycles=cycles)
    return cycle.simultaneous_charging_check(traj, model)


@_timed
def check_double_mode(theta_points: int = 37):
    """Two-mode battery: no simultaneous charging after one cycle, theta window at cycle two, gapless at tau."""
    model = double_mode_model()
    rho_b = battery_init("ground", model.battery_dim).rho
    ts = np.linspace(0.0, 2 * np.pi, 401)
    worst = 0.0
    for theta in (0.3, np.pi / 2, 2.5):
        rho_a = charger_init("superposition", 3, theta=theta).rho
        per_mode = _mode_ergotropies_batch(cycle.battery_states(model, rho_b, rho_a, ts), model)
        worst = max(worst, float(np.max(per_mode.min(axis=1))))
    ok_a = worst <= 1e-12

    thetas = np.linspace(0.0, np.pi, theta_points)
    step = thetas[1] - thetas[0]
    lo, hi = oracle.simultaneous_theta_window()
    bad = []
    first = []
    for th in thetas:
        flags = simultaneous_at_cycle(float(th), model=model)
        first.append(flags[0])
        expect = lo <= th <= hi
        near_edge = min(abs(th - lo), abs(th - hi)) <= step
        if len(flags) > 1 and flags[1] != expect and not near_edge:
            bad.append(round(float(th), 4))
    ok_b = not bad and not any(first)

    rho_a = charger_init("superposition", 3, theta=np.pi / 3).rho
    rep = report_at_tau(model, rho_b, rho_a)
    ok_c = rep.gap <= 1e-6
    detail = (f"(a) max min-mode ergotropy={worst:.1e}; (b) mismatches={bad} cycle1-any={any(first)}; "
              f"(c) L={rep.gap:.1e} at tau={rep.t:.6f}")
    return "8 double-mode charging", ok_a and ok_b and ok_c, detail


def _structural_states():
    """(model, joint state) pairs spanning single-mode inputs and a two-mode battery."""
    out = []
    rho_a = _qubit_charger()
    for delta in (0.0, 0.1):
        m = build_single_mode(6, 1.0, g=1.0, delta=delta)
        inits = [battery_init("ground", 6).rho,
                 battery_init("truncated", 6, populations=(0.8, 0.2)).rho,
                 battery_init("truncated", 6, populations=(0.43, 0.42, 0.15)).rho,
                 battery_init("thermal", 6, beta=1.0).rho]
        for rho_b in inits:
            for t in (0.3, 1.1, 2.0, 4.4):
                out.append((m, cycle.joint_state(m, rho_b, rho_a, t)))
    mm = double_mode_model()
    rho_a = charger_init("superposition", 3, theta=1.0, phi=0.4).rho
    for t in (0.5, 1.3):
        out.append((mm, cycle.joint_state(mm, battery_init("ground", 9).rho, rho_a, t)))
    return out


@_timed
def check_structure(seed: int = 3):
    """States valid, excitations conserved, convexity, ensemble mixtures and gamma independence."""
    rng = np.random.default_rng(seed)
    fails = []
    worst = {"conserve": 0.0, "convex": 0.0, "mixture": 0.0, "gamma": 0.0}
    for d_b, delta in ((6, 0.0), (6, 0.1)):
        m = build_single_mode(d_b, 1.0, g=1.0, delta=delta)
        worst["conserve"] = max(worst["conserve"], float(np.max(np.abs(
            m.h_total @ m.excitation_number - m.excitation_number @ m.h_total))))
    mm = double_mode_model()
    worst["conserve"] = max(worst["conserve"], float(np.max(np.abs(
        mm.h_total @ mm.excitation_number - mm.excitation_number @ mm.h_total))))
    grid = _qubit_grid(13, 8)
    for model, rho_ab in _structural_states():
        rho_b = ergo.reduced_battery(rho_ab, model)
        if not (qla.is_density(rho_ab) and qla.is_density(rho_b)):
            fails.append("invalid state")
        e = ergo.ergotropy(rho_b, model.battery_hamiltonian)
        d = model.charger_dim
        if d == 2:
            samples = [ergo.MeasurementBasis(v) for v in grid.reshape(-1, 2, 2)[::7]]
        else:
            samples = [measopt.qudit_basis(p, d) for p in rng.uniform(0, 2 * np.pi, size=(12, 6))]
        for b in samples:
            ens = ergo.measure_charger(rho_ab, model, b)
            worst["mixture"] = max(worst["mixture"], float(np.max(np.abs(ens.mixture() - rho_b))),
                                   abs(sum(ens.probs) - 1.0))
            for s in ens.states:
                if s is not None and not qla.is_density(s):
                    fails.append("invalid post-measurement state")
            worst["convex"] = max(worst["convex"], e - ergo.daemonic_ergotropy(rho_ab, model, b))
        if d == 2:
            vals = ergo.DaemonicEvaluator(rho_ab, model)(grid)
            worst["gamma"] = max(worst["gamma"], float(np.max(vals.max(axis=1) - vals.min(axis=1))))
    ok = (not fails and worst["conserve"] <= 1e-12 and worst["convex"] <= 1e-9
          and worst["mixture"] <= 1e-9 and worst["gamma"] <= 1e-9)
    detail = " ".join(f"{k}={v:.1e}" for k, v in worst.items()) + (f" failures={sorted(set(fails))}" if fails else "")
    return "9 structural properties", ok, detail


ALL_CHECKS = (check_vacuum_closed_form, check_detuned_gap, check_ladder, check_detuned_slowdown,
              check_recursion_vs_dense, check_reported_values, check_thermal_window, check_double_mode,
              check_structure)


def run_all(echo=print) -> list[Check]:
    out = []
    for fn in ALL_CHECKS:
        c = fn()
        if echo is not None:
            echo(c.line())
        out.append(c)
    return out
