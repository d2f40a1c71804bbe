import numpy as np
import pytest
from hypothesis import given, strategies as st

from qbattery import cycle, ergo, oracle, qla
from qbattery.model import battery_init, build_multimode, build_single_mode, charger_init

EXCITED = charger_init("excited_level").rho


def offdiag_norm(rho):
    return float(np.linalg.norm(rho - np.diag(np.diag(rho))))


def test_charge_once_examples():
    m = build_single_mode(5, 1.0, g=1.0, delta=0.0)
    rho = battery_init("thermal", 5, beta=1.0).rho
    assert np.allclose(cycle.charge_once(m, rho, EXCITED, 0.0), rho)
    out = cycle.charge_once(m, battery_init("ground", 5).rho, EXCITED, np.pi / 2)
    assert np.allclose(out, np.diag(np.eye(5)[1]), atol=1e-12)


@given(st.floats(0, 8), st.sampled_from([0.0, 0.1]), st.integers(1, 4))
def test_cycles_stay_diagonal(t, delta, cycles):
    m = build_single_mode(6, 1.0, g=1.0, delta=delta)
    rho = battery_init("truncated", 6, populations=(0.43, 0.42, 0.15)).rho
    for _ in range(cycles):
        rho = cycle.charge_once(m, rho, EXCITED, t)
        assert qla.is_density(rho)
        assert offdiag_norm(rho) <= 1e-10


def test_frames_agree_on_populations_and_ergotropy():
    m = build_multimode([3, 3], [1.0, 1.2])
    rho_a = charger_init("superposition", 3, theta=1.0, phi=0.5).rho
    rho_b = battery_init("ground", 9).rho
    lab = cycle.charge_once(m, rho_b, rho_a, 0.9, frame="lab")
    rot = cycle.charge_once(m, rho_b, rho_a, 0.9)
    assert np.allclose(np.diag(lab), np.diag(rot))
    h = m.battery_hamiltonian
    assert ergo.ergotropy(lab, h) == pytest.approx(ergo.ergotropy(rot, h), abs=1e-12)
    with pytest.raises(ValueError):
        cycle.charge_once(m, rho_b, rho_a, 0.9, frame="other")


def test_find_tau_vacuum():
    m = build_single_mode(11, 1.0, g=1.0, delta=0.0)
    ground = battery_init("ground", 11).rho
    tau, e = cycle.find_tau(m, ground, EXCITED)
    assert tau == pytest.approx(np.pi / 2, abs=1e-9) and e == pytest.approx(1.0, abs=1e-12)
    d = 0.1
    m = build_single_mode(11, 1.0, g=1.0, delta=d)
    tau, e = cycle.find_tau(m, ground, EXCITED)
    assert tau == pytest.approx(np.pi / (2 * np.sqrt(1 + d * d / 4)), abs=1e-9)
    assert e == pytest.approx(oracle.emax_vacuum(1.0, d, 1.0), abs=1e-12)


def test_find_tau_three_level_mixture():
    m = build_single_mode(11, 1.0, g=1.0, delta=0.0)
    rho_b = battery_init("truncated", 11, populations=(0.43, 0.42, 0.15)).rho
    tau, _ = cycle.find_tau(m, rho_b, EXCITED)
    assert abs(tau - 1.46 * np.pi) <= 0.01 * np.pi


def test_find_tau_zero_window():
    m = build_single_mode(4, 1.0, g=1.0)
    assert cycle.find_tau(m, battery_init("ground", 4).rho, EXCITED, window=(0.0, 0.5)) == (None, 0.0)
    with pytest.raises(ValueError):
        cycle.find_tau(m, battery_init("ground", 4).rho, EXCITED, window=(1.0, 1.0))


def test_find_tau_returns_earliest_maximum():
    # resonant vacuum peaks at pi/2 and 3pi/2 with the same value
    m = build_single_mode(3, 1.0, g=1.0)
    tau, _ = cycle.find_tau(m, battery_init("ground", 3).rho, EXCITED, window=(0.0, 2 * np.pi))
    assert tau == pytest.approx(np.pi / 2, abs=1e-9)


def test_two_level_mixture_fills_in_dim_minus_one_cycles():
    m = build_single_mode(11, 1.0, g=1.0, delta=0.0)
    rho_b = battery_init("truncated", 11, populations=(0.7, 0.3)).rho
    traj = cycle.repeat_cycles(m, rho_b, EXCITED, max_cycles=30, keep_states=True)
    assert traj.terminated == "full_charge" and len(traj.records) == 10
    assert np.allclose(traj.records[-1].state, np.diag(np.eye(11)[10]), atol=1e-8)
    assert np.all(traj.e_max <= m.max_energy + 1e-12)
    for r in traj.records:
        assert abs(r.populations.sum() - 1) <= 1e-10 and np.all(r.populations >= -1e-12)


def test_ground_ladder_monotone():
    m = build_single_mode(6, 1.0, g=1.0, delta=0.0)
    traj = cycle.repeat_cycles(m, battery_init("ground", 6).rho, EXCITED, max_cycles=10)
    assert np.all(np.diff(traj.e_max) > 0)
    assert np.allclose(traj.taus, [oracle.tau_ladder(k, 1.0) for k in range(1, 6)], atol=1e-8)


def test_stall_detection():
    m = build_single_mode(4, 1.0, g=1.0)
    traj = cycle.repeat_cycles(m, battery_init("ground", 4).rho, charger_init("excited_level", level=0).rho,
                               max_cycles=20)
    assert traj.terminated == "stalled" and len(traj.records) == 4
    traj = cycle.repeat_cycles(m, battery_init("ground", 4).rho, EXCITED, max_cycles=1)
    assert traj.terminated == "max_cycles"
    with pytest.raises(ValueError):
        cycle.repeat_cycles(m, battery_init("ground", 4).rho, EXCITED, max_cycles=0)


def test_daemonic_records_and_gapless_cycle():
    m = build_single_mode(6, 1.0, g=1.0, delta=0.0)
    traj = cycle.repeat_cycles(m, battery_init("truncated", 6, populations=(0.8, 0.2)).rho, EXCITED, max_cycles=2,
                               with_daemonic=True, opt_kwargs=dict(alpha_points=19, gamma_points=6))
    assert all(r.daemonic is not None for r in traj.records)
    assert traj.gapless_cycle == 1


def test_per_mode_ergotropies():
    m = build_multimode([2, 2], [1.0, 1.2])
    assert cycle.per_mode_ergotropies(battery_init("ground", 4).rho, m) == [0.0, 0.0]
    with pytest.raises(ValueError):
        cycle.per_mode_ergotropies(np.eye(3) / 3, build_single_mode(3))


@given(st.floats(0, np.pi), st.floats(0, 2 * np.pi))
def test_first_cycle_never_charges_both_modes(theta, t):
    m = build_multimode([2, 2], [1.0, 1.2])
    rho_a = charger_init("superposition", 3, theta=theta).rho
    rho_b = cycle.charge_once(m, battery_init("ground", 4).rho, rho_a, t)
    assert min(cycle.per_mode_ergotropies(rho_b, m)) <= 1e-12


def test_simultaneous_check():
    from qbattery.verify import simultaneous_at_cycle

    assert simultaneous_at_cycle(np.pi / 2) == [False, True]
    assert simultaneous_at_cycle(0.0) == [False, False]
