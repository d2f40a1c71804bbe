import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qbattery import qla
from qbattery.model import (battery_init, build_multimode, build_single_mode, charger_init, is_passive,
                            lowering, truncated_populations)


def commutator_norm(a, b):
    return float(np.max(np.abs(a @ b - b @ a)))


def test_lowering_operator():
    a = lowering(4)
    assert np.allclose(a @ qla.ket(4, 2), np.sqrt(2) * qla.ket(4, 1))
    assert np.allclose(a.conj().T @ a, np.diag([0, 1, 2, 3]))


def test_single_mode_block():
    m = build_single_mode(2, omega=1.0, nu=1.0, g=1.0)
    # charger (x) battery: |e1,0> is index 2, |e0,1> is index 1
    block = m.h_total[np.ix_([2, 1], [2, 1])]
    assert np.allclose(block, [[1, 1], [1, 1]])
    assert m.delta == 0
    assert m.dims == (2, 2) and m.joint_dim == 4


def test_single_mode_delta_keyword():
    m = build_single_mode(11, 1.0, g=1.0, delta=0.1)
    assert np.isclose(m.charger_levels[1], 0.9) and np.isclose(m.delta, 0.1)
    assert m.battery_dim == 11 and m.max_energy == 10


@pytest.mark.parametrize("kwargs", [dict(d_b=1), dict(d_b=3, omega=0.0), dict(d_b=3, g=0.0), dict(d_b=3, g=-1.0)])
def test_single_mode_rejects_bad_parameters(kwargs):
    with pytest.raises(ValueError):
        build_single_mode(**kwargs)


def test_large_detuning_warns():
    with pytest.warns(UserWarning):
        build_single_mode(3, 1.0, g=1.0, delta=0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        build_single_mode(3, 1.0, g=1.0, delta=0.1)


def test_multimode_coupling_element():
    m = build_multimode([2, 2], [1.0, 1.2], g=0.7)
    # index of |e_a, n1, n2> = a*4 + n1*2 + n2
    assert np.isclose(m.h_ab[1 * 4 + 0, 0 * 4 + 2], 0.7)  # <e1,00|H_ab|e0,10>
    assert np.isclose(m.h_ab[2 * 4 + 0, 0 * 4 + 1], 0.7)  # <e2,00|H_ab|e0,01>
    assert np.isclose(m.h_ab[1 * 4 + 0, 0 * 4 + 1], 0.0)  # e1 does not talk to mode 2
    assert not np.any(m.h_ab[:, 0])  # |e0,00> is dark
    assert np.allclose(m.detunings, [0, 0])


def test_multimode_validation():
    with pytest.raises(ValueError, match="distinct|degenerate"):
        build_multimode([2, 2], [1.0, 1.0])
    with pytest.raises(ValueError):
        build_multimode([2, 2, 2], [1.0, 1.2], charger_levels=[0, 1, 1.2])
    with pytest.raises(ValueError):
        build_multimode([2, 2], [1.0, 1.2], charger_levels=[0.1, 1, 1.2])
    with pytest.raises(ValueError):
        build_multimode([2, 2], [1.0, 1.2], charger_levels=[0, 1.2, 1.0])


@given(st.integers(2, 6), st.floats(0.5, 2), st.floats(-0.1, 0.1), st.floats(0.1, 2))
def test_excitation_conservation_single(d_b, omega, delta, g):
    m = build_single_mode(d_b, omega, g=g, delta=delta * omega)
    assert commutator_norm(m.h_total, m.excitation_number) <= 1e-12
    assert qla.is_hermitian(m.h_total, 1e-14)


@given(st.integers(2, 3), st.integers(2, 3), st.floats(0.1, 2))
def test_excitation_conservation_multi(d1, d2, g):
    m = build_multimode([d1, d2], [1.0, 1.3], g=g)
    assert commutator_norm(m.h_total, m.excitation_number) <= 1e-12


def test_zero_coupling_keeps_battery_state():
    # g must be positive for a model; build one and drop the coupling by hand
    m = build_single_mode(4, 1.0, g=1.0)
    h0 = m.h_a + m.h_b
    rho = qla.kron(charger_init("excited_level").rho, battery_init("thermal", 4, beta=0.7).rho)
    for t in (0.3, 2.0, 7.1):
        out = qla.evolve(h0, t, rho)
        assert np.allclose(qla.partial_trace(out, m.dims, [1]), qla.partial_trace(rho, m.dims, [1]))
        assert np.allclose(out, rho)  # product stays product


def test_battery_init_kinds():
    assert np.allclose(battery_init("ground", 4).rho, np.diag([1, 0, 0, 0]))
    assert np.allclose(battery_init("thermal", 11, beta=50).populations, np.eye(11)[0], atol=1e-20)
    st3 = battery_init("truncated", 11, populations=(0.43, 0.42, 0.15))
    assert np.allclose(st3.populations[:3], [0.43, 0.42, 0.15]) and st3.populations[3:].sum() == 0


@given(st.floats(0.01, 10), st.floats(0.2, 3), st.integers(2, 12))
def test_thermal_ratio(beta, omega, d_b):
    r = battery_init("thermal", d_b, beta=beta, omega=omega).populations
    assert abs(r.sum() - 1) <= 1e-12
    nz = r[:-1] > 1e-300
    assert np.allclose(r[1:][nz] / r[:-1][nz], np.exp(-beta * omega), rtol=1e-10)


def test_truncated_passivity_errors_name_the_inequality():
    with pytest.raises(ValueError, match="r_0 >= 1/2"):
        battery_init("truncated", 5, populations=truncated_populations(0.4))
    with pytest.raises(ValueError, match="r_0 >= 1/3"):
        battery_init("truncated", 5, populations=(0.3, 0.3, 0.4))
    with pytest.raises(ValueError, match=r"r_1 >= \(1-r_0\)/2"):
        battery_init("truncated", 5, populations=(0.6, 0.15, 0.25))
    with pytest.raises(ValueError, match="passive"):
        battery_init("truncated", 5, populations=(0.4, 0.3, 0.1, 0.2))
    with pytest.raises(ValueError):
        battery_init("truncated", 2, populations=(0.5, 0.3, 0.2))
    with pytest.raises(ValueError):
        battery_init("thermal", 3, beta=-1)


def test_charger_init():
    assert np.allclose(charger_init("excited_level", 2).rho, np.diag([0, 1]))
    assert np.allclose(charger_init("superposition", 3, theta=0.0, phi=1.0).rho, np.diag([0, 1, 0]))
    rho = charger_init("superposition", 3, theta=np.pi / 2, phi=0.0).rho
    assert np.allclose(rho[1:, 1:], 0.5 * np.ones((2, 2)))
    with pytest.raises(ValueError):
        charger_init("excited_level", 2, level=2)
    with pytest.raises(ValueError):
        charger_init("superposition", 2, theta=0.1)
    with pytest.raises(ValueError):
        charger_init("superposition", 3, theta=4.0)


def test_is_passive():
    h = np.diag([0.0, 1.0])
    assert is_passive(np.diag([1.0, 0.0]), h)
    assert not is_passive(np.diag([0.3, 0.7]), h)
    assert not is_passive(np.array([[0.6, 0.1], [0.1, 0.4]]), h)
    m = build_single_mode(5, 1.0)
    for beta in (0.1, 1.0, 5.0):
        assert is_passive(battery_init("thermal", 5, beta=beta).rho, m.battery_hamiltonian)


def test_is_passive_degenerate_levels():
    h = np.diag([0.0, 1.0, 1.0])
    rho = np.array([[0.6, 0, 0], [0, 0.1, 0.05], [0, 0.05, 0.3]])
    assert is_passive(rho, h)
    assert not is_passive(np.diag([0.2, 0.5, 0.3]), h)
