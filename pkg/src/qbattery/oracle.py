"""Closed-form Jaynes-Cummings results used to cross-check the dense simulation.

Conventions match :mod:`qbattery.model`: detuning delta = omega - nu, joint
order charger (x) battery, and multi-cycle battery states written in the frame
co-rotating with the free Hamiltonian (see :mod:`qbattery.cycle`).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class JCCoefficients(NamedTuple):
    n: int
    omega_n: float
    a_n: float
    b_n: float
    c_n: complex


def rabi_frequency(n, g: float, delta: float = 0.0):
    return np.sqrt(g * g * np.asarray(n) + delta * delta / 4.0)


def jc_coeffs(n: int, g: float, delta: float, t: float) -> JCCoefficients:
    """Populations and coherence of the n-excitation block started in |e_1, n-1>.

    a_n: weight moved to |e_0, n>; b_n: weight left in |e_1, n-1>;
    c_n: coherence <e_0, n| rho |e_1, n-1> in the lab frame.
    """
    if n < 1:
        raise ValueError("n must be >= 1; the zero-excitation block does not couple")
    w = float(rabi_frequency(n, g, delta))
    s2 = np.sin(w * t) ** 2
    a = g * g * n * s2 / w**2
    b = (4 * g * g * n * np.cos(w * t) ** 2 + delta**2) / (4 * w**2)
    c = g * np.sqrt(n) / (2 * w**2) * (-delta * s2 - 1j * w * np.sin(2 * w * t))
    return JCCoefficients(n, w, float(a), float(b), complex(c))


def transfer_weights(d_b: int, g: float, delta: float, t: float) -> np.ndarray:
    """A_n(t) for n = 0..d_b-1 (A_0 = 0), vectorized."""
    n = np.arange(d_b)
    w = rabi_frequency(np.maximum(n, 1), g, delta)
    a = g * g * n * np.sin(w * t) ** 2 / w**2
    a[0] = 0.0
    return a


def recursion_step(r_prev, g: float, delta: float, t: float, d_b: int | None = None) -> np.ndarray:
    """Fock populations after one cycle with a fresh |e_1> charger.

    r_0 <- r_0 B_1; r_i <- r_{i-1} A_i + r_i B_{i+1}; the top level keeps its
    population and gains r_{d-2} A_{d-1}.
    """
    r = np.asarray(r_prev, dtype=float)
    if d_b is None:
        d_b = len(r)
    if len(r) != d_b:
        raise ValueError(f"population vector has length {len(r)}, expected {d_b}")
    if abs(r.sum() - 1.0) > 1e-10:
        raise ValueError(f"populations sum to {r.sum()!r}, not 1")
    a = transfer_weights(d_b, g, delta, t)  # a[n] = A_n
    out = np.zeros(d_b)
    out[: d_b - 1] += r[: d_b - 1] * (1.0 - a[1:])  # r_i B_{i+1}
    out[1:] += r[: d_b - 1] * a[1:]  # r_{i-1} A_i
    out[d_b - 1] += r[d_b - 1]
    return out


def alpha_int(g: float, delta: float) -> float:
    """Phase offset bounding the interval where the vacuum ergotropy is non-zero."""
    if delta * delta > 4 * g * g:
        raise ValueError("interval undefined for delta^2 > 4 g^2")
    return float(np.arccos(np.sqrt((4 * g * g - delta * delta) / (8 * g * g))))


def in_vacuum_interval(g: float, delta: float, t) -> np.ndarray:
    """Whether Omega_1 t falls in (a, pi - a) or (pi + a, 2 pi - a) modulo 2 pi."""
    a = alpha_int(g, delta)
    x = np.mod(rabi_frequency(1, g, delta) * np.asarray(t, dtype=float), 2 * np.pi)
    return ((x > a) & (x < np.pi - a)) | ((x > np.pi + a) & (x < 2 * np.pi - a))


def ergo_vacuum(g: float, delta: float, omega: float, t):
    """Ergotropy after one cycle from the battery ground state."""
    inside = in_vacuum_interval(g, delta, t)
    w = rabi_frequency(1, g, delta)
    t = np.asarray(t, dtype=float)
    a = g * g * np.sin(w * t) ** 2 / w**2
    val = np.where(inside, omega * (2 * a - 1.0), 0.0)
    return float(val) if val.ndim == 0 else val


def daemonic_vacuum(g: float, delta: float, omega: float, t):
    """Daemonic ergotropy from the battery ground state; the same for every basis."""
    w = rabi_frequency(1, g, delta)
    val = omega * g * g * np.sin(w * np.asarray(t, dtype=float)) ** 2 / w**2
    return float(val) if np.ndim(val) == 0 else val


def tau_vacuum(g: float, delta: float = 0.0, ell: int = 0) -> float:
    return float((2 * ell + 1) * np.pi / (2 * rabi_frequency(1, g, delta)))


def emax_vacuum(g: float, delta: float, omega: float) -> float:
    return float(omega * (4 * g * g - delta * delta) / (4 * rabi_frequency(1, g, delta) ** 2))


def gap_vacuum(g: float, delta: float, omega: float) -> float:
    return float(omega * delta * delta / (4 * rabi_frequency(1, g, delta) ** 2))


def tau_ladder(m: int, g: float, ell: int = 0) -> float:
    """Charging time of cycle m for the resonant ground-state ladder."""
    return float((2 * ell + 1) * np.pi / (2 * np.sqrt(m) * g))


class TwoModeState(NamedTuple):
    rho: np.ndarray
    ergotropy: float
    mode_states: tuple[np.ndarray, np.ndarray]
    mode_ergotropies: tuple[float, float]


def _idx(n1: int, n2: int, d2: int) -> int:
    return n1 * d2 + n2


def _fock_ergotropy(pops, omega: float) -> float:
    p = np.asarray(pops, dtype=float)
    levels = omega * np.arange(len(p))
    return float(max(0.0, p @ levels - np.sort(p)[::-1] @ levels))


def first_cycle_interval(g: float, t) -> np.ndarray:
    x = np.mod(g * np.asarray(t, dtype=float), np.pi)
    return (x > np.pi / 4) & (x < 3 * np.pi / 4)


def two_mode_first_cycle(theta: float, phi: float, g: float, omega1: float, omega2: float, t: float,
                         mode_dims=(2, 2)) -> TwoModeState:
    """Resonant double-mode battery from |00> with charger cos(theta/2)|e1> + e^{i phi} sin(theta/2)|e2>.

    The collective ergotropy uses the branch formula with the lower of the two
    mode energies; when omega1 < omega2 the mode labels are effectively swapped.
    """
    d1, d2 = mode_dims
    if d1 < 2 or d2 < 2:
        raise ValueError("each mode needs at least 2 levels")
    c2, s2 = np.cos(theta / 2) ** 2, np.sin(theta / 2) ** 2
    sn, cs = np.sin(g * t) ** 2, np.cos(g * t) ** 2
    rho = np.zeros((d1 * d2, d1 * d2), dtype=complex)
    i00, i10, i01 = _idx(0, 0, d2), _idx(1, 0, d2), _idx(0, 1, d2)
    rho[i00, i00] = cs
    rho[i10, i10] = sn * c2
    rho[i01, i01] = sn * s2
    rho[i01, i10] = sn * 0.5 * np.sin(theta) * np.exp(1j * phi)
    rho[i10, i01] = np.conj(rho[i01, i10])
    w_lo = min(omega1, omega2)
    mean = sn * (omega1 * c2 + omega2 * s2)
    e_b = mean - w_lo * (cs if first_cycle_interval(g, t) else sn)
    p1 = np.zeros(d1)
    p1[0], p1[1] = sn * s2 + cs, sn * c2
    p2 = np.zeros(d2)
    p2[0], p2[1] = sn * c2 + cs, sn * s2
    return TwoModeState(rho, float(max(e_b, 0.0)), (np.diag(p1).astype(complex), np.diag(p2).astype(complex)),
                        (_fock_ergotropy(p1, omega1), _fock_ergotropy(p2, omega2)))


def tau_second_cycle(g: float, ell: int = 0) -> float:
    """Collective-ergotropy maximum of the second double-mode cycle."""
    return float((2 * ell + 1) * np.pi / (2 * np.sqrt(2) * g))


def two_mode_second_cycle(theta: float, phi: float, g: float, t: float, omega1: float = 1.0,
                          omega2: float = 1.2, mode_dims=(3, 3)) -> TwoModeState:
    """Second resonant cycle fed by the first-cycle output at its maximum.

    All three channels |e1,10>->|e0,20>, bright(|e1,01>,|e2,10>)->|e0,11>,
    |e2,01>->|e0,02> oscillate at sqrt(2) g, so the state is
    sin^2(sqrt2 g t)|chi><chi| + cos^2(sqrt2 g t)|beta><beta| with
    |chi> = c^2|20> + sqrt2 c s e^{i phi}|11> + s^2 e^{2i phi}|02> and
    |beta> = c|10> + s e^{i phi}|01> (c, s = cos, sin of theta/2).
    """
    d1, d2 = mode_dims
    if d1 < 3 or d2 < 3:
        raise ValueError("each mode needs at least 3 levels")
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    x = np.sqrt(2) * g * t
    sn, cs = np.sin(x) ** 2, np.cos(x) ** 2
    chi = np.zeros(d1 * d2, dtype=complex)
    chi[_idx(2, 0, d2)] = c * c
    chi[_idx(1, 1, d2)] = np.sqrt(2) * c * s * e
    chi[_idx(0, 2, d2)] = s * s * e * e
    beta = np.zeros(d1 * d2, dtype=complex)
    beta[_idx(1, 0, d2)] = c
    beta[_idx(0, 1, d2)] = s * e
    rho = sn * np.outer(chi, chi.conj()) + cs * np.outer(beta, beta.conj())
    c2, s2 = c * c, s * s
    p1 = np.zeros(d1)
    p1[:3] = (sn * s2 * s2 + cs * s2, 0.5 * sn * np.sin(theta) ** 2 + cs * c2, sn * c2 * c2)
    p2 = np.zeros(d2)
    p2[:3] = (sn * c2 * c2 + cs * c2, 0.5 * sn * np.sin(theta) ** 2 + cs * s2, sn * s2 * s2)
    mean = sn * (2 * omega1 * c2 * c2 + 2 * c2 * s2 * (omega1 + omega2) + 2 * omega2 * s2 * s2) \
        + cs * (omega1 * c2 + omega2 * s2)
    e_b = mean - min(omega1, omega2) * min(sn, cs)
    return TwoModeState(rho, float(max(e_b, 0.0)), (np.diag(p1).astype(complex), np.diag(p2).astype(complex)),
                        (_fock_ergotropy(p1, omega1), _fock_ergotropy(p2, omega2)))


def simultaneous_theta_window() -> tuple[float, float]:
    """theta range where both modes hold ergotropy after the second cycle: sin^2(theta/2) in [1/3, 2/3]."""
    return float(np.arccos(1 / 3)), float(np.arccos(-1 / 3))
