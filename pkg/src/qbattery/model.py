"""Battery-charger Hamiltonians and passive initial states.

Joint-space factor order is always ``charger (x) mode_1 (x) mode_2 (x) ...``.
Charger level ``|e_0>`` is index 0; Fock level ``|n>`` is index ``n``.
Units: hbar = k_B = 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import qla

PASSIVE_SLACK = 1e-12
OFFDIAG_TOL = 1e-10


def lowering(d: int) -> np.ndarray:
    """Truncated annihilation operator: a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(complex)


def number(d: int) -> np.ndarray:
    return np.diag(np.arange(d)).astype(complex)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BatteryChargerModel:
    mode_dims: tuple[int, ...]
    mode_freqs: tuple[float, ...]
    charger_levels: tuple[float, ...]
    coupling: float
    h_a: np.ndarray = field(repr=False)
    h_b: np.ndarray = field(repr=False)
    h_ab: np.ndarray = field(repr=False)

    @property
    def charger_dim(self) -> int:
        return len(self.charger_levels)

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    @property
    def battery_dim(self) -> int:
        return int(np.prod(self.mode_dims))

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.charger_dim, *self.mode_dims)

    @property
    def joint_dim(self) -> int:
        return self.charger_dim * self.battery_dim

    @property
    def g(self) -> float:
        return self.coupling

    @property
    def detunings(self) -> tuple[float, ...]:
        return tuple(w - nu for w, nu in zip(self.mode_freqs, self.charger_levels[1:]))

    @property
    def delta(self) -> float:
        """Detuning of the single-mode model."""
        if self.n_modes != 1:
            raise ValueError("delta is only defined for a single-mode model; use detunings")
        return self.detunings[0]

    @property
    def omega(self) -> float:
        if self.n_modes != 1:
            raise ValueError("omega is only defined for a single-mode model; use mode_freqs")
        return self.mode_freqs[0]

    @cached_property
    def h_total(self) -> np.ndarray:
        return _frozen(self.h_a + self.h_b + self.h_ab)

    @cached_property
    def spectrum(self) -> qla.Spectrum:
        return qla.herm_eig(self.h_total)

    @cached_property
    def battery_hamiltonian(self) -> np.ndarray:
        """H_b acting on the battery space alone."""
        return _frozen(sum(
            _embed(self.mode_freqs[i] * number(d), i, self.mode_dims)
            for i, d in enumerate(self.mode_dims)
        ))

    def mode_hamiltonian(self, i: int) -> np.ndarray:
        return self.mode_freqs[i] * number(self.mode_dims[i])

    @cached_property
    def excitation_number(self) -> np.ndarray:
        """Charger excitations plus total boson number, conserved by h_total."""
        n_a = np.diag([0.0] + [1.0] * (self.charger_dim - 1)).astype(complex)
        out = qla.kron(n_a, np.eye(self.battery_dim))
        for i, d in enumerate(self.mode_dims):
            out = out + _embed(number(d), i + 1, self.dims)
        return out

    @property
    def max_energy(self) -> float:
        return float(sum((d - 1) * w for d, w in zip(self.mode_dims, self.mode_freqs)))


def _embed(op: np.ndarray, slot: int, dims) -> np.ndarray:
    mats = [np.eye(d, dtype=complex) for d in dims]
    mats[slot] = op
    return qla.kron(*mats)


def build_single_mode(d_b: int, omega: float = 1.0, nu: float | None = None, g: float = 1.0,
                      *, delta: float | None = None) -> BatteryChargerModel:
    """Harmonic mode truncated at ``d_b`` levels coupled to a qubit charger.

    Give either the charger splitting ``nu`` or the detuning ``delta = omega - nu``.
    """
    if nu is None and delta is None:
        nu = omega
    elif nu is None:
        nu = omega - delta
    elif delta is not None and not np.isclose(omega - nu, delta):
        raise ValueError("nu and delta disagree")
    return build_multimode([d_b], [omega], [0.0, nu], g)


def build_multimode(mode_dims, mode_freqs, charger_levels=None, g: float = 1.0) -> BatteryChargerModel:
    """Modes ``b_i`` each coupled to the ``|e_0> <-> |e_i>`` transition of a qudit.

    ``charger_levels`` is the full list ``(nu_0=0, nu_1, ...)``; ``None`` means
    resonant, ``nu_i = omega_i``.
    """
    mode_dims = tuple(int(d) for d in mode_dims)
    mode_freqs = tuple(float(w) for w in mode_freqs)
    if len(mode_dims) != len(mode_freqs) or not mode_dims:
        raise ValueError("mode_dims and mode_freqs must be non-empty and equally long")
    if charger_levels is None:
        charger_levels = (0.0, *mode_freqs)
    charger_levels = tuple(float(x) for x in charger_levels)
    d_a = len(charger_levels)
    if len(mode_dims) != d_a - 1:
        raise ValueError(f"{len(mode_dims)} modes need a charger of dimension {len(mode_dims) + 1}, got {d_a}")
    if any(d < 2 for d in mode_dims):
        raise ValueError("each mode needs at least 2 levels")
    if any(w <= 0 for w in mode_freqs):
        raise ValueError("mode frequencies must be positive")
    if not g > 0:
        raise ValueError("coupling g must be positive")
    if charger_levels[0] != 0.0:
        raise ValueError("charger ground level nu_0 must be 0")
    if len(set(mode_freqs)) != len(mode_freqs):
        raise ValueError("mode frequencies must be pairwise distinct (non-degenerate modes)")
    if any(b <= a for a, b in zip(charger_levels, charger_levels[1:])):
        raise ValueError("charger levels must be strictly increasing")
    for w, nu in zip(mode_freqs, charger_levels[1:]):
        if abs(w - nu) > 0.1 * w * (1 + 1e-9):
            warnings.warn(f"detuning {w - nu:g} exceeds 0.1*omega={0.1 * w:g}", stacklevel=2)

    dims = (d_a, *mode_dims)
    h_a = _embed(np.diag(charger_levels).astype(complex), 0, dims)
    h_b = sum(_embed(w * number(d), i + 1, dims) for i, (d, w) in enumerate(zip(mode_dims, mode_freqs)))
    h_ab = np.zeros_like(h_a)
    for i, d in enumerate(mode_dims, start=1):
        down = np.outer(qla.ket(d_a, 0), qla.ket(d_a, i))  # |e_0><e_i|
        mats = [np.eye(n, dtype=complex) for n in dims]
        mats[0] = down
        mats[i] = lowering(d).conj().T
        term = qla.kron(*mats)
        h_ab = h_ab + g * (term + term.conj().T)
    return BatteryChargerModel(mode_dims, mode_freqs, charger_levels, float(g),
                               _frozen(h_a), _frozen(h_b), _frozen(h_ab))


@dataclass(frozen=True)
class BatteryInitState:
    kind: str
    params: dict
    rho: np.ndarray = field(repr=False)

    @property
    def populations(self) -> np.ndarray:
        return np.diag(self.rho).real.copy()


def _check_descending(r) -> None:
    for n in range(len(r) - 1):
        if r[n + 1] > r[n] + PASSIVE_SLACK:
            raise ValueError(f"populations not passive: r_{n + 1}={r[n + 1]:g} > r_{n}={r[n]:g}")


def battery_init(kind: str, d_b: int, *, populations=None, beta: float | None = None,
                 omega: float = 1.0) -> BatteryInitState:
    """Passive Fock-diagonal battery state.

    kind: ``"ground"``, ``"truncated"`` (with ``populations`` r_0, r_1, ...) or
    ``"thermal"`` (with ``beta`` and the mode frequency ``omega``).
    """
    if d_b < 1:
        raise ValueError("battery dimension must be positive")
    r = np.zeros(d_b)
    if kind == "ground":
        r[0] = 1.0
        params: dict = {}
    elif kind == "truncated":
        pops = np.asarray(populations, dtype=float)
        d = len(pops)
        if d < 1 or d > d_b:
            raise ValueError(f"need 1..{d_b} truncated populations, got {d}")
        if np.any(pops < 0) or abs(pops.sum() - 1.0) > 1e-12:
            raise ValueError("truncated populations must be nonnegative and sum to 1")
        if d == 2 and pops[0] < 0.5 - PASSIVE_SLACK:
            raise ValueError(f"two-level mixture needs r_0 >= 1/2, got r_0={pops[0]:g}")
        if d == 3:
            if pops[0] < 1 / 3 - PASSIVE_SLACK:
                raise ValueError(f"three-level mixture needs r_0 >= 1/3, got r_0={pops[0]:g}")
            if pops[1] < (1 - pops[0]) / 2 - PASSIVE_SLACK:
                raise ValueError(f"three-level mixture needs r_1 >= (1-r_0)/2, got r_1={pops[1]:g}")
        _check_descending(pops)
        r[:d] = pops
        params = {"populations": tuple(float(x) for x in pops)}
    elif kind == "thermal":
        if beta is None or not beta > 0:
            raise ValueError("thermal state needs beta > 0")
        if not omega > 0:
            raise ValueError("omega must be positive")
        logw = -beta * omega * np.arange(d_b)
        w = np.exp(logw - logw.max())
        r = w / w.sum()
        params = {"beta": float(beta), "omega": float(omega)}
    else:
        raise ValueError(f"unknown battery state kind {kind!r}")
    return BatteryInitState(kind, params, _frozen(np.diag(r)))


def truncated_populations(r0: float, r1: float | None = None) -> tuple[float, ...]:
    """Populations of the two-level (r1 None) or three-level truncated mixture."""
    if r1 is None:
        return (r0, 1.0 - r0)
    return (r0, r1, 1.0 - r0 - r1)


@dataclass(frozen=True)
class ChargerInitState:
    kind: str
    params: dict
    rho: np.ndarray = field(repr=False)


def charger_init(kind: str, d_a: int = 2, *, level: int = 1, theta: float = 0.0,
                 phi: float = 0.0) -> ChargerInitState:
    """Pure charger state: ``excited_level`` |e_level> or the ``superposition``
    cos(theta/2)|e_1> + exp(i phi) sin(theta/2)|e_2>."""
    if kind == "excited_level":
        if not 0 <= level < d_a:
            raise ValueError(f"level {level} out of range for a {d_a}-level charger")
        psi = qla.ket(d_a, level)
        params = {"level": level}
    elif kind == "superposition":
        if d_a < 3:
            raise ValueError("superposition needs a charger with at least 3 levels")
        if not 0.0 <= theta <= np.pi:
            raise ValueError("theta must lie in [0, pi]")
        if not 0.0 <= phi < 2 * np.pi:
            raise ValueError("phi must lie in [0, 2 pi)")
        psi = np.cos(theta / 2) * qla.ket(d_a, 1) + np.exp(1j * phi) * np.sin(theta / 2) * qla.ket(d_a, 2)
        params = {"theta": float(theta), "phi": float(phi)}
    else:
        raise ValueError(f"unknown charger state kind {kind!r}")
    return ChargerInitState(kind, params, _frozen(qla.projector(psi)))


def is_passive(rho, h) -> bool:
    """True if rho is diagonal in h's eigenbasis with populations non-increasing in energy."""
    rho = qla.as_matrix(rho)
    w, v = qla.herm_eig(h)
    r = v.conj().T @ rho @ v
    # degenerate energy levels: only the block structure matters
    p = np.diag(r).real.copy()
    off = r - np.diag(np.diag(r))
    blocks = _degenerate_blocks(w)
    for blk in blocks:
        if len(blk) > 1:
            sub = r[np.ix_(blk, blk)]
            off[np.ix_(blk, blk)] = 0.0
            p[blk] = np.sort(np.linalg.eigvalsh(qla.hermitize(sub)))[::-1]
    if np.linalg.norm(off) > OFFDIAG_TOL:
        return False
    return bool(np.all(np.diff(p) <= PASSIVE_SLACK))


def _degenerate_blocks(w, tol: float = 1e-12) -> list[list[int]]:
    blocks: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[blocks[-1][0]] <= tol * max(1.0, abs(w[i])):
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return blocks
