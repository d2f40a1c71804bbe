"""Passive states, ergotropy and daemonic ergotropy."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qla

ERGO_FLOOR = 1e-10
SUPPORT_TOL = 1e-13


@dataclass(frozen=True)
class MeasurementBasis:
    """Complete orthonormal charger basis; ``vectors[:, k]`` is outcome k."""

    vectors: np.ndarray = field(repr=False)
    params: tuple = ()

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"basis must be a square matrix of column vectors, got {v.shape}")
        if np.max(np.abs(v.conj().T @ v - np.eye(v.shape[0]))) > 1e-10:
            raise ValueError("measurement basis is not orthonormal")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def charger_dim(self) -> int:
        return self.vectors.shape[0]

    def projectors(self) -> list[np.ndarray]:
        return [qla.projector(self.vectors[:, k]) for k in range(self.charger_dim)]


@dataclass(frozen=True)
class MeasuredEnsemble:
    probs: tuple[float, ...]
    states: tuple[np.ndarray | None, ...] = field(repr=False)

    def mixture(self) -> np.ndarray:
        out = None
        for p, s in zip(self.probs, self.states):
            if s is None:
                continue
            out = p * s if out is None else out + p * s
        return out


@dataclass(frozen=True)
class DaemonicReport:
    t: float
    ergotropy: float
    daemonic_min: float
    daemonic_max: float
    argmin_params: tuple
    argmax_params: tuple
    gapless_threshold: float = 1e-3

    @property
    def gap(self) -> float:
        return self.daemonic_min - self.ergotropy

    @property
    def gain(self) -> float:
        return self.daemonic_max - self.ergotropy

    @property
    def band(self) -> float:
        return self.daemonic_max - self.daemonic_min

    @property
    def gapless(self) -> bool:
        return self.gap <= self.gapless_threshold


def _energy_levels(h) -> qla.Spectrum:
    return qla.herm_eig(h)


def passive_state(rho, h) -> np.ndarray:
    """Eigenvalues of rho (descending) placed on energy eigenstates of h (ascending)."""
    rho = qla.as_matrix(rho)
    w, v = _energy_levels(h)
    if v.shape[0] != rho.shape[0]:
        raise ValueError("state and Hamiltonian dimensions differ")
    q = np.sort(np.linalg.eigvalsh(qla.hermitize(rho)))[::-1]
    return (v * q) @ v.conj().T


def _floor(x):
    return np.where((x < 0) & (x > -ERGO_FLOOR), 0.0, x)


def ergotropy(rho, h) -> float:
    """Tr[h (rho - passive(rho))]; works for unnormalized rho too."""
    rho = qla.as_matrix(rho)
    h = qla.as_matrix(h)
    if h.shape != rho.shape:
        raise ValueError("state and Hamiltonian dimensions differ")
    energies = _energy_levels(h).eigenvalues
    q = np.sort(np.linalg.eigvalsh(qla.hermitize(rho)))[::-1]
    val = float(np.trace(h @ rho).real - q @ energies)
    return float(_floor(val))


def ergotropy_batch(rhos, energies) -> np.ndarray:
    """Ergotropy of a stack of states against a Hamiltonian diagonal with ``energies``.

    ``energies`` are the diagonal entries in the basis the states are written in
    (not necessarily sorted).
    """
    rhos = np.asarray(rhos)
    energies = np.asarray(energies, dtype=float)
    mean = np.einsum("...ii,i->...", rhos, energies).real
    q = np.linalg.eigvalsh(qla.hermitize(rhos))[..., ::-1]
    return _floor(mean - q @ np.sort(energies))


def measure_charger(rho_ab, model, basis: MeasurementBasis) -> MeasuredEnsemble:
    """Project the charger onto each basis vector and keep the battery post-states."""
    rho_ab = qla.as_matrix(rho_ab)
    da, db = model.charger_dim, model.battery_dim
    if basis.charger_dim != da:
        raise ValueError(f"basis dimension {basis.charger_dim} != charger dimension {da}")
    if rho_ab.shape != (da * db, da * db):
        raise ValueError("joint state does not match model dimensions")
    r = rho_ab.reshape(da, db, da, db)
    probs, states = [], []
    for k in range(da):
        v = basis.vectors[:, k]
        sigma = np.einsum("i,ixjy,j->xy", v.conj(), r, v)
        p = float(np.trace(sigma).real)
        if p <= qla.ZERO_PROB:
            probs.append(0.0)
            states.append(None)
            continue
        probs.append(p)
        states.append(qla.clamp_psd(sigma / p, tol=1e-10))
    return MeasuredEnsemble(tuple(probs), tuple(states))


def daemonic_ergotropy(rho_ab, model, basis: MeasurementBasis) -> float:
    ens = measure_charger(rho_ab, model, basis)
    h = model.battery_hamiltonian
    return float(sum(p * ergotropy(s, h) for p, s in zip(ens.probs, ens.states) if s is not None))


def reduced_battery(rho_ab, model) -> np.ndarray:
    da, db = model.charger_dim, model.battery_dim
    return np.einsum("ixiy->xy", np.asarray(rho_ab).reshape(da, db, da, db))


def advantage(rho_ab, model, basis: MeasurementBasis) -> float:
    return daemonic_ergotropy(rho_ab, model, basis) - ergotropy(reduced_battery(rho_ab, model), model.battery_hamiltonian)


class DaemonicEvaluator:
    """Daemonic ergotropy of one fixed joint state for many charger bases at once.

    Post-measurement battery states satisfy p_k rho_k <= rho_b, so they live in
    the support of the reduced battery state; the work is done in that subspace.
    Since ergotropy is positively homogeneous, each outcome contributes
    ergotropy(P_k rho P_k traced), no division by p_k needed.
    """

    def __init__(self, rho_ab, model, support_tol: float = SUPPORT_TOL):
        rho_ab = qla.as_matrix(rho_ab)
        da, db = model.charger_dim, model.battery_dim
        if rho_ab.shape != (da * db, da * db):
            raise ValueError("joint state does not match model dimensions")
        self.model = model
        self.da = da
        h = np.asarray(model.battery_hamiltonian)
        r = rho_ab.reshape(da, db, da, db)
        rho_b = qla.hermitize(np.einsum("ixiy->xy", r))
        w, v = np.linalg.eigh(rho_b)
        s = v[:, w > support_tol]
        if s.shape[1] == 0:
            raise ValueError("reduced battery state is zero")
        self.rank = s.shape[1]
        self._r = np.einsum("xa,ixjy,yb->iajb", s.conj(), r, s)
        self._h = s.conj().T @ h @ s
        self._levels = np.sort(np.diag(h).real if not np.any(h - np.diag(np.diag(h))) else np.linalg.eigvalsh(h))[: self.rank]
        self.evaluations = 0
        self.ergotropy = float(ergotropy(rho_b, h))

    def __call__(self, bases) -> np.ndarray:
        """``bases``: array (..., d_a, d_a) whose columns are basis vectors."""
        v = np.asarray(bases, dtype=complex)
        batch = v.shape[:-2]
        v = v.reshape(-1, self.da, self.da)
        sig = np.einsum("nik,njk,iajb->nkab", v.conj(), v, self._r)
        mean = np.einsum("nkab,ba->nk", sig, self._h).real
        q = np.linalg.eigvalsh(qla.hermitize(sig))[..., ::-1]
        outcome = _floor(mean - q @ self._levels)
        self.evaluations += v.shape[0]
        return outcome.sum(axis=-1).reshape(batch)

    def single(self, basis: MeasurementBasis | np.ndarray) -> float:
        vec = basis.vectors if isinstance(basis, MeasurementBasis) else basis
        return float(self(vec[None])[0])


def is_complete_ensemble(ens: MeasuredEnsemble, rho_b, atol: float = 1e-9) -> bool:
    return abs(sum(ens.probs) - 1.0) <= 1e-10 and bool(np.max(np.abs(ens.mixture() - rho_b)) <= atol)


def outcome_ergotropies(ens: MeasuredEnsemble, h) -> Sequence[float]:
    return [0.0 if s is None else ergotropy(s, h) for s in ens.states]
