"""Extremizing daemonic ergotropy over projective charger measurements.

A heuristic global search: a deterministic grid (qubit) or seeded random
starts (qudit) followed by vectorized coordinate descent. Not a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import ergo
from .search import golden_section_batch

QUBIT_ALPHA_POINTS = 181
QUBIT_GAMMA_POINTS = 72
QUDIT_STARTS = 64
PARAM_TOL = 1e-6
GAPLESS_THRESHOLD = 1e-3


@dataclass(frozen=True)
class OptResult:
    value: float
    params: tuple
    evaluations: int
    converged: bool


def qubit_vectors(alpha, gamma) -> np.ndarray:
    """Columns xi_+ = cos(a/2)|e0> + e^{ig} sin(a/2)|e1>, xi_- = sin(a/2)|e0> - e^{ig} cos(a/2)|e1>.

    Broadcasts over ``alpha``/``gamma``; shape (..., 2, 2).
    """
    alpha, gamma = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(gamma, dtype=float))
    c, s, e = np.cos(alpha / 2), np.sin(alpha / 2), np.exp(1j * gamma)
    out = np.empty(alpha.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 1, 0] = e * s
    out[..., 0, 1] = s
    out[..., 1, 1] = -e * c
    return out


def qubit_basis(alpha: float, gamma: float = 0.0) -> ergo.MeasurementBasis:
    if not 0.0 <= alpha <= np.pi:
        raise ValueError("alpha must lie in [0, pi]")
    return ergo.MeasurementBasis(qubit_vectors(alpha, gamma), (float(alpha), float(gamma)))


def qudit_pairs(d: int) -> list[tuple[int, int]]:
    return list(combinations(range(d), 2))


def n_qudit_params(d: int) -> int:
    return d * (d - 1)


def qudit_vectors(params, d: int) -> np.ndarray:
    """Unitary whose columns form the basis: ordered product of two-level rotations.

    Each pair (i, j) has an angle and a phase; its block is
    [[cos(a/2), -e^{-ip} sin(a/2)], [e^{ip} sin(a/2), cos(a/2)]], which has the
    same projectors as the qubit basis with (alpha, gamma) = (a, p). Broadcasts
    over leading axes of ``params`` (last axis length d(d-1)).
    """
    params = np.asarray(params, dtype=float)
    if params.shape[-1] != n_qudit_params(d):
        raise ValueError(f"need {n_qudit_params(d)} parameters for d={d}, got {params.shape[-1]}")
    batch = params.shape[:-1]
    u = np.broadcast_to(np.eye(d, dtype=complex), batch + (d, d)).copy()
    for k, (i, j) in enumerate(qudit_pairs(d)):
        a, p = params[..., 2 * k], params[..., 2 * k + 1]
        c, s, e = np.cos(a / 2), np.sin(a / 2), np.exp(1j * p)
        ci, cj = u[..., :, i].copy(), u[..., :, j].copy()
        # u <- u @ G, G acting on columns i, j
        u[..., :, i] = ci * c[..., None] + cj * (e * s)[..., None]
        u[..., :, j] = -ci * (np.conj(e) * s)[..., None] + cj * c[..., None]
    return u


def qudit_basis(params, d: int) -> ergo.MeasurementBasis:
    return ergo.MeasurementBasis(qudit_vectors(params, d), tuple(float(x) for x in params))


def _coordinate_descent(ev, x0, lower, upper, periodic, half_width, sign, tol, budget, vectors):
    """Batched cyclic coordinate descent; each line search is golden section on
    [x_j - w_j, x_j + w_j] clipped to the box (periodic coords wrap).

    Returns (x, values, evals, converged).
    """
    x = np.array(x0, dtype=float)
    val = sign * ev(vectors(x))
    evals = x.shape[0]
    dim = x.shape[1]
    while True:
        moved = np.zeros(x.shape[0])
        for j in range(dim):
            lo = x[:, j] - half_width[j]
            hi = x[:, j] + half_width[j]
            if not periodic[j]:
                lo = np.maximum(lo, lower[j])
                hi = np.minimum(hi, upper[j])

            def f(xj, j=j):
                trial = x.copy()
                trial[:, j] = xj
                return sign * ev(vectors(trial))

            xj, fj, n = golden_section_batch(f, lo, hi, tol=tol)
            evals += n
            better = fj < val
            step = np.where(better, np.abs(xj - x[:, j]), 0.0)
            x[:, j] = np.where(better, xj, x[:, j])
            val = np.where(better, fj, val)
            moved = np.maximum(moved, step)
        if np.all(moved < tol):
            return x, sign * val, evals, True
        if evals >= budget:
            return x, sign * val, evals, False


def _wrap_params(x, periodic):
    x = x.copy()
    for j, p in enumerate(periodic):
        if p:
            x[..., j] = np.mod(x[..., j], 2 * np.pi)
    return x


def _pick(values, params, sense):
    """Best value; ties broken by lexicographic parameters (deterministic merge)."""
    order = np.lexsort(tuple(params[:, j] for j in range(params.shape[1] - 1, -1, -1)) + ((values if sense == "min" else -values),))
    return order[0]


def optimize_daemonic(rho_ab, model, sense: str = "min", *, alpha_points: int = QUBIT_ALPHA_POINTS,
                      gamma_points: int = QUBIT_GAMMA_POINTS, starts: int = QUDIT_STARTS, seed: int = 0,
                      refine: int = 4, budget: int = 200_000, tol: float = PARAM_TOL,
                      evaluator: ergo.DaemonicEvaluator | None = None) -> OptResult:
    """Minimum (``sense="min"``) or maximum (``"max"``) daemonic ergotropy over charger bases."""
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    ev = evaluator if evaluator is not None else ergo.DaemonicEvaluator(rho_ab, model)
    sign = 1.0 if sense == "min" else -1.0
    d = model.charger_dim
    start_evals = ev.evaluations
    if d == 2:
        alphas = np.linspace(0.0, np.pi, alpha_points)
        gammas = np.linspace(0.0, 2 * np.pi, gamma_points, endpoint=False)
        A, G = np.meshgrid(alphas, gammas, indexing="ij")
        grid = np.stack([A.ravel(), G.ravel()], axis=1)
        vectors = lambda x: qubit_vectors(x[:, 0], x[:, 1])  # noqa: E731
        lower, upper, periodic = (0.0, 0.0), (np.pi, 2 * np.pi), (False, True)
        widths = (np.pi / max(alpha_points - 1, 1), 2 * np.pi / max(gamma_points, 1))
    else:
        rng = np.random.default_rng(seed)
        npar = n_qudit_params(d)
        grid = np.empty((starts + 1, npar))
        grid[0] = 0.0  # computational basis
        grid[1:, 0::2] = rng.uniform(0.0, np.pi, size=(starts, npar // 2))
        grid[1:, 1::2] = rng.uniform(0.0, 2 * np.pi, size=(starts, npar // 2))
        vectors = lambda x: qudit_vectors(x, d)  # noqa: E731
        lower = tuple([0.0, 0.0] * (npar // 2))
        upper = tuple([np.pi, 2 * np.pi] * (npar // 2))
        periodic = tuple([False, True] * (npar // 2))
        widths = tuple([np.pi / 4, np.pi / 2] * (npar // 2))

    grid_vals = ev(vectors(grid))
    if d == 2:
        k = min(refine, len(grid))
        seeds = np.argsort(sign * grid_vals, kind="stable")[:k]
    else:
        seeds = np.arange(len(grid))
    x, vals, _, converged = _coordinate_descent(
        ev, grid[seeds], lower, upper, periodic, widths, sign, tol, budget, vectors)
    x = _wrap_params(x, periodic)
    all_x = np.vstack([grid, x])
    all_v = np.concatenate([grid_vals, vals])
    best = _pick(all_v, all_x, sense)
    params = tuple(float(p) for p in all_x[best])
    return OptResult(float(all_v[best]), params, int(ev.evaluations - start_evals), bool(converged))


def fold_alpha(alpha: float) -> float:
    """Map a qubit measurement angle to [0, pi/2]: alpha and pi - alpha give the same measurement."""
    return float(min(alpha, np.pi - alpha))


def daemonic_report(rho_ab, model, t: float, *, gapless_threshold: float = GAPLESS_THRESHOLD,
                    **opt_kwargs) -> ergo.DaemonicReport:
    ev = ergo.DaemonicEvaluator(rho_ab, model)
    lo = optimize_daemonic(rho_ab, model, "min", evaluator=ev, **opt_kwargs)
    hi = optimize_daemonic(rho_ab, model, "max", evaluator=ev, **opt_kwargs)
    return ergo.DaemonicReport(float(t), ev.ergotropy, lo.value, hi.value, lo.params, hi.params, gapless_threshold)
