"""One-dimensional bracketed searches used by the time and basis optimizers."""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI2 = (3 - math.sqrt(5)) / 2


def golden_section(f, a: float, b: float, tol: float = 1e-10, maximize: bool = False):
    """Golden-section search for a unimodal f on [a, b].

    Returns ``(x, f(x), n_evals)`` for the best point seen.
    """
    sign = -1.0 if maximize else 1.0
    a, b = min(a, b), max(a, b)
    c, d = a + INV_PHI2 * (b - a), a + INV_PHI * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    n = 2
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = sign * f(d)
        n += 1
    x, fx = (c, fc) if fc <= fd else (d, fd)
    return x, sign * fx, n


def golden_section_batch(f, a, b, tol: float = 1e-6):
    """Vectorized golden-section minimization of many independent brackets.

    ``f`` maps an array of abscissae (one per bracket) to an array of values.
    Returns ``(x, fx, n_evals)`` with ``n_evals`` counting points evaluated.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    width = float(np.max(b - a)) if a.size else 0.0
    steps = 0 if width <= tol else int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))
    c = a + INV_PHI2 * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    n = 2 * a.size
    for _ in range(steps):
        left = fc <= fd
        # left: keep [a, d]; right: keep [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = a + INV_PHI2 * (b - a)
        new_d = a + INV_PHI * (b - a)
        x_new = np.where(left, new_c, new_d)
        f_new = f(x_new)
        n += a.size
        c, fc, d, fd = (
            np.where(left, new_c, d),
            np.where(left, f_new, fd),
            np.where(left, c, new_d),
            np.where(left, fc, f_new),
        )
    better = fc <= fd
    return np.where(better, c, d), np.where(better, fc, fd), n


def parabolic_polish(f, x: float, fx: float, h: float, lo: float, hi: float, maximize: bool = False):
    """One parabolic-vertex step through (x-h, x, x+h).

    Near a smooth extremum, golden section stalls at ~sqrt(eps) because values
    become indistinguishable; the vertex of a finite-width parabola does not.
    The step is accepted only if it does not make the value worse.
    """
    if x - h < lo or x + h > hi:
        return x, fx, 0
    fm, fp = f(x - h), f(x + h)
    curv = fp - 2 * fx + fm
    if (maximize and curv >= 0) or (not maximize and curv <= 0):
        return x, fx, 2
    xv = x - 0.5 * h * (fp - fm) / curv
    if abs(xv - x) > h:
        return x, fx, 2
    fv = f(xv)
    worse = fv < fx if maximize else fv > fx
    if worse and abs(fv - fx) > 1e-14 * max(1.0, abs(fx)):
        return x, fx, 3
    return xv, fv, 3
