"""Dense complex linear algebra for small density matrices.

Operators are plain ``numpy`` arrays of dtype complex128. Everything here is a
pure function; no input is modified in place.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
CLAMP_TOL = 1e-12
ZERO_PROB = 1e-12


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2).conj()


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def is_hermitian(a: np.ndarray, atol: float = HERM_TOL) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol)


def check_density(rho, atol: float = 1e-10) -> np.ndarray:
    """Validate a density matrix and return it as a complex array.

    Raises ValueError naming the first violated property.
    """
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    if not is_hermitian(rho, atol):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise ValueError(f"density matrix trace is {tr!r}, not 1")
    lo = np.linalg.eigvalsh(hermitize(rho))[0]
    if lo < -atol:
        raise ValueError(f"density matrix has negative eigenvalue {lo!r}")
    return rho


def is_density(rho, atol: float = 1e-10) -> bool:
    try:
        check_density(rho, atol)
    except ValueError:
        return False
    return True


def kron(*ops) -> np.ndarray:
    """Kronecker product of any number of matrices (left factor is slowest)."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    out = as_matrix(ops[0])
    for op in ops[1:]:
        out = np.kron(out, as_matrix(op))
    return out


def partial_trace(rho, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced state on the factors listed in ``keep``, in their original order.

    Works on a single matrix or on a stack with leading batch axes.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in dims]
    keep = sorted({int(k) for k in np.atleast_1d(keep)})
    n = len(dims)
    total = int(np.prod(dims))
    if rho.shape[-2:] != (total, total):
        raise ValueError(f"dims {dims} do not match matrix shape {rho.shape[-2:]}")
    if not keep:
        raise ValueError("keep must name at least one factor")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep indices {keep} out of range for {n} factors")
    batch = rho.shape[:-2]
    nb = len(batch)
    t = rho.reshape(*batch, *dims, *dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    bl = "ABCDEFGH"[:nb]
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = bl + "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    red = np.einsum(f"{bl}{''.join(row)}{''.join(col)}->{out}", t)
    kd = int(np.prod([dims[i] for i in keep]))
    return red.reshape(*batch, kd, kd)


def herm_eig(h, atol: float = 1e-12) -> Spectrum:
    """Ascending eigendecomposition of a Hermitian matrix.

    Diagonal input is handled exactly with a stable sort, so degenerate levels
    keep the order of the input basis.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"operator must be square, got {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h), initial=0.0)))
    if not is_hermitian(h, atol * scale):
        raise ValueError("operator is not Hermitian")
    off = h - np.diag(np.diag(h))
    if not np.any(off):
        d = np.diag(h).real
        order = np.argsort(d, kind="stable")
        return Spectrum(d[order].copy(), np.eye(h.shape[0], dtype=complex)[:, order])
    w, v = np.linalg.eigh(hermitize(h))
    return Spectrum(w, v)


def propagator(spec: Spectrum, t: float) -> np.ndarray:
    w, v = spec
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolve(h, t: float, rho, spectrum: Spectrum | None = None) -> np.ndarray:
    """U rho U^dagger with U = exp(-i h t)."""
    rho = as_matrix(rho)
    spec = spectrum if spectrum is not None else herm_eig(h)
    if spec.eigenvectors.shape[0] != rho.shape[0]:
        raise ValueError("Hamiltonian and state dimensions differ")
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    u = propagator(spec, t)
    return hermitize(u @ rho @ u.conj().T)


def evolve_many(spec: Spectrum, ts, rho) -> np.ndarray:
    """Evolve one state to every time in ``ts``; returns shape (len(ts), n, n).

    Works in the eigenbasis: rho_E(t)_jk = rho_E_jk exp(-i (w_j - w_k) t).
    """
    w, v = spec
    ts = np.asarray(ts, dtype=float)
    rho_e = v.conj().T @ np.asarray(rho, dtype=complex) @ v
    phase = np.exp(-1j * ts[:, None, None] * (w[:, None] - w[None, :])[None])
    return hermitize(v[None] @ (phase * rho_e[None]) @ v.conj().T[None])


def clamp_psd(rho, tol: float = CLAMP_TOL) -> np.ndarray:
    """Zero roundoff-negative eigenvalues (down to -tol) and renormalize.

    States without negative eigenvalues come back Hermitized but otherwise
    unchanged.
    """
    rho = hermitize(np.asarray(rho, dtype=complex))
    w, v = herm_eig(rho, atol=1e-9)
    if w[0] >= 0.0:
        return rho
    if w[0] < -tol:
        raise ValueError(f"state has eigenvalue {w[0]!r} below clamp tolerance")
    w = np.clip(w, 0.0, None)
    out = (v * w) @ v.conj().T
    return hermitize(out / np.trace(out).real)


def is_projector(p, atol: float = 1e-10) -> bool:
    p = np.asarray(p, dtype=complex)
    return (
        p.ndim == 2
        and p.shape[0] == p.shape[1]
        and is_hermitian(p, atol)
        and bool(np.max(np.abs(p @ p - p), initial=0.0) <= atol)
    )


def apply_projector(rho, p) -> tuple[float, np.ndarray | None]:
    """Projective update: (Tr[P rho P], P rho P / prob) or (prob, None) if prob is ~0."""
    rho = as_matrix(rho)
    p = as_matrix(p)
    if p.shape != rho.shape:
        raise ValueError(f"projector shape {p.shape} does not match state {rho.shape}")
    if not is_projector(p):
        raise ValueError("operator is not an orthogonal projector")
    out = p @ rho @ p
    prob = float(np.trace(out).real)
    if prob <= ZERO_PROB:
        return max(prob, 0.0), None
    return prob, hermitize(out / prob)


def ket(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())
