"""Dense Hermitian linear algebra for the 2x2, 3x3 and 4x4 matrices used here.

Matrices are plain ``numpy`` arrays.  Every public function validates
Hermiticity before doing any work, so a transcription error upstream surfaces
as a :class:`~spinqcorr.errors.HermiticityError` instead of a silently complex
spectrum.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionError, HermiticityError, InvalidStateError

HERMITIAN_TOL = 1e-12
CLAMP_TOL = 1e-10
ENTROPY_CUTOFF = 1e-14
MAX_DIM = 4
RANK_TOL = 16 * float(np.finfo(float).eps)
_MAX_SWEEPS = 60


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    """Real eigenvalues in ascending order."""
    eigenvectors: np.ndarray
    """Unitary matrix whose columns are the matching eigenvectors."""

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_hermitian(m, *, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``m`` as a complex square array, rejecting non-Hermitian input."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not 2 <= a.shape[0] <= MAX_DIM:
        raise DimensionError(f"dimension {a.shape[0]} outside supported range 2..{MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise InvalidStateError("matrix has non-finite entries")
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > tol:
        raise HermiticityError(asym)
    return 0.5 * (a + a.conj().T)


def _jacobi_single(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Same rotations as the batched version, on Python scalars: for one 4x4
    # matrix this is an order of magnitude faster than per-rotation numpy calls.
    n = m.shape[0]
    a = [[complex(x) for x in row] for row in m]
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    scale = max(max(abs(x) for x in row) for row in a) or 1e-300
    for _ in range(_MAX_SWEEPS):
        off = sum(abs(a[p][q]) ** 2 for p in range(n) for q in range(p + 1, n)) ** 0.5
        if off <= 1e-17 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                r = abs(apq)
                if r <= 1e-18 * scale:
                    continue
                ph = (apq / r).conjugate()
                tau = (a[q][q].real - a[p][p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + (1.0 + tau * tau) ** 0.5)
                c = 1.0 / (1.0 + t * t) ** 0.5
                s = t * c
                gqp, gqq = -s * ph, c * ph
                for row in a:
                    xp, xq = row[p], row[q]
                    row[p] = xp * c + xq * gqp
                    row[q] = xp * s + xq * gqq
                rp, rq = a[p], a[q]
                cgqp, cgqq = gqp.conjugate(), gqq.conjugate()
                a[p] = [c * x + cgqp * y for x, y in zip(rp, rq)]
                a[q] = [s * x + cgqq * y for x, y in zip(rp, rq)]
                a[p][q] = a[q][p] = 0j
                for row in v:
                    xp, xq = row[p], row[q]
                    row[p] = xp * c + xq * gqp
                    row[q] = xp * s + xq * gqq
    w = np.array([a[i][i].real for i in range(n)])
    order = np.argsort(w, kind="stable")
    return w[order], np.array(v, dtype=complex)[:, order]


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Cyclic complex Jacobi over a stack of matrices (..., n, n).  Each
    # rotation removes the phase of a[p, q] and then applies the classical
    # real rotation; the (p, q) order is fixed.
    if np.ndim(a) == 2:
        return _jacobi_single(np.asarray(a))
    a = np.array(a, dtype=complex)
    n = a.shape[-1]
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    scale = np.maximum(np.max(np.abs(a), axis=(-2, -1)), 1e-300)
    iu = np.triu_indices(n, 1)
    for _ in range(_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a[..., iu[0], iu[1]]) ** 2, axis=-1))
        if np.all(off <= 1e-17 * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[..., p, q]
                r = np.abs(apq)
                active = r > 1e-18 * scale
                if not np.any(active):
                    continue
                safe_r = np.where(active, r, 1.0)
                phase = np.where(active, apq / safe_r, 1.0)
                tau = (a[..., q, q].real - a[..., p, p].real) / (2.0 * safe_r)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                gqp = -s * phase.conjugate()
                gqq = c * phase.conjugate()
                col_p = a[..., :, p].copy()
                col_q = a[..., :, q].copy()
                a[..., :, p] = col_p * c[..., None] + col_q * gqp[..., None]
                a[..., :, q] = col_p * s[..., None] + col_q * gqq[..., None]
                row_p = a[..., p, :].copy()
                row_q = a[..., q, :].copy()
                a[..., p, :] = c[..., None] * row_p + np.conj(gqp)[..., None] * row_q
                a[..., q, :] = s[..., None] * row_p + np.conj(gqq)[..., None] * row_q
                a[..., p, q] = np.where(active, 0.0, a[..., p, q])
                a[..., q, p] = np.where(active, 0.0, a[..., q, p])
                vp = v[..., :, p].copy()
                vq = v[..., :, q].copy()
                v[..., :, p] = vp * c[..., None] + vq * gqp[..., None]
                v[..., :, q] = vp * s[..., None] + vq * gqq[..., None]
    w = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return w, v


def eigh(m) -> SpectralDecomposition:
    """Eigendecomposition of a small Hermitian matrix by cyclic Jacobi sweeps.

    Eigenvalues come back ascending; the sweep order is fixed so repeated
    calls on the same input are bit-identical.
    """
    a = as_hermitian(m)
    w, v = _jacobi(a)
    return SpectralDecomposition(w, v)


def eigvalsh(m) -> np.ndarray:
    return eigh(m).eigenvalues


def _clamped_spectrum(m) -> SpectralDecomposition:
    dec = eigh(m)
    w = dec.eigenvalues
    if w[0] < -CLAMP_TOL:
        raise InvalidStateError(f"negative eigenvalue {w[0]:.3e} below clamp window -{CLAMP_TOL:g}")
    return SpectralDecomposition(np.clip(w, 0.0, None), dec.eigenvectors)


def matrix_sqrt(m) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-1e-10, 0)`` are clamped to zero; anything more negative
    is rejected with :class:`InvalidStateError`.
    """
    dec = _clamped_spectrum(m)
    w = dec.eigenvalues
    # eigenvalues at rounding level carry no information, but their square
    # roots (~1e-8) would; treat them as exact zeros
    w = np.where(w > RANK_TOL * max(float(w[-1]), 0.0), w, 0.0)
    v = dec.eigenvectors
    root = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def trace_norm(m) -> float:
    """Schatten one-norm, the sum of absolute eigenvalues."""
    return float(np.sum(np.abs(eigvalsh(m))))


def partial_transpose_a(m) -> np.ndarray:
    """Transpose the first qubit of a two-qubit operator.

    Entry ``(2i+j, 2k+l)`` of the result is entry ``(2k+j, 2i+l)`` of the input.
    """
    a = as_hermitian(m)
    if a.shape != (4, 4):
        raise DimensionError(f"partial transpose needs a 4x4 operator, got {a.shape}")
    return a.reshape(2, 2, 2, 2).transpose(2, 1, 0, 3).reshape(4, 4)


def von_neumann_entropy(m) -> float:
    """Entropy in bits, with the convention 0 log 0 = 0."""
    a = as_hermitian(m)
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > CLAMP_TOL:
        raise InvalidStateError(f"density matrix trace is {tr!r}, expected 1")
    w = _clamped_spectrum(a).eigenvalues
    w = w[w > ENTROPY_CUTOFF]
    return float(-np.sum(w * np.log2(w)))


def eigvalsh_stack(stack) -> np.ndarray:
    """Ascending eigenvalues for a stack of Hermitian matrices ``(..., n, n)``."""
    a = np.asarray(stack, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2] or not 2 <= a.shape[-1] <= MAX_DIM:
        raise DimensionError(f"expected a stack of square matrices, got shape {a.shape}")
    asym = float(np.max(np.abs(a - np.swapaxes(a.conj(), -1, -2)))) if a.size else 0.0
    if asym > HERMITIAN_TOL:
        raise HermiticityError(asym)
    return _jacobi(0.5 * (a + np.swapaxes(a.conj(), -1, -2)))[0]


def entropy_stack(stack) -> np.ndarray:
    """Von Neumann entropies (bits) of a stack of density matrices."""
    w = eigvalsh_stack(stack)
    if np.any(w[..., 0] < -CLAMP_TOL):
        raise InvalidStateError(f"negative eigenvalue {float(np.min(w)):.3e} in stack")
    w = np.where(w > ENTROPY_CUTOFF, w, 1.0)
    return -np.sum(w * np.log2(w), axis=-1)
