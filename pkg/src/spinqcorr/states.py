"""Two-qubit X states and the local projective measurement channel on qubit A.

Basis ordering is ``|00>, |01>, |10>, |11>`` with qubit A first; for the XXZ
chain ``0`` is spin up, for the LMG pair ``0`` is an empty mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlators import Correlators
from .errors import DomainError, InvalidCorrelatorError, InvalidStateError
from .linalg import as_hermitian

TRACE_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class XState:
    """Density matrix with support on the diagonal and anti-diagonal only.

    ``z`` is the inner coherence rho[1, 2] and ``w`` the outer coherence
    rho[0, 3].
    """

    a: float
    b: float
    c: float
    d: float
    z: complex = 0.0
    w: complex = 0.0

    def __post_init__(self):
        diag = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(x) for x in diag) or not all(
            math.isfinite(abs(x)) for x in (self.z, self.w)
        ):
            raise InvalidStateError("X state has non-finite entries")
        if abs(sum(diag) - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"X state trace is {sum(diag)!r}")
        if min(diag) < -PSD_TOL:
            raise InvalidStateError(f"negative population {min(diag)!r}")
        if abs(self.z) > math.sqrt(max(self.b, 0.0) * max(self.c, 0.0)) + PSD_TOL:
            raise InvalidStateError(f"|z|={abs(self.z)!r} exceeds sqrt(bc)")
        if abs(self.w) > math.sqrt(max(self.a, 0.0) * max(self.d, 0.0)) + PSD_TOL:
            raise InvalidStateError(f"|w|={abs(self.w)!r} exceeds sqrt(ad)")

    def matrix(self) -> np.ndarray:
        m = np.diag(np.array([self.a, self.b, self.c, self.d], dtype=complex))
        m[1, 2] = self.z
        m[2, 1] = np.conj(self.z)
        m[0, 3] = self.w
        m[3, 0] = np.conj(self.w)
        return m


@dataclass(frozen=True)
class MeasurementBasis:
    """Angles of the rank-1 projective measurement on qubit A.

    ``|0'> = cos(theta)|0> + e^{i phi} sin(theta)|1>`` and
    ``|1'> = -e^{-i phi} sin(theta)|0> + cos(theta)|1>``.
    """

    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi + 1e-12):
            raise DomainError(f"theta={self.theta!r} outside [0, pi]")
        if not (0.0 <= self.phi < 2 * math.pi + 1e-12):
            raise DomainError(f"phi={self.phi!r} outside [0, 2 pi)")

    @classmethod
    def canonical(cls, theta: float, phi: float) -> "MeasurementBasis":
        """Normalise angles; (theta, phi) and (pi - theta, phi + pi) give the same projectors."""
        theta = min(max(theta, 0.0), math.pi)
        phi = phi % (2 * math.pi)
        if theta > math.pi / 2:
            theta = math.pi - theta
            phi = (phi + math.pi) % (2 * math.pi)
        return cls(theta, phi)

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return basis_vectors(self.theta, self.phi)

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        return basis_projectors(self.theta, self.phi)


def basis_vectors(theta, phi):
    """Vectors of the measurement basis; broadcasts over array-valued angles."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ct, st = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    omega0 = np.stack([ct + 0j, e * st], axis=-1)
    omega1 = np.stack([-np.conj(e) * st, ct + 0j], axis=-1)
    return omega0, omega1


def basis_projectors(theta, phi):
    o0, o1 = basis_vectors(theta, phi)
    p0 = o0[..., :, None] * np.conj(o0[..., None, :])
    p1 = o1[..., :, None] * np.conj(o1[..., None, :])
    return p0, p1


def xxz_state(c: Correlators) -> XState:
    """Reduced density matrix of two chain sites from their correlators."""
    a = (1.0 + c.zz) / 4.0
    b = (1.0 - c.zz) / 4.0
    z = c.xx / 2.0
    if a < -PSD_TOL or b < -PSD_TOL or abs(z) > b + PSD_TOL:
        raise InvalidCorrelatorError(
            f"correlators at delta={c.delta!r}, r={c.r} give a non-positive state "
            f"(zz={c.zz!r}, xx={c.xx!r})"
        )
    return XState(a, b, b, a, z, 0.0)


def lmg_alpha(lam: float) -> float:
    """Hartree-Fock angle with cos(2 alpha) = min(lambda, 1); alpha = 0 for lambda >= 1."""
    if not lam >= 0:
        raise DomainError(f"lambda must be non-negative, got {lam!r}")
    return 0.5 * math.acos(min(lam, 1.0))


def lmg_pair_state(lam: float, same_mode: bool = True) -> XState:
    """Two-mode state of modes (+m) and (-n) in the HF ground state.

    ``same_mode`` selects m = n, the only case with correlations.
    """
    alpha = lmg_alpha(lam)
    cos2 = (1.0 + min(lam, 1.0)) / 2.0  # cos^2(alpha)
    sin2 = 1.0 - cos2
    if same_mode:
        return XState(0.0, cos2, sin2, 0.0, math.sin(alpha) * math.cos(alpha), 0.0)
    return XState(sin2 * cos2, cos2 * cos2, sin2 * sin2, sin2 * cos2, 0.0, 0.0)


def density_matrix(rho) -> np.ndarray:
    if isinstance(rho, XState):
        return rho.matrix()
    m = as_hermitian(rho)
    if m.shape != (4, 4):
        raise DomainError(f"expected a two-qubit operator, got shape {m.shape}")
    return m


def project_measure_a(rho, basis: MeasurementBasis) -> np.ndarray:
    """Post-measurement state sum_j (P_j x I) rho (P_j x I)."""
    return _measure_stack(density_matrix(rho), basis.theta, basis.phi)


def _measure_stack(m: np.ndarray, theta, phi) -> np.ndarray:
    # Works on a single state and on arrays of angles alike.
    p0, p1 = basis_projectors(theta, phi)
    eye = np.eye(2)
    out = 0
    for p in (p0, p1):
        big = np.einsum("...ij,kl->...ikjl", p, eye).reshape(p.shape[:-2] + (4, 4))
        out = out + big @ m @ big
    return out
