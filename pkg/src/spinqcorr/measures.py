"""Negativity, information deficit, trace-distance discord and local quantum uncertainty.

Each measure has a definitional implementation that works on any two-qubit
density matrix, and a closed form specialised to the XXZ X states (functions
suffixed ``_closed_xxz`` / ``_closed_x``).  The test-suite and ``spinqcorr
validate`` check one against the other.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .correlators import Correlators, Regime
from .errors import InvalidCorrelatorError, MinimizerError
from .linalg import (
    eigvalsh,
    eigvalsh_stack,
    entropy_stack,
    matrix_sqrt,
    partial_transpose_a,
    von_neumann_entropy,
)
from .states import MeasurementBasis, _measure_stack, density_matrix

log = logging.getLogger(__name__)

GRID_THETA = 64
GRID_PHI = 64
GOLDEN_WIDTH = 1e-8
MAX_ROUNDS = 6
LOG_ARG_TOL = 1e-12
BRANCH_CHECK_TOL = 1e-8

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_PAULI_A = tuple(np.kron(s, np.eye(2)) for s in _PAULI)


@dataclass(frozen=True)
class MeasureSet:
    negativity: float
    deficit: float
    tdd: float
    lqu: float

    def as_dict(self) -> dict:
        return asdict(self)

    def by_label(self, label: str) -> float:
        return getattr(self, LABELS[label])


LABELS = {"N": "negativity", "I": "deficit", "D": "tdd", "U": "lqu"}


@dataclass(frozen=True)
class MinimizerReport:
    best_value: float
    best_basis: MeasurementBasis
    evaluations: int
    grid_stage_value: float


# ---------------------------------------------------------------------------
# negativity

def negativity(rho) -> float:
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose."""
    w = eigvalsh(partial_transpose_a(density_matrix(rho)))
    return float(-np.sum(w[w < 0.0])) + 0.0  # no negative zero


def negativity_closed_xxz(c: Correlators) -> float:
    return max(0.0, abs(c.xx) / 2.0 - (1.0 + c.zz) / 4.0)


# ---------------------------------------------------------------------------
# minimisation over measurement bases

def _golden(f: Callable[[float], float], lo: float, hi: float, width: float):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = f(x1), f(x2)
    n = 2
    while b - a > width:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = f(x2)
        n += 1
    return (x1, f1, n) if f1 <= f2 else (x2, f2, n)


def minimize_over_bases(objective: Callable, *, vectorized: bool = False) -> MinimizerReport:
    """Minimise ``objective(theta, phi)`` over measurement bases.

    Stage one evaluates a 64 x 64 grid on [0, pi] x [0, 2 pi).  Stage two runs
    coordinate-wise golden-section searches, alternating theta and phi, inside
    the neighbouring grid cells of the best grid point until neither coordinate
    improves.  With ``vectorized=True`` the objective receives broadcastable
    arrays during the grid stage.
    """
    thetas = np.linspace(0.0, math.pi, GRID_THETA)
    phis = np.arange(GRID_PHI) * (2.0 * math.pi / GRID_PHI)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    if vectorized:
        values = np.asarray(objective(tt, pp), dtype=float)
    else:
        values = np.array([[objective(t, p) for p in phis] for t in thetas], dtype=float)
    if not np.all(np.isfinite(values)):
        i, j = np.argwhere(~np.isfinite(values))[0]
        raise MinimizerError(f"objective is not finite at theta={thetas[i]!r}, phi={phis[j]!r}")
    evaluations = values.size
    i, j = np.unravel_index(int(np.argmin(values)), values.shape)
    grid_value = float(values[i, j])
    theta, phi, best = float(thetas[i]), float(phis[j]), grid_value

    def scalar(t, p):
        v = objective(t, p % (2.0 * math.pi))
        v = float(v)
        if not math.isfinite(v):
            raise MinimizerError(f"objective is not finite at theta={t!r}, phi={p!r}")
        return v

    d_theta = thetas[1] - thetas[0]
    d_phi = phis[1] - phis[0]
    for _ in range(MAX_ROUNDS):
        improved = False
        lo, hi = max(0.0, theta - d_theta), min(math.pi, theta + d_theta)
        t_new, v, n = _golden(lambda t: scalar(t, phi), lo, hi, GOLDEN_WIDTH)
        evaluations += n
        if v < best:
            improved = best - v > 1e-15
            theta, best = t_new, v
        p_new, v, n = _golden(lambda p: scalar(theta, p), phi - d_phi, phi + d_phi, GOLDEN_WIDTH)
        evaluations += n
        if v < best:
            improved = improved or best - v > 1e-15
            phi, best = p_new % (2.0 * math.pi), v
        if not improved:
            break
    return MinimizerReport(best, MeasurementBasis.canonical(theta, phi), evaluations, grid_value)


# ---------------------------------------------------------------------------
# information deficit

def deficit_report(rho) -> MinimizerReport:
    m = density_matrix(rho)
    s0 = von_neumann_entropy(m)

    def objective(theta, phi):
        out = entropy_stack(_measure_stack(m, theta, phi)) - s0
        return out if np.ndim(out) else float(out)

    rep = minimize_over_bases(objective, vectorized=True)
    return _clip_report(rep)


def information_deficit(rho) -> float:
    """Minimal entropy increase (bits) from a projective measurement on qubit A."""
    return deficit_report(rho).best_value


def _xlog2x(x: float) -> float:
    if x < -LOG_ARG_TOL:
        raise InvalidCorrelatorError(f"logarithm of negative argument {x!r}")
    if x <= 0.0:
        return 0.0
    return x * math.log2(x)


def deficit_branch_x(zz: float, xx: float) -> float:
    """Deficit for a measurement along x (theta = pi/4, phi = 0)."""
    total = 2.0 * _xlog2x(1.0 + zz)
    for sgn in (1.0, -1.0):
        total -= 2.0 * _xlog2x(1.0 + sgn * xx) - _xlog2x(1.0 - zz + sgn * 2.0 * xx)
    return total / 4.0


def deficit_branch_z(zz: float, xx: float) -> float:
    """Deficit for a measurement along z (theta = 0)."""
    total = -2.0 * _xlog2x(1.0 - zz)
    for sgn in (1.0, -1.0):
        total += _xlog2x(1.0 - zz + sgn * 2.0 * xx)
    return total / 4.0


def deficit_closed_xxz(c: Correlators, *, verify: bool = False) -> float:
    """Closed-form deficit, x-measurement branch in the planar regime, z elsewhere.

    With ``verify=True`` the full minimiser is run as well and any disagreement
    above 1e-8 is logged.
    """
    if c.regime is Regime.CRITICAL:
        value = deficit_branch_x(c.zz, c.xx)
    else:
        value = deficit_branch_z(c.zz, c.xx)
    value = max(value, 0.0)
    if verify:
        from .states import xxz_state

        ref = information_deficit(xxz_state(c))
        if abs(ref - value) > BRANCH_CHECK_TOL:
            log.warning("deficit branch disagrees with minimiser at delta=%r r=%d: %.3e",
                        c.delta, c.r, ref - value)
    return value


# ---------------------------------------------------------------------------
# trace-distance discord

def tdd_report(rho) -> MinimizerReport:
    m = density_matrix(rho)

    def objective(theta, phi):
        diff = m - _measure_stack(m, theta, phi)
        out = 0.5 * np.sum(np.abs(eigvalsh_stack(diff)), axis=-1)
        return out if np.ndim(out) else float(out)

    return _clip_report(minimize_over_bases(objective, vectorized=True))


def trace_distance_discord(rho) -> float:
    return tdd_report(rho).best_value


def tdd_closed_x(c: Correlators) -> float:
    return abs(c.xx) / 2.0


def _clip_report(rep: MinimizerReport) -> MinimizerReport:
    # measures are non-negative; rounding can leave a -1e-16
    if rep.best_value < 0.0:
        rep = MinimizerReport(0.0, rep.best_basis, rep.evaluations, max(rep.grid_stage_value, 0.0))
    return rep


# ---------------------------------------------------------------------------
# local quantum uncertainty

def lqu_matrix(rho) -> np.ndarray:
    """The 3x3 matrix W_uv = Tr[sqrt(rho) (s_u x 1) sqrt(rho) (s_v x 1)]."""
    root = matrix_sqrt(density_matrix(rho))
    sandwiched = [root @ s @ root for s in _PAULI_A]
    w = np.empty((3, 3))
    for u in range(3):
        for v in range(3):
            w[u, v] = np.trace(sandwiched[u] @ _PAULI_A[v]).real
    return 0.5 * (w + w.T)


def lqu(rho) -> float:
    w = eigvalsh(lqu_matrix(rho))
    return float(min(max(1.0 - w[-1], 0.0), 1.0))


def _sqrt_checked(x: float) -> float:
    if x < -LOG_ARG_TOL:
        raise InvalidCorrelatorError(f"negative radicand {x!r}")
    return math.sqrt(max(x, 0.0))


def lqu_closed_xxz(c: Correlators) -> float:
    """Closed-form LQU with the largest eigenvalue of W normalised by 1/2."""
    zz, xx = c.zz, c.xx
    if c.regime is Regime.CRITICAL:
        lam = _sqrt_checked(1.0 + zz) * (
            _sqrt_checked(1.0 - zz + 2.0 * xx) + _sqrt_checked(1.0 - zz - 2.0 * xx)
        ) / 2.0
    else:
        lam = (1.0 + zz + _sqrt_checked((1.0 - zz) ** 2 - 4.0 * xx * xx)) / 2.0
    return min(max(1.0 - lam, 0.0), 1.0)


# ---------------------------------------------------------------------------
# bundles

def definitional_measures(rho) -> MeasureSet:
    return MeasureSet(
        negativity(rho),
        information_deficit(rho),
        trace_distance_discord(rho),
        lqu(rho),
    )


def closed_measures_xxz(c: Correlators) -> MeasureSet:
    return MeasureSet(
        negativity_closed_xxz(c),
        deficit_closed_xxz(c),
        tdd_closed_x(c),
        lqu_closed_xxz(c),
    )
