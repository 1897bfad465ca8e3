"""Ground-state two-site correlators of the infinite XXZ spin-1/2 chain.

``correlators(delta, r)`` returns ``<sz_i sz_{i+r}>`` and ``<sx_i sx_{i+r}>``
(Pauli normalisation) for ``r`` in {1, 2}.  The planar regime uses real-line
integrals in the variable ``phi = arccos(delta)/pi``, the Ising-like regime uses
integrals along ``Im x = 1/2`` in ``nu = arccosh(delta)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .quadrature import QuadratureSpec, integrate_even_realline, integrate_shifted_contour

ISOTROPIC_TOL = 1e-12
ISOTROPIC_R1 = (1.0 - 4.0 * math.log(2.0)) / 3.0
ISOTROPIC_R2 = 0.242719

# Offset used where the r=2 planar formulas have cancelling poles (delta = 0).
HALF_PHI_WINDOW = 1e-6
HALF_PHI_OFFSET = 1e-5
HALF_PHI_AGREEMENT = 1e-4


class Regime(str, enum.Enum):
    FERRO = "ferro"
    CRITICAL = "critical"
    ISOTROPIC = "isotropic"
    GAPPED = "gapped"
    # LMG sweeps reuse the record type; these tag the two sides of lambda = 1.
    LMG_PAIRED = "lmg-paired"
    LMG_POLARIZED = "lmg-polarized"


def classify(delta: float) -> Regime:
    if not math.isfinite(delta):
        raise DomainError(f"anisotropy must be finite, got {delta!r}")
    if delta <= -1.0:
        return Regime.FERRO
    if abs(delta - 1.0) <= ISOTROPIC_TOL:
        return Regime.ISOTROPIC
    if delta < 1.0:
        return Regime.CRITICAL
    return Regime.GAPPED


@dataclass(frozen=True)
class AuxiliaryParams:
    nu: float | None = None
    phi: float | None = None


def auxiliary_params(delta: float) -> AuxiliaryParams:
    regime = classify(delta)
    if regime is Regime.GAPPED:
        return AuxiliaryParams(nu=math.acosh(delta))
    if regime is Regime.CRITICAL:
        return AuxiliaryParams(phi=math.acos(delta) / math.pi)
    return AuxiliaryParams()


@dataclass(frozen=True)
class Correlators:
    zz: float
    xx: float
    r: int
    delta: float
    regime: Regime

    def __post_init__(self):
        if not (abs(self.zz) <= 1.0 + 1e-9 and abs(self.xx) <= 1.0 + 1e-9):
            raise DomainError(f"correlators out of range: zz={self.zz!r}, xx={self.xx!r}")


# ---------------------------------------------------------------------------
# overflow-safe building blocks (x > 0)

def _sech(y):
    e = np.exp(-np.abs(y))
    return 2.0 * e / (1.0 + e * e)


def _coth(x):
    return 1.0 / np.tanh(x)


def _sinh_ratio(a: float, x):
    """sinh(a x) / sinh(x) for 0 < a < 1 and x > 0."""
    return np.exp(-(1.0 - a) * x) * (-np.expm1(-2.0 * a * x)) / (-np.expm1(-2.0 * x))


def _planar_spec(phi: float, spec: QuadratureSpec) -> QuadratureSpec:
    # Integrands decay like x^3 exp(-2 min(phi, 1) x); stretch the cutoff so
    # the neglected tail stays below exp(-80).
    tail = max(spec.tail_cutoff, 40.0 / phi)
    return QuadratureSpec(spec.abs_tol, spec.rel_tol, tail, spec.singularity_window, spec.max_evaluations)


def _planar_r1(phi: float, spec: QuadratureSpec) -> tuple[float, float]:
    s = math.sin(math.pi * phi)
    c = math.cos(math.pi * phi)
    cot = c / s
    q = _planar_spec(phi, spec)

    def zz_integrand(x):
        a = x * _coth(x) * _sech(phi * x) ** 2
        b = _sinh_ratio(1.0 - phi, x) * _sech(phi * x)
        return -2.0 / math.pi**2 * a + 2.0 * cot / math.pi * b

    def xx_integrand(x):
        a = x * _coth(x) * _sech(phi * x) ** 2
        b = _sinh_ratio(1.0 - phi, x) * _sech(phi * x)
        return c / math.pi**2 * a - b / (math.pi * s)

    zz0 = -2.0 / math.pi**2 + 2.0 * cot / math.pi * (1.0 - phi)
    xx0 = c / math.pi**2 - (1.0 - phi) / (math.pi * s)
    zz = 1.0 + integrate_even_realline(zz_integrand, zz0, q)
    xx = integrate_even_realline(xx_integrand, xx0, q)
    return zz, xx


def _planar_r2_at(phi: float, spec: QuadratureSpec) -> tuple[float, float]:
    pi = math.pi
    s1 = math.sin(pi * phi)
    t1 = math.tan(pi * phi)
    c2 = math.cos(2 * pi * phi)
    s2 = math.sin(2 * pi * phi)
    q = _planar_spec(phi, spec)

    def parts(x):
        b = _sinh_ratio(1.0 - phi, x) * _sech(phi * x)
        a = _coth(x) * _sech(phi * x) ** 2
        return b, a

    def xx_integrand(x):
        b, a = parts(x)
        return (-b * (2.0 / (pi * s2) + 3.0 * c2 * t1 / pi**3 * x * x)
                + a * (c2 / pi**2 * x + s1 * s1 / pi**4 * x**3))

    def zz_integrand(x):
        b, a = parts(x)
        return (4.0 * b * (c2 / s2 / pi + 3.0 * t1 / (2.0 * pi**3) * x * x)
                - 4.0 * a * (x / (2.0 * pi**2) + s1 * s1 / (2.0 * pi**4) * x**3))

    # x * coth(x) -> 1 and sinh((1-phi)x)/sinh(x) -> 1-phi at the origin
    xx0 = -(1.0 - phi) * 2.0 / (pi * s2) + c2 / pi**2
    zz0 = 4.0 * (1.0 - phi) * c2 / s2 / pi - 2.0 / pi**2
    xx = integrate_even_realline(xx_integrand, xx0, q)
    zz = 1.0 + integrate_even_realline(zz_integrand, zz0, q)
    return zz, xx


def _planar_r2(phi: float, spec: QuadratureSpec) -> tuple[float, float]:
    if abs(phi - 0.5) >= HALF_PHI_WINDOW:
        return _planar_r2_at(phi, spec)
    lo = _planar_r2_at(0.5 - HALF_PHI_OFFSET, spec)
    hi = _planar_r2_at(0.5 + HALF_PHI_OFFSET, spec)
    gap = max(abs(lo[0] - hi[0]), abs(lo[1] - hi[1]))
    if gap > HALF_PHI_AGREEMENT:
        raise ArithmeticError(f"one-sided values around phi=1/2 disagree by {gap:.3e}")
    return 0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])


def _contour_spec(nu: float, spec: QuadratureSpec) -> QuadratureSpec:
    # Near the isotropic point the integrands are differences of terms of size
    # nu**-4; rounding limits the attainable absolute accuracy accordingly.
    floor = 1e-19 / nu**4
    if floor <= spec.abs_tol:
        return spec
    return QuadratureSpec(floor, spec.rel_tol, spec.tail_cutoff, spec.singularity_window, spec.max_evaluations)


def _contour_trig(nu: float, x):
    inv = 1.0 / np.sin(nu * x)
    return np.cos(nu * x) * inv, inv * inv  # cot, csc^2


def _gapped_r1(nu: float, spec: QuadratureSpec) -> tuple[float, float]:
    ch, sh, th = math.cosh(nu), math.sinh(nu), math.tanh(nu)

    def zz_integrand(x):
        cot, csc2 = _contour_trig(nu, x)
        return (cot / th - x * csc2) / np.sinh(math.pi * x)

    def xx_integrand(x):
        cot, csc2 = _contour_trig(nu, x)
        return (x * csc2 * ch - cot / sh) / np.sinh(math.pi * x)

    spec = _contour_spec(nu, spec)
    zz = 1.0 + 2.0 * integrate_shifted_contour(zz_integrand, spec)
    xx = integrate_shifted_contour(xx_integrand, spec)
    return zz, xx


def _gapped_r2(nu: float, spec: QuadratureSpec) -> tuple[float, float]:
    sh2 = math.sinh(nu) ** 2
    c2n = math.cosh(2 * nu)
    th = math.tanh(nu)
    s2n = math.sinh(2 * nu)
    t2n = math.tanh(2 * nu)

    def xx_integrand(x):
        cot, csc2 = _contour_trig(nu, x)
        body = (-x * csc2 * (3.0 * sh2 * csc2 + 1.0 - 3.0 * c2n)
                + cot * (3.0 * c2n * th * csc2 - 4.0 / s2n))
        return 0.5 * body / np.sinh(math.pi * x)

    def zz_integrand(x):
        cot, csc2 = _contour_trig(nu, x)
        body = (x * csc2 * (3.0 * sh2 * csc2 - 1.0 - c2n)
                - cot * (3.0 * th * csc2 - 4.0 / t2n))
        return body / np.sinh(math.pi * x)

    spec = _contour_spec(nu, spec)
    xx = integrate_shifted_contour(xx_integrand, spec)
    zz = 1.0 + integrate_shifted_contour(zz_integrand, spec)
    return zz, xx


DEFAULT_CORRELATOR_SPEC = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12)

@lru_cache(maxsize=16384)
def _cached(delta_key: float, r: int) -> Correlators:
    return evaluate_correlators(delta_key, r)


def evaluate_correlators(delta: float, r: int, spec: QuadratureSpec = DEFAULT_CORRELATOR_SPEC) -> Correlators:
    """Uncached evaluation; see :func:`correlators`."""
    if r not in (1, 2):
        raise DomainError(f"separation r must be 1 or 2, got {r!r}")
    regime = classify(delta)
    if regime is Regime.FERRO:
        zz, xx = 1.0, 0.0
    elif regime is Regime.ISOTROPIC:
        zz = xx = ISOTROPIC_R1 if r == 1 else ISOTROPIC_R2
    elif regime is Regime.CRITICAL:
        phi = math.acos(delta) / math.pi
        zz, xx = (_planar_r1 if r == 1 else _planar_r2)(phi, spec)
    else:
        nu = math.acosh(delta)
        zz, xx = (_gapped_r1 if r == 1 else _gapped_r2)(nu, spec)
    return Correlators(float(zz), float(xx), r, float(delta), regime)


def correlators(delta: float, r: int) -> Correlators:
    """Correlators at anisotropy ``delta`` and separation ``r``, memoised.

    The cache key rounds ``delta`` to 12 decimals.
    """
    key = round(float(delta), 12)
    if r not in (1, 2):
        raise DomainError(f"separation r must be 1 or 2, got {r!r}")
    # lru_cache tolerates concurrent writers; a race costs a duplicate evaluation
    return _cached(key, r)


def clear_cache() -> None:
    _cached.cache_clear()
