"""Correlations of the LMG Hartree-Fock pair state.

For paired modes (+m, -m) the state is pure, so closed forms follow from the
reduced populations (1 +- lambda)/2.  The local quantum uncertainty is reported
twice: ``1 - lambda**2`` from the W-matrix definition and the published
``1 - lambda``.  They agree only at lambda in {0, 1}; :func:`lmg_validate`
surfaces the difference as a finding rather than an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError
from .measures import MeasureSet, definitional_measures
from .states import lmg_alpha, lmg_pair_state

AGREEMENT_TOL = 1e-8


def binary_entropy(p: float) -> float:
    h = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            h -= q * math.log2(q)
    return h


def lmg_closed_measures(lam: float) -> MeasureSet:
    """Closed-form measures for the paired-mode state.

    ``lqu`` here is the definition-consistent ``1 - lambda**2``; see
    :func:`lmg_lqu_published` for the other expression.
    """
    if not lam >= 0:
        raise DomainError(f"lambda must be non-negative, got {lam!r}")
    if lam >= 1.0:
        return MeasureSet(0.0, 0.0, 0.0, 0.0)
    amp = 0.5 * math.sqrt(1.0 - lam * lam)
    return MeasureSet(amp, binary_entropy((1.0 + lam) / 2.0), amp, 1.0 - lam * lam)


def lmg_deficit_atanh(lam: float) -> float:
    """The deficit written with atanh, kept to check the entropy form against."""
    if lam >= 1.0:
        return 0.0
    return -(math.log2((1.0 - lam) / 4.0) + math.log2(1.0 + lam)) / 2.0 - lam * math.atanh(lam) / math.log(2.0)


def lmg_lqu_published(lam: float) -> float:
    if not lam >= 0:
        raise DomainError(f"lambda must be non-negative, got {lam!r}")
    return max(0.0, 1.0 - lam)


@dataclass(frozen=True)
class LmgPoint:
    lam: float
    alpha: float
    closed: MeasureSet
    definitional: MeasureSet
    lqu_published: float

    @property
    def lqu_finding(self) -> bool:
        """True when the published LQU differs from the W-matrix value."""
        return abs(self.lqu_published - self.definitional.lqu) > AGREEMENT_TOL

    def residuals(self) -> dict:
        return {
            "negativity": abs(self.closed.negativity - self.definitional.negativity),
            "deficit": abs(self.closed.deficit - self.definitional.deficit),
            "tdd": abs(self.closed.tdd - self.definitional.tdd),
            "lqu": abs(self.closed.lqu - self.definitional.lqu),
        }


def lmg_validate(lam: float) -> LmgPoint:
    """Run the paired state through the definitional pipeline and compare.

    Negativity, deficit and discord must agree within 1e-8; the two LQU values
    are recorded without being compared.
    """
    point = LmgPoint(
        lam,
        lmg_alpha(lam),
        lmg_closed_measures(lam),
        definitional_measures(lmg_pair_state(lam, same_mode=True)),
        lmg_lqu_published(lam),
    )
    res = point.residuals()
    bad = {k: v for k, v in res.items() if k != "lqu" and v > AGREEMENT_TOL}
    if bad:
        raise ValidationError(f"LMG closed forms disagree at lambda={lam!r}", bad)
    return point
