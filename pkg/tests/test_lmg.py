import math

import numpy as np
import pytest

from spinqcorr.errors import DomainError
from spinqcorr.lmg import (
    binary_entropy,
    lmg_closed_measures,
    lmg_deficit_atanh,
    lmg_lqu_published,
    lmg_validate,
)
from spinqcorr.measures import definitional_measures
from spinqcorr.states import lmg_pair_state


def test_closed_form_examples():
    m0 = lmg_closed_measures(0.0)
    assert (m0.negativity, m0.tdd, m0.deficit, m0.lqu) == pytest.approx((0.5, 0.5, 1.0, 1.0))
    m6 = lmg_closed_measures(0.6)
    assert m6.negativity == pytest.approx(0.4) and m6.tdd == pytest.approx(0.4)
    assert m6.deficit == pytest.approx(1 - (1.6 * math.log2(1.6) + 0.4 * math.log2(0.4)) / 2, abs=1e-12)
    assert m6.deficit == pytest.approx(0.722, abs=1e-3)
    assert m6.lqu == pytest.approx(0.64)


def test_vanishes_beyond_transition():
    for lam in (1.0, 1.5, 2.0, 10.0):
        assert max(lmg_closed_measures(lam).as_dict().values()) == 0.0


def test_deficit_limit_at_transition():
    assert lmg_closed_measures(1.0 - 1e-9).deficit < 1e-7


def test_deficit_is_binary_entropy():
    for lam in np.linspace(0.0, 0.999, 50):
        p = (1 + lam) / 2
        ref = -p * math.log2(p) - (1 - p) * math.log2(1 - p)
        assert lmg_closed_measures(lam).deficit == pytest.approx(ref, abs=1e-12)
        assert lmg_deficit_atanh(lam) == pytest.approx(ref, abs=1e-12)
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0


def test_monotone_on_unit_interval():
    grid = np.linspace(0.0, 1.0, 101)
    for key in ("negativity", "deficit", "tdd", "lqu"):
        vals = [getattr(lmg_closed_measures(lam), key) for lam in grid]
        assert np.all(np.diff(vals) <= 1e-15), key


@pytest.mark.parametrize("lam", [round(0.1 * k, 1) for k in range(10)])
def test_validate_agreement(lam):
    point = lmg_validate(lam)
    res = point.residuals()
    assert max(res["negativity"], res["deficit"], res["tdd"]) <= 1e-8
    assert math.cos(2 * point.alpha) == pytest.approx(lam, abs=1e-12)


def test_validate_negativity_at_point_three():
    point = lmg_validate(0.3)
    assert point.definitional.negativity == pytest.approx(math.sqrt(0.91) / 2, abs=1e-8)


@pytest.mark.parametrize("lam", [1.0, 1.5, 2.0])
def test_polarized_definitional_zero(lam):
    point = lmg_validate(lam)
    assert max(point.definitional.as_dict().values()) <= 1e-10
    assert not point.lqu_finding


def test_dual_lqu_report():
    point = lmg_validate(0.6)
    assert point.definitional.lqu == pytest.approx(0.64, abs=1e-8)
    assert point.lqu_published == pytest.approx(0.4)
    assert point.lqu_finding
    assert not lmg_validate(0.0).lqu_finding


def test_distinct_modes_uncorrelated():
    for lam in (0.0, 0.35, 0.8, 1.4):
        m = definitional_measures(lmg_pair_state(lam, same_mode=False))
        assert max(m.as_dict().values()) <= 1e-10


def test_negative_lambda_rejected():
    with pytest.raises(DomainError):
        lmg_closed_measures(-0.01)
    with pytest.raises(DomainError):
        lmg_lqu_published(-1.0)
