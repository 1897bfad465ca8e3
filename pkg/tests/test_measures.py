import logging
import math

import numpy as np
import pytest

from spinqcorr.correlators import ISOTROPIC_R1, ISOTROPIC_R2, Correlators, Regime, correlators
from spinqcorr.errors import InvalidCorrelatorError, MinimizerError
from spinqcorr.linalg import partial_transpose_a, trace_norm
from spinqcorr.measures import (
    closed_measures_xxz,
    deficit_branch_x,
    deficit_branch_z,
    deficit_closed_xxz,
    deficit_report,
    definitional_measures,
    information_deficit,
    lqu,
    lqu_closed_xxz,
    minimize_over_bases,
    negativity,
    negativity_closed_xxz,
    tdd_closed_x,
    trace_distance_discord,
)
from spinqcorr.states import xxz_state

from conftest import bell_state, random_density, random_unitary

LABELS = ("negativity", "deficit", "tdd", "lqu")


def test_bell_state_values():
    m = definitional_measures(bell_state())
    assert m.negativity == pytest.approx(0.5, abs=1e-12)
    assert m.deficit == pytest.approx(1.0, abs=1e-10)
    assert m.tdd == pytest.approx(0.5, abs=1e-9)
    assert m.lqu == pytest.approx(1.0, abs=1e-12)


def test_maximally_mixed_values():
    m = definitional_measures(np.eye(4) / 4)
    assert max(m.as_dict().values()) < 1e-12


def test_classical_diagonal_state():
    rho = np.diag([0.5, 0, 0, 0.5])
    assert trace_distance_discord(rho) < 1e-12
    assert lqu(rho) == pytest.approx(0.0, abs=1e-12)
    assert information_deficit(rho) < 1e-12


def test_negativity_equals_trace_norm_form(rng):
    for _ in range(100):
        rho = random_density(rng)
        assert negativity(rho) == pytest.approx((trace_norm(partial_transpose_a(rho)) - 1) / 2, abs=1e-10)


@pytest.mark.slow
def test_product_states_are_uncorrelated(rng):
    for _ in range(200):
        rho = np.kron(random_density(rng, 2), random_density(rng, 2))
        m = definitional_measures(rho)
        assert max(m.as_dict().values()) <= 1e-9


@pytest.mark.slow
def test_local_unitary_invariance(rng):
    rho = xxz_state(correlators(0.5, 1)).matrix()
    ref = definitional_measures(rho).as_dict()
    for _ in range(100):
        u = np.kron(random_unitary(rng), random_unitary(rng))
        m = definitional_measures(u @ rho @ u.conj().T).as_dict()
        for key in LABELS:
            assert abs(m[key] - ref[key]) <= 1e-7


# --- minimiser --------------------------------------------------------------

def test_minimizer_constant_objective():
    rep = minimize_over_bases(lambda t, p: 0.3)
    assert rep.best_value == 0.3 and rep.best_value <= rep.grid_stage_value + 1e-12


def test_minimizer_finds_off_grid_minimum():
    target = (0.123456789, 2.3456789)
    rep = minimize_over_bases(lambda t, p: (t - target[0]) ** 2 + (1 - math.cos(p - target[1])))
    assert rep.best_basis.theta == pytest.approx(target[0], abs=1e-6)
    assert rep.best_basis.phi == pytest.approx(target[1], abs=1e-6)
    assert rep.best_value <= rep.grid_stage_value


def test_minimizer_non_finite_names_basis():
    with pytest.raises(MinimizerError, match="theta="):
        minimize_over_bases(lambda t, p: float("nan") if t > 1.0 else 1.0)


def test_minimizer_is_deterministic():
    rho = xxz_state(correlators(0.3, 2))
    assert deficit_report(rho) == deficit_report(rho)


def test_critical_deficit_optimum_at_quarter_pi():
    rep = deficit_report(xxz_state(correlators(0.5, 1)))
    assert rep.best_basis.theta == pytest.approx(math.pi / 4, abs=1e-6)


def test_gapped_deficit_optimum_at_zero():
    rep = deficit_report(xxz_state(correlators(2.0, 1)))
    assert rep.best_basis.theta == pytest.approx(0.0, abs=1e-6)


# --- closed forms -----------------------------------------------------------

def test_negativity_closed_examples():
    assert negativity_closed_xxz(correlators(-0.2, 2)) == 0.0
    c = correlators(-0.7, 2)
    assert negativity_closed_xxz(c) > 0
    assert negativity_closed_xxz(c) == pytest.approx(negativity(xxz_state(c)), abs=1e-10)
    c = correlators(3.0, 1)
    assert negativity_closed_xxz(c) == pytest.approx(negativity(xxz_state(c)), abs=1e-10)
    assert negativity_closed_xxz(correlators(-2.0, 1)) == 0.0


def test_negativity_isotropic_value():
    # -(1 + 3 c)/4 with c = (1 - 4 ln 2)/3 gives ln 2 - 1/2
    c = correlators(1.0, 1)
    assert negativity_closed_xxz(c) == pytest.approx(math.log(2) - 0.5, abs=1e-14)
    assert negativity(xxz_state(c)) == pytest.approx(0.193147, abs=1e-6)


def test_deficit_branches_coincide_at_isotropic_point():
    for ref in (ISOTROPIC_R1, ISOTROPIC_R2):
        assert deficit_branch_x(ref, ref) == pytest.approx(deficit_branch_z(ref, ref), abs=1e-8)


def test_deficit_ferro_zero():
    assert deficit_closed_xxz(correlators(-3.0, 1)) == 0.0


def test_deficit_gapped_matches_minimiser():
    c = correlators(2.0, 1)
    assert deficit_closed_xxz(c) == pytest.approx(information_deficit(xxz_state(c)), abs=1e-8)


def test_deficit_verify_logs_wrong_branch(caplog):
    g = correlators(2.0, 1)
    mislabelled = Correlators(g.zz, g.xx, 1, 2.0, Regime.CRITICAL)
    with caplog.at_level(logging.WARNING, logger="spinqcorr.measures"):
        deficit_closed_xxz(mislabelled, verify=True)
    assert "disagrees" in caplog.text


def test_deficit_negative_log_argument():
    with pytest.raises(InvalidCorrelatorError):
        deficit_branch_z(0.5, 0.6)


def test_tdd_closed_examples():
    assert tdd_closed_x(correlators(-2.0, 1)) == 0.0
    assert tdd_closed_x(correlators(1.0, 1)) == pytest.approx(0.295432, abs=1e-6)
    assert tdd_closed_x(correlators(1.0, 2)) == pytest.approx(0.121360, abs=1e-6)
    c = correlators(0.5, 1)
    assert trace_distance_discord(xxz_state(c)) == pytest.approx(abs(c.xx) / 2, abs=1e-7)


def test_lqu_closed_examples():
    mixed = Correlators(0.0, 0.0, 1, 0.0, Regime.CRITICAL)
    assert lqu_closed_xxz(mixed) == pytest.approx(0.0, abs=1e-15)
    assert lqu_closed_xxz(correlators(-2.0, 1)) == 0.0
    c = correlators(0.5, 1)
    assert lqu_closed_xxz(c) == pytest.approx(lqu(xxz_state(c)), abs=1e-8)


def test_lqu_negative_radicand():
    with pytest.raises(InvalidCorrelatorError):
        lqu_closed_xxz(Correlators(0.5, 0.9, 1, 2.0, Regime.GAPPED))


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("delta", [-0.9, -0.5, -0.1, 0.3, 0.7, 1.0, 1.5, 2.5])
def test_closed_forms_match_definitions(delta, r):
    c = correlators(delta, r)
    closed = closed_measures_xxz(c).as_dict()
    ref = definitional_measures(xxz_state(c)).as_dict()
    for key in LABELS:
        assert abs(closed[key] - ref[key]) <= 1e-7, key


def test_measures_bounded_and_ordered():
    for delta in np.linspace(-0.99, 3.0, 30):
        m1 = closed_measures_xxz(correlators(delta, 1)).as_dict()
        m2 = closed_measures_xxz(correlators(delta, 2)).as_dict()
        for key in LABELS:
            assert 0.0 <= m1[key] <= 1.0 and 0.0 <= m2[key] <= 1.0
            assert m1[key] >= m2[key] - 1e-12, (delta, key)
