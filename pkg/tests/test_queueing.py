from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cellmatch.queueing import (UNSTABLE, QueueInput, des_oracle, md1_delay, priority_delay,
                                priority_delays, uniform_delays, validate_against_oracle)


def test_md1_example():
    assert md1_delay(1000.0, 2000.0) == pytest.approx(2.5e-4, rel=1e-12)


def test_md1_unstable_sentinel():
    assert md1_delay(2000.0, 2000.0) == UNSTABLE
    assert md1_delay(3000.0, 2000.0) == UNSTABLE
    with pytest.raises(ValueError):
        md1_delay(1.0, 0.0)


@given(st.floats(1.0, 1e5), st.floats(0.0, 0.999))
def test_md1_equals_utilisation_form(mu, rho):
    lam = rho * mu
    assert md1_delay(lam, mu) == pytest.approx(rho / (2 * mu * (1 - rho)), rel=1e-9, abs=1e-300)


@given(st.floats(1.0, 1e5), st.floats(0.0, 0.98), st.floats(1e-4, 0.01))
def test_md1_increasing_in_load(mu, rho, drho):
    assert md1_delay((rho + drho) * mu, mu) > md1_delay(rho * mu, mu)


def test_single_class_reduces_to_fifo():
    for mu, lam in ((2000.0, 1000.0), (5.0, 4.9), (1e4, 1.0)):
        d = priority_delays(mu, [lam])[0]
        assert d == pytest.approx(md1_delay(lam, mu) + 1.0 / mu, rel=1e-14)


def _cobham(mu, lams, k):
    # exact rational arithmetic, independent of the vectorised code
    mu = Fraction(mu)
    lams = [Fraction(x) for x in lams]
    w0 = sum(lams) / (2 * mu * mu)
    s_k = sum(lams[:k]) / mu
    s_prev = sum(lams[:k - 1]) / mu
    return w0 / ((1 - s_prev) * (1 - s_k)) + 1 / mu


def test_two_class_hand_values():
    q = QueueInput(2000.0, ((1, 500.0), (2, 500.0)))
    assert priority_delay(q, 1) == pytest.approx(float(Fraction(1, 1500)), rel=1e-14)
    assert priority_delay(q, 2) == pytest.approx(float(Fraction(1, 1200)), rel=1e-14)


@pytest.mark.parametrize("mu,lams", [(2000, [50, 32, 12]), (100, [10, 30, 45]), (7, [1, 2])])
def test_priority_matches_rational_oracle(mu, lams):
    d = priority_delays(float(mu), lams)
    for k in range(1, len(lams) + 1):
        assert d[k - 1] == pytest.approx(float(_cobham(mu, lams, k)), rel=1e-13)


def test_initial_delay_is_additive():
    d0 = priority_delays(100.0, [10.0, 20.0])
    d1 = priority_delays(100.0, [10.0, 20.0], initial_delay=0.25)
    np.testing.assert_allclose(d1 - d0, 0.25)


def test_saturated_classes_unstable():
    d = priority_delays(100.0, [60.0, 50.0])
    assert np.isfinite(d[0]) and d[1] == UNSTABLE


def test_ranks_need_not_be_contiguous():
    q = QueueInput(100.0, ((3, 10.0), (7, 20.0)))
    assert priority_delay(q, 3) == pytest.approx(priority_delays(100.0, [10.0, 20.0])[0])
    with pytest.raises(KeyError):
        priority_delay(q, 1)


def test_queue_input_validation():
    with pytest.raises(ValueError):
        QueueInput(0.0, ((1, 1.0),))
    with pytest.raises(ValueError):
        QueueInput(1.0, ((1, 1.0), (1, 2.0)))


rates = st.lists(st.floats(0.0, 30.0), min_size=1, max_size=5)


@given(rates)
def test_higher_priority_never_slower(lams):
    d = priority_delays(200.0, lams)
    finite = d[np.isfinite(d)]
    assert np.all(np.diff(finite) >= -1e-15)


@given(rates, st.integers(0, 4), st.floats(0.1, 10.0))
def test_extra_load_never_helps(lams, idx, extra):
    idx = idx % len(lams)
    more = list(lams)
    more[idx] += extra
    a, b = priority_delays(200.0, lams), priority_delays(200.0, more)
    assert np.all(b >= a - 1e-15)


@given(st.floats(10.0, 1e4), st.floats(0.0, 0.99))
def test_uniform_delays_broadcast(mu, rho):
    d = uniform_delays(mu, rho * mu, 3)
    assert d.shape == (3,)
    assert np.all(d == d[0])
    assert d[0] == pytest.approx(md1_delay(rho * mu, mu) + 1.0 / mu)


def test_simulator_fifo_and_priority():
    rng = np.random.default_rng(5)
    mu = 1000.0
    sim = des_oracle(QueueInput(mu, ((1, 600.0),)), 200_000, rng)[1]
    assert sim.mean_wait == pytest.approx(md1_delay(600.0, mu), rel=0.05)
    q = QueueInput(mu, ((1, 300.0), (2, 300.0)))
    sim = des_oracle(q, 200_000, rng)
    for k in (1, 2):
        assert sim[k].mean_sojourn == pytest.approx(priority_delay(q, k), rel=0.05)


def test_simulator_edge_cases():
    rng = np.random.default_rng(0)
    assert des_oracle(QueueInput(10.0, ((1, 0.0),)), 100, rng) == {}
    with pytest.raises(ValueError):
        des_oracle(QueueInput(10.0, ((1, 10.0),)), 100, rng)


def test_validation_report_small():
    checks = validate_against_oracle(packets=100_000, seed=1, loads=(0.5,))
    assert len(checks) == 5
    assert all(c.ok for c in checks), [(c.label, c.rank, c.rel_error) for c in checks]
