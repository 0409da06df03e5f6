"""Reward models, noise draws, oracle budgets/contract and ledger accounting."""

import math

import numpy as np
import pytest

from lipzoom.environment import (
    EnvironmentError_,
    NoiseKind,
    NoiseModel,
    OracleMode,
    QuantumOracleSim,
    RoundLedger,
    classical_sample,
    qmc1_budget,
    qmc2_budget,
    qmc_estimate,
    sine_model,
    triangle_model,
    twodim_model,
)
from lipzoom.geometry import Metric, MetricKind, lattice

SIGMA = math.sqrt(0.1)


def test_triangle_values():
    m = triangle_model()
    assert m.mu((1 / 3,)) == pytest.approx(0.9)
    assert m.mu((0.0,)) == pytest.approx(0.9 - 0.95 / 3)
    assert m.gap((1 / 3,)) == pytest.approx(0.0)


def test_sine_values():
    m = sine_model()
    assert m.mu((1 / 3,)) == pytest.approx(0.35)
    assert m.mu((0.0,)) == 0.0
    # raw dips negative near x=1; mu clips into [0,1]
    assert m.raw((1.0,)) < 0.0
    assert m.mu((1.0,)) == 0.0


def test_twodim_optimum_against_grid():
    m = twodim_model()
    assert m.mu(m.x_star) == pytest.approx(1.2 - 0.3 * math.hypot(0.8, 0.3))
    # brute-force confirmation that the first kink is the global optimum
    pts = lattice(2, 1e-3 * 4)  # 251x251 grid is plenty at this smoothness
    best = max(m.mu(tuple(p)) for p in pts)
    assert best <= m.mu_star + 1e-9


@pytest.mark.parametrize("factory,metric", [
    (triangle_model, Metric(MetricKind.ABSOLUTE, 1)),
    (sine_model, Metric(MetricKind.ABSOLUTE, 1)),
    (twodim_model, Metric(MetricKind.LINF, 2)),
])
def test_lipschitz_on_random_pairs(factory, metric):
    model = factory()
    rng = np.random.default_rng(3)
    for _ in range(300):
        a = tuple(rng.random(metric.dimension))
        b = tuple(rng.random(metric.dimension))
        lhs = abs(model.mu(a) - model.mu(b))
        assert lhs <= model.lipschitz_constant * metric.distance(a, b) + 1e-12


def test_mu_range():
    rng = np.random.default_rng(4)
    for model, d in [(triangle_model(), 1), (sine_model(), 1), (twodim_model(), 2)]:
        for _ in range(200):
            v = model.mu(tuple(rng.random(d)))
            assert 0.0 <= v <= 1.0


def test_qmc1_budget_examples():
    assert qmc1_budget(0.5, 0.05 / 1000, 2.0) == 40
    assert qmc1_budget(0.25, 0.05 / 1000, 2.0) == 80
    assert qmc1_budget(1.0, 1 / math.e, 2.0) == 2


def test_qmc2_budget_examples():
    assert qmc2_budget(0.25, SIGMA, 0.05 / 1000, 2.0) == 266
    # eps = 2*sigma: log2(8s/e) = 2, log2 log2 = 1, ln(1/delta) = 1
    assert qmc2_budget(2 * SIGMA, SIGMA, 1 / math.e, 2.0) == 3


def test_qmc2_budget_precondition():
    with pytest.raises(EnvironmentError_):
        qmc2_budget(4 * SIGMA, SIGMA, 0.05)


def test_budget_validation():
    with pytest.raises(EnvironmentError_):
        qmc1_budget(0.0, 0.05)
    with pytest.raises(EnvironmentError_):
        qmc1_budget(0.5, 1.5)
    with pytest.raises(EnvironmentError_):
        qmc2_budget(0.1, -1.0, 0.05)


def test_budgets_decrease_with_eps():
    prev1 = prev2 = None
    for k in range(1, 8):
        eps = 2.0 ** -k
        b1 = qmc1_budget(eps, 0.05)
        b2 = qmc2_budget(eps, SIGMA, 0.05)
        if prev1 is not None:
            assert b1 > prev1
            assert b2 > prev2
        prev1, prev2 = b1, b2


def test_bernoulli_sample_mean():
    model = triangle_model()
    noise = NoiseModel(NoiseKind.BERNOULLI)
    rng = np.random.default_rng(5)
    draws = [classical_sample(model, noise, (1 / 3,), rng) for _ in range(10_000)]
    assert set(draws) <= {0.0, 1.0}
    assert np.mean(draws) == pytest.approx(0.9, abs=0.01)


def test_gaussian_sample_variance():
    model = triangle_model()
    noise = NoiseModel(NoiseKind.GAUSSIAN, SIGMA)
    rng = np.random.default_rng(6)
    x = (0.0,)
    draws = np.array([classical_sample(model, noise, x, rng) for _ in range(10_000)])
    assert draws.mean() == pytest.approx(model.mu(x), abs=0.02)
    assert draws.var(ddof=1) == pytest.approx(0.1, abs=0.01)


def test_gaussian_noise_needs_sigma():
    with pytest.raises(EnvironmentError_):
        NoiseModel(NoiseKind.GAUSSIAN, 0.0)


def _fresh(T=10**9, ck=10**9):
    return RoundLedger(T, ck)


def test_oracle_contract_no_fault_always_within_eps():
    model = triangle_model()
    noise = NoiseModel(NoiseKind.BERNOULLI)
    oracle = QuantumOracleSim(OracleMode.CONTRACT, False, np.random.default_rng(7))
    mu = model.mu((0.5,))
    for _ in range(2_000):
        est, used, exhausted = qmc_estimate(
            oracle, model, noise, (0.5,), 0.1, 0.05, _fresh())
        assert not exhausted
        assert abs(est - mu) <= 0.1
        assert used == qmc1_budget(0.1, 0.05)


def test_oracle_contract_fault_rate():
    model = triangle_model()
    noise = NoiseModel(NoiseKind.BERNOULLI)
    oracle = QuantumOracleSim(OracleMode.CONTRACT, True, np.random.default_rng(8))
    mu = model.mu((0.5,))
    within = 0
    for _ in range(10_000):
        est, _, _ = qmc_estimate(oracle, model, noise, (0.5,), 0.1, 0.05, _fresh())
        if abs(est - mu) <= 0.1:
            within += 1
    assert within >= 9_400  # binomial 3-sigma slack below 0.95 * 10^4


def test_oracle_empirical_mode():
    model = triangle_model()
    noise = NoiseModel(NoiseKind.GAUSSIAN, SIGMA)
    oracle = QuantumOracleSim(OracleMode.EMPIRICAL, False, np.random.default_rng(9))
    est, used, _ = qmc_estimate(oracle, model, noise, (0.2,), 0.05, 0.05, _fresh())
    assert used == qmc1_budget(0.05, 0.05)
    # empirical mean of `used` draws carries no eps contract, only consistency
    assert abs(est - model.mu((0.2,))) < 0.2


def test_qmc2_variant_fallback():
    model = triangle_model()
    noise = NoiseModel(NoiseKind.GAUSSIAN, 0.05)
    oracle = QuantumOracleSim(OracleMode.CONTRACT, False, np.random.default_rng(10))
    # eps = 0.5 >= 4*sigma = 0.2: the bounded-variance guarantee is vacuous,
    # so the call charges the qmc1 budget instead
    _, used, _ = qmc_estimate(
        oracle, model, noise, (0.2,), 0.5, 0.05, _fresh(), variant="qmc2")
    assert used == qmc1_budget(0.5, 0.05)


def test_qmc2_variant_requires_gaussian():
    model = triangle_model()
    oracle = QuantumOracleSim(OracleMode.CONTRACT, False, np.random.default_rng(11))
    with pytest.raises(EnvironmentError_):
        qmc_estimate(oracle, model, NoiseModel(NoiseKind.BERNOULLI), (0.2,),
                     0.1, 0.05, _fresh(), variant="qmc2")


def test_ledger_checkpoints_and_interpolation():
    led = RoundLedger(100, 10)
    led.consume(25, 0.2)
    assert led.consumed == 25
    assert led.cumulative_regret == pytest.approx(5.0)
    assert led.checkpoints == [(10, pytest.approx(2.0)), (20, pytest.approx(4.0))]
    led.consume(5, 1.0)  # crosses 30 exactly
    assert led.checkpoints[-1] == (30, pytest.approx(10.0))


def test_ledger_truncation_and_finalize():
    led = RoundLedger(50, 10)
    assert led.consume(80, 0.5) == 50
    assert led.remaining == 0
    assert led.consume(10, 0.5) == 0
    led.finalize()
    assert [t for t, _ in led.checkpoints] == [10, 20, 30, 40, 50]
    assert led.checkpoints[-1][1] == pytest.approx(25.0)


def test_ledger_finalize_pads_flat():
    led = RoundLedger(40, 10)
    led.consume(15, 1.0)
    led.finalize()
    assert led.checkpoints == [
        (10, pytest.approx(10.0)), (20, pytest.approx(15.0)),
        (30, pytest.approx(15.0)), (40, pytest.approx(15.0)),
    ]


def test_estimate_truncated_by_horizon_is_flagged():
    model = triangle_model()
    noise = NoiseModel(NoiseKind.BERNOULLI)
    oracle = QuantumOracleSim(OracleMode.CONTRACT, False, np.random.default_rng(12))
    led = RoundLedger(10, 5)
    _, used, exhausted = qmc_estimate(oracle, model, noise, (0.5,), 0.01, 0.05, led)
    assert exhausted and used == 10
    est, used, exhausted = qmc_estimate(oracle, model, noise, (0.5,), 0.01, 0.05, led)
    assert exhausted and used == 0 and math.isnan(est)
