"""Reward models, noise, simulated quantum mean-estimation oracles and the round ledger.

The quantum oracle is simulated at the contract level: an invocation at
accuracy eps and failure probability delta charges the documented query
budget against the horizon and returns an estimate within eps of the true
mean, except with probability delta when fault injection is on.  No
circuit-level simulation is performed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .geometry import Point


class EnvironmentError_(ValueError):
    """Invalid environment configuration or contract violation."""


class RewardKind(str, Enum):
    TRIANGLE = "triangle"
    SINE = "sine"
    TWODIM = "twodim"
    CUSTOM = "custom"


@dataclass(frozen=True)
class RewardModel:
    """Expected-reward function with known optimum for regret accounting.

    `mu` clips the raw function into [0,1] so it is usable as a Bernoulli
    success probability; the benchmark functions dip slightly below 0 in
    parts of the domain.  `lipschitz_constant` is the constant valid for
    the metric the model is paired with.
    """

    kind: RewardKind
    raw: Callable[[Point], float]
    lipschitz_constant: float
    mu_star: float
    x_star: Point

    def mu(self, x: Point) -> float:
        return min(1.0, max(0.0, float(self.raw(x))))

    def gap(self, x: Point) -> float:
        return self.mu_star - self.mu(x)


def triangle_model() -> RewardModel:
    return RewardModel(
        kind=RewardKind.TRIANGLE,
        raw=lambda x: 0.9 - 0.95 * abs(x[0] - 1.0 / 3.0),
        lipschitz_constant=0.95,
        mu_star=0.9,
        x_star=(1.0 / 3.0,),
    )


def sine_model() -> RewardModel:
    return RewardModel(
        kind=RewardKind.SINE,
        raw=lambda x: 0.35 * math.sin(3.0 * math.pi * x[0] / 2.0),
        lipschitz_constant=0.35 * 3.0 * math.pi / 2.0,
        mu_star=0.35,
        x_star=(1.0 / 3.0,),
    )


def twodim_model() -> RewardModel:
    # paired with the L-infinity metric on [0,1]^2; the euclidean gradient
    # bound 0.95 + 0.3 converts by a factor sqrt(2)
    def raw(x: Point) -> float:
        d1 = math.hypot(x[0] - 0.8, x[1] - 0.7)
        d2 = math.hypot(x[0] - 0.0, x[1] - 1.0)
        return 1.2 - 0.95 * d1 - 0.3 * d2

    return RewardModel(
        kind=RewardKind.TWODIM,
        raw=raw,
        lipschitz_constant=1.25 * math.sqrt(2.0),
        mu_star=1.2 - 0.3 * math.hypot(0.8, 0.3),
        x_star=(0.8, 0.7),
    )


def custom_model(
    raw: Callable[[Point], float],
    lipschitz_constant: float,
    mu_star: float,
    x_star: Point,
) -> RewardModel:
    return RewardModel(RewardKind.CUSTOM, raw, lipschitz_constant, mu_star, x_star)


REWARD_FACTORIES = {
    "triangle": triangle_model,
    "sine": sine_model,
    "twodim": twodim_model,
}


class NoiseKind(str, Enum):
    BERNOULLI = "bernoulli"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class NoiseModel:
    kind: NoiseKind
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind == NoiseKind.GAUSSIAN and self.sigma <= 0:
            raise EnvironmentError_("gaussian noise requires sigma > 0")


def classical_sample(
    model: RewardModel, noise: NoiseModel, x: Point, rng: np.random.Generator
) -> float:
    """One noisy reward draw: Bernoulli(mu) or mu + N(0, sigma^2)."""
    m = model.mu(x)
    if noise.kind == NoiseKind.BERNOULLI:
        return float(rng.random() < m)
    return m + noise.sigma * float(rng.standard_normal())


def qmc1_budget(eps: float, delta: float, c1: float = 2.0) -> int:
    """Query budget of the bounded-noise quantum mean estimator: ceil((c1/eps) ln(1/delta))."""
    if eps <= 0:
        raise EnvironmentError_(f"eps must be positive, got {eps}")
    if not (0 < delta < 1):
        raise EnvironmentError_(f"delta must be in (0,1), got {delta}")
    return max(1, math.ceil((c1 / eps) * math.log(1.0 / delta)))


def qmc2_budget(eps: float, sigma: float, delta: float, c2: float = 2.0) -> int:
    """Query budget of the bounded-variance quantum mean estimator.

    ceil( (c2*sigma/eps) * log2^{3/2}(8 sigma/eps) * log2(log2(8 sigma/eps))
          * ln(1/delta) ), with each log2 factor clamped below at 1.
    Requires eps < 4*sigma.
    """
    if eps <= 0 or sigma <= 0:
        raise EnvironmentError_(f"eps and sigma must be positive, got {eps}, {sigma}")
    if not (0 < delta < 1):
        raise EnvironmentError_(f"delta must be in (0,1), got {delta}")
    if eps >= 4 * sigma:
        raise EnvironmentError_(
            f"bounded-variance budget needs eps < 4*sigma (eps={eps}, sigma={sigma})"
        )
    ratio = 8.0 * sigma / eps
    l = math.log2(ratio)
    f1 = max(1.0, l ** 1.5)
    f2 = max(1.0, math.log2(l)) if l > 0 else 1.0
    value = (c2 * sigma / eps) * f1 * f2 * math.log(1.0 / delta)
    return max(1, math.ceil(value))


class OracleMode(str, Enum):
    CONTRACT = "contract"
    EMPIRICAL = "empirical"


@dataclass
class QuantumOracleSim:
    """Simulated quantum mean-estimation oracle.

    Contract mode draws the estimate directly from the accuracy guarantee:
    mu + Uniform(-eps, eps), or mu +/- 2*eps with probability delta when
    fault injection is on.  Empirical mode returns the sample mean of the
    budgeted number of classical noisy draws (a comparison baseline with
    no accuracy guarantee at the quantum budget).
    """

    mode: OracleMode = OracleMode.CONTRACT
    fault_injection: bool = True
    rng: np.random.Generator = field(default_factory=np.random.default_rng)


@dataclass
class RoundLedger:
    """Accounting of played rounds and cumulative regret against the horizon."""

    horizon: int
    checkpoint_every: int
    consumed: int = 0
    cumulative_regret: float = 0.0
    checkpoints: list[tuple[int, float]] = field(default_factory=list)

    def __post_init__(self):
        if self.horizon < 1:
            raise EnvironmentError_(f"horizon must be >= 1, got {self.horizon}")
        if self.checkpoint_every < 1:
            raise EnvironmentError_("checkpoint_every must be >= 1")

    @property
    def remaining(self) -> int:
        return self.horizon - self.consumed

    def consume(self, n: int, gap: float) -> int:
        """Charge up to n rounds at per-round regret `gap`; returns rounds charged.

        Checkpoints crossed by the burst are recorded with the exact regret
        at the checkpoint round (regret accrues linearly within a burst).
        """
        n = min(n, self.remaining)
        if n <= 0:
            return 0
        start, start_regret = self.consumed, self.cumulative_regret
        self.consumed += n
        self.cumulative_regret += n * gap
        ck = self.checkpoint_every
        b = (start // ck + 1) * ck
        while b <= self.consumed:
            self.checkpoints.append((b, start_regret + (b - start) * gap))
            b += ck
        return n

    def finalize(self) -> None:
        """Pad checkpoints flat out to the horizon (unplayed rounds add no regret)."""
        ck = self.checkpoint_every
        b = (len(self.checkpoints) + 1) * ck
        while b <= self.horizon:
            self.checkpoints.append((b, self.cumulative_regret))
            b += ck


def qmc_estimate(
    oracle: QuantumOracleSim,
    model: RewardModel,
    noise: NoiseModel,
    x: Point,
    eps: float,
    delta: float,
    ledger: RoundLedger,
    variant: str = "qmc1",
    c1: float = 2.0,
    c2: float = 2.0,
) -> tuple[float, int, bool]:
    """One simulated quantum mean-estimation call.

    Returns (estimate, queries_used, horizon_exhausted).  The budget is the
    qmc1 formula, or the qmc2 formula for variant="qmc2" (falling back to
    qmc1 when eps >= 4*sigma, where the bounded-variance guarantee does not
    apply).  Every query is one played round charged gap(x) regret.  When
    the horizon truncates the budget the exhausted flag is set and the
    estimate carries no accuracy contract; callers discard it.
    """
    if variant == "qmc2":
        if noise.kind != NoiseKind.GAUSSIAN:
            raise EnvironmentError_("qmc2 variant requires gaussian noise")
        if eps < 4 * noise.sigma:
            budget = qmc2_budget(eps, noise.sigma, delta, c2)
        else:
            budget = qmc1_budget(eps, delta, c1)
    elif variant == "qmc1":
        budget = qmc1_budget(eps, delta, c1)
    else:
        raise EnvironmentError_(f"unknown qmc variant {variant!r}")

    if ledger.remaining <= 0:
        return math.nan, 0, True
    used = ledger.consume(budget, model.gap(x))
    exhausted = used < budget

    if oracle.mode == OracleMode.EMPIRICAL:
        draws = [classical_sample(model, noise, x, oracle.rng) for _ in range(used)]
        return float(np.mean(draws)), used, exhausted

    m = model.mu(x)
    if oracle.fault_injection and oracle.rng.random() < delta:
        sign = 1.0 if oracle.rng.random() < 0.5 else -1.0
        return m + sign * 2.0 * eps, used, exhausted
    u = oracle.rng.uniform(-1.0, 1.0)
    return m + u * eps, used, exhausted
