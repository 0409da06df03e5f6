"""Bandit policies: quantum adaptive elimination, quantum zooming and a classical baseline.

All five policies share the round ledger for regret accounting and can
emit audit records (per-estimate accuracy and per-stage gap-bound data)
consumed by the diagnostics module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .environment import (
    NoiseKind,
    NoiseModel,
    QuantumOracleSim,
    RewardModel,
    RoundLedger,
    classical_sample,
    qmc1_budget,
    qmc2_budget,
    qmc_estimate,
)
from .geometry import ActiveRegion, Metric, Point, lattice, maximal_packing

# hard cap on elimination stages; eps = 2^-m underflows long after any
# desk-scale horizon is exhausted, this just keeps tiny-T runs finite
MAX_STAGES = 64


class Termination(str, Enum):
    HORIZON = "horizon_exhausted"
    STAGE_CAP = "stage_cap_reached"


@dataclass(frozen=True)
class EstimateRecord:
    """One audited oracle estimate: compare |estimate - true_mean| to eps."""

    stage: int
    point: Point
    eps: float
    estimate: float
    true_mean: float


@dataclass(frozen=True)
class StageAudit:
    """Per-stage snapshot used by the gap-bound lemma audits.

    For elimination runs `arms` is the active packing at stage start with
    the shared previous-stage radius, and `survivors` the post-elimination
    set with the current radius.  For zooming runs `arms` carries each
    active arm with its own pre-halving confidence radius.
    """

    stage: int
    arms: tuple[tuple[Point, float], ...]
    survivors: tuple[tuple[Point, float], ...] = ()


@dataclass
class PolicyResult:
    checkpoints: list[tuple[int, float]]
    total_rounds: int
    final_regret: float
    stages_completed: int
    termination: Termination
    estimate_records: list[EstimateRecord] = field(default_factory=list)
    stage_audits: list[StageAudit] = field(default_factory=list)


def _run_elimination(
    model: RewardModel,
    noise: NoiseModel,
    oracle: QuantumOracleSim,
    metric: Metric,
    T: int,
    delta: float,
    variant: str,
    c1: float,
    c2: float,
    checkpoint_every: int,
    audits: bool,
) -> PolicyResult:
    ledger = RoundLedger(T, checkpoint_every)
    region = ActiveRegion.whole_space(metric.dimension)
    eps = 0.5
    arms = maximal_packing(region, metric, eps, spacing=eps / 4)
    records: list[EstimateRecord] = []
    stage_audits: list[StageAudit] = []
    termination = Termination.STAGE_CAP
    stages_completed = 0

    for m in range(1, MAX_STAGES + 1):
        eps = 2.0 ** -m
        if audits:
            stage_audits.append(
                StageAudit(m, tuple((x, 2.0 ** -(m - 1)) for x in arms))
            )
        estimates: dict[Point, float] = {}
        exhausted = False
        for x in arms:
            est, _, exhausted = qmc_estimate(
                oracle, model, noise, x, eps, delta / T, ledger,
                variant=variant, c1=c1, c2=c2,
            )
            if exhausted:
                break
            estimates[x] = est
            if audits:
                records.append(EstimateRecord(m, x, eps, est, model.mu(x)))
        if exhausted:
            # partial-budget estimates carry no contract: skip the update
            termination = Termination.HORIZON
            break
        mu_max = max(estimates.values())
        survivors = [x for x in arms if estimates[x] >= mu_max - 3.0 * eps]
        if audits:
            stage_audits[-1] = StageAudit(
                m,
                stage_audits[-1].arms,
                tuple((x, eps) for x in survivors),
            )
        stages_completed = m
        region = ActiveRegion(tuple(survivors), eps)
        eps_next = eps / 2.0
        arms = maximal_packing(region, metric, eps_next, spacing=eps_next / 4)

    ledger.finalize()
    return PolicyResult(
        checkpoints=ledger.checkpoints,
        total_rounds=ledger.consumed,
        final_regret=ledger.cumulative_regret,
        stages_completed=stages_completed,
        termination=termination,
        estimate_records=records,
        stage_audits=stage_audits,
    )


def run_qlae(
    model: RewardModel,
    noise: NoiseModel,
    oracle: QuantumOracleSim,
    metric: Metric,
    T: int,
    delta: float,
    c1: float = 2.0,
    checkpoint_every: int | None = None,
    audits: bool = False,
) -> PolicyResult:
    """Adaptive elimination with the bounded-noise oracle budget.

    Each stage halves the resolution, estimates every packing point to
    within eps_m, drops points more than 3*eps_m below the best estimate
    and re-packs the surviving ball union at half the radius.
    """
    ck = checkpoint_every or max(1, T // 100)
    return _run_elimination(
        model, noise, oracle, metric, T, delta, "qmc1", c1, 2.0, ck, audits
    )


def run_qlae_bv(
    model: RewardModel,
    noise: NoiseModel,
    oracle: QuantumOracleSim,
    metric: Metric,
    T: int,
    delta: float,
    c2: float = 2.0,
    checkpoint_every: int | None = None,
    audits: bool = False,
) -> PolicyResult:
    """Adaptive elimination under bounded-variance (gaussian) noise."""
    if noise.kind != NoiseKind.GAUSSIAN:
        raise ValueError("bounded-variance elimination requires gaussian noise")
    ck = checkpoint_every or max(1, T // 100)
    return _run_elimination(
        model, noise, oracle, metric, T, delta, "qmc2", 2.0, c2, ck, audits
    )


def select_arm(estimates: list[float], radii: list[float]) -> int:
    """Index of the arm maximizing estimate + 2*radius; first activated wins ties."""
    idx = np.asarray(estimates) + 2.0 * np.asarray(radii)
    return int(np.argmax(idx))


def _activation_spacing(dimension: int, grid_resolution: int | None) -> float:
    if grid_resolution is not None:
        if grid_resolution < 1:
            raise ValueError("grid_resolution must be >= 1")
        return 1.0 / grid_resolution
    return 1.0 / 512 if dimension == 1 else 1.0 / 64


def _run_zooming(
    model: RewardModel,
    noise: NoiseModel,
    oracle: QuantumOracleSim,
    metric: Metric,
    T: int,
    delta: float,
    variant: str,
    c1: float,
    c2: float,
    grid_resolution: int | None,
    checkpoint_every: int,
    audits: bool,
) -> PolicyResult:
    ledger = RoundLedger(T, checkpoint_every)
    cand = lattice(metric.dimension, _activation_spacing(metric.dimension, grid_resolution))
    if len(cand) == 0:
        raise ValueError("activation grid is empty")

    points: list[Point] = []
    radii: list[float] = []
    estimates: list[float] = []  # unplayed arms sit at 0, consistent with eps=1
    dist_cols: list[np.ndarray] = []  # candidate-to-arm distances
    records: list[EstimateRecord] = []
    stage_audits: list[StageAudit] = []
    termination = Termination.STAGE_CAP
    stages_completed = 0

    for s in range(1, T + 1):  # the stage count never exceeds the horizon
        # activation: first lattice candidate not covered by any confidence ball
        if points:
            covered = np.zeros(len(cand), dtype=bool)
            for col, r in zip(dist_cols, radii):
                covered |= col <= r
            uncovered = np.flatnonzero(~covered)
        else:
            uncovered = np.arange(len(cand))
        if len(uncovered) > 0:
            y = tuple(float(v) for v in cand[uncovered[0]])
            points.append(y)
            radii.append(1.0)
            estimates.append(0.0)
            dist_cols.append(metric.pairwise(cand, cand[uncovered[0] : uncovered[0] + 1])[:, 0])

        if audits:
            stage_audits.append(StageAudit(s, tuple(zip(points, radii))))

        i = select_arm(estimates, radii)
        radii[i] /= 2.0
        eps = radii[i]
        if variant == "qmc2" and eps < 4 * noise.sigma:
            budget = qmc2_budget(eps, noise.sigma, delta / T, c2)
        else:
            budget = qmc1_budget(eps, delta / T, c1)
        if ledger.consumed + budget > T:
            termination = Termination.HORIZON
            break
        est, _, _ = qmc_estimate(
            oracle, model, noise, points[i], eps, delta / T, ledger,
            variant=variant, c1=c1, c2=c2,
        )
        estimates[i] = est
        stages_completed = s
        if audits:
            records.append(EstimateRecord(s, points[i], eps, est, model.mu(points[i])))

    ledger.finalize()
    return PolicyResult(
        checkpoints=ledger.checkpoints,
        total_rounds=ledger.consumed,
        final_regret=ledger.cumulative_regret,
        stages_completed=stages_completed,
        termination=termination,
        estimate_records=records,
        stage_audits=stage_audits,
    )


def run_qzooming(
    model: RewardModel,
    noise: NoiseModel,
    oracle: QuantumOracleSim,
    metric: Metric,
    T: int,
    delta: float,
    c1: float = 2.0,
    grid_resolution: int | None = None,
    checkpoint_every: int | None = None,
    audits: bool = False,
) -> PolicyResult:
    """Stage-based zooming with the bounded-noise oracle budget.

    Per stage: activate the first lattice candidate not covered by the
    confidence balls, select the active arm maximizing estimate + 2*radius,
    halve its radius and re-estimate it at the new accuracy.  Terminates
    before any stage whose budget would exceed the horizon.
    """
    ck = checkpoint_every or max(1, T // 100)
    return _run_zooming(
        model, noise, oracle, metric, T, delta, "qmc1", c1, 2.0,
        grid_resolution, ck, audits,
    )


def run_qzooming_bv(
    model: RewardModel,
    noise: NoiseModel,
    oracle: QuantumOracleSim,
    metric: Metric,
    T: int,
    delta: float,
    c2: float = 2.0,
    grid_resolution: int | None = None,
    checkpoint_every: int | None = None,
    audits: bool = False,
) -> PolicyResult:
    """Stage-based zooming under bounded-variance (gaussian) noise."""
    if noise.kind != NoiseKind.GAUSSIAN:
        raise ValueError("bounded-variance zooming requires gaussian noise")
    ck = checkpoint_every or max(1, T // 100)
    return _run_zooming(
        model, noise, oracle, metric, T, delta, "qmc2", 2.0, c2,
        grid_resolution, ck, audits,
    )


def classical_radius(n: int, T: int) -> float:
    """Confidence radius sqrt(2 ln T / n), with radius 1 for an unplayed arm."""
    if n == 0:
        return 1.0
    return math.sqrt(2.0 * math.log(T) / n)


def run_classical_zooming(
    model: RewardModel,
    noise: NoiseModel,
    metric: Metric,
    T: int,
    rng: np.random.Generator,
    grid_resolution: int | None = None,
    checkpoint_every: int | None = None,
) -> PolicyResult:
    """Classical zooming baseline: one noisy sample per round.

    Each round activates the first uncovered lattice candidate, plays the
    arm maximizing the running mean plus twice its confidence radius, and
    updates that arm's statistics.
    """
    ck = checkpoint_every or max(1, T // 100)
    ledger = RoundLedger(T, ck)
    cand = lattice(metric.dimension, _activation_spacing(metric.dimension, grid_resolution))
    if len(cand) == 0:
        raise ValueError("activation grid is empty")

    log_t = 2.0 * math.log(T)
    points: list[Point] = []
    gaps: list[float] = []
    counts = np.zeros(0, dtype=np.int64)
    sums = np.zeros(0)
    radii = np.zeros(0)
    index = np.zeros(0)
    dist_cols: list[np.ndarray] = []
    cov_cols: list[np.ndarray] = []
    covered_count = np.zeros(len(cand), dtype=np.int32)

    for _ in range(T):
        if (covered_count == 0).any():
            j = int(np.argmax(covered_count == 0))
            y = tuple(float(v) for v in cand[j])
            points.append(y)
            gaps.append(model.gap(y))
            counts = np.append(counts, 0)
            sums = np.append(sums, 0.0)
            radii = np.append(radii, 1.0)
            index = np.append(index, 2.0)  # mean 0, radius 1
            col = metric.pairwise(cand, cand[j : j + 1])[:, 0]
            dist_cols.append(col)
            cov = col <= 1.0
            cov_cols.append(cov)
            covered_count += cov

        i = int(np.argmax(index))
        y_draw = classical_sample(model, noise, points[i], rng)
        counts[i] += 1
        sums[i] += y_draw
        r = math.sqrt(log_t / counts[i])
        radii[i] = r
        index[i] = sums[i] / counts[i] + 2.0 * r
        new_cov = dist_cols[i] <= r
        covered_count += new_cov.astype(np.int32) - cov_cols[i].astype(np.int32)
        cov_cols[i] = new_cov
        ledger.consume(1, gaps[i])

    ledger.finalize()
    return PolicyResult(
        checkpoints=ledger.checkpoints,
        total_rounds=ledger.consumed,
        final_regret=ledger.cumulative_regret,
        stages_completed=T,
        termination=Termination.HORIZON,
    )
