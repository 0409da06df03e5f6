"""Experiment configuration, multi-trial runner, CSV traces and SVG regret plots."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import algorithms
from .environment import (
    NoiseKind,
    NoiseModel,
    OracleMode,
    QuantumOracleSim,
    REWARD_FACTORIES,
)
from .geometry import Metric, MetricKind

ALGORITHMS = ("qlae", "qlae_bv", "qzooming", "qzooming_bv", "classical_zooming")
REWARDS = ("triangle", "sine", "twodim")
NOISES = ("bernoulli", "gaussian")
QMC_MODES = ("contract", "empirical")


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the offending field names."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str = "qzooming"
    reward: str = "triangle"
    noise: str = "bernoulli"
    sigma: float = math.sqrt(0.1)
    T: int = 300_000
    delta: float = 0.05
    trials: int = 30
    master_seed: int = 0
    c1: float = 2.0
    c2: float = 2.0
    grid_resolution: int | None = None
    qmc_mode: str = "contract"
    fault_injection: bool = True
    checkpoint_every: int | None = None
    audits: bool = False

    def validate(self) -> None:
        problems = []
        if self.algorithm not in ALGORITHMS:
            problems.append(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.reward not in REWARDS:
            problems.append(f"reward must be one of {REWARDS}, got {self.reward!r}")
        if self.noise not in NOISES:
            problems.append(f"noise must be one of {NOISES}, got {self.noise!r}")
        if self.qmc_mode not in QMC_MODES:
            problems.append(f"qmc_mode must be one of {QMC_MODES}, got {self.qmc_mode!r}")
        if self.T < 1:
            problems.append(f"T must be >= 1, got {self.T}")
        if not (0 < self.delta < 1):
            problems.append(f"delta must be in (0,1), got {self.delta}")
        if self.trials < 1:
            problems.append(f"trials must be >= 1, got {self.trials}")
        if self.noise == "gaussian" and self.sigma <= 0:
            problems.append(f"sigma must be > 0 for gaussian noise, got {self.sigma}")
        if self.algorithm.endswith("_bv") and self.noise != "gaussian":
            problems.append(
                f"algorithm {self.algorithm!r} requires gaussian noise, got {self.noise!r}"
            )
        if self.c1 <= 1:
            problems.append(f"c1 must be > 1, got {self.c1}")
        if self.c2 <= 1:
            problems.append(f"c2 must be > 1, got {self.c2}")
        if self.grid_resolution is not None and self.grid_resolution < 1:
            problems.append(f"grid_resolution must be >= 1, got {self.grid_resolution}")
        if self.checkpoint_every is not None and self.checkpoint_every < 1:
            problems.append(f"checkpoint_every must be >= 1, got {self.checkpoint_every}")
        if problems:
            raise ConfigError(problems)

    def metric(self) -> Metric:
        if self.reward == "twodim":
            return Metric(MetricKind.LINF, 2)
        return Metric(MetricKind.ABSOLUTE, 1)


@dataclass(frozen=True)
class RegretTrace:
    run_id: str
    algorithm: str
    reward: str
    noise: str
    checkpoints: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class Summary:
    """Per-checkpoint mean and sample standard deviation across trials."""

    rounds: tuple[int, ...]
    mean: tuple[float, ...]
    std: tuple[float, ...]


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Counter-based per-trial stream: seeded from (master_seed, trial_index)."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, trial]))


def run_single(config: ExperimentConfig, trial: int) -> algorithms.PolicyResult:
    config.validate()
    model = REWARD_FACTORIES[config.reward]()
    metric = config.metric()
    noise = NoiseModel(NoiseKind(config.noise),
                       config.sigma if config.noise == "gaussian" else 0.0)
    rng = trial_rng(config.master_seed, trial)
    ck = config.checkpoint_every or max(1, config.T // 100)
    if config.algorithm == "classical_zooming":
        return algorithms.run_classical_zooming(
            model, noise, metric, config.T, rng,
            grid_resolution=config.grid_resolution, checkpoint_every=ck,
        )
    oracle = QuantumOracleSim(OracleMode(config.qmc_mode), config.fault_injection, rng)
    if config.algorithm == "qlae":
        return algorithms.run_qlae(
            model, noise, oracle, metric, config.T, config.delta,
            c1=config.c1, checkpoint_every=ck, audits=config.audits,
        )
    if config.algorithm == "qlae_bv":
        return algorithms.run_qlae_bv(
            model, noise, oracle, metric, config.T, config.delta,
            c2=config.c2, checkpoint_every=ck, audits=config.audits,
        )
    if config.algorithm == "qzooming":
        return algorithms.run_qzooming(
            model, noise, oracle, metric, config.T, config.delta,
            c1=config.c1, grid_resolution=config.grid_resolution,
            checkpoint_every=ck, audits=config.audits,
        )
    return algorithms.run_qzooming_bv(
        model, noise, oracle, metric, config.T, config.delta,
        c2=config.c2, grid_resolution=config.grid_resolution,
        checkpoint_every=ck, audits=config.audits,
    )


def run_experiment(config: ExperimentConfig) -> tuple[list[RegretTrace], Summary]:
    """Run all trials of one configuration; summary aggregates per checkpoint."""
    config.validate()
    traces = []
    for trial in range(config.trials):
        result = run_single(config, trial)
        run_id = f"{config.algorithm}-{config.reward}-{config.noise}-trial{trial}"
        traces.append(RegretTrace(
            run_id, config.algorithm, config.reward, config.noise,
            tuple(result.checkpoints),
        ))
    return traces, summarize(traces)


def summarize(traces: Sequence[RegretTrace]) -> Summary:
    rounds = tuple(t for t, _ in traces[0].checkpoints)
    for tr in traces:
        if tuple(t for t, _ in tr.checkpoints) != rounds:
            raise ValueError("traces have mismatched checkpoint rounds")
    values = np.array([[v for _, v in tr.checkpoints] for tr in traces])
    mean = values.mean(axis=0)
    std = values.std(axis=0, ddof=1) if len(traces) > 1 else np.zeros(len(rounds))
    return Summary(rounds, tuple(float(v) for v in mean), tuple(float(v) for v in std))


def emit_csv(
    traces: Sequence[RegretTrace], summary: Summary, prefix: str | Path
) -> tuple[Path, Path]:
    """Write <prefix>_traces.csv and <prefix>_summary.csv in full precision."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    traces_path = prefix.with_name(prefix.name + "_traces.csv")
    summary_path = prefix.with_name(prefix.name + "_summary.csv")
    try:
        with open(traces_path, "w") as f:
            f.write("run_id,algorithm,reward,noise,t,cumulative_regret\n")
            for tr in sorted(traces, key=lambda tr: tr.run_id):
                for t, v in tr.checkpoints:
                    f.write(f"{tr.run_id},{tr.algorithm},{tr.reward},{tr.noise},{t},{v!r}\n")
        with open(summary_path, "w") as f:
            f.write("t,mean,std\n")
            for t, m, s in zip(summary.rounds, summary.mean, summary.std):
                f.write(f"{t},{m!r},{s!r}\n")
    except OSError as exc:
        raise OSError(f"failed writing CSV near {prefix}: {exc}") from exc
    return traces_path, summary_path


def read_traces_csv(path: str | Path) -> list[RegretTrace]:
    """Inverse of the traces file written by emit_csv."""
    rows: dict[str, dict] = {}
    with open(path) as f:
        header = f.readline()
        for line in f:
            run_id, alg, reward, noise, t, v = line.rstrip("\n").split(",")
            entry = rows.setdefault(
                run_id, {"algorithm": alg, "reward": reward, "noise": noise, "cps": []}
            )
            entry["cps"].append((int(t), float(v)))
    return [
        RegretTrace(rid, e["algorithm"], e["reward"], e["noise"], tuple(e["cps"]))
        for rid, e in rows.items()
    ]


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def emit_plot(
    summaries: Sequence[tuple[str, Summary]],
    path: str | Path,
    title: str = "Average Cumulative Regret",
) -> Path:
    """Self-contained SVG: one polyline per algorithm with a +/-1 std band."""
    if not summaries:
        raise ValueError("emit_plot needs at least one summary")
    width, height = 720, 460
    ml, mr, mt, mb = 70, 20, 40, 50
    pw, ph = width - ml - mr, height - mt - mb

    x_max = max(max(s.rounds) for _, s in summaries)
    y_max = max(max(m + sd for m, sd in zip(s.mean, s.std)) for _, s in summaries)
    y_max = y_max if y_max > 0 else 1.0
    x_min, y_min = 0.0, 0.0

    def sx(t: float) -> float:
        return ml + pw * (t - x_min) / (x_max - x_min)

    def sy(v: float) -> float:
        return mt + ph * (1.0 - (v - y_min) / (y_max - y_min))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{escape(title)}</text>',
    ]
    # axes
    parts.append(
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>'
    )
    parts.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>')
    for k in range(5):
        t = x_min + (x_max - x_min) * k / 4
        v = y_min + (y_max - y_min) * k / 4
        parts.append(
            f'<text x="{sx(t):.1f}" y="{mt + ph + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{t:g}</text>'
        )
        parts.append(
            f'<text x="{ml - 6}" y="{sy(v) + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:.4g}</text>'
        )
    parts.append(
        f'<text x="{ml + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">round t</text>'
    )
    parts.append(
        f'<text x="18" y="{mt + ph / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {mt + ph / 2:.1f})">mean cumulative regret</text>'
    )

    for k, (label, s) in enumerate(summaries):
        color = _PALETTE[k % len(_PALETTE)]
        upper = [(t, m + sd) for t, m, sd in zip(s.rounds, s.mean, s.std)]
        lower = [(t, m - sd) for t, m, sd in zip(s.rounds, s.mean, s.std)]
        band = " ".join(f"{sx(t):.2f},{sy(v):.2f}" for t, v in upper + lower[::-1])
        parts.append(f'<polygon points="{band}" fill="{color}" fill-opacity="0.15"/>')
        line = " ".join(
            f"{sx(t):.2f},{sy(m):.2f}" for t, m in zip(s.rounds, s.mean)
        )
        parts.append(
            f'<polyline points="{line}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = mt + 16 + 18 * k
        parts.append(
            f'<line x1="{ml + 10}" y1="{ly - 4}" x2="{ml + 34}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{ml + 40}" y="{ly}" font-family="sans-serif" '
            f'font-size="12">{escape(label)}</text>'
        )
    parts.append("</svg>")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n")
    return path


def sweep_cells(
    T: int = 50_000,
    trials: int = 10,
    master_seed: int = 7,
    base: ExperimentConfig | None = None,
) -> list[ExperimentConfig]:
    """Configurations for the six (reward x noise) panels, three algorithms each.

    Bernoulli panels pair the bounded-noise variants with the classical
    baseline; gaussian panels use the bounded-variance variants.
    """
    base = base or ExperimentConfig()
    cells = []
    for reward in REWARDS:
        for noise in NOISES:
            if noise == "bernoulli":
                algs = ("qlae", "qzooming", "classical_zooming")
            else:
                algs = ("qlae_bv", "qzooming_bv", "classical_zooming")
            for alg in algs:
                cells.append(replace(
                    base, algorithm=alg, reward=reward, noise=noise,
                    T=T, trials=trials, master_seed=master_seed,
                ))
    return cells
