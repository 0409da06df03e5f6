"""Command-line entry point: run / sweep / audit / dim subcommands."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import fields, replace
from pathlib import Path

from . import diagnostics
from .environment import REWARD_FACTORIES
from .harness import (
    ALGORITHMS,
    ConfigError,
    ExperimentConfig,
    NOISES,
    REWARDS,
    QMC_MODES,
    emit_csv,
    emit_plot,
    run_experiment,
    run_single,
    summarize,
    sweep_cells,
)

_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _parse_config_file(path: str) -> dict:
    """Flat key=value file with keys matching ExperimentConfig field names."""
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    out: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError([f"{path}:{lineno}: expected key=value, got {line!r}"])
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in types:
                raise ConfigError([f"{path}:{lineno}: unknown config key {key!r}"])
            if key in ("T", "trials", "master_seed", "grid_resolution", "checkpoint_every"):
                out[key] = None if value.lower() == "none" else int(value)
            elif key in ("sigma", "delta", "c1", "c2"):
                out[key] = float(value)
            elif key in ("fault_injection", "audits"):
                if value.lower() not in _BOOL:
                    raise ConfigError([f"{path}:{lineno}: bad boolean {value!r} for {key}"])
                out[key] = _BOOL[value.lower()]
            else:
                out[key] = value
    return out


def _add_config_flags(p: argparse.ArgumentParser, with_algorithm: bool = True) -> None:
    if with_algorithm:
        p.add_argument("--algorithm", choices=ALGORITHMS)
    p.add_argument("--reward", choices=REWARDS)
    p.add_argument("--noise", choices=NOISES)
    p.add_argument("--sigma", type=float)
    p.add_argument("--T", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--master-seed", type=int, dest="master_seed")
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.add_argument("--grid-resolution", type=int, dest="grid_resolution")
    p.add_argument("--qmc-mode", choices=QMC_MODES, dest="qmc_mode")
    p.add_argument("--fault-injection", dest="fault_injection",
                   action="store_true", default=None)
    p.add_argument("--no-fault-injection", dest="fault_injection", action="store_false")
    p.add_argument("--checkpoint-every", type=int, dest="checkpoint_every")
    p.add_argument("--audits", action="store_true", default=None)
    p.add_argument("--config", metavar="FILE", help="key=value config file")
    p.add_argument("--out", default="out", help="output directory")


def _build_config(args: argparse.Namespace, defaults: ExperimentConfig) -> ExperimentConfig:
    overrides: dict = {}
    if getattr(args, "config", None):
        overrides.update(_parse_config_file(args.config))
    # env seed sits between config file and explicit flags
    env_seed = os.environ.get("LIPZOOM_SEED")
    if env_seed is not None:
        try:
            overrides["master_seed"] = int(env_seed)
        except ValueError:
            raise ConfigError([f"LIPZOOM_SEED must be an integer, got {env_seed!r}"])
    for f in fields(ExperimentConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    return replace(defaults, **overrides)


def _run_and_emit(config: ExperimentConfig, out: Path, label: str | None = None):
    traces, summary = run_experiment(config)
    name = label or f"{config.algorithm}_{config.reward}_{config.noise}"
    emit_csv(traces, summary, out / name)
    return name, summary


def _cmd_run(args) -> int:
    config = _build_config(args, ExperimentConfig())
    config.validate()
    out = Path(args.out)
    name, summary = _run_and_emit(config, out)
    emit_plot([(config.algorithm, summary)], out / f"{name}.svg")
    print(f"wrote {name}_traces.csv, {name}_summary.csv, {name}.svg in {out}")
    return 0


def _cmd_sweep(args) -> int:
    base = _build_config(args, ExperimentConfig(T=50_000, trials=10, master_seed=7))
    out = Path(args.out)
    cells = sweep_cells(base.T, base.trials, base.master_seed, base)
    panels: dict[tuple[str, str], list] = {}
    for config in cells:
        config.validate()
        name, summary = _run_and_emit(config, out)
        panels.setdefault((config.reward, config.noise), []).append(
            (config.algorithm, summary)
        )
        print(f"finished {name}")
    for (reward, noise), entries in panels.items():
        emit_plot(entries, out / f"panel_{reward}_{noise}.svg",
                  title=f"{reward.capitalize()} ({noise.capitalize()})")
    print(f"wrote {len(cells)} trace sets and {len(panels)} panels in {out}")
    return 0


def _cmd_audit(args) -> int:
    config = replace(_build_config(args, ExperimentConfig(T=50_000, trials=1)), audits=True)
    config.validate()
    if config.algorithm == "classical_zooming":
        raise ConfigError(["audit requires a quantum algorithm"])
    model = REWARD_FACTORIES[config.reward]()
    metric = config.metric()
    total = viol = 0
    for trial in range(config.trials):
        result = run_single(config, trial)
        rep = diagnostics.audit_clean_event(result.estimate_records)
        total += rep.total
        viol += rep.violations
        if config.algorithm.startswith("qlae"):
            lem = diagnostics.audit_qlae_lemmas(result.stage_audits, model, metric)
            print(f"trial {trial}: estimates={rep.total} clean-violations={rep.violations} "
                  f"gap-violations={lem.gap_violations} survival-misses={lem.survival_misses}")
        else:
            lem = diagnostics.audit_qzooming_lemma(result.stage_audits, model)
            print(f"trial {trial}: estimates={rep.total} clean-violations={rep.violations} "
                  f"gap-violations={lem.gap_violations}")
    frac = viol / total if total else 0.0
    print(f"clean-event violation fraction: {frac:.4f} over {total} estimates")
    return 0


def _cmd_dim(args) -> int:
    config = _build_config(args, ExperimentConfig())
    if config.reward not in REWARDS:
        raise ConfigError([f"reward must be one of {REWARDS}, got {config.reward!r}"])
    model = REWARD_FACTORIES[config.reward]()
    metric = config.metric()
    spacing = 1.0 / 8192 if metric.dimension == 1 else 1.0 / 256
    divisor = args.divisor
    profile = diagnostics.fit_zooming_dimension(model, metric, spacing=spacing,
                                                divisor=divisor)
    for r, c in zip(profile.radii, profile.counts):
        print(f"r={r:g}  N_z={c}")
    print(f"fitted zooming dimension (divisor {divisor}): "
          f"{profile.fitted_dimension:.4f}  (residual {profile.fit_residual:.4f})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lipzoom",
        description="Lipschitz bandit simulations with simulated quantum reward oracles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment configuration")
    _add_config_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run all reward x noise panels")
    _add_config_flags(p_sweep, with_algorithm=False)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_audit = sub.add_parser("audit", help="run with audits and report clean-event stats")
    _add_config_flags(p_audit)
    p_audit.set_defaults(func=_cmd_audit)

    p_dim = sub.add_parser("dim", help="zooming-dimension diagnostic for a reward")
    _add_config_flags(p_dim)
    p_dim.add_argument("--divisor", type=int, default=3, choices=(2, 3, 14, 16))
    p_dim.set_defaults(func=_cmd_dim)
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
