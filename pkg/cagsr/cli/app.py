# === FILE: cagsr/cli/app.py ===
"""
Command-line entry point for the CAGSR pipeline.

    cagsr make-data    corpus, splits, vocabulary, statistics
    cagsr pretrain     supervised warm start (the No-RL baseline)
    cagsr train-cagsr  reinforcement fine-tuning, resumable
    cagsr score        rewards for a saved attention-trace dump
    cagsr eval         greedy evaluation report
    cagsr ablate       reward-component ablations with a comparison table

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""
import asyncio
from typing import Any, Awaitable, Callable, List, Optional

import typer
from loguru import logger
from rich.table import Table

from cagsr.adapters.repository.config_loader import load_run_config
from cagsr.cli.progress import console
from cagsr.core.models.config import RunConfig
from cagsr.core.models.usecase_result import UseCaseResult
from cagsr.core.usecases.evaluate_model import EvaluateModelUseCase
from cagsr.core.usecases.make_dataset import MakeDatasetUseCase
from cagsr.core.usecases.pretrain import PretrainUseCase
from cagsr.core.usecases.run_ablation import RunAblationUseCase
from cagsr.core.usecases.score_traces import ScoreTracesUseCase
from cagsr.core.usecases.train_cagsr import TrainCagsrUseCase
from cagsr.exceptions import CagsrError, ConfigError, InputError
from cagsr.logging_config import configure_logging

EXIT_USAGE = 1
EXIT_RUNTIME = 2

app = typer.Typer(help="CAGSR: cross-attention-guided self-reinforcement on a toy key-value task")

ConfigOpt = typer.Option(None, "--config", help="Run configuration (.toml or .json)")
SeedOpt = typer.Option(None, "--seed", help="Seed for data, sampling and training; overrides the config")
OutOpt = typer.Option("runs", "--out", help="Root directory for run artifacts")
SetOpt = typer.Option(None, "--set", help="Override a config value: dotted.key=value (repeatable)")
LogLevelOpt = typer.Option("INFO", "--log-level", help="Log level for stderr")
LogFileOpt = typer.Option(None, "--log-file", help="Also write DEBUG logs as JSON lines to this file")


def _load(
    config: Optional[str],
    seed: Optional[int],
    overrides: Optional[List[str]],
    log_level: str,
    log_file: Optional[str] = None,
) -> RunConfig:
    configure_logging(log_level, log_file)
    try:
        return load_run_config(config, overrides or [], seed)
    except ConfigError as exc:
        console.print(f"[bold red]Configuration error:[/bold red] {exc}")
        raise typer.Exit(EXIT_USAGE)


def _execute(label: str, action: Callable[[], Awaitable[UseCaseResult]]) -> UseCaseResult:
    """Run one use case under a status spinner and map failures to exit codes."""
    try:
        with console.status(f"{label}..."):
            result = asyncio.run(action())
    except (ConfigError, InputError, FileNotFoundError) as exc:
        console.print(f"[bold red]Error:[/bold red] {exc}")
        raise typer.Exit(EXIT_USAGE)
    except CagsrError as exc:
        logger.error("{} failed: {}", label, exc)
        console.print(f"[bold red]Failed:[/bold red] {exc}")
        raise typer.Exit(EXIT_RUNTIME)
    except Exception as exc:
        logger.exception("{} crashed", label)
        console.print(f"[bold red]Unexpected error:[/bold red] {type(exc).__name__}: {exc}")
        raise typer.Exit(EXIT_RUNTIME)

    console.print("\n[green]Done.[/green]")
    for key, value in result.results.items():
        if isinstance(value, (str, int, float)):
            console.print(f"  - {key}: {value}")
    console.print(f"  - Time taken: {result.elapsed:.3f}s\n")
    return result


@app.command("make-data")
def make_data(
    config: Optional[str] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: str = OutOpt,
    overrides: Optional[List[str]] = SetOpt,
    log_level: str = LogLevelOpt,
    log_file: Optional[str] = LogFileOpt,
):
    """Generate the toy corpus, its splits, vocabulary and statistics."""
    cfg = _load(config, seed, overrides, log_level, log_file)
    _execute("Generating corpus", lambda: MakeDatasetUseCase(cfg).run(out))


@app.command()
def pretrain(
    config: Optional[str] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: str = OutOpt,
    overrides: Optional[List[str]] = SetOpt,
    log_level: str = LogLevelOpt,
    log_file: Optional[str] = LogFileOpt,
):
    """Supervised cross-entropy pretraining."""
    cfg = _load(config, seed, overrides, log_level, log_file)
    _execute("Pretraining", lambda: PretrainUseCase(cfg).run(out))


@app.command("train-cagsr")
def train_cagsr(
    config: Optional[str] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: str = OutOpt,
    overrides: Optional[List[str]] = SetOpt,
    log_level: str = LogLevelOpt,
    log_file: Optional[str] = LogFileOpt,
):
    """Reinforcement fine-tuning; resumes from the newest checkpoint in the run directory."""
    cfg = _load(config, seed, overrides, log_level, log_file)
    _execute("Training", lambda: TrainCagsrUseCase(cfg).run(out))


@app.command()
def score(
    traces: str = typer.Option(..., "--traces", help="Attention-trace dump (.npz) to score"),
    config: Optional[str] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: str = OutOpt,
    overrides: Optional[List[str]] = SetOpt,
    log_level: str = LogLevelOpt,
    log_file: Optional[str] = LogFileOpt,
):
    """Recompute rewards for a trace dump."""
    cfg = _load(config, seed, overrides, log_level, log_file)
    _execute("Scoring", lambda: ScoreTracesUseCase(cfg).run(out, traces))


@app.command("eval")
def evaluate(
    checkpoint: Optional[str] = typer.Option(None, "--checkpoint", help="Checkpoint to evaluate (default: the CAGSR model)"),
    split: str = typer.Option("test", "--split", help="train, valid or test"),
    config: Optional[str] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: str = OutOpt,
    overrides: Optional[List[str]] = SetOpt,
    log_level: str = LogLevelOpt,
    log_file: Optional[str] = LogFileOpt,
):
    """Greedy evaluation of a checkpoint."""
    cfg = _load(config, seed, overrides, log_level, log_file)
    result = _execute("Evaluating", lambda: EvaluateModelUseCase(cfg).run(out, checkpoint, split))
    report = result.results["eval_report"]
    console.print(
        f"exact match {report.exact_match_rate:.3f} | ROUGE-L F1 {report.mean_rouge_l_f1:.3f} | "
        f"perplexity {report.perplexity:.3f} | coverage {report.mean_coverage:.4f} | entropy {report.mean_entropy:.4f}"
    )


def _ablation_table(rows: List[Any]) -> Table:
    table = Table(title="Reward ablations")
    for column in ("variant", "alpha", "beta", "gamma", "reward", "coverage", "entropy", "repeat", "relevance", "exact"):
        table.add_column(column, justify="left" if column == "variant" else "right")
    for r in rows:
        table.add_row(
            r.variant,
            f"{r.alpha:g}",
            f"{r.beta:g}",
            f"{r.gamma:g}",
            f"{r.final_mean_reward:.4f}",
            f"{r.mean_coverage:.4f}",
            f"{r.mean_entropy:.4f}",
            f"{r.mean_repeat_penalty:.4f}",
            f"{r.mean_relevance:.4f}",
            f"{r.exact_match_rate:.3f}",
        )
    return table


@app.command()
def ablate(
    config: Optional[str] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    out: str = OutOpt,
    overrides: Optional[List[str]] = SetOpt,
    log_level: str = LogLevelOpt,
    log_file: Optional[str] = LogFileOpt,
):
    """Train and evaluate the full reward and each single-component ablation."""
    cfg = _load(config, seed, overrides, log_level, log_file)
    result = _execute("Running ablations", lambda: RunAblationUseCase(cfg).run(out))
    console.print(_ablation_table(result.results["rows"]))
