# === FILE: cagsr/core/models/schemas.py ===
from __future__ import annotations
from enum import Enum
from typing import List, Optional
from pydantic import BaseModel, Field


class SamplingStrategy(str, Enum):
    TOP_K = "top_k"
    NUCLEUS = "nucleus"


class Algorithm(str, Enum):
    PPO = "ppo"
    REINFORCE = "reinforce"


class FloatPrecision(str, Enum):
    FLOAT32 = "float32"
    FLOAT64 = "float64"


class ExampleSchema(BaseModel):
    """One line of a dataset file."""
    id: int
    prompt: str
    answer: str


class IterationMetrics(BaseModel):
    """One line of the training metrics stream. Field order is the on-disk order."""
    iteration: int
    n_entries: int
    n_empty: int
    mean_reward: float
    min_reward: float
    max_reward: float
    mean_coverage: float
    mean_entropy: float
    mean_repeat_penalty: float
    mean_relevance: float
    mean_advantage: float
    clip_fraction: float = Field(ge=0.0, le=1.0)
    value_loss: float
    policy_loss: float
    tripwire: bool = False


class EpochMetrics(BaseModel):
    """One line of the supervised pretraining log."""
    epoch: int
    train_loss: float
    valid_loss: Optional[float] = None


class ScoreRecord(BaseModel):
    candidate_id: int
    coverage: float
    focus: float
    repeat_penalty: float
    total: float


class ExampleRecord(BaseModel):
    id: int
    prompt: str
    reference: str
    hypothesis: str
    exact_match: bool
    rouge_l_f1: float
    relevance: float
    coverage: float
    entropy: float
    repeat_penalty: float


class EvalReport(BaseModel):
    """
    Aggregate evaluation of one checkpoint on one split.
    All means are over the same `n_examples` records.
    """
    n_examples: int
    mean_relevance: float
    mean_rouge_l_precision: float
    mean_rouge_l_recall: float
    mean_rouge_l_f1: float
    perplexity: float
    mean_coverage: float
    mean_entropy: float
    mean_repeat_penalty: float
    exact_match_rate: float
    records: List[ExampleRecord] = Field(default_factory=list)


class AblationRow(BaseModel):
    variant: str
    alpha: float
    beta: float
    gamma: float
    final_mean_reward: float
    mean_coverage: float
    mean_entropy: float
    mean_repeat_penalty: float
    mean_relevance: float
    exact_match_rate: float
