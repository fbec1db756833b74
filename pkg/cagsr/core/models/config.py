# === FILE: cagsr/core/models/config.py ===
"""
Configuration schemas.

Every model forbids unknown keys so a typo in a config file fails loudly with
the offending key named. `RunConfig.seed` is authoritative: it is copied into
the data, sampling and training sections when the run config is validated.
"""
from __future__ import annotations

import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from cagsr.core.models.schemas import Algorithm, FloatPrecision, SamplingStrategy

DEFAULT_STOPWORDS = ["query", ";", "facts", ":", "="]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class ModelConfig(_Strict):
    vocab_size: int = Field(128, ge=5)
    d_model: int = Field(64, ge=1)
    n_heads: int = Field(4, ge=1)
    n_encoder_layers: int = Field(2, ge=1)
    n_decoder_layers: int = Field(2, ge=1)
    d_ff: int = Field(128, ge=1)
    max_prompt_len: int = Field(32, ge=1)
    max_response_len: int = Field(16, ge=1)
    # number of final decoder layers whose cross-attention is traced
    trace_layers: int = Field(1, ge=1)
    trace_layer_indices: Optional[List[int]] = None
    # heads averaged into a traced row; None = all heads
    trace_heads: Optional[List[int]] = None
    value_shares_trunk: bool = True
    dtype: FloatPrecision = FloatPrecision.FLOAT32
    init_std: float = Field(0.02, gt=0)

    @model_validator(mode="after")
    def _check_shapes(self) -> "ModelConfig":
        if self.d_model % self.n_heads != 0:
            raise ValueError(f"d_model={self.d_model} is not divisible by n_heads={self.n_heads}")
        if self.trace_layers > self.n_decoder_layers:
            raise ValueError(
                f"trace_layers={self.trace_layers} exceeds n_decoder_layers={self.n_decoder_layers}"
            )
        if self.trace_layer_indices is not None:
            idx = self.trace_layer_indices
            if len(idx) != self.trace_layers or len(set(idx)) != len(idx):
                raise ValueError("trace_layer_indices must list trace_layers distinct layers")
            if any(i < 0 or i >= self.n_decoder_layers for i in idx):
                raise ValueError("trace_layer_indices out of range")
        if self.trace_heads is not None:
            if not self.trace_heads or any(h < 0 or h >= self.n_heads for h in self.trace_heads):
                raise ValueError("trace_heads must name existing heads")
        return self

    def traced_layers(self) -> List[int]:
        if self.trace_layer_indices is not None:
            return sorted(self.trace_layer_indices)
        return list(range(self.n_decoder_layers - self.trace_layers, self.n_decoder_layers))

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads


class SamplingConfig(_Strict):
    strategy: SamplingStrategy = SamplingStrategy.NUCLEUS
    top_k: int = Field(0, ge=0)  # 0 disables truncation
    top_p: float = Field(1.0, gt=0.0, le=1.0)
    temperature: float = Field(1.0, ge=0.0)  # 0 selects greedy decoding
    seed: int = 0


class RewardConfig(_Strict):
    alpha: float = Field(1.0, ge=0.0)
    beta: float = Field(0.5, ge=0.0)
    gamma: float = Field(1.0, ge=0.0)
    ngram_n: int = Field(2, ge=2)
    # None = entropy_floor_scale * ln|x|; 0 disables the floor
    entropy_floor: Optional[float] = Field(None, ge=0.0)
    entropy_floor_scale: float = Field(0.05, ge=0.0)
    salient_fraction: float = Field(0.3, gt=0.0, le=1.0)
    stopword_ids: List[int] = Field(default_factory=list)
    stopwords: List[str] = Field(default_factory=lambda: list(DEFAULT_STOPWORDS))
    empty_reward: float = -1.0

    def floor_for(self, prompt_len: int) -> float:
        if self.entropy_floor is not None:
            return self.entropy_floor
        return self.entropy_floor_scale * math.log(max(prompt_len, 1))


class TrainConfig(_Strict):
    batch_prompts: int = Field(16, ge=1)
    candidates_per_prompt: int = Field(4, ge=1)
    ppo_epsilon: float = Field(0.2, gt=0.0, lt=1.0)
    ppo_epochs: int = Field(4, ge=1)
    minibatch_size: Optional[int] = Field(None, ge=1)
    value_loss_weight: float = Field(0.5, ge=0.0)
    reward_normalize: bool = True
    algorithm: Algorithm = Algorithm.PPO
    lr: float = Field(3e-4, gt=0.0)
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(1e-8, gt=0.0)
    total_iterations: int = Field(200, ge=0)
    checkpoint_every: int = Field(25, ge=1)
    rollout_workers: int = Field(1, ge=1)
    eval_prompts: int = Field(64, ge=1)
    seed: int = 0

    def resolved_minibatch_size(self) -> int:
        if self.minibatch_size is not None:
            return self.minibatch_size
        return max(1, (self.batch_prompts * self.candidates_per_prompt) // 4)


class DataConfig(_Strict):
    size: int = Field(2000, ge=10)
    n_keys: int = Field(50, ge=1)
    n_values: int = Field(50, ge=1)
    distractors_per_prompt: int = Field(3, ge=0)
    split_ratios: List[float] = Field(default_factory=lambda: [0.8, 0.1, 0.1])
    pretrain_epochs: int = Field(20, ge=0)
    pretrain_lr: float = Field(1e-3, gt=0.0)
    pretrain_batch_size: int = Field(16, ge=1)
    seed: int = 0

    @field_validator("split_ratios")
    @classmethod
    def _ratios_sum_to_one(cls, v: List[float]) -> List[float]:
        if len(v) != 3 or any(r < 0 for r in v) or abs(sum(v) - 1.0) > 1e-9:
            raise ValueError("split_ratios must be three nonnegative numbers summing to 1")
        return v


class PathsConfig(_Strict):
    data_dir: Optional[str] = None
    init_checkpoint: Optional[str] = None


class RunConfig(_Strict):
    seed: int = 0
    model: ModelConfig = Field(default_factory=ModelConfig)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    reward: RewardConfig = Field(default_factory=RewardConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)

    @model_validator(mode="after")
    def _propagate_seed(self) -> "RunConfig":
        self.data.seed = self.seed
        self.sampling.seed = self.seed
        self.train.seed = self.seed
        return self
