# === FILE: cagsr/core/entities/attention_trace.py ===
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from cagsr.exceptions import ContractError


@dataclass
class AttentionTrace:
    """Head-averaged cross-attention captured while decoding one response.

    `rows[t, l]` is the distribution over the prompt positions at decoding step t
    for the l-th traced decoder layer (`layer_indices[l]`).
    """
    prompt_len: int
    layer_indices: Tuple[int, ...]
    rows: np.ndarray  # (response_len, len(layer_indices), prompt_len)

    @property
    def response_len(self) -> int:
        return int(self.rows.shape[0])

    @property
    def trace_layers(self) -> int:
        return len(self.layer_indices)

    def flat_rows(self) -> np.ndarray:
        """Rows as a (response_len * trace_layers, prompt_len) matrix, step-major."""
        return self.rows.reshape(-1, self.prompt_len)

    def head(self, n_steps: int) -> "AttentionTrace":
        return AttentionTrace(self.prompt_len, self.layer_indices, self.rows[:n_steps])

    def validate(self, atol: float = 1e-5) -> None:
        if self.rows.ndim != 3 or self.rows.shape[1:] != (self.trace_layers, self.prompt_len):
            raise ContractError(
                f"malformed trace: rows {self.rows.shape} vs "
                f"({self.response_len}, {self.trace_layers}, {self.prompt_len})"
            )
        if np.any(self.rows < 0) or not np.allclose(self.rows.sum(axis=-1), 1.0, atol=atol):
            raise ContractError("trace rows must be nonnegative and sum to 1")

    @classmethod
    def from_flat(cls, flat: np.ndarray, prompt_len: int, layer_indices: Tuple[int, ...]) -> "AttentionTrace":
        n_layers = len(layer_indices)
        if flat.ndim != 2 or flat.shape[1] != prompt_len or flat.shape[0] % n_layers:
            raise ContractError(
                f"row count mismatch: {flat.shape} cannot hold {n_layers} layers over {prompt_len} positions"
            )
        return cls(prompt_len, tuple(layer_indices), flat.reshape(-1, n_layers, prompt_len))


@dataclass
class TraceDumpEntry:
    """One decoded response as stored in a trace dump: prompt, response tokens and their trace."""
    prompt_ids: List[int]
    token_ids: List[int]
    trace: AttentionTrace
