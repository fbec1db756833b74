# === FILE: cagsr/core/model/policy.py ===
"""
Encoder-decoder policy with a value head on the shared encoder.

The decoder's cross-attention probabilities are exposed per step so that
generation can record an AttentionTrace for every candidate.
"""
from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from cagsr.core.autodiff import ops
from cagsr.core.autodiff.tensor import Tensor, no_grad
from cagsr.core.entities.attention_trace import AttentionTrace
from cagsr.core.entities.candidate import Candidate
from cagsr.core.entities.vocabulary import BOS_ID, EOS_ID
from cagsr.core.model.layers import causal_mask, feed_forward, layer_norm, linear, multi_head_attention
from cagsr.core.models.config import ModelConfig, SamplingConfig
from cagsr.exceptions import InputError
from cagsr.factory.sampler_factory import SamplerFactory

VALUE_PARAMS = ("value.w", "value.b")


def _parameter_shapes(cfg: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    d, f, v = cfg.d_model, cfg.d_ff, cfg.vocab_size
    shapes: Dict[str, Tuple[int, ...]] = {
        "tok_emb": (v, d),
        "enc_pos": (cfg.max_prompt_len, d),
        "dec_pos": (cfg.max_response_len, d),
    }

    def attn(prefix: str) -> None:
        for w in ("wq", "wk", "wv", "wo"):
            shapes[f"{prefix}.{w}"] = (d, d)

    def norm(prefix: str) -> None:
        shapes[f"{prefix}.g"] = (d,)
        shapes[f"{prefix}.b"] = (d,)

    def ffn(prefix: str) -> None:
        shapes.update({f"{prefix}.w1": (d, f), f"{prefix}.b1": (f,), f"{prefix}.w2": (f, d), f"{prefix}.b2": (d,)})

    for i in range(cfg.n_encoder_layers):
        norm(f"enc.{i}.ln1")
        attn(f"enc.{i}.self")
        norm(f"enc.{i}.ln2")
        ffn(f"enc.{i}.ff")
    norm("enc.ln_f")
    for i in range(cfg.n_decoder_layers):
        norm(f"dec.{i}.ln1")
        attn(f"dec.{i}.self")
        norm(f"dec.{i}.ln2")
        attn(f"dec.{i}.cross")
        norm(f"dec.{i}.ln3")
        ffn(f"dec.{i}.ff")
    norm("dec.ln_f")
    shapes.update({"out.w": (d, v), "out.b": (v,), "value.w": (d, 1), "value.b": (1,)})
    return shapes


def _initial_value(name: str, shape: Tuple[int, ...], cfg: ModelConfig, rng: np.random.Generator) -> np.ndarray:
    dtype = np.dtype(cfg.dtype.value)
    if name in VALUE_PARAMS:
        return np.zeros(shape, dtype=dtype)
    if name.endswith(".g"):
        return np.ones(shape, dtype=dtype)
    if len(shape) == 1:
        return np.zeros(shape, dtype=dtype)
    return (rng.standard_normal(shape) * cfg.init_std).astype(dtype)


class PolicyModel:
    """π_θ(y|x) plus V(x), as a flat dict of named parameter tensors."""

    def __init__(self, config: ModelConfig, seed: int = 0, arrays: Optional[Mapping[str, np.ndarray]] = None):
        self.config = config
        self._dtype = np.dtype(config.dtype.value)
        shapes = _parameter_shapes(config)
        rng = np.random.default_rng(seed)
        self.params: Dict[str, Tensor] = {}
        for name, shape in shapes.items():
            if arrays is not None:
                if name not in arrays:
                    raise InputError(f"checkpoint is missing parameter {name!r}")
                data = np.asarray(arrays[name], dtype=self._dtype)
                if data.shape != shape:
                    raise InputError(f"parameter {name!r} has shape {data.shape}, expected {shape}")
                data = data.copy()
            else:
                data = _initial_value(name, shape, config, rng)
            self.params[name] = Tensor(data, requires_grad=True, name=name)
        self._traced = config.traced_layers()

    # -------------------------
    # parameter helpers
    # -------------------------
    def parameters(self) -> Dict[str, Tensor]:
        return self.params

    def state_arrays(self) -> Dict[str, np.ndarray]:
        return {name: t.data.copy() for name, t in self.params.items()}

    def load_state_arrays(self, arrays: Mapping[str, np.ndarray]) -> None:
        for name, t in self.params.items():
            t.data = np.asarray(arrays[name], dtype=self._dtype).copy()
            t.zero_grad()

    @property
    def n_parameters(self) -> int:
        return sum(t.size for t in self.params.values())

    # -------------------------
    # input validation
    # -------------------------
    def _check_ids(self, ids: Sequence[int], what: str) -> None:
        if any(int(i) < 0 or int(i) >= self.config.vocab_size for i in ids):
            raise InputError(f"{what} contains a token id outside [0, {self.config.vocab_size})")

    def _check_prompt(self, prompt_ids: Sequence[int]) -> None:
        if not 1 <= len(prompt_ids) <= self.config.max_prompt_len:
            raise InputError(
                f"prompt length {len(prompt_ids)} outside [1, {self.config.max_prompt_len}]"
            )
        self._check_ids(prompt_ids, "prompt")

    # -------------------------
    # forward passes
    # -------------------------
    def encode(self, prompt_ids: Sequence[int]) -> Tensor:
        """Encoder states of shape (|x|, d_model)."""
        self._check_prompt(prompt_ids)
        p, cfg = self.params, self.config
        x = ops.add(ops.embedding(p["tok_emb"], prompt_ids), ops.slice_rows(p["enc_pos"], 0, len(prompt_ids)))
        for i in range(cfg.n_encoder_layers):
            h = layer_norm(x, p, f"enc.{i}.ln1")
            attn, _ = multi_head_attention(h, h, p, f"enc.{i}.self", cfg)
            x = ops.add(x, attn)
            x = ops.add(x, feed_forward(layer_norm(x, p, f"enc.{i}.ln2"), p, f"enc.{i}.ff"))
        return layer_norm(x, p, "enc.ln_f")

    def decode(self, encoder_states: Tensor, decoder_input: Sequence[int]) -> Tuple[Tensor, List[Tensor]]:
        """Logits (T, vocab) for a decoder input that starts with BOS, plus every
        layer's cross-attention probabilities (n_heads, T, |x|)."""
        p, cfg = self.params, self.config
        length = len(decoder_input)
        if not 1 <= length <= cfg.max_response_len:
            raise InputError(f"decoder input length {length} outside [1, {cfg.max_response_len}]")
        self._check_ids(decoder_input, "response")
        mask = causal_mask(length, self._dtype)
        x = ops.add(ops.embedding(p["tok_emb"], decoder_input), ops.slice_rows(p["dec_pos"], 0, length))
        cross_probs: List[Tensor] = []
        for i in range(cfg.n_decoder_layers):
            h = layer_norm(x, p, f"dec.{i}.ln1")
            attn, _ = multi_head_attention(h, h, p, f"dec.{i}.self", cfg, mask)
            x = ops.add(x, attn)
            h = layer_norm(x, p, f"dec.{i}.ln2")
            cross, probs = multi_head_attention(h, encoder_states, p, f"dec.{i}.cross", cfg)
            cross_probs.append(probs)
            x = ops.add(x, cross)
            x = ops.add(x, feed_forward(layer_norm(x, p, f"dec.{i}.ln3"), p, f"dec.{i}.ff"))
        x = layer_norm(x, p, "dec.ln_f")
        return linear(x, p["out.w"], p["out.b"]), cross_probs

    def _head_mean(self, probs: np.ndarray) -> np.ndarray:
        heads = self.config.trace_heads
        selected = probs if heads is None else probs[list(heads)]
        return selected.mean(axis=0)

    def decode_step(self, encoder_states: Tensor, prefix_ids: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
        """Next-token logits after `prefix_ids` and the traced cross-attention rows
        (trace_layers, |x|) of that step."""
        if len(prefix_ids) >= self.config.max_response_len:
            raise InputError(
                f"prefix length {len(prefix_ids)} must be below max_response_len={self.config.max_response_len}"
            )
        with no_grad():
            logits, cross = self.decode(encoder_states, [BOS_ID, *prefix_ids])
        rows = np.stack([self._head_mean(cross[l].data[:, -1, :]) for l in self._traced], axis=0)
        return logits.data[-1], rows

    def log_prob(self, prompt_ids: Sequence[int], response_ids: Sequence[int]) -> Tensor:
        """Teacher-forced per-token log-probabilities of `response_ids`, shape (|y|,).
        Differentiable when called inside an active tape."""
        if len(response_ids) == 0:
            raise InputError("response must be nonempty")
        self._check_ids(response_ids, "response")
        enc = self.encode(prompt_ids)
        logits, _ = self.decode(enc, [BOS_ID, *response_ids[:-1]])
        return ops.token_log_probs(logits, response_ids)

    def log_prob_and_value(self, prompt_ids: Sequence[int], response_ids: Sequence[int]) -> Tuple[Tensor, Tensor]:
        """`log_prob` and `value_estimate` from one shared encoder pass."""
        if len(response_ids) == 0:
            raise InputError("response must be nonempty")
        self._check_ids(response_ids, "response")
        enc = self.encode(prompt_ids)
        logits, _ = self.decode(enc, [BOS_ID, *response_ids[:-1]])
        return ops.token_log_probs(logits, response_ids), self.value_estimate(prompt_ids, enc)

    def value_estimate(self, prompt_ids: Sequence[int], encoder_states: Optional[Tensor] = None) -> Tensor:
        """Scalar V(x) from the mean-pooled encoder states."""
        enc = encoder_states if encoder_states is not None else self.encode(prompt_ids)
        pooled = ops.mean(enc, axis=0, keepdims=True)
        if not self.config.value_shares_trunk:
            pooled = pooled.detach()
        value = linear(pooled, self.params["value.w"], self.params["value.b"])
        return ops.reshape(value, ())

    # -------------------------
    # generation
    # -------------------------
    def generate(
        self,
        prompt_ids: Sequence[int],
        sampling: SamplingConfig,
        n_candidates: int = 1,
        rng: Optional[np.random.Generator] = None,
    ) -> List[Candidate]:
        """Sample `n_candidates` responses, recording per-token log-probabilities
        under the untempered policy and the traced cross-attention of each step."""
        if n_candidates < 1:
            raise InputError(f"n_candidates must be >= 1, got {n_candidates}")
        sampler = SamplerFactory.get_sampler(sampling)
        rng = rng if rng is not None else np.random.default_rng(sampling.seed)
        with no_grad():
            enc = self.encode(prompt_ids)
        layers = tuple(self._traced)
        candidates: List[Candidate] = []
        for _ in range(n_candidates):
            tokens: List[int] = []
            logps: List[float] = []
            rows: List[np.ndarray] = []
            for _step in range(self.config.max_response_len):
                logits, step_rows = self.decode_step(enc, tokens)
                shifted = logits - logits.max()
                log_policy = shifted - np.log(np.sum(np.exp(shifted)))
                token = sampler.choose(logits, rng)
                tokens.append(token)
                logps.append(float(log_policy[token]))
                rows.append(step_rows)
                if token == EOS_ID:
                    break
            trace = AttentionTrace(len(prompt_ids), layers, np.stack(rows, axis=0))
            candidates.append(Candidate(tokens, np.asarray(logps, dtype=np.float64), trace))
        logger.debug("generated {} candidates for prompt of length {}", n_candidates, len(prompt_ids))
        return candidates
