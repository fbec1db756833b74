# === FILE: tests/conftest.py ===
from typing import Callable

import numpy as np
import pytest

from cagsr.core.autodiff.tensor import Tensor
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.config import ModelConfig


def tiny_config(**overrides) -> ModelConfig:
    base = dict(
        vocab_size=16,
        d_model=8,
        n_heads=2,
        n_encoder_layers=2,
        n_decoder_layers=2,
        d_ff=16,
        max_prompt_len=8,
        max_response_len=4,
        trace_layers=2,
    )
    base.update(overrides)
    return ModelConfig(**base)


def numeric_grad(f: Callable[[], float], t: Tensor, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of scalar `f` with respect to every entry of `t`."""
    grad = np.zeros_like(t.data)
    flat = t.data.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = f()
        flat[i] = orig - h
        down = f()
        flat[i] = orig
        grad.reshape(-1)[i] = (up - down) / (2 * h)
    return grad


@pytest.fixture
def tiny_model() -> PolicyModel:
    return PolicyModel(tiny_config(), seed=0)


@pytest.fixture
def tiny_model64() -> PolicyModel:
    # larger init so gradients are well away from zero
    return PolicyModel(tiny_config(dtype="float64", init_std=0.3), seed=1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
