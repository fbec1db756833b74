# === FILE: cagsr/core/autodiff/__init__.py ===
"""Reverse-mode automatic differentiation over numpy arrays, plus Adam."""
from cagsr.core.autodiff.tensor import Tape, Tensor, backward, no_grad
from cagsr.core.autodiff.optim import AdamState, adam_step

__all__ = ["Tape", "Tensor", "backward", "no_grad", "AdamState", "adam_step"]
