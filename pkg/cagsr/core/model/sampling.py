# === FILE: cagsr/core/model/sampling.py ===
"""Next-token samplers: greedy, top-k and nucleus (top-p)."""
import numpy as np

from cagsr.core.interfaces.sampler_interface import Sampler


def _probabilities(logits: np.ndarray, temperature: float) -> np.ndarray:
    z = logits.astype(np.float64) / temperature
    z -= z.max()
    p = np.exp(z)
    return p / p.sum()


class GreedySampler(Sampler):
    """Temperature-zero limit: always the arg-max (lowest id wins ties)."""

    def choose(self, logits: np.ndarray, rng: np.random.Generator) -> int:
        return int(np.argmax(logits))


class TopKSampler(Sampler):
    def __init__(self, k: int = 0, temperature: float = 1.0):
        self.k = k
        self.temperature = temperature

    def choose(self, logits: np.ndarray, rng: np.random.Generator) -> int:
        p = _probabilities(logits, self.temperature)
        if 0 < self.k < p.size:
            # stable sort keeps the choice deterministic under ties
            keep = np.argsort(-p, kind="stable")[: self.k]
            mask = np.zeros_like(p)
            mask[keep] = 1.0
            p = p * mask
            p /= p.sum()
        return int(rng.choice(p.size, p=p))


class NucleusSampler(Sampler):
    def __init__(self, p: float = 1.0, temperature: float = 1.0):
        self.p = p
        self.temperature = temperature

    def choose(self, logits: np.ndarray, rng: np.random.Generator) -> int:
        probs = _probabilities(logits, self.temperature)
        if self.p < 1.0:
            order = np.argsort(-probs, kind="stable")
            cumulative = np.cumsum(probs[order])
            # smallest prefix whose mass reaches p
            cut = int(np.searchsorted(cumulative, self.p)) + 1
            keep = order[:cut]
            trimmed = np.zeros_like(probs)
            trimmed[keep] = probs[keep]
            probs = trimmed / trimmed.sum()
        return int(rng.choice(probs.size, p=probs))
