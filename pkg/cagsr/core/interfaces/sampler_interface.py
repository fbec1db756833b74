# === FILE: cagsr/core/interfaces/sampler_interface.py ===
from abc import ABC, abstractmethod

import numpy as np


class Sampler(ABC):
    @abstractmethod
    def choose(self, logits: np.ndarray, rng: np.random.Generator) -> int:
        """Pick the next token id from a vector of unnormalised logits.
        Implementations must draw randomness only from `rng`.
        """
        raise NotImplementedError
