# === FILE: cagsr/factory/sampler_factory.py ===
from cagsr.core.interfaces.sampler_interface import Sampler
from cagsr.core.model.sampling import GreedySampler, NucleusSampler, TopKSampler
from cagsr.core.models.config import SamplingConfig
from cagsr.core.models.schemas import SamplingStrategy


class SamplerFactory:
    @staticmethod
    def get_sampler(cfg: SamplingConfig) -> Sampler:
        """Return the sampler described by `cfg`.
        - temperature 0 always means greedy decoding.
        - 'top_k' truncates to the k most likely tokens (k=0 keeps all).
        - 'nucleus' truncates to the smallest set with mass >= top_p.
        """
        if cfg.temperature == 0.0:
            return GreedySampler()
        if cfg.strategy == SamplingStrategy.TOP_K:
            return TopKSampler(k=cfg.top_k, temperature=cfg.temperature)
        if cfg.strategy == SamplingStrategy.NUCLEUS:
            return NucleusSampler(p=cfg.top_p, temperature=cfg.temperature)
        raise ValueError(f"Unknown sampling strategy: {cfg.strategy}")
