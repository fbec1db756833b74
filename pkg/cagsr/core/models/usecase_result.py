# === FILE: cagsr/core/models/usecase_result.py ===
from dataclasses import dataclass, field
from typing import Any, Dict


@dataclass
class UseCaseResult:
    """
    Standard return object for use-cases.
    - results: map of artifact kind -> path or value (e.g. {'checkpoint': 'runs/cagsr/model.ckpt'})
    - elapsed: wall-clock seconds the use case took
    """
    results: Dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0
