# === FILE: cagsr/core/entities/vocabulary.py ===
from dataclasses import dataclass, field
from typing import Dict, List

PAD, BOS, EOS, UNK = "<pad>", "<bos>", "<eos>", "<unk>"
PAD_ID, BOS_ID, EOS_ID, UNK_ID = 0, 1, 2, 3
SPECIAL_TOKENS = [PAD, BOS, EOS, UNK]
SPECIAL_IDS = frozenset({PAD_ID, BOS_ID, EOS_ID, UNK_ID})


@dataclass
class Vocabulary:
    """Closed token inventory; position in `id_to_token` is the id."""
    id_to_token: List[str] = field(default_factory=lambda: list(SPECIAL_TOKENS))
    token_to_id: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.id_to_token[: len(SPECIAL_TOKENS)] != SPECIAL_TOKENS:
            raise ValueError("vocabulary must start with the special tokens")
        self.token_to_id = {tok: i for i, tok in enumerate(self.id_to_token)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise ValueError("vocabulary contains duplicate tokens")

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def add(self, token: str) -> int:
        if token not in self.token_to_id:
            self.token_to_id[token] = len(self.id_to_token)
            self.id_to_token.append(token)
        return self.token_to_id[token]

    def id_of(self, token: str) -> int:
        return self.token_to_id.get(token, UNK_ID)

    def token_of(self, idx: int) -> str:
        return self.id_to_token[idx]
