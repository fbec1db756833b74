# === FILE: cagsr/exceptions.py ===
class CagsrError(Exception):
    """Base class for CAGSR errors."""


class ShapeError(CagsrError):
    """Raised when tensor dimensions do not line up."""


class ContractError(CagsrError):
    """Raised when an operation is called outside its contract."""


class InputError(CagsrError):
    """Raised for invalid prompts, responses or token ids."""


class ConfigError(CagsrError):
    """Raised when a configuration value is unknown or cannot be satisfied."""


class DivergenceError(ContractError):
    """Raised when a loss or probability ratio becomes non-finite."""


class RolloutError(CagsrError):
    """Raised when too few rollout entries survive generation."""


class SerializationError(CagsrError):
    """Raised during serialization failures."""


class RepositoryError(CagsrError):
    """Raised when reading or writing artifacts fails."""
