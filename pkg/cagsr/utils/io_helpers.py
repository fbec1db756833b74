# === FILE: cagsr/utils/io_helpers.py ===
import os
import platform
import sys
from typing import Dict

import numpy as np

import cagsr


def ensure_outputs_dir(outputs_dir: str) -> str:
    """Ensure the outputs directory exists and return its absolute path."""
    outputs_dir = os.path.abspath(outputs_dir)
    os.makedirs(outputs_dir, exist_ok=True)
    return outputs_dir


def environment_stamp() -> Dict[str, str]:
    """Versions that identify the environment a run was produced in."""
    return {
        "cagsr": cagsr.__version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
    }
