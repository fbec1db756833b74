# === FILE: cagsr/cli/progress.py ===
from rich.console import Console

console = Console()
