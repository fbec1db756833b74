# === FILE: cagsr/__init__.py ===
"""CAGSR package initializer."""
__version__ = "0.1.0"
