"""Certified lower bounds on covering numbers C_lambda(v, k, t)."""
from __future__ import annotations

__version__ = "0.1.0"
