"""Configuration utilities for reach-bounds."""

from .config import Settings, settings
from .options import AnalyzeConfig

__all__ = ["AnalyzeConfig", "Settings", "settings"]
