"""Settings and logging setup."""

from exstruct.core.config import Settings, get_settings
from exstruct.core.logging import configure_logging

__all__ = ["Settings", "get_settings", "configure_logging"]
