from .config import build_session_config, parse_config_file
from .cli import main

__all__ = ["parse_config_file", "build_session_config", "main"]
