"""A typed stream scripting language and its pull-based streaming engine."""

from .engine import Program, build, run, run_script
from .frame import EngineConfig

__version__ = "0.1.0"

__all__ = ["EngineConfig", "Program", "build", "run", "run_script", "__version__"]
