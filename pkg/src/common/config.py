# Run Configuration
# Defaults and the validated configuration handed to every CLI workflow

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from common.errors import ConfigError

DEFAULT_ALPHA = 0.5
DEFAULT_TARGET_FMR = 0.001
DEFAULT_RULE = "min"
DEFAULT_MODE = "both"
DEFAULT_SEED = 0
DEFAULT_JOBS = 1

RULES = ("min", "any")
MODES = ("morphs_as_references", "morphs_as_probes", "both")

LOG_LEVEL_ENV = "FACEMORPH_LOG_LEVEL"


@dataclass
class RunConfig:
    """Validated settings for one CLI invocation"""
    subcommand: str
    inputs: Dict[str, Path] = field(default_factory=dict)
    output: Optional[Path] = None
    alpha: float = DEFAULT_ALPHA
    target_fmr: float = DEFAULT_TARGET_FMR
    mmpmr_rule: str = DEFAULT_RULE
    mode: str = DEFAULT_MODE
    jobs: int = DEFAULT_JOBS
    seed: int = DEFAULT_SEED

    def validate(self) -> "RunConfig":
        """Check ranges and input files; raises ConfigError"""
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 < self.target_fmr < 1.0:
            raise ConfigError(f"target FMR must lie in (0, 1), got {self.target_fmr}")
        if self.mmpmr_rule not in RULES:
            raise ConfigError(f"unknown MMPMR rule '{self.mmpmr_rule}' (expected one of {RULES})")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode '{self.mode}' (expected one of {MODES})")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        for name, path in self.inputs.items():
            if not Path(path).is_file():
                raise ConfigError(f"--{name.replace('_', '-')}: file not found: {path}")
        return self


def log_level_from_env(default: str = "INFO") -> int:
    """Logging level from FACEMORPH_LOG_LEVEL, falling back to `default`"""
    name = os.environ.get(LOG_LEVEL_ENV, default).upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.INFO
