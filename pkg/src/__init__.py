import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from loguru import logger

# format logging for a more user-friendly approach
logger.remove(0)
logger.add(sys.stderr, format="<level>{level}</level>: <level>{message}</level>", colorize=True)

_THIS_DIR = os.path.dirname(os.path.abspath(__file__))
ROOT_PATH = str(Path(os.path.join(_THIS_DIR, "..")).resolve())

# lexical resources shipped with the repo, the directory can be moved via env variable
ASSETS_DIR = os.environ.get("BLUEBIRD_ASSETS_DIR", os.path.join(ROOT_PATH, "assets"))

OUTPUT_DIR = os.path.join(ROOT_PATH, "runs")


class SchemaError(ValueError):
    """Raised whenever an input file or a configuration doesn't follow the expected schema"""


class ConfigError(SchemaError):
    pass


@dataclass
class GeneralParams:
    exp_name: str = "bluebird"
    random_seed: int = 42
    output_dir: str = OUTPUT_DIR
    log_wandb: bool = False
    wandb_project: str = None

    @property
    def exp_dir(self) -> str:
        return os.path.join(self.output_dir, self.exp_name)

    # one sub-directory of the experiment dir for each command family
    def phase_dir(self, phase: str) -> str:
        return os.path.join(self.exp_dir, phase)

    @classmethod
    def from_parse(cls, general_section: dict):

        valid_keys = {field.name for field in fields(cls)}
        unknown_keys = set(general_section) - valid_keys
        if unknown_keys:
            raise ConfigError(f"Unknown general parameters: {sorted(unknown_keys)}")

        return cls(**general_section)
