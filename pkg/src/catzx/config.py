import argparse
import logging
import os
from typing import Literal, Optional, Sequence

from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

DEFAULT_ENV_FILE = "catzx.env"


class Settings(BaseModel):
    strategy: Literal["cats", "bss", "naive"] = Field("cats", description="Decomposition strategy")
    workers: int = Field(1, ge=1, description="Worker processes for the amplitude loop")
    seed: int = Field(0, ge=0, description="Seed for circuit generators")
    gadget_fusion: bool = Field(False, description="Fuse phase gadgets with identical legs")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    split_depth: int = Field(3, ge=0, description="Tree depth at which subtrees go to workers")


def load_config(argv: Optional[Sequence[str]] = None) -> Optional[str]:
    """Load the --env file into the environment when it exists; return its path."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--env", type=str, default=DEFAULT_ENV_FILE, help="Path to env file")
    args, _ = parser.parse_known_args(argv)
    env_file = args.env
    if os.path.exists(env_file):
        load_dotenv(env_file)
        logger.info(f"[CONFIG] Loaded environment from {env_file}")
        return env_file
    logger.info(f"[CONFIG] Env file {env_file} not found, using system environment.")
    return None


def get_settings() -> Settings:
    """Settings from CATZX_* environment variables; raises pydantic.ValidationError on bad values."""
    values = {
        "strategy": os.environ.get("CATZX_STRATEGY", "cats"),
        "workers": os.environ.get("CATZX_WORKERS", "1"),
        "seed": os.environ.get("CATZX_SEED", "0"),
        "gadget_fusion": os.environ.get("CATZX_GADGET_FUSION", "false"),
        "log_level": os.environ.get("CATZX_LOG_LEVEL", "INFO").upper(),
        "split_depth": os.environ.get("CATZX_SPLIT_DEPTH", "3"),
    }
    settings = Settings.model_validate(values)
    logger.debug(f"[CONFIG] {settings.model_dump()}")
    return settings
