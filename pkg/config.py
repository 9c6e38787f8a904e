import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()


class EngineConfig:
    """Decision engine configuration"""

    @property
    def max_fiber_degree(self) -> int:
        return int(os.getenv("BOTT_MAX_FIBER_DEGREE", "4"))

    @property
    def enumeration_log_every(self) -> int:
        return int(os.getenv("BOTT_ENUM_LOG_EVERY", "100"))


class CliConfig:
    """Command-line front end configuration"""

    @property
    def default_format(self) -> str:
        return os.getenv("BOTT_REPORT_FORMAT", "text")

    @property
    def log_level(self) -> str:
        return os.getenv("BOTT_LOG_LEVEL", "WARNING").upper()

    @property
    def max_workers(self) -> int:
        return int(os.getenv("BOTT_MAX_WORKERS", "4"))

    @property
    def examples_dir(self) -> Path:
        default = Path(__file__).resolve().parent / "data" / "examples"
        return Path(os.getenv("BOTT_EXAMPLES_DIR", str(default)))


# Global configuration instances
engine_config = EngineConfig()
cli_config = CliConfig()
