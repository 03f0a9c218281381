"""planlearn: learn to predict SQL query runtimes from PostgreSQL plans."""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def bundled_template_dir() -> Path:
    """Directory holding the 22 bundled query templates and their manifest."""
    return Path(str(resources.files(__name__) / "data" / "templates"))


def bundled_plan_path(name: str = "tpch_q_limit.json") -> Path:
    """Path of a bundled fixture plan document."""
    return Path(str(resources.files(__name__) / "data" / "plans" / name))
