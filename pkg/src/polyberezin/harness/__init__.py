"""Check registry, configuration, reports and the suite runner."""

from .checks import REGISTRY, REQUIRED_TOPICS, CheckSpec, UnknownCheck, get_check
from .config import HarnessConfig, load_config
from .report import CheckReport
from .runner import run_check, run_suite
