"""Two-party protocol: blueprint checks P1-P4 and the equivalence flow."""

from .config import Config, load_config
from .statement import PublicStatement, tape_size
from .session import (Report, Session, run_blueprint, run_local, run_local_blueprint,
                      run_main, run_p1, run_p2, run_p3, run_p4)

__all__ = ["Config", "load_config", "PublicStatement", "tape_size", "Report", "Session",
           "run_blueprint", "run_local", "run_local_blueprint", "run_main",
           "run_p1", "run_p2", "run_p3", "run_p4"]
