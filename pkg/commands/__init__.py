from .classify import run_classify
from .hypotheses import run_hypotheses
from .problem_file import LoadedConfig, load_config, load_config_text
from .result import EXIT_FAULT, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_VIOLATION, CommandResult
from .solve import run_solve
from .verify import run_verify

__all__ = [
    "run_solve",
    "run_classify",
    "run_verify",
    "run_hypotheses",
    "load_config",
    "load_config_text",
    "LoadedConfig",
    "CommandResult",
    "EXIT_OK",
    "EXIT_FAULT",
    "EXIT_INCONCLUSIVE",
    "EXIT_VIOLATION",
]
