"""Two-player safety games over concurrent programs under TSO store-buffer semantics."""
from .arena import Deadlock, GameSpec, Group, UpdatePolicy, build_arena, classify
from .game import A, B, SafetyGame, extract_strategies, play, solve
from .program import Program, parse_program, format_program, validate
from .reductions import UndecidableVariant, solve_tso
from .semantics import Configuration, initial_configuration

__all__ = [
    "A", "B", "Configuration", "Deadlock", "GameSpec", "Group", "Program", "SafetyGame",
    "UndecidableVariant", "UpdatePolicy", "build_arena", "classify", "extract_strategies",
    "format_program", "initial_configuration", "parse_program", "play", "solve", "solve_tso",
    "validate",
]
