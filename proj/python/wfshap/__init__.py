"""Shapley attribution for multi-component workflows."""

from ._core import (
    AttributionResult,
    Error,
    GameTable,
    IncompleteGameError,
    Method,
    SynergyMatrix,
    SyntheticGameSpec,
    ValidationError,
    consistency_rate,
    format_game_json,
    optimal_configuration,
    parse_game_json,
    read_game_file,
    shapley_exact,
    shapley_permutation,
    synergy_matrix,
    synthesize_game,
)

from ._core import __version__
