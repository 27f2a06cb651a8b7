"""Similarity games between finite structures."""
from .ordinal import Ordinal, OMEGA, parse as parse_ordinal, render as render_ordinal, nat_sum
from .structure import Structure, Vocabulary
from .game import (ADAM, EVE, GameParams, Position, CorePosition, AdamMove, PositionalStrategy,
                   solve, verify_eve_strategy, compose, eve_trivial_strategy, winning_heights,
                   solve_infinite, BudgetExceeded)

__all__ = [
    "Ordinal", "OMEGA", "parse_ordinal", "render_ordinal", "nat_sum", "Structure", "Vocabulary",
    "ADAM", "EVE", "GameParams", "Position", "CorePosition", "AdamMove", "PositionalStrategy",
    "solve", "verify_eve_strategy", "compose", "eve_trivial_strategy", "winning_heights",
    "solve_infinite", "BudgetExceeded",
]
