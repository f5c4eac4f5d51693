"""Cost allocation for cooperative ridesharing games.

Exact pickup-and-delivery routing, optimal ridesharing plans, and the
nucleolus (exact or over feasible coalitions only) computed by staged
maximin LPs with coalition generation.
"""

from .coalition import Allocation, excess, excess_vector, lex_compare
from .exceptions import NumericalError, ParseError, ScaleLimitError
from .game import CharTable, InstanceGame, TableGame, as_game
from .instance import (
    CharTableInput,
    Instance,
    bundled_instance,
    load_char_table,
    load_instance,
    parse_char_table,
    parse_instance,
    random_instance,
)
from .nucleolus import NucleolusResult, brute_nucleolus, core_check, run
from .report import RunReport, emit, solution_path
from .rsp import Partition, solve_rsp
from .tsppd import Route, solve_tsppd

__all__ = [
    "Allocation", "CharTable", "CharTableInput", "Instance", "InstanceGame",
    "NucleolusResult", "NumericalError", "ParseError", "Partition", "Route",
    "RunReport", "ScaleLimitError", "TableGame", "as_game", "brute_nucleolus",
    "bundled_instance", "core_check", "emit", "excess", "excess_vector",
    "lex_compare", "load_char_table", "load_instance", "parse_char_table",
    "parse_instance", "random_instance", "run", "solution_path", "solve_rsp",
    "solve_tsppd",
]

__version__ = "0.1.0"
