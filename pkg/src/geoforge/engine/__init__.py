"""Forward-chaining deduction engine over geometric facts."""

from .db import Fact, FactDB
from .matching import MatchStats, match_all
from .saturation import Budget, db_from_figure, pre_identify, saturate

__all__ = ["Fact", "FactDB", "MatchStats", "match_all", "Budget",
           "db_from_figure", "pre_identify", "saturate"]
