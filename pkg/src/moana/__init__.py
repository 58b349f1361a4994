"""Multi-objective ant nesting optimizer with benchmark problems and statistics."""
from .archive import Archive, ArchiveMember, GridSpec, cell_index
from .core import (ConstraintReport, Problem, UsageError, constrained_dominates, dominates,
                   non_dominated_filter)
from .engine import MutationParams, RunConfig, RunResult, WorkerAnt, polynomial_mutation, run
from .metrics import RankTable, friedman, igd, rank_table, wilcoxon_rank_sum
from .problems import get_problem, sample_reference_front

__version__ = "0.1.0"
