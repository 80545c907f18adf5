"""Fully dynamic maximal matching without length-3 augmenting paths.

Maintains a 3/2-approximate maximum cardinality matching under edge
insertions and deletions in expected amortized O(sqrt(n)) time, with an
independent invariant verifier, an exact small-instance oracle, workload
generators, and epoch-level metrics.
"""

from .core import Config, FreeNeighborIndex, IndexableSet, State, default_threshold, new_state
from .engine import (
    PROCEDURE_NAMES,
    ProcedureTrace,
    apply_update,
    delete_edge,
    insert_edge,
)
from .metrics import EpochRecord, EpochSetRecord, EpochTracker, RunStats, classify_epoch_set, export
from .verifier import (
    OracleLimitError,
    Violation,
    ViolationReport,
    brute_force_mcm,
    check_invariants,
    check_ratio,
    find_3_aug_path,
)
from .workload import (
    DELETE,
    INSERT,
    SequenceFormatError,
    UpdateOp,
    UpdateSequence,
    extend_with_teardown,
    gen_named,
    gen_random,
    parse,
    serialize,
)

__version__ = "0.1.0"

__all__ = [
    "Config",
    "State",
    "FreeNeighborIndex",
    "IndexableSet",
    "new_state",
    "default_threshold",
    "ProcedureTrace",
    "PROCEDURE_NAMES",
    "insert_edge",
    "delete_edge",
    "apply_update",
    "ViolationReport",
    "Violation",
    "check_invariants",
    "find_3_aug_path",
    "brute_force_mcm",
    "check_ratio",
    "OracleLimitError",
    "UpdateOp",
    "UpdateSequence",
    "INSERT",
    "DELETE",
    "gen_random",
    "gen_named",
    "extend_with_teardown",
    "parse",
    "serialize",
    "SequenceFormatError",
    "EpochTracker",
    "EpochRecord",
    "EpochSetRecord",
    "RunStats",
    "classify_epoch_set",
    "export",
]
