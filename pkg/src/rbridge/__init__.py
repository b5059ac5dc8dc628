"""rbridge: run R code from Python over batch-mode subprocesses.

Values cross the boundary through the RBW binary workspace format; R
commands are cached and executed exactly once when a result is pulled;
session state persists across pulls via an R session image. See README
for the protocol and the CLI.
"""

from . import codec, textform
from .errors import (
    BridgeError,
    CodecError,
    DecodeFailure,
    ExecutionFailure,
    InterpreterNotFound,
    InvalidName,
    InvalidPlan,
    InvalidValue,
    InvalidWorkspace,
    ObjectNotFound,
    RError,
    SessionClosed,
)
from .executor import (
    BatchOutcome,
    InterpreterInfo,
    Limits,
    RBatchExecutor,
    ScriptedCall,
    ScriptedExecutor,
    discover_r,
    execute_batch,
)
from .rlang import escape_r_string, validate_r_name
from .scriptgen import ScriptPlan, generate_pull_script
from .session import Session, SessionConfig, init
from .values import (
    NULL,
    BridgeValue,
    Cell,
    Character,
    Logical,
    Null,
    Numeric,
    Record,
    Table,
    Workspace,
    as_bridge_value,
    merge_entries,
    table_from_columns,
    validate,
    validate_workspace,
)

__version__ = "0.1.0"

__all__ = [
    "BatchOutcome",
    "BridgeError",
    "BridgeValue",
    "Cell",
    "Character",
    "CodecError",
    "DecodeFailure",
    "ExecutionFailure",
    "InterpreterInfo",
    "InterpreterNotFound",
    "InvalidName",
    "InvalidPlan",
    "InvalidValue",
    "InvalidWorkspace",
    "Limits",
    "Logical",
    "NULL",
    "Null",
    "Numeric",
    "ObjectNotFound",
    "RBatchExecutor",
    "RError",
    "Record",
    "ScriptPlan",
    "ScriptedCall",
    "ScriptedExecutor",
    "Session",
    "SessionClosed",
    "SessionConfig",
    "Table",
    "Workspace",
    "as_bridge_value",
    "codec",
    "discover_r",
    "escape_r_string",
    "execute_batch",
    "generate_pull_script",
    "init",
    "merge_entries",
    "table_from_columns",
    "textform",
    "validate",
    "validate_r_name",
    "validate_workspace",
]
