"""Exception hierarchy for the bridge.

Everything raised on purpose by this package derives from BridgeError, so
callers can catch one base class at the boundary. Codec errors additionally
carry the byte offset at which decoding failed.
"""

from __future__ import annotations


class BridgeError(Exception):
    """Base class for all errors raised by rbridge."""


# --- value model ---------------------------------------------------------

class InvalidName(BridgeError):
    """A name is not a syntactically valid R name."""


class InvalidValue(BridgeError):
    """A BridgeValue violates the value-model invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DuplicatePath(BridgeError):
    """The same dotted path occurs twice in a merge."""


class PrefixConflict(BridgeError):
    """A dotted path is used both as a leaf and as an interior node."""


class RaggedColumns(BridgeError):
    """Table columns have differing lengths."""


class BadColumnKind(BridgeError):
    """A table column is not a Numeric/Logical/Character vector."""


class DuplicateName(BridgeError):
    """A name occurs more than once where uniqueness is required."""


# --- codec ---------------------------------------------------------------

class CodecError(BridgeError):
    """Base class for RBW encode/decode failures."""


class InvalidWorkspace(CodecError):
    """encode() was handed a workspace that fails validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid workspace: " + "; ".join(self.violations))


class BadMagic(CodecError):
    """The input does not start with the RBW1 magic."""


class UnsupportedVersion(CodecError):
    """The document declares a format version this codec does not speak."""


class Truncated(CodecError):
    """The input ended (or a declared length overran the buffer)."""

    def __init__(self, offset: int, detail: str = ""):
        self.offset = offset
        msg = f"Truncated at offset {offset}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class MalformedValue(CodecError):
    """A structurally invalid value was encountered while decoding."""

    def __init__(self, offset: int, detail: str):
        self.offset = offset
        super().__init__(f"malformed value at offset {offset}: {detail}")


class DuplicateEntryName(CodecError):
    """Two top-level workspace entries share a name."""


# --- text form -----------------------------------------------------------

class TextFormError(BridgeError):
    """The JSON text form cannot be parsed into a value."""


# --- script generation ---------------------------------------------------

class InvalidPlan(BridgeError):
    """A ScriptPlan violates its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid plan: " + "; ".join(self.violations))


# --- executor -------------------------------------------------------------

class InterpreterNotFound(BridgeError):
    """No usable R installation could be resolved."""

    def __init__(self, tried):
        self.tried = list(tried)
        locs = ", ".join(self.tried) if self.tried else "(nothing to try)"
        super().__init__(f"no R interpreter found; tried: {locs}")


class VersionUnparseable(BridgeError):
    """The interpreter's version probe output had no recognizable version."""


class ExecutionFailure(BridgeError):
    """The batch process failed at the process level (no R error file)."""

    def __init__(self, message, *, exit_status=None, stdout="", stderr=""):
        self.exit_status = exit_status
        self.stdout = stdout
        self.stderr = stderr
        super().__init__(message)


class SpawnFailure(ExecutionFailure):
    """The interpreter process could not be started."""


class BatchTimeout(ExecutionFailure):
    """The batch process exceeded its time limit and was killed."""


class TraceExhausted(BridgeError):
    """The scripted executor was invoked more times than its trace allows."""


class PredicateFailed(BridgeError, AssertionError):
    """A scripted-executor predicate rejected the generated script."""


# --- session ---------------------------------------------------------------

class SessionClosed(BridgeError):
    """Operation attempted on a closed session."""


class TempDirUnavailable(BridgeError):
    """The per-session temporary directory could not be created."""


class RError(BridgeError):
    """An error raised inside R, forwarded from the batch run."""

    def __init__(self, message, *, stdout="", stderr=""):
        self.r_message = message
        self.stdout = stdout
        self.stderr = stderr
        super().__init__(message)


class ObjectNotFound(RError):
    """A pulled name had no binding in the R session."""

    def __init__(self, name, message, **kw):
        self.name = name
        super().__init__(message, **kw)


class DecodeFailure(BridgeError):
    """The result workspace written by R could not be decoded."""


class IoFailure(BridgeError):
    """Temp-file housekeeping failed; carries the paths left behind."""

    def __init__(self, message, remaining=()):
        self.remaining = list(remaining)
        super().__init__(message)
