"""The push/run/pull/clear lifecycle over batch-mode R.

A Session stages pushed values in an on-disk workspace file, caches run()
code without executing anything, and only spawns R when pull() demands a
result. Each pull generates a script that restores the previous session
image, binds staged values, runs exactly the blocks cached since the last
successful pull, exports the requested names, and snapshots the session
image again — so each command block is evaluated exactly once even though
every pull is a fresh R process.

A failed pull keeps staged values and cached blocks so the caller can
correct and retry; a successful pull drains both. clear() deletes all
session files and resets the lifecycle; the session stays usable.

Sessions are single-owner: use from one thread at a time. Independent
sessions never share temp files.
"""

from __future__ import annotations

import os
import re
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional, Sequence

from . import codec, prelude
from .errors import (
    CodecError,
    DecodeFailure,
    ExecutionFailure,
    InvalidName,
    InvalidValue,
    IoFailure,
    ObjectNotFound,
    RError,
    SessionClosed,
    TempDirUnavailable,
)
from .executor import Limits, RBatchExecutor, discover_r
from .rlang import validate_r_name
from .scriptgen import ScriptPlan, generate_pull_script
from .values import Workspace, as_bridge_value, validate

STAGED_NAME = "staged.rbw"
RESULT_NAME = "result.rbw"
IMAGE_NAME = "session.RData"
JOURNAL_NAME = "pending_commands.R"

_NOT_FOUND_RE = re.compile(r"^object '(.+)' not found$")


@dataclass(frozen=True)
class SessionConfig:
    """Knobs for session creation; defaults use the system R automatically."""

    r_path: Optional[str] = None
    library_paths: tuple = ()
    temp_root: Optional[str] = None
    timeout: Optional[float] = None
    echo: bool = False

    def __init__(self, r_path=None, library_paths=(), temp_root=None,
                 timeout=None, echo=False):
        object.__setattr__(self, "r_path", r_path)
        object.__setattr__(self, "library_paths", tuple(library_paths))
        object.__setattr__(self, "temp_root", temp_root)
        object.__setattr__(self, "timeout", timeout)
        object.__setattr__(self, "echo", echo)


class Session:
    """One logical R session spanning many batch invocations."""

    def __init__(self, config: SessionConfig = SessionConfig(), *, executor=None):
        self.config = config
        if executor is None:
            executor = RBatchExecutor(
                discover_r(config.r_path, config.library_paths)
            )
        self.executor = executor
        self.info = executor.info
        try:
            self.temp_dir = tempfile.mkdtemp(prefix="rbridge-", dir=config.temp_root)
        except OSError as e:
            raise TempDirUnavailable(f"cannot create session temp dir: {e}") from None
        self._staged = Workspace()
        self._cached: list = []
        self._pulls_done = 0
        self._has_image = False
        self._closed = False

    # --- context management ---------------------------------------------

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False

    # --- helpers -----------------------------------------------------------

    def _check_open(self):
        if self._closed:
            raise SessionClosed("session is closed")

    def _path(self, name: str) -> str:
        return os.path.join(self.temp_dir, name)

    @property
    def staged(self) -> Workspace:
        return self._staged

    @property
    def cached_blocks(self) -> tuple:
        return tuple(self._cached)

    @property
    def pulls_done(self) -> int:
        return self._pulls_done

    # --- lifecycle -----------------------------------------------------------

    def push(self, name: str, value) -> "Session":
        """Stage ``value`` for R under ``name``; re-pushing a name replaces it."""
        self._check_open()
        if not validate_r_name(name):
            raise InvalidName(f"{name!r} is not a valid R name")
        v = as_bridge_value(value)
        violations = validate(v)
        if violations:
            raise InvalidValue(violations)
        self._staged = self._staged.set(name, v)
        with open(self._path(STAGED_NAME), "wb") as f:
            f.write(codec.encode(self._staged))
        return self

    def run(self, code: str) -> "Session":
        """Cache an R command block; nothing executes until the next pull."""
        self._check_open()
        if not isinstance(code, str):
            raise TypeError("run() takes R source as a string")
        self._cached.append(code)
        with open(self._path(JOURNAL_NAME), "a", encoding="utf-8", newline="\n") as f:
            f.write(code)
            if not code.endswith("\n"):
                f.write("\n")
        return self

    def pull(self, names: Sequence[str]):
        """Execute everything cached since the last pull and fetch ``names``.

        Returns (dict name -> BridgeValue, BatchOutcome). On success the
        staged pushes and cached blocks are drained; on failure they are
        kept for a corrected retry.
        """
        self._check_open()
        names = list(names)
        for n in names:
            if not validate_r_name(n):
                raise InvalidName(f"{n!r} is not a valid R name")
        pull_names = tuple(dict.fromkeys(names))

        attempt = self._pulls_done + 1
        script_path = self._path(f"script_{attempt}.R")
        error_path = self._path(f"rerror_{attempt}.txt")
        result_path = self._path(RESULT_NAME)

        plan = ScriptPlan(
            prelude_source=prelude.source(),
            temp_dir=self.temp_dir,
            session_image=self._path(IMAGE_NAME),
            staged_file=self._path(STAGED_NAME),
            result_file=result_path,
            error_file=error_path,
            command_blocks=tuple(self._cached),
            pull_names=pull_names,
        )
        with open(script_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(generate_pull_script(plan))
        for stale in (result_path, result_path + ".tmp", error_path):
            if os.path.exists(stale):
                os.remove(stale)

        outcome = self.executor.execute_batch(
            script_path, self.temp_dir,
            limits=Limits(timeout=self.config.timeout),
            error_file=error_path,
        )
        self._write_captures(attempt, outcome)
        if self.config.echo:
            self._echo(outcome)

        if outcome.exit_status != 0:
            self._raise_r_failure(outcome, pull_names)

        try:
            with open(result_path, "rb") as f:
                result_ws, _ = codec.decode(f.read())
        except OSError as e:
            raise DecodeFailure(f"batch run succeeded but left no result file: {e}") from None
        except CodecError as e:
            raise DecodeFailure(f"cannot decode result file: {e}") from None

        values = {}
        for n in pull_names:
            v = result_ws.get(n)
            if v is None and n not in result_ws.names():
                raise DecodeFailure(f"result file is missing pulled name {n!r}")
            values[n] = v

        # success: drain staged + cached, keep the image for the next pull
        self._staged = Workspace()
        for p in (self._path(STAGED_NAME), self._path(JOURNAL_NAME)):
            if os.path.exists(p):
                os.remove(p)
        self._cached = []
        self._has_image = True
        self._pulls_done += 1
        return values, outcome

    def clear(self) -> "Session":
        """Delete all session files and reset state; the session stays open."""
        self._check_open()
        leftovers = []
        for entry in sorted(os.listdir(self.temp_dir)):
            p = self._path(entry)
            try:
                os.remove(p)
            except OSError:
                leftovers.append(p)
        self._staged = Workspace()
        self._cached = []
        self._has_image = False
        self._pulls_done = 0
        if leftovers:
            raise IoFailure("could not delete all session files", leftovers)
        return self

    def close(self) -> None:
        """Clear and drop the temp dir; all further operations raise."""
        if self._closed:
            return
        try:
            self.clear()
            os.rmdir(self.temp_dir)
        except (IoFailure, OSError):
            pass
        self._closed = True

    # --- internals ---------------------------------------------------------

    def _write_captures(self, attempt: int, outcome) -> None:
        for stream, text in (("stdout", outcome.stdout), ("stderr", outcome.stderr)):
            with open(self._path(f"{stream}_{attempt}.txt"), "w", encoding="utf-8") as f:
                f.write(text)

    def _echo(self, outcome) -> None:
        if outcome.stdout:
            sys.stdout.write(outcome.stdout)
        if outcome.stderr:
            sys.stderr.write(outcome.stderr)

    def _raise_r_failure(self, outcome, pull_names):
        msg = outcome.error_message
        if msg is None:
            raise ExecutionFailure(
                f"R exited with status {outcome.exit_status} and no error file; "
                f"stderr: {outcome.stderr.strip()[-2000:]}",
                exit_status=outcome.exit_status,
                stdout=outcome.stdout,
                stderr=outcome.stderr,
            )
        m = _NOT_FOUND_RE.match(msg.strip())
        if m and m.group(1) in pull_names:
            raise ObjectNotFound(m.group(1), msg, stdout=outcome.stdout, stderr=outcome.stderr)
        raise RError(msg, stdout=outcome.stdout, stderr=outcome.stderr)


def init(config: SessionConfig = SessionConfig(), *, executor=None) -> Session:
    """Create a session: resolve R, make the private temp dir, start clean."""
    return Session(config, executor=executor)
