"""Locating an R installation and running generated scripts in batch mode.

The batch runner is the script-runner binary (an ``Rscript``-style
invocation) in --vanilla mode: no user profile or site files, no prompt,
stdout/stderr captured directly. Discovery order: explicit path, the
RBRIDGE_R_HOME environment variable, the system search path, then
conventional install directories (versioned subdirectories resolve to the
highest semantic version, which is how Windows multi-install setups pick
"the latest R").

The ScriptedExecutor replays canned outcomes while asserting predicates
over the generated script text, so the whole protocol is testable on
machines with no R at all.
"""

from __future__ import annotations

import os
import re
import shutil
import signal
import subprocess
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import (
    BatchTimeout,
    InterpreterNotFound,
    PredicateFailed,
    SpawnFailure,
    TraceExhausted,
    VersionUnparseable,
)

R_HOME_ENV = "RBRIDGE_R_HOME"
R_LIBS_ENV = "RBRIDGE_R_LIBS"

_VERSION_RE = re.compile(r"version\s+(\d+)\.(\d+)\.(\d+)")
_DIR_VERSION_RE = re.compile(r"(\d+)\.(\d+)\.(\d+)")


@dataclass(frozen=True)
class InterpreterInfo:
    """A resolved R batch runner."""

    path: str
    version: tuple
    library_paths: tuple = ()
    source: str = "explicit"  # explicit | env | search-path | conventional-dir


@dataclass(frozen=True)
class Limits:
    """Resource limits for one batch run."""

    timeout: Optional[float] = None


@dataclass
class BatchOutcome:
    """What one batch invocation did."""

    exit_status: int
    stdout: str
    stderr: str
    error_message: Optional[str] = None
    duration: float = 0.0


def _runner_names():
    return ("Rscript.exe",) if os.name == "nt" else ("Rscript",)


def _runner_under(home: str):
    """Candidate runner paths under an R installation root."""
    out = []
    for name in _runner_names():
        out.append(os.path.join(home, "bin", name))
        out.append(os.path.join(home, "bin", "x64", name))
        out.append(os.path.join(home, name))
    return out


def default_search_roots():
    """Conventional, platform-specific places that hold versioned R installs."""
    if sys.platform == "win32":
        return [
            os.path.join(os.environ.get("ProgramFiles", r"C:\Program Files"), "R"),
            os.path.join(os.environ.get("ProgramFiles(x86)", r"C:\Program Files (x86)"), "R"),
        ]
    if sys.platform == "darwin":
        return ["/Library/Frameworks/R.framework/Versions", "/opt/R"]
    return ["/opt/R"]


def default_fixed_candidates():
    """Conventional non-versioned runner locations."""
    if sys.platform == "win32":
        return []
    if sys.platform == "darwin":
        return [
            "/Library/Frameworks/R.framework/Resources/bin/Rscript",
            "/opt/homebrew/bin/Rscript",
            "/usr/local/bin/Rscript",
        ]
    return ["/usr/bin/Rscript", "/usr/local/bin/Rscript", "/usr/lib/R/bin/Rscript"]


def probe_interpreter(path: str) -> tuple:
    """Run a version query against a candidate runner and parse it.

    Returns (major, minor, patch). Raises SpawnFailure when the binary
    cannot run and VersionUnparseable when it answers nonsense.
    """
    try:
        proc = subprocess.run(
            [path, "--version"],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            timeout=30,
        )
    except OSError as e:
        raise SpawnFailure(f"cannot run {path!r}: {e}") from None
    except subprocess.TimeoutExpired:
        raise SpawnFailure(f"version probe of {path!r} timed out") from None
    text = proc.stdout.decode("utf-8", "replace") + proc.stderr.decode("utf-8", "replace")
    m = _VERSION_RE.search(text)
    if not m:
        raise VersionUnparseable(f"no version in output of {path!r} --version: {text[:200]!r}")
    return tuple(int(g) for g in m.groups())


def _versioned_runners(root: str):
    """(version, runner path) pairs under a versioned install root, best first."""
    try:
        subdirs = sorted(os.listdir(root))
    except OSError:
        return []
    found = []
    for sub in subdirs:
        m = _DIR_VERSION_RE.search(sub)
        if not m:
            continue
        version = tuple(int(g) for g in m.groups())
        home = os.path.join(root, sub)
        for runner in _runner_under(home):
            if os.path.isfile(runner):
                found.append((version, runner))
                break
    found.sort(key=lambda t: t[0], reverse=True)
    return found


def discover_r(
    r_path: Optional[str] = None,
    library_paths: Sequence[str] = (),
    *,
    env: Optional[dict] = None,
    search_roots: Optional[Sequence[str]] = None,
    fixed_candidates: Optional[Sequence[str]] = None,
    probe: Callable[[str], tuple] = probe_interpreter,
) -> InterpreterInfo:
    """Resolve an R installation (see module docstring for the order)."""
    env = dict(os.environ) if env is None else env
    libs = list(library_paths)
    if env.get(R_LIBS_ENV):
        libs.extend(p for p in env[R_LIBS_ENV].split(os.pathsep) if p)
    libs = tuple(dict.fromkeys(libs))

    def info(path, source):
        return InterpreterInfo(path=path, version=probe(path), library_paths=libs, source=source)

    tried = []

    # (1) explicit override wins outright; a bad one is an error, not a fallthrough
    if r_path:
        candidates = [r_path] + (_runner_under(r_path) if os.path.isdir(r_path) else [])
        for c in candidates:
            if os.path.isfile(c):
                return info(c, "explicit")
        raise InterpreterNotFound([r_path])

    # (2) bridge-specific environment variable
    home = env.get(R_HOME_ENV)
    if home:
        if os.path.isfile(home):
            return info(home, "env")
        for c in _runner_under(home):
            tried.append(c)
            if os.path.isfile(c):
                return info(c, "env")

    # (3) system search path
    for name in _runner_names():
        hit = shutil.which(name, path=env.get("PATH", ""))
        if hit:
            return info(hit, "search-path")
        tried.append(f"{name} (on PATH)")

    # (4) conventional directories, newest version first
    roots = default_search_roots() if search_roots is None else list(search_roots)
    fixed = default_fixed_candidates() if fixed_candidates is None else list(fixed_candidates)
    for root in roots:
        runners = _versioned_runners(root)
        if runners:
            return info(runners[0][1], "conventional-dir")
        tried.append(os.path.join(root, "R-x.y.z"))
    for c in fixed:
        if os.path.isfile(c):
            return info(c, "conventional-dir")
        tried.append(c)

    raise InterpreterNotFound(tried)


def _read_error_file(error_file):
    if error_file and os.path.isfile(error_file):
        with open(error_file, "rb") as f:
            text = f.read().decode("utf-8", "replace")
        return text.rstrip("\n")
    return None


def execute_batch(
    info: InterpreterInfo,
    script_path: str,
    workdir: str,
    limits: Limits = Limits(),
    error_file: Optional[str] = None,
) -> BatchOutcome:
    """Run one generated script to completion in vanilla batch mode.

    R-level errors are not Python errors here: they arrive in the outcome
    via the error file the script's trap writes. SpawnFailure/BatchTimeout
    are raised for process-level trouble; on timeout the whole process
    group is killed so no R children linger.
    """
    env = dict(os.environ)
    if info.library_paths:
        env["R_LIBS"] = os.pathsep.join(info.library_paths)
    cmd = [info.path, "--vanilla", script_path]
    start = time.monotonic()
    posix = os.name == "posix"
    try:
        proc = subprocess.Popen(
            cmd,
            cwd=workdir,
            env=env,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            start_new_session=posix,
        )
    except OSError as e:
        raise SpawnFailure(f"cannot spawn {info.path!r}: {e}") from None
    try:
        out, err = proc.communicate(timeout=limits.timeout)
    except subprocess.TimeoutExpired:
        if posix:
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except ProcessLookupError:
                pass
        else:
            proc.kill()
        out, err = proc.communicate()
        raise BatchTimeout(
            f"batch run exceeded {limits.timeout}s and was killed",
            exit_status=proc.returncode,
            stdout=out.decode("utf-8", "replace"),
            stderr=err.decode("utf-8", "replace"),
        )
    duration = time.monotonic() - start
    return BatchOutcome(
        exit_status=proc.returncode,
        stdout=out.decode("utf-8", "replace"),
        stderr=err.decode("utf-8", "replace"),
        error_message=_read_error_file(error_file),
        duration=duration,
    )


class RBatchExecutor:
    """The real executor: one resolved interpreter, many batch runs."""

    def __init__(self, info: InterpreterInfo):
        self.info = info

    def execute_batch(self, script_path, workdir, limits=Limits(), error_file=None):
        return execute_batch(self.info, script_path, workdir, limits, error_file)


@dataclass
class ScriptedCall:
    """One canned step of a scripted-executor trace.

    ``predicate`` sees the generated script text and either returns a
    falsy/True verdict or raises; ``result`` bytes are planted as the
    session's result file; ``error_text`` is written to the error file;
    ``plant_image`` mimics R saving the session image on success.
    """

    predicate: Optional[Callable[[str], object]] = None
    exit_status: int = 0
    stdout: str = ""
    stderr: str = ""
    result: Optional[bytes] = None
    error_text: Optional[str] = None
    plant_image: bool = True


class ScriptedExecutor:
    """Replays a trace of canned outcomes; fails loudly off-script."""

    RESULT_NAME = "result.rbw"
    IMAGE_NAME = "session.RData"

    def __init__(self, trace: Sequence[ScriptedCall]):
        self.trace = list(trace)
        self.calls = 0
        self.scripts: list = []
        self.info = InterpreterInfo(path="<scripted>", version=(0, 0, 0), source="explicit")

    def execute_batch(self, script_path, workdir, limits=Limits(), error_file=None):
        if self.calls >= len(self.trace):
            raise TraceExhausted(f"scripted executor called {self.calls + 1} times, "
                                 f"trace has {len(self.trace)}")
        step = self.trace[self.calls]
        self.calls += 1
        with open(script_path, "r", encoding="utf-8") as f:
            script = f.read()
        self.scripts.append(script)
        if step.predicate is not None:
            verdict = step.predicate(script)
            if verdict is not None and not verdict:
                raise PredicateFailed(f"trace step {self.calls}: predicate rejected the script")
        if step.exit_status == 0:
            if step.result is not None:
                with open(os.path.join(workdir, self.RESULT_NAME), "wb") as f:
                    f.write(step.result)
            if step.plant_image:
                with open(os.path.join(workdir, self.IMAGE_NAME), "wb") as f:
                    f.write(b"scripted-session-image")
        elif step.error_text is not None and error_file:
            with open(error_file, "w", encoding="utf-8") as f:
                f.write(step.error_text + "\n")
        return BatchOutcome(
            exit_status=step.exit_status,
            stdout=step.stdout,
            stderr=step.stderr,
            error_message=step.error_text,
            duration=0.0,
        )
