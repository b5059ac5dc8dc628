"""Generation of the temporary R script executed per pull.

A generated script has seven fixed sections: prelude definitions, the
error trap opening, session-image restore, staged-variable binding, the
cached user command blocks (verbatim), result export, and the session
snapshot. Everything after section 2 runs inside rbw_guard, so any R
error lands in the error file and the process exits 1; otherwise the
result file is finalized and the process exits 0. One run never leaves
both files behind: the result is written to a temp name and only renamed
after the session image is saved.

Scripts are deterministic functions of the plan: identical plans yield
byte-identical UTF-8 text with LF line endings.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

from . import codec
from .errors import InvalidPlan
from .prelude import format_version
from .rlang import escape_r_string, validate_r_name

__all__ = ["ScriptPlan", "generate_pull_script", "escape_r_string", "validate_r_name"]


@dataclass(frozen=True)
class ScriptPlan:
    """Everything the generator needs for one batch invocation."""

    prelude_source: str
    temp_dir: str
    session_image: str
    staged_file: str
    result_file: str
    error_file: str
    command_blocks: tuple = field(default=())
    pull_names: tuple = field(default=())

    def __init__(self, prelude_source, temp_dir, session_image, staged_file,
                 result_file, error_file, command_blocks=(), pull_names=()):
        object.__setattr__(self, "prelude_source", prelude_source)
        object.__setattr__(self, "temp_dir", temp_dir)
        object.__setattr__(self, "session_image", session_image)
        object.__setattr__(self, "staged_file", staged_file)
        object.__setattr__(self, "result_file", result_file)
        object.__setattr__(self, "error_file", error_file)
        object.__setattr__(self, "command_blocks", tuple(command_blocks))
        object.__setattr__(self, "pull_names", tuple(pull_names))


def _path_violations(plan: ScriptPlan) -> list:
    out = []
    root = os.path.normpath(plan.temp_dir)
    if not os.path.isabs(root):
        out.append(f"temp_dir {plan.temp_dir!r} is not absolute")
        return out
    for label in ("session_image", "staged_file", "result_file", "error_file"):
        p = getattr(plan, label)
        if not isinstance(p, str) or not os.path.isabs(p):
            out.append(f"{label} {p!r} is not an absolute path")
            continue
        try:
            inside = os.path.commonpath([root, os.path.normpath(p)]) == root
        except ValueError:  # mixed drives on Windows
            inside = False
        if not inside:
            out.append(f"{label} {p!r} is outside the session temp dir")
    return out


def _validate_plan(plan: ScriptPlan) -> list:
    out = _path_violations(plan)
    for i, name in enumerate(plan.pull_names):
        if not validate_r_name(name):
            out.append(f"pull_names[{i}]: {name!r} is not a valid R name")
    for i, block in enumerate(plan.command_blocks):
        if not isinstance(block, str):
            out.append(f"command_blocks[{i}]: not a string")
    if not isinstance(plan.prelude_source, str) or not plan.prelude_source:
        out.append("prelude_source is empty")
    else:
        try:
            v = format_version(plan.prelude_source)
        except ValueError as e:
            out.append(str(e))
        else:
            if v != codec.FORMAT_VERSION:
                out.append(
                    f"prelude format version {v} != host codec version {codec.FORMAT_VERSION}"
                )
    return out


def generate_pull_script(plan: ScriptPlan) -> str:
    """Emit the R source for one batch run (see module docstring)."""
    violations = _validate_plan(plan)
    if violations:
        raise InvalidPlan(violations)

    image = escape_r_string(plan.session_image)
    staged = escape_r_string(plan.staged_file)
    result = escape_r_string(plan.result_file)
    result_tmp = escape_r_string(plan.result_file + ".tmp")
    error = escape_r_string(plan.error_file)

    lines = []
    add = lines.append

    # (1) prelude definitions
    add("## rbridge batch script (generated; do not edit)")
    add(plan.prelude_source.rstrip("\n"))
    add("")

    # (2) error trap: everything below runs inside it
    add(f"rbw_guard({{")

    # (3) restore the session image, if any
    add(f"  if (file.exists({image})) {{")
    add(f"    load({image}, envir = globalenv())")
    add("  }")

    # (4) bind staged pushes into the global environment
    add(f"  if (file.exists({staged})) {{")
    add("    local({")
    add(f"      staged <- rbw_read({staged})")
    add("      for (nm in names(staged)) {")
    add("        assign(nm, staged[[nm]], envir = globalenv())")
    add("      }")
    add("    })")
    add("  }")

    # (5) cached user command blocks, verbatim, in submission order
    for i, block in enumerate(plan.command_blocks):
        add(f"  ## user block {i + 1}")
        add(block)

    # (6) export pulled values (missing bindings raise, naming the object)
    pulls = ", ".join(escape_r_string(n) for n in plan.pull_names)
    vector = f"c({pulls})" if pulls else "character(0)"
    add("  local({")
    add(f"    pulls <- {vector}")
    add("    out <- lapply(pulls, function(nm) {")
    add("      if (!exists(nm, envir = globalenv())) {")
    add('        stop(sprintf("object \'%s\' not found", nm))')
    add("      }")
    add("      get(nm, envir = globalenv())")
    add("    })")
    add("    names(out) <- pulls")
    add(f"    rbw_write(out, {result_tmp})")
    add("  })")

    # (7) snapshot the session and finalize the result file
    add(f"  save(list = ls(envir = globalenv(), all.names = TRUE), file = {image},")
    add("       envir = globalenv())")
    add(f"  if (!file.rename({result_tmp}, {result})) {{")
    add('    stop("cannot finalize result file")')
    add("  }")
    add(f"}}, {error})")
    add("")

    return "\n".join(lines)
