"""Command-line surface: one-shot execution, inspection, conversion.

Exit codes are a stable contract: 0 success, 2 usage error, 3 no R
interpreter, 4 forwarded R error, 5 decode/IO failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import codec, textform
from .errors import (
    BridgeError,
    CodecError,
    InterpreterNotFound,
    RError,
    TextFormError,
)
from .executor import ScriptedCall, ScriptedExecutor
from .session import Session, SessionConfig
from .values import Workspace

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_INTERPRETER = 3
EXIT_R_ERROR = 4
EXIT_DECODE_IO = 5


class _OrderedCode(argparse.Action):
    """Collect --code/--code-file occurrences in command-line order."""

    def __call__(self, parser, namespace, value, option_string=None):
        items = getattr(namespace, "code_items", None)
        if items is None:
            items = []
            namespace.code_items = items
        kind = "file" if option_string == "--code-file" else "code"
        items.append((kind, value))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbridge",
        description="Run R code in batch mode with typed value exchange (RBW format).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_exec = sub.add_parser("exec", help="one-shot push / run / pull cycle")
    p_exec.add_argument("--push", action="append", default=[], metavar="NAME=PATH",
                        help="stage a value from an .rbw or .json file (repeatable)")
    p_exec.add_argument("--code", action=_OrderedCode, metavar="R",
                        help="R code to run (repeatable, ordered with --code-file)")
    p_exec.add_argument("--code-file", action=_OrderedCode, metavar="PATH",
                        help="file with R code to run (repeatable)")
    p_exec.add_argument("--pull", action="append", default=[], metavar="NAME",
                        help="result name to fetch (repeatable)")
    p_exec.add_argument("--out", metavar="DIR", help="directory for pulled values")
    p_exec.add_argument("--format", choices=("rbw", "text"), default="rbw",
                        help="output file format (default: rbw)")
    p_exec.add_argument("--r-path", metavar="PATH", help="explicit R runner or install dir")
    p_exec.add_argument("--timeout", type=float, metavar="SECONDS")
    p_exec.add_argument("--echo", action="store_true",
                        help="echo R's stdout/stderr to the console")
    p_exec.add_argument("--scripted-trace", metavar="PATH", help=argparse.SUPPRESS)

    p_inspect = sub.add_parser("inspect", help="summarize an .rbw file")
    p_inspect.add_argument("path")
    p_inspect.add_argument("--text", action="store_true",
                           help="print the full JSON text form instead of a summary")

    p_convert = sub.add_parser("convert", help="convert between .rbw and .json text form")
    p_convert.add_argument("input")
    p_convert.add_argument("output")

    return parser


def _load_push_value(path: str):
    ext = os.path.splitext(path)[1].lower()
    if ext == ".rbw":
        with open(path, "rb") as f:
            ws, _ = codec.decode(f.read())
        if len(ws) != 1:
            raise TextFormError(f"{path}: push file must contain exactly one entry, "
                                f"found {len(ws)}")
        return ws.entries[0][1]
    if ext == ".json":
        with open(path, "r", encoding="utf-8") as f:
            obj = textform.loads(f.read())
        if isinstance(obj, dict) and obj.get("type") == "workspace":
            ws = textform.workspace_from_text(obj)
            if len(ws) != 1:
                raise TextFormError(f"{path}: push workspace must contain exactly one entry")
            return ws.entries[0][1]
        return textform.value_from_text(obj)
    raise _Usage(f"unrecognized push file extension {ext!r} (want .rbw or .json)")


def _write_pulled(out_dir: str, name: str, value, fmt: str) -> str:
    if fmt == "rbw":
        path = os.path.join(out_dir, name + ".rbw")
        with open(path, "wb") as f:
            f.write(codec.encode(Workspace([(name, value)])))
    else:
        path = os.path.join(out_dir, name + ".json")
        with open(path, "w", encoding="utf-8") as f:
            f.write(textform.dumps(textform.value_to_text(value)))
    return path


class _Usage(Exception):
    pass


def _scripted_executor_from(path: str) -> ScriptedExecutor:
    with open(path, "r", encoding="utf-8") as f:
        steps = json.load(f)

    def make_predicate(spec):
        must = list(spec.get("must_contain", []))
        once = list(spec.get("must_contain_once", []))
        absent = list(spec.get("must_not_contain", []))

        def predicate(script: str):
            for s in must:
                if s not in script:
                    return False
            for s in once:
                if script.count(s) != 1:
                    return False
            for s in absent:
                if s in script:
                    return False
            return True

        return predicate if (must or once or absent) else None

    trace = []
    for spec in steps:
        result = None
        if spec.get("result") is not None:
            result = codec.encode(textform.workspace_from_text(spec["result"]))
        trace.append(ScriptedCall(
            predicate=make_predicate(spec),
            exit_status=int(spec.get("exit_status", 0)),
            stdout=spec.get("stdout", ""),
            stderr=spec.get("stderr", ""),
            result=result,
            error_text=spec.get("error_text"),
        ))
    return ScriptedExecutor(trace)


def _cmd_exec(args) -> int:
    pushes = []
    for item in args.push:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise _Usage(f"--push needs NAME=PATH, got {item!r}")
        pushes.append((name, path))
    code_items = getattr(args, "code_items", None) or []
    if not pushes and not code_items and not args.pull:
        raise _Usage("nothing to do: give at least one --push/--code/--code-file/--pull")
    if args.pull and not args.out:
        raise _Usage("--out DIR is required when pulling values")

    executor = None
    if args.scripted_trace:
        executor = _scripted_executor_from(args.scripted_trace)
    config = SessionConfig(
        r_path=args.r_path,
        timeout=args.timeout,
        echo=args.echo,
    )
    session = Session(config, executor=executor)
    try:
        for name, path in pushes:
            session.push(name, _load_push_value(path))
        for kind, value in code_items:
            if kind == "file":
                with open(value, "r", encoding="utf-8") as f:
                    session.run(f.read())
            else:
                session.run(value)
        values, _ = session.pull(args.pull)
        if args.pull:
            os.makedirs(args.out, exist_ok=True)
            for name in values:
                _write_pulled(args.out, name, values[name], args.format)
        session.clear()
    finally:
        session.close()
    return EXIT_OK


def _cmd_inspect(args) -> int:
    with open(args.path, "rb") as f:
        data = f.read()
    if args.text:
        ws, _ = codec.decode(data)
        sys.stdout.write(textform.dumps(textform.workspace_to_text(ws)))
    else:
        print(codec.inspect(data))
    return EXIT_OK


def _cmd_convert(args) -> int:
    in_ext = os.path.splitext(args.input)[1].lower()
    out_ext = os.path.splitext(args.output)[1].lower()
    if in_ext == ".rbw" and out_ext == ".json":
        with open(args.input, "rb") as f:
            ws, _ = codec.decode(f.read())
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(textform.dumps(textform.workspace_to_text(ws)))
    elif in_ext == ".json" and out_ext == ".rbw":
        with open(args.input, "r", encoding="utf-8") as f:
            ws = textform.workspace_from_text(textform.loads(f.read()))
        with open(args.output, "wb") as f:
            f.write(codec.encode(ws))
    else:
        raise _Usage(f"cannot convert {in_ext!r} to {out_ext!r} "
                     "(supported: .rbw->.json, .json->.rbw)")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        if args.command == "exec":
            return _cmd_exec(args)
        if args.command == "inspect":
            return _cmd_inspect(args)
        return _cmd_convert(args)
    except _Usage as e:
        print(f"rbridge: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InterpreterNotFound as e:
        print(f"rbridge: {e}", file=sys.stderr)
        return EXIT_NO_INTERPRETER
    except RError as e:
        print(f"rbridge: R error: {e}", file=sys.stderr)
        return EXIT_R_ERROR
    except (CodecError, TextFormError) as e:
        print(f"rbridge: {e}", file=sys.stderr)
        return EXIT_DECODE_IO
    except BridgeError as e:
        print(f"rbridge: {e}", file=sys.stderr)
        return EXIT_DECODE_IO
    except OSError as e:
        print(f"rbridge: {e}", file=sys.stderr)
        return EXIT_DECODE_IO


if __name__ == "__main__":
    sys.exit(main())
