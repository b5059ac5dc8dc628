"""Access to the embedded R prelude asset (the R half of the codec).

The asset is shipped verbatim inside the package; ``python -m
rbridge.prelude --path`` prints its location so external harnesses (the
R-side test suite) can find it without importing private API.
"""

from __future__ import annotations

import re
from importlib import resources

_VERSION_RE = re.compile(r"^rbw_format_version\s*<-\s*(\d+)L?\s*$", re.MULTILINE)


def asset_path():
    """Filesystem path of the packaged prelude.R."""
    return resources.files("rbridge").joinpath("assets/prelude.R")


def source() -> str:
    """The prelude R source, exactly as embedded into generated scripts."""
    return asset_path().read_text(encoding="utf-8")


def format_version(src: str | None = None) -> int:
    """Extract the prelude's format-version constant.

    Raises ValueError when the constant is missing, so a corrupted or
    foreign asset cannot silently pair with the wrong codec.
    """
    m = _VERSION_RE.search(source() if src is None else src)
    if not m:
        raise ValueError("prelude asset has no rbw_format_version constant")
    return int(m.group(1))


def main(argv=None) -> int:
    import argparse

    parser = argparse.ArgumentParser(prog="python -m rbridge.prelude")
    parser.add_argument("--path", action="store_true", help="print the asset path")
    args = parser.parse_args(argv)
    if args.path:
        print(asset_path())
    else:
        print(source(), end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
