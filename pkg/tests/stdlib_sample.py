"""A deterministic sample of the running interpreter's standard library."""

import ast
import sysconfig
from pathlib import Path


def stdlib_sources(limit=60):
    """Yield (path, text) for parseable stdlib modules, evenly spread."""
    root = Path(sysconfig.get_paths()["stdlib"])
    files = sorted(p for p in root.glob("*.py"))
    step = max(1, len(files) // limit)
    for path in files[::step][:limit]:
        try:
            src = path.read_text(encoding="utf-8")
            ast.parse(src)
        except (UnicodeDecodeError, SyntaxError, ValueError):
            continue
        yield path, src.replace("\r\n", "\n")
