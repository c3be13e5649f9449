"""Function-block extraction from project source trees.

Blocks are found with an indentation rule rather than a full parser: a
block opens at an outermost ``def``/``async def`` line and extends through
the last following line indented strictly deeper than that ``def``.
Blank and comment-only lines never extend a block on their own. Lines that
continue a logical line (open brackets, triple-quoted strings, backslash
continuations) belong to the line they continue and are never used to
decide where a block ends.
"""

from __future__ import annotations

import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from ._lexer import STRUCTURE
from .blocks import Origin, PathLike, RawBlock

log = logging.getLogger(__name__)

DEF_RE = re.compile(r"[ \t\f]*(?:async[ \t]+)?def[ \t]+\w")
TAB_SIZE = 8


class UnparsableFile(ValueError):
    """Indentation is ambiguous, so block closure cannot be decided."""


@dataclass(frozen=True)
class SourceFile:
    project_id: str
    relative_path: str
    content: str

    @property
    def line_count(self) -> int:
        return self.content.count("\n")

    @property
    def source_id(self) -> str:
        return f"{self.project_id}/{self.relative_path}"


@dataclass
class ScanStats:
    files: int = 0
    unreadable_files: int = 0
    unreadable_dirs: list = field(default_factory=list)
    unparsable_files: int = 0
    blocks: int = 0


def normalize_newlines(text: str) -> str:
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    if text and not text.endswith("\n"):
        text += "\n"
    return text


def scan_projects(
    root: PathLike, suffix: str = ".py", stats: Optional[ScanStats] = None
) -> Iterator[SourceFile]:
    """Yield every ``*suffix`` file under ``root`` as a decoded SourceFile.

    The first path component below ``root`` is the project id. Traversal
    order is sorted so output is reproducible. Files that are not valid
    UTF-8 are skipped and tallied in ``stats.unreadable_files``.
    """
    root = Path(root)
    if not root.is_dir():
        raise NotADirectoryError(str(root))
    if stats is None:
        stats = ScanStats()

    def onerror(err: OSError):
        stats.unreadable_dirs.append(err.filename)
        log.warning("cannot read directory %s: %s", err.filename, err.strerror)

    for dirpath, dirnames, filenames in os.walk(root, onerror=onerror):
        dirnames.sort()
        for name in sorted(filenames):
            if not name.endswith(suffix):
                continue
            path = Path(dirpath, name)
            if not path.is_file():
                continue
            rel = path.relative_to(root).parts
            if len(rel) == 1:
                project, relative = ".", rel[0]
            else:
                project, relative = rel[0], "/".join(rel[1:])
            try:
                content = path.read_bytes().decode("utf-8")
            except (UnicodeDecodeError, OSError) as exc:
                stats.unreadable_files += 1
                log.info("skipping %s: %s", path, exc)
                continue
            stats.files += 1
            yield SourceFile(project, relative, normalize_newlines(content.removeprefix("\ufeff")))


def _indent(line: str) -> tuple[int, int]:
    """Indent width with tab stops of 8 and with tabs counted as 1."""
    wide = narrow = 0
    for ch in line:
        if ch == " ":
            wide += 1
            narrow += 1
        elif ch == "\t":
            wide = (wide // TAB_SIZE + 1) * TAB_SIZE
            narrow += 1
        elif ch == "\f":
            wide = narrow = 0
        else:
            break
    return wide, narrow


def logical_line_starts(lines: list[str]) -> list[bool]:
    """For each physical line, whether it begins a new logical line."""
    text = "".join(lines)
    starts = [True] * len(lines)
    lineno = 0
    depth = 0
    for m in STRUCTURE.finditer(text):
        kind = m.lastgroup
        if kind == "newline":
            lineno += 1
            if depth > 0 and lineno < len(lines):
                starts[lineno] = False
        elif kind == "backslash":
            lineno += 1
            if lineno < len(lines):
                starts[lineno] = False
        elif kind == "open":
            depth += 1
        elif kind == "close":
            depth = max(0, depth - 1)
        elif kind in ("triple", "triple_open", "single", "single_open"):
            inner = m.group().count("\n")
            for k in range(lineno + 1, min(lineno + inner + 1, len(lines))):
                starts[k] = False
            lineno += inner
    return starts


def _is_filler(line: str) -> bool:
    s = line.strip()
    return not s or s.startswith("#")


def extract_blocks(file: SourceFile) -> list[RawBlock]:
    """Outermost function definitions of ``file``, ordered by start line.

    Raises UnparsableFile when tab/space mixing makes a closure decision
    depend on the tab width.
    """
    # str.splitlines also breaks on \x0c, \x1c, ... which would shift line numbers
    lines = _split_keep(file.content)
    starts = logical_line_starts(lines)
    n = len(lines)
    blocks = []
    i = 0
    while i < n:
        if not starts[i] or not DEF_RE.match(lines[i]):
            i += 1
            continue
        def_wide, def_narrow = _indent(lines[i])
        end = _logical_end(starts, i)
        j = end + 1
        while j < n:
            if not starts[j]:
                j += 1
                continue
            if _is_filler(lines[j]):
                j += 1
                continue
            wide, narrow = _indent(lines[j])
            deeper = wide > def_wide
            if deeper != (narrow > def_narrow):
                raise UnparsableFile(
                    f"{file.source_id}:{j + 1}: inconsistent use of tabs and spaces"
                )
            if not deeper:
                break
            end = _logical_end(starts, j)
            j = end + 1
        blocks.append(
            RawBlock(
                origin=Origin.CORPUS,
                source_id=file.source_id,
                ordinal=len(blocks),
                text="".join(lines[i : end + 1]),
                start_line=i + 1,
                end_line=end + 1,
            )
        )
        i = end + 1
    return blocks


def _split_keep(content: str) -> list[str]:
    parts = content.split("\n")
    out = [p + "\n" for p in parts[:-1]]
    if parts[-1]:
        out.append(parts[-1])
    return out


def _logical_end(starts: list[bool], i: int) -> int:
    j = i + 1
    while j < len(starts) and not starts[j]:
        j += 1
    return j - 1


def extract_corpus(
    root: PathLike, suffix: str = ".py", stats: Optional[ScanStats] = None
) -> Iterator[RawBlock]:
    """Scan ``root`` and yield the blocks of every parsable file."""
    if stats is None:
        stats = ScanStats()
    for sf in scan_projects(root, suffix, stats):
        try:
            blocks = extract_blocks(sf)
        except UnparsableFile as exc:
            stats.unparsable_files += 1
            log.info("skipping %s", exc)
            continue
        stats.blocks += len(blocks)
        yield from blocks
