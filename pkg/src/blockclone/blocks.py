"""Block type shared by both extractors, plus line-delimited JSON helpers."""

from __future__ import annotations

import enum
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Union

PathLike = Union[str, Path]


class Origin(str, enum.Enum):
    CORPUS = "CORPUS"
    POSTS = "POSTS"


@dataclass(frozen=True)
class RawBlock:
    """One extracted code block.

    ``source_id`` is ``project/relative/path`` for corpus blocks and
    ``post_id#index`` for snippets. Line numbers are 1-based and inclusive,
    and only exist for corpus blocks.
    """

    origin: Origin
    source_id: str
    ordinal: int
    text: str
    start_line: Optional[int] = None
    end_line: Optional[int] = None

    def __post_init__(self):
        if not self.text:
            raise ValueError("block text must be non-empty")
        if self.origin is Origin.CORPUS:
            if self.start_line is None or self.end_line is None:
                raise ValueError("corpus blocks need a line span")
            if self.start_line < 1 or self.end_line < self.start_line:
                raise ValueError(f"bad line span {self.start_line}..{self.end_line}")
        elif self.start_line is not None or self.end_line is not None:
            raise ValueError("post snippets carry no line span")

    @property
    def ref(self) -> tuple[str, int]:
        return (self.source_id, self.ordinal)

    def to_json(self) -> dict:
        return {
            "origin": self.origin.value,
            "source_id": self.source_id,
            "ordinal": self.ordinal,
            "text": self.text,
            "start_line": self.start_line,
            "end_line": self.end_line,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RawBlock":
        return cls(
            origin=Origin(obj["origin"]),
            source_id=obj["source_id"],
            ordinal=int(obj["ordinal"]),
            text=obj["text"],
            start_line=obj.get("start_line"),
            end_line=obj.get("end_line"),
        )


def write_jsonl(objects: Iterable[dict], dest: Union[PathLike, IO[str], None]) -> int:
    """Write one JSON object per line; ``None`` or ``"-"`` means stdout."""
    if dest is None or dest == "-":
        return _dump_lines(objects, sys.stdout)
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            return _dump_lines(objects, fh)
    return _dump_lines(objects, dest)


def _dump_lines(objects, fh) -> int:
    n = 0
    for obj in objects:
        fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True))
        fh.write("\n")
        n += 1
    return n


def read_jsonl(src: Union[PathLike, IO[str]]) -> Iterator[dict]:
    if isinstance(src, (str, Path)):
        with open(src, encoding="utf-8") as fh:
            yield from _load_lines(fh, str(src))
    else:
        yield from _load_lines(src, getattr(src, "name", "<stream>"))


def _load_lines(fh: io.TextIOBase, name: str) -> Iterator[dict]:
    for lineno, line in enumerate(fh, 1):
        if not line.strip():
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{name}:{lineno}: invalid JSON record ({exc.msg})") from None
