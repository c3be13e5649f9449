"""Record files: the line-delimited contract between pipeline stages."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .blocks import PathLike, RawBlock, read_jsonl, write_jsonl
from .tokenizer import BlockRecord, make_record

RECORD_FIELDS = ("block_hash", "token_hash", "lines", "loc", "sloc", "total_tokens", "unique_tokens")


@dataclass(frozen=True)
class StoredRecord:
    """A record as read back from disk, without re-tokenizing.

    Exposes the same attributes as BlockRecord apart from ``bag``; enough
    for hash grouping, large-block filtering and distributions.
    """

    block: RawBlock
    block_hash: str
    token_hash: str
    lines: int
    loc: int
    sloc: int
    total_tokens: int
    unique_tokens: int

    @classmethod
    def from_json(cls, obj: dict) -> "StoredRecord":
        try:
            return cls(RawBlock.from_json(obj), *(obj[k] for k in RECORD_FIELDS))
        except KeyError as exc:
            raise ValueError(f"record is missing field {exc.args[0]!r}") from None


def load_blocks(path: PathLike) -> Iterator[RawBlock]:
    for obj in read_jsonl(path):
        yield RawBlock.from_json(obj)


def load_records(path: PathLike) -> list[StoredRecord]:
    return [StoredRecord.from_json(obj) for obj in read_jsonl(path)]


def load_full_records(path: PathLike) -> list[BlockRecord]:
    """Records with token bags, re-derived from the stored block text."""
    return [BlockRecord.from_json(obj) for obj in read_jsonl(path)]


def tokenize_blocks(blocks: Iterable[RawBlock]) -> Iterator[BlockRecord]:
    for block in blocks:
        yield make_record(block)


def write_records(records: Iterable, dest) -> int:
    return write_jsonl((r.to_json() for r in records), dest)


def write_blocks(blocks: Iterable[RawBlock], dest) -> int:
    return write_jsonl((b.to_json() for b in blocks), dest)
