"""Bag-of-tokens tokenization and the per-block facts.

A token is a maximal run of ``[A-Za-z0-9_]``. Comments are removed first;
string literal contents are tokenized like any other code.
"""

from __future__ import annotations

import hashlib
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional

from ._lexer import STRING_OR_COMMENT, UNTERMINATED
from .blocks import RawBlock

TOKEN_RE = re.compile(r"[A-Za-z0-9_]+")


def _strip(text: str) -> tuple[str, int]:
    if "#" not in text and "'" not in text and '"' not in text:
        return text, 0
    unterminated = 0

    def repl(m: re.Match) -> str:
        nonlocal unterminated
        kind = m.lastgroup
        if kind == "comment":
            return ""
        if kind in UNTERMINATED:
            unterminated += 1
        return m.group()

    return STRING_OR_COMMENT.sub(repl, text), unterminated


def strip_comments(text: str) -> str:
    """Remove ``#`` comments that sit outside string literals.

    Triple-quoted strings may span lines. A single-quoted string ends at
    an unescaped newline, as in Python. Newlines themselves are kept, so
    the line structure of the input is preserved.
    """
    return _strip(text)[0]


def count_unterminated(text: str) -> int:
    return _strip(text)[1]


@dataclass(frozen=True)
class TokenBag:
    counts: Mapping[str, int] = field(default_factory=dict)

    @cached_property
    def total_tokens(self) -> int:
        return sum(self.counts.values())

    @property
    def unique_tokens(self) -> int:
        return len(self.counts)

    def serialize(self) -> bytes:
        # tokens are ASCII, so str ordering is byte ordering
        return ",".join(f"{t}:{c}" for t, c in sorted(self.counts.items())).encode("utf-8")

    def digest(self) -> str:
        return hashlib.md5(self.serialize()).hexdigest()

    def __len__(self) -> int:
        return self.total_tokens


def tokenize(text: str) -> TokenBag:
    """Count maximal word-character runs in already comment-stripped text."""
    return TokenBag(Counter(TOKEN_RE.findall(text)))


EMPTY_TOKEN_HASH = hashlib.md5(b"").hexdigest()


@dataclass(frozen=True)
class BlockRecord:
    block: RawBlock
    bag: TokenBag
    block_hash: str
    token_hash: str
    lines: int
    loc: int
    sloc: int
    warnings: int = 0

    @property
    def total_tokens(self) -> int:
        return self.bag.total_tokens

    @property
    def unique_tokens(self) -> int:
        return self.bag.unique_tokens

    def to_json(self) -> dict:
        obj = self.block.to_json()
        obj.update(
            block_hash=self.block_hash,
            token_hash=self.token_hash,
            lines=self.lines,
            loc=self.loc,
            sloc=self.sloc,
            total_tokens=self.total_tokens,
            unique_tokens=self.unique_tokens,
        )
        if self.warnings:
            obj["warnings"] = self.warnings
        return obj

    @classmethod
    def from_json(cls, obj: dict, verify: bool = True) -> "BlockRecord":
        """Rebuild a record, re-deriving the bag from the block text.

        With ``verify`` the stored hashes must agree with the recomputation;
        a mismatch means the record file was produced by something else.
        """
        rec = make_record(RawBlock.from_json(obj))
        if verify and (rec.block_hash, rec.token_hash) != (obj["block_hash"], obj["token_hash"]):
            raise ValueError(
                f"record {obj['source_id']}#{obj['ordinal']}: stored hashes do not match its text"
            )
        return rec


def split_lines(text: str) -> list[str]:
    """Split on ``\\n`` only; a trailing newline does not open a new line."""
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


_NONBLANK_LINE = re.compile(r"^[^\S\n]*\S", re.MULTILINE)


def count_lines(text: str) -> tuple[int, int]:
    """(lines, non-blank lines), with ``\\n`` as the only line break."""
    n = text.count("\n")
    if text and not text.endswith("\n"):
        n += 1
    return n, len(_NONBLANK_LINE.findall(text))


def make_record(block: RawBlock) -> BlockRecord:
    text = block.text
    stripped, unterminated = _strip(text)
    bag = tokenize(stripped)
    lines, loc = count_lines(text)
    sloc = loc if stripped is text else count_lines(stripped)[1]
    return BlockRecord(
        block=block,
        bag=bag,
        block_hash=hashlib.md5(text.encode("utf-8")).hexdigest(),
        token_hash=bag.digest(),
        lines=lines,
        loc=loc,
        sloc=sloc,
        warnings=unterminated,
    )


def token_hash(text: str) -> str:
    return tokenize(strip_comments(text)).digest()


def block_hash(text: str) -> str:
    return hashlib.md5(text.encode("utf-8")).hexdigest()


def bag_from_counts(counts: Optional[Mapping[str, int]] = None, **kw: int) -> TokenBag:
    """Convenience constructor: ``bag_from_counts(a=2, b=1)``."""
    merged = dict(counts or {})
    merged.update(kw)
    return TokenBag({t: c for t, c in merged.items() if c > 0})
