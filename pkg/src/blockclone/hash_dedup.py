"""Exact-duplicate grouping by block hash or token hash."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .tokenizer import BlockRecord


class Level(str, enum.Enum):
    BLOCK_HASH = "block"
    TOKEN_HASH = "token"

    def digest(self, record) -> str:
        return record.block_hash if self is Level.BLOCK_HASH else record.token_hash


BlockRef = tuple  # (source_id, ordinal)


@dataclass
class CloneGroup:
    key: str
    level: Level
    members: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.members)


def group(records: Iterable[BlockRecord], level: Level) -> list[CloneGroup]:
    """One group per distinct digest, ordered by digest."""
    level = Level(level)
    groups: dict[str, CloneGroup] = {}
    for rec in records:
        key = level.digest(rec)
        g = groups.get(key)
        if g is None:
            g = groups[key] = CloneGroup(key, level)
        g.members.append(rec.block.ref)
    out = [groups[k] for k in sorted(groups)]
    for g in out:
        g.members.sort()
    return out


class DigestTally:
    """digest -> [count in a, count in b].

    Tallies over disjoint shards of the input combine with ``merge``;
    the result does not depend on how the input was split or ordered.
    """

    def __init__(self, counts: Mapping[str, tuple] = ()):
        self.counts: dict[str, list] = defaultdict(lambda: [0, 0])
        for k, (ca, cb) in dict(counts).items():
            self.counts[k] = [ca, cb]

    def add(self, digest: str, side: int, n: int = 1) -> None:
        self.counts[digest][side] += n

    def update(self, digests: Iterable[str], side: int) -> "DigestTally":
        c = self.counts
        for d in digests:
            c[d][side] += 1
        return self

    def merge(self, other: "DigestTally") -> "DigestTally":
        out = DigestTally()
        for src in (self, other):
            for k, (ca, cb) in src.counts.items():
                slot = out.counts[k]
                slot[0] += ca
                slot[1] += cb
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, DigestTally) and dict(self.counts) == dict(other.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def items(self) -> Iterator:
        return ((k, tuple(v)) for k, v in self.counts.items())

    @classmethod
    def of(cls, a: Iterable, b: Iterable, level: Level) -> "DigestTally":
        level = Level(level)
        t = cls()
        t.update((level.digest(r) for r in a), 0)
        t.update((level.digest(r) for r in b), 1)
        return t


@dataclass(frozen=True)
class DupReport:
    level: Level
    total_blocks_a: int
    total_blocks_b: int
    distinct_a: int
    distinct_b: int
    common_distinct: int
    common_blocks_a: int
    common_blocks_b: int

    @classmethod
    def from_tally(cls, tally: DigestTally, level: Level) -> "DupReport":
        tot_a = tot_b = dist_a = dist_b = common = common_a = common_b = 0
        for _, (ca, cb) in tally.items():
            tot_a += ca
            tot_b += cb
            dist_a += ca > 0
            dist_b += cb > 0
            if ca and cb:
                common += 1
                common_a += ca
                common_b += cb
        return cls(Level(level), tot_a, tot_b, dist_a, dist_b, common, common_a, common_b)

    def swapped(self) -> "DupReport":
        return DupReport(
            self.level,
            self.total_blocks_b,
            self.total_blocks_a,
            self.distinct_b,
            self.distinct_a,
            self.common_distinct,
            self.common_blocks_b,
            self.common_blocks_a,
        )

    def to_json(self) -> dict:
        return {
            "level": self.level.value,
            "total_blocks_a": self.total_blocks_a,
            "total_blocks_b": self.total_blocks_b,
            "distinct_a": self.distinct_a,
            "distinct_b": self.distinct_b,
            "common_distinct": self.common_distinct,
            "common_blocks_a": self.common_blocks_a,
            "common_blocks_b": self.common_blocks_b,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DupReport":
        obj = dict(obj)
        level = Level(obj.pop("level"))
        return cls(level, **obj)


def cross_dedup(a: Iterable[BlockRecord], b: Iterable[BlockRecord], level: Level) -> DupReport:
    """Distinct, common-distinct and common-block counts for two corpora."""
    level = Level(level)
    return DupReport.from_tally(DigestTally.of(a, b, level), level)


def common_digests(tally: DigestTally) -> set:
    return {k for k, (ca, cb) in tally.items() if ca and cb}
