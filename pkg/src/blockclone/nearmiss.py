"""Near-miss clone detection over token bags.

Two bags are clones when their multiset overlap (sum over tokens of the
smaller count) reaches ``ceil(theta * max(|x|, |y|))``, sizes counted with
multiplicity. Candidates come from an inverted index that posts only each
bag's prefix: its rarest ``|x| - ceil(theta * |x|) + 1`` token occurrences
under one global ordering (ascending corpus frequency, ties by token).
Any qualifying pair must share a token in those prefixes, so verifying
the index candidates finds every pair an exhaustive scan would.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Mapping, Optional, Sequence, Union

from .tokenizer import BlockRecord, TokenBag

Theta = Union[float, Fraction]


def as_fraction(theta: Theta) -> Fraction:
    """Exact value of theta. Floats go through their shortest repr, so 0.7 is 7/10."""
    if isinstance(theta, Fraction):
        frac = theta
    elif isinstance(theta, float):
        frac = Fraction(repr(theta))
    elif isinstance(theta, Real):
        frac = Fraction(theta)
    else:
        frac = Fraction(str(theta))
    if not 0 < frac <= 1:
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    return frac


def _ceil_mul(frac: Fraction, n: int) -> int:
    return -(-frac.numerator * n // frac.denominator)


def similarity_threshold(size_left: int, size_right: int, theta: Theta) -> int:
    """Minimum overlap for a clone pair: ceil(theta * max(size_left, size_right))."""
    return _ceil_mul(as_fraction(theta), max(size_left, size_right))


def prefix_length(size: int, theta: Theta) -> int:
    if size == 0:
        return 0
    return size - _ceil_mul(as_fraction(theta), size) + 1


def overlap(x: Mapping[str, int], y: Mapping[str, int]) -> int:
    if len(x) > len(y):
        x, y = y, x
    total = 0
    get = y.get
    for tok, c in x.items():
        d = get(tok)
        if d:
            total += c if c < d else d
    return total


@dataclass(frozen=True)
class DetectorConfig:
    theta: Theta = 0.8
    min_tokens: int = 0

    def __post_init__(self):
        as_fraction(self.theta)
        if self.min_tokens < 0:
            raise ValueError("min_tokens must be >= 0")


@dataclass(frozen=True)
class ClonePair:
    left: str
    right: str
    overlap: int
    threshold: int

    def to_json(self) -> dict:
        return {
            "left_hash": self.left,
            "right_hash": self.right,
            "overlap": self.overlap,
            "threshold": self.threshold,
        }


def verify(
    x: TokenBag,
    y: TokenBag,
    theta: Theta,
    left: Optional[str] = None,
    right: Optional[str] = None,
) -> Optional[ClonePair]:
    """A ClonePair when ``x`` and ``y`` overlap enough, else None.

    ``left``/``right`` default to the bags' token hashes; the pair is
    stored with the smaller hash on the left.
    """
    threshold = similarity_threshold(x.total_tokens, y.total_tokens, theta)
    ov = overlap(x.counts, y.counts)
    if ov < threshold:
        return None
    left = x.digest() if left is None else left
    right = y.digest() if right is None else right
    if right < left:
        left, right = right, left
    return ClonePair(left, right, ov, threshold)


def global_ordering(bags: Iterable[TokenBag]) -> dict[str, int]:
    """Token -> rank; rarer tokens (by total occurrences) rank first."""
    freq: dict[str, int] = defaultdict(int)
    for bag in bags:
        for tok, c in bag.counts.items():
            freq[tok] += c
    ranked = sorted(freq, key=lambda t: (freq[t], t))
    return {tok: r for r, tok in enumerate(ranked)}


class InvertedIndex:
    """Prefix-filtered postings over a fixed list of bags.

    A posting ``(position, size, offset, count)`` says that the bag at
    ``position`` has ``count`` occurrences of the token, preceded by
    ``offset`` occurrences of lower-ranked tokens. Only tokens inside each
    bag's prefix are posted. The index is frozen after construction.
    """

    def __init__(
        self,
        bags: Sequence[TokenBag],
        theta: Theta,
        ordering: Optional[Mapping[str, int]] = None,
    ):
        self.theta = as_fraction(theta)
        self.ordering = dict(ordering) if ordering is not None else global_ordering(bags)
        self.sizes = [b.total_tokens for b in bags]
        self.ordered = [self.order_tokens(b) for b in bags]
        postings: dict[str, list] = defaultdict(list)
        for pos, toks in enumerate(self.ordered):
            size = self.sizes[pos]
            need = prefix_length(size, self.theta)
            offset = 0
            for tok, count in toks:
                if offset >= need:
                    break
                postings[tok].append((pos, size, offset, count))
                offset += count
        self.postings = {t: tuple(p) for t, p in postings.items()}
        self.frozen = True

    def __setattr__(self, name, value):
        if getattr(self, "frozen", False):
            raise AttributeError("index is frozen")
        super().__setattr__(name, value)

    def order_tokens(self, bag: TokenBag) -> list[tuple[str, int]]:
        """``(token, count)`` pairs of ``bag``, rarest first."""
        rank = self.ordering
        # tokens unknown to the ordering cannot match anything indexed
        keyed = sorted((rank.get(t, -1), t, c) for t, c in bag.counts.items())
        return [(t, c) for _, t, c in keyed]

    def prefix(self, bag: TokenBag) -> list[str]:
        """Distinct tokens covering the first prefix_length occurrences."""
        need = prefix_length(bag.total_tokens, self.theta)
        out = []
        covered = 0
        for tok, count in self.order_tokens(bag):
            if covered >= need:
                break
            out.append(tok)
            covered += count
        return out

    def candidates(
        self,
        bag: TokenBag,
        ordered: Optional[list] = None,
        min_position: int = 0,
    ) -> list[int]:
        """Positions of indexed bags that may reach the threshold with ``bag``.

        Besides the prefix and size filters, the first shared token bounds
        the overlap: everything after it can add at most the smaller of the
        two remaining occurrence counts.
        """
        size = bag.total_tokens
        if size == 0:
            return []
        num, den = self.theta.numerator, self.theta.denominator
        lo = -(-num * size // den)
        hi = size * den // num
        need = size - lo + 1
        if ordered is None:
            ordered = self.order_tokens(bag)
        acc: dict[int, int] = {}
        postings = self.postings
        offset = 0
        for tok, cx in ordered:
            if offset >= need:
                break
            rest_x = size - offset - cx
            for pos, sy, jy, cy in postings.get(tok, ()):
                if pos < min_position or sy < lo or sy > hi:
                    continue
                seen = acc.get(pos)
                m = cx if cx < cy else cy
                if seen is None:
                    rest_y = sy - jy - cy
                    bound = m + (rest_x if rest_x < rest_y else rest_y)
                    big = size if size > sy else sy
                    acc[pos] = m if bound * den >= num * big else -1
                elif seen >= 0:
                    acc[pos] = seen + m
            offset += cx
        return [pos for pos, a in acc.items() if a >= 0]


def similar_pairs(
    bags: Sequence[TokenBag],
    theta: Theta,
    others: Optional[Sequence[TokenBag]] = None,
) -> dict[tuple[int, int], int]:
    """Index-driven clone pairs by position, mapped to their overlap.

    Without ``others``: pairs ``(i, j)`` with ``i < j`` inside ``bags``.
    With ``others``: pairs ``(i, j)`` with ``i`` in ``bags`` and ``j`` in
    ``others``. Empty bags never pair.
    """
    frac = as_fraction(theta)
    num, den = frac.numerator, frac.denominator
    intra = others is None
    if intra:
        index = InvertedIndex(bags, frac)
        targets = bags
    else:
        index = InvertedIndex(others, frac, global_ordering([*bags, *others]))
        targets = others
    found: dict[tuple[int, int], int] = {}
    for i, bag in enumerate(bags):
        sx = bag.total_tokens
        if sx == 0:
            continue
        if intra:
            cands = index.candidates(bag, index.ordered[i], min_position=i + 1)
        else:
            cands = index.candidates(bag)
        for j in cands:
            y = targets[j]
            sy = y.total_tokens
            ov = overlap(bag.counts, y.counts)
            if ov * den >= num * (sx if sx > sy else sy):
                found[(i, j)] = ov
    return found


@dataclass
class Representative:
    """Stand-in for every block sharing one token hash."""

    token_hash: str
    bag: TokenBag
    group_size_a: int = 0
    group_size_b: int = 0

    @property
    def size(self) -> int:
        return self.bag.total_tokens


def representatives(
    records_a: Iterable[BlockRecord], records_b: Iterable[BlockRecord] = ()
) -> list[Representative]:
    """One representative per distinct token hash over both corpora, by hash."""
    reps: dict[str, Representative] = {}
    for side, records in enumerate((records_a, records_b)):
        for rec in records:
            rep = reps.get(rec.token_hash)
            if rep is None:
                rep = reps[rec.token_hash] = Representative(rec.token_hash, rec.bag)
            if side == 0:
                rep.group_size_a += 1
            else:
                rep.group_size_b += 1
    return [reps[k] for k in sorted(reps)]


def split_sides(reps: Iterable[Representative]) -> tuple[list, list]:
    reps = list(reps)
    return [r for r in reps if r.group_size_a], [r for r in reps if r.group_size_b]


@dataclass
class Detection:
    pairs: list = field(default_factory=list)
    flagged_a: set = field(default_factory=set)
    flagged_b: set = field(default_factory=set)
    considered_a: int = 0
    considered_b: int = 0
    empty_skipped: int = 0
    below_floor: int = 0
    inter: bool = False

    def flags(self, reps: Iterable[Representative], side: str = "a") -> list[dict]:
        flagged = self.flagged_a if side == "a" else self.flagged_b
        key = "inter_dup" if self.inter else "intra_dup"
        return [{"token_hash": r.token_hash, key: r.token_hash in flagged} for r in reps]


def _admit(reps, config: DetectorConfig, det: Detection) -> list[Representative]:
    kept = []
    seen = set()
    for r in reps:
        if r.token_hash in seen:
            raise ValueError(f"duplicate representative {r.token_hash}")
        seen.add(r.token_hash)
        if r.size == 0:
            det.empty_skipped += 1
        elif r.size < config.min_tokens:
            det.below_floor += 1
        else:
            kept.append(r)
    return kept


def detect(
    reps_a: Sequence[Representative],
    reps_b: Optional[Sequence[Representative]] = None,
    config: DetectorConfig = DetectorConfig(),
) -> Detection:
    """Near-miss detection over deduplicated representatives.

    Intra mode (``reps_b`` is None) flags every representative of ``reps_a``
    that pairs with a different one. Inter mode flags, on both sides, the
    representatives that pair with something on the other side; a token
    hash present on both sides counts as a match without a stored pair.
    Empty bags and bags under ``config.min_tokens`` are left out.
    """
    det = Detection(inter=reps_b is not None)
    pairs: dict[tuple[str, str], ClonePair] = {}
    a = _admit(reps_a, config, det)
    det.considered_a = len(a)
    if reps_b is None:
        hits = similar_pairs([r.bag for r in a], config.theta)
        for (i, j), ov in hits.items():
            x, y = a[i], a[j]
            det.flagged_a.update((x.token_hash, y.token_hash))
            p = _pair(x, y, ov, config.theta)
            pairs[p.left, p.right] = p
    else:
        b = _admit(reps_b, config, det)
        det.considered_b = len(b)
        shared = {r.token_hash for r in a} & {r.token_hash for r in b}
        det.flagged_a |= shared
        det.flagged_b |= shared
        hits = similar_pairs([r.bag for r in a], config.theta, [r.bag for r in b])
        for (i, j), ov in hits.items():
            x, y = a[i], b[j]
            det.flagged_a.add(x.token_hash)
            det.flagged_b.add(y.token_hash)
            if x.token_hash != y.token_hash:
                p = _pair(x, y, ov, config.theta)
                pairs[p.left, p.right] = p
    det.pairs = [pairs[k] for k in sorted(pairs)]
    return det


def _pair(x: Representative, y: Representative, ov: int, theta) -> ClonePair:
    left, right = sorted((x.token_hash, y.token_hash))
    return ClonePair(left, right, ov, similarity_threshold(x.size, y.size, theta))
