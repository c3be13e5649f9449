import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockclone.blocks import Origin, RawBlock
from blockclone.hash_dedup import (
    CloneGroup,
    DigestTally,
    DupReport,
    Level,
    common_digests,
    cross_dedup,
    group,
)
from blockclone.tokenizer import make_record
from samples import INIT_TAB, INIT_SPACES

# Texts that collide at different levels: 0-2 share a bag, 3 and 4 too.
POOL = [
    "def f(a):\n    return a\n",
    "def f(a):\n\treturn a\n",
    "def f( a ):\n    return a  # same bag\n",
    "x = 1\ny = 2\n",
    "y = 2\nx = 1\n",
    "def g():\n    pass\n",
    "# only a comment\n# and another\n",
    "import os\nprint(os.sep)\n",
]


def corpus(indices, origin=Origin.POSTS, tag="s"):
    out = []
    for n, i in enumerate(indices):
        if origin is Origin.CORPUS:
            b = RawBlock(origin, f"{tag}/m.py", n, POOL[i], n + 1, n + 1)
        else:
            b = RawBlock(origin, f"{n}#0", 0, POOL[i])
        out.append(make_record(b))
    return out


def test_group_sizes():
    recs = corpus([0, 0, 0, 5])
    sizes = sorted(g.size for g in group(recs, Level.BLOCK_HASH))
    assert sizes == [1, 3]
    assert group([], Level.TOKEN_HASH) == []


def test_tab_vs_space_init_grouping():
    recs = [make_record(RawBlock(Origin.POSTS, f"{i}#0", 0, t)) for i, t in enumerate((INIT_TAB, INIT_SPACES))]
    assert [g.size for g in group(recs, Level.TOKEN_HASH)] == [2]
    assert [g.size for g in group(recs, Level.BLOCK_HASH)] == [1, 1]


def test_group_members_are_refs():
    recs = corpus([3, 4, 3])
    (g,) = group(recs, "token")
    assert isinstance(g, CloneGroup) and g.level is Level.TOKEN_HASH
    assert g.members == [("0#0", 0), ("1#0", 0), ("2#0", 0)]


def test_cross_dedup_worked_example():
    tally = DigestTally()
    tally.update(["h1"] * 3 + ["h2"], 0)
    tally.update(["h2"] * 5 + ["h3"], 1)
    rep = DupReport.from_tally(tally, Level.BLOCK_HASH)
    assert (rep.common_distinct, rep.common_blocks_a, rep.common_blocks_b) == (1, 1, 5)
    assert (rep.distinct_a, rep.distinct_b, rep.total_blocks_a, rep.total_blocks_b) == (2, 2, 4, 6)
    assert common_digests(tally) == {"h2"}


def test_cross_dedup_disjoint_and_identical():
    a, b = corpus([0, 5]), corpus([3, 6])
    rep = cross_dedup(a, b, Level.BLOCK_HASH)
    assert (rep.common_distinct, rep.common_blocks_a, rep.common_blocks_b) == (0, 0, 0)
    same = cross_dedup(a, a, Level.TOKEN_HASH)
    assert same.common_distinct == same.distinct_a == same.distinct_b
    assert same.common_blocks_a == same.total_blocks_a


def test_report_json_round_trip():
    rep = cross_dedup(corpus([0, 1, 3]), corpus([1, 4]), Level.TOKEN_HASH)
    assert DupReport.from_json(rep.to_json()) == rep
    assert rep.swapped().swapped() == rep


def test_tally_equality_and_merge():
    t1 = DigestTally({"a": (1, 0)})
    t2 = DigestTally({"a": (0, 2), "b": (1, 1)})
    assert t1.merge(t2) == DigestTally({"a": (1, 2), "b": (1, 1)})
    assert t1 != t2
    assert len(t1.merge(t2)) == 2


# -- properties ---------------------------------------------------------------

idx_lists = st.lists(st.integers(0, len(POOL) - 1), max_size=30)


@given(idx_lists, idx_lists, st.sampled_from(list(Level)))
def test_symmetry_under_swap(ia, ib, level):
    a, b = corpus(ia, Origin.CORPUS), corpus(ib)
    assert cross_dedup(b, a, level) == cross_dedup(a, b, level).swapped()


@given(idx_lists, st.sampled_from(list(Level)))
def test_group_sizes_sum_to_total(ia, level):
    recs = corpus(ia)
    groups = group(recs, level)
    assert sum(g.size for g in groups) == len(recs)
    assert len(groups) == len({level.digest(r) for r in recs})


@given(idx_lists, idx_lists, st.sampled_from(list(Level)))
def test_common_blocks_at_least_common_distinct(ia, ib, level):
    rep = cross_dedup(corpus(ia, Origin.CORPUS), corpus(ib), level)
    if rep.common_distinct:
        assert rep.common_blocks_a >= rep.common_distinct
        assert rep.common_blocks_b >= rep.common_distinct
    else:
        assert rep.common_blocks_a == rep.common_blocks_b == 0


@given(idx_lists, idx_lists, st.sampled_from(list(Level)))
def test_counts_match_set_oracle(ia, ib, level):
    a, b = corpus(ia, Origin.CORPUS), corpus(ib)
    da = Counter(level.digest(r) for r in a)
    db = Counter(level.digest(r) for r in b)
    common = set(da) & set(db)
    rep = cross_dedup(a, b, level)
    assert rep.distinct_a == len(da) and rep.distinct_b == len(db)
    assert rep.common_distinct == len(common)
    assert rep.common_blocks_a == sum(da[h] for h in common)
    assert rep.common_blocks_b == sum(db[h] for h in common)


@given(idx_lists)
def test_token_distinct_never_exceeds_block_distinct(ia):
    recs = corpus(ia)
    assert len(group(recs, Level.TOKEN_HASH)) <= len(group(recs, Level.BLOCK_HASH))


@given(idx_lists, idx_lists, st.randoms(use_true_random=False))
def test_order_independence(ia, ib, rnd):
    a, b = corpus(ia, Origin.CORPUS), corpus(ib)
    a2, b2 = a[:], b[:]
    rnd.shuffle(a2)
    rnd.shuffle(b2)
    for level in Level:
        assert cross_dedup(a2, b2, level) == cross_dedup(a, b, level)
        assert group(a2, level) == group(a, level)


digests = st.lists(st.tuples(st.sampled_from("abcdef"), st.integers(0, 1)), max_size=20)


def tally_of(items):
    t = DigestTally()
    for d, side in items:
        t.add(d, side)
    return t


@given(digests, digests, digests)
def test_merge_is_associative_and_commutative(x, y, z):
    tx, ty, tz = tally_of(x), tally_of(y), tally_of(z)
    assert tx.merge(ty) == ty.merge(tx)
    assert tx.merge(ty).merge(tz) == tx.merge(ty.merge(tz))
    assert tx.merge(ty) == tally_of(x + y)


@pytest.mark.parametrize("shards", [1, 2, 5])
def test_sharded_tally_equals_whole(shards):
    rnd = random.Random(shards)
    a = corpus([rnd.randrange(len(POOL)) for _ in range(40)], Origin.CORPUS)
    b = corpus([rnd.randrange(len(POOL)) for _ in range(40)])
    whole = DigestTally.of(a, b, Level.TOKEN_HASH)
    parts = DigestTally()
    for k in range(shards):
        parts = parts.merge(DigestTally.of(a[k::shards], b[k::shards], Level.TOKEN_HASH))
    assert parts == whole
