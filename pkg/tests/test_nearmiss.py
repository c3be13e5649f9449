from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockclone.blocks import Origin, RawBlock
from blockclone.nearmiss import (
    ClonePair,
    DetectorConfig,
    InvertedIndex,
    Representative,
    as_fraction,
    detect,
    overlap,
    prefix_length,
    representatives,
    similar_pairs,
    similarity_threshold,
    split_sides,
    verify,
)
from blockclone.tokenizer import EMPTY_TOKEN_HASH, TokenBag, bag_from_counts, make_record
from samples import numbered_route
from oracles import bags_from_matrix, brute_force_pairs, random_count_matrix

THETAS = (0.7, 0.8, 0.9, 1.0)


def rep(bag, a=1, b=0):
    return Representative(bag.digest(), bag, a, b)


def post_record(n, text):
    return make_record(RawBlock(Origin.POSTS, f"{n}#0", 0, text))


@pytest.mark.parametrize(
    "args, expected",
    [((10, 10, 0.8), 8), ((4, 4, 0.8), 4), ((7, 7, 1.0), 7), ((10, 10, 0.7), 7), ((3, 10, 0.8), 8), ((0, 0, 0.8), 0)],
)
def test_similarity_threshold(args, expected):
    assert similarity_threshold(*args) == expected


def test_theta_is_exact():
    # 0.7 * 10 is 7.000000000000001 in binary floating point
    assert as_fraction(0.7) == Fraction(7, 10)
    assert similarity_threshold(10, 10, 0.7) == 7
    assert similarity_threshold(100, 20, 0.29) == 29
    for bad in (0, -0.5, 1.2):
        with pytest.raises(ValueError):
            as_fraction(bad)
    with pytest.raises(ValueError):
        DetectorConfig(theta=0)
    with pytest.raises(ValueError):
        DetectorConfig(min_tokens=-1)


def test_prefix_length():
    assert prefix_length(10, 0.8) == 3
    assert all(prefix_length(n, 1.0) == 1 for n in range(1, 50))
    assert prefix_length(0, 0.8) == 0


def test_verify_examples():
    x = bag_from_counts(a=2, b=1, c=1)
    y = bag_from_counts(a=1, b=1, d=2)
    assert overlap(x.counts, y.counts) == 2
    assert verify(x, y, 0.8) is None

    ten = TokenBag({f"t{i}": 1 for i in range(10)})
    edited = TokenBag({**{f"t{i}": 1 for i in range(8)}, "u1": 1, "u2": 1})
    p = verify(ten, edited, 0.8)
    assert isinstance(p, ClonePair)
    assert (p.overlap, p.threshold) == (8, 8)
    assert p.left < p.right

    same = verify(ten, ten, 1.0)
    assert same.overlap == ten.total_tokens


def test_index_posts_prefix_only():
    bag = TokenBag({f"t{i}": 1 for i in range(10)})
    index = InvertedIndex([bag], 0.8)
    posted = sum(c for plist in index.postings.values() for _, _, _, c in plist)
    assert posted == 3
    assert index.prefix(bag) == ["t0", "t1", "t2"]

    skewed = bag_from_counts(a=2, b=5, c=3)
    index = InvertedIndex([skewed], 0.8)
    assert sorted(index.postings) == ["a", "c"]


def test_index_is_frozen():
    index = InvertedIndex([bag_from_counts(a=1)], 0.8)
    with pytest.raises(AttributeError):
        index.postings = {}


def test_disjoint_vocabularies_never_candidates():
    x, y = bag_from_counts(a=3, b=1), bag_from_counts(c=3, d=1)
    index = InvertedIndex([x, y], 0.5)
    assert index.candidates(x) in ([0], [])
    assert 1 not in index.candidates(x)


def test_copies_collapse_to_one_representative():
    recs = [post_record(i, "def f(a):\n    return a\n") for i in range(5)]
    reps = representatives(recs)
    assert len(reps) == 1 and reps[0].group_size_a == 5
    det = detect(reps)
    assert det.pairs == [] and not det.flagged_a


def test_numbered_route_all_mutually_flagged():
    recs = [post_record(i, numbered_route(i)) for i in range(1, 41)]
    reps = representatives(recs)
    det = detect(reps, None, DetectorConfig(0.8))
    assert len(det.flagged_a) == 40
    assert len(det.pairs) == 40 * 39 // 2
    assert {p.overlap for p in det.pairs} == {5}


def test_duplicate_representatives_rejected():
    r = rep(bag_from_counts(a=1))
    with pytest.raises(ValueError):
        detect([r, r])


def test_empty_bags_and_floor():
    empty = Representative(EMPTY_TOKEN_HASH, TokenBag({}), 2, 0)
    small = rep(bag_from_counts(a=1, b=1))
    small2 = rep(bag_from_counts(a=1, b=1, c=0, d=1))
    det = detect([empty, small, small2], None, DetectorConfig(0.5))
    assert det.empty_skipped == 1 and EMPTY_TOKEN_HASH not in det.flagged_a
    assert det.flagged_a == {small.token_hash, small2.token_hash}
    det = detect([empty, small, small2], None, DetectorConfig(0.5, min_tokens=3))
    assert det.below_floor == 1 and not det.pairs


def test_inter_shared_hash_flags_both_sides_without_pair():
    shared = bag_from_counts(x=3, y=1)
    other_a = bag_from_counts(p=5)
    other_b = bag_from_counts(q=5)
    det = detect([rep(shared), rep(other_a)], [rep(shared, 0, 1), rep(other_b, 0, 1)])
    assert det.flagged_a == {shared.digest()} == det.flagged_b
    assert det.pairs == []


def test_inter_near_pair_recorded():
    x = TokenBag({f"t{i}": 1 for i in range(10)})
    y = TokenBag({**{f"t{i}": 1 for i in range(9)}, "z": 1})
    det = detect([rep(x)], [rep(y, 0, 1)], DetectorConfig(0.8))
    assert det.flagged_a == {x.digest()} and det.flagged_b == {y.digest()}
    assert len(det.pairs) == 1 and det.pairs[0].overlap == 9
    assert det.flags([rep(x)], "a") == [{"token_hash": x.digest(), "inter_dup": True}]


def test_split_sides():
    recs_a = [post_record(1, "a b\nc\n")]
    recs_b = [post_record(2, "a b\nc\n"), post_record(3, "x\ny\n")]
    reps = representatives(recs_a, recs_b)
    a, b = split_sides(reps)
    assert len(a) == 1 and len(b) == 2
    assert [r.token_hash for r in reps] == sorted(r.token_hash for r in reps)


def test_random_500_bags_match_brute_force():
    rng = np.random.default_rng(500)
    X = random_count_matrix(rng, max_n=500)
    while len(X) < 500:
        X = random_count_matrix(rng, max_n=500)
    X = X[:500]
    bags = bags_from_matrix(X)
    assert set(similar_pairs(bags, 0.8)) == brute_force_pairs(X, 0.8)


@pytest.mark.parametrize("seed", range(6))
def test_inter_matches_brute_force(seed):
    rng = np.random.default_rng(1000 + seed)
    X = random_count_matrix(rng, max_n=120, max_vocab=40)
    Y = random_count_matrix(rng, max_n=120, max_vocab=40)
    vocab = max(X.shape[1], Y.shape[1])
    X = np.pad(X, ((0, 0), (0, vocab - X.shape[1])))
    Y = np.pad(Y, ((0, 0), (0, vocab - Y.shape[1])))
    for theta in THETAS:
        got = set(similar_pairs(bags_from_matrix(X), theta, bags_from_matrix(Y)))
        assert got == brute_force_pairs(X, theta, Y)


# -- properties ---------------------------------------------------------------

bags_st = st.dictionaries(st.sampled_from("abcdefgh"), st.integers(1, 6), max_size=8).map(TokenBag)
thetas = st.sampled_from([0.5, 0.6, 0.7, 0.75, 0.8, 0.9, 1.0])


@given(bags_st, bags_st, thetas)
def test_verify_is_symmetric(x, y, theta):
    p, q = verify(x, y, theta), verify(y, x, theta)
    assert (p is None) == (q is None)
    if p is not None:
        assert p == q


@given(st.lists(bags_st, min_size=2, max_size=25), thetas, thetas)
def test_raising_theta_never_adds_pairs(bags, t1, t2):
    lo, hi = sorted((t1, t2))
    assert set(similar_pairs(bags, hi)) <= set(similar_pairs(bags, lo))


@settings(max_examples=150)
@given(st.lists(bags_st, min_size=2, max_size=25), thetas)
def test_qualifying_pairs_share_a_prefix_token(bags, theta):
    index = InvertedIndex(bags, theta)
    for i, j in combinations(range(len(bags)), 2):
        if bags[i].total_tokens and bags[j].total_tokens and verify(bags[i], bags[j], theta):
            assert set(index.prefix(bags[i])) & set(index.prefix(bags[j]))


@settings(max_examples=150)
@given(st.lists(bags_st, min_size=2, max_size=25), thetas)
def test_index_equals_exhaustive_verify(bags, theta):
    expected = {
        (i, j)
        for i, j in combinations(range(len(bags)), 2)
        if bags[i].total_tokens and bags[j].total_tokens and verify(bags[i], bags[j], theta)
    }
    assert set(similar_pairs(bags, theta)) == expected


@settings(max_examples=100)
@given(st.lists(bags_st, min_size=1, max_size=20), thetas)
def test_representatives_preserve_block_level_result(bags, theta):
    """Flagging over representatives equals flagging over every block."""
    blocks = [post_record(i, " ".join(t for t, c in b.counts.items() for _ in range(c)) or "#\n#")
              for i, b in enumerate(bags)]
    det = detect(representatives(blocks), None, DetectorConfig(theta))
    flagged_blocks = set()
    for i, j in combinations(range(len(blocks)), 2):
        x, y = blocks[i], blocks[j]
        if x.token_hash != y.token_hash and x.bag.total_tokens and y.bag.total_tokens:
            if verify(x.bag, y.bag, theta):
                flagged_blocks.update((x.token_hash, y.token_hash))
    assert det.flagged_a == flagged_blocks
