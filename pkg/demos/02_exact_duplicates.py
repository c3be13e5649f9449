"""
Exact duplicates across two corpora
===================================

A synthetic project corpus and a synthetic set of snippets share part of
their code. Grouping by block hash finds byte-identical copies; grouping by
token hash also merges copies that differ only in layout or comments.
"""

import random

from blockclone.blocks import Origin, RawBlock
from blockclone.hash_dedup import Level, cross_dedup, group
from blockclone.report import dup_table, rank_groups
from blockclone.synthetic import synthetic_blocks
from blockclone.tokenizer import make_record

corpus = [make_record(b) for b in synthetic_blocks(3000, seed=1, copy_rate=0.4)]

# the posts side borrows 200 corpus blocks and adds fresh ones
rng = random.Random(2)
borrowed = rng.sample(corpus, 200)
fresh = synthetic_blocks(800, seed=3, origin=Origin.POSTS)
posts = [
    make_record(RawBlock(Origin.POSTS, f"{i}#0", 0, r.block.text))
    for i, r in enumerate(borrowed, start=10_000)
] + [make_record(b) for b in fresh]

for level in Level:
    print(dup_table(cross_dedup(corpus, posts, level)).render_text())

# the most copied blocks inside the corpus
texts = {r.block.ref: r.block.text for r in corpus}
for g in rank_groups(group(corpus, Level.TOKEN_HASH), k=3, texts=texts):
    print(f"{g.size} copies, e.g. {g.sample_source_id}#{g.sample_ordinal}")
    print(g.sample_text)
