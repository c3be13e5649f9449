"""
Near-miss clones
================

Two bags are clones when their multiset overlap reaches ceil(theta * larger
size). The detector indexes only the rarest prefix of each bag and checks
the candidates it finds; here we compare it with an exhaustive scan.
"""

import time
from itertools import combinations

from blockclone.nearmiss import (
    DetectorConfig,
    InvertedIndex,
    detect,
    representatives,
    similarity_threshold,
    verify,
)
from blockclone.synthetic import synthetic_blocks
from blockclone.tokenizer import make_record, tokenize

a = tokenize("def GET(self):\n    return render.page1()\n")
b = tokenize("def GET(self):\n    return render.page2()\n")
print("sizes", a.total_tokens, b.total_tokens, "threshold", similarity_threshold(6, 6, 0.8))
print("pair:", verify(a, b, 0.8))

index = InvertedIndex([a, b], 0.8)
print("indexed prefix of a:", index.prefix(a))

records = [make_record(blk) for blk in synthetic_blocks(1000, seed=7)]
reps = representatives(records)
print(len(records), "blocks,", len(reps), "distinct token hashes")

t0 = time.perf_counter()
det = detect(reps, None, DetectorConfig(0.8))
t_index = time.perf_counter() - t0

t0 = time.perf_counter()
brute = {
    tuple(sorted((x.token_hash, y.token_hash)))
    for x, y in combinations(reps, 2)
    if x.size and y.size and verify(x.bag, y.bag, 0.8)
}
t_brute = time.perf_counter() - t0

print(f"index: {len(det.pairs)} pairs in {t_index:.2f}s")
print(f"exhaustive: {len(brute)} pairs in {t_brute:.2f}s")
print("identical:", brute == {(p.left, p.right) for p in det.pairs})
print("flagged as near-miss duplicates:", len(det.flagged_a))
