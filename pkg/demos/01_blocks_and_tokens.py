"""
From source text to block records
=================================

Blocks are outermost function definitions. Each block gets two digests:
one over its exact text and one over its bag of tokens.
"""

from blockclone.blocks import Origin, RawBlock
from blockclone.corpus_extract import SourceFile, extract_blocks
from blockclone.tokenizer import make_record

source = '''\
class Cache:
    def get(self, key, default=None):
        # look the key up
        return self.data.get(key, default)

def outer(x):
    def inner(y):
        return y + 1
    return inner(x)
'''

blocks = extract_blocks(SourceFile("demo", "cache.py", source))
for b in blocks:
    print(f"{b.source_id} lines {b.start_line}-{b.end_line}")
    print(b.text)

# inner() stays inside outer(): only outermost functions become blocks
record = make_record(blocks[0])
print("bag:", dict(record.bag.counts))
print("total", record.total_tokens, "unique", record.unique_tokens, "sloc", record.sloc)

# re-indenting and dropping the comment changes the text but not the bag
edited = RawBlock(
    Origin.POSTS, "1#0", 0,
    "def get(self,key,default=None):\n\treturn self.data.get(key,default)\n",
)
other = make_record(edited)
print("same block hash:", record.block_hash == other.block_hash)
print("same token hash:", record.token_hash == other.token_hash)
