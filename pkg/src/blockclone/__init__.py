"""Block-level code duplication between a project corpus and a Q&A posts dump.

Three similarity levels are supported: identical text (block hash),
identical bag of tokens (token hash) and near-miss clones whose token bags
overlap by at least a fraction ``theta`` (0.8 by default).
"""

from .blocks import Origin, RawBlock
from .corpus_extract import SourceFile, UnparsableFile, extract_blocks, extract_corpus, scan_projects
from .hash_dedup import CloneGroup, DupReport, Level, cross_dedup, group
from .nearmiss import (
    ClonePair,
    DetectorConfig,
    InvertedIndex,
    Representative,
    detect,
    representatives,
    similar_pairs,
    similarity_threshold,
    verify,
)
from .post_extract import Post, PostType, Snippet, extract_posts, extract_snippets, filter_by_tag, parse_posts
from .report import PipelineConfig, emit_distributions, filter_large, rank_groups, run_pipeline
from .tokenizer import BlockRecord, TokenBag, make_record, strip_comments, tokenize

__version__ = "0.1.0"
