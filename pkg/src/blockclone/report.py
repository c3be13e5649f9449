"""Pipeline stages, report tables, large-block filters and distributions.

Every stage reads and writes files, so any stage can be re-run on its own.
Table captions and row names follow the published tables exactly.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .blocks import Origin, PathLike, read_jsonl, write_jsonl
from .corpus_extract import ScanStats, extract_corpus
from .hash_dedup import CloneGroup, DigestTally, DupReport, Level, common_digests, group
from .nearmiss import ClonePair, DetectorConfig, detect, representatives, split_sides
from .post_extract import PostStats, extract_posts
from .records import (
    load_blocks,
    load_full_records,
    load_records,
    tokenize_blocks,
    write_blocks,
    write_records,
)

log = logging.getLogger(__name__)

COLUMNS = ("GH", "SO")

BLOCK_CAPTION = "Block-hash similarity"
TOKEN_CAPTION = "Token-hash similarity"
SCC_CAPTION = "SCC Similarity"

BLOCK_ROWS = ("Total blocks", "Distinct block-hashes", "Common distinct block-hashes", "Common blocks")
TOKEN_ROWS = ("Total # blocks", "Distinct token-hashes", "Common distinct token-hashes", "Common blocks")
SCC_ROWS = ("Distinct token hashes", "SCC-dup", "Common")

# unique-token floors used for the large-block views
LARGE_BLOCK_MIN_UNIQUE = 30
LARGE_TOKEN_MIN_UNIQUE = 35


@dataclass
class Table:
    caption: str
    rows: list  # (name, gh, so)
    min_unique: int = 0

    @property
    def title(self) -> str:
        if self.min_unique:
            return f"{self.caption} (unique tokens >= {self.min_unique})"
        return self.caption

    def value(self, row: str, column: str) -> int:
        col = COLUMNS.index(column)
        for name, *vals in self.rows:
            if name == row:
                return vals[col]
        raise KeyError(row)

    def to_json(self) -> dict:
        return {
            "caption": self.caption,
            "min_unique": self.min_unique,
            "columns": list(COLUMNS),
            "rows": [{"name": n, COLUMNS[0]: a, COLUMNS[1]: b} for n, a, b in self.rows],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Table":
        rows = [(r["name"], r[COLUMNS[0]], r[COLUMNS[1]]) for r in obj["rows"]]
        return cls(obj["caption"], rows, obj.get("min_unique", 0))

    def render_text(self) -> str:
        width = max(len(n) for n, _, _ in self.rows)
        cells = [[f"{a:,}", f"{b:,}"] for _, a, b in self.rows]
        cw = max(12, *(len(c) for pair in cells for c in pair))
        lines = [self.title, f"{'':<{width}} | {COLUMNS[0]:>{cw}} | {COLUMNS[1]:>{cw}}"]
        lines.append("-" * width + "-+-" + "-" * cw + "-+-" + "-" * cw)
        for (name, _, _), (a, b) in zip(self.rows, cells):
            lines.append(f"{name:<{width}} | {a:>{cw}} | {b:>{cw}}")
        return "\n".join(lines) + "\n"

    def render_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.title, *COLUMNS])
        w.writerows(self.rows)
        return buf.getvalue()


def dup_table(rep: DupReport, min_unique: int = 0) -> Table:
    names = BLOCK_ROWS if rep.level is Level.BLOCK_HASH else TOKEN_ROWS
    caption = BLOCK_CAPTION if rep.level is Level.BLOCK_HASH else TOKEN_CAPTION
    rows = [
        (names[0], rep.total_blocks_a, rep.total_blocks_b),
        (names[1], rep.distinct_a, rep.distinct_b),
        (names[2], rep.common_distinct, rep.common_distinct),
        (names[3], rep.common_blocks_a, rep.common_blocks_b),
    ]
    return Table(caption, rows, min_unique)


def scc_table(summary: Mapping[str, int], min_unique: int = 0) -> Table:
    rows = [
        (SCC_ROWS[0], summary["distinct_a"], summary["distinct_b"]),
        (SCC_ROWS[1], summary["scc_dup_a"], summary["scc_dup_b"]),
        (SCC_ROWS[2], summary["common_a"], summary["common_b"]),
    ]
    return Table(SCC_CAPTION, rows, min_unique)


def render(tables: Sequence[Table], fmt: str = "text") -> str:
    fmt = fmt.lower()
    if fmt == "text":
        return "\n".join(t.render_text() for t in tables)
    if fmt == "csv":
        return "\n".join(t.render_csv() for t in tables)
    if fmt == "records":
        return json.dumps([t.to_json() for t in tables], indent=2) + "\n"
    raise ValueError(f"unknown output format {fmt!r}")


def filter_large(records: Iterable, min_unique: int) -> list:
    """Keep records with at least ``min_unique`` distinct tokens."""
    return [r for r in records if r.unique_tokens >= min_unique]


@dataclass(frozen=True)
class RankedGroup:
    key: str
    size: int
    sample_source_id: str
    sample_ordinal: int
    sample_text: Optional[str] = None

    def to_json(self) -> dict:
        return asdict(self)


def rank_groups(
    groups: Iterable[CloneGroup], k: int = 10, texts: Optional[Mapping] = None
) -> list[RankedGroup]:
    """The ``k`` largest groups, ties broken by digest.

    The sample member is the one with the smallest ``(source_id, ordinal)``;
    its text is attached when ``texts`` maps block refs to text.
    """
    if k <= 0:
        return []
    ranked = sorted(groups, key=lambda g: (-g.size, g.key))[:k]
    out = []
    for g in ranked:
        sid, ordinal = min(g.members)
        text = texts.get((sid, ordinal)) if texts is not None else None
        out.append(RankedGroup(g.key, g.size, sid, ordinal, text))
    return out


def rank_by_clones(pairs: Iterable[ClonePair], k: int = 10) -> list[tuple[str, int]]:
    """Token hashes with the most near-miss partners, ties by hash."""
    degree: Counter = Counter()
    for p in pairs:
        degree[p.left] += 1
        degree[p.right] += 1
    return sorted(degree.items(), key=lambda kv: (-kv[1], kv[0]))[: max(k, 0)]


def _histogram(values: Iterable[int]) -> list[tuple[int, int]]:
    return sorted(Counter(values).items())


def _write_hist(path: Path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bucket", "count"])
        w.writerows(rows)


def post_id_of(source_id: str) -> str:
    return source_id.split("#", 1)[0]


def emit_distributions(records: Iterable, out_dir: PathLike) -> list[Path]:
    """Per-origin histograms of SLOC and unique tokens, plus blocks per post.

    Each file is a ``bucket,count`` CSV with one row per observed value.
    Files are written even when an origin has no records.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_origin: dict[Origin, list] = {Origin.CORPUS: [], Origin.POSTS: []}
    for r in records:
        by_origin[r.block.origin].append(r)
    written = []
    for origin, recs in by_origin.items():
        tag = origin.value.lower()
        for metric in ("sloc", "unique_tokens"):
            path = out / f"{metric}_{tag}.csv"
            _write_hist(path, _histogram(getattr(r, metric) for r in recs))
            written.append(path)
    per_post = Counter(post_id_of(r.block.source_id) for r in by_origin[Origin.POSTS])
    path = out / "blocks_per_post.csv"
    _write_hist(path, _histogram(per_post.values()))
    written.append(path)
    return written


# -- stages -----------------------------------------------------------------


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def extract_corpus_stage(root: PathLike, out: PathLike, suffix: str = ".py") -> ScanStats:
    stats = ScanStats()
    write_blocks(extract_corpus(root, suffix, stats), out)
    return stats


def extract_posts_stage(
    dump: PathLike, out: PathLike, tag: str = "python", substring: bool = False
) -> PostStats:
    stats = PostStats()
    with open(dump, "rb") as fh:
        write_blocks(extract_posts(fh, tag, substring, stats), out)
    return stats


def tokenize_stage(blocks: PathLike, out: PathLike) -> int:
    return write_records(tokenize_blocks(load_blocks(blocks)), out)


def dedup_stage(
    a: PathLike, b: PathLike, level: Level, out_dir: PathLike, top_k: int = 10
) -> DupReport:
    """Cross-corpus report for one hash level plus the top-k groups."""
    level = Level(level)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    recs_a, recs_b = load_records(a), load_records(b)
    tally = DigestTally.of(recs_a, recs_b, level)
    rep = DupReport.from_tally(tally, level)
    table = dup_table(rep)
    _dump_json({"report": rep.to_json(), "table": table.to_json()}, out / f"{level.value}_report.json")
    (out / f"{level.value}_report.txt").write_text(table.render_text(), encoding="utf-8")

    common = common_digests(tally)
    for side, recs in (("a", recs_a), ("b", recs_b)):
        texts = {r.block.ref: r.block.text for r in recs}
        groups = group(recs, level)
        top = rank_groups(groups, top_k, texts)
        write_jsonl((g.to_json() for g in top), out / f"{level.value}_top_{side}.jsonl")
        top_common = rank_groups([g for g in groups if g.key in common], top_k, texts)
        write_jsonl((g.to_json() for g in top_common), out / f"{level.value}_top_common_{side}.jsonl")
    return rep


def scc_stage(
    a: Optional[PathLike],
    b: Optional[PathLike],
    out_dir: PathLike,
    theta: float = 0.8,
    min_tokens: int = 0,
    top_k: int = 10,
) -> dict:
    """Near-miss detection: intra for each given side, inter when both are."""
    if a is None and b is None:
        raise ValueError("scc needs at least one record file")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = DetectorConfig(theta=theta, min_tokens=min_tokens)
    recs_a = load_full_records(a) if a is not None else []
    recs_b = load_full_records(b) if b is not None else []
    reps = representatives(recs_a, recs_b)
    reps_a, reps_b = split_sides(reps)

    summary = {"theta": float(theta), "min_tokens": min_tokens}
    flags: dict[str, dict] = {"a": {}, "b": {}}
    sides = [("a", reps_a, a), ("b", reps_b, b)]
    for side, side_reps, path in sides:
        summary[f"distinct_{side}"] = len(side_reps)
        if path is None:
            summary[f"scc_dup_{side}"] = 0
            continue
        det = detect(side_reps, None, config)
        write_jsonl((p.to_json() for p in det.pairs), out / f"pairs_intra_{side}.jsonl")
        top = [{"token_hash": h, "clones": n} for h, n in rank_by_clones(det.pairs, top_k)]
        write_jsonl(top, out / f"top_intra_{side}.jsonl")
        summary[f"scc_dup_{side}"] = len(det.flagged_a)
        summary[f"empty_skipped_{side}"] = det.empty_skipped
        for r in side_reps:
            flags[side][r.token_hash] = {
                "token_hash": r.token_hash,
                "intra_dup": r.token_hash in det.flagged_a,
                "inter_dup": None,
            }

    if a is not None and b is not None:
        det = detect(reps_a, reps_b, config)
        write_jsonl((p.to_json() for p in det.pairs), out / "pairs_inter.jsonl")
        summary["common_a"] = len(det.flagged_a)
        summary["common_b"] = len(det.flagged_b)
        for side, flagged in (("a", det.flagged_a), ("b", det.flagged_b)):
            for h, row in flags[side].items():
                row["inter_dup"] = h in flagged
    else:
        summary["common_a"] = summary["common_b"] = 0

    for side, _, path in sides:
        if path is not None:
            write_jsonl((flags[side][h] for h in sorted(flags[side])), out / f"flags_{side}.jsonl")
    table = scc_table(summary)
    summary["table"] = table.to_json()
    _dump_json(summary, out / "summary.json")
    (out / "report.txt").write_text(table.render_text(), encoding="utf-8")
    return summary


def _read_flags(path: Path) -> dict:
    return {row["token_hash"]: row for row in read_jsonl(path)}


def build_tables(
    recs_a: Sequence,
    recs_b: Sequence,
    flags_a: Optional[Mapping] = None,
    flags_b: Optional[Mapping] = None,
    min_unique_block: int = 0,
    min_unique_token: int = 0,
) -> list[Table]:
    """Tables I-III from stored records and (optionally) near-miss flags.

    With a ``min_unique`` floor, hash tables are computed over the records
    that pass it and the near-miss table keeps only flagged hashes whose
    blocks pass it.
    """
    tables = []
    for level, floor in ((Level.BLOCK_HASH, min_unique_block), (Level.TOKEN_HASH, min_unique_token)):
        a = filter_large(recs_a, floor) if floor else recs_a
        b = filter_large(recs_b, floor) if floor else recs_b
        tables.append(dup_table(DupReport.from_tally(DigestTally.of(a, b, level), level), floor))
    if flags_a is not None or flags_b is not None:
        floor = min_unique_token
        uniq = {r.token_hash: r.unique_tokens for r in (*recs_a, *recs_b)}

        def keep(h):
            return uniq.get(h, 0) >= floor

        summary = {}
        for side, flags, recs in (("a", flags_a or {}, recs_a), ("b", flags_b or {}, recs_b)):
            hashes = {r.token_hash for r in recs if keep(r.token_hash)}
            summary[f"distinct_{side}"] = len(hashes)
            summary[f"scc_dup_{side}"] = sum(
                1 for h, row in flags.items() if row.get("intra_dup") and h in hashes
            )
            summary[f"common_{side}"] = sum(
                1 for h, row in flags.items() if row.get("inter_dup") and h in hashes
            )
        tables.append(scc_table(summary, floor))
    return tables


def report_stage(
    workdir: PathLike,
    min_unique_block: int = LARGE_BLOCK_MIN_UNIQUE,
    min_unique_token: int = LARGE_TOKEN_MIN_UNIQUE,
    fmt: str = "text",
) -> list[Table]:
    """All tables for a work directory: full corpora, then the large-block views."""
    w = Path(workdir)
    recs_a = load_records(w / "records_a.jsonl")
    recs_b = load_records(w / "records_b.jsonl")
    flags_a = flags_b = None
    scc_dir = w / "scc"
    if (scc_dir / "flags_a.jsonl").exists() or (scc_dir / "flags_b.jsonl").exists():
        flags_a = _read_flags(scc_dir / "flags_a.jsonl") if (scc_dir / "flags_a.jsonl").exists() else {}
        flags_b = _read_flags(scc_dir / "flags_b.jsonl") if (scc_dir / "flags_b.jsonl").exists() else {}
    tables = build_tables(recs_a, recs_b, flags_a, flags_b)
    tables += build_tables(recs_a, recs_b, flags_a, flags_b, min_unique_block, min_unique_token)
    _dump_json([t.to_json() for t in tables], w / "report.json")
    suffix = {"text": "txt", "csv": "csv", "records": "records.json"}[fmt.lower()]
    (w / f"report.{suffix}").write_text(render(tables, fmt), encoding="utf-8")
    return tables


def distributions_stage(record_files: Sequence[PathLike], out_dir: PathLike) -> list[Path]:
    recs = []
    for path in record_files:
        recs.extend(load_records(path))
    return emit_distributions(recs, out_dir)


# -- end to end -------------------------------------------------------------


@dataclass
class PipelineConfig:
    corpus_root: PathLike
    posts_dump: PathLike
    workdir: PathLike
    tag: str = "python"
    tag_substring: bool = False
    theta: float = 0.8
    min_tokens: int = 0
    min_unique_block: int = LARGE_BLOCK_MIN_UNIQUE
    min_unique_token: int = LARGE_TOKEN_MIN_UNIQUE
    output_format: str = "text"
    suffix: str = ".py"
    top_k: int = 10
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        DetectorConfig(self.theta, self.min_tokens)
        if self.min_unique_block < 0 or self.min_unique_token < 0:
            raise ValueError("unique-token floors must be >= 0")
        if self.output_format.lower() not in ("text", "csv", "records"):
            raise ValueError(f"unknown output format {self.output_format!r}")


FAILED_MARKER = "PIPELINE_FAILED"
DONE_MARKER = "PIPELINE_DONE"

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2
INPUT_ERRORS = (FileNotFoundError, NotADirectoryError, PermissionError, ValueError)


def run_pipeline(config: PipelineConfig) -> int:
    """extract -> tokenize -> dedup (block, token) -> near-miss -> report.

    Returns an exit status. On failure the work directory holds a
    ``PIPELINE_FAILED`` file naming the stage, and whatever earlier stages
    produced stays in place.
    """
    w = Path(config.workdir)
    w.mkdir(parents=True, exist_ok=True)
    for marker in (FAILED_MARKER, DONE_MARKER):
        (w / marker).unlink(missing_ok=True)
    stage = "setup"
    try:
        stage = "extract-corpus"
        scan = extract_corpus_stage(config.corpus_root, w / "blocks_a.jsonl", config.suffix)
        stage = "extract-posts"
        posts = extract_posts_stage(
            config.posts_dump, w / "blocks_b.jsonl", config.tag, config.tag_substring
        )
        config.stats = {"corpus": asdict(scan), "posts": asdict(posts)}
        _dump_json(config.stats, w / "stats.json")
        stage = "tokenize"
        tokenize_stage(w / "blocks_a.jsonl", w / "records_a.jsonl")
        tokenize_stage(w / "blocks_b.jsonl", w / "records_b.jsonl")
        stage = "dedup"
        for level in Level:
            dedup_stage(w / "records_a.jsonl", w / "records_b.jsonl", level, w / "dedup", config.top_k)
        stage = "scc"
        scc_stage(
            w / "records_a.jsonl",
            w / "records_b.jsonl",
            w / "scc",
            config.theta,
            config.min_tokens,
            config.top_k,
        )
        stage = "report"
        report_stage(w, config.min_unique_block, config.min_unique_token, config.output_format)
        stage = "distributions"
        distributions_stage([w / "records_a.jsonl", w / "records_b.jsonl"], w / "distributions")
    except INPUT_ERRORS as exc:
        _mark_failed(w, stage, exc)
        log.error("%s failed: %s", stage, exc)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        _mark_failed(w, stage, exc)
        log.exception("%s failed", stage)
        return EXIT_INTERNAL
    (w / DONE_MARKER).write_text("ok\n", encoding="utf-8")
    return EXIT_OK


def _mark_failed(w: Path, stage: str, exc: BaseException) -> None:
    (w / FAILED_MARKER).write_text(
        f"stage: {stage}\nerror: {type(exc).__name__}: {exc}\n"
        "outputs in this directory are partial\n",
        encoding="utf-8",
    )
