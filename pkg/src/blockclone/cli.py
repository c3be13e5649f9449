"""Command line entry point: ``blockclone <subcommand> ...``.

Corpus preparation is out of scope: the project tree should already hold
non-fork projects only, and a compressed Posts dump must be unpacked first
(``7z x Posts.7z``).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import report
from .hash_dedup import Level
from .report import EXIT_INPUT, EXIT_INTERNAL, EXIT_OK, INPUT_ERRORS, PipelineConfig

log = logging.getLogger("blockclone")


def _out(path):
    return None if path in (None, "-") else Path(path)


def cmd_extract_corpus(args) -> int:
    stats = report.extract_corpus_stage(args.root, _out(args.output), args.suffix)
    log.info(
        "files=%d blocks=%d unreadable=%d unparsable=%d",
        stats.files, stats.blocks, stats.unreadable_files, stats.unparsable_files,
    )
    return EXIT_OK


def cmd_extract_posts(args) -> int:
    stats = report.extract_posts_stage(args.dump, _out(args.output), args.tag, args.tag_substring)
    log.info(
        "rows=%d kept=%d snippets=%d malformed=%d orphans=%d unbalanced=%d",
        stats.rows, stats.posts_kept, stats.snippets, stats.malformed_rows,
        stats.orphan_answers, stats.unbalanced_code_tags,
    )
    return EXIT_OK


def cmd_tokenize(args) -> int:
    n = report.tokenize_stage(args.blocks, _out(args.output))
    log.info("records=%d", n)
    return EXIT_OK


def cmd_dedup(args) -> int:
    levels = list(Level) if args.level == "both" else [Level(args.level)]
    for level in levels:
        rep = report.dedup_stage(args.a, args.b, level, args.output, args.top)
        sys.stdout.write(report.dup_table(rep).render_text())
    return EXIT_OK


def cmd_scc(args) -> int:
    summary = report.scc_stage(args.a, args.b, args.output, args.theta, args.min_tokens, args.top)
    sys.stdout.write(report.scc_table(summary).render_text())
    return EXIT_OK


def cmd_report(args) -> int:
    block_floor = args.min_unique if args.min_unique is not None else args.min_unique_block
    token_floor = args.min_unique if args.min_unique is not None else args.min_unique_token
    tables = report.report_stage(args.workdir, block_floor, token_floor, args.format)
    sys.stdout.write(report.render(tables, args.format))
    return EXIT_OK


def cmd_distributions(args) -> int:
    for path in report.distributions_stage(args.records, args.output):
        log.info("wrote %s", path)
    return EXIT_OK


def cmd_run(args) -> int:
    config = PipelineConfig(
        corpus_root=args.root,
        posts_dump=args.dump,
        workdir=args.workdir,
        tag=args.tag,
        tag_substring=args.tag_substring,
        theta=args.theta,
        min_tokens=args.min_tokens,
        min_unique_block=args.min_unique_block,
        min_unique_token=args.min_unique_token,
        output_format=args.format,
        top_k=args.top,
    )
    status = report.run_pipeline(config)
    if status == EXIT_OK:
        sys.stdout.write(Path(args.workdir, f"report.{_suffix(args.format)}").read_text())
    return status


def _suffix(fmt: str) -> str:
    return {"text": "txt", "csv": "csv", "records": "records.json"}[fmt]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="blockclone",
        description="Exact, token-level and near-miss duplication between a project "
        "corpus and a Q&A posts dump.",
        epilog="Inputs are assumed prepared: forks removed from the project tree, "
        "the posts dump decompressed.",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("extract-corpus", help="function blocks from a directory of projects")
    s.add_argument("root")
    s.add_argument("-o", "--output", default="-")
    s.add_argument("--suffix", default=".py")
    s.set_defaults(func=cmd_extract_corpus)

    s = sub.add_parser("extract-posts", help="multi-line code snippets from a Posts.xml dump")
    s.add_argument("dump")
    s.add_argument("--tag", default="python")
    s.add_argument("--tag-substring", action="store_true",
                   help="match the tag as a substring instead of a whole tag")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_extract_posts)

    s = sub.add_parser("tokenize", help="add hashes, token counts and line facts to blocks")
    s.add_argument("blocks")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_tokenize)

    s = sub.add_parser("dedup", help="block-hash / token-hash duplication report")
    s.add_argument("--level", choices=["block", "token", "both"], default="both")
    s.add_argument("--a", required=True, help="records of the project corpus")
    s.add_argument("--b", required=True, help="records of the posts corpus")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--top", type=int, default=10)
    s.set_defaults(func=cmd_dedup)

    s = sub.add_parser("scc", help="near-miss clone detection over distinct token hashes")
    s.add_argument("--theta", type=float, default=0.8)
    s.add_argument("--a")
    s.add_argument("--b")
    s.add_argument("--min-tokens", type=int, default=0)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--top", type=int, default=10)
    s.set_defaults(func=cmd_scc)

    s = sub.add_parser("report", help="tables from a work directory")
    s.add_argument("-w", "--workdir", required=True)
    s.add_argument("--min-unique", type=int, help="one unique-token floor for every large-block table")
    s.add_argument("--min-unique-block", type=int, default=report.LARGE_BLOCK_MIN_UNIQUE)
    s.add_argument("--min-unique-token", type=int, default=report.LARGE_TOKEN_MIN_UNIQUE)
    s.add_argument("--format", choices=["text", "csv", "records"], default="text")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("distributions", help="SLOC / unique-token / blocks-per-post histograms")
    s.add_argument("records", nargs="+")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_distributions)

    s = sub.add_parser("run", help="whole pipeline into one work directory")
    s.add_argument("root")
    s.add_argument("dump")
    s.add_argument("-w", "--workdir", required=True)
    s.add_argument("--tag", default="python")
    s.add_argument("--tag-substring", action="store_true")
    s.add_argument("--theta", type=float, default=0.8)
    s.add_argument("--min-tokens", type=int, default=0)
    s.add_argument("--min-unique-block", type=int, default=report.LARGE_BLOCK_MIN_UNIQUE)
    s.add_argument("--min-unique-token", type=int, default=report.LARGE_TOKEN_MIN_UNIQUE)
    s.add_argument("--format", choices=["text", "csv", "records"], default="text")
    s.add_argument("--top", type=int, default=10)
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"blockclone: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"blockclone: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
