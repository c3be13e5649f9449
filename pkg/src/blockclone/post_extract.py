"""Stack-Exchange Posts dump parsing and code snippet extraction.

The dump is one ``<row .../>`` element per post. Questions carry the
tags; answers point at their question through ``ParentId``.
"""

from __future__ import annotations

import enum
import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import IO, Callable, Iterable, Iterator, Optional

from .blocks import Origin, RawBlock

log = logging.getLogger(__name__)


class PostType(enum.Enum):
    QUESTION = 1
    ANSWER = 2
    OTHER = 0


class PostsDumpError(ValueError):
    """The dump ended before the document was complete."""


@dataclass(frozen=True)
class Post:
    id: int
    post_type: PostType
    body: str
    parent_id: Optional[int] = None
    tags: Optional[tuple] = None


@dataclass(frozen=True)
class Snippet:
    post_id: int
    index_in_post: int
    text: str

    def to_block(self) -> RawBlock:
        return RawBlock(
            origin=Origin.POSTS,
            source_id=f"{self.post_id}#{self.index_in_post}",
            ordinal=self.index_in_post,
            text=self.text,
        )


@dataclass
class PostStats:
    rows: int = 0
    malformed_rows: int = 0
    questions: int = 0
    answers: int = 0
    orphan_answers: int = 0
    posts_kept: int = 0
    code_elements: int = 0
    unbalanced_code_tags: int = 0
    snippets: int = 0
    malformed_ids: list = field(default_factory=list)


_TAG_RE = re.compile(r"<([^<>]+)>")


def split_tags(raw: str) -> tuple:
    """``<python><list>`` (and the newer ``|python|list|``) to a tuple."""
    raw = raw.strip()
    if raw.startswith("<"):
        return tuple(_TAG_RE.findall(raw))
    return tuple(t for t in raw.split("|") if t)


def _row_to_post(attrs: dict) -> Post:
    pid = int(attrs["Id"])
    if pid < 1:
        raise ValueError("Id must be positive")
    code = int(attrs["PostTypeId"])
    body = attrs["Body"]
    try:
        ptype = PostType(code)
    except ValueError:
        ptype = PostType.OTHER
    parent = attrs.get("ParentId")
    parent_id = int(parent) if parent not in (None, "") else None
    if ptype is PostType.ANSWER and parent_id is None:
        raise ValueError("answer without ParentId")
    tags = split_tags(attrs.get("Tags", "")) if ptype is PostType.QUESTION else None
    return Post(pid, ptype, body, parent_id, tags)


def parse_posts(
    dump: IO[bytes], stats: Optional[PostStats] = None, chunk_size: int = 1 << 16
) -> Iterator[Post]:
    """Stream posts out of a Posts XML dump.

    Attribute values come back entity-decoded by the XML parser. Rows that
    lack ``Id``, ``PostTypeId`` or ``Body`` (or an answer's ``ParentId``) are
    skipped and counted. A truncated document raises PostsDumpError only
    after every complete row has been yielded. An empty input yields nothing.
    """
    if stats is None:
        stats = PostStats()
    parser = ET.XMLPullParser(events=("start", "end"))
    root = None
    started = False

    def drain():
        nonlocal root
        for event, elem in parser.read_events():
            if event == "start":
                if root is None:
                    root = elem
                continue
            if elem.tag != "row":
                continue
            stats.rows += 1
            try:
                post = _row_to_post(elem.attrib)
            except (KeyError, ValueError) as exc:
                stats.malformed_rows += 1
                stats.malformed_ids.append(elem.attrib.get("Id"))
                log.debug("malformed row %r: %s", elem.attrib.get("Id"), exc)
                post = None
            if elem is not root:
                root.remove(elem)
            if post is not None:
                yield post

    error = None
    try:
        while True:
            chunk = dump.read(chunk_size)
            if not chunk:
                break
            if not started:
                if not chunk.strip():
                    continue
                started = True
            parser.feed(chunk)
            yield from drain()
        if started:
            parser.close()
    except ET.ParseError as exc:
        error = exc
    # expat may hold back complete rows until close(), even when close() fails
    yield from drain()
    if error is not None:
        raise PostsDumpError(f"posts dump is not well-formed: {error}") from error


def _tag_matches(tags: Iterable[str], tag: str, substring: bool) -> bool:
    tag = tag.lower()
    if substring:
        return any(tag in t.lower() for t in tags)
    return any(tag == t.lower() for t in tags)


def filter_by_tag(
    posts: Iterable[Post],
    tag: str,
    substring: bool = False,
    stats: Optional[PostStats] = None,
) -> Iterator[Post]:
    """Questions tagged ``tag`` and the answers to them, in one pass.

    Question ids seen so far are retained. An answer that arrives before its
    question is held back until the question shows up; answers whose
    question never appears are dropped and counted as orphans.
    """
    if stats is None:
        stats = PostStats()
    seen: dict[int, bool] = {}
    pending: dict[int, list[Post]] = {}
    for post in posts:
        if post.post_type is PostType.QUESTION:
            stats.questions += 1
            ok = _tag_matches(post.tags or (), tag, substring)
            seen[post.id] = ok
            waiting = pending.pop(post.id, [])
            if ok:
                stats.posts_kept += 1 + len(waiting)
                yield post
                yield from waiting
        elif post.post_type is PostType.ANSWER:
            stats.answers += 1
            matched = seen.get(post.parent_id)
            if matched is None:
                pending.setdefault(post.parent_id, []).append(post)
            elif matched:
                stats.posts_kept += 1
                yield post
    stats.orphan_answers += sum(len(v) for v in pending.values())


def filter_by_tag_two_pass(
    load: Callable[[], Iterable[Post]],
    tag: str,
    substring: bool = False,
    stats: Optional[PostStats] = None,
) -> Iterator[Post]:
    """Same selection as filter_by_tag, reading the dump twice.

    Pass one collects question ids, pass two emits. ``load`` must return a
    fresh iterable of the same posts on every call.
    """
    if stats is None:
        stats = PostStats()
    questions: set[int] = set()
    wanted: set[int] = set()
    for post in load():
        if post.post_type is PostType.QUESTION:
            questions.add(post.id)
            if _tag_matches(post.tags or (), tag, substring):
                wanted.add(post.id)
    for post in load():
        if post.post_type is PostType.QUESTION:
            stats.questions += 1
            if post.id in wanted:
                stats.posts_kept += 1
                yield post
        elif post.post_type is PostType.ANSWER:
            stats.answers += 1
            if post.parent_id not in questions:
                stats.orphan_answers += 1
            elif post.parent_id in wanted:
                stats.posts_kept += 1
                yield post


_CODE_OPEN = re.compile(r"<code(?:\s[^>]*)?>", re.IGNORECASE)
_CODE_CLOSE = re.compile(r"</code\s*>", re.IGNORECASE)
_ANY_TAG = re.compile(r"<[^>]*>")
_ENTITY = re.compile(r"&(lt|gt|amp|quot|apos|#[0-9]+|#[xX][0-9a-fA-F]+);")
_NAMED = {"lt": "<", "gt": ">", "amp": "&", "quot": '"', "apos": "'"}


def _entity(m: re.Match) -> str:
    name = m.group(1)
    if name in _NAMED:
        return _NAMED[name]
    try:
        cp = int(name[2:], 16) if name[1] in "xX" else int(name[1:])
        return chr(cp)
    except (ValueError, OverflowError):
        return m.group()


def decode_entities(text: str) -> str:
    """Decode the five XML entities and numeric character references."""
    return _ENTITY.sub(_entity, text)


def code_elements(body: str, stats: Optional[PostStats] = None) -> list[str]:
    """Text content of every balanced ``<code>`` element, in body order."""
    out = []
    pos = 0
    while True:
        m = _CODE_OPEN.search(body, pos)
        if m is None:
            break
        close = _CODE_CLOSE.search(body, m.end())
        if close is None:
            if stats is not None:
                stats.unbalanced_code_tags += 1
            break
        inner = _ANY_TAG.sub("", body[m.end() : close.start()])
        out.append(decode_entities(inner))
        pos = close.end()
    return out


def is_multiline(text: str) -> bool:
    return "\n" in text.strip()


def extract_snippets(post: Post, stats: Optional[PostStats] = None) -> list[Snippet]:
    """Multi-line code snippets of a post; single-line ones are dropped."""
    codes = code_elements(post.body, stats)
    kept = [c for c in codes if is_multiline(c)]
    if stats is not None:
        stats.code_elements += len(codes)
        stats.snippets += len(kept)
    return [Snippet(post.id, i, text) for i, text in enumerate(kept)]


def extract_posts(
    dump: IO[bytes],
    tag: str = "python",
    substring: bool = False,
    stats: Optional[PostStats] = None,
) -> Iterator[RawBlock]:
    """Dump to RawBlocks: parse, tag-filter, then extract snippets."""
    if stats is None:
        stats = PostStats()
    for post in filter_by_tag(parse_posts(dump, stats), tag, substring, stats):
        for snip in extract_snippets(post, stats):
            yield snip.to_block()
