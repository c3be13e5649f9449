"""Synthetic corpora for benchmarks and demos.

Shared identifiers follow a Zipf-like frequency law so that the token
frequency skew resembles real code. Each block also draws a few local
names (its own name, parameters, locals) from a large flat vocabulary.
A share of blocks are copies of earlier ones: verbatim, reformatted
(same tokens), or edited in a few places.
"""

from __future__ import annotations

from typing import Iterator, Optional

import numpy as np

from .blocks import Origin, RawBlock

_KEYWORDS = ("return", "if", "else", "for", "in", "while", "not", "and", "or", "None", "self")
_OPS = (" = ", " + ", " - ", " * ", " == ", " < ")


def _vocabulary(size: int) -> np.ndarray:
    return np.array([f"v{i}" for i in range(size)], dtype=object)


class BlockGenerator:
    """Deterministic source of function blocks for a given seed."""

    def __init__(
        self,
        seed: int = 0,
        vocab_size: int = 20_000,
        zipf_a: float = 1.3,
        copy_rate: float = 0.3,
        local_rate: float = 0.25,
        local_vocab: int = 1_000_000,
        origin: Origin = Origin.CORPUS,
    ):
        self.rng = np.random.default_rng(seed)
        self.vocab = _vocabulary(vocab_size)
        self.zipf_a = zipf_a
        self.copy_rate = copy_rate
        self.local_rate = local_rate
        self.local_vocab = local_vocab
        self.origin = origin
        self._history: list[list[list[str]]] = []

    def _names(self, n: int) -> list[str]:
        idx = self.rng.zipf(self.zipf_a, size=n) - 1
        return list(self.vocab[np.minimum(idx, len(self.vocab) - 1)])

    def _locals(self, n: int) -> list[str]:
        return [f"u{i}" for i in self.rng.integers(0, self.local_vocab, size=n)]

    def _words(self, n: int, pool: list[str]) -> list[str]:
        words = self._names(n)
        for k in np.flatnonzero(self.rng.random(n) < self.local_rate):
            words[k] = pool[int(self.rng.integers(0, len(pool)))]
        return words

    def _fresh(self) -> list[list[str]]:
        n_stmts = int(self.rng.integers(1, 12))
        pool = self._locals(1 + int(self.rng.integers(1, 5)))
        lines = [["def", pool[0], *pool[1 : 1 + int(self.rng.integers(0, 4))]]]
        for _ in range(n_stmts):
            words = self._words(int(self.rng.integers(2, 7)), pool)
            if self.rng.random() < 0.4:
                words.insert(0, str(self.rng.choice(_KEYWORDS)))
            lines.append(words)
        return lines

    def _mutate(self, lines: list[list[str]]) -> list[list[str]]:
        out = [list(ln) for ln in lines]
        total = sum(len(ln) for ln in out)
        for _ in range(max(1, total // 10)):
            i = int(self.rng.integers(0, len(out)))
            j = int(self.rng.integers(0, len(out[i])))
            out[i][j] = self._names(1)[0]
        return out

    def _render(self, lines: list[list[str]], style: int) -> str:
        head = lines[0]
        args = ", ".join(head[2:]) if style == 0 else ",".join(head[2:])
        text = [f"def {head[1]}({args}):"]
        indent = "    " if style == 0 else "\t"
        for words in lines[1:]:
            sep = _OPS[len(words) % len(_OPS)] if style == 0 else _OPS[len(words) % len(_OPS)].strip()
            body = words[0] + " " + sep.join(words[1:]) if words[0] in _KEYWORDS else sep.join(words)
            text.append(indent + body)
        if style == 2:
            text.insert(1, indent + "# generated")
        return "\n".join(text) + "\n"

    def block(self, ordinal: int, source_id: Optional[str] = None) -> RawBlock:
        r = self.rng.random()
        if self._history and r < self.copy_rate:
            base = self._history[int(self.rng.integers(0, len(self._history)))]
            kind = int(self.rng.integers(0, 3))
            lines = base if kind < 2 else self._mutate(base)
            style = kind if kind < 2 else 0
        else:
            lines = self._fresh()
            style = 0
        if len(self._history) < 50_000:
            self._history.append(lines)
        text = self._render(lines, style)
        if self.origin is Origin.CORPUS:
            n = text.count("\n")
            return RawBlock(Origin.CORPUS, source_id or f"synthetic/f{ordinal // 10}.py", ordinal % 10, text, 1, n)
        return RawBlock(Origin.POSTS, source_id or f"{ordinal + 1}#0", 0, text)

    def blocks(self, n: int) -> Iterator[RawBlock]:
        for i in range(n):
            yield self.block(i)


def synthetic_blocks(n: int, seed: int = 0, **kwargs) -> list[RawBlock]:
    return list(BlockGenerator(seed, **kwargs).blocks(n))
