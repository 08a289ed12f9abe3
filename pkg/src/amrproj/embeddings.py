"""Binary storage of per-token contextual embeddings (CEMB files).

Format, all little-endian: magic "CEMB" (4 bytes), u32 version = 1, u32 dim,
u64 sentence count; then per sentence a u32 token count n followed by
n * dim float32 values in row-major order. Record k pairs with line k of a
companion token file (UTF-8, one sentence per line, tokens space-separated).

Floats round-trip bit-exactly. Corpora are read fully into memory and are
immutable afterwards.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"CEMB"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")
_COUNT = struct.Struct("<I")


class EmbeddingFormatError(ValueError):
    pass


@dataclass
class SentenceEmbedding:
    """Contextual vectors for one sentence, one float32 row per token."""

    vectors: np.ndarray

    def __post_init__(self) -> None:
        vec = np.ascontiguousarray(self.vectors, dtype=np.float32)
        if vec.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {vec.shape}")
        if vec.shape[1] == 0:
            raise ValueError("embedding dim must be positive")
        if not np.all(np.isfinite(vec)):
            raise ValueError("embedding contains non-finite values")
        self.vectors = vec

    @property
    def n_tokens(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass
class EmbeddingCorpus:
    """Ordered sentence embeddings of uniform dim, index-synchronized with a token file."""

    dim: int
    sentences: list[SentenceEmbedding]

    def __post_init__(self) -> None:
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        for k, sent in enumerate(self.sentences):
            if sent.dim != self.dim:
                raise ValueError(f"sentence {k} has dim {sent.dim}, corpus dim is {self.dim}")

    def __len__(self) -> int:
        return len(self.sentences)


def write_embeddings(corpus: EmbeddingCorpus, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, corpus.dim, len(corpus.sentences)))
        for sent in corpus.sentences:
            fh.write(_COUNT.pack(sent.n_tokens))
            fh.write(np.ascontiguousarray(sent.vectors, dtype="<f4").tobytes())


def read_embeddings(path) -> EmbeddingCorpus:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise EmbeddingFormatError("file too short for header")
    magic, version, dim, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise EmbeddingFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise EmbeddingFormatError(f"unsupported version {version}")
    if dim == 0:
        raise EmbeddingFormatError("dim is zero")
    offset = _HEADER.size
    sentences: list[SentenceEmbedding] = []
    for k in range(count):
        if offset + _COUNT.size > len(data):
            raise EmbeddingFormatError(f"truncated file: record {k} has no token count")
        (n_tokens,) = _COUNT.unpack_from(data, offset)
        offset += _COUNT.size
        nbytes = n_tokens * dim * 4
        if offset + nbytes > len(data):
            raise EmbeddingFormatError(f"truncated file: record {k} is incomplete")
        vec = np.frombuffer(data, dtype="<f4", count=n_tokens * dim, offset=offset)
        offset += nbytes
        sentences.append(SentenceEmbedding(vec.reshape(n_tokens, dim).copy()))
    if offset != len(data):
        raise EmbeddingFormatError(f"{len(data) - offset} trailing bytes after last record")
    return EmbeddingCorpus(dim, sentences)


def average_subwords(
    piece_vectors: np.ndarray, word_spans: list[tuple[int, int]]
) -> SentenceEmbedding:
    """Pool subword piece rows into word rows by arithmetic mean.

    ``word_spans`` must partition the piece rows in order: inclusive spans,
    no gaps and no overlaps, covering every row. Singleton spans copy rows
    through unchanged.
    """
    pieces = np.asarray(piece_vectors, dtype=np.float32)
    if pieces.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {pieces.shape}")
    n = pieces.shape[0]
    expected_start = 0
    for start, end in word_spans:
        if start != expected_start:
            raise ValueError(f"span ({start}, {end}) leaves a gap or overlaps at row {expected_start}")
        if end < start or end >= n:
            raise ValueError(f"span ({start}, {end}) out of range for {n} piece rows")
        expected_start = end + 1
    if expected_start != n:
        raise ValueError(f"spans cover {expected_start} of {n} piece rows")
    rows = [
        pieces[start : end + 1].astype(np.float64).sum(axis=0) / (end - start + 1)
        for start, end in word_spans
    ]
    out = np.array(rows, dtype=np.float32) if rows else np.zeros((0, pieces.shape[1]), np.float32)
    return SentenceEmbedding(out)


def read_token_file(path) -> list[list[str]]:
    """Companion token file: line k holds the tokens of sentence k."""
    with open(path, encoding="utf-8") as fh:
        return [line.split() for line in fh.read().splitlines()]


def write_token_file(sentences: list[list[str]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tokens in sentences:
            fh.write(" ".join(tokens) + "\n")
