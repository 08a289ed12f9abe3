"""Word alignment between parallel sentences from contextual embeddings.

Each source token links to the target token whose contextual vector has the
highest cosine similarity. Running both directions and keeping only mutual
links gives a low-coverage, high-accuracy symmetric alignment; keeping the
higher-scoring direction per token gives a total one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .embeddings import SentenceEmbedding

SCORE_EPS = 1e-6  # tolerance on cosine score equality


class Direction(enum.Enum):
    F_GIVEN_E = "F|E"  # source = English, target = foreign
    E_GIVEN_F = "E|F"  # source = foreign, target = English


@dataclass
class DirectionalAlignment:
    """Total argmax-cosine alignment: one (target, score) link per source token."""

    direction: Direction
    links: list[tuple[int, float]]
    source_len: int
    target_len: int

    def __post_init__(self) -> None:
        if len(self.links) != self.source_len:
            raise ValueError(f"{len(self.links)} links for {self.source_len} source tokens")
        if self.source_len > 0 and self.target_len == 0:
            raise ValueError("non-empty source aligned against empty target")
        for i, (j, score) in enumerate(self.links):
            if not 0 <= j < self.target_len:
                raise ValueError(f"link {i}->{j} out of range for {self.target_len} targets")
            if abs(score) > 1.0 + SCORE_EPS:
                raise ValueError(f"score {score} outside [-1, 1]")

    @classmethod
    def from_pairs(
        cls,
        pairs: list[tuple[int, int]],
        source_len: int,
        target_len: int,
        direction: Direction,
        scores: list[float] | None = None,
    ) -> "DirectionalAlignment":
        """Build from (source, target) pairs; exactly one pair per source index."""
        links: dict[int, tuple[int, float]] = {}
        for k, (i, j) in enumerate(pairs):
            if i in links:
                raise ValueError(f"source index {i} linked twice")
            links[i] = (j, scores[k] if scores is not None else 0.0)
        if sorted(links) != list(range(source_len)):
            raise ValueError("pairs do not cover every source index exactly once")
        return cls(direction, [links[i] for i in range(source_len)], source_len, target_len)


@dataclass
class SymmetricAlignment:
    """Set of (english, foreign) token pairs, optionally scored."""

    pairs: frozenset[tuple[int, int]]
    e_len: int
    f_len: int
    scores: dict[tuple[int, int], float] | None = None

    def __post_init__(self) -> None:
        for e, f in self.pairs:
            if not (0 <= e < self.e_len and 0 <= f < self.f_len):
                raise ValueError(f"pair ({e}, {f}) out of range ({self.e_len} x {self.f_len})")

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """u.v / (|u||v|), accumulated in float64."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ValueError(f"dim mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine of a zero vector is undefined")
    return float(np.dot(u, v) / (nu * nv))


def _unit_rows(emb: SentenceEmbedding, side: str) -> np.ndarray:
    mat = emb.vectors.astype(np.float64)
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0.0):
        bad = int(np.nonzero(norms == 0.0)[0][0])
        raise ValueError(f"zero vector at {side} row {bad}")
    return mat / norms[:, None]


def align_directional(
    src: SentenceEmbedding,
    tgt: SentenceEmbedding,
    direction: Direction = Direction.F_GIVEN_E,
) -> DirectionalAlignment:
    """Link every source token to its highest-cosine target token.

    Ties break toward the smallest target index. Links are invariant under
    positive rescaling of any embedding row.
    """
    if src.dim != tgt.dim:
        raise ValueError(f"dim mismatch: {src.dim} vs {tgt.dim}")
    if src.n_tokens == 0:
        return DirectionalAlignment(direction, [], 0, tgt.n_tokens)
    if tgt.n_tokens == 0:
        raise ValueError("cannot align against an empty target sentence")
    sims = _unit_rows(src, "source") @ _unit_rows(tgt, "target").T
    best = np.argmax(sims, axis=1)  # first occurrence wins on ties
    links = [(int(j), float(sims[i, j])) for i, j in enumerate(best)]
    return DirectionalAlignment(direction, links, src.n_tokens, tgt.n_tokens)


def intersect(chi_fe: DirectionalAlignment, chi_ef: DirectionalAlignment) -> SymmetricAlignment:
    """Keep pairs (e, f) linked in both directions.

    chi_fe maps English tokens to foreign tokens, chi_ef the reverse; the
    result contains (e, f) iff chi_fe links e to f and chi_ef links f back
    to e. Scores are the forward cosines.
    """
    if chi_fe.direction == chi_ef.direction:
        raise ValueError("intersect needs one alignment per direction")
    if chi_fe.direction is Direction.E_GIVEN_F:
        chi_fe, chi_ef = chi_ef, chi_fe
    if chi_fe.source_len != chi_ef.target_len or chi_fe.target_len != chi_ef.source_len:
        raise ValueError(
            f"length mismatch: {chi_fe.source_len}x{chi_fe.target_len} "
            f"vs reverse {chi_ef.source_len}x{chi_ef.target_len}"
        )
    pairs = set()
    scores = {}
    for e, (f, score) in enumerate(chi_fe.links):
        if chi_ef.links[f][0] == e:
            pairs.add((e, f))
            scores[(e, f)] = score
    return SymmetricAlignment(frozenset(pairs), chi_fe.source_len, chi_fe.target_len, scores)


def best_link(
    e_index: int, chi_fe: DirectionalAlignment, chi_ef: DirectionalAlignment
) -> tuple[int, float]:
    """Pick the higher-scoring link for one English token across both directions.

    Candidate A is chi_fe's forward link; candidate B is the best-scoring
    reverse link into e_index in chi_ef. Returns A when no reverse link
    exists or on score ties.
    """
    if not 0 <= e_index < chi_fe.source_len:
        raise ValueError(f"index {e_index} out of range for {chi_fe.source_len} tokens")
    forward = chi_fe.links[e_index]
    best_rev: tuple[int, float] | None = None
    for f_idx, (j, score) in enumerate(chi_ef.links):
        if j == e_index and (best_rev is None or score > best_rev[1]):
            best_rev = (f_idx, score)
    if best_rev is not None and best_rev[1] > forward[1]:
        return best_rev
    return forward


# ---------------------------------------------------------------------------
# Pharaoh-format corpus files: one sentence pair per line, "e-f" pairs
# space-separated (English index first), optionally followed by a "#scores"
# trailer carrying one cosine per pair in the same order.


def format_pharaoh_line(alignment: SymmetricAlignment, with_scores: bool = False) -> str:
    pairs = alignment.sorted_pairs()
    line = " ".join(f"{e}-{f}" for e, f in pairs)
    if with_scores:
        if alignment.scores is None:
            raise ValueError("alignment has no scores")
        trailer = " ".join(f"{alignment.scores[p]:.6f}" for p in pairs)
        line = f"{line} #scores {trailer}" if pairs else "#scores"
    return line


def parse_pharaoh_line(line: str, e_len: int, f_len: int) -> SymmetricAlignment:
    body, _, trailer = line.partition("#scores")
    pairs = []
    for item in body.split():
        left, sep, right = item.partition("-")
        if not sep or not left.isdigit() or not right.isdigit():
            raise ValueError(f"malformed pair {item!r}")
        pairs.append((int(left), int(right)))
    scores = None
    if "#scores" in line:
        values = [float(x) for x in trailer.split()]
        if len(values) != len(pairs):
            raise ValueError(f"{len(values)} scores for {len(pairs)} pairs")
        scores = dict(zip(pairs, values))
    return SymmetricAlignment(frozenset(pairs), e_len, f_len, scores)


def write_pharaoh(alignments: list[SymmetricAlignment], path, with_scores: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for alignment in alignments:
            fh.write(format_pharaoh_line(alignment, with_scores) + "\n")


def read_pharaoh(path, sentence_lens: list[tuple[int, int]]) -> list[SymmetricAlignment]:
    """Read one alignment per line; sentence_lens gives (e_len, f_len) per line."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) != len(sentence_lens):
        raise ValueError(f"{len(lines)} alignment lines for {len(sentence_lens)} sentence pairs")
    return [
        parse_pharaoh_line(line, e_len, f_len)
        for line, (e_len, f_len) in zip(lines, sentence_lens)
    ]
