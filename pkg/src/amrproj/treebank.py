"""Treebank files: blocks of tokenized sentences paired with AMR graphs.

File format (UTF-8, blocks separated by one blank line)::

    # ::id lpp_1943.1
    # ::lang en
    # ::tok The boy wants to go
    # ::alignments 1-1|b 2-2|w 4-4|g
    (w / want-01
        :ARG0 (b / boy)
        :ARG1 (g / go-02
            :ARG0 b))

"::tok" is mandatory; "::id", "::lang" and "::alignments" are optional.
Alignment items are "start-end|var" with inclusive 0-based token spans.
Unknown "# ::" metadata lines are ignored on read and dropped on write, so
writing is a normalization: write(read(f)) is idempotent and byte-stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .graph import AmrGraph, AmrParseError, NodeAlignment, parse_penman, serialize_penman

_ALIGN_PREFIX = "# ::alignments"
_ITEM_RE = re.compile(r"^(\d+)-(\d+)\|(\S+)$")


class TreebankError(ValueError):
    pass


@dataclass
class TreebankEntry:
    """One sentence: id, language tag, tokens, graph, optional alignment."""

    id: str | None
    language: str | None
    tokens: list[str]
    graph: AmrGraph
    alignment: NodeAlignment | None = None

    def __post_init__(self) -> None:
        if not self.tokens:
            raise TreebankError("entry has no tokens")
        for tok in self.tokens:
            if not tok or any(c.isspace() for c in tok):
                raise TreebankError(f"token {tok!r} is empty or contains whitespace")
        if self.alignment is not None and self.alignment.sentence_length != len(self.tokens):
            raise TreebankError(
                f"alignment is over {self.alignment.sentence_length} tokens "
                f"but the sentence has {len(self.tokens)}"
            )


def parse_alignment_line(line: str, graph: AmrGraph, n_tokens: int) -> NodeAlignment:
    """Parse a "# ::alignments start-end|var ..." line against a graph.

    Spans are inclusive and 0-based: "1-1|b" aligns variable b to token 1
    only. The line may carry zero items.
    """
    if not line.startswith(_ALIGN_PREFIX):
        raise TreebankError(f"not an alignment line: {line!r}")
    entries: dict[str, tuple[int, int]] = {}
    for item in line[len(_ALIGN_PREFIX) :].split():
        m = _ITEM_RE.match(item)
        if not m:
            raise TreebankError(f"malformed alignment item {item!r}")
        start, end, var = int(m.group(1)), int(m.group(2)), m.group(3)
        if var not in graph.instances:
            raise TreebankError(f"alignment references unknown variable {var!r}")
        if var in entries:
            raise TreebankError(f"variable {var!r} aligned twice")
        if end < start:
            raise TreebankError(f"alignment span {start}-{end} ends before it starts")
        if end >= n_tokens:
            raise TreebankError(
                f"alignment span {start}-{end} out of range for {n_tokens} tokens"
            )
        entries[var] = (start, end)
    return NodeAlignment(entries, n_tokens)


def format_alignment_line(alignment: NodeAlignment) -> str:
    """Inverse of parse_alignment_line; items sorted by (start, end, var)."""
    items = sorted(alignment.entries.items(), key=lambda kv: (kv[1][0], kv[1][1], kv[0]))
    body = " ".join(f"{s}-{e}|{var}" for var, (s, e) in items)
    return f"{_ALIGN_PREFIX} {body}" if body else _ALIGN_PREFIX


def format_entry(entry: TreebankEntry) -> str:
    lines = []
    if entry.id is not None:
        lines.append(f"# ::id {entry.id}")
    if entry.language is not None:
        lines.append(f"# ::lang {entry.language}")
    lines.append("# ::tok " + " ".join(entry.tokens))
    if entry.alignment is not None:
        lines.append(format_alignment_line(entry.alignment))
    lines.append(serialize_penman(entry.graph))
    return "\n".join(lines)


def _parse_block(block_lines: list[str], block_index: int) -> TreebankEntry:
    entry_id: str | None = None
    language: str | None = None
    tokens: list[str] | None = None
    alignment_line: str | None = None
    graph_lines: list[str] = []
    for line in block_lines:
        if line.startswith("# ::id "):
            entry_id = line[len("# ::id ") :].strip()
        elif line.startswith("# ::lang "):
            language = line[len("# ::lang ") :].strip()
        elif line.startswith("# ::tok ") or line.rstrip() == "# ::tok":
            tokens = line[len("# ::tok") :].split()
        elif line.startswith(_ALIGN_PREFIX):
            alignment_line = line.rstrip()
        elif line.startswith("#"):
            continue  # unknown metadata, dropped by normalization
        else:
            graph_lines.append(line)
    if tokens is None:
        raise TreebankError(f"block {block_index}: missing '# ::tok' line")
    if not tokens:
        raise TreebankError(f"block {block_index}: '# ::tok' line has no tokens")
    if not graph_lines:
        raise TreebankError(f"block {block_index}: missing PENMAN graph")
    try:
        graph = parse_penman("\n".join(graph_lines))
    except (AmrParseError, ValueError) as exc:
        raise TreebankError(f"block {block_index}: {exc}") from exc
    alignment = None
    if alignment_line is not None:
        try:
            alignment = parse_alignment_line(alignment_line, graph, len(tokens))
        except TreebankError as exc:
            raise TreebankError(f"block {block_index}: {exc}") from exc
    return TreebankEntry(entry_id, language, tokens, graph, alignment)


def parse_treebank(text: str) -> list[TreebankEntry]:
    """Parse treebank text into entries, preserving file order."""
    entries: list[TreebankEntry] = []
    block: list[str] = []
    block_index = 0
    for raw in text.splitlines() + [""]:
        line = raw.rstrip("\n")
        if line.strip() == "":
            if block:
                entries.append(_parse_block(block, block_index))
                block_index += 1
                block = []
        else:
            block.append(line)
    return entries


def format_treebank(entries: list[TreebankEntry]) -> str:
    if not entries:
        return ""
    return "\n\n".join(format_entry(e) for e in entries) + "\n"


def read_treebank(path) -> list[TreebankEntry]:
    with open(path, encoding="utf-8") as fh:
        return parse_treebank(fh.read())


def write_treebank(entries: list[TreebankEntry], path) -> None:
    """Write entries in canonical form. write(read(write(...))) is byte-stable."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_treebank(entries))
