import pytest

from amrproj.graph import NodeAlignment, parse_penman
from amrproj.treebank import (
    TreebankEntry,
    TreebankError,
    format_alignment_line,
    parse_alignment_line,
    parse_treebank,
    format_treebank,
    read_treebank,
    write_treebank,
)

FIG_BLOCK = """# ::id fig1
# ::lang en
# ::tok The boy wants to go
# ::alignments 1-1|b 2-2|w 4-4|g
(w / want-01
    :ARG0 (b / boy)
    :ARG1 (g / go-02
        :ARG0 b))
"""

FIG_GRAPH = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))")


def test_read_single_block(tmp_path):
    path = tmp_path / "one.amr"
    path.write_text(FIG_BLOCK, encoding="utf-8")
    entries = read_treebank(path)
    assert len(entries) == 1
    entry = entries[0]
    assert entry.id == "fig1"
    assert entry.language == "en"
    assert entry.tokens == ["The", "boy", "wants", "to", "go"]
    assert entry.alignment.entries == {"b": (1, 1), "w": (2, 2), "g": (4, 4)}
    assert entry.graph.instances == {"w": "want-01", "b": "boy", "g": "go-02"}


def test_read_empty_file(tmp_path):
    path = tmp_path / "empty.amr"
    path.write_text("", encoding="utf-8")
    assert read_treebank(path) == []
    path.write_text("\n\n\n", encoding="utf-8")
    assert read_treebank(path) == []


def test_two_blocks_in_order():
    text = "# ::tok a\n(a / alpha)\n\n# ::tok b\n(b / beta)\n"
    entries = parse_treebank(text)
    assert [e.graph.root for e in entries] == ["a", "b"]


def test_missing_tok_line():
    with pytest.raises(TreebankError, match="::tok"):
        parse_treebank("# ::id x\n(a / alpha)\n")


def test_out_of_range_alignment():
    with pytest.raises(TreebankError, match="out of range"):
        parse_treebank("# ::tok alpha\n# ::alignments 0-1|a\n(a / alpha)\n")


def test_malformed_graph_reports_block():
    with pytest.raises(TreebankError, match="block 1"):
        parse_treebank("# ::tok a\n(a / alpha)\n\n# ::tok b\n(b / beta\n")


def test_roundtrip_is_byte_stable(tmp_path):
    messy = (
        "# ::snt The boy wants to go\n"  # unknown metadata is dropped
        "# ::tok The  boy wants to   go\n"
        "# ::alignments 4-4|g 1-1|b 2-2|w\n"
        "(w / want-01 :ARG1 (g / go-02 :ARG0 b) :ARG0 (b / boy))\n"
        "\n\n"
        "# ::tok alpha\n(a / alpha)\n"
    )
    src = tmp_path / "in.amr"
    src.write_text(messy, encoding="utf-8")
    out1 = tmp_path / "out1.amr"
    out2 = tmp_path / "out2.amr"
    write_treebank(read_treebank(src), out1)
    write_treebank(read_treebank(out1), out2)
    assert out1.read_bytes() == out2.read_bytes()
    # alignment items came out sorted, children canonically ordered
    assert "# ::alignments 1-1|b 2-2|w 4-4|g" in out1.read_text(encoding="utf-8")


def test_format_preserves_optional_fields():
    entry = TreebankEntry(None, None, ["alpha"], parse_penman("(a / alpha)"), None)
    text = format_treebank([entry])
    assert "::id" not in text and "::lang" not in text and "::alignments" not in text
    entries = parse_treebank(text)
    assert entries[0].id is None and entries[0].alignment is None


def test_empty_alignment_line_round_trips():
    text = "# ::tok alpha\n# ::alignments\n(a / alpha)\n"
    entries = parse_treebank(text)
    assert entries[0].alignment is not None
    assert entries[0].alignment.entries == {}
    assert "# ::alignments\n" in format_treebank(entries)


def test_parse_alignment_line_variants():
    a = parse_alignment_line("# ::alignments 1-1|b 2-2|w 4-4|g", FIG_GRAPH, 5)
    assert a.entries == {"b": (1, 1), "w": (2, 2), "g": (4, 4)}
    assert parse_alignment_line("# ::alignments", FIG_GRAPH, 5).entries == {}
    ne_graph = parse_penman('(n / name :op1 "New" :op2 "York")')
    span = parse_alignment_line("# ::alignments 0-1|n", ne_graph, 2)
    assert span.entries == {"n": (0, 1)}


@pytest.mark.parametrize(
    "line,message",
    [
        ("# ::alignments 1-1|zz", "unknown variable"),
        ("# ::alignments 3-2|b", "ends before"),
        ("# ::alignments 0-9|b", "out of range"),
        ("# ::alignments 1|b", "malformed"),
        ("# ::alignments 1-1|b 2-2|b", "twice"),
    ],
)
def test_parse_alignment_line_errors(line, message):
    with pytest.raises(TreebankError, match=message):
        parse_alignment_line(line, FIG_GRAPH, 5)


def test_alignment_line_inverse():
    line = "# ::alignments 1-1|b 2-2|w 4-4|g"
    assert format_alignment_line(parse_alignment_line(line, FIG_GRAPH, 5)) == line
    assert format_alignment_line(NodeAlignment({}, 5)) == "# ::alignments"


def test_entry_validation():
    with pytest.raises(TreebankError, match="no tokens"):
        TreebankEntry(None, None, [], FIG_GRAPH, None)
    with pytest.raises(TreebankError, match="whitespace"):
        TreebankEntry(None, None, ["a b"], FIG_GRAPH, None)
    with pytest.raises(TreebankError, match="is over 5 tokens"):
        TreebankEntry(None, None, ["only"], FIG_GRAPH, NodeAlignment({}, 5))
