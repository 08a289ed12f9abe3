"""AMR graphs in PENMAN notation.

An AMR graph is a rooted, labeled, directed, acyclic graph. Variables name
the nodes, each variable carries a concept label, role edges connect
variables, and attributes attach constant values (numbers, quoted strings,
polarity markers) to variables. Graphs are written and read in the usual
parenthesized PENMAN form, e.g.::

    (w / want-01
        :ARG0 (b / boy)
        :ARG1 (g / go-02
            :ARG0 b))

The second mention of ``b`` above is a re-entrancy: it adds an edge to the
already-defined variable instead of creating a new node.

All types in this module are treated as immutable after construction and
all functions are pure, so values can be shared freely across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

TOP_ROLE = ":top"

# Bare tokens shaped like canonical variables (one or two lowercase letters
# plus an optional numeric suffix). Anything else unquoted is a constant.
_VAR_SHAPE_RE = re.compile(r"^[a-z]{1,2}[0-9]*$")
_NUMBER_RE = re.compile(r"^[+-]?[0-9]+(\.[0-9]+)?([eE][+-]?[0-9]+)?$")


class AmrParseError(ValueError):
    """PENMAN syntax error. ``offset`` is the character position in the input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class AmrGraphError(ValueError):
    """Violation of the AMR graph invariants (root, endpoints, acyclicity)."""


@dataclass(frozen=True)
class TripleSet:
    """The triples of a graph, the substrate Smatch scores over.

    One instance triple per variable, one relation triple per edge, one
    attribute triple per attribute, plus a synthetic top triple marking the
    root. The top triple carries the root's concept as its value, so two
    roots only match under Smatch when their concepts agree.
    """

    instances: frozenset[tuple[str, str]]
    relations: frozenset[tuple[str, str, str]]
    attributes: frozenset[tuple[str, str, str]]

    def __len__(self) -> int:
        return len(self.instances) + len(self.relations) + len(self.attributes)


@dataclass
class AmrGraph:
    """Rooted labeled DAG: variable ids, concept labels, role edges, attributes.

    ``instances`` maps each variable id to its concept label, in definition
    order. ``edges`` holds (source, role, target) with both endpoints defined
    in ``instances``; ``attributes`` holds (source, role, constant) where the
    constant keeps its surface form verbatim (quoted strings keep their
    quotes). Role labels start with ":".
    """

    root: str
    instances: dict[str, str]
    edges: list[tuple[str, str, str]] = field(default_factory=list)
    attributes: list[tuple[str, str, str]] = field(default_factory=list)

    def validate(self) -> None:
        """Raise AmrGraphError unless all graph invariants hold."""
        if not self.instances:
            raise AmrGraphError("graph has no variables")
        if self.root not in self.instances:
            raise AmrGraphError(f"root {self.root!r} is not a defined variable")
        for var, concept in self.instances.items():
            if not var or not concept:
                raise AmrGraphError(f"empty variable or concept: {var!r} / {concept!r}")
        seen_edges = set()
        for src, role, tgt in self.edges:
            if src not in self.instances or tgt not in self.instances:
                raise AmrGraphError(f"edge ({src}, {role}, {tgt}) has an undefined endpoint")
            if not role.startswith(":") or role.lower() == TOP_ROLE:
                raise AmrGraphError(f"invalid role label {role!r}")
            if (src, role, tgt) in seen_edges:
                raise AmrGraphError(f"duplicate edge ({src}, {role}, {tgt})")
            seen_edges.add((src, role, tgt))
        seen_attrs = set()
        for src, role, value in self.attributes:
            if src not in self.instances:
                raise AmrGraphError(f"attribute ({src}, {role}, {value}) has an undefined source")
            if not role.startswith(":") or role.lower() == TOP_ROLE:
                raise AmrGraphError(f"invalid role label {role!r}")
            if (src, role, value) in seen_attrs:
                raise AmrGraphError(f"duplicate attribute ({src}, {role}, {value})")
            seen_attrs.add((src, role, value))
        self._check_acyclic_and_reachable()

    def _check_acyclic_and_reachable(self) -> None:
        succ: dict[str, list[str]] = {v: [] for v in self.instances}
        indeg = {v: 0 for v in self.instances}
        for src, _, tgt in self.edges:
            succ[src].append(tgt)
            indeg[tgt] += 1
        queue = [v for v in self.instances if indeg[v] == 0]
        visited = 0
        while queue:
            v = queue.pop()
            visited += 1
            for t in succ[v]:
                indeg[t] -= 1
                if indeg[t] == 0:
                    queue.append(t)
        if visited != len(self.instances):
            raise AmrGraphError("edge set contains a cycle")
        reach = {self.root}
        stack = [self.root]
        while stack:
            for t in succ[stack.pop()]:
                if t not in reach:
                    reach.add(t)
                    stack.append(t)
        if len(reach) != len(self.instances):
            missing = sorted(set(self.instances) - reach)
            raise AmrGraphError(f"variables not reachable from root: {missing}")


@dataclass
class NodeAlignment:
    """Mapping from graph variables to inclusive token spans in one sentence.

    Spans are 0-based (start, end) pairs with start <= end < sentence_length;
    multi-token spans occur for named entities. A variable appears at most
    once.
    """

    entries: dict[str, tuple[int, int]]
    sentence_length: int

    def __post_init__(self) -> None:
        if self.sentence_length < 0:
            raise ValueError("sentence_length must be >= 0")
        for var, (start, end) in self.entries.items():
            if not (0 <= start <= end < self.sentence_length):
                raise ValueError(
                    f"span {start}-{end} for {var!r} out of range "
                    f"for sentence of length {self.sentence_length}"
                )

    @property
    def aligned_vars(self) -> frozenset[str]:
        return frozenset(self.entries)


# ---------------------------------------------------------------------------
# PENMAN parsing


@dataclass(frozen=True)
class _Tok:
    kind: str  # "(", ")", "/", "role", "atom", "string"
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "()/":
            toks.append(_Tok(c, c, i))
            i += 1
            continue
        if c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                raise AmrParseError("unterminated string", i)
            toks.append(_Tok("string", text[i : j + 1], i))
            i = j + 1
            continue
        j = i
        while j < n and text[j] not in '()/"' and not text[j].isspace():
            j += 1
        word = text[i:j]
        toks.append(_Tok("role" if word.startswith(":") else "atom", word, i))
        i = j
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok], text_len: int):
        self.toks = toks
        self.pos = 0
        self.text_len = text_len

    def peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self, expected: str) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise AmrParseError(f"unexpected end of input, expected {expected}", self.text_len)
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Tok:
        tok = self.next(what)
        if tok.kind != kind:
            raise AmrParseError(f"expected {what}, found {tok.value!r}", tok.pos)
        return tok


def parse_penman(text: str) -> AmrGraph:
    """Parse a single PENMAN expression into an AmrGraph.

    Re-entrant mentions of a defined variable become extra edges. A bare
    token in value position is a reference when it names a variable defined
    anywhere in the expression; quoted strings, numbers, "-" and "+" are
    constants; an undefined bare token shaped like a variable is an error,
    and any other bare token is kept as a constant. Errors report the
    character offset where they were detected.
    """
    toks = _tokenize(text)
    if not toks:
        raise AmrParseError("empty input", 0)
    parser = _Parser(toks, len(text))

    instances: dict[str, str] = {}
    # (source var, role, value token) in parse order; resolved after the scan
    pending: list[tuple[str, str, _Tok]] = []

    def parse_node() -> str:
        parser.expect("(", "'('")
        var_tok = parser.next("a variable")
        if var_tok.kind != "atom":
            raise AmrParseError(f"expected a variable, found {var_tok.value!r}", var_tok.pos)
        parser.expect("/", "'/'")
        concept_tok = parser.next("a concept")
        if concept_tok.kind not in ("atom", "string"):
            raise AmrParseError(f"expected a concept, found {concept_tok.value!r}", concept_tok.pos)
        var, concept = var_tok.value, concept_tok.value
        if var in instances:
            if instances[var] != concept:
                raise AmrParseError(
                    f"variable {var!r} redefined with conflicting concept "
                    f"{concept!r} (previously {instances[var]!r})",
                    var_tok.pos,
                )
        else:
            instances[var] = concept
        while True:
            tok = parser.peek()
            if tok is None:
                raise AmrParseError("unexpected end of input, expected ')'", parser.text_len)
            if tok.kind == ")":
                parser.pos += 1
                return var
            if tok.kind != "role":
                raise AmrParseError(f"expected a role or ')', found {tok.value!r}", tok.pos)
            parser.pos += 1
            value = parser.peek()
            if value is None:
                raise AmrParseError(
                    f"unexpected end of input after role {tok.value!r}", parser.text_len
                )
            if value.kind == "(":
                child = parse_node()
                pending.append((var, tok.value, _Tok("resolved", child, value.pos)))
            elif value.kind in ("atom", "string"):
                parser.pos += 1
                pending.append((var, tok.value, value))
            else:
                raise AmrParseError(
                    f"expected a value after role {tok.value!r}, found {value.value!r}", value.pos
                )

    root = parse_node()
    trailing = parser.peek()
    if trailing is not None:
        raise AmrParseError(f"trailing content {trailing.value!r} after graph", trailing.pos)

    edges: list[tuple[str, str, str]] = []
    attributes: list[tuple[str, str, str]] = []
    for src, role, tok in pending:
        if tok.kind == "resolved" or tok.value in instances:
            edges.append((src, role, tok.value))
        elif tok.kind == "string" or _NUMBER_RE.match(tok.value) or tok.value in ("-", "+"):
            attributes.append((src, role, tok.value))
        elif _VAR_SHAPE_RE.match(tok.value):
            raise AmrParseError(f"reference to never-defined variable {tok.value!r}", tok.pos)
        else:
            attributes.append((src, role, tok.value))

    graph = AmrGraph(root=root, instances=instances, edges=edges, attributes=attributes)
    graph.validate()
    return graph


# ---------------------------------------------------------------------------
# Serialization


def serialize_penman(graph: AmrGraph) -> str:
    """Render a graph as canonical PENMAN text.

    Children of every node are ordered by (role label, target), each child is
    placed on its own line indented four spaces per depth, and a re-entrant
    variable is expanded at its first mention only. Re-parsing the output
    yields a graph with an identical TripleSet.
    """
    graph.validate()
    children: dict[str, list[tuple[str, str, bool]]] = {v: [] for v in graph.instances}
    for src, role, tgt in graph.edges:
        children[src].append((role, tgt, True))
    for src, role, value in graph.attributes:
        children[src].append((role, value, False))
    for items in children.values():
        items.sort(key=lambda it: (it[0], it[1]))

    expanded: set[str] = set()

    def render(var: str, depth: int) -> str:
        if var in expanded:
            return var
        expanded.add(var)
        parts = [f"({var} / {graph.instances[var]}"]
        pad = " " * (4 * (depth + 1))
        for role, target, is_edge in children[var]:
            rendered = render(target, depth + 1) if is_edge else target
            parts.append(f"\n{pad}{role} {rendered}")
        return "".join(parts) + ")"

    return render(graph.root, 0)


def graph_triples(graph: AmrGraph) -> TripleSet:
    """Extract the TripleSet of a valid graph.

    Size law: len(result) == len(instances) + len(edges) + len(attributes) + 1,
    the +1 being the synthetic top triple (":top", root, root concept).
    """
    graph.validate()
    return TripleSet(
        instances=frozenset(graph.instances.items()),
        relations=frozenset((role, src, tgt) for src, role, tgt in graph.edges),
        attributes=frozenset((role, src, val) for src, role, val in graph.attributes)
        | {(TOP_ROLE, graph.root, graph.instances[graph.root])},
    )
