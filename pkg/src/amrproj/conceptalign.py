"""Direct token-to-concept alignment: matching rules plus an EM lexical aligner.

Two complementary aligners map sentence tokens to AMR graph variables:

* ``rule_align`` runs a cascade of string-matching rules per variable
  (exact match, sense-suffix stripping, prefix matching, named-entity spans,
  negation words). High precision, incomplete coverage.
* ``train_ibm1`` / ``em_align`` learn a lexical translation table with IBM
  Model 1 EM and Viterbi-align each concept to its best token. Language
  independent, so it also applies directly to non-English tokens paired
  with English concepts.

``merge_base`` combines both, preferring rule matches, and is the baseline
aligner the projection strategies build on.
"""

from __future__ import annotations

import json
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources

from .graph import AmrGraph, NodeAlignment

NULL_TOKEN = "<NULL>"

# PropBank-style sense suffix: trailing "-" plus two digits, e.g. want-01
_SENSE_RE = re.compile(r"-\d{2}$")
_OP_RE = re.compile(r"^:op(\d+)$", re.IGNORECASE)

_DEFAULT_NEGATION_LANG = "en"


def negation_lexicon(language: str) -> tuple[str, ...]:
    """Negation tokens for a language tag, from the packaged lexicon file."""
    data = json.loads(resources.files("amrproj.data").joinpath("negation.json").read_text("utf-8"))
    base = language.split("-")[0].lower()
    if base not in data:
        raise KeyError(f"no negation lexicon for language {language!r}")
    return tuple(data[base])


@dataclass(frozen=True)
class RuleConfig:
    """Switches and parameters for the rule cascade."""

    enable_exact: bool = True
    enable_sense_strip: bool = True
    enable_prefix: bool = True
    enable_named_entity: bool = True
    enable_negation: bool = True
    prefix_len: int = 4
    negation_tokens: tuple[str, ...] = field(
        default_factory=lambda: negation_lexicon(_DEFAULT_NEGATION_LANG)
    )

    def __post_init__(self) -> None:
        if self.prefix_len < 1:
            raise ValueError("prefix_len must be >= 1")

    @classmethod
    def for_language(cls, language: str, **kwargs) -> "RuleConfig":
        return cls(negation_tokens=negation_lexicon(language), **kwargs)


def _strip_quotes(value: str) -> str:
    if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
        return value[1:-1]
    return value


def _name_op_tokens(graph: AmrGraph, name_var: str) -> list[str] | None:
    """Ordered op strings of a name node, lowercased; None if it has none."""
    ops = []
    for src, role, value in graph.attributes:
        if src != name_var:
            continue
        m = _OP_RE.match(role)
        if m:
            ops.append((int(m.group(1)), _strip_quotes(value).lower()))
    if not ops:
        return None
    ops.sort()
    return [text for _, text in ops]


def rule_align(tokens: list[str], graph: AmrGraph, config: RuleConfig | None = None) -> NodeAlignment:
    """Align graph variables to token spans with a cascade of matching rules.

    For each variable, in graph order, the rules are tried in sequence and
    the first unused matching token (left to right) wins:

    1. exact lowercase match of the concept against a token;
    2. exact match after stripping a PropBank sense suffix ("want-01" -> "want");
    3. prefix match between the sense-stripped concept and a token, over
       min(config.prefix_len, len(concept)) characters;
    4. named-entity rule: the string ops under a :name node align the name
       node and its entity parent to the matching token span;
    5. negation rule: a variable carrying ":polarity -" aligns to a token
       from the negation lexicon.

    Variables no rule matches stay unaligned; partial output is normal.
    """
    if config is None:
        config = RuleConfig()
    lowered = [t.lower() for t in tokens]
    used = [False] * len(tokens)
    entries: dict[str, tuple[int, int]] = {}

    def first_unused(predicate) -> int | None:
        for i, tok in enumerate(lowered):
            if not used[i] and predicate(tok):
                return i
        return None

    def claim(var: str, start: int, end: int) -> None:
        entries[var] = (start, end)
        for i in range(start, end + 1):
            used[i] = True

    def find_span(words: list[str]) -> tuple[int, int] | None:
        for start in range(0, len(lowered) - len(words) + 1):
            span = range(start, start + len(words))
            if all(not used[i] for i in span) and all(
                lowered[start + k] == words[k] for k in range(len(words))
            ):
                return start, start + len(words) - 1
        return None

    def try_named_entity(var: str) -> bool:
        # var is a name node itself ...
        if graph.instances[var] == "name":
            ops = _name_op_tokens(graph, var)
            if ops:
                span = find_span(ops)
                if span:
                    claim(var, *span)
                    for src, role, tgt in graph.edges:
                        if tgt == var and role.lower() == ":name" and src not in entries:
                            entries[src] = span
                    return True
        # ... or the entity parent of one
        for src, role, tgt in graph.edges:
            if src == var and role.lower() == ":name" and graph.instances.get(tgt) == "name":
                ops = _name_op_tokens(graph, tgt)
                if ops:
                    span = find_span(ops)
                    if span:
                        claim(var, *span)
                        if tgt not in entries:
                            entries[tgt] = span
                        return True
        return False

    polarity_vars = {src for src, role, value in graph.attributes
                     if role.lower() == ":polarity" and value == "-"}

    for var, concept in graph.instances.items():
        if var in entries:
            continue
        stripped = _SENSE_RE.sub("", concept)
        if config.enable_exact:
            i = first_unused(lambda tok: tok == concept.lower())
            if i is not None:
                claim(var, i, i)
                continue
        if config.enable_sense_strip and stripped != concept:
            i = first_unused(lambda tok: tok == stripped.lower())
            if i is not None:
                claim(var, i, i)
                continue
        if config.enable_prefix and stripped:
            k = min(config.prefix_len, len(stripped))
            prefix = stripped.lower()[:k]
            i = first_unused(lambda tok: tok[:k] == prefix)
            if i is not None:
                claim(var, i, i)
                continue
        if config.enable_named_entity and try_named_entity(var):
            continue
        if config.enable_negation and var in polarity_vars:
            i = first_unused(lambda tok: tok in config.negation_tokens)
            if i is not None:
                claim(var, i, i)
    return NodeAlignment(entries, len(tokens))


# ---------------------------------------------------------------------------
# IBM Model 1


@dataclass
class TranslationTable:
    """Lexical table t(concept -> token) learned by EM.

    For every concept the probabilities over the token vocabulary plus the
    NULL token sum to 1. ``log_likelihoods[k]`` is the corpus log-likelihood
    under the parameters entering EM iteration k, so the sequence is
    non-decreasing.
    """

    probs: dict[str, dict[str, float]]
    n_concepts: int
    n_tokens: int
    log_likelihoods: list[float] = field(default_factory=list)

    def prob(self, concept: str, token: str) -> float:
        return self.probs.get(concept, {}).get(token, 0.0)

    def check_rows(self, tol: float = 1e-9) -> None:
        for concept, row in self.probs.items():
            total = math.fsum(row.values())
            if abs(total - 1.0) > tol:
                raise ValueError(f"row for {concept!r} sums to {total}")


Corpus = list[tuple[list[str], list[str]]]


def train_ibm1(corpus: Corpus, iterations: int) -> TranslationTable:
    """IBM Model 1 EM over (tokens, concept labels) pairs.

    Each concept occurrence is explained by one of its sentence's tokens or
    by NULL. Initialization is uniform over the token vocabulary plus NULL;
    each iteration is one exact E/M step, so the recorded corpus
    log-likelihood never decreases.
    """
    if not corpus:
        raise ValueError("empty training corpus")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    token_vocab: set[str] = set()
    concept_vocab: set[str] = set()
    for k, (tokens, concepts) in enumerate(corpus):
        if not tokens:
            raise ValueError(f"sentence {k} has zero tokens")
        token_vocab.update(tokens)
        concept_vocab.update(concepts)

    uniform = 1.0 / (len(token_vocab) + 1)  # + NULL
    t: dict[str, dict[str, float]] | None = None  # None = uniform everywhere
    history: list[float] = []

    for _ in range(iterations):
        counts: dict[str, defaultdict[str, float]] = {c: defaultdict(float) for c in concept_vocab}
        loglik = 0.0
        for tokens, concepts in corpus:
            candidates = list(tokens) + [NULL_TOKEN]
            prior = 1.0 / len(candidates)
            for concept in concepts:
                if t is None:
                    weights = [uniform] * len(candidates)
                else:
                    row = t[concept]
                    weights = [row.get(w, 0.0) for w in candidates]
                total = math.fsum(weights)
                loglik += math.log(total * prior)
                for w, weight in zip(candidates, weights):
                    counts[concept][w] += weight / total
        history.append(loglik)
        t = {}
        for concept, row in counts.items():
            norm = math.fsum(row.values())
            t[concept] = {w: cnt / norm for w, cnt in row.items()}

    return TranslationTable(t, len(concept_vocab), len(token_vocab), history)


def corpus_log_likelihood(corpus: Corpus, table: TranslationTable) -> float:
    """Log-likelihood of a corpus under a trained table (for monitoring)."""
    loglik = 0.0
    for tokens, concepts in corpus:
        candidates = list(tokens) + [NULL_TOKEN]
        prior = 1.0 / len(candidates)
        for concept in concepts:
            total = math.fsum(table.prob(concept, w) for w in candidates)
            if total == 0.0:
                return float("-inf")
            loglik += math.log(total * prior)
    return loglik


def em_align(tokens: list[str], graph: AmrGraph, table: TranslationTable) -> NodeAlignment:
    """Viterbi alignment: each concept takes its most probable sentence token.

    The leftmost token wins ties between tokens. A concept stays unaligned
    when NULL is strictly more probable than every sentence token or when
    the table has never seen it; an exact token/NULL tie resolves to the
    token, since NULL co-occurs with every concept and would otherwise
    absorb systematically tied mass.
    """
    entries: dict[str, tuple[int, int]] = {}
    for var, concept in graph.instances.items():
        best_i, best_p = None, 0.0
        for i, token in enumerate(tokens):
            p = table.prob(concept, token)
            if p > best_p:
                best_i, best_p = i, p
        if best_i is not None and best_p >= table.prob(concept, NULL_TOKEN):
            entries[var] = (best_i, best_i)
    return NodeAlignment(entries, len(tokens))


def merge_base(rule: NodeAlignment, em: NodeAlignment) -> NodeAlignment:
    """Combine both aligners per variable, rule matches taking precedence."""
    if rule.sentence_length != em.sentence_length:
        raise ValueError(
            f"sentence length mismatch: {rule.sentence_length} vs {em.sentence_length}"
        )
    merged = dict(em.entries)
    merged.update(rule.entries)
    return NodeAlignment(merged, rule.sentence_length)


def graph_corpus(entries) -> Corpus:
    """(tokens, concept labels) training pairs from treebank entries."""
    return [(list(e.tokens), list(e.graph.instances.values())) for e in entries]


# ---------------------------------------------------------------------------
# Table serialization: TSV "concept <TAB> token <TAB> probability", sorted by
# concept, then descending probability, then token. NULL spelled "<NULL>".


def write_table(table: TranslationTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for concept in sorted(table.probs):
            row = table.probs[concept]
            for token, p in sorted(row.items(), key=lambda kv: (-kv[1], kv[0])):
                fh.write(f"{concept}\t{token}\t{p!r}\n")


def read_table(path) -> TranslationTable:
    probs: dict[str, dict[str, float]] = {}
    tokens: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh.read().splitlines()):
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"line {n}: expected 3 tab-separated fields")
            concept, token, p = parts
            probs.setdefault(concept, {})[token] = float(p)
            if token != NULL_TOKEN:
                tokens.add(token)
    return TranslationTable(probs, len(probs), len(tokens))
