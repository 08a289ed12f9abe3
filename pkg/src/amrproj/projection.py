"""Projecting concept alignments across languages, and combining strategies.

Given English token-to-concept alignments and a word alignment between the
English sentence and its foreign translation, ``project`` transfers each
concept to the foreign token its English head token links to. Because the
argmax word alignment is total, projection preserves coverage exactly.

Combination strategies layer the direct foreign-token aligner and the
projected alignments:

* ``combine_ba_then_ap``: direct baseline first, projection fills the rest;
* ``combine_intersect``: intersection-restricted projection first, then the
  direct baseline, then the best-scoring-direction projection.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from collections import Counter

from .graph import AmrGraph, NodeAlignment
from .treebank import TreebankEntry
from .wordalign import DirectionalAlignment, SymmetricAlignment, best_link

STRATEGIES = ("ap", "ba", "ea", "intersect-ea")

# stage labels used in ProjectionReport.source_counts
SOURCE_BA = "BA"
SOURCE_AP = "AP"
SOURCE_IAP = "iAP"
SOURCE_MAXAP = "maxAP"


@dataclass
class ProjectionReport:
    """Per-entry accounting: which stage aligned how many variables."""

    strategy: str
    source_counts: dict[str, int]
    n_variables: int | None = None
    collisions: int = 0

    @property
    def n_aligned(self) -> int:
        return sum(self.source_counts.values())

    @property
    def coverage(self) -> float | None:
        if self.n_variables is None:
            return None
        if self.n_variables == 0:
            return 0.0
        return self.n_aligned / self.n_variables


def _head(span: tuple[int, int]) -> int:
    # multi-token spans project through their last token
    return span[1]


def _collisions(entries: dict[str, tuple[int, int]]) -> int:
    spans = Counter(entries.values())
    return sum(n - 1 for n in spans.values() if n > 1)


def project(
    ba_en: NodeAlignment, chi_fe: DirectionalAlignment, foreign_len: int
) -> NodeAlignment:
    """Carry English concept alignments to the foreign sentence.

    Each aligned variable follows its span's head token through chi_fe and
    lands on a single foreign token. Variables unaligned in English stay
    unaligned; aligned ones always land somewhere because chi_fe is total,
    so coverage is conserved exactly.
    """
    if chi_fe.source_len != ba_en.sentence_length:
        raise ValueError(
            f"word alignment covers {chi_fe.source_len} source tokens, "
            f"concept alignment {ba_en.sentence_length}"
        )
    if chi_fe.target_len != foreign_len:
        raise ValueError(
            f"word alignment targets {chi_fe.target_len} tokens, foreign sentence has {foreign_len}"
        )
    entries = {}
    for var, span in ba_en.entries.items():
        j = chi_fe.links[_head(span)][0]
        entries[var] = (j, j)
    return NodeAlignment(entries, foreign_len)


def project_intersection(ba_en: NodeAlignment, sym: SymmetricAlignment) -> NodeAlignment:
    """Project only through mutually confirmed word-alignment pairs.

    A variable whose head token has no pair in the symmetric alignment stays
    unaligned, so the result is a subset of the unrestricted projection.
    """
    if sym.e_len != ba_en.sentence_length:
        raise ValueError(
            f"symmetric alignment covers {sym.e_len} source tokens, "
            f"concept alignment {ba_en.sentence_length}"
        )
    by_source: dict[int, int] = {}
    for e, f in sym.sorted_pairs():
        by_source.setdefault(e, f)
    entries = {}
    for var, span in ba_en.entries.items():
        f = by_source.get(_head(span))
        if f is not None:
            entries[var] = (f, f)
    return NodeAlignment(entries, sym.f_len)


def project_best_link(
    ba_en: NodeAlignment,
    chi_fe: DirectionalAlignment,
    chi_ef: DirectionalAlignment,
) -> NodeAlignment:
    """Project through whichever direction scores higher per head token."""
    if chi_fe.source_len != ba_en.sentence_length:
        raise ValueError(
            f"word alignment covers {chi_fe.source_len} source tokens, "
            f"concept alignment {ba_en.sentence_length}"
        )
    entries = {}
    for var, span in ba_en.entries.items():
        j, _ = best_link(_head(span), chi_fe, chi_ef)
        entries[var] = (j, j)
    return NodeAlignment(entries, chi_fe.target_len)


def combine_ba_then_ap(
    ba_foreign: NodeAlignment, ap: NodeAlignment, n_variables: int | None = None
) -> tuple[NodeAlignment, ProjectionReport]:
    """Direct baseline alignment first, projection for whatever it missed."""
    if ba_foreign.sentence_length != ap.sentence_length:
        raise ValueError(
            f"sentence length mismatch: {ba_foreign.sentence_length} vs {ap.sentence_length}"
        )
    entries = dict(ba_foreign.entries)
    n_ap = 0
    for var, span in ap.entries.items():
        if var not in entries:
            entries[var] = span
            n_ap += 1
    merged = NodeAlignment(entries, ba_foreign.sentence_length)
    report = ProjectionReport(
        strategy="ea",
        source_counts={SOURCE_BA: len(ba_foreign.entries), SOURCE_AP: n_ap},
        n_variables=n_variables,
        collisions=_collisions(entries),
    )
    return merged, report


def combine_intersect(
    iap: NodeAlignment,
    ba_foreign: NodeAlignment,
    maxap: NodeAlignment,
    n_variables: int | None = None,
) -> tuple[NodeAlignment, ProjectionReport]:
    """Three-stage fallback: intersection projection, then baseline, then best-link."""
    if not (iap.sentence_length == ba_foreign.sentence_length == maxap.sentence_length):
        raise ValueError(
            f"sentence length mismatch: {iap.sentence_length} / "
            f"{ba_foreign.sentence_length} / {maxap.sentence_length}"
        )
    entries = dict(iap.entries)
    counts = {SOURCE_IAP: len(iap.entries), SOURCE_BA: 0, SOURCE_MAXAP: 0}
    for var, span in ba_foreign.entries.items():
        if var not in entries:
            entries[var] = span
            counts[SOURCE_BA] += 1
    for var, span in maxap.entries.items():
        if var not in entries:
            entries[var] = span
            counts[SOURCE_MAXAP] += 1
    merged = NodeAlignment(entries, iap.sentence_length)
    report = ProjectionReport(
        strategy="intersect-ea",
        source_counts=counts,
        n_variables=n_variables,
        collisions=_collisions(entries),
    )
    return merged, report


def coverage(alignment: NodeAlignment, graph: AmrGraph) -> float:
    """Fraction of graph variables carrying a token alignment."""
    if not graph.instances:
        return 0.0
    aligned = sum(1 for var in alignment.entries if var in graph.instances)
    return aligned / len(graph.instances)


def merge_treebanks(treebanks: list[tuple[str, list[TreebankEntry]]]) -> list[TreebankEntry]:
    """Concatenate per-language treebanks into one multilingual treebank.

    Input order is preserved and every entry gets its treebank's language
    tag. Ids that appear in more than one entry are disambiguated by
    prefixing the language tag.
    """
    id_counts = Counter(
        entry.id for _, entries in treebanks for entry in entries if entry.id is not None
    )
    merged = []
    for language, entries in treebanks:
        for entry in entries:
            new_id = entry.id
            if new_id is not None and id_counts[new_id] > 1:
                new_id = f"{language}:{new_id}"
            merged.append(replace(entry, id=new_id, language=language))
    return merged


# ---------------------------------------------------------------------------
# Report TSV: "id <TAB> strategy <TAB> coverage <TAB> n_iAP <TAB> n_BA <TAB>
# n_maxAP <TAB> collisions" per entry plus a corpus summary line. The first
# count column holds intersection-projection contributions, the second the
# direct baseline, the third any unrestricted projection (plain or
# best-link). Coverage is blank when the variable total is unknown.


def format_report(rows: list[tuple[str, ProjectionReport]]) -> str:
    lines = ["# id\tstrategy\tcoverage\tn_iap\tn_ba\tn_maxap\tcollisions"]
    totals = Counter()
    total_vars = 0
    total_collisions = 0
    strategy = rows[0][1].strategy if rows else "-"
    for entry_id, report in rows:
        cov = "" if report.coverage is None else f"{report.coverage:.4f}"
        n_iap = report.source_counts.get(SOURCE_IAP, 0)
        n_ba = report.source_counts.get(SOURCE_BA, 0)
        n_max = report.source_counts.get(SOURCE_MAXAP, 0) + report.source_counts.get(SOURCE_AP, 0)
        lines.append(
            f"{entry_id}\t{report.strategy}\t{cov}\t{n_iap}\t{n_ba}\t{n_max}\t{report.collisions}"
        )
        totals.update({SOURCE_IAP: n_iap, SOURCE_BA: n_ba, SOURCE_MAXAP: n_max})
        if report.n_variables is not None:
            total_vars += report.n_variables
        total_collisions += report.collisions
    aligned = sum(totals.values())
    corpus_cov = f"{aligned / total_vars:.4f}" if total_vars else ""
    lines.append(
        f"# corpus\t{strategy}\t{corpus_cov}\t{totals[SOURCE_IAP]}"
        f"\t{totals[SOURCE_BA]}\t{totals[SOURCE_MAXAP]}\t{total_collisions}"
    )
    return "\n".join(lines) + "\n"
