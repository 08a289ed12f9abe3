"""Cross-lingual AMR annotation projection toolkit.

Core pieces: PENMAN graph parsing and serialization (``graph``), treebank
file handling (``treebank``), binary contextual-embedding storage
(``embeddings``), argmax-cosine word alignment (``wordalign``), rule-based
and EM token-to-concept alignment (``conceptalign``), cross-lingual
projection and combination strategies (``projection``), and Smatch scoring
(``smatch``). The ``amrproj`` command line ties them together over files.
"""

from .graph import (
    AmrGraph,
    AmrGraphError,
    AmrParseError,
    NodeAlignment,
    TripleSet,
    graph_triples,
    parse_penman,
    serialize_penman,
)
from .treebank import (
    TreebankEntry,
    TreebankError,
    format_alignment_line,
    parse_alignment_line,
    read_treebank,
    write_treebank,
)
from .embeddings import (
    EmbeddingCorpus,
    EmbeddingFormatError,
    SentenceEmbedding,
    average_subwords,
    read_embeddings,
    read_token_file,
    write_embeddings,
    write_token_file,
)
from .wordalign import (
    Direction,
    DirectionalAlignment,
    SymmetricAlignment,
    align_directional,
    best_link,
    cosine,
    intersect,
)
from .conceptalign import (
    RuleConfig,
    TranslationTable,
    em_align,
    merge_base,
    rule_align,
    train_ibm1,
)
from .projection import (
    ProjectionReport,
    combine_ba_then_ap,
    combine_intersect,
    coverage,
    merge_treebanks,
    project,
    project_best_link,
    project_intersection,
)
from .smatch import SmatchResult, brute_force_smatch, smatch_score

__version__ = "0.1.0"

__all__ = [
    "AmrGraph",
    "AmrGraphError",
    "AmrParseError",
    "NodeAlignment",
    "TripleSet",
    "graph_triples",
    "parse_penman",
    "serialize_penman",
    "TreebankEntry",
    "TreebankError",
    "format_alignment_line",
    "parse_alignment_line",
    "read_treebank",
    "write_treebank",
    "EmbeddingCorpus",
    "EmbeddingFormatError",
    "SentenceEmbedding",
    "average_subwords",
    "read_embeddings",
    "read_token_file",
    "write_embeddings",
    "write_token_file",
    "Direction",
    "DirectionalAlignment",
    "SymmetricAlignment",
    "align_directional",
    "best_link",
    "cosine",
    "intersect",
    "RuleConfig",
    "TranslationTable",
    "em_align",
    "merge_base",
    "rule_align",
    "train_ibm1",
    "ProjectionReport",
    "combine_ba_then_ap",
    "combine_intersect",
    "coverage",
    "merge_treebanks",
    "project",
    "project_best_link",
    "project_intersection",
    "SmatchResult",
    "brute_force_smatch",
    "smatch_score",
]
