"""Command-line pipeline: align words, align concepts, project, merge, score.

Every command reads and writes the file formats owned by the library
modules (treebank blocks, CEMB embeddings, Pharaoh alignments, TSV tables)
and is deterministic given its inputs and --seed: rerunning produces
byte-identical outputs. Exit code 0 means no per-entry errors; otherwise
the failing sentence indices are listed on stderr.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from . import conceptalign, projection, treebank, wordalign
from .embeddings import read_embeddings, read_token_file
from .graph import NodeAlignment, graph_triples
from .smatch import smatch_score
from .wordalign import Direction


class CliError(Exception):
    pass


def _log(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _map_entries(args, fn, items):
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _load_corpus(token_path, emb_path, label: str):
    tokens = read_token_file(token_path)
    corpus = read_embeddings(emb_path)
    if len(tokens) != len(corpus.sentences):
        raise CliError(
            f"{label}: {len(tokens)} token lines but {len(corpus.sentences)} embedding records"
        )
    bad = [
        k
        for k, (toks, sent) in enumerate(zip(tokens, corpus.sentences))
        if len(toks) != sent.n_tokens
    ]
    if bad:
        raise CliError(f"{label}: token/embedding count mismatch at sentences {bad}")
    return tokens, corpus


def _directional_pair(src_emb, tgt_emb):
    chi_fe = wordalign.align_directional(src_emb, tgt_emb, Direction.F_GIVEN_E)
    chi_ef = wordalign.align_directional(tgt_emb, src_emb, Direction.E_GIVEN_F)
    return chi_fe, chi_ef


# ---------------------------------------------------------------------------
# align-words


def cmd_align_words(args) -> int:
    src_tokens, src_corpus = _load_corpus(args.src_tokens, args.src_emb, "source")
    tgt_tokens, tgt_corpus = _load_corpus(args.tgt_tokens, args.tgt_emb, "target")
    if len(src_tokens) != len(tgt_tokens):
        raise CliError(
            f"{len(src_tokens)} source sentences but {len(tgt_tokens)} target sentences"
        )

    def align_pair(pair):
        src_emb, tgt_emb = pair
        if args.mode == "fe":
            chi = wordalign.align_directional(src_emb, tgt_emb, Direction.F_GIVEN_E)
            pairs = [(e, f) for e, (f, _) in enumerate(chi.links)]
            scores = {(e, f): s for e, (f, s) in enumerate(chi.links)}
            return wordalign.SymmetricAlignment(
                frozenset(pairs), chi.source_len, chi.target_len, scores
            )
        if args.mode == "ef":
            chi = wordalign.align_directional(tgt_emb, src_emb, Direction.E_GIVEN_F)
            pairs = [(e, f) for f, (e, _) in enumerate(chi.links)]
            scores = {(e, f): s for f, (e, s) in enumerate(chi.links)}
            return wordalign.SymmetricAlignment(
                frozenset(pairs), chi.target_len, chi.source_len, scores
            )
        return wordalign.intersect(*_directional_pair(src_emb, tgt_emb))

    alignments = _map_entries(
        args, align_pair, list(zip(src_corpus.sentences, tgt_corpus.sentences))
    )
    wordalign.write_pharaoh(alignments, args.output, with_scores=args.with_scores)
    _log(args, f"wrote {len(alignments)} alignment lines to {args.output}")
    return 0


# ---------------------------------------------------------------------------
# concept alignment commands


def _train_table(entries, iterations):
    return conceptalign.train_ibm1(conceptalign.graph_corpus(entries), iterations)


def _rule_config(args) -> conceptalign.RuleConfig:
    kwargs = {"prefix_len": args.prefix_len}
    if args.negation_lang:
        return conceptalign.RuleConfig.for_language(args.negation_lang, **kwargs)
    return conceptalign.RuleConfig(**kwargs)


def cmd_align_concepts(args) -> int:
    entries = treebank.read_treebank(args.treebank)
    config = _rule_config(args)
    table = None
    if args.method in ("em", "ba"):
        if args.table:
            table = conceptalign.read_table(args.table)
        else:
            if not entries:
                raise CliError("cannot train an EM table on an empty treebank")
            table = _train_table(entries, args.em_iterations)

    def align_entry(entry):
        rule = conceptalign.rule_align(entry.tokens, entry.graph, config)
        if args.method == "rule":
            return rule
        em = conceptalign.em_align(entry.tokens, entry.graph, table)
        return em if args.method == "em" else conceptalign.merge_base(rule, em)

    alignments = _map_entries(args, align_entry, entries)
    out = [replace(e, alignment=a) for e, a in zip(entries, alignments)]
    treebank.write_treebank(out, args.output)
    _log(args, f"aligned {len(out)} entries with method {args.method}")
    return 0


def cmd_train_em(args) -> int:
    entries = treebank.read_treebank(args.treebank)
    if not entries:
        raise CliError("cannot train on an empty treebank")
    table = _train_table(entries, args.iterations)
    conceptalign.write_table(table, args.output)
    _log(
        args,
        f"trained table over {table.n_concepts} concepts / {table.n_tokens} tokens; "
        f"final log-likelihood {table.log_likelihoods[-1]:.4f}",
    )
    return 0


# ---------------------------------------------------------------------------
# project


def _english_base_alignment(entry, config, table) -> NodeAlignment:
    if entry.alignment is not None:
        return entry.alignment
    rule = conceptalign.rule_align(entry.tokens, entry.graph, config)
    em = conceptalign.em_align(entry.tokens, entry.graph, table)
    return conceptalign.merge_base(rule, em)


def _chi_from_pharaoh(path, lens, direction):
    alignments = wordalign.read_pharaoh(path, lens)
    out = []
    for k, sym in enumerate(alignments):
        pairs = sym.sorted_pairs()
        if direction is Direction.E_GIVEN_F:
            src_pairs = [(f, e) for e, f in pairs]
            src_len, tgt_len = sym.f_len, sym.e_len
        else:
            src_pairs = pairs
            src_len, tgt_len = sym.e_len, sym.f_len
        scores = None
        if sym.scores is not None:
            if direction is Direction.E_GIVEN_F:
                scores = [sym.scores[(e, f)] for f, e in src_pairs]
            else:
                scores = [sym.scores[p] for p in src_pairs]
        try:
            out.append(
                wordalign.DirectionalAlignment.from_pairs(
                    src_pairs, src_len, tgt_len, direction, scores
                )
            )
        except ValueError as exc:
            raise CliError(f"sentence {k}: {exc} (a total one-link-per-token file is required)")
    return out


def cmd_project(args) -> int:
    entries = treebank.read_treebank(args.treebank)
    foreign_tokens = read_token_file(args.foreign_tokens)
    if len(entries) != len(foreign_tokens):
        raise CliError(
            f"{len(entries)} treebank entries but {len(foreign_tokens)} foreign sentences"
        )
    config = _rule_config(args)

    en_table = None
    if entries and args.strategy in ("ap", "ea", "intersect-ea"):
        en_table = _train_table(entries, args.em_iterations)

    foreign_table = None
    if entries and args.strategy in ("ba", "ea", "intersect-ea"):
        if args.table:
            foreign_table = conceptalign.read_table(args.table)
        else:
            corpus = [
                (toks, list(e.graph.instances.values()))
                for toks, e in zip(foreign_tokens, entries)
            ]
            foreign_table = conceptalign.train_ibm1(corpus, args.em_iterations)

    chi_fe_all = chi_ef_all = None
    needs_chi = args.strategy in ("ap", "ea", "intersect-ea")
    if needs_chi and entries:
        if args.src_emb and args.tgt_emb:
            src_corpus = read_embeddings(args.src_emb)
            tgt_corpus = read_embeddings(args.tgt_emb)
            if len(src_corpus.sentences) != len(entries) or len(tgt_corpus.sentences) != len(entries):
                raise CliError("embedding corpora do not match the treebank entry count")
            bad = [
                k
                for k, (e, s) in enumerate(zip(entries, src_corpus.sentences))
                if len(e.tokens) != s.n_tokens
            ] + [
                k
                for k, (toks, s) in enumerate(zip(foreign_tokens, tgt_corpus.sentences))
                if len(toks) != s.n_tokens
            ]
            if bad:
                raise CliError(f"token/embedding count mismatch at sentences {sorted(set(bad))}")
            pairs = [
                _directional_pair(s, t)
                for s, t in zip(src_corpus.sentences, tgt_corpus.sentences)
            ]
            chi_fe_all = [p[0] for p in pairs]
            chi_ef_all = [p[1] for p in pairs]
        elif args.align_fe:
            lens = [(len(e.tokens), len(toks)) for e, toks in zip(entries, foreign_tokens)]
            chi_fe_all = _chi_from_pharaoh(args.align_fe, lens, Direction.F_GIVEN_E)
            if args.align_ef:
                chi_ef_all = _chi_from_pharaoh(args.align_ef, lens, Direction.E_GIVEN_F)
        else:
            raise CliError(
                f"strategy {args.strategy} needs word alignments: "
                "give --src-emb/--tgt-emb or --align-fe"
            )
        if args.strategy == "intersect-ea" and chi_ef_all is None:
            raise CliError("strategy intersect-ea needs both directions: add --align-ef")

    def project_entry(item):
        k, entry, f_toks = item
        n_vars = len(entry.graph.instances)
        if args.strategy == "ba":
            rule = conceptalign.rule_align(f_toks, entry.graph, config)
            em = conceptalign.em_align(f_toks, entry.graph, foreign_table)
            merged = conceptalign.merge_base(rule, em)
            report = projection.ProjectionReport(
                strategy="ba",
                source_counts={projection.SOURCE_BA: len(merged.entries)},
                n_variables=n_vars,
            )
            return merged, report
        ba_en = _english_base_alignment(entry, config, en_table)
        chi_fe = chi_fe_all[k]
        if chi_fe.source_len != len(entry.tokens):
            raise CliError(f"sentence {k}: word alignment length mismatch")
        if args.strategy == "ap":
            ap = projection.project(ba_en, chi_fe, len(f_toks))
            report = projection.ProjectionReport(
                strategy="ap",
                source_counts={projection.SOURCE_AP: len(ap.entries)},
                n_variables=n_vars,
            )
            return ap, report
        rule = conceptalign.rule_align(f_toks, entry.graph, config)
        em = conceptalign.em_align(f_toks, entry.graph, foreign_table)
        ba_foreign = conceptalign.merge_base(rule, em)
        if args.strategy == "ea":
            ap = projection.project(ba_en, chi_fe, len(f_toks))
            return projection.combine_ba_then_ap(ba_foreign, ap, n_vars)
        chi_ef = chi_ef_all[k]
        sym = wordalign.intersect(chi_fe, chi_ef)
        iap = projection.project_intersection(ba_en, sym)
        maxap = projection.project_best_link(ba_en, chi_fe, chi_ef)
        return projection.combine_intersect(iap, ba_foreign, maxap, n_vars)

    items = [(k, e, toks) for k, (e, toks) in enumerate(zip(entries, foreign_tokens))]
    results = _map_entries(args, project_entry, items)

    out_entries = []
    rows = []
    for (k, entry, f_toks), (alignment, report) in zip(items, results):
        out_entries.append(
            replace(
                entry,
                language=args.lang if args.lang else entry.language,
                tokens=list(f_toks),
                alignment=alignment,
            )
        )
        rows.append((entry.id if entry.id is not None else str(k), report))
    treebank.write_treebank(out_entries, args.output)
    report_path = args.report if args.report else str(args.output) + ".report.tsv"
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(projection.format_report(rows))
    _log(args, f"projected {len(out_entries)} entries ({args.strategy}); report at {report_path}")
    return 0


# ---------------------------------------------------------------------------
# merge / coverage / score


def cmd_merge(args) -> int:
    treebanks = []
    for spec_arg in args.treebanks:
        lang, sep, path = spec_arg.partition("=")
        if not sep or not lang:
            raise CliError(f"expected LANG=PATH, got {spec_arg!r}")
        treebanks.append((lang, treebank.read_treebank(path)))
    merged = projection.merge_treebanks(treebanks)
    treebank.write_treebank(merged, args.output)
    _log(args, f"merged {len(treebanks)} treebanks into {len(merged)} entries")
    return 0


def cmd_coverage(args) -> int:
    entries = treebank.read_treebank(args.treebank)
    lines = ["# id\tcoverage"]
    total_aligned = 0
    total_vars = 0
    for k, entry in enumerate(entries):
        alignment = entry.alignment or NodeAlignment({}, len(entry.tokens))
        cov = projection.coverage(alignment, entry.graph)
        total_aligned += len(alignment.entries)
        total_vars += len(entry.graph.instances)
        lines.append(f"{entry.id if entry.id is not None else k}\t{cov:.4f}")
    corpus = total_aligned / total_vars if total_vars else 0.0
    lines.append(f"# corpus\t{corpus:.4f}")
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_score(args) -> int:
    cand = treebank.read_treebank(args.candidate)
    ref = treebank.read_treebank(args.reference)
    if not cand or not ref:
        raise CliError("no pairs to score")
    if len(cand) != len(ref):
        raise CliError(f"{len(cand)} candidate entries but {len(ref)} reference entries")
    mismatched = [
        k
        for k, (c, r) in enumerate(zip(cand, ref))
        if c.id is not None and r.id is not None and c.id != r.id
    ]
    if mismatched:
        raise CliError(f"id mismatch at entries {mismatched}")

    def score_pair(pair):
        c, r = pair
        return smatch_score(c.graph, r.graph, restarts=args.restarts, seed=args.seed)

    results = _map_entries(args, score_pair, list(zip(cand, ref)))
    lines = ["# id\tP\tR\tF1"]
    matched = cand_total = ref_total = 0
    for k, (c, result) in enumerate(zip(cand, results)):
        name = c.id if c.id is not None else str(k)
        lines.append(f"{name}\t{result.precision:.4f}\t{result.recall:.4f}\t{result.f1:.4f}")
        matched += result.matched
        cand_total += len(graph_triples(c.graph))
        ref_total += len(graph_triples(ref[k].graph))
    precision = matched / cand_total if cand_total else 0.0
    recall = matched / ref_total if ref_total else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    lines.append(f"# corpus\t{precision:.4f}\t{recall:.4f}\t{f1:.4f}")
    if args.macro:
        n = len(results)
        lines.append(
            f"# macro\t{sum(r.precision for r in results) / n:.4f}"
            f"\t{sum(r.recall for r in results) / n:.4f}"
            f"\t{sum(r.f1 for r in results) / n:.4f}"
        )
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amrproj",
        description="Cross-lingual AMR annotation projection toolkit",
    )
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomized steps")
    parser.add_argument("--quiet", action="store_true", help="suppress progress messages")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align-words", help="argmax-cosine word alignment from embeddings")
    p.add_argument("--src-tokens", required=True)
    p.add_argument("--tgt-tokens", required=True)
    p.add_argument("--src-emb", required=True)
    p.add_argument("--tgt-emb", required=True)
    p.add_argument("--mode", choices=("fe", "ef", "intersect"), default="fe")
    p.add_argument("--output", required=True)
    p.add_argument("--with-scores", action="store_true", help="append a #scores trailer")
    p.set_defaults(fn=cmd_align_words)

    p = sub.add_parser("align-concepts", help="token-to-concept alignment of a treebank")
    p.add_argument("--treebank", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--method", choices=("rule", "em", "ba"), default="ba")
    p.add_argument("--table", help="pre-trained translation table TSV")
    p.add_argument("--em-iterations", type=int, default=5)
    p.add_argument("--prefix-len", type=int, default=4)
    p.add_argument("--negation-lang", help="language tag for the negation lexicon")
    p.set_defaults(fn=cmd_align_concepts)

    p = sub.add_parser("train-em", help="train an IBM Model 1 translation table")
    p.add_argument("--treebank", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--iterations", type=int, default=5)
    p.set_defaults(fn=cmd_train_em)

    p = sub.add_parser("project", help="project a treebank onto foreign sentences")
    p.add_argument("--treebank", required=True, help="source treebank (English side)")
    p.add_argument("--foreign-tokens", required=True, help="token file, one sentence per line")
    p.add_argument("--strategy", choices=projection.STRATEGIES, default="ea")
    p.add_argument("--output", required=True)
    p.add_argument("--report", help="report TSV path (default: OUTPUT.report.tsv)")
    p.add_argument("--lang", help="language tag for the output entries")
    p.add_argument("--src-emb", help="CEMB embeddings of the treebank sentences")
    p.add_argument("--tgt-emb", help="CEMB embeddings of the foreign sentences")
    p.add_argument("--align-fe", help="Pharaoh word alignments, source-to-foreign")
    p.add_argument("--align-ef", help="Pharaoh word alignments, foreign-to-source")
    p.add_argument("--table", help="pre-trained foreign-side translation table TSV")
    p.add_argument("--em-iterations", type=int, default=5)
    p.add_argument("--prefix-len", type=int, default=4)
    p.add_argument("--negation-lang", help="language tag for the negation lexicon")
    p.set_defaults(fn=cmd_project)

    p = sub.add_parser("merge", help="concatenate treebanks into a multilingual one")
    p.add_argument("treebanks", nargs="+", metavar="LANG=PATH")
    p.add_argument("--output", required=True)
    p.set_defaults(fn=cmd_merge)

    p = sub.add_parser("coverage", help="report alignment coverage of a treebank")
    p.add_argument("--treebank", required=True)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_coverage)

    p = sub.add_parser("score", help="Smatch-score a candidate treebank against a reference")
    p.add_argument("--candidate", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--macro", action="store_true", help="also print macro-averaged scores")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_score)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.fn(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
