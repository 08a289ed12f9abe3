"""Smatch: F1 over matched graph triples under the best variable mapping.

Two graphs are compared by searching for the injective mapping between
their variable sets that maximizes the number of matching triples
(instances, relations, attributes, plus the root marker). ``smatch_score``
searches with restart hill-climbing: the first restart starts from a greedy
concept-matching mapping, later restarts from seeded random injective
mappings, and each climb greedily reassigns or swaps variable images until
no move improves the match count. ``brute_force_smatch`` enumerates every
injective mapping and is exact; it doubles as the testing oracle for the
hill climber.

Role labels are compared case-insensitively, attribute constants
case-insensitively after stripping surrounding quotes, and concept labels
exactly. Precision is matched / candidate triples, recall is matched /
reference triples.

The search always maps the smaller variable set into the larger one (ties
broken on the canonical serialization), so swapping candidate and reference
exchanges precision and recall while preserving the F1 exactly.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .graph import AmrGraph, graph_triples, serialize_penman

DEFAULT_RESTARTS = 4
_BRUTE_VAR_LIMIT = 8
_BRUTE_WORK_LIMIT = 3_000_000


@dataclass
class SmatchResult:
    precision: float
    recall: float
    f1: float
    matched: int
    mapping: dict[str, str]  # candidate variable -> reference variable
    restarts_used: int


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _norm_const(value: str) -> str:
    if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
        value = value[1:-1]
    return value.lower()


class _Side:
    """Normalized triples of one graph, indexed for fast mapping evaluation."""

    def __init__(self, graph: AmrGraph):
        triples = graph_triples(graph)
        self.vars = list(graph.instances)
        self.instances = [(v, c) for v, c in sorted(triples.instances)]
        self.relations = [(r.lower(), s, t) for r, s, t in sorted(triples.relations)]
        self.attributes = [(r.lower(), s, _norm_const(val)) for r, s, val in sorted(triples.attributes)]
        self.total = len(self.instances) + len(self.relations) + len(self.attributes)
        self.instance_set = set(self.instances)
        self.relation_set = set(self.relations)
        self.attribute_set = set(self.attributes)
        self.concept_of = dict(graph.instances)


def _count_matched(src: _Side, dst: _Side, mapping: dict[str, str]) -> int:
    matched = 0
    for v, c in src.instances:
        u = mapping.get(v)
        if u is not None and (u, c) in dst.instance_set:
            matched += 1
    for r, s, t in src.relations:
        ms, mt = mapping.get(s), mapping.get(t)
        if ms is not None and mt is not None and (r, ms, mt) in dst.relation_set:
            matched += 1
    for r, s, val in src.attributes:
        ms = mapping.get(s)
        if ms is not None and (r, ms, val) in dst.attribute_set:
            matched += 1
    return matched


def _smart_init(src: _Side, dst: _Side) -> dict[str, str]:
    """Greedy start: pair variables with identical concepts, first come first served."""
    mapping: dict[str, str] = {}
    used: set[str] = set()
    for v in src.vars:
        concept = src.concept_of[v]
        for u in dst.vars:
            if u not in used and dst.concept_of[u] == concept:
                mapping[v] = u
                used.add(u)
                break
    return mapping


def _random_init(src: _Side, dst: _Side, rng: random.Random) -> dict[str, str]:
    targets = rng.sample(dst.vars, len(src.vars))
    return dict(zip(src.vars, targets))


def _climb(src: _Side, dst: _Side, mapping: dict[str, str]) -> tuple[int, dict[str, str]]:
    """Greedy best-improvement hill-climbing until a local optimum."""
    current = dict(mapping)
    score = _count_matched(src, dst, current)
    while True:
        best_score = score
        best_move: dict[str, str] | None = None
        used = set(current.values())
        # reassign one variable's image (to an unused target or to nothing)
        for v in src.vars:
            old = current.get(v)
            options: list[str | None] = [u for u in dst.vars if u not in used or u == old]
            options.append(None)
            for u in options:
                if u == old:
                    continue
                trial = dict(current)
                if u is None:
                    trial.pop(v, None)
                else:
                    trial[v] = u
                s = _count_matched(src, dst, trial)
                if s > best_score:
                    best_score, best_move = s, trial
        # swap the images of two variables
        for a_idx in range(len(src.vars)):
            for b_idx in range(a_idx + 1, len(src.vars)):
                a, b = src.vars[a_idx], src.vars[b_idx]
                ia, ib = current.get(a), current.get(b)
                if ia == ib:
                    continue
                trial = dict(current)
                for var, image in ((a, ib), (b, ia)):
                    if image is None:
                        trial.pop(var, None)
                    else:
                        trial[var] = image
                s = _count_matched(src, dst, trial)
                if s > best_score:
                    best_score, best_move = s, trial
        if best_move is None:
            return score, current
        score, current = best_score, best_move


def _orient(candidate: AmrGraph, reference: AmrGraph) -> tuple[_Side, _Side, bool]:
    """Return (mapping source, mapping target, flipped).

    The smaller variable set is always the mapping source; equal sizes break
    the tie on canonical text so the choice is symmetric in the arguments.
    """
    cand, ref = _Side(candidate), _Side(reference)
    if len(cand.vars) != len(ref.vars):
        flipped = len(cand.vars) > len(ref.vars)
    else:
        flipped = serialize_penman(candidate) > serialize_penman(reference)
    return (ref, cand, True) if flipped else (cand, ref, False)


def _result(
    candidate: AmrGraph,
    reference: AmrGraph,
    matched: int,
    mapping: dict[str, str],
    flipped: bool,
    restarts_used: int,
) -> SmatchResult:
    if flipped:
        mapping = {u: v for v, u in mapping.items()}
    n_cand = len(graph_triples(candidate))
    n_ref = len(graph_triples(reference))
    precision = matched / n_cand if n_cand else 0.0
    recall = matched / n_ref if n_ref else 0.0
    return SmatchResult(precision, recall, _f1(precision, recall), matched, mapping, restarts_used)


def smatch_score(
    candidate: AmrGraph,
    reference: AmrGraph,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> SmatchResult:
    """Approximate best-mapping triple match via restart hill-climbing.

    Deterministic for fixed (restarts, seed); the matched count is
    non-decreasing in the number of restarts because restart k always runs
    from the same start regardless of how many follow. Stops early once no
    mapping could do better.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    src, dst, flipped = _orient(candidate, reference)
    ceiling = min(src.total, dst.total)
    best_matched, best_mapping = -1, {}
    used_restarts = 0
    for idx in range(restarts):
        init = (
            _smart_init(src, dst)
            if idx == 0
            else _random_init(src, dst, random.Random(f"{seed}:{idx}"))
        )
        matched, mapping = _climb(src, dst, init)
        used_restarts += 1
        if matched > best_matched:
            best_matched, best_mapping = matched, mapping
        if best_matched >= ceiling:
            break
    return _result(candidate, reference, best_matched, best_mapping, flipped, used_restarts)


def brute_force_smatch(candidate: AmrGraph, reference: AmrGraph) -> SmatchResult:
    """Exact maximum triple match by enumerating all injective mappings.

    Only feasible for small graphs: the smaller variable set may have at
    most 8 variables and the total number of mappings is capped.
    """
    src, dst, flipped = _orient(candidate, reference)
    k, n = len(src.vars), len(dst.vars)
    if k > _BRUTE_VAR_LIMIT:
        raise ValueError(
            f"size limit exceeded: {k} variables on the smaller side (limit {_BRUTE_VAR_LIMIT})"
        )
    if math.perm(n, k) > _BRUTE_WORK_LIMIT:
        raise ValueError(
            f"size limit exceeded: {math.perm(n, k)} mappings to enumerate "
            f"(limit {_BRUTE_WORK_LIMIT})"
        )
    best_matched, best_mapping = -1, {}
    for images in itertools.permutations(dst.vars, k):
        mapping = dict(zip(src.vars, images))
        matched = _count_matched(src, dst, mapping)
        if matched > best_matched:
            best_matched, best_mapping = matched, mapping
    return _result(candidate, reference, best_matched, best_mapping, flipped, 0)
