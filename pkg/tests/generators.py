"""Seeded random generators shared by the test modules.

Graphs are built from a random spanning tree plus forward extra edges, so
they are always acyclic and reachable from the root by construction.
"""

from __future__ import annotations

import random

import numpy as np

from amrproj.graph import AmrGraph, NodeAlignment
from amrproj.wordalign import Direction, DirectionalAlignment

CONCEPTS = [
    "alpha", "beta", "gamma", "delta", "want-01", "go-02",
    "run-01", "boy", "dog", "person", "city", "see-01",
]
ROLES = [":ARG0", ":ARG1", ":ARG2", ":mod", ":time", ":op1", ":location"]
ATTR_ROLES = [":polarity", ":quant", ":mode", ":value"]


def random_graph(
    rng: random.Random,
    max_vars: int = 6,
    concepts: list[str] | None = None,
    attr_prob: float = 0.3,
) -> AmrGraph:
    vocab = concepts if concepts is not None else CONCEPTS
    n = rng.randint(1, max_vars)
    names = [f"x{i}" for i in range(n)]
    instances = {name: rng.choice(vocab) for name in names}
    edges = []
    seen = set()
    for i in range(1, n):
        parent = names[rng.randrange(i)]
        role = rng.choice(ROLES)
        while (parent, role, names[i]) in seen:
            role = rng.choice(ROLES)
        edges.append((parent, role, names[i]))
        seen.add((parent, role, names[i]))
    for _ in range(rng.randint(0, 2)):
        if n < 2:
            break
        i, j = sorted(rng.sample(range(n), 2))
        role = rng.choice(ROLES)
        if (names[i], role, names[j]) not in seen:
            edges.append((names[i], role, names[j]))
            seen.add((names[i], role, names[j]))
    attributes = []
    attr_seen = set()
    for name in names:
        if rng.random() < attr_prob:
            role = rng.choice(ATTR_ROLES)
            value = rng.choice(["-", "+", str(rng.randint(1, 50)), '"Rome"', "imperative"])
            if (name, role, value) not in attr_seen:
                attributes.append((name, role, value))
                attr_seen.add((name, role, value))
    graph = AmrGraph(root=names[0], instances=instances, edges=edges, attributes=attributes)
    graph.validate()
    return graph


def mutate_graph(rng: random.Random, graph: AmrGraph) -> AmrGraph:
    """Rename all variables and perturb labels; structure stays valid."""
    renames = {v: f"y{i}" for i, v in enumerate(graph.instances)}
    instances = {renames[v]: c for v, c in graph.instances.items()}
    for v in list(instances):
        if rng.random() < 0.3:
            instances[v] = rng.choice(CONCEPTS)
    edges = [
        (renames[s], rng.choice(ROLES) if rng.random() < 0.2 else r, renames[t])
        for s, r, t in graph.edges
    ]
    edges = list(dict.fromkeys(edges))
    attributes = [(renames[s], r, v) for s, r, v in graph.attributes]
    out = AmrGraph(
        root=renames[graph.root], instances=instances, edges=edges, attributes=attributes
    )
    out.validate()
    return out


def random_graph_pair(rng: random.Random, max_vars: int = 6) -> tuple[AmrGraph, AmrGraph]:
    g1 = random_graph(rng, max_vars=max_vars)
    if rng.random() < 0.5:
        return g1, mutate_graph(rng, g1)
    return g1, random_graph(rng, max_vars=max_vars)


def random_alignment(rng: random.Random, graph: AmrGraph, n_tokens: int, p: float = 0.7) -> NodeAlignment:
    entries = {}
    for var in graph.instances:
        if rng.random() < p:
            i = rng.randrange(n_tokens)
            entries[var] = (i, i)
    return NodeAlignment(entries, n_tokens)


def random_total_chi(
    rng: random.Random, source_len: int, target_len: int,
    direction: Direction = Direction.F_GIVEN_E,
) -> DirectionalAlignment:
    links = [(rng.randrange(target_len), rng.uniform(-1.0, 1.0)) for _ in range(source_len)]
    return DirectionalAlignment(direction, links, source_len, target_len)


def random_vectors(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    return rng.standard_normal((n, dim)).astype(np.float32)
