"""Shared fixtures: small-graph enumeration and probability vectors."""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from flipdyn import Coloring, Graph, NeighboringPair, alt_vector, vigoda_vector


def nonisomorphic_graphs(n: int) -> list[Graph]:
    """All simple graphs on n labeled vertices, one per isomorphism class.

    Brute force: enumerate every edge subset of K_n and keep the
    lexicographically least representative under vertex permutations.
    """
    all_edges = list(itertools.combinations(range(n), 2))
    perms = list(itertools.permutations(range(n)))
    seen = set()
    out = []
    for bits in range(1 << len(all_edges)):
        edges = [e for i, e in enumerate(all_edges) if bits >> i & 1]
        canon = min(
            tuple(sorted(tuple(sorted((p[u], p[v]))) for u, v in edges))
            for p in perms
        )
        if canon not in seen:
            seen.add(canon)
            out.append(Graph(n, list(canon)))
    return out


def small_graph_corpus() -> list[Graph]:
    """One representative of every isomorphism class with at most 4 vertices."""
    graphs = []
    for n in range(1, 5):
        graphs.extend(nonisomorphic_graphs(n))
    return graphs


def neighboring_pairs(g: Graph, k: int, ordered: bool = True):
    """Every neighboring pair on g with colors {0..k-1}.

    Yields one NeighboringPair per (coloring, vertex, new color) draw with
    new color != old; with ordered=False only new color > old is emitted
    (one orientation per unordered pair of colorings).
    """
    for colors in itertools.product(range(k), repeat=g.n):
        sigma = Coloring(colors, k)
        for v in range(g.n):
            s = colors[v]
            for t in range(k):
                if t == s or (not ordered and t < s):
                    continue
                yield NeighboringPair(g, sigma, sigma.recolor({v: t}))


@pytest.fixture(scope="session")
def paper_vectors():
    return {"vigoda": vigoda_vector(), "alt": alt_vector()}


@pytest.fixture(scope="session")
def graphs_n_le_4():
    corpus = small_graph_corpus()
    # Known counts of isomorphism classes of simple graphs on 1..4 vertices.
    assert [sum(1 for g in corpus if g.n == n) for n in range(1, 5)] == [1, 2, 4, 11]
    return corpus


F = Fraction
