"""Two-mode company/director graph, degree statistics and cut vertices."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from .model import BipartiteDataset

COMPANY = "company"
DIRECTOR = "director"
KINDS = (COMPANY, DIRECTOR)

DEFAULT_STAR_MIN_DEGREE = {COMPANY: 10, DIRECTOR: 5}

Node = tuple[str, str]  # (kind, identifier)


def other_kind(kind: str) -> str:
    if kind == COMPANY:
        return DIRECTOR
    if kind == DIRECTOR:
        return COMPANY
    raise ValueError(f"unknown node kind {kind!r}")


@dataclass(frozen=True)
class CorporateGraph:
    companies: Mapping[str, frozenset[str]]
    directors: Mapping[str, frozenset[str]]

    def adjacency(self, kind: str) -> Mapping[str, frozenset[str]]:
        if kind == COMPANY:
            return self.companies
        if kind == DIRECTOR:
            return self.directors
        raise ValueError(f"unknown node kind {kind!r}")

    def neighbors(self, node: Node) -> frozenset[str]:
        return self.adjacency(node[0])[node[1]]

    def degree(self, kind: str, ident: str) -> int:
        return len(self.adjacency(kind)[ident])

    def nodes(self) -> list[Node]:
        return [(COMPANY, c) for c in self.companies] + [(DIRECTOR, d) for d in self.directors]

    @property
    def n_nodes(self) -> int:
        return len(self.companies) + len(self.directors)

    @property
    def n_edges(self) -> int:
        return sum(len(v) for v in self.companies.values())


def build_graph(dataset: BipartiteDataset) -> CorporateGraph:
    companies: dict[str, set[str]] = {c.cin: set() for c in dataset.companies}
    directors: dict[str, set[str]] = {d.din: set() for d in dataset.directors}
    for a in dataset.affiliations:
        companies[a.cin].add(a.din)
        directors[a.din].add(a.cin)
    return CorporateGraph(
        MappingProxyType({k: frozenset(v) for k, v in companies.items()}),
        MappingProxyType({k: frozenset(v) for k, v in directors.items()}),
    )


@dataclass(frozen=True)
class DegreeHistogram:
    kind: str
    counts: Mapping[int, int]
    total: int

    def exact_fraction(self, degree: int) -> Fraction:
        return Fraction(self.counts.get(degree, 0), self.total) if self.total else Fraction(0)

    def exact_cumulative_ge(self, degree: int) -> Fraction:
        if not self.total:
            return Fraction(0)
        return Fraction(sum(c for d, c in self.counts.items() if d >= degree), self.total)

    def fraction(self, degree: int) -> float:
        return float(self.exact_fraction(degree))

    def cumulative_ge(self, degree: int) -> float:
        """Fraction of nodes with degree >= ``degree``."""
        return float(self.exact_cumulative_ge(degree))

    def rows(self) -> list[tuple[int, int, float, float]]:
        return [
            (d, self.counts[d], self.fraction(d), self.cumulative_ge(d))
            for d in sorted(self.counts)
        ]


def degree_histogram(graph: CorporateGraph, kind: str) -> DegreeHistogram:
    adj = graph.adjacency(kind)
    counts = Counter(len(v) for v in adj.values())
    return DegreeHistogram(kind, MappingProxyType(dict(sorted(counts.items()))), len(adj))


def star_nodes(graph: CorporateGraph, kind: str, min_degree: int | None = None) -> list[tuple[str, int]]:
    if min_degree is None:
        min_degree = DEFAULT_STAR_MIN_DEGREE[kind]
    if min_degree < 1:
        raise ValueError("min_degree must be >= 1")
    out = [(ident, len(nb)) for ident, nb in graph.adjacency(kind).items() if len(nb) >= min_degree]
    out.sort(key=lambda item: (-item[1], item[0]))
    return out


def articulation_report(graph: CorporateGraph) -> list[Node]:
    """Cut vertices of the two-mode graph, sorted by (kind, identifier).

    Iterative Hopcroft-Tarjan lowpoint search, so deep graphs do not hit the
    recursion limit.
    """
    disc: dict[Node, int] = {}
    low: dict[Node, int] = {}
    cut: set[Node] = set()
    counter = 0

    def nbrs(node: Node) -> list[Node]:
        kind = other_kind(node[0])
        return [(kind, n) for n in sorted(graph.neighbors(node))]

    for root in graph.nodes():
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        root_children = 0
        stack = [(root, None, iter(nbrs(root)))]
        while stack:
            node, parent, it = stack[-1]
            advanced = False
            for nb in it:
                if nb == parent:
                    continue
                if nb in disc:
                    low[node] = min(low[node], disc[nb])
                    continue
                disc[nb] = low[nb] = counter
                counter += 1
                if node == root:
                    root_children += 1
                stack.append((nb, node, iter(nbrs(nb))))
                advanced = True
                break
            if advanced:
                continue
            stack.pop()
            if parent is not None:
                low[parent] = min(low[parent], low[node])
                if parent != root and low[node] >= disc[parent]:
                    cut.add(parent)
        if root_children > 1:
            cut.add(root)
    return sorted(cut)
