"""One-mode projections of the corporate graph and indirect connection paths."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from types import MappingProxyType
from typing import Iterable, Mapping

from .graph import CorporateGraph, other_kind

DEFAULT_MAX_PATH_LEN = 6
DEFAULT_MAX_PATHS_PER_PAIR = 1000


@dataclass(frozen=True)
class ProjectionGraph:
    """Weighted one-mode graph; each edge keeps the sorted list of shared entities.

    ``memberships`` maps every node to its opposite-mode neighbours in the
    source two-mode graph, isolated nodes included.
    """

    mode: str
    memberships: Mapping[str, frozenset[str]]
    edges: Mapping[tuple[str, str], tuple[str, ...]]
    adjacency: Mapping[str, frozenset[str]]

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self.memberships))

    def __contains__(self, node: str) -> bool:
        return node in self.memberships

    def neighbors(self, node: str) -> frozenset[str]:
        return self.adjacency[node]

    def has_edge(self, u: str, v: str) -> bool:
        return v in self.adjacency.get(u, ())

    def shared(self, u: str, v: str) -> tuple[str, ...]:
        return self.edges[(u, v) if u < v else (v, u)]

    def weight(self, u: str, v: str) -> int:
        return len(self.shared(u, v))

    def edge_list(self) -> list[tuple[str, str, int, tuple[str, ...]]]:
        return [(u, v, len(s), s) for (u, v), s in sorted(self.edges.items())]

    def subgraph(self, nodes: Iterable[str]) -> "ProjectionGraph":
        keep = set(nodes)
        missing = keep - self.memberships.keys()
        if missing:
            raise KeyError(f"unknown nodes {sorted(missing)}")
        edges = {
            (u, v): s for (u, v), s in self.edges.items() if u in keep and v in keep
        }
        return ProjectionGraph(
            self.mode,
            MappingProxyType({n: self.memberships[n] for n in sorted(keep)}),
            MappingProxyType(edges),
            MappingProxyType({n: self.adjacency[n] & keep for n in sorted(keep)}),
        )


def project(graph: CorporateGraph, mode: str) -> ProjectionGraph:
    members = graph.adjacency(mode)
    shared: dict[tuple[str, str], list[str]] = {}
    for entity, nodes in graph.adjacency(other_kind(mode)).items():
        for u, v in combinations(sorted(nodes), 2):
            shared.setdefault((u, v), []).append(entity)
    adjacency: dict[str, set[str]] = {n: set() for n in members}
    for u, v in shared:
        adjacency[u].add(v)
        adjacency[v].add(u)
    return ProjectionGraph(
        mode,
        MappingProxyType(dict(sorted(members.items()))),
        MappingProxyType({k: tuple(sorted(v)) for k, v in sorted(shared.items())}),
        MappingProxyType({n: frozenset(nb) for n, nb in sorted(adjacency.items())}),
    )


@dataclass(frozen=True)
class IndirectConnection:
    pair: tuple[str, str]
    connection_degree: int
    paths: tuple[tuple[str, ...], ...]
    truncated: bool = False

    @property
    def path_count(self) -> int:
        return len(self.paths)

    @property
    def strength(self) -> int:
        """Indirect edge weight: the number of enumerated paths."""
        return len(self.paths)


def _two_mode_distances(graph: CorporateGraph, mode: str, source: str, limit: int) -> dict[str, int]:
    """Hop distances from ``source`` to same-mode nodes, up to ``limit`` hops."""
    opp = other_kind(mode)
    dist = {(mode, source): 0}
    queue = deque([(mode, source)])
    out = {}
    while queue:
        node = queue.popleft()
        d = dist[node]
        if node[0] == mode:
            out[node[1]] = d
        if d == limit:
            continue
        nkind = opp if node[0] == mode else mode
        for nb in graph.adjacency(node[0])[node[1]]:
            key = (nkind, nb)
            if key not in dist:
                dist[key] = d + 1
                queue.append(key)
    return out


def _enumerate_paths(graph, mode, source, targets, max_len, max_paths):
    """All simple alternating paths from ``source`` to any of ``targets``.

    Neighbours are visited in sorted order, so each target's paths come out in
    lexicographic order and truncation keeps the lexicographically first ones.
    """
    opp = other_kind(mode)
    adj = {mode: graph.adjacency(mode), opp: graph.adjacency(opp)}
    sorted_nbrs: dict[tuple[str, str], list[str]] = {}
    found: dict[str, list[tuple[str, ...]]] = {t: [] for t in targets}
    truncated: set[str] = set()
    path = [source]
    on_path = {(mode, source)}

    def nbrs(kind, ident):
        key = (kind, ident)
        if key not in sorted_nbrs:
            sorted_nbrs[key] = sorted(adj[kind][ident])
        return sorted_nbrs[key]

    # explicit stack of (kind, ident, neighbour iterator)
    stack = [(mode, source, iter(nbrs(mode, source)))]
    while stack:
        kind, ident, it = stack[-1]
        nkind = opp if kind == mode else mode
        pushed = False
        if len(path) - 1 < max_len:
            for nb in it:
                if (nkind, nb) in on_path:
                    continue
                path.append(nb)
                on_path.add((nkind, nb))
                if nkind == mode and nb in found:
                    if len(found[nb]) < max_paths:
                        found[nb].append(tuple(path))
                    else:
                        truncated.add(nb)
                stack.append((nkind, nb, iter(nbrs(nkind, nb))))
                pushed = True
                break
        if not pushed:
            stack.pop()
            on_path.discard((kind, path.pop()))
    return found, truncated


def indirect_connections(
    graph: CorporateGraph,
    mode: str,
    max_path_len: int = DEFAULT_MAX_PATH_LEN,
    max_paths_per_pair: int = DEFAULT_MAX_PATHS_PER_PAIR,
    sources: Iterable[str] | None = None,
) -> list[IndirectConnection]:
    """Same-mode pairs without a shared neighbour but joined within ``max_path_len`` hops.

    Without ``sources`` every unordered pair is reported once as (u, v) with
    u < v. With ``sources`` only pairs touching a source are reported, oriented
    as (source, other).
    """
    if max_path_len < 4 or max_path_len % 2:
        raise ValueError("max_path_len must be an even number of hops >= 4")
    if max_paths_per_pair < 1:
        raise ValueError("max_paths_per_pair must be >= 1")
    nodes = sorted(graph.adjacency(mode))
    source_set = None
    if sources is not None:
        source_set = set(sources)
        unknown = source_set - set(nodes)
        if unknown:
            raise KeyError(f"unknown {mode} nodes {sorted(unknown)}")
    out = []
    for u in nodes:
        if source_set is not None and u not in source_set:
            continue
        dist = _two_mode_distances(graph, mode, u, max_path_len)
        targets = []
        for v, d in dist.items():
            if d < 4:
                continue
            if source_set is None or v in source_set:
                if v < u:
                    continue
            targets.append(v)
        if not targets:
            continue
        found, truncated = _enumerate_paths(graph, mode, u, targets, max_path_len, max_paths_per_pair)
        for v in sorted(targets):
            out.append(IndirectConnection((u, v), dist[v] // 2, tuple(found[v]), v in truncated))
    return out


def connection_strength_order(connections: Iterable[IndirectConnection]) -> list[IndirectConnection]:
    """Strongest first: closer degree, then more paths, then by pair."""
    return sorted(connections, key=lambda c: (c.connection_degree, -c.path_count, c.pair))
