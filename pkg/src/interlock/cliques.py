"""Ego networks, maximal clique enumeration and per-base clique statistics."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping

from .graph import COMPANY
from .projection import ProjectionGraph

DEFAULT_RADIUS = 3
DEFAULT_MIN_SIZE = 3

# column letters per projection mode, in table order
STATS_COLUMNS = {
    "director": ("A", "B", "C", "D", "E", "F"),
    "company": ("P", "Q", "R", "S", "T", "U"),
}


@dataclass(frozen=True)
class EgoNetwork:
    base: str
    radius: int
    subgraph: ProjectionGraph


@dataclass(frozen=True)
class MaximalClique:
    members: tuple[str, ...]
    shared_intersection: tuple[str, ...]
    shared_union: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def shared_count(self) -> int:
        return len(self.shared_intersection)


def ego_network(projection: ProjectionGraph, base: str, radius: int) -> EgoNetwork:
    if base not in projection:
        raise KeyError(f"unknown {projection.mode} {base!r}")
    if radius < 1:
        raise ValueError("radius must be >= 1")
    dist = {base: 0}
    queue = deque([base])
    while queue:
        node = queue.popleft()
        if dist[node] == radius:
            continue
        for nb in projection.neighbors(node):
            if nb not in dist:
                dist[nb] = dist[node] + 1
                queue.append(nb)
    return EgoNetwork(base, radius, projection.subgraph(dist))


def _pivot(p: set[str], x: set[str], adj: Mapping[str, frozenset[str]]) -> str:
    # max |N(u) & P|, ties to the smallest identifier
    return min(p | x, key=lambda u: (-len(adj[u] & p), u))


def _bron_kerbosch(r: list[str], p: set[str], x: set[str], adj, out: list) -> None:
    if not p:
        if not x:
            out.append(tuple(r))
        return
    u = _pivot(p, x, adj)
    for v in sorted(p - adj[u]):
        nv = adj[v]
        r.append(v)
        _bron_kerbosch(r, p & nv, x & nv, adj, out)
        r.pop()
        p.remove(v)
        x.add(v)


def degeneracy_order(adj: Mapping[str, frozenset[str]]) -> list[str]:
    """Repeatedly strip a minimum-degree vertex (ties by identifier)."""
    degree = {v: len(nb) for v, nb in adj.items()}
    buckets: dict[int, set[str]] = {}
    for v, d in degree.items():
        buckets.setdefault(d, set()).add(v)
    order = []
    removed: set[str] = set()
    d = 0
    while len(order) < len(adj):
        while not buckets.get(d):
            d += 1
        v = min(buckets[d])
        buckets[d].remove(v)
        order.append(v)
        removed.add(v)
        for w in adj[v]:
            if w in removed:
                continue
            dw = degree[w]
            buckets[dw].remove(w)
            degree[w] = dw - 1
            buckets.setdefault(dw - 1, set()).add(w)
        d = max(d - 1, 0)
    return order


def _clique_sets(adj: Mapping[str, frozenset[str]]) -> list[tuple[str, ...]]:
    out: list[tuple[str, ...]] = []
    order = degeneracy_order(adj)
    position = {v: i for i, v in enumerate(order)}
    for v in order:
        later = {w for w in adj[v] if position[w] > position[v]}
        earlier = {w for w in adj[v] if position[w] < position[v]}
        _bron_kerbosch([v], later, earlier, adj, out)
    return out


def _describe(projection: ProjectionGraph, members: Iterable[str]) -> MaximalClique:
    members = tuple(sorted(members))
    inter = reduce(frozenset.intersection, (projection.memberships[m] for m in members))
    union: set[str] = set()
    for i, u in enumerate(members):
        for v in members[i + 1:]:
            union.update(projection.shared(u, v))
    return MaximalClique(members, tuple(sorted(inter)), tuple(sorted(union)))


def _canonical(cliques: list[MaximalClique]) -> list[MaximalClique]:
    return sorted(cliques, key=lambda c: (-c.size, c.members))


def maximal_cliques(projection: ProjectionGraph, min_size: int = DEFAULT_MIN_SIZE) -> list[MaximalClique]:
    if min_size < 2:
        raise ValueError("min_size must be >= 2")
    found = [c for c in _clique_sets(projection.adjacency) if len(c) >= min_size]
    return _canonical([_describe(projection, c) for c in found])


def cliques_containing(projection: ProjectionGraph, base: str, min_size: int = DEFAULT_MIN_SIZE) -> list[MaximalClique]:
    """Maximal cliques that include ``base``.

    Any vertex extending a clique through ``base`` is adjacent to ``base``, so
    searching the closed neighbourhood is enough; the result does not depend
    on how far an enclosing ego network reaches.
    """
    if base not in projection:
        raise KeyError(f"unknown {projection.mode} {base!r}")
    if min_size < 2:
        raise ValueError("min_size must be >= 2")
    adj = projection.adjacency
    out: list[tuple[str, ...]] = []
    if adj[base]:
        _bron_kerbosch([base], set(adj[base]), set(), adj, out)
    return _canonical([_describe(projection, c) for c in out if len(c) >= min_size])


@dataclass(frozen=True)
class CliqueStats:
    mode: str
    base: str
    radius: int
    neighborhood_nodes: int
    neighborhood_entities: int
    cliques: tuple[MaximalClique, ...]

    @property
    def clique_count(self) -> int:
        return len(self.cliques)

    @property
    def mean_size(self) -> float | None:
        if not self.cliques:
            return None
        return sum(c.size for c in self.cliques) / len(self.cliques)

    def _pick(self, key) -> MaximalClique | None:
        return min(self.cliques, key=key) if self.cliques else None

    @property
    def largest(self) -> MaximalClique | None:
        return self._pick(lambda c: (-c.size, -c.shared_count, c.members))

    @property
    def smallest(self) -> MaximalClique | None:
        return self._pick(lambda c: (c.size, -c.shared_count, c.members))

    @property
    def most_shared(self) -> MaximalClique | None:
        return self._pick(lambda c: (-c.shared_count, c.size, c.members))

    @property
    def least_shared(self) -> MaximalClique | None:
        return self._pick(lambda c: (c.shared_count, -c.size, c.members))

    def columns(self) -> dict[str, tuple]:
        """The six table columns keyed by letter (A-F for directors, P-U for companies)."""

        def pair(c):
            return (c.size, c.shared_count) if c is not None else None

        letters = STATS_COLUMNS[self.mode]
        values = (
            (self.neighborhood_nodes, self.neighborhood_entities),
            (self.clique_count, self.mean_size),
            pair(self.largest),
            pair(self.smallest),
            pair(self.most_shared),
            pair(self.least_shared),
        )
        return dict(zip(letters, values))

    def row(self) -> list[str]:
        cells = [self.base]
        for letter, value in self.columns().items():
            if value is None:
                cells.append("")
            elif letter in ("B", "Q"):
                count, mean = value
                cells.append(f"{count}, {mean:.2f}" if mean is not None else f"{count}, ")
            else:
                cells.append(f"{value[0]}, {value[1]}")
        return cells


def clique_stats(
    projection: ProjectionGraph,
    base: str,
    radius: int = DEFAULT_RADIUS,
    min_size: int = DEFAULT_MIN_SIZE,
) -> CliqueStats:
    ego = ego_network(projection, base, radius)
    entities = set()
    for n in ego.subgraph.memberships.values():
        entities |= n
    cliques = cliques_containing(ego.subgraph, base, min_size)
    return CliqueStats(
        projection.mode, base, radius, len(ego.subgraph.memberships), len(entities), tuple(cliques)
    )


def stats_header(mode: str) -> list[str]:
    label = "company" if mode == COMPANY else "director"
    return [label, *STATS_COLUMNS[mode]]
