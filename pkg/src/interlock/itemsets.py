"""Maximal frequent itemsets of directors (per company) and companies (per director)."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .graph import COMPANY, DIRECTOR, other_kind
from .model import BipartiteDataset

DEFAULT_MIN_SUPPORT = 0.0001


@dataclass(frozen=True)
class TransactionDB:
    item_kind: str
    keys: tuple[str, ...]
    transactions: tuple[tuple[str, ...], ...]

    @property
    def transaction_kind(self) -> str:
        return other_kind(self.item_kind)

    def __len__(self) -> int:
        return len(self.transactions)

    @classmethod
    def from_lists(cls, transactions: Iterable[Iterable[str]], item_kind: str = DIRECTOR, keys=None):
        txs = []
        for t in transactions:
            items = list(t)
            if len(set(items)) != len(items):
                raise ValueError(f"duplicate items in transaction {items}")
            txs.append(tuple(sorted(items)))
        if keys is None:
            keys = [f"t{i}" for i in range(len(txs))]
        keys = tuple(keys)
        if len(keys) != len(txs):
            raise ValueError("one key per transaction required")
        return cls(item_kind, keys, tuple(txs))


def build_transactions(dataset: BipartiteDataset, item_kind: str) -> TransactionDB:
    """One transaction per opposite-mode entity, in dataset order."""
    if item_kind == DIRECTOR:
        keys = [c.cin for c in dataset.companies]
        items = {k: [] for k in keys}
        for a in dataset.affiliations:
            items[a.cin].append(a.din)
    elif item_kind == COMPANY:
        keys = [d.din for d in dataset.directors]
        items = {k: [] for k in keys}
        for a in dataset.affiliations:
            items[a.din].append(a.cin)
    else:
        raise ValueError(f"unknown item kind {item_kind!r}")
    return TransactionDB(item_kind, tuple(keys), tuple(tuple(sorted(items[k])) for k in keys))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # decimal text of the float, so 0.0001 is exactly 1/10000
        return Fraction(Decimal(repr(value)))
    return Fraction(value)


def support_threshold(n_transactions: int, min_support) -> int:
    """Smallest occurrence count meeting ``min_support``: ceil(n * min_support)."""
    if n_transactions < 1:
        raise ValueError("n_transactions must be >= 1")
    frac = _as_fraction(min_support)
    if not 0 < frac <= 1:
        raise ValueError("min_support must lie in (0, 1]")
    return max(1, math.ceil(n_transactions * frac))


# ---------------------------------------------------------------- FP-tree


class _Node:
    __slots__ = ("item", "count", "parent", "children")

    def __init__(self, item, parent):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children: dict = {}


class _FPTree:
    def __init__(self, weighted_paths: Iterable[tuple[Sequence[str], int]], min_count: int):
        weighted_paths = list(weighted_paths)
        counts: Counter = Counter()
        for items, w in weighted_paths:
            for it in items:
                counts[it] += w
        frequent = {it: c for it, c in counts.items() if c >= min_count}
        # most frequent first; ties by identifier
        self.order = sorted(frequent, key=lambda it: (-frequent[it], it))
        rank = {it: r for r, it in enumerate(self.order)}
        self.counts = frequent
        self.root = _Node(None, None)
        self.header: dict[str, list[_Node]] = {it: [] for it in self.order}
        for items, w in weighted_paths:
            kept = sorted((it for it in items if it in rank), key=rank.__getitem__)
            node = self.root
            for it in kept:
                child = node.children.get(it)
                if child is None:
                    child = _Node(it, node)
                    node.children[it] = child
                    self.header[it].append(child)
                child.count += w
                node = child

    def single_path(self) -> list[str] | None:
        path = []
        node = self.root
        while node.children:
            if len(node.children) > 1:
                return None
            (node,) = node.children.values()
            path.append(node.item)
        return path

    def prefix_paths(self, item: str) -> list[tuple[list[str], int]]:
        out = []
        for node in self.header[item]:
            path = []
            p = node.parent
            while p.item is not None:
                path.append(p.item)
                p = p.parent
            path.reverse()
            out.append((path, node.count))
        return out


class _MaximalStore:
    """Found maximal itemsets with an item index for superset lookups."""

    def __init__(self):
        self.sets: list[frozenset[str]] = []
        self.by_item: dict[str, list[int]] = {}

    def subsumes(self, candidate: frozenset[str]) -> bool:
        if not candidate:
            return bool(self.sets)
        best = None
        for it in candidate:
            ids = self.by_item.get(it)
            if not ids:
                return False
            if best is None or len(ids) < len(best):
                best = ids
        return any(candidate <= self.sets[i] for i in best)

    def add(self, itemset: frozenset[str]) -> None:
        idx = len(self.sets)
        self.sets.append(itemset)
        for it in itemset:
            self.by_item.setdefault(it, []).append(idx)


def fpmax(transactions: Iterable[Iterable[str]], min_count: int) -> list[frozenset[str]]:
    """Maximal itemsets occurring in at least ``min_count`` transactions."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    tree = _FPTree(((tuple(t), 1) for t in transactions), min_count)
    store = _MaximalStore()
    _fpmax(tree, frozenset(), store, min_count)
    return store.sets


def _fpmax(tree: _FPTree, head: frozenset[str], store: _MaximalStore, min_count: int) -> None:
    path = tree.single_path()
    if path is not None:
        candidate = head | frozenset(path)
        if candidate and not store.subsumes(candidate):
            store.add(candidate)
        return
    for item in reversed(tree.order):
        new_head = head | {item}
        base = tree.prefix_paths(item)
        tail_counts: Counter = Counter()
        for items, w in base:
            for it in items:
                tail_counts[it] += w
        tail = frozenset(it for it, c in tail_counts.items() if c >= min_count)
        if store.subsumes(new_head | tail):
            continue
        if tail:
            _fpmax(_FPTree(base, min_count), new_head, store, min_count)
        else:
            store.add(new_head)


def brute_force_maximal_itemsets(transactions: Iterable[Iterable[str]], min_count: int) -> dict[frozenset[str], int]:
    """Reference miner: count every sub-itemset of every transaction.

    Exponential in transaction width; meant for small oracle checks.
    """
    support: Counter = Counter()
    for t in transactions:
        items = sorted(set(t))
        for k in range(1, len(items) + 1):
            for combo in combinations(items, k):
                support[frozenset(combo)] += 1
    frequent = {s: c for s, c in support.items() if c >= min_count}
    universe = set().union(*frequent) if frequent else set()
    return {
        s: c
        for s, c in frequent.items()
        if not any((s | {it}) in frequent for it in universe - s)
    }


# ---------------------------------------------------------------- records and reports


@dataclass(frozen=True)
class FrequentItemsetRecord:
    items: tuple[str, ...]
    support_count: int
    support_fraction: float
    intersecting: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.items)


def _record_order(r: FrequentItemsetRecord):
    return (-r.support_count, -r.size, r.items)


def records_for(db: TransactionDB, itemsets: Iterable[Iterable[str]]) -> list[FrequentItemsetRecord]:
    tids: dict[str, set[int]] = {}
    for i, t in enumerate(db.transactions):
        for it in t:
            tids.setdefault(it, set()).add(i)
    n = len(db)
    out = []
    for s in itemsets:
        items = tuple(sorted(s))
        hits = set.intersection(*(tids[it] for it in items)) if items else set(range(n))
        out.append(
            FrequentItemsetRecord(
                items, len(hits), len(hits) / n, tuple(sorted(db.keys[i] for i in hits))
            )
        )
    out.sort(key=_record_order)
    return out


def mine_maximal_itemsets(
    db: TransactionDB,
    min_support=None,
    *,
    min_count: int | None = None,
    min_size: int = 1,
) -> list[FrequentItemsetRecord]:
    """Maximal frequent itemsets with supports and intersecting entities.

    Give either a fractional ``min_support`` or an absolute ``min_count``.
    ``min_size`` only filters the output (maximality is judged before it).
    """
    if (min_support is None) == (min_count is None):
        raise ValueError("give exactly one of min_support or min_count")
    if not db.transactions:
        return []
    if min_count is None:
        min_count = support_threshold(len(db), min_support)
    found = fpmax(db.transactions, min_count)
    return records_for(db, (s for s in found if len(s) >= min_size))


def surname(name: str) -> str:
    parts = name.split()
    return parts[-1].casefold() if parts else ""


def shared_surname(names: Iterable[str]) -> bool:
    """True when at least two names end in the same token. An annotation only."""
    seen = set()
    for n in names:
        s = surname(n)
        if not s:
            continue
        if s in seen:
            return True
        seen.add(s)
    return False


@dataclass(frozen=True)
class ReportRow:
    support_fraction: float
    support_count: int
    items: tuple[str, ...]
    intersecting: tuple[str, ...]
    shared_surname: bool = False

    @property
    def support_label(self) -> str:
        return f"{self.support_fraction:.9f} ({self.support_count})"

    def cells(self) -> list[str]:
        return [
            self.support_label,
            ";".join(self.items),
            ";".join(self.intersecting),
            str(len(self.items)),
            "yes" if self.shared_surname else "",
        ]


REPORT_HEADER = ["support_freq", "itemset", "intersecting", "size", "shared_surname"]


def itemset_report(
    records: Iterable[FrequentItemsetRecord],
    top_k: int = 5,
    sort_key: str = "support",
    names: Mapping[str, str] | None = None,
) -> list[ReportRow]:
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if sort_key == "support":
        key = _record_order
    elif sort_key == "size":
        key = lambda r: (-r.size, -r.support_count, r.items)  # noqa: E731
    else:
        raise ValueError(f"sort_key must be 'support' or 'size', not {sort_key!r}")
    rows = []
    for r in sorted(records, key=key)[:top_k]:
        flag = shared_surname(names[i] for i in r.items if i in names) if names else False
        rows.append(ReportRow(r.support_fraction, r.support_count, r.items, r.intersecting, flag))
    return rows


def itemset_distribution(records: Iterable[FrequentItemsetRecord]) -> tuple[dict[int, int], list[tuple[int, int]]]:
    """Itemset-size histogram and the sorted (size, support_count) points."""
    records = list(records)
    hist = Counter(r.size for r in records)
    points = sorted((r.size, r.support_count) for r in records)
    return dict(sorted(hist.items())), points
