"""Breadth-first crawl of company and director pages into a dataset."""

from __future__ import annotations

import configparser
import logging
import re
import time
import urllib.error
import urllib.parse
import urllib.request
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .graph import COMPANY, DIRECTOR, other_kind
from .model import AffiliationRecord, BipartiteDataset, CompanyRecord, DirectorRecord

log = logging.getLogger(__name__)

DEFAULT_RETRIES = 2


class PageNotFound(LookupError):
    def __init__(self, kind: str, ident: str):
        super().__init__(f"{kind} {ident!r} not found")
        self.kind = kind
        self.ident = ident


class BaseNodeNotFound(PageNotFound):
    pass


class FetchError(RuntimeError):
    def __init__(self, kind: str, ident: str, attempts: int, cause: BaseException):
        super().__init__(f"fetching {kind} {ident!r} failed after {attempts} attempts: {cause}")
        self.kind = kind
        self.ident = ident
        self.attempts = attempts


@dataclass(frozen=True)
class CompanyPage:
    cin: str
    name: str
    url: str = ""
    director_links: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.cin:
            raise ValueError("company page without cin")


@dataclass(frozen=True)
class DirectorPage:
    din: str
    name: str
    url: str = ""
    company_links: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.din:
            raise ValueError("director page without din")


class PageProvider(Protocol):
    def fetch_company(self, cin: str) -> CompanyPage: ...

    def fetch_director(self, din: str) -> DirectorPage: ...


@dataclass(frozen=True)
class CrawlConfig:
    base_kind: str
    base_id: str
    max_nodes: int | None = None
    max_depth: int | None = None
    retries: int = DEFAULT_RETRIES

    def __post_init__(self):
        if self.base_kind not in (COMPANY, DIRECTOR):
            raise ValueError(f"base_kind must be company or director, not {self.base_kind!r}")
        if not self.base_id:
            raise ValueError("base_id is empty")
        if self.max_nodes is not None and self.max_nodes < 1:
            raise ValueError("max_nodes must be positive")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")


@dataclass
class CrawlFrontier:
    """FIFO queue of (kind, id, depth); nodes are marked visited when enqueued."""

    queue: deque = field(default_factory=deque)
    visited: set = field(default_factory=set)

    def offer(self, kind: str, ident: str, depth: int) -> bool:
        if (kind, ident) in self.visited:
            return False
        self.visited.add((kind, ident))
        self.queue.append((kind, ident, depth))
        return True

    def seen(self, kind: str, ident: str) -> bool:
        return (kind, ident) in self.visited

    def pop(self):
        return self.queue.popleft()

    def __len__(self) -> int:
        return len(self.queue)


@dataclass(frozen=True)
class CrawlResult:
    dataset: BipartiteDataset
    truncated: bool
    depth_reached: int


def _fetch(provider, kind: str, ident: str, retries: int):
    fetch = provider.fetch_company if kind == COMPANY else provider.fetch_director
    attempt = 0
    while True:
        attempt += 1
        try:
            return fetch(ident)
        except PageNotFound:
            raise
        except Exception as exc:
            if attempt > retries:
                raise FetchError(kind, ident, attempt, exc) from exc
            log.warning("fetch %s %s failed (attempt %d): %s", kind, ident, attempt, exc)


def bfs_crawl(provider: PageProvider, config: CrawlConfig) -> CrawlResult:
    """Crawl outward from the base node, level by level.

    Within a level nodes are fetched in the order their links appear on
    earlier pages. Affiliations are kept when both endpoints were fetched.
    Any fetch failure aborts the crawl.
    """
    if (
        not getattr(provider, "bounded", False)
        and config.max_nodes is None
        and config.max_depth is None
    ):
        raise ValueError("unbounded provider needs max_nodes or max_depth")
    frontier = CrawlFrontier()
    frontier.offer(config.base_kind, config.base_id, 0)
    companies: list[CompanyRecord] = []
    directors: list[DirectorRecord] = []
    links: dict[tuple[str, str], None] = {}
    truncated = False
    depth_reached = 0

    while frontier:
        kind, ident, depth = frontier.pop()
        try:
            page = _fetch(provider, kind, ident, config.retries)
        except PageNotFound:
            if (kind, ident) == (config.base_kind, config.base_id):
                raise BaseNodeNotFound(kind, ident) from None
            raise
        depth_reached = max(depth_reached, depth)
        if kind == COMPANY:
            companies.append(CompanyRecord(page.cin, page.name, page.url))
            targets = page.director_links
            for din in targets:
                links.setdefault((page.cin, din))
        else:
            directors.append(DirectorRecord(page.din, page.name, page.url))
            targets = page.company_links
            for cin in targets:
                links.setdefault((cin, page.din))
        okind = other_kind(kind)
        for target in targets:
            if frontier.seen(okind, target):
                continue
            if config.max_depth is not None and depth + 1 > config.max_depth:
                truncated = True
                continue
            if config.max_nodes is not None and len(frontier.visited) >= config.max_nodes:
                truncated = True
                continue
            frontier.offer(okind, target, depth + 1)

    fetched_c = {c.cin for c in companies}
    fetched_d = {d.din for d in directors}
    affiliations = [
        AffiliationRecord(cin, din) for cin, din in links if cin in fetched_c and din in fetched_d
    ]
    return CrawlResult(BipartiteDataset(companies, directors, affiliations), truncated, depth_reached)


class FixtureProvider:
    """Serves pages synthesized from an in-memory dataset."""

    bounded = True

    def __init__(self, dataset: BipartiteDataset):
        self._companies = {c.cin: c for c in dataset.companies}
        self._directors = {d.din: d for d in dataset.directors}
        self._c_links: dict[str, list[str]] = {c: [] for c in self._companies}
        self._d_links: dict[str, list[str]] = {d: [] for d in self._directors}
        for a in dataset.affiliations:
            self._c_links[a.cin].append(a.din)
            self._d_links[a.din].append(a.cin)

    def fetch_company(self, cin: str) -> CompanyPage:
        try:
            c = self._companies[cin]
        except KeyError:
            raise PageNotFound(COMPANY, cin) from None
        return CompanyPage(c.cin, c.name, c.url, tuple(self._c_links[cin]))

    def fetch_director(self, din: str) -> DirectorPage:
        try:
            d = self._directors[din]
        except KeyError:
            raise PageNotFound(DIRECTOR, din) from None
        return DirectorPage(d.din, d.name, d.url, tuple(self._d_links[din]))


def fixture_provider(dataset: BipartiteDataset) -> FixtureProvider:
    return FixtureProvider(dataset)


# ---------------------------------------------------------------- live site


@dataclass(frozen=True)
class ParseRules:
    """Regular expressions applied to raw page text.

    ``name`` must have one capture group; ``*_link`` patterns are used with
    ``findall`` and must capture the linked identifier.
    """

    company_url: str
    director_url: str
    company_name: str = r"<title>\s*(.*?)\s*</title>"
    director_name: str = r"<title>\s*(.*?)\s*</title>"
    director_link: str = r'href="[^"]*/director/([^"/?#]+)'
    company_link: str = r'href="[^"]*/company/([^"/?#]+)'


class RateLimiter:
    def __init__(self, per_second: float, clock=time.monotonic, sleep=time.sleep):
        if per_second <= 0:
            raise ValueError("rate limit must be positive")
        self.interval = 1.0 / per_second
        self.clock = clock
        self.sleep = sleep
        self._next = None

    def wait(self) -> None:
        now = self.clock()
        if self._next is not None and now < self._next:
            self.sleep(self._next - now)
            now = self._next
        self._next = now + self.interval


def _safe_name(ident: str) -> str:
    return urllib.parse.quote(ident, safe="") or "_"


class HttpPageProvider:
    """Fetches pages over HTTP with a request rate limit and an on-disk cache."""

    bounded = False

    def __init__(self, rules: ParseRules, rate_limit_per_sec: float = 1.0, cache_dir=None,
                 timeout: float = 30.0, opener=None, limiter: RateLimiter | None = None):
        self.rules = rules
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.timeout = timeout
        self.limiter = limiter or RateLimiter(rate_limit_per_sec)
        self._open = opener or urllib.request.urlopen

    def _cache_path(self, kind: str, ident: str) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / kind / f"{_safe_name(ident)}.html"

    def _get(self, kind: str, ident: str, template: str) -> tuple[str, str]:
        url = template.format(id=urllib.parse.quote(ident, safe=""))
        cached = self._cache_path(kind, ident)
        if cached is not None and cached.exists():
            return url, cached.read_text(encoding="utf-8")
        self.limiter.wait()
        try:
            with self._open(url, timeout=self.timeout) as resp:
                text = resp.read().decode("utf-8", errors="replace")
        except urllib.error.HTTPError as exc:
            if exc.code == 404:
                raise PageNotFound(kind, ident) from None
            raise
        if cached is not None:
            cached.parent.mkdir(parents=True, exist_ok=True)
            cached.write_text(text, encoding="utf-8")
        return url, text

    @staticmethod
    def _name(pattern: str, text: str) -> str:
        m = re.search(pattern, text, re.S)
        return m.group(1).strip() if m else ""

    @staticmethod
    def _links(pattern: str, text: str) -> tuple[str, ...]:
        seen = dict.fromkeys(urllib.parse.unquote(x) for x in re.findall(pattern, text))
        return tuple(seen)

    def fetch_company(self, cin: str) -> CompanyPage:
        url, text = self._get(COMPANY, cin, self.rules.company_url)
        return CompanyPage(cin, self._name(self.rules.company_name, text), url,
                           self._links(self.rules.director_link, text))

    def fetch_director(self, din: str) -> DirectorPage:
        url, text = self._get(DIRECTOR, din, self.rules.director_url)
        return DirectorPage(din, self._name(self.rules.director_name, text), url,
                            self._links(self.rules.company_link, text))


CRAWL_KEYS = ("base_kind", "base_id", "max_nodes", "max_depth", "rate_limit_per_sec", "cache_dir")


def read_crawl_section(path) -> dict[str, str]:
    """The ``[crawl]`` section of an INI-style config file as plain strings."""
    parser = configparser.ConfigParser(interpolation=None)
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    if not parser.has_section("crawl"):
        return {}
    return dict(parser.items("crawl"))


def crawl_config_from(values: dict) -> CrawlConfig:
    def opt_int(key):
        v = values.get(key)
        return int(v) if v not in (None, "") else None

    return CrawlConfig(
        base_kind=values.get("base_kind", COMPANY),
        base_id=values.get("base_id", ""),
        max_nodes=opt_int("max_nodes"),
        max_depth=opt_int("max_depth"),
        retries=int(values.get("retries", DEFAULT_RETRIES)),
    )


def http_provider_from(values: dict) -> HttpPageProvider:
    rule_keys = ("company_url", "director_url", "company_name", "director_name",
                 "director_link", "company_link")
    missing = [k for k in ("company_url", "director_url") if not values.get(k)]
    if missing:
        raise ValueError(f"crawl config lacks {', '.join(missing)}")
    rules = ParseRules(**{k: values[k] for k in rule_keys if values.get(k)})
    return HttpPageProvider(
        rules,
        rate_limit_per_sec=float(values.get("rate_limit_per_sec") or 1.0),
        cache_dir=values.get("cache_dir") or None,
    )
