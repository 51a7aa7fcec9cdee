"""Personal and professional relation identification between two directors.

Personal relations come from web search results run through a text-analysis
model with a fixed prompt; professional relations come from shared
standardized links in already-extracted director profiles. Both network
dependencies sit behind small client interfaces with offline replay versions.
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import os
import re
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Protocol

from .model import DirectorRecord

log = logging.getLogger(__name__)

MAX_RESULTS = 5
DEFAULT_RETRIES = 2

RELATION_TAXONOMY = (
    "husband - wife",
    "daughter - father",
    "nephew - uncle",
    "mother - son",
    "sister - brother",
    "grandfather - granddaughter",
    "grandmother - grandson",
    "cousin - cousin",
    "aunt - nephew",
    "stepmother - stepson",
    "stepfather - stepdaughter",
    "godmother - godson",
    "adoptive mother - adopted son",
    "sister-in-law - brother-in-law",
    "friend - friend",
)

NOT_AVAILABLE = "Not Available"
RELATION_KEY = "Relation"


def _label_key(label: str) -> str:
    return re.sub(r"\s*-\s*", "-", " ".join(label.split()).casefold())


_TAXONOMY_INDEX = {_label_key(t): t for t in RELATION_TAXONOMY}
assert len(_TAXONOMY_INDEX) == len(RELATION_TAXONOMY)


def canonical_label(label: str) -> str | None:
    """Taxonomy entry matching ``label`` up to case and spacing around hyphens."""
    return _TAXONOMY_INDEX.get(_label_key(label))


class Status(str, enum.Enum):
    IDENTIFIED = "identified"
    NOT_AVAILABLE = "not_available"
    ERROR = "error"


class SearchClient(Protocol):
    def search(self, query: str) -> list[tuple[str, str]]: ...


class TextAnalysisClient(Protocol):
    def complete(self, prompt: str) -> str: ...


# ---------------------------------------------------------------- prompt protocol


def _quoted(name: str) -> str:
    if not name or not name.strip():
        raise ValueError("director name is empty")
    escaped = name.strip().replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def build_search_queries(name_1: str, name_2: str) -> list[str]:
    pair = f"{_quoted(name_1)}, {_quoted(name_2)}"
    return [pair, f"{pair} relation", f"{pair} Family tree"]


def build_personal_relation_prompt(name_1: str, name_2: str, text: str) -> str:
    if not text or not text.strip():
        raise ValueError("text is empty")
    taxonomy = "; ".join(f'"{t}"' for t in RELATION_TAXONOMY)
    return (
        "Task Description:\n"
        "You are a linguistic analyst. The task is to analyze a given text and determine "
        "if there is any familial relationship implied between "
        f"{name_1} and {name_2}.\n"
        "\n"
        "Predefined Requirements:\n"
        "Use this list to return the identified relation:\n"
        f"{taxonomy}\n"
        "\n"
        "Edge Case Handling:\n"
        "- If the text does not mention either director, return the answer as "
        f"'{NOT_AVAILABLE}'.\n"
        "- If the text mentions both directors but does not imply any familial "
        f"relationship between them, return the answer as '{NOT_AVAILABLE}'.\n"
        "\n"
        "Output Formatting:\n"
        "Return the identified familial relationship in JSON format with the key as: "
        f'"{RELATION_KEY}"\n'
        "\n"
        "Text:\n"
        f"{text}\n"
    )


@dataclass(frozen=True)
class ParsedRelation:
    status: Status
    label: str | None
    raw_response: str


def _first_object(response: str):
    decoder = json.JSONDecoder()
    for m in re.finditer(r"\{", response):
        try:
            obj, _ = decoder.raw_decode(response, m.start())
        except ValueError:
            continue
        if isinstance(obj, dict):
            return obj
    return None


def parse_relation_response(response) -> ParsedRelation:
    """Classify a model response; never raises."""
    if not isinstance(response, str):
        return ParsedRelation(Status.ERROR, None, repr(response))
    obj = _first_object(response)
    if obj is None:
        return ParsedRelation(Status.ERROR, None, response)
    value = obj.get(RELATION_KEY)
    if value is None:
        for k, v in obj.items():
            if isinstance(k, str) and k.strip().casefold() == RELATION_KEY.casefold():
                value = v
                break
    if not isinstance(value, str):
        return ParsedRelation(Status.ERROR, None, response)
    if value.strip().casefold() == NOT_AVAILABLE.casefold():
        return ParsedRelation(Status.NOT_AVAILABLE, None, response)
    label = canonical_label(value)
    if label is None:
        return ParsedRelation(Status.ERROR, None, response)
    return ParsedRelation(Status.IDENTIFIED, label, response)


@dataclass(frozen=True)
class RelationFinding:
    pair: tuple[str, str]
    status: Status
    label: str | None = None
    evidence_url: str | None = None
    raw_response: str | None = None
    first_named: str | None = None
    candidates: tuple[tuple[str, str], ...] = ()
    detail: str = ""

    def __post_init__(self):
        if (self.label is not None) != (self.status is Status.IDENTIFIED):
            raise ValueError("label is set exactly when the relation is identified")
        if self.label is not None and self.label not in RELATION_TAXONOMY:
            raise ValueError(f"label {self.label!r} is not in the taxonomy")


def _call(fn, arg, retries: int):
    attempt = 0
    while True:
        attempt += 1
        try:
            return fn(arg)
        except Exception as exc:
            if attempt > retries:
                raise
            log.warning("client call failed (attempt %d): %s", attempt, exc)


def identify_personal_relation(
    pair: tuple[DirectorRecord, DirectorRecord],
    search: SearchClient,
    analysis: TextAnalysisClient,
    retries: int = DEFAULT_RETRIES,
) -> RelationFinding:
    """First identified relation over queries x results, in order.

    Every response is kept in ``candidates`` as (url, response) for audit.
    """
    first, second = pair
    ids = (first.din, second.din)
    candidates: list[tuple[str, str]] = []

    def finding(status, label=None, url=None, raw=None, detail=""):
        return RelationFinding(ids, status, label, url, raw, first.name, tuple(candidates), detail)

    try:
        queries = build_search_queries(first.name, second.name)
    except ValueError as exc:
        return finding(Status.ERROR, detail=str(exc))
    last_raw = None
    for query in queries:
        try:
            results = _call(search.search, query, retries)
        except Exception as exc:
            return finding(Status.ERROR, raw=last_raw, detail=f"search failed: {exc}")
        for url, text in list(results)[:MAX_RESULTS]:
            if not text or not text.strip():
                continue
            prompt = build_personal_relation_prompt(first.name, second.name, text)
            try:
                response = _call(analysis.complete, prompt, retries)
            except Exception as exc:
                return finding(Status.ERROR, raw=last_raw, detail=f"analysis failed: {exc}")
            candidates.append((url, response))
            last_raw = response
            parsed = parse_relation_response(response)
            if parsed.status is Status.IDENTIFIED:
                return finding(Status.IDENTIFIED, parsed.label, url, response)
    return finding(Status.NOT_AVAILABLE, raw=last_raw)


# ---------------------------------------------------------------- replay clients


class ReplayMiss(KeyError):
    pass


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


SEARCH_FILE = "search.json"
RESPONSES_FILE = "responses.json"


@dataclass
class ReplayStore:
    """Recorded query -> results and prompt-hash -> response tables.

    On disk: ``search.json`` maps each query string to a list of
    ``{"url", "text"}`` objects; ``responses.json`` maps the SHA-256 hex of
    each prompt to the response text.
    """

    searches: dict[str, list[tuple[str, str]]] = field(default_factory=dict)
    responses: dict[str, str] = field(default_factory=dict)

    @classmethod
    def load(cls, directory) -> "ReplayStore":
        d = Path(directory)
        searches, responses = {}, {}
        if (d / SEARCH_FILE).exists():
            raw = json.loads((d / SEARCH_FILE).read_text(encoding="utf-8"))
            searches = {q: [(r["url"], r["text"]) for r in rs] for q, rs in raw.items()}
        if (d / RESPONSES_FILE).exists():
            responses = json.loads((d / RESPONSES_FILE).read_text(encoding="utf-8"))
        return cls(searches, responses)

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        searches = {
            q: [{"url": u, "text": t} for u, t in rs] for q, rs in sorted(self.searches.items())
        }
        (d / SEARCH_FILE).write_text(
            json.dumps(searches, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        (d / RESPONSES_FILE).write_text(
            json.dumps(dict(sorted(self.responses.items())), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    def add_response(self, prompt: str, response: str) -> None:
        self.responses[prompt_hash(prompt)] = response


class ReplaySearchClient:
    def __init__(self, store: ReplayStore):
        self.store = store

    def search(self, query: str) -> list[tuple[str, str]]:
        try:
            return list(self.store.searches[query])[:MAX_RESULTS]
        except KeyError:
            raise ReplayMiss(f"no recorded results for query {query!r}") from None


class ReplayAnalysisClient:
    def __init__(self, store: ReplayStore):
        self.store = store

    def complete(self, prompt: str) -> str:
        try:
            return self.store.responses[prompt_hash(prompt)]
        except KeyError:
            raise ReplayMiss("no recorded response for prompt") from None


# ---------------------------------------------------------------- live clients


class _TextExtractor(HTMLParser):
    def __init__(self):
        super().__init__()
        self.parts: list[str] = []
        self._skip = 0

    def handle_starttag(self, tag, attrs):
        if tag in ("script", "style", "noscript"):
            self._skip += 1

    def handle_endtag(self, tag):
        if tag in ("script", "style", "noscript") and self._skip:
            self._skip -= 1

    def handle_data(self, data):
        if not self._skip and data.strip():
            self.parts.append(data.strip())


def html_to_text(html: str) -> str:
    p = _TextExtractor()
    p.feed(html)
    return " ".join(p.parts)


class HttpSearchClient:
    """JSON search API returning ``{"results": [{"url": ...}, ...]}``; pages are then fetched."""

    def __init__(self, endpoint: str, api_key: str, timeout: float = 30.0, opener=None):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout
        self._open = opener or urllib.request.urlopen

    def search(self, query: str) -> list[tuple[str, str]]:
        qs = urllib.parse.urlencode({"q": query, "count": MAX_RESULTS})
        req = urllib.request.Request(
            f"{self.endpoint}?{qs}", headers={"Authorization": f"Bearer {self.api_key}"}
        )
        with self._open(req, timeout=self.timeout) as resp:
            payload = json.loads(resp.read().decode("utf-8"))
        out = []
        for item in payload.get("results", [])[:MAX_RESULTS]:
            url = item["url"]
            with self._open(url, timeout=self.timeout) as page:
                text = html_to_text(page.read().decode("utf-8", errors="replace"))
            out.append((url, text))
        return out


class HttpAnalysisClient:
    """Chat-completions style endpoint; deterministic sampling."""

    def __init__(self, endpoint: str, api_key: str, model: str, timeout: float = 60.0, opener=None):
        self.endpoint = endpoint
        self.api_key = api_key
        self.model = model
        self.timeout = timeout
        self._open = opener or urllib.request.urlopen

    def complete(self, prompt: str) -> str:
        body = json.dumps({
            "model": self.model,
            "temperature": 0,
            "messages": [{"role": "user", "content": prompt}],
        }).encode("utf-8")
        req = urllib.request.Request(
            self.endpoint,
            data=body,
            headers={"Authorization": f"Bearer {self.api_key}", "Content-Type": "application/json"},
        )
        with self._open(req, timeout=self.timeout) as resp:
            payload = json.loads(resp.read().decode("utf-8"))
        return payload["choices"][0]["message"]["content"]


LIVE_ENV = ("SEARCH_API_KEY", "LLM_API_KEY", "LLM_MODEL")
DEFAULT_LLM_URL = "https://api.openai.com/v1/chat/completions"


def missing_live_env(env=None) -> list[str]:
    env = os.environ if env is None else env
    return [k for k in (*LIVE_ENV, "SEARCH_API_URL") if not env.get(k)]


def live_clients(env=None) -> tuple[HttpSearchClient, HttpAnalysisClient]:
    env = os.environ if env is None else env
    missing = missing_live_env(env)
    if missing:
        raise RuntimeError(f"live mode needs environment variables: {', '.join(missing)}")
    return (
        HttpSearchClient(env["SEARCH_API_URL"], env["SEARCH_API_KEY"]),
        HttpAnalysisClient(env.get("LLM_API_URL") or DEFAULT_LLM_URL, env["LLM_API_KEY"], env["LLM_MODEL"]),
    )


# ---------------------------------------------------------------- professional links


def canonical_link(link: str) -> str:
    """Normalize a standardized entity locator for equality comparison."""
    parts = urllib.parse.urlsplit(link.strip())
    scheme = (parts.scheme or "https").lower()
    if scheme == "http":
        scheme = "https"
    host = parts.netloc.lower()
    if host.startswith("www."):
        host = host[4:]
    path = urllib.parse.unquote(parts.path).replace(" ", "_").rstrip("/")
    return urllib.parse.urlunsplit((scheme, host, path, parts.query, ""))


@dataclass(frozen=True)
class WebProfile:
    din: str
    entities: tuple[tuple[str, str], ...]

    def __post_init__(self):
        deduped: dict[str, str] = {}
        for name, link in self.entities:
            deduped.setdefault(canonical_link(link), name)
        object.__setattr__(self, "entities", tuple((name, link) for link, name in deduped.items()))

    @classmethod
    def from_json(cls, doc: dict) -> "WebProfile":
        return cls(str(doc["din"]), tuple((e["name"], e["link"]) for e in doc.get("entities", [])))


def load_profile(path) -> WebProfile:
    return WebProfile.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def load_profiles(directory) -> dict[str, WebProfile]:
    out = {}
    for p in sorted(Path(directory).glob("*.json")):
        prof = load_profile(p)
        out[prof.din] = prof
    return out


@dataclass(frozen=True)
class ProfessionalMatch:
    link: str
    name_1: str
    name_2: str


def match_professional_links(profile_1: WebProfile, profile_2: WebProfile) -> list[ProfessionalMatch]:
    other = {link: name for name, link in profile_2.entities}
    matches = [
        ProfessionalMatch(link, name, other[link])
        for name, link in profile_1.entities
        if link in other
    ]
    return sorted(matches, key=lambda m: m.link)
