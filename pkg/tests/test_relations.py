import io
import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relation_cases import (
    EVIDENCE_URL,
    NEPHEW,
    PARSER_CASES,
    STRANGER,
    UNCLE,
    nephew_store,
    unrelated_store,
)
from interlock.model import DirectorRecord
from interlock.relations import (
    RELATION_TAXONOMY,
    HttpAnalysisClient,
    HttpSearchClient,
    RelationFinding,
    ReplayAnalysisClient,
    ReplayMiss,
    ReplaySearchClient,
    ReplayStore,
    Status,
    WebProfile,
    build_personal_relation_prompt,
    build_search_queries,
    canonical_link,
    html_to_text,
    identify_personal_relation,
    live_clients,
    load_profiles,
    match_professional_links,
    missing_live_env,
    parse_relation_response,
)

GOLDEN = Path(__file__).parent / "data" / "golden_prompt.txt"


def test_taxonomy_shape():
    assert len(RELATION_TAXONOMY) == 15 == len(set(RELATION_TAXONOMY))
    assert RELATION_TAXONOMY[0] == "husband - wife" and RELATION_TAXONOMY[-1] == "friend - friend"


def test_queries():
    assert build_search_queries("P Q", "R S") == ['"P Q", "R S"', '"P Q", "R S" relation', '"P Q", "R S" Family tree']


def test_queries_identical_names():
    assert len(build_search_queries("P Q", "P Q")) == 3


def test_queries_escape_quotes():
    q = build_search_queries('Ann "Nan" Lee', "Bo Yu")[0]
    assert q == r'"Ann \"Nan\" Lee", "Bo Yu"'


def test_queries_reject_empty():
    with pytest.raises(ValueError):
        build_search_queries("", "x")


def test_prompt_matches_golden():
    text = "Arjun Mehta joined the board of Mehta Steel, chaired by his uncle Vikram Mehta."
    prompt = build_personal_relation_prompt("Arjun Mehta", "Vikram Mehta", text)
    assert prompt == GOLDEN.read_text(encoding="utf-8")


def test_prompt_section_order():
    p = build_personal_relation_prompt("X", "Y", "body")
    marks = ["You are a linguistic analyst", '"husband - wife"', "does not mention either director",
             "does not imply any familial", '"Relation"', "body"]
    positions = [p.index(m) for m in marks]
    assert positions == sorted(positions)


def test_prompt_lists_each_label_once():
    p = build_personal_relation_prompt("X", "Y", "body")
    for label in RELATION_TAXONOMY:
        assert p.count(f'"{label}"') == 1


def test_prompt_rejects_empty_text():
    with pytest.raises(ValueError):
        build_personal_relation_prompt("X", "Y", "  ")


@pytest.mark.parametrize("response, status, label", PARSER_CASES)
def test_parser_table(response, status, label):
    parsed = parse_relation_response(response)
    assert (parsed.status.value, parsed.label) == (status, label)
    assert parsed.raw_response == response


def test_parser_table_size():
    assert len(PARSER_CASES) == 30
    assert {c[1] for c in PARSER_CASES} == {"identified", "not_available", "error"}


@given(st.one_of(st.text(), st.none(), st.integers(), st.binary()))
def test_parser_total(value):
    assert parse_relation_response(value).status in Status


def test_finding_invariants():
    with pytest.raises(ValueError):
        RelationFinding(("a", "b"), Status.IDENTIFIED)
    with pytest.raises(ValueError):
        RelationFinding(("a", "b"), Status.NOT_AVAILABLE, "nephew - uncle")
    with pytest.raises(ValueError):
        RelationFinding(("a", "b"), Status.IDENTIFIED, "boss - employee")


def test_replay_nephew_uncle():
    store = nephew_store()
    f = identify_personal_relation((NEPHEW, UNCLE), ReplaySearchClient(store), ReplayAnalysisClient(store))
    assert f.status is Status.IDENTIFIED
    assert f.label == "nephew - uncle"
    assert f.evidence_url == EVIDENCE_URL
    assert f.pair == ("D1", "D2") and f.first_named == "Arjun Mehta"
    assert len(f.candidates) == 2


def test_replay_round_trip_through_disk(tmp_path):
    nephew_store().save(tmp_path)
    store = ReplayStore.load(tmp_path)
    runs = [identify_personal_relation((NEPHEW, UNCLE), ReplaySearchClient(store), ReplayAnalysisClient(store))
            for _ in range(2)]
    assert runs[0] == runs[1] and runs[0].label == "nephew - uncle"


def test_all_not_available():
    store = unrelated_store()
    f = identify_personal_relation((NEPHEW, STRANGER), ReplaySearchClient(store), ReplayAnalysisClient(store))
    assert f.status is Status.NOT_AVAILABLE and f.label is None
    assert len(f.candidates) == 3


def test_search_failure_is_error():
    class Down:
        calls = 0

        def search(self, q):
            Down.calls += 1
            raise ConnectionError("down")

    f = identify_personal_relation((NEPHEW, UNCLE), Down(), ReplayAnalysisClient(ReplayStore()), retries=2)
    assert f.status is Status.ERROR and "down" in f.detail
    assert Down.calls == 3


def test_replay_miss_is_error():
    f = identify_personal_relation((NEPHEW, UNCLE), ReplaySearchClient(ReplayStore()),
                                   ReplayAnalysisClient(ReplayStore()), retries=0)
    assert f.status is Status.ERROR
    with pytest.raises(ReplayMiss):
        ReplaySearchClient(ReplayStore()).search("x")


def test_empty_name_is_error():
    f = identify_personal_relation((DirectorRecord("D9", " "), UNCLE), ReplaySearchClient(ReplayStore()),
                                   ReplayAnalysisClient(ReplayStore()))
    assert f.status is Status.ERROR


# ---------------------------------------------------------------- live clients


def test_live_env_reporting():
    assert missing_live_env({}) == ["SEARCH_API_KEY", "LLM_API_KEY", "LLM_MODEL", "SEARCH_API_URL"]
    with pytest.raises(RuntimeError):
        live_clients({"SEARCH_API_KEY": "k"})
    env = {"SEARCH_API_KEY": "s", "LLM_API_KEY": "l", "LLM_MODEL": "m", "SEARCH_API_URL": "https://s.example"}
    search, analysis = live_clients(env)
    assert search.endpoint == "https://s.example" and analysis.model == "m"


class Recorder:
    def __init__(self, routes):
        self.routes = routes
        self.requests = []

    def __call__(self, req, timeout=None):
        self.requests.append(req)
        url = req if isinstance(req, str) else req.full_url
        key = next(k for k in self.routes if url.startswith(k))
        return io.BytesIO(self.routes[key].encode())


def test_http_search_client():
    opener = Recorder({
        "https://s.example": json.dumps({"results": [{"url": "https://p.example/1"}]}),
        "https://p.example/1": "<html><script>x()</script><p>Arjun Mehta</p><p>uncle</p></html>",
    })
    client = HttpSearchClient("https://s.example", "key", opener=opener)
    assert client.search('"a", "b"') == [("https://p.example/1", "Arjun Mehta uncle")]
    assert opener.requests[0].get_header("Authorization") == "Bearer key"


def test_http_analysis_client():
    opener = Recorder({"https://l.example": json.dumps(
        {"choices": [{"message": {"content": '{"Relation": "Not Available"}'}}]})})
    client = HttpAnalysisClient("https://l.example", "key", "model-x", opener=opener)
    assert client.complete("hello") == '{"Relation": "Not Available"}'
    body = json.loads(opener.requests[0].data)
    assert body["model"] == "model-x" and body["temperature"] == 0
    assert body["messages"][0]["content"] == "hello"


def test_html_to_text():
    assert html_to_text("<style>a{}</style><b>One</b> <i>two</i>") == "One two"


# ---------------------------------------------------------------- professional links


def profile(din, *entities):
    return WebProfile(din, tuple(entities))


def test_two_shared_links():
    p1 = profile("1", ("IIT Bombay", "https://en.wikipedia.org/wiki/IIT_Bombay"),
                 ("Tata Steel", "https://en.wikipedia.org/wiki/Tata_Steel"),
                 ("Chess Club", "https://chess.example"))
    p2 = profile("2", ("Indian Institute of Technology Bombay", "http://www.en.wikipedia.org/wiki/IIT Bombay/"),
                 ("Tata Steel Ltd", "https://en.wikipedia.org/wiki/Tata_Steel"))
    matches = match_professional_links(p1, p2)
    assert [(m.name_1, m.name_2) for m in matches] == [
        ("IIT Bombay", "Indian Institute of Technology Bombay"), ("Tata Steel", "Tata Steel Ltd")]
    assert {m.link for m in matches} == {m.link for m in match_professional_links(p2, p1)}


def test_disjoint_profiles():
    assert match_professional_links(profile("1", ("A", "https://a.example")),
                                     profile("2", ("B", "https://b.example"))) == []


def test_profile_dedupes():
    p = profile("1", ("A", "https://a.example/x"), ("A again", "http://www.a.example/x/"))
    assert len(p.entities) == 1


def test_canonical_link():
    assert canonical_link("HTTP://WWW.Example.org/wiki/A B/") == "https://example.org/wiki/A_B"


def test_load_profiles(tmp_path):
    (tmp_path / "a.json").write_text(json.dumps({"din": "1", "entities": [{"name": "X", "link": "https://x"}]}))
    (tmp_path / "b.json").write_text(json.dumps({"din": 2, "entities": []}))
    profiles = load_profiles(tmp_path)
    assert set(profiles) == {"1", "2"}
    assert profiles["1"].entities == (("X", "https://x"),)
