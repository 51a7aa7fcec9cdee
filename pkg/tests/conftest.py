from __future__ import annotations

import random
from itertools import accumulate

import pytest

from interlock.model import (
    AffiliationRecord,
    BipartiteDataset,
    CompanyRecord,
    DirectorRecord,
    save_dataset,
)

# Worked-example network: company -> directors
FIG1 = {
    "A": ["1", "2"],
    "B": ["1", "2", "3", "4", "5"],
    "C": ["1"],
    "D": ["3"],
    "E": ["4", "5", "6"],
}
FIG1_DIRECTOR_NAMES = {
    "1": "Anil Varma",
    "2": "Meera Varma",
    "3": "Kiran Rao",
    "4": "Sunil Shah",
    "5": "Deepa Iyer",
    "6": "Rahul Nair",
}


def make_dataset(company_links: dict[str, list[str]], names=None) -> BipartiteDataset:
    names = names or {}
    dins: list[str] = []
    for ds in company_links.values():
        for d in ds:
            if d not in dins:
                dins.append(d)
    return BipartiteDataset(
        [CompanyRecord(c, f"Company {c}", f"https://example.org/company/{c}") for c in company_links],
        [DirectorRecord(d, names.get(d, f"Director {d}"), f"https://example.org/director/{d}") for d in dins],
        [AffiliationRecord(c, d) for c, ds in company_links.items() for d in ds],
    )


def fig1() -> BipartiteDataset:
    return make_dataset(FIG1, FIG1_DIRECTOR_NAMES)


@pytest.fixture
def fig1_dataset() -> BipartiteDataset:
    return fig1()


@pytest.fixture
def fig1_dir(tmp_path):
    d = tmp_path / "fig1"
    save_dataset(fig1(), d)
    return d


def random_bipartite(rng: random.Random, n_companies: int, n_directors: int, p: float,
                     isolated_ok: bool = True) -> BipartiteDataset:
    companies = [f"C{i}" for i in range(n_companies)]
    directors = [f"D{i}" for i in range(n_directors)]
    aff = [(c, d) for c in companies for d in directors if rng.random() < p]
    if not isolated_ok:
        used_c = {c for c, _ in aff}
        used_d = {d for _, d in aff}
        companies = [c for c in companies if c in used_c]
        directors = [d for d in directors if d in used_d]
    rng.shuffle(aff)
    return BipartiteDataset(
        [CompanyRecord(c, f"Co {c}") for c in companies],
        [DirectorRecord(d, f"Dir {d}") for d in directors],
        [AffiliationRecord(c, d) for c, d in aff],
    )


def power_law_bipartite(seed: int, n_directors: int = 10_000, n_companies: int = 8_000) -> BipartiteDataset:
    """Synthetic board network with heavy-tailed director degrees.

    Board sizes follow a small-board-heavy distribution (2 to 15 seats);
    seats go to directors by preferential attachment on a Zipf-like weight.
    """
    rng = random.Random(seed)
    sizes = [2] * 43 + [3] * 26 + [4] * 12 + [5] * 8 + [6] * 5 + [7] * 3 + [10] * 2 + [15]
    cum = list(accumulate(1.0 / (i + 1) ** 0.7 for i in range(n_directors)))
    dins = [f"D{i:05d}" for i in range(n_directors)]
    cins = [f"C{i:05d}" for i in range(n_companies)]
    links: list[tuple[str, str]] = []
    used: set[str] = set()
    for cin in cins:
        k = rng.choice(sizes)
        board: set[str] = set()
        while len(board) < k:
            board.add(dins[rng.choices(range(n_directors), cum_weights=cum)[0]] if rng.random() < 0.5
                      else dins[rng.randrange(n_directors)])
        for d in sorted(board):
            links.append((cin, d))
            used.add(d)
    # every director sits on at least one board
    for d in dins:
        if d not in used:
            links.append((rng.choice(cins), d))
    return BipartiteDataset(
        [CompanyRecord(c, f"Company {c}") for c in cins],
        [DirectorRecord(d, f"Person {d} Surname{int(d[1:]) % 97}") for d in dins],
        [AffiliationRecord(c, d) for c, d in links],
    )


# ---------------------------------------------------------------- acceptance summary

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            number, title = mark.args
            _CRITERIA.setdefault(number, {"title": title, "outcomes": []})
            item.user_properties.append(("criterion", number))


def pytest_runtest_logreport(report):
    number = dict(report.user_properties).get("criterion")
    if number is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA[number]["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        outcomes = entry["outcomes"]
        if not outcomes:
            verdict = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            verdict = "PASS"
        else:
            verdict = "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {entry['title']}")
