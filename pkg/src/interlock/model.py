"""Domain records, the three-file dataset layout, and keyed anonymization."""

from __future__ import annotations

import csv
import hashlib
import hmac
from dataclasses import dataclass, field
from pathlib import Path

COMPANIES_FILE = "companies.csv"
DIRECTORS_FILE = "directors.csv"
AFFILIATIONS_FILE = "affiliations.csv"

COMPANY_HEADER = ("cin", "name", "url")
DIRECTOR_HEADER = ("din", "name", "url")
AFFILIATION_HEADER = ("cin", "din")

PSEUDONYM_HEX = 12


class DatasetError(ValueError):
    """Base class for dataset loading and validation failures."""


class ParseError(DatasetError):
    pass


class IntegrityError(DatasetError):
    pass


@dataclass(frozen=True)
class CompanyRecord:
    cin: str
    name: str
    url: str = ""


@dataclass(frozen=True)
class DirectorRecord:
    din: str
    name: str
    url: str = ""


@dataclass(frozen=True)
class AffiliationRecord:
    cin: str
    din: str


@dataclass(frozen=True)
class BipartiteDataset:
    """Companies, directors and the directorships linking them.

    Construction validates identifier uniqueness and referential integrity,
    so every instance in circulation is a valid dataset.
    """

    companies: tuple[CompanyRecord, ...] = ()
    directors: tuple[DirectorRecord, ...] = ()
    affiliations: tuple[AffiliationRecord, ...] = ()
    _company_index: dict[str, CompanyRecord] = field(
        default=None, init=False, repr=False, compare=False
    )
    _director_index: dict[str, DirectorRecord] = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "companies", tuple(self.companies))
        object.__setattr__(self, "directors", tuple(self.directors))
        object.__setattr__(self, "affiliations", tuple(self.affiliations))
        companies = _unique_index(self.companies, "cin", "company")
        directors = _unique_index(self.directors, "din", "director")
        seen: set[tuple[str, str]] = set()
        for row, aff in enumerate(self.affiliations):
            if aff.cin not in companies:
                raise IntegrityError(f"affiliation {row}: unknown cin {aff.cin!r}")
            if aff.din not in directors:
                raise IntegrityError(f"affiliation {row}: unknown din {aff.din!r}")
            key = (aff.cin, aff.din)
            if key in seen:
                raise IntegrityError(
                    f"affiliation {row}: duplicate directorship ({aff.cin!r}, {aff.din!r})"
                )
            seen.add(key)
        object.__setattr__(self, "_company_index", companies)
        object.__setattr__(self, "_director_index", directors)

    def company(self, cin: str) -> CompanyRecord:
        return self._company_index[cin]

    def director(self, din: str) -> DirectorRecord:
        return self._director_index[din]

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.companies), len(self.directors), len(self.affiliations)


def _unique_index(records, attr: str, kind: str) -> dict:
    index = {}
    for row, rec in enumerate(records):
        key = getattr(rec, attr)
        if not key:
            raise IntegrityError(f"{kind} {row}: empty {attr}")
        if key in index:
            raise IntegrityError(f"{kind} {row}: duplicate {attr} {key!r}")
        index[key] = rec
    return index


def _read_rows(path: Path, header: tuple[str, ...]) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: missing header row") from None
        if tuple(got) != header:
            raise ParseError(f"{path}: expected header {','.join(header)}, got {','.join(got)}")
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path} line {reader.line_num}: expected {len(header)} columns, got {len(row)}"
                )
            rows.append(row)
        return rows


def load_dataset(companies_path, directors_path, affiliations_path) -> BipartiteDataset:
    companies = [CompanyRecord(*r) for r in _read_rows(Path(companies_path), COMPANY_HEADER)]
    directors = [DirectorRecord(*r) for r in _read_rows(Path(directors_path), DIRECTOR_HEADER)]
    affiliations = [
        AffiliationRecord(*r) for r in _read_rows(Path(affiliations_path), AFFILIATION_HEADER)
    ]
    return BipartiteDataset(companies, directors, affiliations)


def load_dataset_dir(directory) -> BipartiteDataset:
    d = Path(directory)
    return load_dataset(d / COMPANIES_FILE, d / DIRECTORS_FILE, d / AFFILIATIONS_FILE)


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def save_dataset(dataset: BipartiteDataset, out_dir) -> tuple[Path, Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = (out / COMPANIES_FILE, out / DIRECTORS_FILE, out / AFFILIATIONS_FILE)
    _write_rows(paths[0], COMPANY_HEADER, ((c.cin, c.name, c.url) for c in dataset.companies))
    _write_rows(paths[1], DIRECTOR_HEADER, ((d.din, d.name, d.url) for d in dataset.directors))
    _write_rows(paths[2], AFFILIATION_HEADER, ((a.cin, a.din) for a in dataset.affiliations))
    return paths


class _Pseudonymizer:
    def __init__(self, key: bytes):
        self.key = key
        self.issued: dict[str, str] = {}

    def digest(self, text: str, length: int = PSEUDONYM_HEX) -> str:
        return hmac.new(self.key, text.encode("utf-8"), hashlib.sha256).hexdigest()[:length]

    def identifier(self, prefix: str, original: str) -> str:
        alias = f"{prefix}-{self.digest(prefix + ':' + original)}"
        previous = self.issued.setdefault(alias, original)
        if previous != original:
            raise IntegrityError(
                f"pseudonym collision: {previous!r} and {original!r} both map to {alias}"
            )
        return alias

    def name(self, prefix: str, original: str) -> str:
        # token-wise so that shared surnames stay shared
        tokens = original.split()
        return " ".join(f"{prefix}{self.digest('name:' + t.lower(), 6)}" for t in tokens)


def anonymize(dataset: BipartiteDataset, key: bytes | str) -> BipartiteDataset:
    """Replace identifiers and names with keyed pseudonyms and blank the URLs.

    The affiliation structure is carried over unchanged under the pseudonym map.
    """
    if isinstance(key, str):
        key = key.encode("utf-8")
    if not key:
        raise ValueError("anonymization key must be non-empty")
    p = _Pseudonymizer(key)
    cins = {c.cin: p.identifier("C", c.cin) for c in dataset.companies}
    dins = {d.din: p.identifier("D", d.din) for d in dataset.directors}
    return BipartiteDataset(
        tuple(CompanyRecord(cins[c.cin], p.name("c", c.name), "") for c in dataset.companies),
        tuple(DirectorRecord(dins[d.din], p.name("d", d.name), "") for d in dataset.directors),
        tuple(AffiliationRecord(cins[a.cin], dins[a.din]) for a in dataset.affiliations),
    )


def pseudonym_map(dataset: BipartiteDataset, key: bytes | str) -> dict[tuple[str, str], str]:
    """(kind, original id) -> pseudonym, for checking analyses across anonymization."""
    if isinstance(key, str):
        key = key.encode("utf-8")
    if not key:
        raise ValueError("anonymization key must be non-empty")
    p = _Pseudonymizer(key)
    out = {("company", c.cin): p.identifier("C", c.cin) for c in dataset.companies}
    out.update({("director", d.din): p.identifier("D", d.din) for d in dataset.directors})
    return out
