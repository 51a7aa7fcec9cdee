"""Command-line entry point.

Every subcommand reads an optional INI config (``--config``) whose sections
mirror the analyses; command-line flags override config values.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import cliques as cq
from . import crawler, export, itemsets, projection, relations
from .graph import COMPANY, DEFAULT_STAR_MIN_DEGREE, DIRECTOR, KINDS, articulation_report, build_graph, degree_histogram, star_nodes
from .model import BipartiteDataset, DatasetError, anonymize, load_dataset, load_dataset_dir, save_dataset

log = logging.getLogger("interlock")

ANON_KEY_ENV = "INTERLOCK_ANON_KEY"
HIST_HEADER = ["degree", "count", "fraction", "cumulative_ge_fraction"]
CLIQUE_HEADER = ["members", "size", "shared_intersection_count", "shared_union_count"]
RELATION_HEADER = ["din_1", "din_2", "kind", "status", "label", "evidence_url", "first_named", "detail"]

DEFAULTS = {
    "stats": {"company_star_min": str(DEFAULT_STAR_MIN_DEGREE[COMPANY]),
              "director_star_min": str(DEFAULT_STAR_MIN_DEGREE[DIRECTOR])},
    "indirect": {"max_path_len": str(projection.DEFAULT_MAX_PATH_LEN),
                 "max_paths_per_pair": str(projection.DEFAULT_MAX_PATHS_PER_PAIR),
                 "max_nodes": "300", "company_sources": "", "director_sources": ""},
    "cliques": {"radius": str(cq.DEFAULT_RADIUS), "min_size": str(cq.DEFAULT_MIN_SIZE),
                "company_bases": "", "director_bases": ""},
    "itemsets": {"min_support": str(itemsets.DEFAULT_MIN_SUPPORT), "top_k": "5", "min_size": "1"},
}


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


@dataclass
class RunConfig:
    sections: dict[str, dict[str, str]] = field(default_factory=dict)

    @classmethod
    def build(cls, config_path, overrides: dict[str, dict[str, object]]) -> "RunConfig":
        sections = {k: dict(v) for k, v in DEFAULTS.items()}
        if config_path:
            parser = configparser.ConfigParser(interpolation=None)
            with open(config_path, encoding="utf-8") as fh:
                parser.read_file(fh)
            for sec in parser.sections():
                sections.setdefault(sec, {}).update(parser.items(sec))
        for sec, values in overrides.items():
            for k, v in values.items():
                if v is not None:
                    sections.setdefault(sec, {})[k] = str(v)
        cfg = cls(sections)
        cfg.validate()
        return cfg

    def get(self, section: str, key: str, default: str = "") -> str:
        return self.sections.get(section, {}).get(key, default)

    def getint(self, section: str, key: str) -> int:
        try:
            return int(self.get(section, key))
        except ValueError:
            raise ValueError(f"[{section}] {key} must be an integer") from None

    def validate(self) -> None:
        if self.getint("cliques", "radius") < 1:
            raise ValueError("[cliques] radius must be >= 1")
        if self.getint("cliques", "min_size") < 2:
            raise ValueError("[cliques] min_size must be >= 2")
        if self.getint("itemsets", "top_k") < 1:
            raise ValueError("[itemsets] top_k must be >= 1")
        if self.getint("itemsets", "min_size") < 1:
            raise ValueError("[itemsets] min_size must be >= 1")
        itemsets.support_threshold(1, self.min_support)
        L = self.getint("indirect", "max_path_len")
        if L < 4 or L % 2:
            raise ValueError("[indirect] max_path_len must be an even number >= 4")
        if self.getint("indirect", "max_paths_per_pair") < 1:
            raise ValueError("[indirect] max_paths_per_pair must be >= 1")
        for kind in KINDS:
            if self.getint("stats", f"{kind}_star_min") < 1:
                raise ValueError(f"[stats] {kind}_star_min must be >= 1")

    @property
    def min_support(self):
        raw = self.get("itemsets", "min_support")
        try:
            return float(raw)
        except ValueError:
            raise ValueError(f"[itemsets] min_support {raw!r} is not a number") from None

    def output_dir(self) -> Path:
        out = self.get("output", "dir")
        if not out:
            raise ValueError("no output directory (use --out or [output] dir)")
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        if not os.access(path, os.W_OK):
            raise ValueError(f"output directory {path} is not writable")
        return path

    def anon_key(self) -> str | None:
        return self.get("anonymize", "key") or os.environ.get(ANON_KEY_ENV) or None

    def load(self) -> BipartiteDataset:
        files = [self.get("dataset", k) for k in ("companies", "directors", "affiliations")]
        if all(files):
            ds = load_dataset(*files)
        elif self.get("dataset", "dir"):
            ds = load_dataset_dir(self.get("dataset", "dir"))
        else:
            raise ValueError("no dataset given (use --data or the [dataset] section)")
        return ds


class Outputs:
    """Tracks files written by one run so a failed run can remove them."""

    def __init__(self, root: Path):
        self.root = root
        self.files: list[Path] = []
        self.sections: dict[str, list[str]] = {}
        self.notes: dict[str, list[str]] = {}

    def path(self, section: str, name: str) -> Path:
        p = self.root / name
        self.files.append(p)
        self.sections.setdefault(section, []).append(name)
        return p

    def note(self, section: str, text: str) -> None:
        self.sections.setdefault(section, [])
        self.notes.setdefault(section, []).append(text)

    def discard(self) -> None:
        for p in self.files:
            p.unlink(missing_ok=True)


# ---------------------------------------------------------------- stages


def _safe(ident: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in ident)


def stage_stats(ds: BipartiteDataset, cfg: RunConfig, out: Outputs) -> list[str]:
    g = build_graph(ds)
    lines = [f"nodes {g.n_nodes} (companies {len(g.companies)}, directors {len(g.directors)}), edges {g.n_edges}"]
    for kind in KINDS:
        hist = degree_histogram(g, kind)
        export.write_csv(out.path("stats", f"degree_{kind}.csv"), HIST_HEADER,
                         ([d, c, f"{f:.6f}", f"{cum:.6f}"] for d, c, f, cum in hist.rows()))
        threshold = cfg.getint("stats", f"{kind}_star_min")
        stars = star_nodes(g, kind, threshold)
        export.write_csv(out.path("stats", f"star_{kind}.csv"), ["id", "degree"], stars)
        top = sorted(hist.rows(), key=lambda r: (-r[1], r[0]))[:2]
        summary = ", ".join(f"degree {d}: {f:.1%}" for d, _, f, _ in top)
        lines.append(f"{kind}: {hist.total} nodes; most common {summary or 'n/a'}; "
                     f"degree>=2: {hist.cumulative_ge(2):.1%}; star nodes (>= {threshold}): {len(stars)}")
    cuts = articulation_report(g)
    export.write_csv(out.path("stats", "cut_vertices.csv"), ["kind", "id"], cuts)
    lines.append(f"cut vertices: {len(cuts)}")
    out.path("stats", "stats_summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return lines


def stage_project(ds, cfg, out, modes=KINDS, formats=("graphml", "dot"), indirect=True):
    g = build_graph(ds)
    for mode in modes:
        proj = projection.project(g, mode)
        export.write_edge_table(proj, out.path("projection", f"projection_{mode}_edges.csv"))
        if "graphml" in formats:
            export.write_graphml(proj, out.path("projection", f"projection_{mode}.graphml"))
        if "dot" in formats:
            export.write_dot(proj, out.path("projection", f"projection_{mode}.dot"))
        if not indirect:
            continue
        sources = _split(cfg.get("indirect", f"{mode}_sources")) or None
        n = len(g.adjacency(mode))
        if sources is None and n > cfg.getint("indirect", "max_nodes"):
            out.note("indirect", f"{mode}: skipped all-pairs paths for {n} nodes "
                                 f"(above max_nodes; set {mode}_sources to scope)")
            continue
        conns = projection.indirect_connections(
            g, mode, cfg.getint("indirect", "max_path_len"),
            cfg.getint("indirect", "max_paths_per_pair"), sources)
        conns = projection.connection_strength_order(conns)
        export.write_path_table(conns, out.path("indirect", f"indirect_{mode}.csv"))
        export.write_paths(conns, out.path("indirect", f"indirect_{mode}_paths.csv"))


def _clique_rows(found):
    return ([" ".join(c.members), c.size, c.shared_count, len(c.shared_union)] for c in found)


def stage_cliques(ds, cfg, out, modes=KINDS, bases=None, scope_ego=True):
    g = build_graph(ds)
    radius = cfg.getint("cliques", "radius")
    min_size = cfg.getint("cliques", "min_size")
    for mode in modes:
        proj = projection.project(g, mode)
        chosen = (bases or {}).get(mode) or _split(cfg.get("cliques", f"{mode}_bases"))
        if not chosen:
            top = star_nodes(g, mode, 1)[:1]
            chosen = [top[0][0]] if top else []
            if not chosen:
                out.note("cliques", f"{mode}: no base node available")
                continue
        rows = []
        for base in chosen:
            stats = cq.clique_stats(proj, base, radius, min_size)
            rows.append(stats.row())
            export.write_csv(out.path("cliques", f"cliques_{mode}_{_safe(base)}.csv"),
                             CLIQUE_HEADER, _clique_rows(stats.cliques))
            if scope_ego:
                ego = cq.ego_network(proj, base, radius)
                export.write_csv(out.path("cliques", f"cliques_{mode}_{_safe(base)}_ego.csv"),
                                 CLIQUE_HEADER, _clique_rows(cq.maximal_cliques(ego.subgraph, min_size)))
        export.write_csv(out.path("cliques", f"clique_stats_{mode}.csv"), cq.stats_header(mode), rows)


def stage_itemsets(ds, cfg, out, kinds=KINDS, sort_keys=("support", "size")):
    names = {c.cin: c.name for c in ds.companies}
    names.update({d.din: d.name for d in ds.directors})
    top_k = cfg.getint("itemsets", "top_k")
    min_size = cfg.getint("itemsets", "min_size")
    for kind in kinds:
        db = itemsets.build_transactions(ds, kind)
        records = itemsets.mine_maximal_itemsets(db, cfg.min_support, min_size=min_size)
        threshold = itemsets.support_threshold(len(db), cfg.min_support) if len(db) else None
        out.note("itemsets", f"{kind}: {len(db)} transactions, threshold {threshold}, "
                             f"{len(records)} maximal itemsets")
        full = itemsets.itemset_report(records, max(len(records), 1), "support", names)
        export.write_csv(out.path("itemsets", f"itemsets_{kind}.csv"), itemsets.REPORT_HEADER,
                         (r.cells() for r in full))
        for key in sort_keys:
            rows = itemsets.itemset_report(records, top_k, key, names)
            export.write_csv(out.path("itemsets", f"itemsets_{kind}_top_{key}.csv"),
                             itemsets.REPORT_HEADER, (r.cells() for r in rows))
        hist, points = itemsets.itemset_distribution(records)
        export.write_csv(out.path("itemsets", f"itemsets_{kind}_size_hist.csv"),
                         ["size", "count"], hist.items())
        export.write_csv(out.path("itemsets", f"itemsets_{kind}_size_support.csv"),
                         ["size", "support_count"], points)


def write_report(out: Outputs, cfg: RunConfig, ds: BipartiteDataset) -> Path:
    c, d, a = ds.counts
    lines = [
        "# interlock analysis report",
        f"generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}",
        f"dataset: companies={c} directors={d} affiliations={a}",
    ]
    for sec in sorted(cfg.sections):
        for k, v in sorted(cfg.sections[sec].items()):
            if sec == "anonymize" and k == "key":
                v = "***"
            lines.append(f"config: {sec}.{k}={v}")
    lines.append("")
    for sec in ("stats", "projection", "indirect", "cliques", "itemsets"):
        lines.append(f"[{sec}]")
        lines.extend(f"file: {name}" for name in out.sections.get(sec, []))
        lines.extend(f"note: {n}" for n in out.notes.get(sec, []))
        lines.append("")
    report = out.root / "report.txt"
    report.write_text("\n".join(lines), encoding="utf-8")
    out.files.append(report)
    return report


# ---------------------------------------------------------------- subcommands


def _prepare(args, overrides=None):
    o = {
        "dataset": {"dir": args.data, "companies": args.companies, "directors": args.directors,
                    "affiliations": args.affiliations},
        "output": {"dir": args.out},
    }
    for sec, vals in (overrides or {}).items():
        o.setdefault(sec, {}).update(vals)
    return RunConfig.build(args.config, o)


def _dataset(cfg: RunConfig) -> BipartiteDataset:
    ds = cfg.load()
    key = cfg.anon_key()
    return anonymize(ds, key) if key else ds


def cmd_crawl(args) -> int:
    values = crawler.read_crawl_section(args.config) if args.config else {}
    for k in ("base_kind", "base_id", "max_nodes", "max_depth"):
        v = getattr(args, k)
        if v is not None:
            values[k] = str(v)
    config = crawler.crawl_config_from(values)
    if args.fixture:
        provider = crawler.fixture_provider(load_dataset_dir(args.fixture))
    else:
        provider = crawler.http_provider_from(values)
    out_dir = args.out or RunConfig.build(args.config, {}).get("output", "dir")
    if not out_dir:
        raise ValueError("no output directory (use --out or [output] dir)")
    result = crawler.bfs_crawl(provider, config)
    out = Path(out_dir)
    save_dataset(result.dataset, out)
    c, d, a = result.dataset.counts
    summary = (f"companies={c}\ndirectors={d}\naffiliations={a}\n"
               f"depth_reached={result.depth_reached}\ntruncated={str(result.truncated).lower()}\n")
    (out / "crawl_summary.txt").write_text(summary, encoding="utf-8")
    print(summary, end="")
    return 0


def cmd_stats(args) -> int:
    cfg = _prepare(args, {"stats": {"company_star_min": args.company_star_min,
                                    "director_star_min": args.director_star_min}})
    ds = _dataset(cfg)
    out = Outputs(cfg.output_dir())
    print("\n".join(stage_stats(ds, cfg, out)))
    return 0


def cmd_project(args) -> int:
    cfg = _prepare(args, {"indirect": {"max_path_len": args.max_path_len,
                                       "max_paths_per_pair": args.max_paths}})
    ds = _dataset(cfg)
    modes = [args.mode] if args.mode else list(KINDS)
    stage_project(ds, cfg, Outputs(cfg.output_dir()), modes, formats=(), indirect=not args.no_indirect)
    return 0


def cmd_export(args) -> int:
    cfg = _prepare(args)
    ds = _dataset(cfg)
    modes = [args.mode] if args.mode else list(KINDS)
    formats = ("graphml", "dot") if args.format == "both" else (args.format,)
    stage_project(ds, cfg, Outputs(cfg.output_dir()), modes, formats, indirect=False)
    return 0


def cmd_cliques(args) -> int:
    cfg = _prepare(args, {"cliques": {"radius": args.radius, "min_size": args.min_size}})
    ds = _dataset(cfg)
    bases = {args.mode: args.base} if args.base else None
    stage_cliques(ds, cfg, Outputs(cfg.output_dir()), [args.mode], bases, scope_ego=args.ego)
    return 0


def cmd_itemsets(args) -> int:
    cfg = _prepare(args, {"itemsets": {"min_support": args.min_support, "top_k": args.top_k,
                                       "min_size": args.min_size}})
    ds = _dataset(cfg)
    kinds = [args.item_kind] if args.item_kind else list(KINDS)
    out = Outputs(cfg.output_dir())
    stage_itemsets(ds, cfg, out, kinds, (args.sort,))
    for note in out.notes.get("itemsets", []):
        print(note)
    return 0


def cmd_anonymize(args) -> int:
    cfg = _prepare(args, {"anonymize": {"key": args.key}})
    key = cfg.anon_key()
    if not key:
        raise ValueError(f"anonymization key required (--key or {ANON_KEY_ENV})")
    save_dataset(anonymize(cfg.load(), key), cfg.output_dir())
    return 0


def cmd_analyze(args) -> int:
    cfg = _prepare(args, {
        "cliques": {"radius": args.radius, "min_size": args.min_size},
        "itemsets": {"min_support": args.min_support, "top_k": args.top_k},
        "indirect": {"max_path_len": args.max_path_len, "max_paths_per_pair": args.max_paths},
        "anonymize": {"key": args.key},
    })
    out_dir = cfg.output_dir()
    ds = _dataset(cfg)
    out = Outputs(out_dir)
    stages = [
        ("stats", lambda: stage_stats(ds, cfg, out)),
        ("projection", lambda: stage_project(ds, cfg, out)),
        ("cliques", lambda: stage_cliques(ds, cfg, out)),
        ("itemsets", lambda: stage_itemsets(ds, cfg, out)),
    ]
    for name, run in stages:
        try:
            log.info("running %s", name)
            run()
        except Exception as exc:
            out.discard()
            raise StageError(name, exc) from exc
    report = write_report(out, cfg, ds)
    print(report)
    return 0


def _read_pairs(path) -> list[tuple[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["din_1", "din_2"]:
            raise ValueError(f"{path}: expected header din_1,din_2")
        return [(r[0], r[1]) for r in reader if r]


def cmd_relations(args) -> int:
    cfg = _prepare(args, {"relations": {"replay": args.replay, "profiles": args.profiles,
                                        "pairs": args.pairs}})
    ds = cfg.load()
    pairs_path = cfg.get("relations", "pairs")
    if not pairs_path:
        raise ValueError("no pairs file (use --pairs or [relations] pairs)")
    if args.live:
        missing = relations.missing_live_env()
        if missing:
            print(f"error: live mode needs {', '.join(missing)} set in the environment; "
                  "use --replay DIR for offline fixtures", file=sys.stderr)
            return 2
        search, analysis = relations.live_clients()
    else:
        replay = cfg.get("relations", "replay")
        if not replay:
            raise ValueError("give --replay DIR, or --live with credentials in the environment")
        store = relations.ReplayStore.load(replay)
        search, analysis = relations.ReplaySearchClient(store), relations.ReplayAnalysisClient(store)
    profiles = relations.load_profiles(cfg.get("relations", "profiles")) if cfg.get("relations", "profiles") else {}
    retries = int(cfg.get("relations", "retries", str(relations.DEFAULT_RETRIES)))
    directors = {d.din: d for d in ds.directors}
    rows = []
    for din_1, din_2 in _read_pairs(pairs_path):
        if din_1 not in directors or din_2 not in directors:
            rows.append([din_1, din_2, "personal", "error", "", "", "", "unknown director"])
            continue
        f = relations.identify_personal_relation((directors[din_1], directors[din_2]), search, analysis, retries)
        rows.append([din_1, din_2, "personal", f.status.value, f.label or "", f.evidence_url or "",
                     f.first_named or "", f.detail])
        if din_1 in profiles and din_2 in profiles:
            for m in relations.match_professional_links(profiles[din_1], profiles[din_2]):
                rows.append([din_1, din_2, "professional", "identified", "", m.link, "",
                             f"{m.name_1} | {m.name_2}"])
    out = cfg.output_dir() / "relations.csv"
    export.write_csv(out, RELATION_HEADER, rows)
    print(out)
    return 0


def _common(p: argparse.ArgumentParser, out=True) -> None:
    p.add_argument("--config", help="INI config file")
    p.add_argument("--data", help="directory holding companies.csv, directors.csv, affiliations.csv")
    p.add_argument("--companies")
    p.add_argument("--directors")
    p.add_argument("--affiliations")
    if out:
        p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="interlock", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crawl", help="BFS crawl from a base node into the three dataset files")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--base-kind", choices=KINDS)
    p.add_argument("--base-id")
    p.add_argument("--max-nodes", type=int)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--fixture", help="serve pages from a dataset directory instead of HTTP")
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("analyze", help="run stats, projections, cliques and itemsets")
    _common(p)
    p.add_argument("--radius", type=int)
    p.add_argument("--min-size", type=int)
    p.add_argument("--min-support", type=float)
    p.add_argument("--top-k", type=int)
    p.add_argument("--max-path-len", type=int)
    p.add_argument("--max-paths", type=int)
    p.add_argument("--key", help=f"anonymize before analysis (or set {ANON_KEY_ENV})")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("stats", help="degree histograms, star nodes, cut vertices")
    _common(p)
    p.add_argument("--company-star-min", type=int)
    p.add_argument("--director-star-min", type=int)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("project", help="direct projection edge tables and indirect path tables")
    _common(p)
    p.add_argument("--mode", choices=KINDS)
    p.add_argument("--max-path-len", type=int)
    p.add_argument("--max-paths", type=int)
    p.add_argument("--no-indirect", action="store_true")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("cliques", help="maximal cliques around a base node")
    _common(p)
    p.add_argument("--mode", choices=KINDS, required=True)
    p.add_argument("--base")
    p.add_argument("--radius", type=int)
    p.add_argument("--min-size", type=int)
    p.add_argument("--ego", action="store_true", help="also list every maximal clique of the ego network")
    p.set_defaults(func=cmd_cliques)

    p = sub.add_parser("itemsets", help="maximal frequent itemsets")
    _common(p)
    p.add_argument("--item-kind", choices=KINDS)
    p.add_argument("--min-support", type=float)
    p.add_argument("--top-k", type=int)
    p.add_argument("--min-size", type=int)
    p.add_argument("--sort", choices=("support", "size"), default="support")
    p.set_defaults(func=cmd_itemsets)

    p = sub.add_parser("relations", help="personal and professional relations for director pairs")
    _common(p)
    p.add_argument("--pairs", help="CSV with header din_1,din_2")
    p.add_argument("--replay", help="replay fixture directory")
    p.add_argument("--live", action="store_true", help="use live search and analysis clients")
    p.add_argument("--profiles", help="directory of director profile JSON files")
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("export", help="GraphML / DOT exports of the projections")
    _common(p)
    p.add_argument("--mode", choices=KINDS)
    p.add_argument("--format", choices=("graphml", "dot", "both"), default="both")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("anonymize", help="write a pseudonymized copy of a dataset")
    _common(p)
    p.add_argument("--key", help=f"anonymization key (or set {ANON_KEY_ENV})")
    p.set_defaults(func=cmd_anonymize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DatasetError, ValueError, KeyError, LookupError, crawler.FetchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
