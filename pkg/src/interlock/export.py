"""GraphML / DOT writers for projection graphs and CSV path tables."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable
from xml.sax.saxutils import escape, quoteattr

from .projection import IndirectConnection, ProjectionGraph

PATH_TABLE_HEADER = ["u", "v", "degree", "path_count", "truncated"]
PATHS_HEADER = ["u", "v", "hops", "path"]
EDGE_TABLE_HEADER = ["u", "v", "weight", "shared"]


def write_graphml(projection: ProjectionGraph, path) -> Path:
    path = Path(path)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="mode" for="node" attr.name="mode" attr.type="string"/>',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="int"/>',
        '  <key id="shared" for="edge" attr.name="shared" attr.type="string"/>',
        f'  <graph id={quoteattr(projection.mode)} edgedefault="undirected">',
    ]
    for n in projection.nodes:
        lines.append(f"    <node id={quoteattr(n)}>")
        lines.append(f'      <data key="mode">{escape(projection.mode)}</data>')
        lines.append("    </node>")
    for u, v, w, shared in projection.edge_list():
        lines.append(f"    <edge source={quoteattr(u)} target={quoteattr(v)}>")
        lines.append(f'      <data key="weight">{w}</data>')
        lines.append(f'      <data key="shared">{escape(";".join(shared))}</data>')
        lines.append("    </edge>")
    lines += ["  </graph>", "</graphml>", ""]
    path.write_text("\n".join(lines), encoding="utf-8")
    return path


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_dot(projection: ProjectionGraph, path) -> Path:
    path = Path(path)
    lines = [f"graph {_dot_id(projection.mode)} {{"]
    for n in projection.nodes:
        lines.append(f"  {_dot_id(n)} [mode={_dot_id(projection.mode)}];")
    for u, v, w, shared in projection.edge_list():
        lines.append(
            f"  {_dot_id(u)} -- {_dot_id(v)} [weight={w}, shared={_dot_id(';'.join(shared))}];"
        )
    lines += ["}", ""]
    path.write_text("\n".join(lines), encoding="utf-8")
    return path


def _csv(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_edge_table(projection: ProjectionGraph, path) -> Path:
    return _csv(path, EDGE_TABLE_HEADER,
                ([u, v, w, ";".join(s)] for u, v, w, s in projection.edge_list()))


def write_path_table(connections: Iterable[IndirectConnection], path) -> Path:
    rows = (
        [c.pair[0], c.pair[1], c.connection_degree, c.path_count, str(c.truncated).lower()]
        for c in connections
    )
    return _csv(path, PATH_TABLE_HEADER, rows)


def write_paths(connections: Iterable[IndirectConnection], path) -> Path:
    rows = (
        [c.pair[0], c.pair[1], len(p) - 1, " > ".join(p)]
        for c in connections
        for p in c.paths
    )
    return _csv(path, PATHS_HEADER, rows)


def write_csv(path, header, rows) -> Path:
    return _csv(path, header, rows)
