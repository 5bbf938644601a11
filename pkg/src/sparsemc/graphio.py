"""Plain-text graph files.

Format::

    # optional comments
    graph <n> <m> <l>
    e <u> <v>          (m lines, 1-based, u != v, each pair at most once)
    label <k> <v>      (vertex v carries label k, 1 <= k <= l)

The writer emits edges sorted by (min, max) endpoint and label lines
sorted by (k, v), so write → read → write is byte-stable.
"""

from __future__ import annotations

from .graphs import Graph, LabeledGraph


class GraphFormatError(ValueError):
    """Malformed graph file; message carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_graph(text: str) -> LabeledGraph:
    n = m = l = None
    header_line = 0
    edges: list[tuple[int, int]] = []
    edge_keys: set[tuple[int, int]] = set()
    label_members: list[set[int]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if parts[0] != "graph" or len(parts) != 4:
                raise GraphFormatError(line_no, "expected header 'graph <n> <m> <l>'")
            try:
                n, m, l = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise GraphFormatError(line_no, "header fields must be integers") from None
            if n < 0 or m < 0 or l < 0:
                raise GraphFormatError(line_no, "header fields must be nonnegative")
            header_line = line_no
            label_members = [set() for _ in range(l)]
            continue
        if parts[0] == "e":
            if len(parts) != 3:
                raise GraphFormatError(line_no, "expected 'e <u> <v>'")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError(line_no, "edge endpoints must be integers") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(line_no, f"edge ({u},{v}) out of range 1..{n}")
            if u == v:
                raise GraphFormatError(line_no, f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in edge_keys:
                raise GraphFormatError(line_no, f"duplicate edge ({u},{v})")
            edge_keys.add(key)
            edges.append((u, v))
        elif parts[0] == "label":
            if len(parts) != 3:
                raise GraphFormatError(line_no, "expected 'label <k> <v>'")
            try:
                k, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError(line_no, "label fields must be integers") from None
            if not (1 <= k <= l):
                raise GraphFormatError(line_no, f"label index {k} out of range 1..{l}")
            if not (1 <= v <= n):
                raise GraphFormatError(line_no, f"label vertex {v} out of range 1..{n}")
            label_members[k - 1].add(v)
        else:
            raise GraphFormatError(line_no, f"unknown record '{parts[0]}'")
    if n is None:
        raise GraphFormatError(1, "missing 'graph <n> <m> <l>' header")
    if len(edges) != m:
        raise GraphFormatError(header_line, f"header declares m={m} but file has {len(edges)} edges")
    return LabeledGraph(Graph(n, edges), label_members)


def format_graph(g: LabeledGraph, comments=()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"graph {g.n} {g.m} {g.num_labels}")
    for u, v in sorted(g.edges()):
        lines.append(f"e {u} {v}")
    for k, cls in enumerate(g.labels, start=1):
        for v in sorted(cls):
            lines.append(f"label {k} {v}")
    return "\n".join(lines) + "\n"


def read_graph(path) -> LabeledGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(path, g: LabeledGraph, comments=()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g, comments))
