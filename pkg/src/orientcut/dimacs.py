"""DIMACS graph-coloring format reader.

The `.col` grammar: `c` lines are comments, exactly one `p edge <n> <m>`
header precedes the edge list, and each `e <u> <v>` line names one edge with
1-based endpoints. Repeated edges, in either direction, collapse to one; the
declared edge count is not checked against the deduplicated list since files
in circulation routinely disagree with themselves there.
"""

from __future__ import annotations

from typing import List, Tuple

from .errors import ParseError
from .graphs import UndirectedGraph


def parse_dimacs(text: str) -> UndirectedGraph:
    """Parse `.col` text into a graph; errors carry the offending line number."""
    n = None
    edges: List[Tuple[int, int]] = []
    seen = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[0] == "p":
            if n is not None:
                raise ParseError(line_no, "second problem line")
            if len(fields) != 4 or fields[1] != "edge":
                raise ParseError(line_no, f"expected 'p edge <n> <m>', got {line!r}")
            try:
                n = int(fields[2])
                declared_m = int(fields[3])
            except ValueError:
                raise ParseError(line_no, "problem line sizes must be integers") from None
            if n < 1 or declared_m < 0:
                raise ParseError(line_no, f"bad sizes n={n} m={declared_m}")
        elif fields[0] == "e":
            if n is None:
                raise ParseError(line_no, "edge before the problem line")
            if len(fields) != 3:
                raise ParseError(line_no, f"expected 'e <u> <v>', got {line!r}")
            try:
                u, v = int(fields[1]), int(fields[2])
            except ValueError:
                raise ParseError(line_no, "edge endpoints must be integers") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(line_no, f"endpoint outside 1..{n}")
            if u == v:
                raise ParseError(line_no, f"loop edge at vertex {u}")
            key = (min(u, v) - 1, max(u, v) - 1)
            if key not in seen:
                seen.add(key)
                edges.append(key)
        else:
            raise ParseError(line_no, f"unknown line type {fields[0]!r}")
    if n is None:
        raise ParseError(1, "missing problem line")
    return UndirectedGraph(n, edges)
