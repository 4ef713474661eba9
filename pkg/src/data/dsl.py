"""Text format for graph self-maps.

A map file declares a graph and one map on it::

    # Fibonacci
    edges: a, b
    map f: a -> a b; b -> a
    fixed-vertex: v

Graphs other than roses list their vertices and the endpoints of every
edge::

    vertices: u, w
    edges: a, b, c
    edge a: u -> w
    edge b: w -> u
    edge c: u -> u

Rules are ``letter -> letters`` separated by ``;`` or line breaks; image
letters may be written apart or concatenated, an upper-case letter is the
inverse of the declared lower-case edge.  ``#`` starts a comment.  Without
``vertices:`` the graph is a rose whose vertex is called ``v``.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from src.data.schemas import MapFile
from src.errors import DslSyntaxError, UndeclaredLetterError
from src.model.graph import Graph
from src.model.graph_map import GraphMap

__all__ = ["parse_map_file", "load_map_file", "format_map_file"]

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"(edges|vertices|edge|map|fixed-vertex)\b")
_EDGE_NAME = re.compile(r"[a-z][0-9]*")
_LETTER = re.compile(r"[A-Za-z][0-9]*")
_VERTEX = re.compile(r"[A-Za-z0-9_.]+")
_RULE = re.compile(r"\s*([^\s-]+)\s*->")
_ENDS = re.compile(r"\s*(\S+)\s*->\s*(\S+)\s*$")

Located = Tuple[str, int, int]


@dataclass
class _Declarations:
    edges: List[Located] = field(default_factory=list)
    vertices: Optional[List[Located]] = None
    ends: Dict[str, Tuple[Located, Located, int, int]] = field(default_factory=dict)
    map_name: Optional[Located] = None
    rules: List[Located] = field(default_factory=list)
    fixed: Optional[Located] = None


def _names(text: str, line: int, offset: int, pattern: re.Pattern, what: str) -> List[Located]:
    out: List[Located] = []
    col = offset
    for chunk in text.split(","):
        stripped = chunk.strip()
        start = col + (len(chunk) - len(chunk.lstrip()))
        if not pattern.fullmatch(stripped):
            raise DslSyntaxError(f"invalid {what} {stripped!r}", line, start + 1)
        out.append((stripped, line, start + 1))
        col += len(chunk) + 1
    return out


def _scan(text: str) -> _Declarations:
    decl = _Declarations()
    in_map = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        indent = len(body) - len(body.lstrip())
        head = _HEADER.match(body, indent)
        if head is None:
            if not in_map:
                raise DslSyntaxError(f"unexpected text {body.strip()!r}", lineno, indent + 1)
            decl.rules.append((body, lineno, 0))
            continue
        in_map = False
        keyword = head.group(1)
        colon = body.find(":", head.end())
        if colon < 0:
            raise DslSyntaxError(f"expected ':' after {keyword!r}", lineno, head.end() + 1)
        label = body[head.end() : colon].strip()
        rest, offset = body[colon + 1 :], colon + 1
        if keyword in ("edges", "vertices", "fixed-vertex") and label:
            raise DslSyntaxError(f"unexpected {label!r} before ':'", lineno, head.end() + 2)
        if keyword == "edges":
            if decl.edges:
                raise DslSyntaxError("edges declared twice", lineno, indent + 1)
            decl.edges = _names(rest, lineno, offset, _EDGE_NAME, "edge name")
        elif keyword == "vertices":
            if decl.vertices is not None:
                raise DslSyntaxError("vertices declared twice", lineno, indent + 1)
            decl.vertices = _names(rest, lineno, offset, _VERTEX, "vertex name")
        elif keyword == "edge":
            if not _EDGE_NAME.fullmatch(label):
                raise DslSyntaxError(f"invalid edge name {label!r}", lineno, head.end() + 2)
            m = _ENDS.match(rest)
            if m is None:
                raise DslSyntaxError("expected 'u -> v'", lineno, offset + 1)
            u = (m.group(1), lineno, offset + m.start(1) + 1)
            v = (m.group(2), lineno, offset + m.start(2) + 1)
            decl.ends[label] = (u, v, lineno, indent + 1)
        elif keyword == "map":
            if decl.map_name is not None:
                raise DslSyntaxError("a map file holds exactly one map", lineno, indent + 1)
            if not label:
                raise DslSyntaxError("map needs a name", lineno, head.end() + 1)
            decl.map_name = (label, lineno, indent + 1)
            decl.rules.append((rest, lineno, offset))
            in_map = True
        else:
            name = rest.strip()
            if not _VERTEX.fullmatch(name):
                raise DslSyntaxError(f"invalid vertex name {name!r}", lineno, offset + 1)
            decl.fixed = (name, lineno, offset + len(rest) - len(rest.lstrip()) + 1)
    return decl


def _graph(decl: _Declarations) -> Graph:
    names = [n for n, _, _ in decl.edges]
    declared = set(names)
    for seen, (name, line, col) in enumerate(decl.edges):
        if name in names[:seen]:
            raise DslSyntaxError(f"edge {name!r} declared twice", line, col)
    for label, (_, _, line, col) in decl.ends.items():
        if label not in declared:
            raise UndeclaredLetterError(label, line, col)
    if decl.vertices is None:
        if decl.ends:
            first = next(iter(decl.ends.values()))
            raise DslSyntaxError("edge endpoints need a 'vertices:' declaration", first[2], first[3])
        return Graph.rose(names)
    vertices = [v for v, _, _ in decl.vertices]
    if len(set(vertices)) != len(vertices):
        _, line, col = decl.vertices[0]
        raise DslSyntaxError("vertex names must be unique", line, col)
    tails, heads = [], []
    for name, line, col in decl.edges:
        if name in decl.ends:
            u, v, _, _ = decl.ends[name]
            for vname, vl, vc in (u, v):
                if vname not in vertices:
                    raise DslSyntaxError(f"unknown vertex {vname!r}", vl, vc)
            tails.append(vertices.index(u[0]))
            heads.append(vertices.index(v[0]))
        elif len(vertices) == 1:
            tails.append(0)
            heads.append(0)
        else:
            raise DslSyntaxError(f"edge {name!r} needs 'edge {name}: u -> v'", line, col)
    return Graph(tuple(vertices), tuple(names), tuple(tails), tuple(heads))


def _rules(decl: _Declarations, graph: Graph, header: Located) -> List[Tuple[int, ...]]:
    images: Dict[str, Tuple[int, ...]] = {}
    for text, line, offset in decl.rules:
        col = offset
        for piece in text.split(";"):
            start = col
            col += len(piece) + 1
            if not piece.strip():
                continue
            m = _RULE.match(piece)
            lead = start + len(piece) - len(piece.lstrip()) + 1
            if m is None:
                raise DslSyntaxError("expected 'letter -> letters'", line, lead)
            letter, lcol = m.group(1), start + m.start(1) + 1
            if not _LETTER.fullmatch(letter):
                raise DslSyntaxError(f"invalid letter {letter!r}", line, lcol)
            if letter.lower() != letter:
                raise DslSyntaxError(f"rule must define a lower-case letter, got {letter!r}", line, lcol)
            if letter not in graph.edge_names:
                raise UndeclaredLetterError(letter, line, lcol)
            if letter in images:
                raise DslSyntaxError(f"second rule for {letter!r}", line, lcol)
            word: List[int] = []
            pos = m.end()
            while pos < len(piece):
                if piece[pos].isspace():
                    pos += 1
                    continue
                tok = _LETTER.match(piece, pos)
                if tok is None:
                    raise DslSyntaxError(f"unexpected character {piece[pos]!r}", line, start + pos + 1)
                if tok.group().lower() not in graph.edge_names:
                    raise UndeclaredLetterError(tok.group(), line, start + pos + 1)
                word.append(graph.edge_id(tok.group()))
                pos = tok.end()
            if not word:
                raise DslSyntaxError(f"empty image for {letter!r}", line, lcol)
            images[letter] = tuple(word)
    _, line, col = header
    missing = [n for n in graph.edge_names if n not in images]
    if missing:
        raise DslSyntaxError(f"no image for {', '.join(missing)}", line, col)
    return [images[n] for n in graph.edge_names]


def parse_map_file(text: str, source: Optional[Path] = None) -> MapFile:
    """Parse map file text.

    Raises
    ------
    DslSyntaxError
        Malformed text, with 1-based line and column.
    UndeclaredLetterError
        A letter that is not a declared edge.
    IrregularMapError, NonComposablePathError
        Images that do not define a regular graph map.
    """
    decl = _scan(text)
    if not decl.edges:
        raise DslSyntaxError("missing 'edges:' declaration", 1, 1)
    if decl.map_name is None:
        raise DslSyntaxError("missing 'map <name>:' declaration", max(1, len(text.splitlines())), 1)
    graph = _graph(decl)
    f = GraphMap.from_positive(graph, _rules(decl, graph, decl.map_name))
    fixed = None
    if decl.fixed is not None:
        fixed, line, col = decl.fixed
        if fixed not in graph.vertices:
            raise DslSyntaxError(f"unknown vertex {fixed!r}", line, col)
    return MapFile(graph, f, decl.map_name[0], fixed, source)


def load_map_file(path: Union[str, Path]) -> MapFile:
    path = Path(path)
    mf = parse_map_file(path.read_text(encoding="utf-8"), source=path)
    logger.info("Loaded map %s from %s (%d edges)", mf.name, path, len(mf.graph.edge_names))
    return mf


def format_map_file(f: GraphMap, name: str = "f", fixed_vertex: Optional[str] = None, comment: str = "") -> str:
    """Render ``f`` in the map file format; parsing the text gives ``f`` back."""
    g = f.graph
    lines = [f"# {row}" for row in comment.splitlines()]
    lines.append("edges: " + ", ".join(g.edge_names))
    if not (g.is_rose and g.vertices == ("v",)):
        lines.append("vertices: " + ", ".join(g.vertices))
        for k, ename in enumerate(g.edge_names):
            lines.append(f"edge {ename}: {g.vertices[g.tails[k]]} -> {g.vertices[g.heads[k]]}")
    rules = [f"  {g.name(e)} -> {' '.join(g.name(x) for x in f.images[e])}" for e in g.positive_edges]
    lines.append(f"map {name}:")
    lines.append(";\n".join(rules))
    if fixed_vertex is not None:
        lines.append(f"fixed-vertex: {fixed_vertex}")
    return "\n".join(lines) + "\n"
