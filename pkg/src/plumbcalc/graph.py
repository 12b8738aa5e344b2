"""Weighted dual graphs of divisors carrying foliation data.

Vertices are divisor components. Non-compact branches (separatrices,
transverse disks) are ordinary degree-1 vertices with ``compact=False`` so
that valence and dead-branch logic treat every singular point of the
divisor the same way. Edges are the singular points of the divisor; the
Camacho-Sad index stored on an edge is that of its *first* endpoint, the
second endpoint carrying the reciprocal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

from .exact import ExactScalar, IntMatrix, format_scalar, parse_scalar


class EdgeKind(str, Enum):
    LINEARIZABLE = "linearizable"
    RESONANT = "resonant_nonlinearizable"
    NODE = "node"
    SADDLE_NODE = "saddle_node"
    DICRITICAL = "dicritical_contact"
    AUTO = "auto"

    @property
    def token(self) -> str:
        return _KIND_TOKENS_REV[self]


_KIND_TOKENS = {
    "lin": EdgeKind.LINEARIZABLE,
    "res": EdgeKind.RESONANT,
    "node": EdgeKind.NODE,
    "sn": EdgeKind.SADDLE_NODE,
    "dic": EdgeKind.DICRITICAL,
    "auto": EdgeKind.AUTO,
}
_KIND_TOKENS_REV = {v: k for k, v in _KIND_TOKENS.items()}

NON_LINEARIZABLE = frozenset({EdgeKind.RESONANT, EdgeKind.NODE, EdgeKind.SADDLE_NODE})

BRANCH_KINDS = ("none", "isolated_separatrix", "nonisolated_separatrix", "transversal")
_BRANCH_TOKENS = {
    "isolated": "isolated_separatrix",
    "nonisolated": "nonisolated_separatrix",
    "transversal": "transversal",
}
_BRANCH_TOKENS_REV = {v: k for k, v in _BRANCH_TOKENS.items()}

HOLONOMY = ("solvable", "nonsolvable", "unknown")
DISK_HOLONOMY = {"lin": "linearizable", "nonlin": "nonlinearizable", "unknown": "unknown"}
_DISK_HOLONOMY_REV = {v: k for k, v in DISK_HOLONOMY.items()}


class GraphError(ValueError):
    """Base class for malformed or invalid graphs."""


class GraphSyntaxError(GraphError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class GraphInvariantError(GraphError):
    def __init__(self, rule: str, message: str):
        super().__init__(f"[{rule}] {message}")
        self.rule = rule


@dataclass(frozen=True)
class VertexData:
    id: str
    genus: int = 0
    self_intersection: Optional[int] = None
    invariant: bool = True
    compact: bool = True
    in_exceptional: bool = True
    holonomy: str = "unknown"
    disk_holonomy: str = "unknown"
    branch_kind: str = "none"
    meridian: Optional[str] = None

    @property
    def meridian_name(self) -> str:
        return self.meridian or self.id

    @property
    def dicritical(self) -> bool:
        return not self.invariant


@dataclass(frozen=True)
class EdgeData:
    u: str
    v: str
    cs_index: Optional[ExactScalar] = None
    kind: EdgeKind = EdgeKind.AUTO

    @property
    def key(self) -> frozenset:
        return frozenset((self.u, self.v))

    def other(self, x: str) -> str:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise KeyError(x)


@dataclass(frozen=True)
class DualGraph:
    """Immutable dual graph. Build with :func:`build_graph` to get validation."""

    vertices: dict
    edges: tuple
    diagnostics: tuple = field(default=(), compare=False)

    def __hash__(self):
        return hash((tuple(sorted(self.vertices)), self.edges))

    # -- accessors ----------------------------------------------------------
    def vertex(self, vid: str) -> VertexData:
        try:
            return self.vertices[vid]
        except KeyError:
            raise KeyError(f"unknown vertex {vid!r}") from None

    def vertex_ids(self) -> list[str]:
        return sorted(self.vertices)

    def incident(self, vid: str) -> list[EdgeData]:
        self.vertex(vid)
        return [e for e in self.edges if vid in (e.u, e.v)]

    def neighbors(self, vid: str) -> list[str]:
        return sorted(e.other(vid) for e in self.incident(vid))

    def edge_between(self, x: str, y: str) -> Optional[EdgeData]:
        k = frozenset((x, y))
        for e in self.edges:
            if e.key == k:
                return e
        return None

    def compact_ids(self) -> list[str]:
        return [v for v in self.vertex_ids() if self.vertices[v].compact]

    def branch_ids(self) -> list[str]:
        return [v for v in self.vertex_ids() if not self.vertices[v].compact]

    def index_at(self, edge: EdgeData, vid: str) -> Optional[ExactScalar]:
        """Camacho-Sad index of component ``vid`` at the point ``edge``.

        Dicritical contacts contribute 0 on the invariant side and ``None``
        on the dicritical side; unknown indices give ``None``.
        """
        if edge.kind == EdgeKind.DICRITICAL:
            return None if self.vertices[vid].dicritical else ExactScalar(0)
        if edge.cs_index is None:
            return None
        if vid == edge.u:
            return edge.cs_index
        if vid == edge.v:
            return edge.cs_index.inverse()
        raise KeyError(vid)

    def pending_edges(self) -> list[EdgeData]:
        return [e for e in self.edges if e.kind == EdgeKind.AUTO]

    def __iter__(self) -> Iterator[VertexData]:
        return (self.vertices[v] for v in self.vertex_ids())


# ---------------------------------------------------------------------------
# construction and validation


def _resolve_edge(edge: EdgeData, vertices: dict, diagnostics: list) -> EdgeData:
    from .indices import classify_singularity, ReducednessError

    du, dv = vertices[edge.u].dicritical, vertices[edge.v].dicritical
    if edge.kind == EdgeKind.AUTO and (du or dv):
        return replace(edge, kind=EdgeKind.DICRITICAL, cs_index=None)
    if edge.kind == EdgeKind.AUTO:
        if edge.cs_index is None:
            diagnostics.append(f"edge {edge.u}-{edge.v}: kind pending (index unknown)")
            return edge
        try:
            cls = classify_singularity(edge.cs_index, EdgeKind.AUTO)
        except ReducednessError as exc:
            raise GraphInvariantError("reduced", f"edge {edge.u}-{edge.v}: {exc}") from None
        if cls.kind is None:
            diagnostics.append(f"edge {edge.u}-{edge.v}: {cls.note}")
            return edge
        return replace(edge, kind=cls.kind)
    return edge


def _check_edge(edge: EdgeData, vertices: dict) -> None:
    name = f"edge {edge.u}-{edge.v}"
    du, dv = vertices[edge.u].dicritical, vertices[edge.v].dicritical
    cs = edge.cs_index
    if edge.kind == EdgeKind.DICRITICAL:
        if du == dv:
            raise GraphInvariantError(
                "dicritical-contact", f"{name}: exactly one endpoint must be dicritical"
            )
        if cs is not None and not cs.is_zero():
            raise GraphInvariantError(
                "dicritical-contact", f"{name}: invariant-side index must be 0"
            )
        return
    if du or dv:
        raise GraphInvariantError(
            "dicritical-vertex", f"{name}: edges at a dicritical component must be kind=dic"
        )
    if cs is None:
        return
    if cs.is_rational() and cs.sign() > 0:
        raise GraphInvariantError("reduced", f"{name}: index {cs} in Q_>0 violates reducedness")
    if cs.is_zero() and edge.kind != EdgeKind.SADDLE_NODE:
        raise GraphInvariantError("reduced", f"{name}: index 0 only allowed for saddle-nodes")
    if edge.kind == EdgeKind.NODE and not (cs.sign() > 0 and not cs.is_rational()):
        raise GraphInvariantError("node", f"{name}: node requires a positive irrational index")
    if edge.kind == EdgeKind.RESONANT and not (cs.is_rational() and cs.sign() < 0):
        raise GraphInvariantError("resonant", f"{name}: resonant requires an index in Q_<0")


def build_graph(vertices: Iterable[VertexData], edges: Iterable[EdgeData]) -> DualGraph:
    """Validate and assemble a :class:`DualGraph`; ``auto`` edges are classified."""
    vmap: dict[str, VertexData] = {}
    for v in vertices:
        if v.id in vmap:
            raise GraphInvariantError("unique-vertex", f"duplicate vertex {v.id!r}")
        vmap[v.id] = v
    if not vmap:
        raise GraphInvariantError("nonempty", "no vertices")
    for v in vmap.values():
        if v.genus < 0:
            raise GraphInvariantError("genus", f"vertex {v.id}: negative genus")
        if v.compact and v.self_intersection is None:
            raise GraphInvariantError("self", f"vertex {v.id}: compact vertex needs self=")
        if not v.compact:
            if v.self_intersection is not None or v.genus != 0:
                raise GraphInvariantError(
                    "noncompact", f"vertex {v.id}: branches carry no self-intersection or genus"
                )
            if v.branch_kind == "none":
                raise GraphInvariantError("noncompact", f"vertex {v.id}: branch kind missing")
        elif v.branch_kind != "none":
            raise GraphInvariantError("noncompact", f"vertex {v.id}: compact vertex with branch kind")

    seen = set()
    diagnostics: list[str] = []
    checked = []
    for e in edges:
        for x in (e.u, e.v):
            if x not in vmap:
                raise GraphInvariantError("edge-endpoint", f"edge {e.u}-{e.v}: unknown vertex {x!r}")
        if e.u == e.v:
            raise GraphInvariantError("no-loop", f"self-loop at {e.u}")
        if e.key in seen:
            raise GraphInvariantError(
                "simple", f"second edge between {e.u} and {e.v} (components meet in one point)"
            )
        seen.add(e.key)
        e = _resolve_edge(e, vmap, diagnostics)
        _check_edge(e, vmap)
        if e.kind == EdgeKind.DICRITICAL:
            e = replace(e, cs_index=None)
        checked.append(e)

    g = DualGraph(vmap, tuple(checked), tuple(diagnostics))
    for b in g.branch_ids():
        nb = g.neighbors(b)
        if len(nb) != 1:
            raise GraphInvariantError("branch-degree", f"branch {b} must meet exactly one component")
        if not g.vertices[nb[0]].compact:
            raise GraphInvariantError("branch-attach", f"branch {b} must attach to a compact component")
    comp = g.compact_ids()
    if comp and not _connected(g, comp):
        raise GraphInvariantError("connected", "compact part is not connected")
    return g


def _connected(g: DualGraph, ids: Sequence[str]) -> bool:
    idset = set(ids)
    start = ids[0]
    stack, seen = [start], {start}
    while stack:
        x = stack.pop()
        for y in g.neighbors(x):
            if y in idset and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen == idset


# ---------------------------------------------------------------------------
# text format

_TOKEN_RE = re.compile(r"\S+")
_ID_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.']*$")


def _tokens(line: str):
    code = line.split("#", 1)[0]
    return [(m.group(0), m.start() + 1) for m in _TOKEN_RE.finditer(code)]


def _int_value(tok: str, col: int, lineno: int, key: str) -> int:
    try:
        return int(tok.split("=", 1)[1])
    except ValueError:
        raise GraphSyntaxError(f"{key}= expects an integer", lineno, col) from None


def _parse_vertex(toks, lineno):
    if len(toks) < 2:
        raise GraphSyntaxError("vertex needs an id", lineno, toks[0][1])
    vid, col = toks[1]
    if not _ID_RE.match(vid):
        raise GraphSyntaxError(f"bad vertex id {vid!r}", lineno, col)
    attrs = dict(id=vid)
    noncompact = False
    for tok, col in toks[2:]:
        if tok.startswith("genus="):
            attrs["genus"] = _int_value(tok, col, lineno, "genus")
        elif tok.startswith("self="):
            attrs["self_intersection"] = _int_value(tok, col, lineno, "self")
        elif tok == "dicritical":
            attrs["invariant"] = False
        elif tok == "noncompact":
            noncompact = True
        elif tok.startswith("kind="):
            k = tok[5:]
            if k not in _BRANCH_TOKENS:
                raise GraphSyntaxError(f"unknown branch kind {k!r}", lineno, col)
            attrs["branch_kind"] = _BRANCH_TOKENS[k]
        elif tok == "strict":
            attrs["in_exceptional"] = False
        elif tok.startswith("holonomy="):
            h = tok[9:]
            if h not in HOLONOMY:
                raise GraphSyntaxError(f"unknown holonomy {h!r}", lineno, col)
            attrs["holonomy"] = h
        elif tok.startswith("diskholonomy="):
            h = tok[13:]
            if h not in DISK_HOLONOMY:
                raise GraphSyntaxError(f"unknown disk holonomy {h!r}", lineno, col)
            attrs["disk_holonomy"] = DISK_HOLONOMY[h]
        elif tok.startswith("meridian="):
            name = tok[9:]
            if not _ID_RE.match(name):
                raise GraphSyntaxError(f"bad meridian name {name!r}", lineno, col)
            attrs["meridian"] = name
        else:
            raise GraphSyntaxError(f"unexpected token {tok!r}", lineno, col)
    if "branch_kind" in attrs and not noncompact:
        raise GraphSyntaxError("kind= is only valid after noncompact", lineno, toks[0][1])
    if noncompact:
        attrs["compact"] = False
        attrs["in_exceptional"] = False
        if "branch_kind" not in attrs:
            raise GraphSyntaxError("noncompact vertex needs kind=", lineno, toks[0][1])
    return VertexData(**attrs)


def _parse_edge(toks, lineno):
    if len(toks) < 3:
        raise GraphSyntaxError("edge needs two endpoints", lineno, toks[0][1])
    (u, cu), (v, cv) = toks[1], toks[2]
    for name, col in ((u, cu), (v, cv)):
        if not _ID_RE.match(name):
            raise GraphSyntaxError(f"bad vertex id {name!r}", lineno, col)
    cs = None
    kind = EdgeKind.AUTO
    for tok, col in toks[3:]:
        if tok.startswith("cs="):
            val = tok[3:]
            if val != "unknown":
                try:
                    cs = parse_scalar(val)
                except ValueError as exc:
                    raise GraphSyntaxError(str(exc), lineno, col + 3) from None
        elif tok.startswith("kind="):
            k = tok[5:]
            if k not in _KIND_TOKENS:
                raise GraphSyntaxError(f"unknown edge kind {k!r}", lineno, col)
            kind = _KIND_TOKENS[k]
        else:
            raise GraphSyntaxError(f"unexpected token {tok!r}", lineno, col)
    return EdgeData(u, v, cs, kind)


def parse_graph(text: str) -> DualGraph:
    vertices, edges = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        head, col = toks[0]
        if head == "vertex":
            vertices.append(_parse_vertex(toks, lineno))
        elif head == "edge":
            edges.append(_parse_edge(toks, lineno))
        else:
            raise GraphSyntaxError(f"expected 'vertex' or 'edge', got {head!r}", lineno, col)
    return build_graph(vertices, edges)


def serialize_graph(g: DualGraph) -> str:
    lines = []
    for v in g:
        parts = ["vertex", v.id, f"genus={v.genus}"]
        if v.compact:
            parts.append(f"self={v.self_intersection}")
        if v.dicritical:
            parts.append("dicritical")
        if not v.compact:
            parts += ["noncompact", f"kind={_BRANCH_TOKENS_REV[v.branch_kind]}"]
        elif not v.in_exceptional:
            parts.append("strict")
        if v.holonomy != "unknown":
            parts.append(f"holonomy={v.holonomy}")
        if v.disk_holonomy != "unknown":
            parts.append(f"diskholonomy={_DISK_HOLONOMY_REV[v.disk_holonomy]}")
        if v.meridian:
            parts.append(f"meridian={v.meridian}")
        lines.append(" ".join(parts))
    for e in g.edges:
        parts = ["edge", e.u, e.v]
        if e.kind != EdgeKind.DICRITICAL:
            parts.append("cs=" + (format_scalar(e.cs_index) if e.cs_index is not None else "unknown"))
        parts.append(f"kind={e.kind.token}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# divisor selection


def select_divisor(g: DualGraph, divisor=None) -> frozenset:
    """Resolve a divisor selector to the set of vertex ids it contains.

    ``None`` or ``"all"`` selects the whole graph. Otherwise the compact
    part is always included and each token adds branches: ``C`` (nothing
    extra), ``CS`` (every isolated separatrix) or an explicit branch id.
    """
    if divisor is None:
        return frozenset(g.vertices)
    if isinstance(divisor, str):
        divisor = divisor.split()
    chosen = set(g.compact_ids())
    for tok in divisor:
        if tok == "all":
            return frozenset(g.vertices)
        if tok == "C":
            continue
        if tok == "CS":
            chosen.update(b for b in g.branch_ids() if g.vertices[b].branch_kind == "isolated_separatrix")
        elif tok in g.vertices:
            chosen.add(tok)
        else:
            raise KeyError(f"unknown divisor token {tok!r}")
    return frozenset(chosen)


def restrict(g: DualGraph, divisor=None) -> DualGraph:
    """The sub-graph of the selected divisor (unselected branches dropped)."""
    keep = select_divisor(g, divisor)
    if keep == frozenset(g.vertices):
        return g
    verts = {k: v for k, v in g.vertices.items() if k in keep}
    edges = tuple(e for e in g.edges if e.u in keep and e.v in keep)
    return DualGraph(verts, edges, g.diagnostics)


# ---------------------------------------------------------------------------
# graph-theoretic derivations


def valence(g: DualGraph, v: str, relative_to=None) -> int:
    d = restrict(g, relative_to)
    if v not in d.vertices:
        if v in g.vertices:
            raise KeyError(f"vertex {v!r} not in the selected divisor")
        raise KeyError(f"unknown vertex {v!r}")
    return len(d.incident(v))


@dataclass(frozen=True)
class DeadBranch:
    chain: tuple  # free end first
    attach_vertex: str

    @property
    def last(self) -> str:
        return self.chain[-1]


def find_dead_branches(g: DualGraph, relative_to=None) -> list[DeadBranch]:
    """Maximal genus-0 compact chains ending in a valence-1 component.

    The chain must be attached to a component of valence at least 2; a
    divisor that is itself a bare chain therefore has no dead branch.
    """
    d = restrict(g, relative_to)
    val = {v: len(d.incident(v)) for v in d.vertices}

    def chainable(x):
        vx = d.vertices[x]
        return vx.compact and vx.genus == 0

    out = []
    for start in d.vertex_ids():
        if not (chainable(start) and val[start] == 1):
            continue
        chain = [start]
        prev, cur = None, start
        while True:
            nxt = [y for y in d.neighbors(cur) if y != prev]
            if len(nxt) != 1:
                nxt = None
                break
            nxt = nxt[0]
            if chainable(nxt) and val[nxt] == 2:
                chain.append(nxt)
                prev, cur = cur, nxt
                continue
            break
        if nxt is None or val[nxt] < 2:
            continue
        out.append(DeadBranch(tuple(chain), nxt))
    out.sort(key=lambda b: min(b.chain))
    return out


def dead_branch_vertices(branches: Iterable[DeadBranch]) -> frozenset:
    return frozenset(v for b in branches for v in b.chain)


def intersection_matrix(g: DualGraph, vertices: Sequence[str]) -> IntMatrix:
    rows = []
    for x in vertices:
        vx = g.vertex(x)
        if not vx.compact:
            raise ValueError(f"vertex {x} is not compact")
        row = []
        for y in vertices:
            if x == y:
                row.append(vx.self_intersection)
            else:
                row.append(1 if g.edge_between(x, y) is not None else 0)
        rows.append(row)
    return IntMatrix(rows)


@dataclass(frozen=True)
class Contraction:
    vertex: str
    valence: int
    neighbors: tuple
    applied: bool
    reason: str = ""


def _blowdown_candidates(g: DualGraph, refused: set) -> list[str]:
    out = []
    for v in g:
        if v.id in refused:
            continue
        if v.invariant and v.compact and v.genus == 0 and v.self_intersection == -1:
            if len(g.incident(v.id)) <= 2:
                out.append(v.id)
    return out


def normalize_blow_down(g: DualGraph) -> tuple[DualGraph, list[Contraction]]:
    """Contract invariant rational (-1)-components of valence <= 2.

    Weight updates follow the plumbing calculus. A contraction that would
    join two adjacent components, strand a branch, or empty the divisor is
    refused and logged instead.
    """
    log: list[Contraction] = []
    refused: set[str] = set()
    verts = dict(g.vertices)
    edges = list(g.edges)
    cur = g
    while True:
        cands = _blowdown_candidates(cur, refused)
        if not cands:
            break
        x = cands[0]
        nbrs = tuple(cur.neighbors(x))
        reason = ""
        if len(nbrs) == 0 and len(verts) == 1:
            reason = "would empty the divisor"
        elif len(nbrs) == 1 and not verts[nbrs[0]].compact:
            reason = f"would strand branch {nbrs[0]}"
        elif len(nbrs) == 2 and cur.edge_between(*nbrs) is not None:
            reason = f"would create a double edge between {nbrs[0]} and {nbrs[1]}"
        elif len(nbrs) == 2 and not verts[nbrs[0]].compact and not verts[nbrs[1]].compact:
            reason = "would join two branches"
        elif len(nbrs) == 2 and verts[nbrs[0]].dicritical and verts[nbrs[1]].dicritical:
            reason = "would join two dicritical components"
        if reason:
            refused.add(x)
            log.append(Contraction(x, len(nbrs), nbrs, False, reason))
            continue
        del verts[x]
        edges = [e for e in edges if x not in (e.u, e.v)]
        for n in nbrs:
            vn = verts[n]
            if vn.compact:
                verts[n] = replace(vn, self_intersection=vn.self_intersection + 1)
        if len(nbrs) == 2:
            a, b = nbrs
            kind = EdgeKind.AUTO
            edges.append(EdgeData(a, b, None, kind))
        log.append(Contraction(x, len(nbrs), nbrs, True))
        refused.clear()  # earlier refusals may no longer apply
        cur = build_graph(verts.values(), edges)
        verts, edges = dict(cur.vertices), list(cur.edges)
    return cur, log
