"""Structural conditions and block decompositions of a foliated divisor.

Every check returns a three-valued :class:`Verdict` so that unknown
analytic attributes never get silently assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from .graph import (
    DeadBranch,
    DualGraph,
    EdgeData,
    EdgeKind,
    dead_branch_vertices,
    find_dead_branches,
    restrict,
)
from .indices import branch_invariants, dead_branch_pq

HOLDS, FAILS, UNDETERMINED = "holds", "fails", "undetermined"


class UnresolvedKindError(ValueError):
    pass


class NotAdaptedError(ValueError):
    def __init__(self, report: "AdaptedReport"):
        bad = [k for k, v in report.conditions.items() if v.status == FAILS]
        super().__init__(f"divisor is not adapted: condition(s) {', '.join(bad)} fail")
        self.report = report


def edge_label(e: EdgeData) -> str:
    return f"{e.u}-{e.v}"


@dataclass(frozen=True)
class Verdict:
    status: str
    witnesses: tuple = ()
    notes: tuple = ()

    @classmethod
    def combine(cls, failing: list, pending: list, notes=()) -> "Verdict":
        if failing:
            return cls(FAILS, tuple(failing), tuple(notes))
        if pending:
            return cls(UNDETERMINED, tuple(pending), tuple(notes))
        return cls(HOLDS, (), tuple(notes))

    def to_dict(self) -> dict:
        return {"status": self.status, "witnesses": list(self.witnesses), "notes": list(self.notes)}


def _require_resolved(d: DualGraph) -> None:
    pending = [edge_label(e) for e in d.edges if e.kind == EdgeKind.AUTO]
    if pending:
        raise UnresolvedKindError(f"unresolved edge kind on {', '.join(pending)}")


def _nx_graph(vertices, edges) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(sorted(vertices))
    h.add_edges_from((e.u, e.v) for e in edges)
    return h


def _sorted_components(h: nx.Graph) -> tuple:
    comps = [frozenset(c) for c in nx.connected_components(h)]
    return tuple(sorted(comps, key=lambda c: min(c)))


# ---------------------------------------------------------------------------
# break graph and cut divisor


@dataclass(frozen=True)
class BreakGraph:
    vertices: frozenset
    edges: tuple
    removed: tuple  # (element, reason)

    def graph(self) -> nx.Graph:
        return _nx_graph(self.vertices, self.edges)

    def components(self) -> tuple:
        return _sorted_components(self.graph())


def break_graph(g: DualGraph, divisor=None) -> BreakGraph:
    d = restrict(g, divisor)
    _require_resolved(d)
    removed = []
    keep = set()
    for v in d:
        if v.dicritical:
            removed.append((v.id, "dicritical component"))
        else:
            keep.add(v.id)
    edges = []
    for e in d.edges:
        if e.u not in keep or e.v not in keep:
            dic = e.u if e.u not in keep else e.v
            removed.append((edge_label(e), f"incident to dicritical {dic}"))
        elif e.kind == EdgeKind.LINEARIZABLE:
            removed.append((edge_label(e), "linearizable singularity"))
        else:
            edges.append(e)
    return BreakGraph(frozenset(keep), tuple(edges), tuple(removed))


@dataclass(frozen=True)
class CutDivisor:
    components: tuple


def cut_divisor(g: DualGraph, divisor=None) -> CutDivisor:
    d = restrict(g, divisor)
    _require_resolved(d)
    keep = {v.id for v in d if not v.dicritical}
    edges = [
        e for e in d.edges if e.u in keep and e.v in keep and e.kind != EdgeKind.NODE
    ]
    return CutDivisor(_sorted_components(_nx_graph(keep, edges)))


# ---------------------------------------------------------------------------
# initial components


@dataclass(frozen=True)
class InitialComponent:
    vertex: str
    case: str  # "a" or "b"
    p0: Optional[str] = None


@dataclass(frozen=True)
class InitialReport:
    components: tuple
    undetermined: tuple

    def ids(self) -> frozenset:
        return frozenset(c.vertex for c in self.components)


def initial_components(g: DualGraph, divisor=None) -> InitialReport:
    d = restrict(g, divisor)
    _require_resolved(d)
    branches = find_dead_branches(d)
    dead = dead_branch_vertices(branches)
    found, pending = [], []
    for v in d:
        if not (v.invariant and v.compact):
            continue
        if v.genus > 0:
            if v.disk_holonomy == "nonlinearizable":
                found.append(InitialComponent(v.id, "b"))
            elif v.disk_holonomy == "unknown":
                pending.append(v.id)
            continue
        if v.id in dead:
            continue
        inc = d.incident(v.id)
        outside = [e for e in inc if e.other(v.id) not in dead]
        if len(outside) == 1 and outside[0].kind in (
            EdgeKind.RESONANT,
            EdgeKind.NODE,
            EdgeKind.SADDLE_NODE,
        ):
            found.append(InitialComponent(v.id, "a", edge_label(outside[0])))
        elif not outside:
            # every point lies in a dead branch: any non-linearizable one serves as p0
            for e in inc:
                if e.kind in (EdgeKind.RESONANT, EdgeKind.NODE, EdgeKind.SADDLE_NODE):
                    found.append(InitialComponent(v.id, "a", edge_label(e)))
                    break
    return InitialReport(tuple(found), tuple(pending))


# ---------------------------------------------------------------------------
# conditions (L), (G), (R)


def check_condition_L(g: DualGraph, divisor=None) -> Verdict:
    d = restrict(g, divisor)
    failing, pending, notes = [], [], []
    for e in d.edges:
        if e.kind == EdgeKind.SADDLE_NODE:
            failing.append(edge_label(e))
        elif e.kind == EdgeKind.NODE:
            notes.append(f"nodal: {edge_label(e)}")
        elif e.kind == EdgeKind.AUTO and e.cs_index is None:
            pending.append(edge_label(e))
    return Verdict.combine(failing, pending, notes)


def _count_per_component(components, definite: frozenset, pending: frozenset):
    failing, undecided = [], []
    for comp in components:
        c = sorted(comp & definite)
        u = sorted(comp & pending)
        if len(c) > 1:
            failing.append(c)
        elif len(c) + len(u) > 1:
            undecided.append(c + u)
    return failing, undecided


def check_condition_G(g: DualGraph, divisor=None) -> Verdict:
    d = restrict(g, divisor)
    bg = break_graph(d)
    h = bg.graph()
    init = initial_components(d)
    failing, pending = [], []
    for comp in bg.components():
        sub = h.subgraph(comp)
        if not nx.is_forest(sub):
            cyc = nx.find_cycle(sub)
            failing.append(sorted({x for edge in cyc for x in edge}))
    pos_genus = frozenset(c.vertex for c in init.components if d.vertex(c.vertex).genus > 0)
    f, u = _count_per_component(bg.components(), pos_genus, frozenset(init.undetermined))
    return Verdict.combine(failing + f, pending + u)


def check_condition_R(g: DualGraph, divisor=None) -> Verdict:
    d = restrict(g, divisor)
    failing, pending, notes = [], [], []
    for comp in cut_divisor(d).components:
        hol = {v: d.vertex(v).holonomy for v in comp}
        if any(h == "nonsolvable" for h in hol.values()):
            continue
        # undeclared branches are disks or punctured disks: solvable holonomy
        unknown = sorted(v for v, h in hol.items() if h == "unknown" and d.vertex(v).compact)
        if unknown:
            pending.append(unknown)
        else:
            failing.append(sorted(comp))
    return Verdict.combine(failing, pending, notes)


# ---------------------------------------------------------------------------
# adapted divisor


@dataclass(frozen=True)
class AdaptedReport:
    conditions: dict  # letter -> Verdict
    dead_branches: tuple

    @property
    def status(self) -> str:
        stats = [v.status for v in self.conditions.values()]
        if FAILS in stats:
            return FAILS
        if UNDETERMINED in stats:
            return UNDETERMINED
        return HOLDS

    def failing(self) -> list[str]:
        return [k for k, v in self.conditions.items() if v.status == FAILS]


def check_adapted(g: DualGraph, divisor=None) -> AdaptedReport:
    d = restrict(g, divisor)
    branches = find_dead_branches(d)
    dead = dead_branch_vertices(branches)
    out = {}

    bad = []
    for b in d.branch_ids():
        nb = d.neighbors(b)
        if len(nb) != 1 or not d.vertex(nb[0]).compact:
            bad.append(b)
    out["a"] = Verdict.combine(bad, [])

    missing = [
        b for b in g.branch_ids()
        if g.vertex(b).branch_kind == "isolated_separatrix" and b not in d.vertices
    ]
    out["b"] = Verdict.combine(missing, [])

    bad = []
    for v in sorted(dead):
        if d.vertex(v).dicritical:
            bad.append(v)
        elif any(d.vertex(n).compact and d.vertex(n).dicritical for n in d.neighbors(v)):
            bad.append(v)
    out["c"] = Verdict.combine(bad, [])

    if not d.branch_ids():
        outside = [v for v in d.compact_ids() if v not in dead]
        ok = len(outside) >= 2
        out["d"] = Verdict.combine([] if ok else outside or ["<none>"], [])
    else:
        out["d"] = Verdict(HOLDS, (), ("divisor has branches; vacuous",))

    try:
        bg = break_graph(d)
        init = initial_components(d)
        f, u = _count_per_component(bg.components(), init.ids(), frozenset(init.undetermined))
        out["e"] = Verdict.combine(f, u)
    except UnresolvedKindError as exc:
        out["e"] = Verdict(UNDETERMINED, (), (str(exc),))
    return AdaptedReport(out, tuple(branches))


# ---------------------------------------------------------------------------
# fundamental blocks


@dataclass(frozen=True)
class DeadBranchData:
    chain: tuple
    p: int
    q: int


@dataclass(frozen=True)
class Block:
    id: str
    kind: str  # aggregate, singularity, genus, dicritical
    vertex: Optional[str] = None
    edge: Optional[tuple] = None
    genus: int = 0
    self_intersection: Optional[int] = None
    dead: tuple = ()  # DeadBranchData, meeting the vertex
    others: tuple = ()  # neighbour ids of the remaining singular points
    initial: bool = False
    breaking: bool = False

    @property
    def valence(self) -> int:
        return len(self.dead) + len(self.others)


@dataclass(frozen=True)
class AssemblyEdge:
    a: str
    b: str
    boundary: str  # shared boundary torus label


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple
    assembly: tuple
    adapted: AdaptedReport
    notes: tuple = field(default=())

    def block(self, bid: str) -> Block:
        for b in self.blocks:
            if b.id == bid:
                return b
        raise KeyError(bid)

    def assembly_graph(self) -> nx.MultiGraph:
        h = nx.MultiGraph()
        h.add_nodes_from(b.id for b in self.blocks)
        for e in self.assembly:
            h.add_edge(e.a, e.b, boundary=e.boundary)
        return h


def _branch_data(d: DualGraph, b: DeadBranch) -> DeadBranchData:
    inv = branch_invariants(d, b)
    p, q = dead_branch_pq(inv.e_sequence)
    return DeadBranchData(b.chain, p, q)


def fundamental_blocks(g: DualGraph, divisor=None, require_adapted: bool = True) -> BlockDecomposition:
    d = restrict(g, divisor)
    _require_resolved(d)
    report = check_adapted(d)
    if require_adapted and report.status == FAILS:
        raise NotAdaptedError(report)
    branches = find_dead_branches(d)
    dead = dead_branch_vertices(branches)
    by_last = {b.last: b for b in branches}
    blocks, assembly, notes = [], [], []
    agg = {}

    for v in d:
        if not (v.invariant and v.compact) or v.id in dead:
            continue
        meets, others = [], []
        for n in d.neighbors(v.id):
            b = by_last.get(n)
            if b is not None and b.attach_vertex == v.id:
                meets.append(_branch_data(d, b))
            else:
                others.append(n)
        blk = Block(
            f"agg:{v.id}", "aggregate", vertex=v.id, genus=v.genus,
            self_intersection=v.self_intersection, dead=tuple(meets), others=tuple(others),
            initial=len(others) == 1,
        )
        blocks.append(blk)
        agg[v.id] = blk
        if v.genus > 0:
            gb = Block(
                f"genus:{v.id}", "genus", vertex=v.id, genus=v.genus,
                initial=v.disk_holonomy == "nonlinearizable",
            )
            blocks.append(gb)
            assembly.append(AssemblyEdge(blk.id, gb.id, f"disk:{v.id}"))

    for v in d:
        if not v.dicritical:
            continue
        if v.id in dead:
            notes.append(f"dicritical {v.id} lies in a dead branch; absorbed by its aggregate block")
            continue
        nbrs = tuple(d.neighbors(v.id))
        blk = Block(
            f"dic:{v.id}", "dicritical", vertex=v.id, genus=v.genus,
            self_intersection=v.self_intersection, others=nbrs, breaking=True,
        )
        blocks.append(blk)
        for n in nbrs:
            if n in agg:
                assembly.append(AssemblyEdge(agg[n].id, blk.id, f"point:{edge_label(d.edge_between(v.id, n))}"))
            elif n in dead:
                notes.append(f"dicritical {v.id} touches dead branch at {n}; no boundary recorded")

    for e in d.edges:
        if e.kind == EdgeKind.DICRITICAL or e.u in dead or e.v in dead:
            continue
        blk = Block(
            f"sing:{edge_label(e)}", "singularity", edge=(e.u, e.v),
            breaking=e.kind == EdgeKind.LINEARIZABLE,
        )
        blocks.append(blk)
        for x in (e.u, e.v):
            if x in agg:
                assembly.append(AssemblyEdge(agg[x].id, blk.id, f"point:{edge_label(e)}"))

    return BlockDecomposition(tuple(blocks), tuple(assembly), report, tuple(notes))


def place_transversals(g: DualGraph, divisor=None) -> list[tuple[frozenset, str]]:
    d = restrict(g, divisor)
    out = []
    for comp in break_graph(d).components():
        candidates = sorted(v for v in comp if d.vertex(v).invariant)
        assert candidates, "break component without invariant vertex"
        out.append((comp, candidates[0]))
    return out
