"""Fundamental group of a divisor-neighbourhood complement, block by block.

Each fundamental block gets its Wagreich presentation with generators named
after component meridians. Copies are tagged ``name#k`` by block index,
glued along shared boundary tori, and tree identifications are collapsed
before a greedy Tietze pass.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import Block, BlockDecomposition, fundamental_blocks
from .graph import DualGraph, restrict
from .groups import (
    BlockDescriptor,
    Generator,
    Gluing,
    GroupPresentation,
    Word,
    commutator,
    free_reduce,
    simplify,
    svk_assemble,
    wagreich_presentation,
)


def _surface(vid: str, genus: int) -> tuple:
    return tuple((f"{vid}.a{i}", f"{vid}.b{i}") for i in range(1, genus + 1))


def gamma_name(vid: str) -> str:
    return f"{vid}.gamma"


def block_descriptor(g: DualGraph, block: Block) -> BlockDescriptor:
    m = lambda x: g.vertex(x).meridian_name  # noqa: E731
    if block.kind == "aggregate":
        torsion = tuple((m(b.chain[-1]), b.p, b.q) for b in block.dead)
        boundary = tuple(m(x) for x in block.others)
        if block.genus > 0:
            boundary = (gamma_name(block.vertex),) + boundary
        return BlockDescriptor(
            "aggregate", m(block.vertex), 0, block.self_intersection, torsion, boundary
        )
    if block.kind == "dicritical":
        return BlockDescriptor(
            "dicritical", m(block.vertex), block.genus, block.self_intersection, (),
            tuple(m(x) for x in block.others), _surface(block.vertex, block.genus),
        )
    if block.kind == "genus":
        return BlockDescriptor(
            "genus", m(block.vertex), block.genus, surface=_surface(block.vertex, block.genus)
        )
    u, v = block.edge
    return BlockDescriptor("singularity", m(u), boundary=(m(v),))


def aggregate_block(g: DualGraph, vertex: str, divisor=None) -> GroupPresentation:
    """Wagreich presentation of one aggregate block with the long relation eliminated.

    Works whether or not the divisor is adapted, which is what the bare
    singularity example needs.
    """
    dec = fundamental_blocks(g, divisor, require_adapted=False)
    return wagreich_presentation(
        block_descriptor(restrict(g, divisor), dec.block(f"agg:{vertex}")), eliminate_long=True
    )


def _tag(pres: GroupPresentation, k: int) -> GroupPresentation:
    ren = {n: f"{n}#{k}" for n in pres.names}
    gens = tuple(Generator(ren[x.name], x.role, x.p, x.q) for x in pres.generators)
    return GroupPresentation(gens, tuple(r.rename(ren) for r in pres.relators))


@dataclass(frozen=True)
class Pi1Result:
    decomposition: BlockDecomposition
    block_presentations: tuple
    assembled: GroupPresentation
    collapsed: GroupPresentation
    simplified: GroupPresentation
    moves: tuple
    stable_letters: tuple


def _gluings(g: DualGraph, dec: BlockDecomposition, descs: list) -> list[Gluing]:
    index = {b.id: i for i, b in enumerate(dec.blocks)}
    out = []
    for edge in dec.assembly:
        i, j = index[edge.a], index[edge.b]
        da, db = descs[i], descs[j]
        if edge.boundary.startswith("disk:"):
            vid = edge.boundary[5:]
            loop = Word(())
            for a, b in db.surface:
                loop = loop * commutator(Word.gen(f"{a}#{j}"), Word.gen(f"{b}#{j}"))
            out.append(
                Gluing(
                    i, j, ("c", "l"),
                    {"c": Word.gen(f"{da.central}#{i}"), "l": Word.gen(f"{gamma_name(vid)}#{i}")},
                    {"c": Word.gen(f"{db.central}#{j}"), "l": loop},
                )
            )
            continue
        # a point where two components meet: the torus carries both meridians
        a_names = {da.central, *da.boundary, *(n for n, _, _ in da.torsion)}
        b_names = {db.central, *db.boundary}
        shared = sorted(a_names & b_names)
        out.append(
            Gluing(
                i, j, tuple(shared),
                {x: Word.gen(f"{x}#{i}") for x in shared},
                {x: Word.gen(f"{x}#{j}") for x in shared},
            )
        )
    return out


def _collapse(pres: GroupPresentation, gluings, tree) -> GroupPresentation:
    parent: dict[str, str] = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    def block_of(name):
        return int(name.rsplit("#", 1)[1])

    for k in tree:
        gl = gluings[k]
        for bgen in gl.boundary:
            x, y = gl.source_map[bgen], gl.target_map[bgen]
            if len(x.syllables) == 1 and len(y.syllables) == 1 and x.syllables[0][1] == 1 == y.syllables[0][1]:
                a, b = find(x.syllables[0][0]), find(y.syllables[0][0])
                if a != b:
                    lo, hi = sorted((a, b), key=lambda n: (block_of(n), n))
                    parent[hi] = lo
    ren = {n: find(n) for n in pres.names}
    keep = [gen for gen in pres.generators if ren[gen.name] == gen.name]
    rels = [free_reduce(r.rename(ren)) for r in pres.relators]
    return strip_tags(GroupPresentation(tuple(keep), tuple(rels)).canonical())


def strip_tags(pres: GroupPresentation, sort: bool = False) -> GroupPresentation:
    """Drop the ``#k`` block tag wherever the base name is unique."""
    bases: dict[str, list] = {}
    for n in pres.names:
        bases.setdefault(n.rsplit("#", 1)[0], []).append(n)
    strip = {v[0]: b for b, v in bases.items() if len(v) == 1 and b not in pres.names}
    gens = [Generator(strip.get(x.name, x.name), x.role, x.p, x.q) for x in pres.generators]
    if sort:
        gens.sort(key=lambda x: x.name)
    return GroupPresentation(tuple(gens), tuple(r.rename(strip) for r in pres.relators)).canonical()


def divisor_presentation(g: DualGraph, divisor=None, require_adapted: bool = True, tree=None) -> Pi1Result:
    d = restrict(g, divisor)
    names = [v.meridian_name for v in d]
    if len(set(names)) != len(names):
        raise ValueError("meridian names must be distinct")
    dec = fundamental_blocks(d, require_adapted=require_adapted)
    descs = [block_descriptor(d, b) for b in dec.blocks]
    pres = [wagreich_presentation(x) for x in descs]
    tagged = [_tag(p, k) for k, p in enumerate(pres)]
    gluings = _gluings(d, dec, descs)
    asm = svk_assemble(tagged, gluings, tree=tree)
    collapsed = _collapse(asm.presentation, gluings, asm.tree)

    branch_meridians = {d.vertex(b).meridian_name for b in d.branch_ids()}

    def priority(name: str) -> int:
        if name.split("#")[0] in branch_meridians:
            return 0
        if "#" in name or ".gamma" in name:
            return 1
        return 2

    stable = tuple(sorted(asm.stable_letters.values()))
    simplified, moves = simplify(collapsed, protect=stable, priority=priority)
    simplified = strip_tags(simplified, sort=True)
    return Pi1Result(dec, tuple(pres), asm.presentation, collapsed, simplified, tuple(moves), stable)
