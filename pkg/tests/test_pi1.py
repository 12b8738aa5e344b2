import pytest

from plumbcalc.analysis import NotAdaptedError, fundamental_blocks
from plumbcalc.cli import builtin_group
from plumbcalc.graph import parse_graph
from plumbcalc.groups import H1, GroupPresentation, Word, abelianization_h1, canonical_relator, recognize_polycyclic_pattern
from plumbcalc.pi1 import aggregate_block, divisor_presentation, strip_tags


def test_cusp_singularity_block(cusp):
    pres = aggregate_block(cusp, "D3", ["CS"])
    assert pres.relator_set() == builtin_group("cusp-block").relator_set()
    assert sorted(pres.names) == ["a", "b", "c"]
    assert pres.generator("a").p == 3 and pres.generator("b").p == 2


def test_cusp_adapted_pipeline(cusp):
    r = divisor_presentation(cusp, ["CS", "T"])
    assert str(r.simplified) == "<a, b | [a,b^2]>"
    assert [g for g, _ in r.moves] == ["s", "t", "c"]
    assert r.stable_letters == ()
    assert len(r.block_presentations) == len(r.decomposition.blocks) == 3
    assert abelianization_h1(r.simplified) == H1(2, ())


def test_cusp_unadapted_refused(cusp):
    with pytest.raises(NotAdaptedError) as err:
        divisor_presentation(cusp, ["CS"])
    assert err.value.report.failing() == ["c"]


def test_sup_pipeline_h1(sup):
    r = divisor_presentation(sup)
    assert r.stable_letters == ("u1",)
    ref = builtin_group("sup")
    assert abelianization_h1(r.simplified) == abelianization_h1(ref) == H1(1, (3,))
    assert recognize_polycyclic_pattern(ref).status == "solvable_by_pattern"


def test_sup_tree_choice(sup):
    dec = fundamental_blocks(sup)
    n = len(dec.assembly)
    h = set()
    # the assembly is one 6-cycle, so dropping any edge leaves a spanning tree
    assert n == 6
    for drop in range(n):
        r = divisor_presentation(sup, tree=[k for k in range(n) if k != drop])
        assert len(r.stable_letters) == 1
        h.add(abelianization_h1(r.simplified))
    assert h == {H1(1, (3,))}


def test_meridian_names_must_be_distinct():
    g = parse_graph(
        "vertex A genus=0 self=-2 meridian=x\n"
        "vertex B genus=0 self=-2 meridian=x\n"
        "edge A B cs=(-1+1*sqrt(2))/1 kind=lin\n"
    )
    with pytest.raises(ValueError, match="distinct"):
        divisor_presentation(g)


def test_strip_tags():
    pres = GroupPresentation(("a#0", "a#1", "b#2"), ("a#0 a#1^-1 b#2",))
    out = strip_tags(pres, sort=True)
    assert out.names == ["a#0", "a#1", "b"]
    assert canonical_relator(Word.parse("a#0 a#1^-1 b")) in out.relator_set()


def test_genus_vertex_pipeline():
    g = parse_graph(
        "vertex E genus=1 self=-1 diskholonomy=nonlin meridian=c\n"
        "vertex D genus=0 self=-2 meridian=d\n"
        "vertex S genus=0 noncompact kind=isolated meridian=s\n"
        "edge D E cs=-2 kind=lin\n"
        "edge E S cs=-1/2 kind=res\n"
    )
    r = divisor_presentation(g)
    assert [b.id for b in r.decomposition.blocks] == ["agg:E", "genus:E", "sing:E-S"]
    # the aggregate and genus blocks share a disk boundary, the tree has no stable letter
    assert r.stable_letters == ()
    # a, b free in homology; c = d^2 and s = d^-1 c leave one more class
    assert abelianization_h1(r.simplified) == H1(3, ())
    assert sorted(r.simplified.names) == ["E.a1", "E.b1", "d"]
