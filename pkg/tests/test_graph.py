import pytest
from hypothesis import given, settings, strategies as st

from plumbcalc.graph import (
    EdgeKind,
    GraphInvariantError,
    GraphSyntaxError,
    find_dead_branches,
    intersection_matrix,
    normalize_blow_down,
    parse_graph,
    serialize_graph,
    valence,
)
from plumbcalc.indices import grauert_contractible


def chain_text(e, hub=None, hub_genus=1):
    lines = [f"vertex D{i + 1} genus=0 self={x}" for i, x in enumerate(e)]
    lines += [f"edge D{i + 1} D{i + 2} kind=lin cs=unknown" for i in range(len(e) - 1)]
    if hub is not None:
        lines.append(f"vertex H genus={hub_genus} self={hub}")
        lines.append(f"edge D{len(e)} H kind=lin cs=unknown")
    return "\n".join(lines) + "\n"


# -- parsing -----------------------------------------------------------------

def test_parse_cusp(cusp):
    assert len(cusp.vertices) == 5 and len(cusp.edges) == 4
    assert [cusp.vertex(v).self_intersection for v in ("D1", "D2", "D3")] == [-3, -2, -1]
    assert cusp.vertex("D1").dicritical
    assert cusp.vertex("S").branch_kind == "isolated_separatrix"
    assert cusp.vertex("T").branch_kind == "transversal"
    assert cusp.edge_between("D1", "D3").kind == EdgeKind.DICRITICAL


def test_parse_sup_triangle(sup):
    assert len(sup.vertices) == 3 and len(sup.edges) == 3
    assert sorted(v.self_intersection for v in sup) == [-3, -2, -2]
    assert all(e.kind == EdgeKind.LINEARIZABLE for e in sup.edges)


def test_empty_document():
    with pytest.raises(GraphInvariantError, match="no vertices"):
        parse_graph("# nothing here\n\n")


def test_syntax_error_position():
    with pytest.raises(GraphSyntaxError) as exc:
        parse_graph("vertex A genus=0 self=-1\nvertex B genus=x self=-2\n")
    assert (exc.value.line, exc.value.column) == (2, 10)
    with pytest.raises(GraphSyntaxError) as exc:
        parse_graph("vertex A self=-1\nedge A B cs=(1+sqrt(2))\n")
    assert exc.value.line == 2
    with pytest.raises(GraphSyntaxError):
        parse_graph("node A\n")


@pytest.mark.parametrize(
    "text, rule",
    [
        ("vertex A self=-1\nvertex B self=-2\nedge A B cs=-1/2 kind=node\n", "node"),
        ("vertex A self=-1\nvertex B self=-2\nedge A B cs=(0+1*sqrt(2)) kind=res\n", "resonant"),
        ("vertex A self=-1\nvertex B self=-2\nedge A B cs=3/2\n", "reduced"),
        ("vertex A self=-1\nvertex B self=-2\nedge A B kind=dic\n", "dicritical-contact"),
        ("vertex A self=-1 dicritical\nvertex B self=-2\nedge A B cs=-2 kind=lin\n", "dicritical-vertex"),
        ("vertex A self=-1\nvertex B self=-2\nedge A B\nedge B A\n", "simple"),
        ("vertex A self=-1\nedge A A\n", "no-loop"),
        ("vertex A self=-1\nvertex B self=-2\n", "connected"),
        ("vertex A\n", "self"),
        ("vertex A self=-1\nvertex S noncompact kind=isolated\n", "branch-degree"),
        ("vertex A self=-1\nvertex A self=-2\n", "unique-vertex"),
    ],
)
def test_invariant_violations_name_rule(text, rule):
    with pytest.raises(GraphInvariantError) as exc:
        parse_graph(text)
    assert exc.value.rule == rule


def test_auto_kinds_resolved_or_pending():
    g = parse_graph(
        "vertex A self=-1\nvertex B self=-2\nvertex C self=-3\nvertex D self=-1 dicritical\n"
        "edge A B cs=(-11+1*sqrt(21))/10\nedge B C cs=-1/2\nedge C D\n"
    )
    assert g.edge_between("A", "B").kind == EdgeKind.LINEARIZABLE
    assert g.edge_between("B", "C").kind == EdgeKind.AUTO
    assert g.edge_between("C", "D").kind == EdgeKind.DICRITICAL
    assert any("pending" in d or "resonant" in d for d in g.diagnostics)


def test_reciprocal_reader(cusp):
    e = cusp.edge_between("D3", "S")
    assert str(cusp.index_at(e, "D3")) == "-1/2"
    assert str(cusp.index_at(e, "S")) == "-2"
    dic = cusp.edge_between("D1", "D3")
    assert cusp.index_at(dic, "D3") == 0
    assert cusp.index_at(dic, "D1") is None


@pytest.mark.parametrize("name", ["cusp", "sup", "chains"])
def test_serialize_roundtrip(name):
    from plumbcalc.cli import example_text

    text = example_text(name)
    g = parse_graph(text)
    assert serialize_graph(g) == text
    assert parse_graph(serialize_graph(g)) == g


# -- valence and dead branches ----------------------------------------------

def test_valence_examples(cusp):
    assert valence(cusp, "D3", "CS") == 3
    assert valence(cusp, "D1", "CS T") == 2
    assert valence(parse_graph("vertex A self=-1\n"), "A") == 0
    with pytest.raises(KeyError):
        valence(cusp, "X")
    with pytest.raises(KeyError):
        valence(cusp, "S", "C")


def test_dead_branches_cusp(cusp):
    b = find_dead_branches(cusp, "CS")
    assert [(x.chain, x.attach_vertex) for x in b] == [(("D1",), "D3"), (("D2",), "D3")]
    b = find_dead_branches(cusp, "CS T")
    assert [(x.chain, x.attach_vertex) for x in b] == [(("D2",), "D3")]


def test_dead_branches_trivial_cases():
    assert find_dead_branches(parse_graph("vertex A self=-1\n")) == []
    # a bare chain has no component of valence >= 2 to attach to
    assert find_dead_branches(parse_graph(chain_text([-2, -3]))) == []
    text = chain_text([-2, -3, -2], hub=-1) + "vertex S noncompact kind=isolated\nedge H S cs=-1 kind=res\n"
    (b,) = find_dead_branches(parse_graph(text))
    assert b.chain == ("D1", "D2", "D3") and b.attach_vertex == "H"


def test_intersection_matrix_examples(sup):
    g = parse_graph(chain_text([-2, -2]))
    assert intersection_matrix(g, ["D1", "D2"]).tolist() == [[-2, 1], [1, -2]]
    assert intersection_matrix(sup, ["A", "B", "C"]).tolist() == [[-2, 1, 1], [1, -2, 1], [1, 1, -3]]
    assert intersection_matrix(parse_graph("vertex D1 self=-3\n"), ["D1"]).tolist() == [[-3]]


def test_intersection_matrix_rejects_branch(cusp):
    with pytest.raises(ValueError):
        intersection_matrix(cusp, ["D3", "S"])


@st.composite
def trees(draw):
    """Random small trees of compact genus-0 vertices with some branches."""
    n = draw(st.integers(1, 9))
    lines, edges = [], []
    for i in range(n):
        genus = draw(st.sampled_from([0, 0, 0, 1]))
        lines.append(f"vertex V{i} genus={genus} self={draw(st.integers(-4, -1))}")
        if i:
            edges.append(f"edge V{draw(st.integers(0, i - 1))} V{i} cs=unknown kind=lin")
    for j in range(draw(st.integers(0, 2))):
        lines.append(f"vertex S{j} noncompact kind=isolated")
        edges.append(f"edge V{draw(st.integers(0, n - 1))} S{j} cs=unknown kind=lin")
    return parse_graph("\n".join(lines + edges) + "\n")


@settings(max_examples=150)
@given(trees())
def test_dead_branches_disjoint_and_tridiagonal(g):
    seen = set()
    for b in find_dead_branches(g):
        assert not seen & set(b.chain)
        seen |= set(b.chain)
        m = intersection_matrix(g, list(b.chain)).tolist()
        n = len(m)
        for i in range(n):
            for j in range(n):
                if abs(i - j) == 1:
                    assert m[i][j] == 1
                elif i != j:
                    assert m[i][j] == 0
        assert valence(g, b.chain[0]) == 1
        assert all(valence(g, v) == 2 for v in b.chain[1:])
        assert valence(g, b.attach_vertex) >= 2


@settings(max_examples=150)
@given(trees())
def test_serialize_is_identity_on_random_graphs(g):
    assert parse_graph(serialize_graph(g)) == g


# -- blow-down ---------------------------------------------------------------

def test_blow_down_single():
    g = parse_graph(chain_text([-1, -2]))
    ng, log = normalize_blow_down(g)
    # D1 goes first; D2 becomes -1 and is the last vertex, so it stays
    assert [c.vertex for c in log if c.applied] == ["D1"]
    assert ng.vertex_ids() == ["D2"] and ng.vertex("D2").self_intersection == -1
    assert not log[-1].applied and "empty" in log[-1].reason


def test_blow_down_two_step():
    g = parse_graph(chain_text([-2, -1], hub=-3))
    ng, log = normalize_blow_down(g)
    assert [c.vertex for c in log if c.applied] == ["D2", "D1"]
    assert ng.vertex_ids() == ["H"]
    assert ng.vertex("H").self_intersection == -1


def test_blow_down_cusp_unchanged(cusp):
    ng, log = normalize_blow_down(cusp)
    assert ng == cusp and log == []


def test_blow_down_refuses_double_edge():
    g = parse_graph(
        "vertex A self=-1\nvertex B genus=1 self=-2\nvertex C genus=1 self=-2\n"
        "edge A B cs=unknown kind=lin\nedge A C cs=unknown kind=lin\nedge B C cs=unknown kind=lin\n"
    )
    ng, log = normalize_blow_down(g)
    assert ng == g
    assert len(log) == 1 and not log[0].applied and "double edge" in log[0].reason


def test_blow_down_keeps_branch_attachment():
    g = parse_graph("vertex A self=-1\nvertex S noncompact kind=isolated\nedge A S cs=-1 kind=res\n")
    ng, log = normalize_blow_down(g)
    assert ng == g and "strand" in log[0].reason


def _candidates(g):
    return {
        v.id for v in g
        if v.invariant and v.compact and v.genus == 0 and v.self_intersection == -1
        and len(g.incident(v.id)) <= 2
    }


@settings(max_examples=150, deadline=None)
@given(trees())
def test_blow_down_idempotent_and_fixpoint(g):
    ng, log = normalize_blow_down(g)
    again, log2 = normalize_blow_down(ng)
    assert again == ng
    assert not any(c.applied for c in log2)
    # whatever candidate survives was refused, with a reason, in the last pass
    assert _candidates(ng) == {c.vertex for c in log2 if not c.applied and c.reason}


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-4, -1), min_size=1, max_size=7))
def test_chain_vanishes_iff_grauert(e):
    g = parse_graph(chain_text(e, hub=-5))
    ng, log = normalize_blow_down(g)
    assert (ng.vertex_ids() == ["H"]) == grauert_contractible(e)
    again, log2 = normalize_blow_down(ng)
    assert again == ng and not any(c.applied for c in log2)
