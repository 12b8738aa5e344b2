"""Camacho-Sad index algebra on dual graphs.

Covers the continued-fraction recursions along dead-branch chains, the
invariants (p, q) of a chain, singularity classification and the closed
index system on a triangle of components.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .exact import ExactScalar, determinant, is_negative_definite, squarefree_part
from .graph import DeadBranch, DualGraph, EdgeKind, intersection_matrix


class ReducednessError(ValueError):
    """An index in Q_{>0}, which a reduced singularity cannot have."""


class ChainError(ValueError):
    pass


class CycleSolveError(ValueError):
    pass


# ---------------------------------------------------------------------------
# chain recursions


def chain_deltas(e: Sequence[int]) -> tuple[int, ...]:
    """delta_1 = e_1, delta_{i+1} = e_{i+1} delta_i - delta_{i-1}, delta_0 = 1."""
    if not e:
        raise ChainError("empty chain")
    prev, cur = 1, e[0]
    out = [cur]
    for ei in e[1:]:
        prev, cur = cur, ei * cur - prev
        out.append(cur)
    return tuple(out)


def chain_cs_indices(e: Sequence[int]) -> tuple[ExactScalar, ...]:
    """Indices lambda_i of D_i at the point D_i meets D_{i+1} (or the attach vertex)."""
    if not e:
        raise ChainError("empty chain")
    lam = [ExactScalar(e[0])]
    for ei in e[1:]:
        if lam[-1].is_zero():
            raise ChainError("chain not reduced-compatible (intermediate index 0)")
        lam.append(ExactScalar(ei) - lam[-1].inverse())
    deltas = (1,) + chain_deltas(e)
    for i, li in enumerate(lam):
        assert li * deltas[i] == ExactScalar(deltas[i + 1]), "lambda/delta mismatch"
    return tuple(lam)


def grauert_contractible(e: Sequence[int]) -> bool:
    if not e:
        raise ChainError("empty chain")
    m = _chain_matrix(e)
    return is_negative_definite(m) and abs(chain_deltas(e)[-1]) == 1


def _chain_matrix(e: Sequence[int]):
    from .exact import IntMatrix

    n = len(e)
    return IntMatrix(
        [[e[i] if i == j else (1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
    )


def dead_branch_pq(e: Sequence[int]) -> tuple[int, int]:
    """Coprime positive (p, q) with p = (-1)^l delta_l, q = (-1)^(l-1) delta_(l-1)."""
    if not e:
        raise ChainError("empty chain")
    if not is_negative_definite(_chain_matrix(e)):
        raise ChainError(f"chain {tuple(e)} is not negative definite")
    deltas = (1,) + chain_deltas(e)
    ell = len(e)
    p = (-1) ** ell * deltas[ell]
    q = (-1) ** (ell - 1) * deltas[ell - 1]
    assert p > 0 and q > 0
    assert gcd(p, q) == 1
    if p == 1:
        raise ChainError(f"chain {tuple(e)} is Grauert-contractible (p=1); blow it down first")
    return p, q


@dataclass(frozen=True)
class ChainInvariants:
    e_sequence: tuple
    delta_sequence: tuple
    lambda_sequence: Optional[tuple]
    p: int
    q: int
    negative_definite: bool
    grauert_contractible: bool

    @property
    def attach_index(self) -> Optional[ExactScalar]:
        """Index at the attach vertex of the point where the chain meets it (-q/p)."""
        if self.lambda_sequence is None:
            return None
        return self.lambda_sequence[-1].inverse()


def chain_invariants(e: Sequence[int]) -> ChainInvariants:
    e = tuple(int(x) for x in e)
    deltas = chain_deltas(e)
    nd = is_negative_definite(_chain_matrix(e))
    try:
        lam = chain_cs_indices(e)
    except ChainError:
        lam = None
    full = (1,) + deltas
    ell = len(e)
    p = (-1) ** ell * full[ell]
    q = (-1) ** (ell - 1) * full[ell - 1]
    return ChainInvariants(e, deltas, lam, p, q, nd, nd and abs(deltas[-1]) == 1)


def branch_invariants(g: DualGraph, branch: DeadBranch) -> ChainInvariants:
    """Invariants of a dead branch of ``g``; the attach vertex must be invariant."""
    if g.vertex(branch.attach_vertex).dicritical:
        raise ChainError(
            f"dead branch {list(branch.chain)} attaches to dicritical {branch.attach_vertex}"
        )
    return chain_invariants([g.vertex(v).self_intersection for v in branch.chain])


def chain_oracle_matches(g: DualGraph, branch: DeadBranch) -> bool:
    """Cross-check the recursion against the intersection matrix determinant."""
    inv = branch_invariants(g, branch)
    m = intersection_matrix(g, list(branch.chain))
    return determinant(m) == inv.delta_sequence[-1]


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class Classification:
    kind: Optional[EdgeKind]  # None: pending, linearizability not decided
    l_compatible: Optional[bool]  # None: undetermined
    nodal: bool = False
    note: str = ""


def classify_singularity(cs: Optional[ExactScalar], declared: EdgeKind = EdgeKind.AUTO) -> Classification:
    declared = EdgeKind(declared)
    if declared == EdgeKind.DICRITICAL:
        return Classification(EdgeKind.DICRITICAL, True)
    if cs is None:
        if declared == EdgeKind.AUTO:
            raise ValueError("kind=auto needs a known index")
        return _declared_verdict(declared)
    cs = ExactScalar.coerce(cs)
    if cs.is_rational() and cs.sign() > 0:
        raise ReducednessError(f"index {cs} in Q_>0 violates reducedness")
    if declared != EdgeKind.AUTO:
        return _declared_verdict(declared)
    if cs.is_zero():
        raise ReducednessError("index 0 requires a declared saddle-node")
    if cs.is_rational():
        return Classification(None, None, note="resonant index; linearizability unknown")
    if cs.sign() > 0:
        return Classification(EdgeKind.NODE, True, nodal=True)
    return Classification(EdgeKind.LINEARIZABLE, True, note="algebraic irrational index is Brjuno")


def _declared_verdict(kind: EdgeKind) -> Classification:
    if kind == EdgeKind.SADDLE_NODE:
        return Classification(kind, False, note="saddle-node")
    if kind == EdgeKind.RESONANT:
        return Classification(kind, False, note="resonant non-linearizable")
    if kind == EdgeKind.NODE:
        return Classification(kind, True, nodal=True)
    return Classification(kind, True)


# ---------------------------------------------------------------------------
# triangle index system


@dataclass(frozen=True)
class CycleSolution:
    """Indices on a 3-cycle v0 v1 v2; ``edge_index[i]`` is at v_i on edge (v_i, v_{i+1})."""

    e: tuple
    edge_index: tuple

    def side_values(self) -> list[tuple[ExactScalar, ExactScalar]]:
        return [(x, x.inverse()) for x in self.edge_index]

    def vertex_sums(self) -> tuple:
        n = len(self.e)
        return tuple(
            self.edge_index[i] + self.edge_index[(i - 1) % n].inverse() for i in range(n)
        )

    def all_values(self) -> list[ExactScalar]:
        return [v for pair in self.side_values() for v in pair]


def _sqrt_scalar(disc: Fraction) -> ExactScalar:
    num, den = disc.numerator, disc.denominator
    k, d = squarefree_part(num * den)
    return ExactScalar(0, Fraction(k, den), d)


def solve_cycle_indices(e: Sequence[int]) -> list[CycleSolution]:
    """All index assignments on a triangle with self-intersections ``e``.

    Unknowns x (at v0 toward v1), y (at v0 toward v2), z (at v1 toward v2)
    satisfy x + y = e0, 1/x + z = e1, 1/y + 1/z = e2. Eliminating y and z
    leaves a quadratic in x. Solutions with a zero index, or with an index
    in Q_{>0}, are discarded as not reduced.
    """
    e = tuple(int(v) for v in e)
    if len(e) != 3:
        raise CycleSolveError("only 3-cycles are supported")
    e1, e2, e3 = e
    A = e2 * e3 - 1
    B = e1 + e2 - e3 * (e1 * e2 + 1)
    C = e1 * e3 - 1
    roots: list[ExactScalar] = []
    if A == 0:
        if B == 0:
            raise CycleSolveError("degenerate triangle system")
        roots.append(ExactScalar(Fraction(-C, B)))
    else:
        disc = Fraction(B * B - 4 * A * C)
        if disc < 0:
            raise CycleSolveError(f"no real solution (discriminant {disc})")
        r = _sqrt_scalar(disc)
        base = ExactScalar(Fraction(-B, 2 * A))
        scale = ExactScalar(Fraction(1, 2 * A))
        roots.append(base + scale * r)
        if not r.is_zero():
            roots.append(base - scale * r)
    out = []
    for x in roots:
        if x.is_zero():
            continue
        y = ExactScalar(e1) - x
        if y.is_zero():
            continue
        z = ExactScalar(e2) - x.inverse()
        if z.is_zero():
            continue
        sol = CycleSolution(e, (x, z, y.inverse()))
        if sol.vertex_sums() != tuple(ExactScalar(v) for v in e):
            continue
        if any(v.is_rational() and v.sign() > 0 for v in sol.all_values()):
            continue
        out.append(sol)
    if not out:
        raise CycleSolveError("no reduced solution")
    out.sort(key=lambda s: float(s.edge_index[0]))
    return out


# ---------------------------------------------------------------------------
# vertex audit


@dataclass(frozen=True)
class VertexSum:
    vertex: str
    status: str  # pass, fail, skipped
    total: Optional[ExactScalar]
    expected: int


def check_cs_vertex_sums(g: DualGraph) -> list[VertexSum]:
    out = []
    for v in g:
        if not (v.compact and v.invariant):
            continue
        vals = [g.index_at(e, v.id) for e in g.incident(v.id)]
        if any(x is None for x in vals):
            out.append(VertexSum(v.id, "skipped", None, v.self_intersection))
            continue
        try:
            total = sum(vals, ExactScalar(0))
        except ValueError:  # mixed radicands never sum to an integer
            out.append(VertexSum(v.id, "fail", None, v.self_intersection))
            continue
        ok = total == ExactScalar(v.self_intersection)
        out.append(VertexSum(v.id, "pass" if ok else "fail", total, v.self_intersection))
    return out
