"""Finitely presented groups for plumbed-neighbourhood complements.

Words are tuples of ``(generator, exponent)`` syllables. Presentations
carry role tags on their generators so that the block-group normal form
(central generator ``c``, torsion generators with ``d^p = c^q``, free
generators) can be computed without guessing.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .exact import smith_normal_form

ROLES = ("central", "torsion", "surface", "boundary", "stable", "plain")


class PresentationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# words

_SYLLABLE_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_#.']*)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class Word:
    syllables: tuple = ()

    def __init__(self, syllables: Iterable = ()):
        out = []
        for gen, exp in syllables:
            exp = int(exp)
            if exp == 0:
                continue
            out.append((str(gen), exp))
        object.__setattr__(self, "syllables", tuple(out))

    @classmethod
    def gen(cls, name: str, exp: int = 1) -> "Word":
        return cls([(name, exp)])

    @classmethod
    def parse(cls, text: str) -> "Word":
        text = text.strip()
        if text in ("", "1"):
            return cls()
        out = []
        for tok in text.split():
            m = _SYLLABLE_RE.match(tok)
            if not m:
                raise ValueError(f"bad syllable {tok!r}")
            out.append((m.group(1), int(m.group(2) or 1)))
        return cls(out)

    @classmethod
    def from_letters(cls, letters: Iterable) -> "Word":
        return cls(letters)

    def letters(self) -> list[tuple[str, int]]:
        out = []
        for g, e in self.syllables:
            s = 1 if e > 0 else -1
            out.extend([(g, s)] * abs(e))
        return out

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.syllables + other.syllables)

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self.syllables))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.syllables * n)

    def generators(self) -> set[str]:
        return {g for g, _ in self.syllables}

    def exponent_sum(self, gen: str) -> int:
        return sum(e for g, e in self.syllables if g == gen)

    def substitute(self, mapping: Mapping[str, "Word"]) -> "Word":
        out: list = []
        for g, e in self.syllables:
            if g in mapping:
                out.extend((mapping[g] ** e).syllables)
            else:
                out.append((g, e))
        return Word(out)

    def rename(self, mapping: Mapping[str, str]) -> "Word":
        return Word((mapping.get(g, g), e) for g, e in self.syllables)

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        pair = commutator_parts(self)
        if pair is not None:
            return f"[{_syl(*pair[0])},{_syl(*pair[1])}]"
        return " ".join(_syl(g, e) for g, e in self.syllables)


def _syl(g: str, e: int) -> str:
    return g if e == 1 else f"{g}^{e}"


def commutator(x: Word, y: Word) -> Word:
    return x * y * x.inverse() * y.inverse()


def commutator_parts(w: Word):
    s = w.syllables
    if len(s) == 4 and s[0][0] == s[2][0] and s[1][0] == s[3][0] and s[0][0] != s[1][0]:
        if s[2][1] == -s[0][1] and s[3][1] == -s[1][1]:
            return s[0], s[1]
    return None


def free_reduce(w: Word) -> Word:
    stack: list[list] = []
    for g, e in w.syllables:
        if stack and stack[-1][0] == g:
            stack[-1][1] += e
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([g, e])
    return Word((g, e) for g, e in stack)


def cyclic_reduce(w: Word) -> Word:
    s = list(free_reduce(w).syllables)
    while len(s) >= 2 and s[0][0] == s[-1][0]:
        g, e = s[0][0], s[0][1] + s[-1][1]
        s = ([(g, e)] if e else []) + s[1:-1]
    return Word(s)


def _letter_key(letters):
    return tuple((g, 0 if s > 0 else 1) for g, s in letters)


def canonical_relator(w: Word) -> Word:
    """Minimal cyclic rotation among a relator and its inverse."""
    r = cyclic_reduce(w)
    if not r:
        return r
    best = None
    for cand in (r, r.inverse()):
        letters = cand.letters()
        n = len(letters)
        for i in range(n):
            rot = letters[i:] + letters[:i]
            key = _letter_key(rot)
            if best is None or key < best[0]:
                best = (key, rot)
    return free_reduce(Word(best[1]))


def cyclically_equivalent(u: Word, v: Word) -> bool:
    return canonical_relator(u) == canonical_relator(v)


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Generator:
    name: str
    role: str = "plain"
    p: Optional[int] = None
    q: Optional[int] = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise PresentationError(f"unknown role {self.role!r}")
        if self.role == "torsion":
            if self.p is None or self.q is None or self.p < 2 or self.q < 1 or gcd(self.p, self.q) != 1:
                raise PresentationError(f"torsion generator {self.name} needs coprime p>=2, q>=1")


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple
    relators: tuple = ()

    def __post_init__(self):
        gens = tuple(g if isinstance(g, Generator) else Generator(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        rels = tuple(r if isinstance(r, Word) else Word.parse(r) for r in self.relators)
        object.__setattr__(self, "relators", rels)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise PresentationError("duplicate generator names")
        known = set(names)
        for r in rels:
            extra = r.generators() - known
            if extra:
                raise PresentationError(f"relator {r} uses undeclared {sorted(extra)}")

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    def generator(self, name: str) -> Generator:
        for g in self.generators:
            if g.name == name:
                return g
        raise KeyError(name)

    def canonical(self) -> "GroupPresentation":
        """Relators cyclically canonical, deduplicated, trivial ones dropped."""
        seen, out = set(), []
        for r in self.relators:
            c = canonical_relator(r)
            if c and c not in seen:
                seen.add(c)
                out.append(c)
        return GroupPresentation(self.generators, tuple(out))

    def relator_set(self) -> frozenset:
        return frozenset(canonical_relator(r) for r in self.relators if canonical_relator(r))

    def __str__(self) -> str:
        rels = ", ".join(str(r) for r in self.relators)
        return f"<{', '.join(self.names)} | {rels}>"


def block_group(central: str, torsion: Sequence[tuple] = (), free: Sequence[str] = ()) -> GroupPresentation:
    """The group <c, d_i, x_j | [c,*], d_i^p_i = c^q_i> with roles set."""
    gens = [Generator(central, "central")]
    gens += [Generator(n, "torsion", p, q) for n, p, q in torsion]
    gens += [Generator(n, "plain") for n in free]
    rels = [commutator(Word.gen(central), Word.gen(g.name)) for g in gens[1:]]
    rels += [Word([(n, p), (central, -q)]) for n, p, q in torsion]
    return GroupPresentation(tuple(gens), tuple(rels))


# ---------------------------------------------------------------------------
# block-group normal form


@dataclass(frozen=True)
class NormalForm:
    syllables: tuple
    s: int
    central: str = "c"

    def is_identity(self) -> bool:
        return not self.syllables and self.s == 0

    def to_word(self) -> Word:
        return Word(self.syllables + ((self.central, self.s),))

    def __str__(self) -> str:
        return str(self.to_word())


def _block_shape(pres: GroupPresentation):
    central = [g for g in pres.generators if g.role == "central"]
    if len(central) != 1:
        raise PresentationError("presentation not of block-group shape: need one central generator")
    c = central[0].name
    torsion = {g.name: (g.p, g.q) for g in pres.generators if g.role == "torsion"}
    expected = set()
    for g in pres.generators:
        if g.name != c:
            expected.add(canonical_relator(commutator(Word.gen(c), Word.gen(g.name))))
    for n, (p, q) in torsion.items():
        expected.add(canonical_relator(Word([(n, p), (c, -q)])))
    if pres.relator_set() != expected:
        raise PresentationError("presentation not of block-group shape")
    return c, torsion


def gamma_normal_form(w: Word, pres: GroupPresentation) -> NormalForm:
    """Unique form u_1...u_r c^s: torsion exponents in [1, p), c pushed right."""
    c, torsion = _block_shape(pres)
    known = set(pres.names)
    stack: list[list] = []
    s = 0
    for g, e in w.syllables:
        if g not in known:
            raise PresentationError(f"unknown generator {g!r}")
        if g == c:
            s += e
            continue
        if stack and stack[-1][0] == g:
            stack[-1][1] += e
        else:
            stack.append([g, e])
        top = stack[-1]
        if g in torsion:
            p, q = torsion[g]
            k, r = divmod(top[1], p)
            s += q * k
            top[1] = r
        if top[1] == 0:
            stack.pop()
    return NormalForm(tuple((g, e) for g, e in stack), s, c)


def is_trivial_block_word(w: Word, pres: GroupPresentation) -> bool:
    return gamma_normal_form(w, pres).is_identity()


# ---------------------------------------------------------------------------
# Wagreich presentations of fundamental blocks


@dataclass(frozen=True)
class BlockDescriptor:
    """Named generators of one block.

    ``torsion`` lists ``(name, p, q)`` for dead branches, ``boundary`` the
    remaining boundary meridians. ``nu`` is the self-intersection entering
    the long relation; ``None`` drops it (non-compact component).
    """

    kind: str
    central: str = "c"
    genus: int = 0
    nu: Optional[int] = None
    torsion: tuple = ()
    boundary: tuple = ()
    surface: tuple = ()

    def surface_names(self) -> list[tuple[str, str]]:
        if self.surface:
            if len(self.surface) != self.genus:
                raise PresentationError("surface generator pairs do not match the genus")
            return [tuple(x) for x in self.surface]
        if self.genus == 1:
            return [("a", "b")]
        return [(f"a{i}", f"b{i}") for i in range(1, self.genus + 1)]


def long_relator(desc: BlockDescriptor) -> Word:
    w = Word.gen(desc.central, desc.nu)
    for a, b in desc.surface_names():
        w = w * commutator(Word.gen(a), Word.gen(b))
    for n, _, _ in desc.torsion:
        w = w * Word.gen(n)
    for n in desc.boundary:
        w = w * Word.gen(n)
    return w


def wagreich_presentation(desc: BlockDescriptor, eliminate_long: bool = False) -> GroupPresentation:
    if desc.genus < 0:
        raise PresentationError("negative genus")
    c = desc.central
    if desc.kind == "singularity":
        if len(desc.boundary) != 1:
            raise PresentationError("singularity block needs exactly one boundary meridian")
        x = desc.boundary[0]
        return GroupPresentation(
            (Generator(c, "boundary"), Generator(x, "boundary")),
            (commutator(Word.gen(c), Word.gen(x)),),
        )
    if desc.kind == "genus":
        gens = [Generator(c, "central")]
        for a, b in desc.surface_names():
            gens += [Generator(a, "surface"), Generator(b, "surface")]
        rels = [commutator(Word.gen(c), Word.gen(g.name)) for g in gens[1:]]
        return GroupPresentation(tuple(gens), tuple(rels))
    if desc.kind not in ("aggregate", "dicritical"):
        raise PresentationError(f"unknown block kind {desc.kind!r}")
    if desc.kind == "dicritical" and desc.torsion:
        raise PresentationError("dicritical blocks carry no dead branches")

    gens = []
    for a, b in desc.surface_names():
        gens += [Generator(a, "surface"), Generator(b, "surface")]
    gens.append(Generator(c, "central"))
    gens += [Generator(n, "torsion", p, q) for n, p, q in desc.torsion]
    gens += [Generator(n, "boundary") for n in desc.boundary]
    rels = [commutator(Word.gen(c), Word.gen(g.name)) for g in gens if g.name != c]
    if desc.nu is not None:
        rels.append(long_relator(desc))
    rels += [Word([(n, p), (c, -q)]) for n, p, q in desc.torsion]
    pres = GroupPresentation(tuple(gens), tuple(rels))
    if eliminate_long and desc.nu is not None and desc.boundary:
        last = desc.boundary[-1]
        implied = canonical_relator(commutator(Word.gen(c), Word.gen(last)))
        pres = GroupPresentation(
            pres.generators, tuple(r for r in pres.relators if canonical_relator(r) != implied)
        )
        pres = tietze_eliminate(pres, last, long_relator(desc))
        pres = _reassign_roles(pres, {n: "plain" for n in desc.boundary})
    return pres


def _reassign_roles(pres: GroupPresentation, roles: Mapping[str, str]) -> GroupPresentation:
    gens = tuple(
        Generator(g.name, roles[g.name]) if g.name in roles else g for g in pres.generators
    )
    return GroupPresentation(gens, pres.relators)


# ---------------------------------------------------------------------------
# Tietze moves


def solve_for(rel: Word, gen: str) -> Optional[Word]:
    """If ``gen`` occurs once in ``rel`` with exponent +-1, express it."""
    rel = free_reduce(rel)
    idx = [i for i, (g, _) in enumerate(rel.syllables) if g == gen]
    if len(idx) != 1 or abs(rel.syllables[idx[0]][1]) != 1:
        return None
    i = idx[0]
    x = Word(rel.syllables[:i])
    y = Word(rel.syllables[i + 1:])
    if rel.syllables[i][1] == 1:
        return free_reduce(x.inverse() * y.inverse())
    return free_reduce(y * x)


def tietze_eliminate(pres: GroupPresentation, gen: str, rel: Optional[Word] = None) -> GroupPresentation:
    if gen not in pres.names:
        raise PresentationError(f"unknown generator {gen!r}")
    if rel is None:
        options = [(len(r), i) for i, r in enumerate(pres.relators) if solve_for(r, gen) is not None]
        if not options:
            raise PresentationError(f"no relator solves for {gen!r}")
        rel = pres.relators[min(options)[1]]
    sol = solve_for(rel, gen)
    if sol is None:
        raise PresentationError(f"relator {rel} does not solve for {gen!r}")
    target = canonical_relator(rel)
    dropped = False
    new_rels = []
    for r in pres.relators:
        if not dropped and canonical_relator(r) == target:
            dropped = True
            continue
        new_rels.append(free_reduce(r.substitute({gen: sol})))
    gens = tuple(g for g in pres.generators if g.name != gen)
    return GroupPresentation(gens, tuple(new_rels)).canonical()


def simplify(
    pres: GroupPresentation,
    protect: Iterable[str] = (),
    priority: Optional[Callable[[str], int]] = None,
) -> tuple[GroupPresentation, list[tuple[str, Word]]]:
    """Greedy Tietze elimination; returns the result and the move log."""
    protect = set(protect)
    priority = priority or (lambda name: 0)
    pres = pres.canonical()
    log = []
    while True:
        best = None
        for g in pres.names:
            if g in protect:
                continue
            for r in pres.relators:
                if solve_for(r, g) is None:
                    continue
                key = (priority(g), len(r), g, str(r))
                if best is None or key < best[0]:
                    best = (key, g, r)
        if best is None:
            return pres, log
        _, g, r = best
        log.append((g, r))
        pres = tietze_eliminate(pres, g, r)


# ---------------------------------------------------------------------------
# Seifert-van Kampen assembly


@dataclass(frozen=True)
class Gluing:
    source: int
    target: int
    boundary: tuple
    source_map: Mapping
    target_map: Mapping


@dataclass(frozen=True)
class Assembly:
    presentation: GroupPresentation
    tree: tuple
    stable_letters: dict = field(default_factory=dict)  # gluing index -> letter


def _as_word(x: Union[str, Word]) -> Word:
    return x if isinstance(x, Word) else Word.parse(x)


def _bfs_tree(n: int, gluings: Sequence[Gluing]) -> tuple:
    adj: dict[int, list] = {i: [] for i in range(n)}
    for k, gl in enumerate(gluings):
        adj[gl.source].append((k, gl.target))
        adj[gl.target].append((k, gl.source))
    seen, tree = set(), []
    for root in range(n):
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for k, y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    tree.append(k)
                    queue.append(y)
    return tuple(sorted(tree))


def _check_forest(n: int, gluings: Sequence[Gluing], tree: Sequence[int]) -> None:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in tree:
        a, b = find(gluings[k].source), find(gluings[k].target)
        if a == b:
            raise PresentationError("spanning tree contains a cycle")
        parent[a] = b
    for gl in gluings:
        if find(gl.source) != find(gl.target):
            raise PresentationError("tree does not span the assembly graph")


def svk_assemble(
    blocks: Sequence[GroupPresentation],
    gluings: Sequence[Gluing],
    tree: Optional[Sequence[int]] = None,
    stable_prefix: str = "u",
) -> Assembly:
    """Free product of the blocks modulo the boundary identifications.

    Gluings in ``tree`` identify ``phi_0(b) = phi_1(b)``; every other gluing
    introduces a stable letter ``u`` with ``phi_0(b) = u^-1 phi_1(b) u``.
    """
    seen: set[str] = set()
    gens: list[Generator] = []
    rels: list[Word] = []
    for b in blocks:
        for g in b.generators:
            if g.name in seen:
                raise PresentationError(f"generator {g.name!r} appears in two blocks")
            seen.add(g.name)
            gens.append(g)
        rels.extend(b.relators)
    if tree is None:
        tree = _bfs_tree(len(blocks), gluings)
    else:
        tree = tuple(sorted(tree))
        _check_forest(len(blocks), gluings, tree)
    stable = {}
    for k, gl in enumerate(gluings):
        for idx, phi in ((gl.source, gl.source_map), (gl.target, gl.target_map)):
            declared = set(blocks[idx].names)
            for bgen in gl.boundary:
                if bgen not in phi:
                    raise PresentationError(f"gluing {k}: map undefined on {bgen!r}")
                extra = _as_word(phi[bgen]).generators() - declared
                if extra:
                    raise PresentationError(f"gluing {k}: image uses undeclared {sorted(extra)}")
        u = None
        if k not in tree:
            u = f"{stable_prefix}{len(stable) + 1}"
            while u in seen:
                u += "'"
            seen.add(u)
            stable[k] = u
            gens.append(Generator(u, "stable"))
        for bgen in gl.boundary:
            x = _as_word(gl.source_map[bgen])
            y = _as_word(gl.target_map[bgen])
            if u is None:
                rels.append(free_reduce(x * y.inverse()))
            else:
                uw = Word.gen(u)
                rels.append(free_reduce(x * uw.inverse() * y.inverse() * uw))
    return Assembly(GroupPresentation(tuple(gens), tuple(rels)), tree, stable)


# ---------------------------------------------------------------------------
# abelianization and solvability pattern


@dataclass(frozen=True)
class H1:
    rank: int
    torsion: tuple

    def __str__(self) -> str:
        parts = (["Z"] if self.rank == 1 else [f"Z^{self.rank}"] if self.rank else [])
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def relation_matrix(pres: GroupPresentation) -> list[list[int]]:
    return [[r.exponent_sum(g) for g in pres.names] for r in pres.relators]


def abelianization_h1(pres: GroupPresentation) -> H1:
    n = len(pres.names)
    m = relation_matrix(pres)
    if not m or n == 0:
        return H1(n, ())
    diag = smith_normal_form(m)
    nonzero = [abs(x) for x in diag if x != 0]
    return H1(n - len(nonzero), tuple(x for x in nonzero if x > 1))


@dataclass(frozen=True)
class PatternMatch:
    status: str  # solvable_by_pattern or no_match
    stable: Optional[str] = None
    base: tuple = ()


def _conjugation_image(rel: Word, t: str, base: set):
    """Match a rotation of rel or rel^-1 as t^s x^e t^-s W^-1 with W in base."""
    out = []
    for cand in (rel, rel.inverse()):
        letters = cyclic_reduce(cand).letters()
        n = len(letters)
        for i in range(n):
            rot = letters[i:] + letters[:i]
            if n < 3 or rot[0][0] != t or rot[2] != (t, -rot[0][1]):
                continue
            if rot[1][0] not in base:
                continue
            if any(g == t for g, _ in rot[3:]):
                continue
            out.append((rot[1][0], rot[0][1]))
    return out


def recognize_polycyclic_pattern(pres: GroupPresentation) -> PatternMatch:
    """Sound matcher for <x_1..x_k, t | [x_i,x_j], t x_i t^-1 = W_i(x)>."""
    names = pres.names
    rels = [canonical_relator(r) for r in pres.relators]
    rels = [r for r in rels if r]
    rel_set = set(rels)
    for t in names:
        base = [x for x in names if x != t]
        bset = set(base)
        ok = all(
            canonical_relator(commutator(Word.gen(x), Word.gen(y))) in rel_set
            for i, x in enumerate(base)
            for y in base[i + 1:]
        )
        if not ok:
            continue
        found: dict[str, set] = {x: set() for x in base}
        for r in rels:
            for x, direction in set(_conjugation_image(r, t, bset)):
                found[x].add((direction, r))
        for direction in (1, -1):
            if all(
                len({r for d, r in found[x] if d == direction}) == 1 for x in base
            ):
                return PatternMatch("solvable_by_pattern", t, tuple(base))
    return PatternMatch("no_match")
