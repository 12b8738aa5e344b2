"""Walk the built-in cusp graph through both divisor choices."""

from plumbcalc.analysis import check_adapted
from plumbcalc.cli import builtin_group, load_example
from plumbcalc.graph import find_dead_branches, restrict
from plumbcalc.groups import Word, is_trivial_block_word
from plumbcalc.indices import branch_invariants
from plumbcalc.pi1 import aggregate_block, divisor_presentation


def main():
    g = load_example("cusp")

    d = restrict(g, ["CS"])
    for b in find_dead_branches(d):
        inv = branch_invariants(d, b)
        print(f"dead branch {list(b.chain)} -> {b.attach_vertex}: (p, q) = ({inv.p}, {inv.q})")
    print("aggregate block:", aggregate_block(g, "D3", ["CS"]))
    print("adapted (C + S) fails:", check_adapted(g, ["CS"]).failing())

    text = "a^3 b^-1 a^-3 b"
    print(f"{text} trivial:", is_trivial_block_word(Word.parse(text), builtin_group("cusp-block")))

    r = divisor_presentation(g, ["CS", "T"])
    print("adapted (C + S + T):", check_adapted(g, ["CS", "T"]).status)
    for gen, rel in r.moves:
        print(f"  eliminate {gen} using {rel}")
    print("pi1:", r.simplified)


if __name__ == "__main__":
    main()
