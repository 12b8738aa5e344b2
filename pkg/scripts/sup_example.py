"""Index system on the triangle and the group of the cycle of three curves."""

from plumbcalc.analysis import break_graph, check_condition_G
from plumbcalc.cli import builtin_group, load_example
from plumbcalc.exact import format_scalar
from plumbcalc.groups import abelianization_h1, recognize_polycyclic_pattern
from plumbcalc.indices import classify_singularity, solve_cycle_indices
from plumbcalc.pi1 import divisor_presentation


def main():
    for sol in solve_cycle_indices((-2, -2, -3)):
        pairs = [f"{format_scalar(x)} | {format_scalar(y)}" for x, y in sol.side_values()]
        kinds = {classify_singularity(x).kind.token for x in sol.edge_index}
        print("solution:", "; ".join(pairs), "kinds:", sorted(kinds))

    g = load_example("sup")
    print("break graph components:", [sorted(c) for c in break_graph(g).components()])
    print("condition G:", check_condition_G(g).status)

    ref = builtin_group("sup")
    print("reference group:", ref)
    print("  H1:", abelianization_h1(ref), " pattern:", recognize_polycyclic_pattern(ref).status)
    r = divisor_presentation(g)
    print("assembled and simplified:", r.simplified)
    print("  H1:", abelianization_h1(r.simplified), " stable letters:", list(r.stable_letters))


if __name__ == "__main__":
    main()
