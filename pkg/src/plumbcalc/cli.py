"""Command-line front end.

Exit status: 0 on success (failed conditions are still reported as 0),
1 when an analysis cannot be carried out (or an undetermined verdict under
``--strict``), 2 on input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources
from typing import Optional

from . import __version__
from .analysis import (
    NotAdaptedError,
    UnresolvedKindError,
    Verdict,
    check_adapted,
    check_condition_G,
    check_condition_L,
    check_condition_R,
    edge_label,
    fundamental_blocks,
    place_transversals,
)
from .exact import format_scalar
from .graph import (
    DualGraph,
    EdgeKind,
    GraphError,
    find_dead_branches,
    normalize_blow_down,
    parse_graph,
    restrict,
    serialize_graph,
)
from .groups import (
    GroupPresentation,
    PresentationError,
    Word,
    abelianization_h1,
    block_group,
    gamma_normal_form,
    recognize_polycyclic_pattern,
)
from .indices import (
    ChainError,
    CycleSolveError,
    branch_invariants,
    check_cs_vertex_sums,
    classify_singularity,
    solve_cycle_indices,
)
from .pi1 import divisor_presentation

EXAMPLES = ("cusp", "sup", "chains")


class InputError(Exception):
    pass


class AnalysisFailure(Exception):
    pass


def example_text(name: str) -> str:
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    return resources.files("plumbcalc").joinpath("data", f"{name}.graph").read_text()


def load_example(name: str) -> DualGraph:
    return parse_graph(example_text(name))


def builtin_group(name: str) -> GroupPresentation:
    if name == "cusp-block":
        return block_group("c", [("a", 3, 1), ("b", 2, 1)])
    if name == "cusp-adapted":
        # <a,b | [a,b^2]> with c = b^2 kept, which puts it in block-group shape
        return block_group("c", [("b", 2, 1)], ["a"])
    if name == "cusp-final":
        return GroupPresentation(("a", "b"), ("a b^2 a^-1 b^-2",))
    if name == "sup":
        return GroupPresentation(
            ("a", "b", "c"), ("c a c^-1 b^-5 a^3", "c b c^-1 b^-8 a^5", "a b a^-1 b^-1")
        )
    raise KeyError(f"unknown group {name!r}")


BUILTIN_GROUPS = ("cusp-block", "cusp-adapted", "cusp-final", "sup")


# ---------------------------------------------------------------------------
# report sections


def _verdict(v: Verdict) -> dict:
    return v.to_dict()


def _safe_verdict(fn, *args) -> dict:
    try:
        return _verdict(fn(*args))
    except UnresolvedKindError as exc:
        return {"status": "undetermined", "witnesses": [], "notes": [str(exc)]}


def graph_summary(g: DualGraph) -> dict:
    return {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "compact": g.compact_ids(),
        "branches": g.branch_ids(),
        "diagnostics": list(g.diagnostics),
    }


def branches_section(g: DualGraph, divisor) -> list:
    d = restrict(g, divisor)
    out = []
    for b in find_dead_branches(d):
        item = {"chain": list(b.chain), "attach": b.attach_vertex}
        try:
            inv = branch_invariants(d, b)
        except ChainError as exc:
            item["error"] = str(exc)
            out.append(item)
            continue
        item.update(
            e=list(inv.e_sequence),
            delta=list(inv.delta_sequence),
            lam=[format_scalar(x) for x in inv.lambda_sequence] if inv.lambda_sequence else None,
            p=inv.p,
            q=inv.q,
            negative_definite=inv.negative_definite,
            grauert_contractible=inv.grauert_contractible,
        )
        out.append(item)
    return out


def conditions_section(g: DualGraph, divisor) -> dict:
    rep = check_adapted(g, divisor)
    adapted = {k: _verdict(v) for k, v in rep.conditions.items()}
    adapted["status"] = rep.status
    # the summary's witnesses are the conditions that decide it
    adapted["witnesses"] = sorted(
        k for k, v in rep.conditions.items() if rep.status != "holds" and v.status == rep.status
    )
    return {
        "L": _safe_verdict(check_condition_L, g, divisor),
        "G": _safe_verdict(check_condition_G, g, divisor),
        "R": _safe_verdict(check_condition_R, g, divisor),
        "adapted": adapted,
    }


def blocks_section(g: DualGraph, divisor, require_adapted=True) -> dict:
    dec = fundamental_blocks(g, divisor, require_adapted=require_adapted)
    blocks = []
    for b in dec.blocks:
        item = {"id": b.id, "kind": b.kind, "initial": b.initial, "breaking": b.breaking}
        if b.kind == "aggregate":
            item["dead_branches"] = [{"chain": list(x.chain), "p": x.p, "q": x.q} for x in b.dead]
            item["boundary"] = list(b.others)
        blocks.append(item)
    return {
        "blocks": blocks,
        "assembly": [{"a": e.a, "b": e.b, "boundary": e.boundary} for e in dec.assembly],
        "transversals": [
            {"component": sorted(c), "vertex": v} for c, v in place_transversals(g, divisor)
        ],
        "notes": list(dec.notes),
    }


def _pres(p: GroupPresentation) -> dict:
    return {"generators": p.names, "relators": [str(r) for r in p.relators], "text": str(p)}


def pi1_section(g: DualGraph, divisor, require_adapted=True) -> dict:
    res = divisor_presentation(g, divisor, require_adapted=require_adapted)
    h1 = abelianization_h1(res.simplified)
    return {
        "blocks": [str(p) for p in res.block_presentations],
        "assembled": str(res.assembled),
        "simplified": _pres(res.simplified),
        "moves": [{"eliminate": gname, "using": str(r)} for gname, r in res.moves],
        "h1": {"rank": h1.rank, "torsion": list(h1.torsion), "text": str(h1)},
    }


def indices_section(g: DualGraph, divisor) -> dict:
    d = restrict(g, divisor)
    edges = []
    for e in d.edges:
        item = {"edge": edge_label(e), "kind": e.kind.value}
        if e.kind != EdgeKind.DICRITICAL:
            item["cs"] = format_scalar(e.cs_index) if e.cs_index is not None else None
            item["cs_other"] = (
                format_scalar(e.cs_index.inverse())
                if e.cs_index is not None and not e.cs_index.is_zero()
                else None
            )
            cls = classify_singularity(e.cs_index, e.kind) if (e.cs_index is not None or e.kind != EdgeKind.AUTO) else None
            item["l_compatible"] = None if cls is None else cls.l_compatible
            item["nodal"] = bool(cls and cls.nodal)
        edges.append(item)
    sums = [
        {
            "vertex": s.vertex,
            "status": s.status,
            "sum": format_scalar(s.total) if s.total is not None else None,
            "expected": s.expected,
        }
        for s in check_cs_vertex_sums(d)
    ]
    return {"edges": edges, "vertex_sums": sums}


def solve_cycle_section(e) -> dict:
    sols = solve_cycle_indices(e)
    return {
        "e": list(e),
        "solutions": [
            {
                "edge_index": [format_scalar(x) for x in s.edge_index],
                "values": [format_scalar(x) for x in s.all_values()],
                "vertex_sums": [format_scalar(x) for x in s.vertex_sums()],
            }
            for s in sols
        ],
        "values": sorted({format_scalar(x) for s in sols for x in s.all_values()}),
    }


# ---------------------------------------------------------------------------
# rendering


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _statuses(obj):
    if isinstance(obj, dict):
        if "status" in obj and isinstance(obj["status"], str):
            yield obj["status"]
        for v in obj.values():
            yield from _statuses(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _statuses(v)


def _render_text(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                sub = _render_text(v, indent + 1)
                if sub:
                    sub[0] = f"{pad}- " + sub[0].lstrip()
                lines.extend(sub)
            else:
                lines.append(f"{pad}- {_scalar_text(v)}")
    else:
        lines.append(f"{pad}{_scalar_text(obj)}")
    return lines


def _scalar_text(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, dict)):
        return "(none)"
    return str(v)


def emit(report: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        out.write("\n".join(_render_text(report)) + "\n")


# ---------------------------------------------------------------------------
# argument handling


def _read_graph(args) -> tuple[DualGraph, str, str]:
    if getattr(args, "name", None) is not None:
        try:
            text = example_text(args.name)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
        source = f"example:{args.name}"
    else:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.file}: {exc.strerror}") from None
        source = args.file
    try:
        g = parse_graph(text)
    except GraphError as exc:
        raise InputError(str(exc)) from None
    return g, text, source


def _divisor(args, g: DualGraph):
    if not args.divisor:
        return None
    try:
        restrict(g, args.divisor)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    return args.divisor


def _resolve_group(args) -> GroupPresentation:
    if args.torsion or args.free:
        torsion = []
        for spec in args.torsion:
            try:
                name, p, q = spec.split(":")
                torsion.append((name, int(p), int(q)))
            except ValueError:
                raise InputError(f"--torsion expects NAME:P:Q, got {spec!r}") from None
        try:
            return block_group(args.central, torsion, args.free)
        except PresentationError as exc:
            raise InputError(str(exc)) from None
    if not args.group:
        raise InputError("give --group or --torsion/--free")
    try:
        return builtin_group(args.group)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None


def _graph_report(args, sections) -> dict:
    g, text, source = _read_graph(args)
    divisor = _divisor(args, g)
    report = {
        "tool": "plumbcalc",
        "version": __version__,
        "command": args.command,
        "input": {"source": source, "sha256": _digest(text)},
        "divisor": list(divisor) if divisor else "all",
        "graph": graph_summary(g),
    }
    for section in sections:
        report[section] = SECTIONS[section](g, divisor, args)
    return report


SECTIONS = {
    "conditions": lambda g, d, a: conditions_section(g, d),
    "branches": lambda g, d, a: branches_section(g, d),
    "blocks": lambda g, d, a: blocks_section(g, d, not a.force),
    "pi1": lambda g, d, a: pi1_section(g, d, not a.force),
    "h1": lambda g, d, a: pi1_section(g, d, not a.force)["h1"],
    "indices": lambda g, d, a: indices_section(g, d),
    "normalize": lambda g, d, a: _normalize_section(g),
}


def _normalize_section(g: DualGraph) -> dict:
    ng, log = normalize_blow_down(g)
    return {
        "log": [
            {"vertex": c.vertex, "valence": c.valence, "neighbors": list(c.neighbors),
             "applied": c.applied, "reason": c.reason}
            for c in log
        ],
        "graph": serialize_graph(ng),
    }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--strict", action="store_true", help="undetermined verdicts exit 1")

    graph_opts = argparse.ArgumentParser(add_help=False)
    graph_opts.add_argument(
        "--divisor", nargs="+", metavar="TOKEN",
        help="C (compact part), CS (plus isolated separatrices), branch ids, or all",
    )
    graph_opts.add_argument("--force", action="store_true", help="build blocks even if not adapted")

    parser = argparse.ArgumentParser(prog="plumbcalc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"plumbcalc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (
        ("check", "conditions L, G, R and adapted (a)-(e)"),
        ("normalize", "blow down (-1)-components of valence <= 2"),
        ("branches", "dead branches with chain invariants"),
        ("blocks", "fundamental blocks and transversals"),
        ("pi1", "assembled fundamental group"),
        ("indices", "Camacho-Sad indices and vertex sums"),
    ):
        p = sub.add_parser(name, parents=[common, graph_opts], help=help_)
        p.add_argument("file")

    p = sub.add_parser("h1", parents=[common, graph_opts], help="first homology")
    p.add_argument("file", nargs="?")
    p.add_argument("--group", choices=BUILTIN_GROUPS)

    p = sub.add_parser("word", parents=[common], help="word problem in a block group")
    p.add_argument("word")
    p.add_argument("--group", choices=BUILTIN_GROUPS)
    p.add_argument("--central", default="c")
    p.add_argument("--torsion", action="append", default=[], metavar="NAME:P:Q")
    p.add_argument("--free", action="append", default=[], metavar="NAME")

    p = sub.add_parser("solve-cycle", parents=[common], help="index system on a triangle")
    p.add_argument("e", nargs=3, type=int)

    p = sub.add_parser("example", parents=[common, graph_opts], help="run a built-in example")
    p.add_argument("name", choices=EXAMPLES)
    for flag in ("pi1", "h1", "indices", "blocks", "branches", "normalize"):
        p.add_argument(f"--{flag}", action="store_true")
    p.add_argument("--print", action="store_true", dest="print_graph", help="print the graph file")
    return parser


def _dispatch(args) -> dict:
    cmd = args.command
    if cmd in ("check", "normalize", "branches", "blocks", "pi1", "indices"):
        sections = {
            "check": ["branches", "conditions"],
            "normalize": ["normalize"],
        }.get(cmd, [cmd])
        return _graph_report(args, sections)
    if cmd == "example":
        sections = ["branches", "conditions"]
        sections += [f for f in ("normalize", "indices", "blocks", "pi1") if getattr(args, f)]
        if args.h1 and not args.pi1:
            sections.append("h1")
        report = _graph_report(args, sections)
        if args.h1 and args.pi1:
            report["h1"] = report["pi1"]["h1"]
        if args.print_graph:
            report["text"] = example_text(args.name)
        return report
    if cmd == "h1":
        if args.group:
            pres = builtin_group(args.group)
            h1 = abelianization_h1(pres)
            return {
                "tool": "plumbcalc", "version": __version__, "command": cmd,
                "input": {"source": f"group:{args.group}", "sha256": _digest(str(pres))},
                "group": str(pres),
                "h1": {"rank": h1.rank, "torsion": list(h1.torsion), "text": str(h1)},
                "pattern": recognize_polycyclic_pattern(pres).status,
            }
        if not args.file:
            raise InputError("h1 needs a graph file or --group")
        return _graph_report(args, ["h1"])
    if cmd == "word":
        pres = _resolve_group(args)
        try:
            w = Word.parse(args.word)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        nf = gamma_normal_form(w, pres)
        return {
            "tool": "plumbcalc", "version": __version__, "command": cmd,
            "input": {"source": args.group or "custom", "sha256": _digest(f"{pres}|{w}")},
            "group": str(pres),
            "word": str(w),
            "normal_form": {"syllables": str(Word(nf.syllables)), "central_exponent": nf.s},
            "trivial": nf.is_identity(),
        }
    if cmd == "solve-cycle":
        return {
            "tool": "plumbcalc", "version": __version__, "command": cmd,
            "input": {"source": "argv", "sha256": _digest(" ".join(map(str, args.e)))},
            **solve_cycle_section(args.e),
        }
    raise InputError(f"unknown command {cmd!r}")


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = _dispatch(args)
    except InputError as exc:
        print(f"plumbcalc: error: {exc}", file=sys.stderr)
        return 2
    except (NotAdaptedError, UnresolvedKindError, CycleSolveError, ChainError, PresentationError) as exc:
        print(f"plumbcalc: analysis failed: {exc}", file=sys.stderr)
        return 1
    emit(report, args.format)
    if args.strict and "undetermined" in set(_statuses(report)):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
