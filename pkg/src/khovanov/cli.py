"""Command-line front end.

Subcommands: ``jones`` (both state sums + equality flag), ``homology``
(integral table as JSON), ``verify-move`` (the full identity suite for an
R1/R2/R3 patch) and ``corpus`` (run a manifest of diagrams against their
expected invariants).  Exit codes: 0 pass, 1 verification failure, 2 parse
error, 3 patch mismatch.

Output is deterministic: JSON is emitted with sorted keys and fixed
orderings, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .complexes import build_complex, graded_euler, verify_d_squared
from .diagram import (
    DiagramError,
    MovePatch,
    PatchMismatchError,
    PDSyntaxError,
    apply_move,
    parse_pd,
)
from .homology import HomologyTable, compare_tables, homology_groups
from .moves import (
    DEFAULT_CONVENTION,
    MoveEquivalence,
    convention_search,
)
from .states import (
    DEFAULT_MAX_CROSSINGS,
    LaurentPoly,
    TooManyCrossingsError,
    jones_kauffman,
    jones_refined,
)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_PARSE = 2
EXIT_PATCH = 3

# Named conventions for --convention.  Only the frozen default satisfies
# every identity on every patch; wrong-pq is kept to demonstrate failure
# reporting.  Other candidates live in moves.default_candidates() and are
# explored by `verify-move --search`.
CONVENTIONS = {
    "default": DEFAULT_CONVENTION,
    "wrong-pq": replace(DEFAULT_CONVENTION, name="wrong-pq", pq_rule="negated"),
}


def _read_pd(arg: str) -> str:
    if arg.startswith("@"):
        with open(arg[1:]) as f:
            return f.read()
    return arg


def _emit(payload, fmt: str, text_renderer):
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True, indent=1))
    else:
        text_renderer(payload)


def cmd_jones(args) -> int:
    diagram = parse_pd(_read_pd(args.pd))
    jk = jones_kauffman(diagram, args.max_crossings)
    jr = jones_refined(diagram, args.max_crossings)
    payload = {
        "kauffman": jk.to_json(),
        "refined": jr.to_json(),
        "text": str(jk),
        "equal": jk == jr,
        "writhe": diagram.writhe(),
    }

    def render(p):
        print(f"kauffman: {jk}")
        print(f"refined:  {jr}")
        print(f"equal: {str(p['equal']).lower()}")

    _emit(payload, args.format, render)
    return EXIT_OK if payload["equal"] else EXIT_VERIFICATION


def cmd_homology(args) -> int:
    diagram = parse_pd(_read_pd(args.pd))
    cx = build_complex(diagram, max_crossings=args.max_crossings)
    table = homology_groups(cx)
    payload = {"homology": table.to_json()}
    ok = True
    if args.check_euler:
        euler_ok = table.euler() == graded_euler(cx) == jones_kauffman(
            diagram, args.max_crossings
        )
        d2 = verify_d_squared(cx)
        payload["euler_matches_jones"] = euler_ok
        payload["d_squared_zero"] = not d2
        ok = euler_ok and not d2

    def render(p):
        for row in p["homology"]:
            tor = "".join(f" Z/{t}" for t in row["torsion"])
            print(f"({row['i']:>3},{row['j']:>4})  Z^{row['rank']}{tor}")
        if "euler_matches_jones" in p:
            print(f"euler check: {str(p['euler_matches_jones']).lower()}")

    _emit(payload, args.format, render)
    return EXIT_OK if ok else EXIT_VERIFICATION


def _verify_move(diagram, kind, crossings, convention):
    """Identity suite for one patch; R1 compares homology tables only."""
    if kind == "R1":
        simplified, _ = apply_move(
            diagram, MovePatch("R1", "simplify", crossings=tuple(crossings))
        )
        diffs = compare_tables(
            homology_groups(build_complex(diagram)),
            homology_groups(build_complex(simplified)),
        )
        checks = [{"name": "homology_invariance", "pass": not diffs}]
        if diffs:
            checks[0]["first_violation"] = diffs[0]
        return {
            "move": "R1",
            "patch": list(crossings),
            "convention": convention.id,
            "checks": checks,
            "pass": not diffs,
        }
    try:
        eq = MoveEquivalence(diagram, tuple(crossings), kind, convention)
        report = eq.report(patch=crossings)
    except AssertionError as exc:
        return {
            "move": kind,
            "patch": list(crossings),
            "convention": convention.id,
            "checks": [{"name": "construction", "pass": False,
                        "first_violation": {"error": str(exc)}}],
            "pass": False,
        }
    diffs = compare_tables(
        homology_groups(build_complex(diagram)),
        homology_groups(build_complex(eq.target_diagram)),
    )
    report["checks"].append({"name": "homology_invariance", "pass": not diffs})
    report["pass"] = report["pass"] and not diffs
    return report


def cmd_verify_move(args) -> int:
    diagram = parse_pd(_read_pd(args.pd))
    convention = CONVENTIONS[args.convention]
    kind = args.kind.upper()
    report = _verify_move(diagram, kind, args.crossings, convention)
    if args.search:
        patch = MovePatch(kind, "verify", crossings=tuple(args.crossings))
        passing = convention_search(diagram, patch, kind)
        report["convention_search"] = {
            "candidates_passing": len(passing),
            "default_passes": any(
                c == replace(convention, name=c.name) for c in passing
            ),
        }

    def render(p):
        for c in p["checks"]:
            status = "pass" if c["pass"] else f"FAIL {c.get('first_violation')}"
            print(f"{c['name']:<28} {status}")
        if "convention_search" in p:
            print(f"satisfying conventions: "
                  f"{p['convention_search']['candidates_passing']}")

    _emit(report, args.format, render)
    return EXIT_OK if report["pass"] else EXIT_VERIFICATION


def default_corpus_path() -> str:
    return str(importlib.resources.files("khovanov.data") / "corpus.json")


@dataclass
class CorpusEntry:
    """One manifest row: a named diagram with optional expected invariants
    and move annotations relating it to other entries."""

    name: str
    pd: str
    jones: dict | None = None
    homology: list | None = None
    moves: list = field(default_factory=list)

    @classmethod
    def from_json(cls, row: dict) -> "CorpusEntry":
        entry = cls(
            name=row["name"],
            pd=row["pd"],
            jones=row.get("jones"),
            homology=row.get("homology"),
            moves=list(row.get("moves", ())),
        )
        parse_pd(entry.pd)  # the PD string must parse
        if entry.jones is not None:
            LaurentPoly.from_json(entry.jones)
        if entry.homology is not None:
            HomologyTable.from_json(entry.homology)
        for move in entry.moves:
            if move.get("kind") not in ("R1", "R2", "R3"):
                raise ValueError(f"{entry.name}: bad move kind {move})")
        return entry


def _run_entry(entry: "CorpusEntry", by_name, convention, max_crossings):
    checks = {}
    diagram = parse_pd(entry.pd)
    jk = jones_kauffman(diagram, max_crossings)
    jr = jones_refined(diagram, max_crossings)
    checks["jones_two_ways"] = jk == jr
    if entry.jones is not None:
        checks["jones_expected"] = jk == LaurentPoly.from_json(entry.jones)
    cx = build_complex(diagram, max_crossings=max_crossings)
    checks["d_squared"] = not verify_d_squared(cx)
    checks["euler"] = graded_euler(cx) == jk
    table = homology_groups(cx)
    if entry.homology is not None:
        checks["homology_expected"] = not compare_tables(
            table, HomologyTable.from_json(entry.homology)
        )
    for k, move in enumerate(entry.moves):
        partner = by_name.get(move["partner"])
        label = f"move_{k}_{move['kind']}"
        if partner is None:
            checks[label] = False
            continue
        partner_table = homology_groups(
            build_complex(parse_pd(partner.pd), max_crossings=max_crossings)
        )
        ok = not compare_tables(table, partner_table)
        if move["kind"] in ("R2", "R3"):
            try:
                report = _verify_move(
                    diagram, move["kind"], move["patch"], convention
                )
                ok = ok and report["pass"]
            except PatchMismatchError:
                ok = False
        checks[label] = ok
    return {"name": entry.name,
            "pass": all(v is True for v in checks.values()),
            "checks": checks}


def cmd_corpus(args) -> int:
    path = args.manifest or default_corpus_path()
    with open(path) as f:
        entries = [CorpusEntry.from_json(row) for row in json.load(f)]
    by_name = {e.name: e for e in entries}
    convention = CONVENTIONS[args.convention]
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(
                pool.map(
                    lambda e: _run_entry(e, by_name, convention,
                                         args.max_crossings),
                    entries,
                )
            )
    else:
        results = [
            _run_entry(e, by_name, convention, args.max_crossings)
            for e in entries
        ]
    payload = {"results": results, "pass": all(r["pass"] for r in results)}

    def render(p):
        for r in p["results"]:
            status = "pass" if r["pass"] else "FAIL"
            bad = [k for k, v in r["checks"].items() if v is not True]
            print(f"{r['name']:<20} {status}" + (f"  ({', '.join(bad)})" if bad else ""))
        print(f"corpus: {'pass' if p['pass'] else 'FAIL'}")

    _emit(payload, args.format, render)
    return EXIT_OK if payload["pass"] else EXIT_VERIFICATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="khovanov",
        description="Khovanov homology of link diagrams, with verified "
        "Reidemeister II/III chain homotopy equivalences",
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--convention", choices=sorted(CONVENTIONS),
                        default="default")
    parser.add_argument("--max-crossings", type=int,
                        default=DEFAULT_MAX_CROSSINGS,
                        help="guard against exponential state counts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jones", help="evaluate both Jones state sums")
    p.add_argument("pd", help="PD text, or @file")
    p.set_defaults(func=cmd_jones)

    p = sub.add_parser("homology", help="integral Khovanov homology table")
    p.add_argument("pd")
    p.add_argument("--check-euler", action="store_true")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("verify-move", help="run the identity suite for a move")
    p.add_argument("pd")
    p.add_argument("kind", choices=("R1", "R2", "R3", "r1", "r2", "r3"))
    p.add_argument("crossings", type=int, nargs="+",
                   help="patch crossing ids in template order")
    p.add_argument("--search", action="store_true",
                   help="also run the sign-convention search")
    p.set_defaults(func=cmd_verify_move)

    p = sub.add_parser("corpus", help="run a corpus manifest")
    p.add_argument("manifest", nargs="?",
                   help="manifest JSON (default: shipped corpus)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PDSyntaxError, DiagramError, TooManyCrossingsError,
            FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PatchMismatchError as exc:
        print(f"patch mismatch: {exc}", file=sys.stderr)
        return EXIT_PATCH


if __name__ == "__main__":
    sys.exit(main())
