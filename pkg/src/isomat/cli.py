"""Command-line front end.

Exit codes: 0 success or affirmative answer, 1 negative answer, 2 input
error, 3 certification failure, 4 resource cap reached.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .forestgen import verify_theorem_main
from .gf2 import column_add_transform
from .isotropic import Graph, NotAForestError, cycle, ia_matroid, ias_matroid, parse_graph, path
from .matroid import (BinaryMatroid, GroundMap, Kind, ResourceLimitError, automorphisms,
                      find_isomorphism, format_ground_map, parse_ground_map, verify_map)
from .reconstruct import (CertificationError, format_vertex_map, phi_agrees, reconstruct_forest_iso_ia,
                          reconstruct_forest_iso_ias)
from .triangulate import DEFAULT_ENUM_BOUND, DEFAULT_ORBIT_CAP, analyze_triangulations, format_triangulation

log = logging.getLogger("isomat")

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_CERT, EXIT_CAP = 0, 1, 2, 3, 4

BUILDERS = {"ia": ia_matroid, "ias": ias_matroid}

# an automorphism of M[IAS(P4)] unrelated to either automorphism of P4
P4_STRANGE_MAP = """\
phi:0 -> chi:2
phi:1 -> chi:0
phi:2 -> chi:3
phi:3 -> chi:1
chi:0 -> phi:1
chi:1 -> psi:2
chi:2 -> psi:1
chi:3 -> phi:2
psi:0 -> phi:3
psi:1 -> psi:3
psi:2 -> psi:0
psi:3 -> phi:0
"""


class InputError(ValueError):
    pass


def _read_graph(p: str) -> Graph:
    try:
        text = Path(p).read_text()
    except OSError as exc:
        raise InputError(f"{p}: {exc.strerror}") from None
    try:
        return parse_graph(text)
    except ValueError as exc:
        raise InputError(f"{p}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def label_table(M: BinaryMatroid) -> str:
    return "".join(f"{i} {x}\n" for i, x in enumerate(M.labels))


# subcommands

def cmd_build(args) -> int:
    M = BUILDERS[args.which](_read_graph(args.graph))
    if args.format == "json":
        _emit(json.dumps({"rows": M.matrix.to_lists(), "labels": [str(x) for x in M.labels]}) + "\n",
              args.out)
    elif args.out:
        Path(args.out).write_text(M.matrix.to_text())
        Path(args.out + ".labels").write_text(label_table(M))
    else:
        sys.stdout.write(M.matrix.to_text() + label_table(M))
    return EXIT_OK


def cmd_check_iso(args) -> int:
    A, B = _read_graph(args.graph_a), _read_graph(args.graph_b)
    build = BUILDERS[args.which]
    MA, MB = build(A), build(B)
    f = find_isomorphism(MA, MB, node_cap=args.node_cap)
    if f is None:
        if not args.quiet:
            print(f"M[{args.which.upper()}] not isomorphic")
        return EXIT_NO
    if not verify_map(MA, MB, f):
        raise CertificationError("search returned a map that fails verification")
    text = format_ground_map(f, MA.labels)
    if args.out:
        Path(args.out).write_text(text)
    if not args.quiet:
        print(f"M[{args.which.upper()}] isomorphic")
        if not args.out:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    A, B = _read_graph(args.graph_a), _read_graph(args.graph_b)
    A.require_forest()
    B.require_forest()
    try:
        f = parse_ground_map(Path(args.map_file).read_text())
    except OSError as exc:
        raise InputError(f"{args.map_file}: {exc.strerror}") from None
    except ValueError as exc:
        raise InputError(f"{args.map_file}: {exc}") from None
    which = args.which or ("ias" if any(x.kind is Kind.PSI for x in f) else "ia")
    MA, MB = BUILDERS[which](A), BUILDERS[which](B)
    if set(f) != set(MA.labels) or set(f.values()) != set(MB.labels):
        raise CertificationError("map is not a bijection between the ground sets")
    if which == "ia":
        g = reconstruct_forest_iso_ia(A, B, f)
        f_adj = None
    else:
        f_adj, g = reconstruct_forest_iso_ias(A, B, f, node_cap=args.node_cap)
    if args.format == "json":
        payload = {"which": which, "map": {str(u): g[u] for u in sorted(g)}, "certified": True}
        if f_adj is not None:
            payload["adjusted"] = {str(x): str(f_adj[x]) for x in MA.labels}
        _emit(json.dumps(payload) + "\n", args.out)
    else:
        _emit(format_vertex_map(g), args.out)
    if f_adj is not None:
        log.debug("adjusted ground map:\n%s", format_ground_map(f_adj, MA.labels))
    return EXIT_OK


def cmd_verify(args) -> int:
    def progress(rec):
        log.debug("%s", rec.line())

    start = time.perf_counter()
    report = verify_theorem_main(args.n_max, args.tree_n_max, seed=args.seed,
                                 progress=progress, node_cap=args.node_cap)
    elapsed = time.perf_counter() - start
    if args.format == "json":
        _emit(json.dumps({"ok": report.ok, "capped": report.capped, "seconds": round(elapsed, 3),
                          "records": report.to_json()}) + "\n", args.out)
    else:
        text = report.to_text()
        if report.capped:
            text += "# partial: resource cap reached\n"
        _emit(text, args.out)
    if not args.quiet:
        iso = sum(r.forest_iso for r in report.records)
        msg = (f"{len(report.records)} pairs ({iso} isomorphic), "
               f"{len(report.failures)} failures, {elapsed:.1f}s")
        print(msg, file=sys.stderr)
        for r in report.failures:
            print(f"FAIL {r.line()} {r.error or ''}", file=sys.stderr)
    if report.capped:
        return EXIT_CAP
    return EXIT_OK if report.ok else EXIT_CERT


def cmd_triangulations(args) -> int:
    G = _read_graph(args.graph)
    G.require_forest()
    s = analyze_triangulations(G, bound=args.bound, orbit_cap=args.orbit_cap)
    M = ias_matroid(G)
    ps_vertex = s.vertex_class is not None and s.all_ps_equivalent
    if args.format == "json":
        payload = {
            "count": s.count,
            "ps_classes": [len(c) for c in s.ps_classes],
            "equivalence_classes": len(s.equivalence_classes),
            "all_ps_equivalent_to_vertex": ps_vertex,
            "all_equivalent_to_vertex": len(s.witnesses) == len(s.ps_classes),
            "non_ps_equivalent": [[[str(x) for x in t] for t in c[0].sorted_triples(M)]
                                  for i, c in enumerate(s.ps_classes) if i != s.vertex_class],
        }
        _emit(json.dumps(payload) + "\n", args.out)
    else:
        lines = [f"triangulations: {s.count}",
                 f"ps-classes: {len(s.ps_classes)} (sizes {[len(c) for c in s.ps_classes]})",
                 f"equivalence classes: {len(s.equivalence_classes)}",
                 f"all ps-equivalent to vertex triangulation: {'yes' if ps_vertex else 'no'}",
                 f"all equivalent to vertex triangulation: "
                 f"{'yes' if len(s.witnesses) == len(s.ps_classes) else 'no'}"]
        for i, c in enumerate(s.ps_classes):
            if i == s.vertex_class:
                continue
            lines.append(f"not ps-equivalent (class {i}, {len(c)} members), representative:")
            lines.extend("  " + t for t in format_triangulation(M, c[0]).splitlines())
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if len(s.witnesses) == len(s.ps_classes) else EXIT_CERT


def _kappa_route(src: BinaryMatroid, steps, target: BinaryMatroid) -> GroundMap | None:
    """Apply column additions and match the columns against ``target``."""
    B = src.matrix
    for pivot, kappa in steps:
        B = column_add_transform(B, pivot, kappa)
    pool: dict[int, list] = {}
    for y in target.labels:
        pool.setdefault(target.column(y), []).append(y)
    f = {}
    for x, c in zip(src.labels, B.columns):
        if not pool.get(c):
            return None
        f[x] = pool[c].pop(0)
    return f


def demo_checks(aut_cap: int = 64) -> list[tuple[str, bool]]:
    out = []
    for name, M in (("IAS(C3)", ias_matroid(cycle(3))), ("IAS(P3)", ias_matroid(path(3))),
                    ("IA(P4)", ia_matroid(path(4))), ("IA(C4)", ia_matroid(cycle(4))),
                    ("IAS(P4)", ias_matroid(path(4)))):
        log.info("%s:\n%s", name, M.matrix)
    pairs = [
        ("IAS(C3) ~ IAS(P3)", ias_matroid(cycle(3)), ias_matroid(path(3)), [(1, 0b101)]),
        ("IA(P4) ~ IA(C4)", ia_matroid(path(4)), ia_matroid(cycle(4)), [(2, 0b0001), (1, 0b1000)]),
    ]
    for name, M1, M2, steps in pairs:
        f = find_isomorphism(M1, M2)
        out.append((f"{name} by search", f is not None and verify_map(M1, M2, f)))
        g = _kappa_route(M1, steps, M2)
        out.append((f"{name} by column additions", g is not None and verify_map(M1, M2, g)))
    P4 = path(4)
    M = ias_matroid(P4)
    f = parse_ground_map(P4_STRANGE_MAP)
    out.append(("IAS(P4) table is an automorphism", verify_map(M, M, f)))
    f_adj, g = reconstruct_forest_iso_ias(P4, P4, f)
    log.info("P4 automorphism recovered from the table: %s", g)
    ok = sorted(g.values()) == list(P4.vertices) and all(P4.adjacent(g[u], g[v]) for u, v in P4.edges())
    out.append(("IAS(P4) table reconstructs to an automorphism of P4", ok and phi_agrees(g, f_adj)))
    out.append(("|Aut(M[IA(P3)])| = 36", len(automorphisms(ia_matroid(path(3)), cap=aut_cap)) == 36))
    return out


def cmd_demo(args) -> int:
    checks = demo_checks(args.aut_cap)
    for name, ok in checks:
        if not args.quiet:
            print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_CERT


# argument parsing

def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _n_max(text: str) -> int:
    v = _positive(text)
    if v > 7:
        raise argparse.ArgumentTypeError("sweeps go up to 7 vertices")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--orbit-cap", type=_positive, default=DEFAULT_ORBIT_CAP)
    common.add_argument("--aut-cap", type=_positive, default=64,
                        help="largest ground set for automorphism enumeration")
    common.add_argument("--node-cap", type=_positive, default=None,
                        help="node budget for isomorphism searches")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-q", "--quiet", action="store_true")
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug trace")

    p = argparse.ArgumentParser(prog="isomat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="write the IA or IAS matrix of a graph")
    b.add_argument("graph")
    b.add_argument("--which", choices=BUILDERS, default="ias")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check-iso", parents=[common], help="test isomorphism of two matroids")
    c.add_argument("graph_a")
    c.add_argument("graph_b")
    c.add_argument("--which", choices=BUILDERS, default="ias")
    c.set_defaults(func=cmd_check_iso)

    r = sub.add_parser("reconstruct", parents=[common],
                       help="recover a forest isomorphism from a matroid isomorphism")
    r.add_argument("graph_a")
    r.add_argument("graph_b")
    r.add_argument("map_file")
    r.add_argument("--which", choices=BUILDERS, default=None, help="default: inferred from labels")
    r.set_defaults(func=cmd_reconstruct)

    v = sub.add_parser("verify", parents=[common], help="exhaustive forest sweep")
    v.add_argument("--n-max", type=_n_max, default=5)
    v.add_argument("--tree-n-max", type=_n_max, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("triangulations", parents=[common], help="triangulations of M[IAS(F)]")
    t.add_argument("graph")
    t.add_argument("--bound", type=_positive, default=DEFAULT_ENUM_BOUND,
                   help="largest ground set to enumerate")
    t.set_defaults(func=cmd_triangulations)

    d = sub.add_parser("demo", parents=[common], help="replay the worked small examples")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except (InputError, NotAForestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT
    except ResourceLimitError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
