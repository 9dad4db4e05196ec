"""Command-line front end.

Exit codes: 0 success, 1 a boolean verdict was false under --strict,
2 usage or input error, 3 a size guard was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import Sequence

from .algebra import FiniteAlgebra, load_algebra, menu_algebra
from .config import Guards, get_guards, set_guards
from .errors import GuardError, LogeoError
from .formula import format_formula, parse_formula, value
from .signature import VarSort
from .space import format_pointset, pointset_to_hex

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class Usage(LogeoError):
    pass


def load(name: str) -> FiniteAlgebra:
    """A menu name (z4, z2xz4, e2^3, s3, d4, q8) or a path to a JSON document."""
    if os.path.exists(name):
        with open(name, encoding="utf-8") as fh:
            return load_algebra(fh.read())
    return menu_algebra(name)


def _sort(text: str) -> VarSort:
    try:
        return VarSort.parse(text)
    except LogeoError as exc:
        raise Usage(str(exc)) from exc


def _pt(p: Sequence[int]) -> str:
    return "(" + ", ".join(map(str, p)) + ")" if len(p) != 1 else str(p[0])


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


class Out:
    def __init__(self, args):
        self.json = args.format == "json"
        self.strict = args.strict
        self.verdicts: list[bool] = []

    def emit(self, text: str, doc) -> None:
        if self.json:
            print(json.dumps(doc, sort_keys=True))
        else:
            print(text)

    def verdict(self, v: bool) -> bool:
        self.verdicts.append(bool(v))
        return v

    def code(self) -> int:
        return EXIT_FALSE if self.strict and not all(self.verdicts) else EXIT_OK


# -- subcommands ----------------------------------------------------------------


def cmd_eval(args, out: Out):
    H, X = load(args.algebra), _sort(args.sort)
    u = parse_formula(args.formula, H.signature, X)
    A = value(u, H, X)
    text = pointset_to_hex(A) if args.hex else format_pointset(A)
    out.emit(text, {
        "algebra": H.name, "sort": list(X.vars), "formula": format_formula(u, H.signature),
        "points": [list(p) for p in A.points()], "hex": pointset_to_hex(A), "size": len(A),
    })  # fmt: skip


def cmd_types(args, out: Out):
    from .typesys import type_census

    H, X = load(args.algebra), _sort(args.sort)
    census = type_census(H, X, with_formulas=not args.no_formulas)
    rows = [(r.cid, r.size, _pt(r.representative), r.formula or "") for r in census.rows]
    text = f"{len(rows)} types of {H.name} over {X}\n" + _table(("id", "size", "representative", "formula"), rows)
    out.emit(text, census.to_json())


def cmd_partitions(args, out: Out):
    from .space import point_values
    from .typesys import chain_check, orbit_partition, rho_partition, tau_partition

    H, X = load(args.algebra), _sort(args.sort)
    tau, rho, orb = tau_partition(H, X), rho_partition(H, X), orbit_partition(H, X)
    report = chain_check(H, X)
    m, n = H.size, len(X)
    rows = [(_pt(point_values(i, m, n)), int(tau.ids[i]), int(rho.ids[i]), int(orb.ids[i])) for i in range(m**n)]
    summary = (
        f"tau {tau.num_classes} classes, rho {rho.num_classes}, orbits {orb.num_classes}; "
        f"chain orbit <= rho <= tau holds"
    )
    out.emit(
        _table(("point", "tau", "rho", "orbit"), rows) + "\n" + summary,
        {**report, "points": [{"point": list(point_values(i, m, n)), "tau": r[1], "rho": r[2], "orbit": r[3]}
                               for i, r in enumerate(rows)]},
    )  # fmt: skip


def cmd_perfect(args, out: Out):
    from .typesys import is_homogeneous, is_logically_perfect, is_strictly_perfect

    H, X = load(args.algebra), _sort(args.sort)
    verdicts = {
        "logically_perfect": is_logically_perfect(H, X),
        "strictly_perfect": is_strictly_perfect(H, X),
        "homogeneous": is_homogeneous(H, X),
    }
    main = "homogeneous" if args.command == "homogeneous" else "logically_perfect"
    out.verdict(verdicts[main])
    lines = [f"{k.replace('_', ' ')}: {str(v).lower()}" for k, v in verdicts.items()]
    out.emit("\n".join(lines), {"algebra": H.name, "sort": list(X.vars), "verdict": verdicts[main], **verdicts})


def cmd_isotyped(args, out: Out):
    from .typesys import isotyped

    H1, H2, X = load(args.alg1), load(args.alg2), _sort(args.sort)
    r = isotyped(H1, H2, X)
    out.verdict(r.verdict)
    w = format_formula(r.witness, H1.signature) if r.witness is not None else None
    text = str(r.verdict).lower() + (f"\nwitness (true in {r.true_in}): {w}" if w else "")
    if not r.converged:
        text += "\nnote: escalation guard reached before stabilizing"
    out.emit(text, {"verdict": r.verdict, "witness": w, "true_in": r.true_in, "aux": r.aux, "converged": r.converged})


def cmd_batch(args, out: Out):
    from .geometry import run_batch

    H, X = load(args.algebra), _sort(args.sort)
    with open(args.file, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    wanted = "closure" if args.command == "closure" else "quasi"
    results = run_batch(lines, H, X, os.path.dirname(os.path.abspath(args.file)))
    for r in results:
        if r.kind != wanted:
            raise Usage(f"line {r.line}: {r.kind} query in a {wanted} batch")
        out.verdict(r.verdict)
    out.emit(
        "\n".join(f"{r.line}: {str(r.verdict).lower()}" for r in results),
        {"results": [r.to_json() for r in results]},
    )


def cmd_census(args, out: Out):
    from .typesys import exponent_p_census, order_formula_census

    if args.kind == "exp-p":
        if len(args.params) != 3:
            raise Usage("census exp-p needs p m n")
        try:
            p, m, n = (int(v) for v in args.params)
        except ValueError as exc:
            raise Usage("census exp-p needs integers p m n") from exc
        r = exponent_p_census(p, m, n)
        head = f"(Z/{p})^{m}, |X|={n}: {r['orbits']} orbits, {r['subspaces']} subspaces of F_{p}^{n}"
        rows = [(row["dim"], row["size"], str(row["one_orbit"]).lower(), row["formula"]) for row in r["rows"]]
        table = _table(("dim", "size", "one orbit", "formula"), rows)
    else:
        if len(args.params) != 2:
            raise Usage("census orders needs an algebra and a sort")
        H, X = load(args.params[0]), _sort(args.params[1])
        r = order_formula_census(H, X)
        head = f"{H.name} over {X}: {r['formulas']} order formulas, {r['orbits']} orbits, {r['types']} types"
        rows = [(",".join(map(str, row["orders"])), row["size"], str(row["one_orbit"]).lower(), row["formula"])
                for row in r["rows"]]  # fmt: skip
        table = _table(("orders", "size", "one orbit", "formula"), rows)
    out.verdict(r["ok"])
    out.emit(f"{head}\n{table}\nverdict: {str(r['ok']).lower()}", r)


def cmd_axioms(args, out: Out):
    from .axioms import run_axioms

    algs = [load(a) for a in args.algebra.split(",")]
    X = _sort(args.sort)
    rep = run_axioms(algs, samples=args.samples, seed=args.seed, max_vars=len(X))
    out.verdict(rep.ok)
    rows = [(r.name, r.instances, r.violations, r.example or "") for r in rep.results]
    text = _table(("law", "instances", "violations", "first violation"), rows)
    out.emit(text + f"\n{'all laws hold' if rep.ok else 'VIOLATIONS FOUND'}", rep.to_json())


def cmd_zline(args, out: Out):
    from .zline import ZPoint, build_test_formula, z_isotyped

    if args.action == "test":
        if len(args.tuples) != 1:
            raise Usage("zline test needs one tuple")
        f = build_test_formula(ZPoint.parse(args.tuples[0]))
        out.emit(f.format(), {"coeffs": list(f.coeffs), "rotation": f.rotation, "formula": f.format()})
        return
    if len(args.tuples) != 2:
        raise Usage("usage: zline isotyped <a> -- <b>")
    a, b = (ZPoint.parse(t) for t in args.tuples)
    r = z_isotyped(a, b)
    out.verdict(r.verdict)
    w = r.witness.format() if r.witness is not None else None
    text = str(r.verdict).lower() + (f"\nwitness (true at {r.true_at}): {w}" if w else "")
    out.emit(text, {"verdict": r.verdict, "witness": w, "true_at": r.true_at})


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--guard-points", type=int, default=argparse.SUPPRESS, metavar="N")
    common.add_argument("--guard-carrier", type=int, default=argparse.SUPPRESS, metavar="N")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--strict", action="store_true", default=argparse.SUPPRESS,
                        help="exit 1 when a boolean verdict is false")  # fmt: skip

    p = argparse.ArgumentParser(prog="logeo", description="Logical geometry over finite algebras.", parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("eval", cmd_eval, "value of a formula")
    sp.add_argument("algebra")
    sp.add_argument("sort")
    sp.add_argument("formula")
    sp.add_argument("--hex", action="store_true", help="print the raw bit-vector")

    sp = add("types", cmd_types, "type census (one row per rho-class)")
    sp.add_argument("algebra")
    sp.add_argument("sort")
    sp.add_argument("--no-formulas", action="store_true")

    sp = add("partitions", cmd_partitions, "tau, rho and orbit partitions side by side")
    sp.add_argument("algebra")
    sp.add_argument("sort")

    for name in ("perfect", "homogeneous"):
        sp = add(name, cmd_perfect, "perfectness and homogeneity verdicts")
        sp.add_argument("algebra")
        sp.add_argument("sort")

    sp = add("isotyped", cmd_isotyped, "isotypy of two algebras at a sort")
    sp.add_argument("alg1")
    sp.add_argument("alg2")
    sp.add_argument("sort")

    for name in ("closure", "quasi"):
        sp = add(name, cmd_batch, f"batch of {name.upper()}? queries")
        sp.add_argument("algebra")
        sp.add_argument("sort")
        sp.add_argument("file")

    sp = add("census", cmd_census, "exp-p <p> <m> <n> | orders <algebra> <sort>")
    sp.add_argument("kind", choices=("exp-p", "orders"))
    sp.add_argument("params", nargs="+")

    sp = add("axioms", cmd_axioms, "randomized law suite")
    sp.add_argument("algebra", help="menu name or file; several separated by commas")
    sp.add_argument("sort", help="its size bounds the sorts sampled")
    sp.add_argument("--samples", type=int, default=500)

    sp = add("zline", cmd_zline, "tuples over the infinite cyclic group")
    sp.add_argument("action", choices=("isotyped", "test"))
    sp.add_argument("tuples", nargs="*")
    return p


def _zline_argv(argv: list[str]) -> list[str]:
    # "zline isotyped 2,4 -- -2,-4": keep negative tuples away from option parsing
    if "zline" in argv and "--" in argv:
        i = argv.index("--")
        return argv[:i] + [a if not a.startswith("-") else " " + a for a in argv[i + 1 :]]
    return argv


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_zline_argv(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    args.tuples = [t.strip() for t in getattr(args, "tuples", [])]
    for key, default in (("format", "text"), ("seed", 0), ("strict", False)):
        if not hasattr(args, key):
            setattr(args, key, default)
    prev = get_guards()
    try:
        g = prev
        if hasattr(args, "guard_points"):
            g = replace(g, points=args.guard_points)
        if hasattr(args, "guard_carrier"):
            g = replace(g, carrier=args.guard_carrier)
        set_guards(Guards(g.points, g.carrier))
        out = Out(args)
        args.fn(args, out)
        return out.code()
    except GuardError as exc:
        print(f"logeo: guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (LogeoError, OSError) as exc:
        print(f"logeo: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        set_guards(prev)


if __name__ == "__main__":
    sys.exit(main())
