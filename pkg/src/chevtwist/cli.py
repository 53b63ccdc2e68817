"""Command-line front end.

Every subcommand prints either an aligned plain-text table or sorted,
indented JSON. Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ChevError
from .group import (
    character_of,
    count_k,
    decompose_torus,
    k_closed_form,
    parse_element,
    torus_degrees,
    torus_from_character,
)
from .lie import build_chevalley_basis
from .roots import DiagramSymmetry, RootSystemType, diagram_symmetries, enumerate_roots, format_root
from .scalars import FieldAutomorphism, parse_field
from .smith import determinant, smith_normal_form
from .twisted import (
    compose,
    make_automorphism,
    r_infinity_witness,
    unit_class_refutation,
    verify_certificate,
)


class UsageError(Exception):
    pass


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


def _table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _matrix_text(m) -> str:
    return _table([""] * len(m[0]), m).split("\n", 2)[-1]


def _type(args) -> RootSystemType:
    if getattr(args, "type", None):
        return RootSystemType.parse(args.type)
    if args.family is None or args.rank is None:
        raise UsageError("need --type or both --family and --rank")
    return RootSystemType(args.family.upper(), args.rank)


def _ranks(s: str) -> list[int]:
    if ".." in s:
        lo, hi = s.split("..", 1)
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise UsageError(f"--ranks: bad range {s!r}") from None
    try:
        return [int(x) for x in s.split(",")]
    except ValueError:
        raise UsageError(f"--ranks: bad list {s!r}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_roots(args) -> str:
    rs = enumerate_roots(_type(args))
    if args.format == "json":
        doc = rs.to_json()
        doc["counts"] = {"roots": len(rs.roots), "positive": len(rs.positive_roots), "k": count_k(rs)}
        return _dump(doc)
    rows = [[format_root(r), rs.height(r), "long" if rs.is_long(r) else "short", "I" if rs.supported_on_index_set(r) else ""] for r in rs.roots]
    return _table(["root", "height", "length", "on I"], rows) + f"\n\n|Phi| = {len(rs.roots)}, positive = {len(rs.positive_roots)}, k = {count_k(rs)}"


def cmd_cartan(args) -> str:
    rs = enumerate_roots(_type(args))
    det = determinant(rs.cartan)
    if args.format == "json":
        return _dump({"type": str(rs.type), "cartan_matrix": rs.cartan, "determinant": det})
    return _matrix_text(rs.cartan) + f"\n\ndet = {det}"


def cmd_smith(args) -> str:
    rs = enumerate_roots(_type(args))
    d, u, v = smith_normal_form(rs.cartan)
    diag = [d[i][i] for i in range(len(d))]
    if args.format == "json":
        return _dump({"type": str(rs.type), "diagonal": diag, "M": rs.cartan, "D": d, "U": u, "V": v})
    return "diag(" + ",".join(map(str, diag)) + ")\n\nU =\n" + _matrix_text(u) + "\n\nV =\n" + _matrix_text(v)


def cmd_basis(args) -> str:
    b = build_chevalley_basis(_type(args))
    if args.format == "json":
        return _dump(b.to_json())
    rs = b.rs
    rows = [[format_root(a), format_root(c), format_root(rs.add(a, c)), n] for (a, c), n in sorted(b.structure_constants.items()) if sum(a) > 0 and sum(c) > 0]
    return _table(["alpha", "beta", "alpha+beta", "N"], rows)


def cmd_element(args) -> str:
    b = build_chevalley_basis(_type(args))
    f = parse_field(args.field)
    g = parse_element(b, args.expr, f)
    if args.times:
        g = g * parse_element(b, args.times, f)
    if args.invert:
        g = g.inverse()
    if args.format == "json":
        return _dump(g.to_json())
    return _matrix_text([[f.format(v) for v in r] for r in g.matrix.to_dense()])


def _character(args, f, rank):
    vals = [f.parse(s) for s in args.chi.split(",")]
    if len(vals) != rank:
        raise UsageError(f"--chi needs {rank} values")
    return vals


def cmd_decompose(args) -> str:
    b = build_chevalley_basis(_type(args))
    f = parse_field(args.field)
    h = torus_from_character(b, _character(args, f, b.rank), f)
    h1, h2 = decompose_torus(b, h)
    doc = {
        "type": str(b.rs.type),
        "chi": [f.format(v) for v in h.character.values],
        "t": [f.format(t) for t in h1.factors],
        "h2_chi": [f.format(v) for v in character_of(h2.element).values],
        "index_set": [i + 1 for i in b.rs.profile.index_set],
    }
    if args.format == "json":
        return _dump(doc)
    return _table(["i", "chi(alpha_i)", "t_i", "h2(alpha_i)"], [[i + 1, doc["chi"][i], doc["t"][i], doc["h2_chi"][i]] for i in range(b.rank)])


def cmd_ktable(args) -> str:
    rows = []
    for l in _ranks(args.ranks):
        t = RootSystemType(args.family.upper(), l)
        rs = enumerate_roots(t)
        k = count_k(rs)
        rows.append({"type": str(t), "roots": len(rs.roots), "k": k, "formula": k_closed_form(t), "match": k == k_closed_form(t)})
    if args.format == "json":
        return _dump(rows)
    return _table(["type", "|Phi|", "k", "formula", "match"], [[r["type"], r["roots"], r["k"], r["formula"], "yes" if r["match"] else "NO"] for r in rows])


def cmd_degrees(args) -> str:
    rs = enumerate_roots(_type(args))
    dt = torus_degrees(rs)
    doc = {
        "type": str(rs.type),
        "degrees": [[list(r), dt.degrees[r]] for r in rs.roots],
        "max_abs_degree": dt.max_abs,
        "argmax": list(dt.argmax),
        "listed_root": list(dt.listed),
        "listed_is_root": dt.listed_is_root,
        "listed_attains_max": dt.listed_attains_max,
        "listed_degree": dt.listed_degree,
    }
    if args.format == "json":
        return _dump(doc)
    body = _table(["root", "degree"], [[format_root(r), dt.degrees[r]] for r in rs.roots])
    return body + (
        f"\n\nmax |d| = {dt.max_abs} at {format_root(dt.argmax)}"
        f"\nlisted {format_root(dt.listed)}: root={dt.listed_is_root} degree={dt.listed_degree} attains max={dt.listed_attains_max}"
    )


def _automorphism(args, b, f):
    rho = None
    if args.graph:
        try:
            perm = tuple(int(x) - 1 for x in args.graph.split(","))
        except ValueError:
            raise UsageError(f"--graph: bad permutation {args.graph!r}") from None
        rho = DiagramSymmetry(perm)
    chi = None
    if args.diag:
        chi = [f.parse(s) for s in args.diag.split(",")]
        if len(chi) != b.rank:
            raise UsageError(f"--diag needs {b.rank} values")
    delta = FieldAutomorphism.parse(args.delta) if args.delta else None
    inner = parse_element(b, args.inner, f) if args.inner else None
    phi = make_automorphism(b, f, rho, delta, chi, inner)
    if args.triality:
        tri = [s for s in diagram_symmetries(b.rs.type) if s.order == 3]
        if not tri:
            raise UsageError(f"--triality: {b.rs.type} has no order-3 symmetry")
        phi = compose(make_automorphism(b, f, tri[0]), phi)
    return phi


def cmd_witness(args) -> str:
    b = build_chevalley_basis(_type(args))
    f = parse_field(args.field)
    phi = _automorphism(args, b, f)
    cert = r_infinity_witness(phi, args.n, args.strategy, args.seed, args.budget, args.charpoly)
    if args.verify:
        v = verify_certificate(cert)
        if not v.ok:
            raise RuntimeError("certificate failed re-check: " + "; ".join(v.problems))
    if args.format == "json":
        return cert.dumps()
    rows = [[i + 1, json.dumps(e["construction"], sort_keys=True), e["invariant"]] for i, e in enumerate(cert.elements)]
    return _table(["i", "construction", "psi"], rows) + f"\n\nm = {cert.m}, distinct = {cert.distinct}"


def cmd_refute(args) -> str:
    b = build_chevalley_basis(_type(args))
    f = parse_field(args.field)
    phi = _automorphism(args, b, f)
    res = unit_class_refutation(phi, args.budget, args.seed, args.word_length)
    if args.format == "json":
        return res.dumps()
    if not res.found:
        return f"no refutation within {res.budget} candidates"
    return f"z1 = {res.z1}\nz2 = {res.z2}\npsi(xy) = {res.psi_xy}\npsi(e) = {res.psi_e}\nattempts = {res.attempts}"


def cmd_verify(args) -> str:
    with open(args.certificate) as fh:
        v = verify_certificate(json.load(fh))
    if args.format == "json":
        text = _dump({"ok": v.ok, "problems": v.problems})
    else:
        text = "ok" if v.ok else "FAILED\n" + "\n".join(v.problems)
    # a rejected certificate is a domain failure: print the report, exit 1
    return text, 0 if v.ok else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chevtwist", description="Chevalley groups, twisted conjugacy and R-infinity certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    def typed(name, func, help_, fmt="table"):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--family", choices=list("ABCDEFGabcdefg"))
        sp.add_argument("--rank", type=int)
        sp.add_argument("--type", help="shorthand such as A3 or E6")
        sp.add_argument("--format", choices=["table", "json"], default=fmt)
        sp.set_defaults(func=func)
        return sp

    typed("roots", cmd_roots, "enumerate roots")
    typed("cartan", cmd_cartan, "Cartan matrix and determinant")
    typed("smith", cmd_smith, "Smith normal form of the Cartan matrix")
    typed("basis", cmd_basis, "structure constants of the Chevalley basis")

    sp = typed("element", cmd_element, "build a group element from generator words")
    sp.add_argument("--field", default="Q")
    sp.add_argument("--expr", required=True, help="e.g. 'x([1,0];2) h([0,1];3)'")
    sp.add_argument("--times", help="second expression to multiply on the right")
    sp.add_argument("--invert", action="store_true")

    sp = typed("decompose", cmd_decompose, "split a torus element as h1*h2")
    sp.add_argument("--field", default="Q")
    sp.add_argument("--chi", required=True, help="comma-separated chi(alpha_i)")

    sp = sub.add_parser("ktable", help="k counts across a rank range")
    sp.add_argument("--family", required=True, choices=list("ABCDEFGabcdefg"))
    sp.add_argument("--ranks", required=True, help="range like 2..9 or list like 6,7,8")
    sp.add_argument("--format", choices=["table", "json"], default="table")
    sp.set_defaults(func=cmd_ktable)

    typed("degrees", cmd_degrees, "torus degree table of g(T)")

    for name, func, help_ in (("witness", cmd_witness, "R-infinity witness certificate"), ("refute", cmd_refute, "refute that [e]_phi is a subgroup")):
        # certificates are documents first; the table is a summary view
        sp = typed(name, func, help_, "json" if name == "witness" else "table")
        sp.add_argument("--field", default="Q")
        sp.add_argument("--graph", help="diagram symmetry, 1-based images of alpha_1..alpha_l")
        sp.add_argument("--triality", action="store_true", help="compose with an order-3 diagram symmetry (D4)")
        sp.add_argument("--diag", help="torus character chi(alpha_i), comma-separated")
        sp.add_argument("--delta", help="field automorphism: id, conj, T->-T, T->1/T, mobius:a,b,c,d")
        sp.add_argument("--inner", help="inner part as a generator expression")
        sp.add_argument("--seed", type=int, default=0)
        if name == "witness":
            sp.add_argument("--n", type=int, default=5)
            sp.add_argument("--budget", type=int, default=1000)
            sp.add_argument("--strategy", choices=["P", "T"], default="P")
            sp.add_argument("--charpoly", action="store_true", help="characteristic polynomial instead of trace")
            sp.add_argument("--verify", action="store_true", help="re-check the certificate before printing")
        else:
            sp.add_argument("--budget", type=int, default=10000)
            sp.add_argument("--word-length", type=int, default=2)

    sp = sub.add_parser("verify", help="re-check a certificate file")
    sp.add_argument("certificate")
    sp.add_argument("--format", choices=["table", "json"], default="table")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2
    except ChevError as exc:
        print(f"error: {exc.name}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    code = 0
    if isinstance(out, tuple):
        out, code = out
    print(out)
    return code


if __name__ == "__main__":
    sys.exit(main())

