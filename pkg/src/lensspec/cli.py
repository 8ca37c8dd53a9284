"""Command-line interface: ``lensspec <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import __version__
from . import eigen, enumeration, lens, orbifold, towers
from .lens import LensError, parse_lens

JOBS_ENV = "LENSSPEC_JOBS"
HEURISTIC = "HEURISTIC"
TABLE2_ORDERS = (11, 13, 16, 17, 19, 20, 21, 22, 23)
GRID_SYMBOLS = {enumeration.NONE: "-", enumeration.PAIR: "x", enumeration.PAIR_HIGHEST: "(x)"}


class Output:
    """Collects one command's result and renders it in the requested format."""

    def __init__(self, args, result, plain=None, rows=None, header=None, certificates=None):
        self.args = args
        self.result = result
        self.plain = plain if plain is not None else [json.dumps(result, sort_keys=True)]
        self.rows = rows
        self.header = header
        self.certificates = certificates

    def render(self) -> str:
        fmt = self.args.format
        if fmt == "json":
            envelope = {
                "command": self.args.command_path,
                "config": {"cutoff_override": self.args.cutoff_override, "format": fmt, "seed": self.args.seed},
                "result": self.result,
                "certificates": self.certificates,
            }
            return json.dumps(envelope, sort_keys=True, indent=2) + "\n"
        if fmt == "csv" and self.rows is not None:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            if self.header:
                w.writerow(self.header)
            w.writerows(self.rows)
            return buf.getvalue()
        return "".join(line + "\n" for line in self.plain)


def _bool(x: bool) -> str:
    return "true" if x else "false"


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise LensError(f"malformed integer list {text!r}") from None


def _stamp(line: str, heuristic: bool) -> str:
    return f"{line} {HEURISTIC}" if heuristic else line


# ---------------------------------------------------------------- handlers

def cmd_isometric(a):
    L1, L2 = parse_lens(a.lens1), parse_lens(a.lens2)
    res = lens.are_isometric(L1, L2)
    keys = [str(lens.canonical_key(L.reduced()).lens()) for L in (L1, L2)]
    return Output(a, {"isometric": res, "canonical": keys}, [_bool(res)], [[_bool(res)] + keys],
                  ["isometric", "canonical1", "canonical2"])


def cmd_isospectral(a):
    L1, L2 = parse_lens(a.lens1), parse_lens(a.lens2)
    r = lens.isospectrality(L1, L2, a.cutoff_override)
    result = {"isospectral": r.isospectral, "cutoff": r.cutoff, "theorem_cutoff": r.theorem_cutoff,
              "heuristic": r.heuristic, "reason": r.reason}
    if r.heuristic:
        result["label"] = HEURISTIC
    line = _stamp(f"{_bool(r.isospectral)} cutoff={r.cutoff}", r.heuristic)
    row = [_bool(r.isospectral), r.cutoff] + ([HEURISTIC] if r.heuristic else [])
    return Output(a, result, [line], [row], ["isospectral", "cutoff"])


def cmd_spectrum(a):
    sl = lens.spectrum_slice(parse_lens(a.lens), a.max_k)
    plain = [f"{k} {k * (k + 2 * sl.n - 2)} {m}" for k, m in enumerate(sl.multiplicities)]
    rows = [[k, k * (k + 2 * sl.n - 2), m, c] for k, (m, c) in enumerate(zip(sl.multiplicities, sl.lattice_counts))]
    return Output(a, sl.to_dict(), plain, rows, ["k", "eigenvalue", "multiplicity", "lattice_count"])


def cmd_k0(a):
    L = parse_lens(a.lens)
    v = eigen.k0(L)
    text = "none" if v is None else str(v)
    return Output(a, {"k0": v, "n": L.n}, [text], [[text]], ["k0"])


def cmd_eigen_equiv(a):
    L1, L2 = parse_lens(a.lens1), parse_lens(a.lens2)
    res = eigen.are_eigenvalue_equivalent(L1, L2)
    k1, k2 = eigen.k0(L1), eigen.k0(L2)
    return Output(a, {"equivalent": res, "k0": [k1, k2]}, [_bool(res)], [[_bool(res), k1, k2]],
                  ["equivalent", "k0_1", "k0_2"])


def _mode(a):
    return enumeration.ORBIFOLD if a.orbifold else enumeration.MANIFOLD


def cmd_enumerate(a):
    keys = enumeration.enumerate_classes(a.n, a.q, _mode(a))
    lits = [str(k.lens()) for k in keys]
    return Output(a, {"n": a.n, "q": a.q, "mode": _mode(a), "count": len(keys),
                      "classes": [list(k.canonical_s) for k in keys]},
                  lits, [[a.q, " ".join(map(str, k.canonical_s))] for k in keys], ["q", "s"])


def cmd_search(a):
    mode = _mode(a)
    theorem = lens.isospectral_cutoff(a.q, a.n)
    heuristic = a.cutoff_override is not None and a.cutoff_override < theorem
    if a.cutoff_override is None:
        rep = enumeration.ReportCache(a.workdir).get(a.n, a.q, mode)
    else:
        keys = enumeration.enumerate_classes(a.n, a.q, mode)
        fams = enumeration.group_isospectral(a.q, a.n, keys, cutoff=a.cutoff_override)
        rep = enumeration.FamilyReport(a.n, a.q, mode, len(keys), fams,
                                       enumeration.default_prefix(a.n), a.cutoff_override)
    result = rep.to_dict()
    result["heuristic"] = heuristic
    if heuristic:
        result["label"] = HEURISTIC
    plain = [_stamp(f"classes={rep.classes} families={len(rep.families)} cutoff={rep.cutoff}", heuristic)]
    plain += [_stamp(" ~ ".join(str(k.lens()) for k in fam), heuristic) for fam in rep.families]
    rows = [[a.n, a.q, i, " ".join(map(str, k.canonical_s))] + ([HEURISTIC] if heuristic else [])
            for i, fam in enumerate(rep.families) for k in fam]
    return Output(a, result, plain, rows, ["n", "q", "family", "s"])


def _members(row) -> str:
    return f"{list(row.first.canonical_s)}, {list(row.second.canonical_s)}"


def cmd_table1(a):
    rows = enumeration.table1(a.nmax, a.qmax, a.nmin, a.qmin, a.jobs, a.workdir)
    result = [{"q": r.q, "q0": r.q0, "n": r.n, "pair": [list(r.first.canonical_s), list(r.second.canonical_s)]}
              for r in rows]
    plain = [f"{r.q:>3} {r.q0:>3} {r.n:>3}  {_members(r)}" for r in rows]
    return Output(a, result, plain, [[r.q, r.q0, r.n, _members(r)] for r in rows], ["q", "q0", "n", "members"])


def cmd_table2(a):
    qs = a.q or list(TABLE2_ORDERS)
    ns = list(range(a.nmin, a.nmax + 1))
    grid = enumeration.existence_table(ns, qs, enumeration.MANIFOLD, a.jobs, a.workdir)
    result = {"n": ns, "q": qs, "grid": [[grid[(n, q)] for q in qs] for n in ns]}
    plain = ["n\\q " + " ".join(f"{q:>4}" for q in qs)]
    plain += [f"{n:>3} " + " ".join(f"{GRID_SYMBOLS[grid[(n, q)]]:>4}" for q in qs) for n in ns]
    rows = [[n] + [grid[(n, q)] for q in qs] for n in ns]
    return Output(a, result, plain, rows, ["n"] + [str(q) for q in qs])


def cmd_density(a):
    d = enumeration.density(a.n, a.x, a.jobs, a.workdir)
    result = {"n": d.n, "x": d.x, "unique_count": d.unique_count, "nonunique_count": d.nonunique_count,
              "total_count": d.total_count, "density": str(d.density), "density_decimal": d.density_str(),
              "qmin": d.qmin}
    plain = [f"n={d.n} x={d.x} non_unique={d.nonunique_count} unique={d.unique_count} "
             f"total={d.total_count} density={d.density_str()}"]
    return Output(a, result, plain, [d.csv_row().split(",")], ["n", "x", "non_unique", "total", "density"])


def cmd_extend(a):
    L = enumeration.extend_params(parse_lens(a.lens), a.r)
    key = lens.canonical_key(L)
    return Output(a, {"lens": str(L), "canonical": list(key.canonical_s), "n": L.n},
                  [str(L)], [[L.q, " ".join(map(str, L.s))]], ["q", "s"])


def _tower_json(T: towers.TowerSpec) -> dict:
    return {"r": T.r, "t": T.t, "k": T.k, "a": list(T.a), "depth": T.depth,
            "levels": [{"j": lv.j, "t_j": lv.t_j, "q": lv.q, "M": str(lv.M), "N": str(lv.N)} for lv in T.levels]}


def _tower_from_args(a) -> towers.TowerSpec:
    if getattr(a, "input", None):
        with open(a.input) as fh:
            d = json.load(fh)
        d = d.get("result", d)
        return towers.build_tower(d["r"], d["t"], d["k"], tuple(d["a"]), d["depth"])
    return towers.build_tower(a.r, a.t, a.k, _ints(a.a), a.depth)


def cmd_tower_build(a):
    T = _tower_from_args(a)
    res = _tower_json(T)
    plain = [f"{lv['j']} t_j={lv['t_j']} {lv['M']} {lv['N']}" for lv in res["levels"]]
    rows = [[lv["j"], lv["t_j"], lv["q"], lv["M"], lv["N"]] for lv in res["levels"]]
    return Output(a, res, plain, rows, ["j", "t_j", "q", "M", "N"])


def cmd_tower_verify(a):
    rep = towers.verify_tower(_tower_from_args(a), a.full_depth)
    res = rep.to_dict()
    plain = []
    for lv in res["levels"]:
        c = lv["checks"]
        full = "skipped" if c["full"] is None else (
            f"isospectral={_bool(c['full']['isospectral'])} isometric={_bool(c['full']['isometric'])}")
        plain.append(f"level {lv['j']} q={lv['q']} predicate={_bool(c['predicate'])} "
                     f"congruence={_bool(c['congruence'])} full: {full}")
    plain += [f"FAIL level {f.level} {f.check}: {f.witness}" for f in rep.failures]
    plain.append("ok" if rep.ok else "failed")
    rows = [[lv["j"], lv["q"], lv["checks"]["predicate"], lv["checks"]["congruence"],
             "" if lv["checks"]["full"] is None else lv["checks"]["full"]["isospectral"]] for lv in res["levels"]]
    return Output(a, res, plain, rows, ["j", "q", "predicate", "congruence", "full_isospectral"])


def _predicates(a_tuple, r) -> dict:
    return {"r": r, "univalent": towers.is_univalent(a_tuple, r),
            "self_reversing": towers.is_self_reversing(a_tuple, r),
            "reversible": towers.is_reversible(a_tuple, r), "good": towers.is_good(a_tuple, r),
            "hereditarily_good": towers.is_hereditarily_good(a_tuple, r), "useful": towers.is_useful(a_tuple, r)}


def cmd_dd_check(a):
    t = _ints(a.a)
    table = [_predicates(t, r) for r in range(1, (a.table or a.r) + 1)] if a.table else [_predicates(t, a.r)]
    pair = towers.dd_pair_check(a.r, a.t, t)
    if not pair.consistent:
        raise orbifold.InvariantViolation(f"pair check contradicts predicates: {pair.to_dict()}")
    keys = ["univalent", "self_reversing", "reversible", "good", "hereditarily_good", "useful"]
    plain = ["r " + " ".join(keys)] + [f"{p['r']} " + " ".join(_bool(p[k]) for k in keys) for p in table]
    plain.append(f"L(r,t,a) vs L(r,t,-a): isospectral={_bool(pair.isospectral)} "
                 f"isometric={_bool(pair.isometric)} cutoff={pair.cutoff}")
    return Output(a, {"predicates": table, "pair": pair.to_dict()}, plain,
                  [[p["r"]] + [p[k] for k in keys] for p in table], ["r"] + keys)


def cmd_orbifold_gassmann(a):
    G1, G2 = orbifold.gassmann_pair(a.d)
    status, why = orbifold.conjugacy_status(G1, G2)
    cert = orbifold.conjugacy_certificate(G1, G2)
    fp = lambda G: [[list(p), c] for p, c in orbifold.char_fingerprint(G).polys]
    res = {
        "d": a.d,
        "almost_conjugate": orbifold.almost_conjugate(G1, G2),
        "fixed_space_dim": [orbifold.fixed_space_dim(G1), orbifold.fixed_space_dim(G2)],
        "fixed_coordinate_count": [orbifold.fixed_coordinate_count(G1), orbifold.fixed_coordinate_count(G2)],
        "conjugacy": status, "conjugacy_detail": why,
        "groups": [G1.serialize(), G2.serialize()],
        "fingerprints": [fp(G1), fp(G2)],
    }
    certs = None if cert is None else {"intertwiner": [list(r) for r in cert.T], "verified": cert.verify()}
    plain = [f"almost_conjugate={_bool(res['almost_conjugate'])}",
             f"fixed_space_dim={res['fixed_space_dim'][0]},{res['fixed_space_dim'][1]}",
             f"fixed_coordinate_count={res['fixed_coordinate_count'][0]},{res['fixed_coordinate_count'][1]}",
             f"conjugacy={status}" + (f" ({why})" if why else "")]
    return Output(a, res, plain, [[a.d, res["almost_conjugate"], *res["fixed_space_dim"], status]],
                  ["d", "almost_conjugate", "fixed1", "fixed2", "conjugacy"], certs)


def _read_group(path: str) -> orbifold.FiniteOrthogonalGroup:
    with open(path) as fh:
        text = fh.read()
    try:
        items = json.loads(text)
    except json.JSONDecodeError:
        items = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    gens = [orbifold.SignedPermMatrix.parse(s) for s in items]
    return orbifold.generate_group(gens)


def cmd_orbifold_spectrum(a):
    G = _read_group(a.groupfile)
    sl = orbifold.orbifold_spectrum_slice(G, a.K)
    return Output(a, {"order": G.order, "size": G.size, "slice": sl}, [" ".join(map(str, sl))],
                  [[k, m] for k, m in enumerate(sl)], ["k", "multiplicity"])


def cmd_orbifold_unique(a):
    res = orbifold.small_order_uniqueness(a.d, a.order, a.K)
    return Output(a, {"d": a.d, "order": a.order, "K": a.K, "unique": res}, [_bool(res)],
                  [[a.d, a.order, a.K, res]], ["d", "order", "K", "unique"])


def cmd_finite_part(a):
    c = eigen.finite_part_bound(a.n, Fraction(a.epsilon))
    res = {"n": a.n, "epsilon": str(c.epsilon), "q": c.q, "K": c.K, "N": c.N}
    return Output(a, res, [f"N={c.N} (q={c.q}, K={c.K})"], [[a.n, str(c.epsilon), c.q, c.K, c.N]],
                  ["n", "epsilon", "q", "K", "N"])


def cmd_example54(a):
    r = eigen.example_5_4(a.N)
    res = r.to_dict()
    plain = [f"{r.L1} {r.L2} agree={r.agree_count} guaranteed={r.guaranteed} "
             f"isospectral={_bool(r.isospectral)} isometric={_bool(r.isometric)}"]
    return Output(a, res, plain, [[r.N, r.q, r.agree_count, r.guaranteed, r.isospectral]],
                  ["N", "q", "agree", "guaranteed", "isospectral"])


# ---------------------------------------------------------------- parser

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=["json", "csv", "plain"], default="plain")
    p.add_argument("--cutoff-override", type=int, default=None,
                   help="compare spectra only up to this degree; results below the certified cutoff are labelled HEURISTIC")
    p.add_argument("--jobs", type=int, default=int(os.environ.get(JOBS_ENV, "1")))
    p.add_argument("--workdir", default=None, help="checkpoint directory for table sweeps")
    p.add_argument("--seed", type=int, default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="lensspec", description="Spectra of lens spaces and spherical orbifolds.",
                                     formatter_class=argparse.RawTextHelpFormatter)
    parser.add_argument("--version", action="version",
                        version=f"lensspec {__version__}; isospectrality certified at degree q(n(n-1)+1)-1 "
                                "(finite-part cutoff for odd spheres, exact arithmetic)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func, command_path=name)
        return p

    for name, func, help_ in [("isometric", cmd_isometric, "decide isometry"),
                              ("isospectral", cmd_isospectral, "decide isospectrality"),
                              ("eigen-equiv", cmd_eigen_equiv, "decide eigenvalue equivalence")]:
        p = add(name, func, help_)
        p.add_argument("lens1")
        p.add_argument("lens2")
    p = add("spectrum", cmd_spectrum, "multiplicities up to a degree")
    p.add_argument("lens")
    p.add_argument("--max-k", type=int, default=10)
    p = add("k0", cmd_k0, "smallest odd degree with a nonzero invariant")
    p.add_argument("lens")
    for name, func, help_ in [("enumerate", cmd_enumerate, "list isometry classes"),
                              ("search", cmd_search, "find isospectral families")]:
        p = add(name, func, help_)
        p.add_argument("n", type=int)
        p.add_argument("q", type=int)
        p.add_argument("--orbifold", action="store_true")
    p = add("table1", cmd_table1, "minimal irreducible isospectral pairs")
    p.add_argument("--nmin", type=int, default=3)
    p.add_argument("--nmax", type=int, default=14)
    p.add_argument("--qmin", type=int, default=3)
    p.add_argument("--qmax", type=int, default=23)
    p = add("table2", cmd_table2, "existence grid of isospectral pairs")
    p.add_argument("--nmin", type=int, default=3)
    p.add_argument("--nmax", type=int, default=14)
    p.add_argument("--q", type=int, action="append", help="group order (repeatable)")
    p = add("density", cmd_density, "density of spectrally unique lens spaces")
    p.add_argument("n", type=int)
    p.add_argument("x", type=int)
    p = add("extend", cmd_extend, "append r copies of the unit representatives")
    p.add_argument("lens")
    p.add_argument("r", type=int)

    tower = sub.add_parser("tower", help="descending isospectral towers")
    tsub = tower.add_subparsers(dest="tower_command", required=True)
    for name, func in [("build", cmd_tower_build), ("verify", cmd_tower_verify)]:
        p = tsub.add_parser(name, parents=[common])
        p.set_defaults(func=func, command_path=f"tower {name}")
        p.add_argument("r", type=int, nargs="?")
        p.add_argument("t", type=int, nargs="?")
        p.add_argument("k", type=int, nargs="?")
        p.add_argument("a", nargs="?", help="comma-separated tuple, e.g. 1,2,8")
        p.add_argument("depth", type=int, nargs="?")
        p.add_argument("--input", help="JSON written by 'tower build --format json'")
        if name == "verify":
            p.add_argument("--full-depth", type=int, default=1)

    p = add("dd-check", cmd_dd_check, "tuple predicates and the L(r,t,+-a) pair")
    p.add_argument("r", type=int)
    p.add_argument("t", type=int)
    p.add_argument("a")
    p.add_argument("--table", type=int, default=None, help="print predicates for every modulus up to this value")

    orb = sub.add_parser("orbifold", help="finite matrix groups")
    osub = orb.add_subparsers(dest="orbifold_command", required=True)
    p = osub.add_parser("gassmann", parents=[common])
    p.set_defaults(func=cmd_orbifold_gassmann, command_path="orbifold gassmann")
    p.add_argument("d", type=int)
    p = osub.add_parser("spectrum", parents=[common])
    p.set_defaults(func=cmd_orbifold_spectrum, command_path="orbifold spectrum")
    p.add_argument("groupfile")
    p.add_argument("K", type=int)
    p = osub.add_parser("unique", parents=[common])
    p.set_defaults(func=cmd_orbifold_unique, command_path="orbifold unique")
    p.add_argument("d", type=int)
    p.add_argument("order", type=int, choices=[2, 3])
    p.add_argument("K", type=int)

    p = add("finite-part", cmd_finite_part, "eigenvalue count that decides isospectrality")
    p.add_argument("n", type=int)
    p.add_argument("epsilon")
    p = add("example54", cmd_example54, "lens orbifolds agreeing on many first eigenvalues")
    p.add_argument("N", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "tower" and args.input is None and None in (args.r, args.t, args.k, args.a, args.depth):
        parser.error("tower needs r t k a depth or --input")
    try:
        out = args.func(args)
    except orbifold.InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 3
    except (LensError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(out.render())
    return 0


if __name__ == "__main__":
    sys.exit(main())
