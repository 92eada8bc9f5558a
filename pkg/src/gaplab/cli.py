"""Command-line front end: ``gaplab construct | scan | verify | export``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage error,
3 a resource cap was exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import random
import sys
from math import gcd
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .cf_core import DEFAULT_MAX_DEPTH, ONE, Sign, certified_sign, decimal_approx, theta_form
from .constructions import (
    PairConstruction,
    badly_approx_witness,
    bounded_family,
    unbounded_family,
    verify_family_invariants,
)
from .gap_engine import gap_set
from .neighbor_theory import (
    StructuralError,
    bounded_regime,
    bounded_view,
    check_assumption,
    delta_k,
    gap_chain_check,
    exchange_table,
    induced_table_qkN,
    lowerbound_check,
    phi_induction_map,
    prop42_counts,
    prop42_table,
    seven_table,
    three_gap_return,
    unbounded_level,
    unbounded_witnesses,
    witness_points,
)
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
DEFAULT_CAP = 3000
SCAN_HEADER = ["N", "distinct", "dn", "dm", "dc", "mult", "approx"]
VERIFY_TARGETS = ["identities", "exchange", "three-gap", "seven", "prop42", "phi-induction",
                  "witnesses", "delta", "badly-approx"]


class UsageError(Exception):
    pass


class CapExceeded(Exception):
    pass


def family(name: str, levels: int) -> PairConstruction:
    try:
        return bounded_family(levels) if name == "bounded" else unbounded_family(levels)
    except ValueError as e:
        raise UsageError(str(e)) from e


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from e


def scan_values(args) -> list[int]:
    if args.all_upto is not None or args.plus:
        ns = set(range(1, (args.all_upto or 0) + 1)) | set(args.plus or [])
    elif args.to is not None:
        ns = set(range(args.from_, args.to + 1))
    else:
        raise UsageError("scan needs --to or --all-upto/--plus")
    if not ns or min(ns) < 1:
        raise UsageError("N must be >= 1")
    if max(ns) > args.cap:
        raise CapExceeded(f"N = {max(ns)} exceeds the brute-force cap {args.cap}")
    return sorted(ns)


def _scan_one(job: tuple[str, int, int]) -> list[list]:
    name, N, depth = job
    c = bounded_family(2) if name == "bounded" else unbounded_family(1)
    g, _ = gap_set(N, N, c.alpha, c.beta, max_depth=depth)
    triples = g.sorted_triples(c.alpha, c.beta, depth)
    return [[N, g.distinct, t.u, t.v, t.w, g.counts[t], decimal_approx(t, c.alpha, c.beta, 20)]
            for t in triples]


def jobs_count(n: int | None) -> int:
    return n if n and n > 0 else (os.cpu_count() or 1)


# -- construct / scan / export -----------------------------------------------------

def cmd_construct(args, out) -> int:
    c = family(args.family, args.levels)
    text = c.to_json() + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        out.write(f"wrote {args.family} family, {args.levels} level(s) to {args.out}\n")
    else:
        out.write(text)
    return EXIT_OK


def cmd_scan(args, out) -> int:
    ns = scan_values(args)
    jobs = [(args.family, N, args.depth) for N in ns]
    workers = jobs_count(args.jobs)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_scan_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_scan_one(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for block in rows:
        w.writerows(block)
    worst = max(rows, key=lambda b: b[0][1])
    summary = f"scanned {len(ns)} value(s) of N; max distinct = {worst[0][1]} at N = {worst[0][0]}\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
        out.write(summary)
    else:
        out.write(buf.getvalue())
    if args.max_distinct is not None and worst[0][1] > args.max_distinct:
        out.write(f"FAIL distinct count {worst[0][1]} > {args.max_distinct}\n")
        return EXIT_FAIL
    return EXIT_OK


def cmd_export(args, out) -> int:
    kind = args.what
    if kind == "construction":
        text = family(args.family, args.levels).to_json()
    elif kind == "convergents":
        c = family(args.family, args.levels)
        x = c.alpha if args.which == "alpha" else c.beta
        text = x.table.to_json(args.upto)
    elif kind == "gaps":
        c = family(args.family, args.levels)
        if max(args.q, args.qp) > args.cap:
            raise CapExceeded(f"point set {args.q} x {args.qp} exceeds the brute-force cap {args.cap}")
        g, _ = gap_set(args.q, args.qp, c.alpha, c.beta, max_depth=args.depth)
        text = g.to_csv(c.alpha, c.beta).rstrip("\n")
    else:
        text = build_table(args).to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        out.write(f"wrote {kind} to {args.out}\n")
    else:
        out.write(text + "\n")
    return EXIT_OK


def build_table(args):
    if args.what == "exchange":
        c = family(args.family, args.levels)
        bp = args.bprime if args.bprime is not None else default_bprime(c, args.i, args.j, args.swap)
        return exchange_table(args.i, args.j, bp, c, args.swap)
    if args.what == "induced":
        return induced_table_qkN(args.k, args.N, family("bounded", max(args.levels, args.k + 1)), args.swap)
    if args.what == "seven":
        return seven_table(args.k, args.N, family("bounded", max(args.levels, args.k + 1)))
    return prop42_table(args.k, family("unbounded", max(args.levels, args.k)))


def default_bprime(c: PairConstruction, i: int, j: int, swap: bool) -> int:
    A, B = (c.beta, c.alpha) if swap else (c.alpha, c.beta)
    return (B.q(j) - 1) // A.q(i)


# -- verify ---------------------------------------------------------------------------

def _oracle_equal(rep: Report, name: str, table, c: PairConstruction, depth: int) -> None:
    g, nt = gap_set(table.q, table.qp, c.alpha, c.beta, max_depth=depth)
    mism = table.neighbor_table().mismatches(nt)
    rep.check(f"{name}: successor map equals oracle", len(mism) == 0,
              f"{nt.q * nt.qp - len(mism)} of {nt.q * nt.qp} point agreements")
    rep.check(f"{name}: multiplicities equal oracle", table.multiplicities() == g.counts)


def _table_checks(rep: Report, name: str, table, c: PairConstruction, depth: int) -> None:
    rep.check(f"{name}: regions partition the index set", table.is_partition(),
              f"{table.region_total()} points")
    rep.check(f"{name}: weighted gap sum = (0,0,1)", table.weighted_sum() == ONE, str(table.weighted_sum()))
    rep.check(f"{name}: gaps certified in (0,1) and distinct", table.certify_gaps(c.alpha, c.beta, depth))


def verify_identities(args) -> Report:
    if args.input:
        with open(args.input) as fh:
            c = PairConstruction.from_json(fh.read())
    else:
        c = family(args.family, args.levels)
    rep = verify_family_invariants(c)
    for name, x in (("alpha", c.alpha), ("beta", c.beta)):
        ok = all(theta_form(x, k, name) * x.q(k - 1) + theta_form(x, k - 1, name) * x.q(k) == ONE
                 for k in range(1, 9))
        rep.check(f"q_k theta_(k-1) + q_(k-1) theta_k = 1 for k=1..8 ({name})", ok)
        ok = all(x.p(k - 1) * x.q(k) - x.p(k) * x.q(k - 1) == (-1) ** k for k in range(1, 9))
        rep.check(f"determinant identity for k=1..8 ({name})", ok)
    return rep


def verify_exchange(args) -> Report:
    c = family(args.family, args.levels)
    bp = args.bprime if args.bprime is not None else default_bprime(c, args.i, args.j, args.swap)
    rep = Report(f"exchange map, {c.family} family, i={args.i}, j={args.j}, b'={bp}")
    try:
        t = exchange_table(args.i, args.j, bp, c, args.swap)
    except ValueError as e:
        rep.check("q'_j = b' q_i + 1", False, str(e))
        return rep
    rep.check("q'_j = b' q_i + 1", True)
    holds = check_assumption(args.i, args.j, bp, c, args.swap, args.depth)
    if c.family == "bounded":
        rep.check("assumption ||q'_j beta|| < ||q_(i-1) alpha|| - b' ||q'_(j-1) beta||", holds)
        _table_checks(rep, "exchange", t, c, args.depth)
        if t.q * t.qp <= args.cap ** 2:
            _oracle_equal(rep, "exchange", t, c, args.depth)
    else:
        rep.check("assumption fails for the unbounded family", not holds)
    return rep


def _brute_return(r: int, M: int, N: int) -> list[int]:
    out = []
    for m in range(N):
        x, t = (m + r) % M, 1
        while x >= N:
            x, t = (x + r) % M, t + 1
        out.append(t)
    return out


def verify_three_gap(args) -> Report:
    rep = Report("return times of a translation")
    if args.r is not None:
        cases = [(args.r, args.modulus, args.N)]
    else:
        rng = random.Random(args.seed)
        cases = []
        while len(cases) < args.random:
            M = rng.randint(2, args.max_modulus)
            r = rng.randint(1, M - 1)
            if gcd(r, M) == 1:
                cases.append((r, M, rng.randint(1, M)))
    bad = []
    for r, M, N in cases:
        try:
            p = three_gap_return(r, M, N)
        except StructuralError as e:
            bad.append(f"(r={r}, modulus={M}, N={N}): {e}")
            continue
        if p.tau.tolist() != _brute_return(r, M, N) or not all(p.identities()):
            bad.append(f"(r={r}, modulus={M}, N={N})")
        elif len(cases) == 1:
            rep.check("profile", True, f"tau1={p.tau1} tau2={p.tau2} N1={p.N1} N2={p.N2} d1={p.d1} d2={p.d2}")
    rep.check(f"{len(cases)} instance(s): three windows, identities, brute-force return times",
              not bad, "; ".join(bad[:5]))
    return rep


def verify_seven(args) -> Report:
    c = family("bounded", 2)
    ns = args.N_list or (list(range(4, 29)) + [29, 50, 100, 300])
    rep = Report("seven-case table against the oracle")
    rep.extend(gap_chain_check(1, c, args.depth))
    for N in ns:
        if N > args.cap:
            raise CapExceeded(f"N = {N} exceeds the brute-force cap {args.cap}")
        try:
            k, sw = bounded_regime(N, c)
        except ValueError as e:
            raise UsageError(str(e)) from e
        t = seven_table(k, N, c)
        _table_checks(rep, f"N={N}", t, c, args.depth)
        rep.check(f"N={N}: at most 7 distinct gaps", t.distinct <= 7, f"{t.distinct}")
        _oracle_equal(rep, f"N={N}", t, c, args.depth)
        lb = lowerbound_check(k, N, c, sw, args.depth)
        rep.check(f"N={N}: min gap of E_(q_k,N) exceeds a ||q_k alpha||", lb.ok)
        six = induced_table_qkN(k, N, c, sw) if N <= bounded_view(k, c, sw).qj else None
        if six is not None:
            rep.check(f"N={N}: six-case table partitions", six.is_partition() and six.weighted_sum() == ONE)
    return rep


def verify_prop42(args) -> Report:
    c = family("unbounded", max(args.levels, args.k))
    rep = prop42_counts(args.k, c)
    t = prop42_table(args.k, c)
    rep.check("regions partition the index set", t.is_partition())
    rep.check("gaps certified in (0,1) and distinct", t.certify_gaps(c.alpha, c.beta, args.depth))
    lv = unbounded_level(args.k, c)
    if max(lv.q5, lv.p5) <= args.cap:
        _oracle_equal(rep, "table", t, c, args.depth)
    else:
        rep.flag("oracle comparison", f"skipped: {lv.q5} x {lv.p5} exceeds the brute-force cap")
    return rep


def verify_phi(args) -> Report:
    c = family("unbounded", max(args.levels, args.k))
    lv = unbounded_level(args.k, c)
    if max(lv.q5, lv.p5) > args.cap:
        raise CapExceeded(f"{lv.q5} x {lv.p5} exceeds the brute-force cap {args.cap}")
    rep = Report(f"phi-induction, k={args.k}")
    phi = phi_induction_map(args.k, c)
    rep.check("single cycle", phi.is_single_cycle(), f"length {lv.q5 * lv.p5}")
    rep.check("equals the twelve-case table", phi == prop42_table(args.k, c).neighbor_table())
    _, nt = gap_set(lv.q5, lv.p5, c.alpha, c.beta, max_depth=args.depth)
    rep.check("equals the oracle", phi == nt, f"{len(phi.mismatches(nt))} mismatches")
    return rep


def verify_witnesses(args) -> Report:
    c = family("unbounded", max(args.levels, args.k))
    lv = unbounded_level(args.k, c)
    w = unbounded_witnesses(args.k, c)
    rep = Report(f"witness gaps, k={args.k}")
    rep.check(f"a_(4k+1) = {lv.A} witnesses, pairwise distinct", len(set(w)) == len(w) == lv.A)
    rep.check("each certified in (0,1)",
              all(certified_sign(x, c.alpha, c.beta, args.depth) is Sign.POSITIVE
                  and certified_sign(x - ONE, c.alpha, c.beta, args.depth) is Sign.NEGATIVE for x in w))
    if lv.q5 <= args.cap:
        g, nt = gap_set(lv.q5, lv.q5, c.alpha, c.beta, max_depth=args.depth)
        rep.check("every witness occurs in the oracle gap set", all(x in g.counts for x in w),
                  f"{g.distinct} distinct gaps at N = {lv.q5}")
        adj = all(nt.successor(*p1) == p2 or nt.successor(*p2) == p1
                  for p1, p2 in witness_points(args.k, c))
        rep.check("witness points are neighbours", adj)
        rep.check("distinct gaps >= a_(4k+1)", g.distinct >= lv.A)
    return rep


def verify_delta(args) -> Report:
    rep = Report("delta_k chain")
    for k in args.k_list or [1, 2]:
        c = family("unbounded", max(args.levels, k))
        d, r = delta_k(k, c, args.depth)
        rep.check(f"k={k}: delta_k = {tuple(d)}", r.ok, "; ".join(x.line() for x in r.failures))
    return rep


def verify_badly(args) -> Report:
    rep = Report("bounded pair is not badly approximable")
    for k in args.k_list or [1, 2]:
        c = family("bounded", max(args.levels, k + 1))
        s = badly_approx_witness(c, k, args.depth)
        rep.check(f"k={k}: ||q_k alpha|| < q_k^-7", s is Sign.NEGATIVE, s.name.lower())
    return rep


VERIFIERS = {
    "identities": verify_identities, "exchange": verify_exchange, "three-gap": verify_three_gap,
    "seven": verify_seven, "prop42": verify_prop42, "phi-induction": verify_phi,
    "witnesses": verify_witnesses, "delta": verify_delta, "badly-approx": verify_badly,
}


def cmd_verify(args, out) -> int:
    rep = VERIFIERS[args.target](args)
    out.write(str(rep) + "\n")
    if not rep.ok:
        out.write(f"FAILED: {', '.join(c.name for c in rep.failures)}\n")
        return EXIT_FAIL
    out.write("ALL PASS\n")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------

def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def default(x):
        return argparse.SUPPRESS if suppress else x
    parser.add_argument("--no-banner", action="store_true", default=default(False),
                        help="omit the version header")
    parser.add_argument("--depth", type=int, default=default(DEFAULT_MAX_DEPTH),
                        help="maximum continued-fraction depth for certified signs")
    parser.add_argument("--cap", type=int, default=default(DEFAULT_CAP), help="brute-force cap on N")
    parser.add_argument("--out", default=default(None), help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    p = argparse.ArgumentParser(prog="gaplab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gaplab {__version__}")
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="build a family and write it as JSON")
    c.add_argument("--family", choices=["bounded", "unbounded"], required=True)
    c.add_argument("--levels", type=int, required=True)

    s = sub.add_parser("scan", parents=[common], help="distinct gap counts of E_N over a range of N")
    s.add_argument("--family", choices=["bounded", "unbounded"], required=True)
    s.add_argument("--from", dest="from_", type=int, default=1)
    s.add_argument("--to", type=int)
    s.add_argument("--all-upto", type=int)
    s.add_argument("--plus", type=int_list)
    s.add_argument("--jobs", type=int, default=None)
    s.add_argument("--max-distinct", type=int, help="fail if any N exceeds this many distinct gaps")

    v = sub.add_parser("verify", parents=[common], help="run a named verification")
    v.add_argument("target", choices=VERIFY_TARGETS)
    v.add_argument("--family", choices=["bounded", "unbounded"], default="bounded")
    v.add_argument("--levels", type=int, default=1)
    v.add_argument("--input", help="construction JSON to verify instead of building one")
    v.add_argument("--i", type=int, default=1)
    v.add_argument("--j", type=int, default=1)
    v.add_argument("--bprime", type=int)
    v.add_argument("--swap", action="store_true", help="let beta play the role of alpha")
    v.add_argument("--k", type=int, default=1)
    v.add_argument("--ks", dest="k_list", type=int_list)
    v.add_argument("--N", dest="N_list", type=int_list)
    v.add_argument("--r", type=int)
    v.add_argument("--modulus", type=int)
    v.add_argument("--window", dest="window", type=int)
    v.add_argument("--random", type=int, default=200)
    v.add_argument("--max-modulus", type=int, default=500)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--jobs", type=int, default=None)

    e = sub.add_parser("export", parents=[common], help="export a table, gap set or construction")
    e.add_argument("what", choices=["construction", "convergents", "gaps", "exchange", "induced", "seven", "prop42"])
    e.add_argument("--family", choices=["bounded", "unbounded"], default="bounded")
    e.add_argument("--levels", type=int, default=1)
    e.add_argument("--which", choices=["alpha", "beta"], default="alpha")
    e.add_argument("--upto", type=int, default=8)
    e.add_argument("--q", type=int, default=3)
    e.add_argument("--qp", type=int, default=28)
    e.add_argument("--i", type=int, default=1)
    e.add_argument("--j", type=int, default=1)
    e.add_argument("--bprime", type=int)
    e.add_argument("--swap", action="store_true")
    e.add_argument("--k", type=int, default=1)
    e.add_argument("--N", type=int, default=10)
    return p


COMMANDS = {"construct": cmd_construct, "scan": cmd_scan, "verify": cmd_verify, "export": cmd_export}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "verify" and args.target == "three-gap" and args.r is not None:
        if args.modulus is None or args.window is None:
            parser.print_usage(sys.stderr)
            sys.stderr.write("gaplab: three-gap with --r needs --modulus and --window\n")
            return EXIT_USAGE
        args.N = args.window
    if not args.no_banner:
        sys.stderr.write(f"gaplab {__version__}\n")
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"gaplab: {e}\n")
        return EXIT_USAGE
    except CapExceeded as e:
        sys.stderr.write(f"gaplab: {e}\n")
        return EXIT_CAP
    except ValueError as e:
        sys.stderr.write(f"gaplab: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
