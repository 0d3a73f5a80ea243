"""Command-line interface.

Exit codes: 0 success, 2 unreadable input, 3 usage or desk bounds,
4 verification failure, 5 non-additive distances.  Machine-readable output
goes to stdout (or ``--out``); human summaries go to stderr.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ._bounds import BoundsError
from .branching import valuation, valuation_tableau
from .dissimilarity import (DistanceMatrix, dissimilarity_vector, rooted_dissimilarity,
                            rooted_dissimilarity_vector, rooted_vector, tableau_dissimilarity)
from .indexsets import frac_str
from .newick import NewickError, parse_newick, to_newick
from .reconstruction import NonAdditiveError, reconstruct
from .relations import (QuadraticRelation, Term, classical_selftest, gen_exchange,
                        gen_three_term, tropical_check)
from .tableaux import enumerate_ssyt, normalize_shape
from .tree import MetricTree, random_tree
from .tropical import trop_str

EXIT_OK, EXIT_INPUT, EXIT_USAGE, EXIT_VERIFY, EXIT_NONADDITIVE = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_INPUT) from None


def _load_tree(path: str) -> MetricTree:
    try:
        return parse_newick(_read(path))
    except NewickError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_newick(args) -> int:
    _emit(to_newick(_load_tree(args.newick)), args.out)
    return EXIT_OK


def cmd_random(args) -> int:
    if args.leaves < 3 or args.denom < 1:
        raise CliError("need --leaves >= 3 and --denom >= 1", EXIT_USAGE)
    _emit(to_newick(random_tree(args.leaves, args.seed, args.denom)), args.out)
    return EXIT_OK


def cmd_dissim(args) -> int:
    tree = _load_tree(args.newick)
    try:
        if args.rooted:
            vec = rooted_dissimilarity_vector(tree, args.m)
        else:
            vec = dissimilarity_vector(tree, args.m)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    _emit(vec.to_json() if args.format == "json" else vec.to_csv(), args.out)
    print(f"{len(vec)} entries", file=sys.stderr)
    return EXIT_OK


def _families(mode: str, tree_n: int, m: int | None, sizes: list[int] | None):
    """Return ``[(family name, relations, point builder)]`` for *mode*."""
    n = tree_n
    if mode == "grassmannian":
        if m is None or not 2 <= m <= n + 1:
            raise CliError(f"--m must be in 2..{n + 1}", EXIT_USAGE)
        if n + 1 < 4:
            raise CliError("grassmannian check needs at least 4 leaves", EXIT_USAGE)
        rels = gen_three_term(m, n + 1, ground=range(n + 1))
        return [(f"three_term(m={m})", rels, ("full", m))]
    if mode == "rooted-grassmannian":
        if m is None or not 1 <= m <= n - 1:
            raise CliError(f"--m must be in 1..{n - 1}", EXIT_USAGE)
        fams = []
        if n >= 4 and m >= 2:
            fams.append((f"three_term(m={m})", gen_three_term(m, n), ("rooted",)))
        fams.append((f"exchange(a={m},b={m})", gen_exchange(m, m, n), ("rooted",)))
        return fams
    if mode == "flag":
        if not sizes:
            raise CliError("--sizes is required", EXIT_USAGE)
        sizes = sorted(set(sizes))
        if sizes[0] < 1 or sizes[-1] > n - 1:
            raise CliError(f"--sizes must lie in 1..{n - 1}", EXIT_USAGE)
        return [(f"exchange(a={a},b={b})", gen_exchange(a, b, n), ("rooted",))
                for a, b in itertools.combinations_with_replacement(sizes, 2)]
    raise CliError(f"unknown check mode {mode}", EXIT_USAGE)


def _check_one(job):
    """Worker: check all families against one tree."""
    idx, newick, mode, m, sizes = job
    tree = parse_newick(newick)
    points = {}
    out = []
    for name, rels, kind in _families(mode, tree.n, m, sizes):
        if kind not in points:
            if kind[0] == "full":
                points[kind] = dissimilarity_vector(tree, kind[1]).entries
            else:
                points[kind] = rooted_vector(tree)
        rep = tropical_check(rels, points[kind])
        out.append((name, len(rels), rep))
    return idx, newick, out


def cmd_check(args) -> int:
    start = time.perf_counter()
    if args.newick:
        newicks = [to_newick(_load_tree(args.newick))]
    else:
        if args.leaves is None or args.leaves < 3 or args.trees < 1 or args.denom < 1:
            raise CliError("--random needs --leaves >= 3, --trees >= 1, --denom >= 1", EXIT_USAGE)
        newicks = [to_newick(random_tree(args.leaves, args.seed + i, args.denom))
                   for i in range(args.trees)]
    m, sizes = getattr(args, "m", None), getattr(args, "sizes", None)

    # validate parameters once, in this process
    try:
        _families(args.mode, parse_newick(newicks[0]).n, m, sizes)
    except (ValueError, BoundsError) as exc:
        raise CliError(str(exc), EXIT_USAGE) from None

    jobs = [(i, nw, args.mode, m, sizes) for i, nw in enumerate(newicks)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_check_one, jobs, chunksize=8))
    else:
        results = [_check_one(j) for j in jobs]

    families: dict[str, dict] = {}
    violations = []
    for idx, newick, per_family in sorted(results, key=lambda r: r[0]):
        for name, nrel, rep in per_family:
            fam = families.setdefault(name, {"relations_tested": nrel, "member": 0,
                                             "vacuous": 0, "nonmember": 0})
            fam["member"] += rep.member
            fam["vacuous"] += rep.vacuous
            fam["nonmember"] += rep.nonmember
            for v in rep.violations:
                violations.append({
                    "tree_index": idx, "tree": newick, "family": name,
                    "relation": v.relation.to_json(),
                    "evaluations": [trop_str(x) for x in v.values],
                    "max": trop_str(v.max_value), "count": v.count,
                })
    report = {
        "command": "check",
        "mode": args.mode,
        "config": {
            "source": "newick" if args.newick else "random",
            "newick": args.newick, "m": m, "sizes": sizes,
            "leaves": args.leaves, "trees": len(newicks), "seed": args.seed,
            "denom": args.denom,
        },
        "trees_tested": len(newicks),
        "families": families,
        "violations": violations,
    }
    if args.timing:
        report["wall_time"] = round(time.perf_counter() - start, 3)
    _emit(json.dumps(report, indent=1), args.out)
    total_bad = sum(f["nonmember"] for f in families.values())
    for name, f in families.items():
        print(f"{name}: {f['relations_tested']} relations x {len(newicks)} trees -> "
              f"{f['member']} member, {f['vacuous']} vacuous, {f['nonmember']} nonmember",
              file=sys.stderr)
    return EXIT_VERIFY if total_bad else EXIT_OK


def cmd_tableaux(args) -> int:
    try:
        shape = normalize_shape(args.shape)
        tabs = enumerate_ssyt(shape, args.n)
    except (ValueError, BoundsError) as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    tree = _load_tree(args.newick) if args.newick else None
    if tree is not None and args.n > tree.n:
        raise CliError(f"--n {args.n} exceeds the tree's largest label {tree.n}", EXIT_USAGE)
    rows = []
    for T in tabs:
        row = T.to_json()
        if tree is not None:
            row["d0T"] = frac_str(tableau_dissimilarity(tree, T))
        rows.append(row)
    _emit(json.dumps(rows, indent=1), args.out)
    print(f"{len(rows)} tableaux", file=sys.stderr)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    try:
        D = DistanceMatrix.from_csv(_read(args.distances))
    except ValueError as exc:
        raise CliError(f"{args.distances}: {exc}", EXIT_INPUT) from None
    try:
        tree = reconstruct(D)
    except NonAdditiveError as exc:
        raise CliError(f"non-additive distances: {exc} (witness {list(exc.witness)})",
                       EXIT_NONADDITIVE) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    _emit(to_newick(tree), args.out)
    return EXIT_OK


def selftest_families(max_n: int = 7):
    """Every generated family with ``n <= max_n``, as ``(name, n, relations)``."""
    out = []
    for n in range(4, max_n + 1):
        for m in range(2, n - 1):
            out.append((f"three_term(m={m},n={n})", n, gen_three_term(m, n)))
    for n in range(2, max_n + 1):
        for a in range(1, n):
            for b in range(a, n):
                rels = gen_exchange(a, b, n)
                if rels:
                    out.append((f"exchange(a={a},b={b},n={n})", n, rels))
    return out


def cmd_selftest(args) -> int:
    families = selftest_families()
    if args.inject_corruption:
        name, n, rels = families[0]
        bad = rels[0]
        flipped = (Term(-bad.terms[0].coef, bad.terms[0].a, bad.terms[0].b),) + bad.terms[1:]
        families[0] = (name, n, [QuadraticRelation(flipped, bad.family, bad.params)] + rels[1:])

    classical = {}
    failures = 0
    for name, n, rels in families:
        rep = classical_selftest(rels, n, args.trials, args.seed)
        failures += len(rep.failures)
        classical[name] = {"relations": rep.relations, "trials": rep.trials,
                           "failures": [{"relation": f.relation.to_json(), "trial": f.trial,
                                         "value": frac_str(f.value)} for f in rep.failures]}

    mismatches = []
    checked = 0
    for i in range(args.trees):
        tree = random_tree(4 + i % 5, args.seed + i, 8)
        for k in range(1, tree.n + 1):
            for sigma in itertools.combinations(range(1, tree.n + 1), k):
                checked += 1
                lhs, rhs = valuation(tree, sigma), rooted_dissimilarity(tree, sigma)
                if lhs != rhs:
                    mismatches.append({"tree": to_newick(tree), "sigma": list(sigma),
                                       "valuation": frac_str(lhs), "rooted": frac_str(rhs)})
        for T in enumerate_ssyt((2, 1), min(tree.n, 3)):
            checked += 1
            if valuation_tableau(tree, T) != tableau_dissimilarity(tree, T):
                mismatches.append({"tree": to_newick(tree), "tableau": T.to_json()})

    report = {"command": "selftest", "trials": args.trials, "seed": args.seed,
              "classical": classical, "valuation_checks": checked,
              "valuation_mismatches": mismatches}
    _emit(json.dumps(report, indent=1), args.out)
    nrel = sum(len(r) for _, _, r in families)
    print(f"classical: {nrel} relations in {len(families)} families, {failures} failures; "
          f"valuation: {checked} checks, {len(mismatches)} mismatches", file=sys.stderr)
    return EXIT_VERIFY if failures or mismatches else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tropdissim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("newick", help="normalise a Newick file to canonical form")
    s.add_argument("newick")
    s.add_argument("--out")
    s.set_defaults(func=cmd_newick)

    s = sub.add_parser("random", help="print a random trivalent tree")
    s.add_argument("--leaves", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--denom", type=int, default=4)
    s.add_argument("--out")
    s.set_defaults(func=cmd_random)

    s = sub.add_parser("dissim", help="dissimilarity vector of a tree")
    s.add_argument("--newick", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--rooted", action="store_true",
                   help="components d_{0,sigma} with |sigma| = m, sigma in 1..n")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_dissim)

    s = sub.add_parser("check", help="tropical membership of tree vectors")
    modes = s.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    for mode in ("grassmannian", "rooted-grassmannian", "flag"):
        ms = modes.add_parser(mode)
        if mode == "flag":
            ms.add_argument("--sizes", type=_int_list, required=True)
        else:
            ms.add_argument("--m", type=int, required=True)
        src = ms.add_mutually_exclusive_group(required=True)
        src.add_argument("--newick")
        src.add_argument("--random", action="store_true")
        ms.add_argument("--leaves", type=int)
        ms.add_argument("--trees", type=int, default=1)
        ms.add_argument("--seed", type=int, default=0)
        ms.add_argument("--denom", type=int, default=4)
        ms.add_argument("--jobs", type=int, default=1)
        ms.add_argument("--timing", action="store_true", help="include wall time in the report")
        ms.add_argument("--out")
        ms.set_defaults(func=cmd_check)

    s = sub.add_parser("tableaux", help="enumerate semistandard tableaux")
    s.add_argument("--shape", type=_int_list, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--newick", help="append d_{0,T} for this tree")
    s.add_argument("--out")
    s.set_defaults(func=cmd_tableaux)

    s = sub.add_parser("reconstruct", help="tree from an additive distance CSV")
    s.add_argument("--distances", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("selftest", help="classical relation checks and valuation cross-checks")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trees", type=int, default=20)
    s.add_argument("--out")
    s.add_argument("--inject-corruption", action="store_true", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"tropdissim: {exc}", file=sys.stderr)
        return exc.code
    except BoundsError as exc:
        print(f"tropdissim: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
