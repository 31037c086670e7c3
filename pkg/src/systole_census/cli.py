"""Command-line frontend: census tables, verification reports, caching.

Configuration precedence is flags, then SYSTOLE_* environment variables,
then built-in defaults.  Exit codes: 0 success, 1 verification failure,
2 usage, 3 resource limit / incomplete enumeration, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import io
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import crossing_census as census
from . import dirichlet
from .congruence_surface import genus, index, sl2_bruteforce_order
from .crossing_census import (
    CurveSystemMatrix,
    find_subfamily,
    proposition_lower_bound,
    subfamily_average,
)
from .errors import DomainError, IncompleteEnumerationError, ResourceLimitError
from .geodesic_intersections import (
    INTERSECTION_ALGORITHM_VERSION,
    IntersectionMatrix,
    intersection_matrix,
)
from .integer_arith import is_squarefree
from .quad_forms import class_cycles, class_number

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_IO = 4

SCHEMA_VERSION = "1"

CSV_COLUMNS = [
    "N",
    "squarefree",
    "index",
    "genus",
    "cusps",
    "h",
    "systole_count",
    "total_int",
    "cr_bound",
    "log_sys_ratio",
    "log_cr_ratio",
    "log_index_ratio",
]


def _env(name: str, default=None, cast=str):
    raw = os.environ.get(f"SYSTOLE_{name}")
    if raw is None:
        return default
    if cast is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return cast(raw)


# ---------------------------------------------------------------------------
# cache


def _payload_hash(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def load_cached_matrix(cache_dir: str, N: int) -> IntersectionMatrix | None:
    path = os.path.join(cache_dir, f"{N}.json")
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    payload = doc.get("payload")
    if not payload:
        return None
    if payload.get("algorithm_version") != INTERSECTION_ALGORITHM_VERSION:
        return None  # stale algorithm; recompute
    if doc.get("content_hash") != _payload_hash(payload):
        return None  # corrupted; recompute
    return IntersectionMatrix.from_jsonable(payload)


def store_cached_matrix(cache_dir: str, matrix: IntersectionMatrix) -> None:
    os.makedirs(cache_dir, exist_ok=True)
    payload = matrix.to_jsonable()
    doc = {"content_hash": _payload_hash(payload), "payload": payload}
    path = os.path.join(cache_dir, f"{matrix.N}.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _matrix_worker(N: int) -> dict:
    return intersection_matrix(N).to_jsonable()


def _gather_matrices(levels, cache_dir, jobs):
    """Matrix (or stored failure) per level, using the cache where valid."""
    results: dict[int, IntersectionMatrix | Exception] = {}
    missing = []
    for N in levels:
        cached = load_cached_matrix(cache_dir, N) if cache_dir else None
        if cached is not None:
            results[N] = cached
        else:
            missing.append(N)
    if jobs > 1 and len(missing) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {N: pool.submit(_matrix_worker, N) for N in missing}
            for N, fut in futures.items():
                try:
                    results[N] = IntersectionMatrix.from_jsonable(fut.result())
                except ResourceLimitError as exc:
                    results[N] = exc
    else:
        for N in missing:
            try:
                results[N] = intersection_matrix(N)
            except ResourceLimitError as exc:
                results[N] = exc
    if cache_dir:
        for N in missing:
            if isinstance(results.get(N), IntersectionMatrix):
                store_cached_matrix(cache_dir, results[N])
    return results


# ---------------------------------------------------------------------------
# census


def _rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r.N,
                int(r.squarefree),
                r.index,
                r.genus,
                r.cusps,
                r.class_number,
                r.systole_count,
                r.total_intersections if r.total_intersections is not None else "",
                r.crossing_bound if r.crossing_bound is not None else "",
                repr(r.log_systole_ratio),
                repr(r.log_crossing_ratio) if r.log_crossing_ratio is not None else "",
                repr(r.log_index_ratio),
            ]
        )
    return buf.getvalue()


def cmd_census(args) -> int:
    if args.n_min < 3 or args.n_min > args.n_max:
        print(f"invalid level range [{args.n_min}, {args.n_max}]", file=sys.stderr)
        return EXIT_USAGE
    levels = [
        N
        for N in range(args.n_min, args.n_max + 1)
        if not args.squarefree_only or is_squarefree(N * N - 4)
    ]
    matrices = _gather_matrices(levels, args.cache_dir, args.jobs)

    def provider(N):
        result = matrices[N]
        if isinstance(result, Exception):
            raise result
        return result

    rows = census.exponent_table(
        args.n_min, args.n_max, args.squarefree_only, matrix_provider=provider
    )
    if args.format == "csv":
        text = _rows_to_csv(rows)
    else:
        record = {
            "schema_version": SCHEMA_VERSION,
            "parameters": {
                "n_min": args.n_min,
                "n_max": args.n_max,
                "squarefree_only": args.squarefree_only,
                "seed": args.seed,
            },
            "rows": [r.to_jsonable() for r in rows],
        }
        if not args.no_timestamp:
            record["generated_at"] = datetime.datetime.now(
                datetime.timezone.utc
            ).isoformat()
        if args.include_matrices:
            record["matrices"] = {
                str(N): m.to_jsonable()
                for N, m in sorted(matrices.items())
                if isinstance(m, IntersectionMatrix)
            }
        text = json.dumps(record, indent=2, sort_keys=True) + "\n"
    try:
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.figures:
            from .plotting import render_census_figures

            for path in render_census_figures(rows, args.figures):
                print(f"wrote {path}", file=sys.stderr)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if any(r.error for r in rows):
        return EXIT_RESOURCE
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _verify_cnf(args):
    items = []
    for N in range(args.n_min, args.n_max + 1):
        report = dirichlet.verify_class_number_formula(N, args.tol)
        if report.status == "skipped":
            items.append((f"cnf N={N} (D={report.D} not squarefree)", "skip", ""))
        else:
            detail = f"residual={report.residual:.3e} threshold={report.threshold:.3e}"
            items.append((f"cnf N={N} D={report.D}", report.status, detail))
    return items


def _verify_index(args):
    items = []
    for N in range(max(2, args.n_min), args.n_max + 1):
        formula = index(N)
        brute = sl2_bruteforce_order(N)
        ok = formula == brute
        items.append(
            (f"index N={N}", "pass" if ok else "fail", f"formula={formula} brute={brute}")
        )
    return items


_GENUS_ANCHORS = {3: 0, 4: 0, 5: 0, 6: 1, 7: 3}


def _verify_genus(args):
    items = []
    for N in range(max(3, args.n_min), args.n_max + 1):
        try:
            g = genus(N)  # integrality asserted inside
        except AssertionError as exc:
            items.append((f"genus N={N}", "fail", str(exc)))
            continue
        if N in _GENUS_ANCHORS:
            ok = g == _GENUS_ANCHORS[N]
            items.append(
                (f"genus N={N}", "pass" if ok else "fail", f"g={g} expected {_GENUS_ANCHORS[N]}")
            )
        else:
            items.append((f"genus N={N}", "pass", f"g={g} integral"))
    return items


def _verify_lemma4(args):
    from itertools import combinations
    from math import comb

    rng = random.Random(args.seed)
    items = []
    for trial in range(20):
        n = rng.randint(4, 12)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                rows[i][j] = rows[j][i] = rng.randint(0, 6)
        M = CurveSystemMatrix.from_rows(rows)
        for k in range(1, n + 1):
            avg = subfamily_average(M, k)
            total = sum(
                M.crossing_of(s) for s in combinations(range(n), k)
            )
            # exact rational comparison against the enumerated mean
            exact = total == avg * comb(n, k)
            if not exact:
                items.append((f"lemma4 avg trial={trial} k={k}", "fail", f"avg={avg}"))
                break
        else:
            items.append((f"lemma4 avg trial={trial} n={n}", "pass", ""))
            k = rng.randint(1, n - 1)
            subset = find_subfamily(M, k, seed=args.seed + trial)
            cr = M.crossing_of(subset)
            bound_num = k * k * M.crossing_number
            ok = cr * n * n < bound_num or (M.crossing_number == 0 and cr == 0)
            items.append(
                (
                    f"lemma4 subfamily trial={trial} k={k}",
                    "pass" if ok else "fail",
                    f"cr={cr} bound={bound_num}/{n * n}",
                )
            )
    return items


def _verify_prop2(args):
    items = []
    for g in range(2, 8):
        boundary_ok = all(
            (proposition_lower_bound(g, n) == 0) == (n <= 3 * g - 3)
            for n in range(1, 12 * g)
        )
        items.append(
            (f"prop2 boundary g={g}", "pass" if boundary_ok else "fail", "zero iff n <= 3g-3")
        )
    # census consistency: lower bound never exceeds the upper bound
    matrices = _gather_matrices(
        [
            N
            for N in range(max(3, args.n_min), args.n_max + 1)
            if is_squarefree(N * N - 4)
        ],
        args.cache_dir,
        jobs=1,
    )
    for N, m in sorted(matrices.items()):
        if isinstance(m, Exception):
            items.append((f"prop2 census N={N}", "fail", str(m)))
            continue
        inv_genus = genus(N)
        if inv_genus < 2:
            items.append((f"prop2 census N={N}", "skip", f"genus {inv_genus} < 2"))
            continue
        lower = proposition_lower_bound(inv_genus, index(N) * class_number(N * N - 4))
        upper = index(N) * m.total
        ok = lower <= upper
        items.append(
            (f"prop2 census N={N}", "pass" if ok else "fail", f"lower={lower} upper={upper}")
        )
    return items


def cmd_verify(args) -> int:
    handlers = {
        "cnf": _verify_cnf,
        "index": _verify_index,
        "genus": _verify_genus,
        "lemma4": _verify_lemma4,
        "prop2": _verify_prop2,
    }
    items = handlers[args.kind](args)
    failures = sum(1 for _, status, _ in items if status == "fail")
    if args.format == "json":
        doc = {
            "kind": args.kind,
            "items": [
                {"item": name, "status": status, "detail": detail}
                for name, status, detail in items
            ],
            "failures": failures,
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for name, status, detail in items:
            tag = {"pass": "PASS", "fail": "FAIL", "skip": "SKIP"}[status]
            line = f"{tag}  {name}"
            if detail:
                line += f"  [{detail}]"
            print(line)
        print(f"{len(items)} checks, {failures} failures")
    return EXIT_VERIFY_FAIL if failures else EXIT_OK


# ---------------------------------------------------------------------------
# other subcommands


def cmd_intersections(args) -> int:
    N = args.N
    if N < 3:
        print(f"level must be >= 3, got {N}", file=sys.stderr)
        return EXIT_USAGE
    matrix = None
    if args.cache_dir:
        matrix = load_cached_matrix(args.cache_dir, N)
    if matrix is None:
        try:
            matrix = intersection_matrix(N)
        except IncompleteEnumerationError as exc:
            print(f"incomplete enumeration: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
        if args.cache_dir:
            try:
                store_cached_matrix(args.cache_dir, matrix)
            except OSError as exc:
                print(f"I/O error: {exc}", file=sys.stderr)
                return EXIT_IO
    if args.format == "json":
        print(json.dumps(matrix.to_jsonable(), indent=2, sort_keys=True))
    else:
        print(f"N={matrix.N} D={matrix.D} squarefree={matrix.squarefree} h={matrix.h}")
        print(
            f"certificate: enumeration_bound={matrix.enumeration_bound} "
            f"doubling_passes={matrix.doubling_passes} "
            f"algorithm_version={INTERSECTION_ALGORITHM_VERSION}"
        )
        for rep, row in zip(matrix.classes, matrix.entries):
            print(f"{tuple(rep)!s:>16}  " + " ".join(f"{x:5d}" for x in row))
        print(f"total={matrix.total}")
    return EXIT_OK


def cmd_class_number(args) -> int:
    D = args.D
    try:
        cycles = class_cycles(D)
    except DomainError as exc:
        print(f"invalid discriminant: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        doc = {
            "D": D,
            "h": len(cycles),
            "cycles": [[list(f) for f in c.forms] for c in cycles],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"D={D} h={len(cycles)}")
        for i, c in enumerate(cycles):
            print(f"cycle {i}: " + " ".join(str(tuple(f)) for f in c.forms))
    return EXIT_OK


def cmd_l_value(args) -> int:
    try:
        est = dirichlet.l_value(args.D, args.tol)
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    if args.format == "json":
        print(
            json.dumps(
                {
                    "D": est.D,
                    "delta": est.delta,
                    "value": est.value,
                    "tail_bound": est.tail_bound,
                    "rounding_bound": est.rounding_bound,
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        print(
            f"L(chi_{est.D}, 1) = {est.value!r} +- {est.total_error:.3e} "
            f"(Delta={est.delta})"
        )
    return EXIT_OK


def cmd_subfamily(args) -> int:
    if args.matrix:
        try:
            with open(args.matrix) as fh:
                doc = json.load(fh)
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
        except json.JSONDecodeError as exc:
            print(f"bad matrix file: {exc}", file=sys.stderr)
            return EXIT_USAGE
        M = CurveSystemMatrix.from_rows(doc["entries"])
    elif args.from_level:
        matrix = None
        if args.cache_dir:
            matrix = load_cached_matrix(args.cache_dir, args.from_level)
        if matrix is None:
            matrix = intersection_matrix(args.from_level)
        M = CurveSystemMatrix.from_intersection_matrix(matrix)
    else:
        print("subfamily needs --matrix FILE or --from-level N", file=sys.stderr)
        return EXIT_USAGE
    try:
        subset = find_subfamily(M, args.k, seed=args.seed)
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cr = M.crossing_of(subset)
    avg = subfamily_average(M, args.k)
    doc = {
        "n": M.n,
        "k": args.k,
        "seed": args.seed,
        "subset": list(subset),
        "crossing_number": cr,
        "family_crossing_number": M.crossing_number,
        "average": [avg.numerator, avg.denominator],
    }
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(
            f"subset {subset} of size {args.k}: cr={cr} "
            f"(family cr={M.crossing_number}, bound {args.k}^2/{M.n}^2 * cr)"
        )
    return EXIT_OK


def cmd_lower_bound(args) -> int:
    try:
        value = proposition_lower_bound(args.g, args.n)
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        print(json.dumps({"g": args.g, "n": args.n, "lower_bound": value}))
    else:
        print(f"crossing number of any {args.n}-curve system on genus {args.g}: >= {value}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common(p, *, tol=False, seed=False, cache=False, jobs=False, fmt=True):
    if fmt:
        p.add_argument(
            "--format",
            choices=("csv", "json", "text"),
            default=_env("FORMAT", "text"),
            help="output format",
        )
    if tol:
        p.add_argument(
            "--tol", type=float, default=_env("TOL", 1e-3, float), help="L-value tolerance"
        )
    if seed:
        p.add_argument(
            "--seed", type=int, default=_env("SEED", 0, int), help="random seed"
        )
    if cache:
        p.add_argument(
            "--cache-dir",
            default=_env("CACHE_DIR"),
            help="directory of per-level cached matrices",
        )
    if jobs:
        p.add_argument(
            "--jobs", type=int, default=_env("JOBS", 1, int), help="worker processes"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="systole-census",
        description="Systole counts and crossing-number bounds of congruence surfaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="exponent table over a range of levels")
    p.add_argument("--n-min", type=int, default=_env("N_MIN", 3, int))
    p.add_argument("--n-max", type=int, default=_env("N_MAX", 12, int))
    p.add_argument(
        "--squarefree-only",
        action="store_true",
        default=_env("SQUAREFREE_ONLY", False, bool),
    )
    p.add_argument(
        "--no-timestamp",
        action="store_true",
        default=_env("NO_TIMESTAMP", False, bool),
    )
    p.add_argument("--include-matrices", action="store_true")
    p.add_argument("--output", help="write table to this file instead of stdout")
    p.add_argument("--figures", help="also render PNG figures into this directory")
    _add_common(p, seed=True, cache=True, jobs=True, fmt=False)
    p.add_argument(
        "--format", choices=("csv", "json"), default=_env("FORMAT", "csv")
    )
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify", help="run one family of verification checks")
    p.add_argument("kind", choices=("cnf", "index", "genus", "lemma4", "prop2"))
    p.add_argument("--n-min", type=int, default=_env("N_MIN", 3, int))
    p.add_argument("--n-max", type=int, default=_env("N_MAX", 30, int))
    _add_common(p, tol=True, seed=True, cache=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("intersections", help="intersection matrix for one level")
    p.add_argument("N", type=int)
    _add_common(p, cache=True)
    p.set_defaults(func=cmd_intersections)

    p = sub.add_parser("class-number", help="reduction cycles of a discriminant")
    p.add_argument("D", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_class_number)

    p = sub.add_parser("l-value", help="certified L(chi_D, 1) estimate")
    p.add_argument("D", type=int)
    _add_common(p, tol=True)
    p.set_defaults(func=cmd_l_value)

    p = sub.add_parser("subfamily", help="find a sparse subfamily of a curve system")
    p.add_argument("k", type=int)
    p.add_argument("--matrix", help="JSON file with an 'entries' matrix")
    p.add_argument("--from-level", type=int, help="use the level-N geodesic matrix")
    _add_common(p, seed=True, cache=True)
    p.set_defaults(func=cmd_subfamily)

    p = sub.add_parser("lower-bound", help="curve-system crossing lower bound")
    p.add_argument("g", type=int)
    p.add_argument("n", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_lower_bound)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
