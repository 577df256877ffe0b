"""Command-line front end: ``dsimon gen|solve|bench|verify``.

Exit codes:

    0  success
    1  solver finished without a verified answer
    2  usage error (argparse)
    3  truth-table or config file could not be parsed
    4  promise violation in the input table
    5  solver budget exhausted
    6  a ``verify`` check failed
    7  invalid argument combination
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import circuit, instance
from .errors import BudgetExhaustedError, PromiseViolationError, TableFormatError
from .gf2 import BitString, dot
from .instance import node_oracles
from .rng import Xoshiro256, derive_seed
from .solver import solve_centralized, solve_classical, solve_distributed

EXIT_OK = 0
EXIT_UNVERIFIED = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_PROMISE = 4
EXIT_BUDGET = 5
EXIT_CHECK_FAILED = 6
EXIT_INVALID = 7

ALGORITHMS = ("distributed", "centralized", "classical")


def _err(msg: str) -> None:
    print(f"dsimon: {msg}", file=sys.stderr)


def run_solver(algorithm: str, f: instance.SimonFunction, t: int, seed: int, round_trip: bool = True):
    rng = Xoshiro256(seed)
    if algorithm == "distributed":
        return solve_distributed(node_oracles(f, t), f.n, t, rng, round_trip=round_trip)
    if algorithm == "centralized":
        return solve_centralized(f, rng, round_trip=round_trip)
    if algorithm == "classical":
        return solve_classical(node_oracles(f, t), f.n, t, rng)
    raise ValueError(f"unknown algorithm {algorithm!r}")


# --- gen ---------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.fixture:
        if args.fixture not in instance.FIXTURES:
            _err(f"unknown fixture {args.fixture!r}; known: {', '.join(instance.FIXTURES)}")
            return EXIT_INVALID
        f = instance.FIXTURES[args.fixture]()
        if (
            (args.n is not None and args.n != f.n)
            or (args.m is not None and args.m != f.m)
            or (args.s is not None and args.s != str(f.hidden_s))
        ):
            _err(f"fixture {args.fixture} is n={f.n} m={f.m} s={f.hidden_s}")
            return EXIT_INVALID
        text = instance.format_table(f, reveal=True)
    else:
        if args.n is None or args.m is None:
            _err("gen needs -n and -m (or --fixture)")
            return EXIT_INVALID
        try:
            s = BitString.parse(args.s) if args.s is not None else None
            f = instance.generate(args.n, args.m, s, args.seed)
        except ValueError as exc:
            _err(str(exc))
            return EXIT_INVALID
        text = instance.format_table(f, reveal=args.reveal)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.reveal and not args.quiet:
        print(f"s={f.hidden_s}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


# --- solve -------------------------------------------------------------

def _load(path) -> instance.SimonFunction:
    return instance.read_table(path)


def cmd_solve(args) -> int:
    try:
        f = _load(args.table)
    except (OSError, TableFormatError) as exc:
        _err(f"cannot read {args.table}: {exc}")
        return EXIT_PARSE
    t = 0 if args.algorithm == "centralized" else args.t
    if not 0 <= t < f.n:
        _err(f"t={t} outside 0..{f.n - 1}")
        return EXIT_INVALID
    try:
        # input validation reads the file, not the oracles; not counted as queries
        instance.verify_promise(f)
        report = run_solver(args.algorithm, f, t, args.seed, not args.one_way)
    except PromiseViolationError as exc:
        _err(f"promise violation: {exc}")
        return EXIT_PROMISE
    except BudgetExhaustedError as exc:
        if exc.report is not None:
            print(json.dumps(exc.report.to_json()))
        _err(str(exc))
        return EXIT_BUDGET
    print(json.dumps(report.to_json()))
    return EXIT_OK if report.verified else EXIT_UNVERIFIED


# --- bench -------------------------------------------------------------

@dataclass
class BenchConfig:
    n_values: list[int]
    t_values: list[int]
    m: int
    trials: int = 1
    seed: int = 0
    algorithms: list[str] = field(default_factory=lambda: ["distributed"])
    output_path: str = "bench"
    workers: int = 1
    record_timing: bool = False
    round_trip: bool = True

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        for n in self.n_values:
            if not 1 <= n <= instance.MAX_N:
                raise ValueError(f"n={n} outside 1..{instance.MAX_N}")
            if self.m < n - 1:
                raise ValueError(f"m={self.m} too small for n={n} (need m >= n-1)")
            for t in self.t_values:
                if not 0 <= t < n:
                    raise ValueError(f"t={t} invalid for n={n}")

    def cells(self):
        for n in self.n_values:
            for t in self.t_values:
                for a in self.algorithms:
                    yield n, t, a


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def parse_bench_config(text: str) -> BenchConfig:
    """Flat ``key = value`` lines; lists are comma separated; ``#`` comments."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string("[bench]\n" + text)
    except configparser.Error as exc:
        raise TableFormatError(str(exc)) from None
    sec = cp["bench"]
    known = {f for f in BenchConfig.__dataclass_fields__}
    unknown = set(sec) - known
    if unknown:
        raise TableFormatError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = BenchConfig(
            n_values=_ints(sec["n_values"]),
            t_values=_ints(sec["t_values"]),
            m=int(sec["m"]),
            trials=sec.getint("trials", 1),
            seed=sec.getint("seed", 0),
            algorithms=[a.strip() for a in sec.get("algorithms", "distributed").split(",") if a.strip()],
            output_path=sec.get("output_path", "bench"),
            workers=sec.getint("workers", 1),
            record_timing=sec.getboolean("record_timing", False),
            round_trip=sec.getboolean("round_trip", True),
        )
    except (KeyError, ValueError) as exc:
        raise TableFormatError(f"bad config: {exc}") from None
    return cfg


def run_cell(cfg: BenchConfig, n: int, t: int, algorithm: str) -> list[dict]:
    rows = []
    for trial in range(cfg.trials):
        # the instance depends on the cell and trial only, so every
        # algorithm in a sweep sees the same functions
        inst_seed = derive_seed(cfg.seed, n, t, "instance", trial)
        solver_seed = derive_seed(cfg.seed, n, t, algorithm, trial)
        row = {"trial": trial, "cell_t": t}
        try:
            f = instance.generate(n, cfg.m, None, inst_seed)
            report = run_solver(algorithm, f, t, solver_seed, cfg.round_trip)
            rec = report.to_json()
            rec["algorithm"] = algorithm
            if not cfg.record_timing:
                rec["wall_time_ms"] = None
            rec["correct"] = report.recovered_s == f.hidden_s
            rec["error"] = None
        except Exception as exc:  # recorded in-row; the sweep continues
            rec = {"algorithm": algorithm, "n": n, "m": cfg.m, "t": t, "seed": solver_seed,
                   "verified": False, "correct": False, "error": f"{type(exc).__name__}: {exc}"}
        row.update(rec)
        rows.append(row)
    return rows


def _summarise(rows: list[dict]) -> list[dict]:
    cells: dict[tuple, list[dict]] = {}
    for r in rows:
        cells.setdefault((r["n"], r["cell_t"], r["algorithm"]), []).append(r)
    out = []
    for (n, t, a), rs in sorted(cells.items()):
        ok = [r for r in rs if r.get("error") is None]
        per_node = [q for r in ok for q in r["node_queries"].values()]
        totals = [sum(r["node_queries"].values()) for r in ok]
        runs = [r["runs"] for r in ok]

        def fmt(xs, fn):
            return f"{fn(xs):.4f}" if xs else ""

        out.append({
            "n": n,
            "t": t,
            "algorithm": a,
            "trials": len(rs),
            "failures": sum(1 for r in rs if r.get("error") or not r.get("verified")),
            "incorrect": sum(1 for r in ok if not r["correct"]),
            "mean_runs": fmt(runs, statistics.mean),
            "median_runs": fmt(runs, statistics.median),
            "mean_node_queries": fmt(per_node, statistics.mean),
            "max_node_queries": max(per_node) if per_node else "",
            "mean_total_queries": fmt(totals, statistics.mean),
            "median_total_queries": fmt(totals, statistics.median),
            "mean_extra_queries": fmt([r["extra_classical_queries"] for r in ok], statistics.mean),
            "mean_ebits": fmt([r["ebits"] for r in ok], statistics.mean),
        })
    return out


def run_bench(cfg: BenchConfig) -> tuple[list[dict], list[dict]]:
    cfg.validate()
    cells = list(cfg.cells())
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(run_cell, [cfg] * len(cells), *zip(*cells)))
    else:
        chunks = [run_cell(cfg, *c) for c in cells]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r["n"], r["cell_t"], r["algorithm"], r["trial"]))
    return rows, _summarise(rows)


def write_bench(rows, summary, prefix) -> tuple[Path, Path]:
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    jsonl = prefix.with_name(prefix.name + ".jsonl")
    csv_path = prefix.with_name(prefix.name + ".csv")
    jsonl.write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in rows))
    buf = io.StringIO()
    if summary:
        writer = csv.DictWriter(buf, fieldnames=list(summary[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(summary)
    csv_path.write_text(buf.getvalue())
    return jsonl, csv_path


def cmd_bench(args) -> int:
    try:
        cfg = parse_bench_config(Path(args.config).read_text())
    except (OSError, TableFormatError) as exc:
        _err(f"cannot read config {args.config}: {exc}")
        return EXIT_PARSE
    if args.seed is not None:
        cfg.seed = args.seed
    if args.output:
        cfg.output_path = args.output
    try:
        rows, summary = run_bench(cfg)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INVALID
    jsonl, csv_path = write_bench(rows, summary, cfg.output_path)
    if args.json:
        print(json.dumps(summary))
    elif not args.quiet:
        print(f"wrote {len(rows)} runs to {jsonl} and summary to {csv_path}")
    return EXIT_OK


# --- verify ------------------------------------------------------------

def verify_report(f: instance.SimonFunction, t: int) -> dict:
    """All exhaustive checks on one table; ``passed`` is False if any fails."""
    checks: dict[str, dict] = {}
    out = {"n": f.n, "m": f.m, "t": t, "checks": checks}
    try:
        s = instance.verify_promise(f)
    except PromiseViolationError as exc:
        checks["promise"] = {"status": "fail", "detail": str(exc)}
        out["passed"] = False
        return out
    checks["promise"] = {"status": "pass", "detail": f"s={s}"}
    k = f.n - t
    s1, s2 = s.split(k)
    us = [BitString(k, u) for u in range(1 << k)]
    out["G"] = {str(u): [str(v) for v in instance.g_values(f, t, u)] for u in us}
    out["S"] = {str(u): str(instance.big_s(f, t, u)) for u in us}

    if s.is_zero():
        checks["theorem1"] = {"status": "skipped", "detail": "s = 0^n hypothesis unmet"}
    else:
        ok = instance.check_theorem1(f, t)
        checks["theorem1"] = {"status": "pass" if ok else "fail", "detail": f"s1={s1}"}
        if not s1.is_zero():
            distinct = instance.g_elements_distinct(f, t)
            checks["distinct_g"] = {"status": "pass" if distinct else "fail",
                                    "detail": "no repeated element in any G(u)"}

    dist = circuit.exact_distribution(f, t)
    if s1.is_zero():
        expected = set(us)
    else:
        expected = {y for y in us if dot(y, s1) == 0}
    support_ok = set(dist.support()) == expected and dist.is_uniform_on_support() and dist.total() == 1
    checks["distribution"] = {
        "status": "pass" if support_ok else "fail",
        "detail": f"support size {len(dist.support())}, expected {len(expected)}",
    }
    out["distribution"] = dist.to_records()

    qubits = circuit.statevector_qubits(f.n, t, f.m)
    if qubits <= circuit.max_qubits():
        sv, leaked = circuit.run_statevector_circuit(f, t)
        same = sv == dist and leaked == 0
        checks["statevector"] = {"status": "pass" if same else "fail",
                                 "detail": f"{qubits} qubits, leaked weight {leaked}"}
    else:
        checks["statevector"] = {"status": "skipped",
                                 "detail": f"{qubits} qubits > cap {circuit.max_qubits()}"}
    out["passed"] = all(c["status"] != "fail" for c in checks.values())
    return out


def _print_verify(rep: dict, quiet: bool) -> None:
    for name, c in rep["checks"].items():
        status = c["status"] if c["status"] == "skipped" else c["status"].upper()
        print(f"{name}: {status} ({c['detail']})")
    if quiet or "G" not in rep:
        return
    print()
    print("u  G(u)")
    for u, vals in rep["G"].items():
        print(f"{u}  {{{','.join(vals)}}}")
    print()
    print("u  S(u)")
    for u, v in rep["S"].items():
        print(f"{u}  {v}")
    print()
    print("y  P(y)")
    for y, num, log2den in rep["distribution"]:
        print(f"{y}  {num}/2^{log2den}")


def cmd_verify(args) -> int:
    try:
        f = _load(args.table)
    except (OSError, TableFormatError) as exc:
        _err(f"cannot read {args.table}: {exc}")
        return EXIT_PARSE
    if not 0 <= args.t < f.n:
        _err(f"t={args.t} outside 0..{f.n - 1}")
        return EXIT_INVALID
    if f.n > 12:
        _err("verify is exhaustive and limited to n <= 12")
        return EXIT_INVALID
    rep = verify_report(f, args.t)
    if args.json:
        print(json.dumps(rep))
    else:
        _print_verify(rep, args.quiet)
    if rep["passed"]:
        return EXIT_OK
    failed = [k for k, c in rep["checks"].items() if c["status"] == "fail"]
    _err(f"failed: {', '.join(failed)}")
    return EXIT_PROMISE if failed == ["promise"] else EXIT_CHECK_FAILED


# --- entry point -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="64-bit seed")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--quiet", action="store_true", help="suppress diagnostics")

    p = argparse.ArgumentParser(prog="dsimon", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a random instance")
    g.add_argument("-n", type=int)
    g.add_argument("-m", type=int)
    g.add_argument("-s", help="hidden shift as bit text (random nonzero if omitted)")
    g.add_argument("--fixture", help="emit a named built-in table instead")
    g.add_argument("--reveal", action="store_true", help="record and print the hidden shift")
    g.add_argument("-o", "--out", help="output path (default: stdout)")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", parents=[common], help="recover s from a table")
    s.add_argument("table")
    s.add_argument("-t", type=int, default=1, help="log2 of the node count")
    s.add_argument("-a", "--algorithm", choices=ALGORITHMS, default="distributed")
    s.add_argument("--one-way", action="store_true", help="cost model: result registers are not teleported back")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", parents=[common], help="run a seeded sweep")
    b.add_argument("config")
    b.add_argument("-o", "--output", help="override output_path")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", parents=[common], help="exhaustive checks on a table")
    v.add_argument("table")
    v.add_argument("-t", type=int, default=1)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in ("gen", "solve") and args.seed is None:
        args.seed = 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
