"""End-to-end recovery of the hidden shift s = s1 s2.

The distributed solver repeats the circuit, collecting outcomes y in
s1-perp into an incremental GF(2) basis.  Once the basis has rank n-t-1 its
orthogonal complement is {0, c}, so s1 is either the candidate c or zero,
and a round of classical queries settles which and yields s2:

* query f(0^n) and f_w(c) for every node w;
* a node with f_w(c) = f(0^n) gives s1 = c and s2 = w;
* no match means s1 = 0; then f(c w) = f(c (w ^ s2)) for every w, so
  collisions among the values just read give s2 (none: s = 0^n).

Either way at most 2^t + 1 distinct classical points are read, and the
answer is verified before it is reported.
"""

from __future__ import annotations

import time
from collections.abc import Mapping
from dataclasses import dataclass, field

from .circuit import CostLedger, _ordered_oracles, prepare, sample_outcome
from .errors import BudgetExhaustedError, PromiseViolationError
from .gf2 import BitString, Gf2Basis, insert, null_space
from .instance import NodeOracle, SimonFunction, node_oracles
from .rng import Xoshiro256


@dataclass
class RunReport:
    algorithm: str
    n: int
    m: int
    t: int
    recovered_s: BitString | None
    s1: BitString | None
    s2: BitString | None
    runs: int
    node_queries: dict[str, int]
    extra_classical_queries: int
    cost: CostLedger = field(default_factory=CostLedger)
    verified: bool = False
    seed: int | None = None
    wall_time_ms: float | None = None
    rank: int = 0

    @property
    def total_queries(self) -> int:
        return sum(self.node_queries.values())

    def to_json(self) -> dict:
        def text(b):
            return None if b is None else str(b)

        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "m": self.m,
            "t": self.t,
            "seed": self.seed,
            "recovered_s": text(self.recovered_s),
            "s1": text(self.s1),
            "s2": text(self.s2),
            "runs": self.runs,
            "node_queries": dict(sorted(self.node_queries.items())),
            "extra_classical_queries": self.extra_classical_queries,
            "teleported_qubits": self.cost.teleported_qubits,
            "ebits": self.cost.ebits,
            "classical_bits": self.cost.classical_bits,
            "verified": self.verified,
            "wall_time_ms": self.wall_time_ms,
        }


class ClassicalAccess:
    """Memoised classical reads over a set of node oracles.

    A point already read is answered from memory, so the oracle counters
    record each distinct classical query once.
    """

    def __init__(self, oracles: Mapping, n: int, t: int):
        self.nodes = _ordered_oracles(oracles, t)
        self.n = n
        self.t = t
        self.known: dict[tuple[int, int], int] = {}

    def read(self, u: int, w: int) -> int:
        key = (u, w)
        if key not in self.known:
            self.known[key] = self.nodes[w].query(BitString(self.n - self.t, u)).bits
        return self.known[key]

    def f_zero(self) -> int:
        return self.read(0, 0)

    def point(self, s: BitString) -> int:
        u, w = s.split(self.n - self.t)
        return self.read(u.bits, w.bits)


def _access(oracles, n, t, access):
    return access if access is not None else ClassicalAccess(oracles, n, t)


def recover_s2(oracles: Mapping, n: int, t: int, s1: BitString, *, access: ClassicalAccess | None = None) -> BitString:
    """Find s2 once s1 is known, from f(0^n) and f_w(s1) for every node w."""
    acc = _access(oracles, n, t, access)
    if s1.length != n - t:
        raise ValueError(f"s1 must have {n - t} bits")
    target = acc.f_zero()
    matches = [w for w in range(1 << t) if acc.read(s1.bits, w) == target]
    if s1.bits:
        if len(matches) != 1:
            raise PromiseViolationError(f"{len(matches)} nodes match f(0^n) at prefix {s1}")
        return BitString(t, matches[0])
    others = [w for w in matches if w != 0]
    if len(others) > 1:
        raise PromiseViolationError("f(0^n) collides with more than one zero-prefix point")
    return BitString(t, others[0] if others else 0)


def s2_from_collisions(values: list[int], t: int) -> BitString | None:
    """Shift of a row ``values[w] = f(p w)`` when s1 = 0, or None if the
    collisions are inconsistent with any shift."""
    seen: dict[int, int] = {}
    diffs = set()
    for w, v in enumerate(values):
        if v in seen:
            diffs.add(seen[v] ^ w)
        else:
            seen[v] = w
    if not diffs:
        return BitString(t, 0)
    if len(diffs) > 1 or 2 * len(seen) != len(values):
        return None
    return BitString(t, diffs.pop())


def verify_solution(
    oracles: Mapping,
    n: int,
    t: int,
    s: BitString,
    *,
    exhaustive: bool = False,
    probe_prefix: BitString | None = None,
    access: ClassicalAccess | None = None,
) -> bool:
    """Check a candidate shift against the oracles.

    Nonzero ``s``: f(0^n) == f(s), two reads.  ``s = 0^n``: with
    ``exhaustive`` every point is read and injectivity checked (test use);
    otherwise a spot check that f(0^n) and f(p w) for all w, with p =
    ``probe_prefix`` (default zeros), are pairwise distinct.
    """
    if s.length != n:
        raise ValueError(f"candidate must have {n} bits")
    acc = _access(oracles, n, t, access)
    if s.bits:
        return acc.f_zero() == acc.point(s)
    if exhaustive:
        vals = [acc.read(u, w) for u in range(1 << (n - t)) for w in range(1 << t)]
        return len(set(vals)) == len(vals)
    p = probe_prefix.bits if probe_prefix is not None else 0
    probe = {(0, 0): acc.f_zero()}
    for w in range(1 << t):
        probe[(p, w)] = acc.read(p, w)
    return len(set(probe.values())) == len(probe)


def default_budget(n: int, t: int) -> int:
    return 4 * (n - t) + 20


def _settle(oracles, n, t, basis: Gf2Basis, acc: ClassicalAccess):
    """Try to finish from the current basis; returns (s1, s2) or None."""
    k = n - t
    if basis.rank == k:
        s1 = BitString.zeros(k)
        try:
            s2 = recover_s2(oracles, n, t, s1, access=acc)
        except PromiseViolationError:
            return None
        probe = s1
    elif basis.rank == k - 1:
        (c,) = null_space(basis)
        try:
            s2 = recover_s2(oracles, n, t, c, access=acc)
            s1 = c
        except PromiseViolationError:
            s1 = BitString.zeros(k)
            s2 = s2_from_collisions([acc.read(c.bits, w) for w in range(1 << t)], t)
            if s2 is None:
                return None
        probe = c
    else:
        return None
    if verify_solution(oracles, n, t, s1 + s2, probe_prefix=probe, access=acc):
        return s1, s2
    return None


def solve_distributed(
    oracles: Mapping[BitString, NodeOracle],
    n: int,
    t: int,
    rng: Xoshiro256,
    max_runs: int | None = None,
    *,
    algorithm: str = "distributed",
    round_trip: bool = True,
) -> RunReport:
    """Las Vegas recovery of s from the node oracles.

    Raises BudgetExhaustedError (carrying a partial report) if ``max_runs``
    circuit executions do not produce a verified answer.
    """
    start = time.perf_counter()
    k = n - t
    if max_runs is None:
        max_runs = default_budget(n, t)
    if max_runs < k:
        raise ValueError(f"max_runs={max_runs} is below n-t={k}")
    view = prepare(oracles, t)
    acc = ClassicalAccess(oracles, n, t)
    before = [o.queries for o in acc.nodes]
    ledger = CostLedger(round_trip=round_trip)
    for w in range(1 << t):
        ledger.node_queries[str(BitString(t, w))] = 0
    basis = Gf2Basis(k)
    settled = None
    attempted_rank = -1
    while True:
        if basis.rank != attempted_rank:
            attempted_rank = basis.rank
            settled = _settle(oracles, n, t, basis, acc)
            if settled is not None:
                break
        if ledger.runs >= max_runs:
            break
        y = sample_outcome(view, t, rng, ledger)
        basis, _ = insert(basis, y)

    node_queries = {}
    extra = 0
    for w, (o, b) in enumerate(zip(acc.nodes, before)):
        key = str(BitString(t, w))
        node_queries[key] = ledger.node_queries[key] + (o.queries - b)
        extra += o.queries - b
    s1, s2 = settled if settled is not None else (None, None)
    report = RunReport(
        algorithm=algorithm,
        n=n,
        m=view.m,
        t=t,
        recovered_s=None if settled is None else s1 + s2,
        s1=s1,
        s2=s2,
        runs=ledger.runs,
        node_queries=node_queries,
        extra_classical_queries=extra,
        cost=ledger,
        verified=settled is not None,
        seed=rng.seed,
        wall_time_ms=(time.perf_counter() - start) * 1000.0,
        rank=basis.rank,
    )
    if settled is None:
        raise BudgetExhaustedError(
            f"no verified shift after {ledger.runs} runs (rank {basis.rank} of {k})",
            report=report,
            basis=basis,
        )
    return report


def solve_centralized(
    f: SimonFunction, rng: Xoshiro256, max_runs: int | None = None, *, round_trip: bool = True
) -> RunReport:
    """The single-oracle (t = 0) instance of the same pipeline."""
    return solve_distributed(
        node_oracles(f, 0), f.n, 0, rng, max_runs, algorithm="centralized", round_trip=round_trip
    )


def solve_classical(oracles: Mapping[BitString, NodeOracle], n: int, t: int, rng: Xoshiro256) -> RunReport:
    """Birthday-style collision search over the nodes.

    Nodes are queried round-robin, each at a fresh uniformly random point of
    its own slice.  The first collision f(x) = f(y) gives s = x ^ y; after
    2^(n-1) + 1 collision-free queries the function must be injective.
    Each answer is shipped to a coordinator, costing n + m classical bits.
    """
    start = time.perf_counter()
    nodes = _ordered_oracles(oracles, t)
    k = n - t
    m = nodes[0].m
    before = [o.queries for o in nodes]
    pools: list[dict[int, int]] = [{} for _ in nodes]
    drawn = [0] * len(nodes)
    seen: dict[int, int] = {}
    limit = min((1 << (n - 1)) + 1, 1 << n)
    s = BitString.zeros(n)
    queries = 0
    w = 0
    while queries < limit:
        # sparse Fisher-Yates per node: sampling without replacement
        pool, i = pools[w], drawn[w]
        if i >= 1 << k:
            w = (w + 1) % len(nodes)
            continue
        j = i + rng.below((1 << k) - i)
        u = pool.get(j, j)
        pool[j] = pool.get(i, i)
        drawn[w] += 1
        value = nodes[w].query(BitString(k, u)).bits
        queries += 1
        x = (u << t) | w
        if value in seen:
            s = BitString(n, seen[value] ^ x)
            break
        seen[value] = x
        w = (w + 1) % len(nodes)

    node_queries = {str(BitString(t, i)): o.queries - b for i, (o, b) in enumerate(zip(nodes, before))}
    total = sum(node_queries.values())
    s1, s2 = s.split(k)
    cost = CostLedger(node_queries=dict(node_queries), classical_bits=total * (n + m))
    return RunReport(
        algorithm="classical",
        n=n,
        m=m,
        t=t,
        recovered_s=s,
        s1=s1,
        s2=s2,
        runs=0,
        node_queries=node_queries,
        extra_classical_queries=total,
        cost=cost,
        verified=True,
        seed=rng.seed,
        wall_time_ms=(time.perf_counter() - start) * 1000.0,
    )
