"""Simon functions as dense truth tables, node slices, and the G/S views.

A table is indexed by the integer value of ``x``.  Splitting ``x = uw``
with ``w`` the last ``t`` bits gives ``index = (u << t) | w``, so
``table.reshape(2**(n-t), 2**t)`` has row ``u`` holding ``G(u)`` in node
order and column ``w`` holding node ``w``'s slice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Union

import numpy as np

from .errors import PromiseViolationError, TableFormatError
from .gf2 import BitString
from .rng import Xoshiro256

MAX_N = 24
MAX_M = 64
# Above this codomain size, values are drawn by rejection instead of a
# (virtual) pool shuffle.
POOL_LIMIT_BITS = 26


class SimonFunction:
    """Truth table of ``f: {0,1}^n -> {0,1}^m`` with a query counter.

    ``hidden_s`` is kept for test oracles only; solvers receive node oracles
    and simulators receive the table, never the shift.
    """

    def __init__(self, n: int, m: int, table, hidden_s: BitString | None = None):
        table = np.ascontiguousarray(table, dtype=np.uint64)
        if table.shape != (1 << n,):
            raise ValueError(f"table must have {1 << n} entries, got {table.shape}")
        if not 1 <= m <= MAX_M:
            raise ValueError(f"m={m} outside 1..{MAX_M}")
        if m < 64 and table.size and int(table.max()) >> m:
            raise ValueError(f"table values exceed {m} bits")
        if hidden_s is not None and hidden_s.length != n:
            raise ValueError("hidden_s has the wrong length")
        table.flags.writeable = False
        self.n = n
        self.m = m
        self.table = table
        self.hidden_s = hidden_s
        self.queries = 0

    def __repr__(self):
        return f"SimonFunction(n={self.n}, m={self.m})"

    def query(self, x: BitString) -> BitString:
        if x.length != self.n:
            raise ValueError(f"expected {self.n}-bit input, got {x.length}")
        self.queries += 1
        return BitString(self.m, int(self.table[x.bits]))

    __call__ = query

    def value(self, x: BitString) -> BitString:
        """Table lookup without touching the counter (for tests and reports)."""
        return BitString(self.m, int(self.table[x.bits]))

    def values(self) -> Iterator[tuple[BitString, BitString]]:
        for x in range(1 << self.n):
            yield BitString(self.n, x), BitString(self.m, int(self.table[x]))


TableLike = Union[SimonFunction, np.ndarray]


def _table_of(f: TableLike) -> np.ndarray:
    return f.table if isinstance(f, SimonFunction) else np.asarray(f, dtype=np.uint64)


def _domain_bits(table: np.ndarray) -> int:
    size = table.shape[0]
    if size < 1 or size & (size - 1):
        raise ValueError(f"table size {size} is not a power of two")
    return size.bit_length() - 1


def generate(n: int, m: int, s: BitString | None, seed: int) -> SimonFunction:
    """Random instance satisfying the promise for shift ``s``.

    Each coset ``{x, x ^ s}`` gets its own m-bit value, drawn without
    replacement.  With ``s=None`` a uniformly random nonzero shift is drawn
    first from the same stream.
    """
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n={n} outside 1..{MAX_N}")
    if not 1 <= m <= MAX_M:
        raise ValueError(f"m={m} outside 1..{MAX_M}")
    rng = Xoshiro256(seed)
    if s is None:
        s = BitString(n, 1 + rng.below((1 << n) - 1))
    if s.length != n:
        raise ValueError(f"shift has length {s.length}, expected {n}")
    xs = np.arange(1 << n, dtype=np.uint64)
    if s.bits:
        reps = xs[xs < (xs ^ np.uint64(s.bits))]
    else:
        reps = xs
    k = len(reps)
    if k > (1 << m):
        raise ValueError(f"codomain {{0,1}}^{m} too small for {k} distinct values")
    if m <= POOL_LIMIT_BITS:
        vals = rng.sample_distinct(1 << m, k)
    else:
        vals = rng.sample_distinct_rejection(1 << m, k)
    vals = np.array(vals, dtype=np.uint64)
    table = np.empty(1 << n, dtype=np.uint64)
    table[reps] = vals
    table[reps ^ np.uint64(s.bits)] = vals
    return SimonFunction(n, m, table, hidden_s=s)


def verify_promise(f: TableLike) -> BitString:
    """Recover the shift from the table alone, or raise PromiseViolationError."""
    table = _table_of(f)
    n = _domain_bits(table)
    order = np.argsort(table, kind="stable")
    ordered = table[order]
    _, counts = np.unique(ordered, return_counts=True)
    if counts.max() == 1:
        return BitString.zeros(n)
    if counts.max() > 2:
        raise PromiseViolationError("a value occurs more than twice")
    if counts.min() == 1:
        raise PromiseViolationError("some inputs collide and others do not")
    pairs = order.reshape(-1, 2).astype(np.uint64)
    diffs = pairs[:, 0] ^ pairs[:, 1]
    if np.any(diffs != diffs[0]):
        raise PromiseViolationError("colliding pairs disagree on the shift")
    return BitString(n, int(diffs[0]))


class NodeOracle:
    """Node ``w``'s view ``f_w(u) = f(uw)`` with its own counter."""

    def __init__(self, parent: SimonFunction, t: int, w: BitString):
        if w.length != t:
            raise ValueError(f"node id must have {t} bits")
        self.parent = parent
        self.t = t
        self.w = w
        self.queries = 0

    def __repr__(self):
        return f"NodeOracle(w='{self.w}', queries={self.queries})"

    @property
    def width(self) -> int:
        return self.parent.n - self.t

    @property
    def m(self) -> int:
        return self.parent.m

    def query(self, u: BitString) -> BitString:
        if u.length != self.width:
            raise ValueError(f"expected {self.width}-bit input, got {u.length}")
        self.queries += 1
        return BitString(self.parent.m, int(self.parent.table[(u.bits << self.t) | self.w.bits]))

    __call__ = query

    @property
    def values(self) -> np.ndarray:
        """All of ``f_w`` at once: the coherent-access view used by circuit
        simulators.  Not counted as classical queries."""
        return self.parent.table[self.w.bits :: 1 << self.t]


def subfunction(f: SimonFunction, t: int, w: BitString) -> NodeOracle:
    if not 0 <= t < f.n:
        raise ValueError(f"t={t} outside 0..{f.n - 1}")
    return NodeOracle(f, t, w)


def node_oracles(f: SimonFunction, t: int) -> dict[BitString, NodeOracle]:
    """One oracle per node id, ordered by ``w``."""
    return {w: subfunction(f, t, w) for w in (BitString(t, i) for i in range(1 << t))}


@dataclass(frozen=True)
class Multiset:
    elements: tuple[BitString, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def has_duplicates(self) -> bool:
        return any(a == b for a, b in zip(self.elements, self.elements[1:]))

    def __str__(self):
        return "{" + ",".join(str(e) for e in self.elements) + "}"


def _check_prefix(f: SimonFunction, t: int, u: BitString):
    if not 0 <= t < f.n:
        raise ValueError(f"t={t} outside 0..{f.n - 1}")
    if u.length != f.n - t:
        raise ValueError(f"u must have {f.n - t} bits")


def g_values(f: SimonFunction, t: int, u: BitString) -> list[BitString]:
    """G(u) in node order ``w = 0...0, ..., 1...1`` (unsorted)."""
    _check_prefix(f, t, u)
    base = u.bits << t
    return [BitString(f.m, int(f.table[base | w])) for w in range(1 << t)]


def multiset_g(f: SimonFunction, t: int, u: BitString) -> Multiset:
    return Multiset(tuple(sorted(g_values(f, t, u))))


def big_s(f: SimonFunction, t: int, u: BitString) -> BitString:
    """S(u): the elements of G(u) concatenated in lexicographic order."""
    out = BitString(0)
    for e in multiset_g(f, t, u):
        out = out + e
    return out


def sorted_slices(table: np.ndarray, t: int) -> np.ndarray:
    """Row u = G(u) sorted ascending; rows compare like S(u)."""
    n = _domain_bits(table)
    return np.sort(table.reshape(1 << (n - t), 1 << t), axis=1)


def s_labels(table: np.ndarray, t: int) -> np.ndarray:
    """Integer label per u with ``label[u] == label[v]`` iff S(u) == S(v)."""
    rows = sorted_slices(table, t)
    _, inverse = np.unique(rows, axis=0, return_inverse=True)
    return inverse.reshape(-1)


def _shift_of(f: SimonFunction) -> BitString:
    return f.hidden_s if f.hidden_s is not None else verify_promise(f)


def check_theorem1(f: SimonFunction, t: int) -> bool:
    """Exhaustive check that S(u) == S(v) exactly when u ^ v is 0 or s1."""
    if not 0 <= t < f.n:
        raise ValueError(f"t={t} outside 0..{f.n - 1}")
    s = _shift_of(f)
    if s.is_zero():
        raise ValueError("the theorem assumes a nonzero shift")
    s1, _ = s.split(f.n - t)
    labels = s_labels(f.table, t)
    us = np.arange(1 << (f.n - t), dtype=np.int64)
    chunk = max(1, (1 << 22) // len(us))
    for start in range(0, len(us), chunk):
        block = us[start : start + chunk]
        same = labels[block, None] == labels[None, :]
        d = block[:, None] ^ us[None, :]
        expected = (d == 0) | (d == s1.bits)
        if not np.array_equal(same, expected):
            return False
    return True


def g_elements_distinct(f: SimonFunction, t: int) -> bool:
    """True iff no G(u) holds a repeated value."""
    rows = sorted_slices(f.table, t)
    return bool(np.all(rows[:, 1:] > rows[:, :-1]))


# Worked example: n=4, m=6, s=1001.
EXAMPLE_VALUES = (
    "100101", "101100", "000100", "110101",
    "101010", "011001", "001101", "111100",
    "101100", "100101", "110101", "000100",
    "011001", "101010", "111100", "001101",
)
EXAMPLE_SHIFT = "1001"


def appendix_a() -> SimonFunction:
    table = np.array([int(v, 2) for v in EXAMPLE_VALUES], dtype=np.uint64)
    return SimonFunction(4, 6, table, hidden_s=BitString.parse(EXAMPLE_SHIFT))


FIXTURES = {"appendix_a": appendix_a}


def format_table(f: SimonFunction, reveal: bool = False) -> str:
    lines = [f"{f.n} {f.m}"]
    if reveal and f.hidden_s is not None:
        lines.append(f"# s={f.hidden_s}")
    width = f.m
    lines.extend(format(int(v), f"0{width}b") for v in f.table)
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> SimonFunction:
    lines = [ln.strip() for ln in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if not lines:
        raise TableFormatError("empty table file")
    try:
        n, m = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise TableFormatError(f"bad header line: {lines[0]!r}") from None
    if not 1 <= n <= MAX_N or not 1 <= m <= MAX_M:
        raise TableFormatError(f"unsupported sizes n={n}, m={m}")
    body = lines[1:]
    hidden = None
    if body and body[0].startswith("#"):
        comment = body.pop(0).lstrip("#").strip()
        if comment.startswith("s="):
            try:
                hidden = BitString.parse(comment[2:])
            except ValueError:
                raise TableFormatError(f"bad shift comment: {comment!r}") from None
            if hidden.length != n:
                raise TableFormatError("shift comment has the wrong length")
    if len(body) != 1 << n:
        raise TableFormatError(f"expected {1 << n} value lines, found {len(body)}")
    values = []
    for i, ln in enumerate(body):
        if len(ln) != m or any(c not in "01" for c in ln):
            raise TableFormatError(f"line {i + 2}: expected {m} bits, got {ln!r}")
        values.append(int(ln, 2))
    return SimonFunction(n, m, np.array(values, dtype=np.uint64), hidden_s=hidden)


def read_table(path) -> SimonFunction:
    return parse_table(Path(path).read_text())


def write_table(f: SimonFunction, path, reveal: bool = False) -> None:
    Path(path).write_text(format_table(f, reveal=reveal))
