"""Fixed-width bit strings and incremental GF(2) elimination.

A :class:`BitString` packs its coordinates into a Python int in big-endian
order: coordinate 0 (the leftmost printed character) is the most significant
bit.  With that convention the integer value of ``x`` is also its index in a
truth table, and lexicographic order on equal-width strings is integer order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True, order=False)
class BitString:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError(f"negative length {self.length}")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"value {self.bits} does not fit in {self.length} bits")

    @classmethod
    def parse(cls, text: str) -> "BitString":
        text = text.strip()
        if any(c not in "01" for c in text):
            raise ValueError(f"not a bit string: {text!r}")
        return cls(len(text), int(text, 2) if text else 0)

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        return cls(length, 0)

    @classmethod
    def unit(cls, length: int, index: int) -> "BitString":
        """The string with a single 1 at coordinate ``index``."""
        if not 0 <= index < length:
            raise IndexError(index)
        return cls(length, 1 << (length - 1 - index))

    def __str__(self) -> str:
        return format(self.bits, f"0{self.length}b") if self.length else ""

    def __repr__(self) -> str:
        return f"BitString('{self}')"

    def __len__(self) -> int:
        return self.length

    def __int__(self) -> int:
        return self.bits

    def __getitem__(self, index: int) -> int:
        if index < 0:
            index += self.length
        if not 0 <= index < self.length:
            raise IndexError(index)
        return (self.bits >> (self.length - 1 - index)) & 1

    def __iter__(self) -> Iterator[int]:
        return (self[i] for i in range(self.length))

    def __add__(self, other: "BitString") -> "BitString":
        """Concatenation, as in the string notation ``uw``."""
        if not isinstance(other, BitString):
            return NotImplemented
        return BitString(self.length + other.length, (self.bits << other.length) | other.bits)

    def __xor__(self, other: "BitString") -> "BitString":
        return xor(self, other)

    def __lt__(self, other: "BitString") -> bool:
        _check_same_length(self, other)
        return self.bits < other.bits

    def __le__(self, other: "BitString") -> bool:
        _check_same_length(self, other)
        return self.bits <= other.bits

    def __gt__(self, other: "BitString") -> bool:
        return other < self

    def __ge__(self, other: "BitString") -> bool:
        return other <= self

    def is_zero(self) -> bool:
        return self.bits == 0

    def split(self, head: int) -> tuple["BitString", "BitString"]:
        """Split into the first ``head`` coordinates and the rest."""
        if not 0 <= head <= self.length:
            raise ValueError(f"cannot split {self.length} bits at {head}")
        tail = self.length - head
        return BitString(head, self.bits >> tail), BitString(tail, self.bits & ((1 << tail) - 1))


def _check_same_length(u: BitString, v: BitString) -> None:
    if u.length != v.length:
        raise ValueError(f"length mismatch: {u.length} != {v.length}")


def dot(u: BitString, v: BitString) -> int:
    """Inner product mod 2."""
    _check_same_length(u, v)
    return (u.bits & v.bits).bit_count() & 1


def xor(u: BitString, v: BitString) -> BitString:
    _check_same_length(u, v)
    return BitString(u.length, u.bits ^ v.bits)


def all_strings(length: int) -> Iterator[BitString]:
    """All strings of the given length in lexicographic order."""
    for value in range(1 << length):
        yield BitString(length, value)


@dataclass(frozen=True)
class Gf2Basis:
    """Reduced row-echelon basis of a subspace of GF(2)^n.

    Rows are stored as integers (big-endian, as in :class:`BitString`) sorted
    by decreasing value, so each row's leading 1 lies strictly right of the
    previous row's, and every pivot column is zero in all other rows.
    """

    n: int
    rows: tuple[int, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.rows)

    def vectors(self) -> list[BitString]:
        return [BitString(self.n, r) for r in self.rows]

    def pivots(self) -> list[int]:
        """Coordinate index of each row's leading 1."""
        return [self.n - r.bit_length() for r in self.rows]

    def reduce(self, value: int) -> int:
        for row in self.rows:
            top = 1 << (row.bit_length() - 1)
            if value & top:
                value ^= row
        return value

    def contains(self, y: BitString) -> bool:
        if y.length != self.n:
            raise ValueError(f"length mismatch: {y.length} != {self.n}")
        return self.reduce(y.bits) == 0


def insert(basis: Gf2Basis, y: BitString) -> tuple[Gf2Basis, bool]:
    """Add ``y`` to the basis; the flag says whether the span grew."""
    if y.length != basis.n:
        raise ValueError(f"length mismatch: {y.length} != {basis.n}")
    r = basis.reduce(y.bits)
    if r == 0:
        return basis, False
    top = 1 << (r.bit_length() - 1)
    rows = [row ^ r if row & top else row for row in basis.rows]
    rows.append(r)
    rows.sort(reverse=True)
    return Gf2Basis(basis.n, tuple(rows)), True


def basis_from(n: int, vectors: Iterable[BitString]) -> Gf2Basis:
    basis = Gf2Basis(n)
    for v in vectors:
        basis, _ = insert(basis, v)
    return basis


def null_space(basis: Gf2Basis) -> list[BitString]:
    """Basis of ``{v : dot(r, v) = 0 for every row r}``, one vector per free column."""
    n = basis.n
    pivots = basis.pivots()
    pivot_set = set(pivots)
    out = []
    for free in range(n):
        if free in pivot_set:
            continue
        shift = n - 1 - free
        v = 1 << shift
        for row, p in zip(basis.rows, pivots):
            if (row >> shift) & 1:
                v |= 1 << (n - 1 - p)
        out.append(BitString(n, v))
    return out
