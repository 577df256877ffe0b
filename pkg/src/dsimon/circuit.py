"""Exact simulation of the distributed Simon circuit.

The circuit puts the first register (n-t qubits) in uniform superposition,
has every node query its oracle into its own m-qubit register, xors the
sorted concatenation of those registers (S(u)) into a target register,
queries again to uncompute the node registers, and applies Hadamards to the
first register before measuring it.

Because the node registers return to |0>, only the pairing of u with S(u)
affects the outcome:

    P(y) = 2^-2k * sum_c |sum_{u: S(u)=c} (-1)^(u.y)|^2,   k = n - t

which is what :func:`exact_distribution` evaluates with integer
arithmetic.  :func:`statevector_run` builds the whole register file for
tiny instances and serves as an independent check of that reduction.

Simulators here see only node value slices (coherent oracle access); they
never read an instance's hidden shift.
"""

from __future__ import annotations

import os
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import SimulationIntegrityError
from .gf2 import BitString
from .instance import NodeOracle, SimonFunction
from .rng import Xoshiro256
from .sorting import sort_arrays

DEFAULT_MAX_QUBITS = 22


def max_qubits() -> int:
    return int(os.environ.get("DSIMON_MAX_QUBITS", DEFAULT_MAX_QUBITS))


@dataclass(frozen=True)
class MeasurementDistribution:
    """Exact law of the measured first register.

    ``numerators[y] / 2**log2_denominator`` is the probability of outcome
    ``y`` (indexed by its integer value).  The fraction is kept reduced, so
    two distributions are equal iff their fields are equal.
    """

    width: int
    numerators: tuple[int, ...]
    log2_denominator: int

    @classmethod
    def from_counts(cls, width: int, numerators, log2_denominator: int) -> "MeasurementDistribution":
        nums = [int(v) for v in numerators]
        if len(nums) != 1 << width:
            raise ValueError("one numerator per outcome required")
        if any(v < 0 for v in nums):
            raise ValueError("negative weight")
        while log2_denominator > 0 and all(v % 2 == 0 for v in nums):
            nums = [v // 2 for v in nums]
            log2_denominator -= 1
        return cls(width, tuple(nums), log2_denominator)

    def probability(self, y: BitString) -> Fraction:
        if y.length != self.width:
            raise ValueError("outcome has the wrong width")
        return Fraction(self.numerators[y.bits], 1 << self.log2_denominator)

    @property
    def weights(self) -> dict[BitString, Fraction]:
        den = 1 << self.log2_denominator
        return {BitString(self.width, y): Fraction(v, den) for y, v in enumerate(self.numerators)}

    def total(self) -> Fraction:
        return Fraction(sum(self.numerators), 1 << self.log2_denominator)

    def support(self) -> list[BitString]:
        return [BitString(self.width, y) for y, v in enumerate(self.numerators) if v]

    def is_uniform_on_support(self) -> bool:
        nonzero = {v for v in self.numerators if v}
        return len(nonzero) == 1

    def to_records(self) -> list[tuple[str, int, int]]:
        """Support as ``(y, numerator, log2_denominator)``, each reduced."""
        out = []
        for y, v in enumerate(self.numerators):
            if not v:
                continue
            f = Fraction(v, 1 << self.log2_denominator)
            out.append((str(BitString(self.width, y)), f.numerator, f.denominator.bit_length() - 1))
        return out


def communication_cost(n: int, t: int, m: int, runs: int, *, round_trip: bool = True) -> tuple[int, int, int]:
    """(teleported qubits, ebits, classical bits) for ``runs`` circuit executions.

    Per run the n-t control qubits go to each of the 2^t nodes, and each
    node's m-qubit result goes to the sorting node and (with ``round_trip``)
    back for uncomputation.  One teleported qubit costs one ebit and two
    classical bits.
    """
    nodes = 1 << t
    per_run = nodes * (n - t) + (2 if round_trip else 1) * nodes * m
    qubits = runs * per_run
    return qubits, qubits, 2 * qubits


@dataclass
class CostLedger:
    runs: int = 0
    node_queries: dict[str, int] = field(default_factory=dict)
    teleported_qubits: int = 0
    ebits: int = 0
    classical_bits: int = 0
    round_trip: bool = True

    def record_run(self, n: int, t: int, m: int) -> None:
        self.runs += 1
        for w in range(1 << t):
            key = str(BitString(t, w))
            # each node queries twice: compute, then uncompute
            self.node_queries[key] = self.node_queries.get(key, 0) + 2
        q, e, c = communication_cost(n, t, m, 1, round_trip=self.round_trip)
        self.teleported_qubits += q
        self.ebits += e
        self.classical_bits += c

    def merge(self, other: "CostLedger") -> None:
        self.runs += other.runs
        for k, v in other.node_queries.items():
            self.node_queries[k] = self.node_queries.get(k, 0) + v
        self.teleported_qubits += other.teleported_qubits
        self.ebits += other.ebits
        self.classical_bits += other.classical_bits

    def snapshot(self) -> "CostLedger":
        return CostLedger(self.runs, dict(self.node_queries), self.teleported_qubits,
                          self.ebits, self.classical_bits, self.round_trip)


class SortedView:
    """Node slices of one instance arranged for the simulators.

    ``matrix[u, w] = f_w(u)``; ``rows`` is each row sorted, i.e. S(u) as a
    tuple of m-bit words.  Built once per (oracle set, t) and reused across
    circuit runs.
    """

    def __init__(self, matrix: np.ndarray, m: int):
        matrix = np.asarray(matrix, dtype=np.uint64)
        k_size, nodes = matrix.shape
        if k_size & (k_size - 1) or nodes & (nodes - 1):
            raise ValueError("slice matrix dimensions must be powers of two")
        self.matrix = matrix
        self.m = m
        self.width = k_size.bit_length() - 1
        self.t = nodes.bit_length() - 1
        self.n = self.width + self.t
        self.rows = np.sort(matrix, axis=1)
        self._labels = None

    @property
    def labels(self) -> np.ndarray:
        if self._labels is None:
            _, inv = np.unique(self.rows, axis=0, return_inverse=True)
            self._labels = inv.reshape(-1)
        return self._labels

    def classes_by_size(self) -> dict[int, np.ndarray]:
        """Partition of first-register values by S(u), as one (groups, size)
        member matrix per class size."""
        order = np.argsort(self.labels, kind="stable")
        counts = np.bincount(self.labels)
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        out = {}
        for size in np.unique(counts):
            first = starts[counts == size]
            out[int(size)] = order[first[:, None] + np.arange(size)]
        return out


def prepare(source, t: int) -> SortedView:
    """Accept a SimonFunction, a node-oracle mapping or an existing SortedView."""
    if isinstance(source, SortedView):
        if source.t != t:
            raise ValueError(f"view was built for t={source.t}, not {t}")
        return source
    if isinstance(source, SimonFunction):
        if not 0 <= t < source.n:
            raise ValueError(f"t={t} outside 0..{source.n - 1}")
        return SortedView(source.table.reshape(1 << (source.n - t), 1 << t), source.m)
    if isinstance(source, Mapping):
        oracles = _ordered_oracles(source, t)
        matrix = np.column_stack([o.values for o in oracles])
        return SortedView(matrix, oracles[0].m)
    raise TypeError(f"cannot simulate over {type(source).__name__}")


def _ordered_oracles(oracles: Mapping, t: int) -> list[NodeOracle]:
    out = []
    for w in range(1 << t):
        key = BitString(t, w)
        o = oracles.get(key)
        if o is None:
            o = oracles.get(str(key))
        if o is None:
            raise ValueError(f"missing oracle for node {key}")
        out.append(o)
    return out


def walsh_hadamard(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Unnormalised Hadamard transform over ``axis`` (length a power of two).

    ``out[y] = sum_x (-1)^popcount(x & y) * values[x]``; exact for integers.
    """
    a = np.moveaxis(np.asarray(values), axis, 0)
    size = a.shape[0]
    rest = a.shape[1:]
    a = a.reshape(size, -1).copy()
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h, a.shape[-1])
        x, y = a[:, 0], a[:, 1]
        a = np.stack((x + y, x - y), axis=1).reshape(size, -1)
        h *= 2
    return np.moveaxis(a.reshape((size,) + rest), 0, axis)


def exact_distribution(source, t: int) -> MeasurementDistribution:
    """Measurement law of the first register, from node slices alone.

    With ``h[d]`` the number of ordered pairs (u, v) sharing S and having
    u ^ v = d, the outcome weight is the Hadamard transform of ``h``.  Cost
    is O(2^k k) beyond the pair count, which is O(2^k) under the promise.
    """
    view = prepare(source, t)
    k = view.width
    h = np.zeros(1 << k, dtype=np.int64)
    for mat in view.classes_by_size().values():
        diffs = mat[:, :, None] ^ mat[:, None, :]
        h += np.bincount(diffs.ravel(), minlength=1 << k)
    nums = walsh_hadamard(h)
    return MeasurementDistribution.from_counts(k, nums, 2 * k)


def sample_outcome(source, t: int, rng: Xoshiro256, ledger: CostLedger | None = None) -> BitString:
    """Draw one measured y, as one execution of the circuit would produce.

    Samples a first-register value u0, takes its S-class P, then draws y with
    weight |sum_{u in P} (-1)^(u.y)|^2; marginally this is exactly
    :func:`exact_distribution` without building all 2^k weights.
    """
    view = prepare(source, t)
    k = view.width
    u0 = rng.below(1 << k)
    cls = np.flatnonzero(np.all(view.rows == view.rows[u0], axis=1))
    if len(cls) == 1:
        y = rng.below(1 << k)
    elif len(cls) == 2:
        d = int(cls[0]) ^ int(cls[1])
        while True:
            y = rng.below(1 << k)
            if (y & d).bit_count() % 2 == 0:
                break
    else:
        indicator = np.zeros(1 << k, dtype=np.int64)
        indicator[cls] = 1
        amp = walsh_hadamard(indicator)
        cum = np.cumsum(amp * amp)
        r = rng.below(int(cum[-1]))
        y = int(np.searchsorted(cum, r, side="right"))
    if ledger is not None:
        ledger.record_run(view.n, view.t, view.m)
    return BitString(k, y)


def statevector_qubits(n: int, t: int, m: int) -> int:
    return (n - t) + 2 * (1 << t) * m


def run_statevector_circuit(source, t: int = 1) -> tuple[MeasurementDistribution, int]:
    """Full register-level simulation; returns the first-register law and the
    leaked weight (numerator over 2^(2k)) left outside node registers = 0.

    Register layout, most significant bits first: first register (k bits),
    node registers for w = 0..2^t-1 (m bits each), target (2^t m bits).
    Amplitudes are kept as integers scaled by 2^(k/2) per Hadamard layer.
    """
    view = prepare(source, t)
    k, m, nodes = view.width, view.m, 1 << t
    target_bits = nodes * m
    total = statevector_qubits(view.n, t, m)
    if total > max_qubits():
        raise ValueError(f"{total} qubits exceeds the cap of {max_qubits()} (DSIMON_MAX_QUBITS)")
    if total > 62:
        raise ValueError("register file does not fit in 64-bit indices")

    size = 1 << total
    state = np.zeros(size, dtype=np.int64)
    state[0] = 1
    idx = np.arange(size, dtype=np.uint64)
    u_of = (idx >> np.uint64(total - k)).astype(np.int64)
    node_shift = [target_bits + (nodes - 1 - j) * m for j in range(nodes)]
    field_mask = np.uint64((1 << m) - 1)

    def node_field(j):
        return (idx >> np.uint64(node_shift[j])) & field_mask

    def hadamard_first(psi):
        return walsh_hadamard(psi.reshape(1 << k, -1), axis=0).reshape(-1)

    def query(psi, j):
        # |u>|r_j> -> |u>|r_j ^ f_w(u)>; an involution, so a gather suffices
        f_vals = view.matrix[u_of, j]
        dest = idx ^ (f_vals << np.uint64(node_shift[j]))
        return psi[dest.astype(np.int64)]

    def u_sort(psi):
        wires = sort_arrays([node_field(j) for j in range(nodes)])
        concat = np.zeros(size, dtype=np.uint64)
        for j, wire in enumerate(wires):
            concat |= wire << np.uint64((nodes - 1 - j) * m)
        return psi[(idx ^ concat).astype(np.int64)]

    state = hadamard_first(state)
    for j in range(nodes):
        state = query(state, j)
    state = u_sort(state)
    for j in range(nodes):
        state = query(state, j)

    cube = state.reshape(1 << k, 1 << (nodes * m), 1 << target_bits)
    leaked = int(np.sum(cube[:, 1:, :] ** 2))
    kept = cube[:, 0, :]
    final = walsh_hadamard(kept, axis=0)
    nums = np.sum(final * final, axis=1)
    return MeasurementDistribution.from_counts(k, nums, 2 * k), leaked


def statevector_run(source, t: int = 1) -> MeasurementDistribution:
    dist, leaked = run_statevector_circuit(source, t)
    if leaked:
        raise SimulationIntegrityError(f"node registers not restored: leaked weight {leaked}")
    return dist
