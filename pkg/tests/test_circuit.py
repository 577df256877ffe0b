from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chi2

from dsimon.circuit import (
    CostLedger,
    MeasurementDistribution,
    communication_cost,
    exact_distribution,
    run_statevector_circuit,
    sample_outcome,
    statevector_run,
    walsh_hadamard,
)
from dsimon.errors import SimulationIntegrityError
from dsimon.gf2 import BitString, all_strings, dot
from dsimon.instance import SimonFunction, big_s, generate, node_oracles
from dsimon.rng import Xoshiro256, derive_seed

from .conftest import bs


def brute_distribution(f, t):
    """Amplitude sums written out term by term with exact fractions."""
    k = f.n - t
    us = list(all_strings(k))
    classes = {}
    for u in us:
        classes.setdefault(big_s(f, t, u), []).append(u)
    out = {}
    for y in us:
        p = Fraction(0)
        for members in classes.values():
            amp = sum(Fraction((-1) ** dot(u, y), 2**k) for u in members)
            p += amp * amp
        out[y] = p
    return out


def orthogonal(s1):
    return {y for y in all_strings(s1.length) if dot(y, s1) == 0}


class TestExactDistribution:
    def test_appendix_a(self, fa):
        frozen = {"00": Fraction(1, 2), "01": Fraction(1, 2), "10": Fraction(0), "11": Fraction(0)}
        brute = brute_distribution(fa, 2)
        assert {str(y): p for y, p in brute.items()} == frozen
        dist = exact_distribution(fa, 2)
        assert {str(y): p for y, p in dist.weights.items()} == frozen
        assert dist.to_records() == [("00", 1, 1), ("01", 1, 1)]

    @pytest.mark.parametrize("n,t,s", [(4, 1, "0110"), (5, 2, "00011"), (5, 0, "10101"), (6, 3, "000000"), (4, 3, "1000")])
    def test_matches_brute_force(self, n, t, s):
        f = generate(n, n + 1, bs(s), seed=17)
        dist = exact_distribution(f, t)
        assert dist.weights == brute_distribution(f, t)
        assert dist.total() == 1

    def test_uniform_when_s1_zero(self):
        f = generate(6, 7, bs("000011"), seed=2)
        dist = exact_distribution(f, 2)
        assert set(dist.numerators) == {1} and dist.log2_denominator == 4

    def test_support_is_s1_perp(self):
        for i in range(20):
            f = generate(8, 9, None, derive_seed("perp", i))
            t = i % 4
            s1, _ = f.hidden_s.split(8 - t)
            dist = exact_distribution(f, t)
            if s1.is_zero():
                assert set(dist.support()) == set(all_strings(8 - t))
            else:
                assert set(dist.support()) == orthogonal(s1)
                assert {dist.probability(y) for y in dist.support()} == {Fraction(1, 2 ** (8 - t - 1))}

    def test_reads_only_node_slices(self, fa):
        hidden = SimonFunction(4, 6, fa.table)  # no hidden shift attached
        assert exact_distribution(hidden, 2) == exact_distribution(fa, 2)
        assert exact_distribution(node_oracles(fa, 2), 2) == exact_distribution(fa, 2)

    def test_distribution_canonical_form(self):
        d = MeasurementDistribution.from_counts(1, [2, 2], 2)
        assert d == MeasurementDistribution.from_counts(1, [1, 1], 1)
        assert d.to_records() == [("0", 1, 1), ("1", 1, 1)]


def test_walsh_hadamard_matches_matrix():
    rnd = np.random.default_rng(4)
    v = rnd.integers(-5, 5, 16)
    mat = np.array([[(-1) ** bin(x & y).count("1") for x in range(16)] for y in range(16)])
    assert np.array_equal(walsh_hadamard(v), mat @ v)


class TestSampler:
    def test_support_worked_example(self, fa):
        rng = Xoshiro256(0)
        ys = {str(sample_outcome(fa, 2, rng)) for _ in range(200)}
        assert ys == {"00", "01"}

    def test_ledger_counts(self, fa):
        ledger = CostLedger()
        rng = Xoshiro256(1)
        for _ in range(7):
            sample_outcome(node_oracles(fa, 2), 2, rng, ledger)
        assert ledger.runs == 7
        assert ledger.node_queries == {w: 14 for w in ("00", "01", "10", "11")}
        assert (ledger.teleported_qubits, ledger.ebits, ledger.classical_bits) == communication_cost(4, 2, 6, 7)

    @pytest.mark.parametrize("n,t,s", [(5, 1, "10110"), (5, 2, "00001"), (4, 0, "0000"), (6, 2, "011100")])
    def test_chi_square_against_exact(self, n, t, s):
        f = generate(n, n + 1, bs(s), seed=23)
        dist = exact_distribution(f, t)
        rng = Xoshiro256(derive_seed("chi", n, t, s))
        draws = 10_000
        counts = Counter(sample_outcome(f, t, rng).bits for _ in range(draws))
        support = [y.bits for y in dist.support()]
        assert set(counts) <= set(support)
        expected = {y: draws * float(dist.probability(BitString(n - t, y))) for y in support}
        stat = sum((counts.get(y, 0) - e) ** 2 / e for y, e in expected.items())
        assert chi2.sf(stat, len(support) - 1) > 1e-3

    def test_large_class_path(self):
        # a promise-breaking table with 4-element S-classes exercises the
        # general sampler branch
        table = np.array([0, 0, 0, 0, 1, 1, 1, 1], dtype=np.uint64)
        f = SimonFunction(3, 1, table)
        dist = exact_distribution(f, 0)
        rng = Xoshiro256(5)
        counts = Counter(sample_outcome(f, 0, rng).bits for _ in range(4000))
        assert set(counts) == {y.bits for y in dist.support()}


class TestStatevector:
    @pytest.mark.parametrize("n,m,s", [(2, 1, "10"), (3, 2, "011"), (3, 2, "001"), (4, 3, "1010"), (4, 3, "0001"), (3, 3, "000")])
    def test_equals_structured(self, n, m, s):
        f = generate(n, m, bs(s), seed=31)
        dist, leaked = run_statevector_circuit(f, 1)
        assert leaked == 0
        assert dist == exact_distribution(f, 1)

    def test_two_bit_example(self):
        f = generate(2, 1, bs("10"), seed=0)
        assert statevector_run(f).to_records() == [("0", 1, 0)]

    def test_t_two(self):
        f = generate(3, 2, bs("101"), seed=1)
        assert statevector_run(f, 2) == exact_distribution(f, 2)

    def test_qubit_cap(self, monkeypatch):
        f = generate(4, 3, bs("1010"), seed=0)
        monkeypatch.setenv("DSIMON_MAX_QUBITS", "10")
        with pytest.raises(ValueError):
            statevector_run(f)

    def test_leak_detected(self):
        # an oracle answering differently on the uncompute pass leaves
        # garbage in the node registers
        import dsimon.circuit as circ

        class FlakyView(circ.SortedView):
            calls = 0

            @property
            def matrix(self):
                self.calls += 1
                return self._m if self.calls <= 2 else self._m ^ np.uint64(1)

            @matrix.setter
            def matrix(self, value):
                self._m = value

        f = generate(3, 2, bs("011"), seed=3)
        view = FlakyView(f.table.reshape(4, 2), f.m)
        with pytest.raises(SimulationIntegrityError):
            statevector_run(view, 1)


class TestCost:
    def test_zero_runs(self):
        assert communication_cost(4, 2, 6, 0) == (0, 0, 0)

    def test_formula(self):
        m = 6
        q = 2**2 * 2 + 2 * 2**2 * m
        assert communication_cost(4, 2, m, 1) == (q, q, 2 * q)
        assert communication_cost(4, 2, m, 1, round_trip=False) == (8 + 24, 32, 64)

    def test_linear_in_runs(self):
        one = communication_cost(10, 3, 12, 1)
        assert communication_cost(10, 3, 12, 9) == tuple(9 * v for v in one)

    def test_ledger_merge(self):
        a, b = CostLedger(), CostLedger()
        a.record_run(4, 1, 3)
        b.record_run(4, 1, 3)
        b.record_run(4, 1, 3)
        a.merge(b)
        assert a.runs == 3 and a.node_queries == {"0": 6, "1": 6}
