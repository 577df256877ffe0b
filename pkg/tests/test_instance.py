import itertools
import random

import numpy as np
import pytest

from dsimon.errors import PromiseViolationError, TableFormatError
from dsimon.gf2 import BitString, all_strings, xor
from dsimon.instance import (
    SimonFunction,
    big_s,
    check_theorem1,
    format_table,
    g_elements_distinct,
    g_values,
    generate,
    multiset_g,
    node_oracles,
    parse_table,
    subfunction,
    verify_promise,
)
from dsimon.rng import derive_seed

from .conftest import bs

WORKED_VALUES = {
    "0000": "100101", "1000": "101100", "0100": "101010", "1100": "011001",
    "0001": "101100", "1001": "100101", "0101": "011001", "1101": "101010",
    "0010": "000100", "1010": "110101", "0110": "001101", "1110": "111100",
    "0011": "110101", "1011": "000100", "0111": "111100", "1111": "001101",
}
WORKED_G = {
    "00": ["100101", "101100", "000100", "110101"],
    "01": ["101010", "011001", "001101", "111100"],
    "10": ["101100", "100101", "110101", "000100"],
    "11": ["011001", "101010", "111100", "001101"],
}
WORKED_S = {
    "00": "000100100101101100110101",
    "01": "001101011001101010111100",
    "10": "000100100101101100110101",
    "11": "001101011001101010111100",
}


def brute_promise_holds(f, s):
    """Direct check of the promise over all pairs."""
    for x, y in itertools.product(all_strings(f.n), repeat=2):
        same = f.value(x) == f.value(y)
        if same != (x == y or xor(x, y) == s):
            return False
    return True


class TestWorkedExample:
    def test_values(self, fa):
        for x, v in WORKED_VALUES.items():
            assert str(fa.value(bs(x))) == v

    def test_file_matches_builtin(self, fa, fa_file):
        assert np.array_equal(fa.table, fa_file.table)
        assert fa_file.hidden_s == bs("1001")

    def test_verify_promise(self, fa):
        assert verify_promise(fa.table) == bs("1001")
        assert brute_promise_holds(fa, bs("1001"))

    @pytest.mark.parametrize("u", sorted(WORKED_G))
    def test_g_multisets(self, fa, u):
        assert [str(v) for v in g_values(fa, 2, bs(u))] == WORKED_G[u]
        assert [str(v) for v in multiset_g(fa, 2, bs(u))] == sorted(WORKED_G[u])

    @pytest.mark.parametrize("u", sorted(WORKED_S))
    def test_s_strings(self, fa, u):
        assert str(big_s(fa, 2, bs(u))) == WORKED_S[u]

    def test_multiset_examples(self, fa):
        assert str(multiset_g(fa, 2, bs("00"))) == "{000100,100101,101100,110101}"
        assert str(multiset_g(fa, 2, bs("11"))) == "{001101,011001,101010,111100}"

    def test_subfunction_examples(self, fa):
        assert subfunction(fa, 2, bs("01")).query(bs("00")) == bs("101100")
        assert subfunction(fa, 2, bs("11")).query(bs("10")) == bs("000100")

    def test_equal_s_pairs(self, fa):
        assert check_theorem1(fa, 2)
        ss = {u: big_s(fa, 2, bs(u)) for u in WORKED_S}
        equal_pairs = {(u, v) for u in ss for v in ss if u < v and ss[u] == ss[v]}
        assert equal_pairs == {("00", "10"), ("01", "11")}


class TestGenerate:
    @pytest.mark.parametrize("n,m,s", [(1, 1, "0"), (3, 2, "011"), (5, 7, "10000"), (6, 6, "000000"), (8, 30, "10110011")])
    def test_promise_holds(self, n, m, s):
        f = generate(n, m, bs(s), seed=42)
        assert verify_promise(f) == bs(s)
        if n <= 6:
            assert brute_promise_holds(f, bs(s))

    def test_injective_when_shift_zero(self):
        f = generate(1, 1, bs("0"), seed=3)
        assert f.value(bs("0")) != f.value(bs("1"))

    def test_distinct_value_count(self):
        f = generate(7, 9, bs("0100101"), seed=1)
        assert len(set(f.table.tolist())) == 64

    def test_deterministic(self):
        a = generate(10, 12, None, seed=99)
        b = generate(10, 12, None, seed=99)
        assert np.array_equal(a.table, b.table) and a.hidden_s == b.hidden_s
        c = generate(10, 12, None, seed=100)
        assert not np.array_equal(a.table, c.table)

    def test_random_shift_is_nonzero(self):
        for seed in range(50):
            assert not generate(2, 2, None, seed).hidden_s.is_zero()

    def test_codomain_too_small(self):
        with pytest.raises(ValueError):
            generate(4, 2, bs("0000"), seed=0)
        with pytest.raises(ValueError):
            generate(4, 2, bs("1000"), seed=0)
        generate(4, 3, bs("1000"), seed=0)

    def test_large_codomain_uses_rejection(self):
        f = generate(6, 40, bs("111111"), seed=5)
        assert verify_promise(f) == bs("111111")
        assert int(f.table.max()) < 1 << 40


class TestVerifyPromise:
    def test_injective(self):
        f = SimonFunction(2, 2, [0, 1, 2, 3])
        assert verify_promise(f) == bs("00")

    def test_triple_collision(self):
        with pytest.raises(PromiseViolationError):
            verify_promise(SimonFunction(2, 2, [1, 1, 1, 0]))

    def test_inconsistent_pairs(self):
        with pytest.raises(PromiseViolationError):
            verify_promise(SimonFunction(2, 2, [0, 0, 1, 2]))
        with pytest.raises(PromiseViolationError):
            verify_promise(SimonFunction(3, 2, [0, 0, 1, 1, 2, 3, 2, 3]))

    def test_corrupted_example(self, fa):
        table = fa.table.copy()
        table[5] = table[0]
        with pytest.raises(PromiseViolationError):
            verify_promise(table)


class TestNodeOracles:
    def test_whole_function_when_t_zero(self, fa):
        o = subfunction(fa, 0, BitString(0))
        for x in all_strings(4):
            assert o.query(x) == fa.value(x)

    def test_counter_isolation(self, fa):
        oracles = node_oracles(fa, 2)
        rnd = random.Random(0)
        made = 0
        for _ in range(37):
            w = BitString(2, rnd.randrange(4))
            oracles[w].query(BitString(2, rnd.randrange(4)))
            made += 1
        assert sum(o.queries for o in oracles.values()) == made
        assert fa.queries == 0
        fa.query(bs("0000"))
        assert fa.queries == 1 and sum(o.queries for o in oracles.values()) == made

    def test_values_view_uncounted(self, fa):
        o = subfunction(fa, 2, bs("01"))
        assert [int(v) for v in o.values] == [int(WORKED_VALUES[u + "01"], 2) for u in ("00", "01", "10", "11")]
        assert o.queries == 0

    def test_bad_lengths(self, fa):
        with pytest.raises(ValueError):
            subfunction(fa, 2, bs("1"))
        with pytest.raises(ValueError):
            subfunction(fa, 2, bs("01")).query(bs("000"))


class TestSliceEquivalence:
    def test_sorting_invariance(self):
        """S(u) depends on G(u) as a multiset: permuting node order changes nothing."""
        f = generate(6, 8, bs("101001"), seed=8)
        t = 3
        rnd = random.Random(1)
        for u in all_strings(3):
            vals = g_values(f, t, u)
            for _ in range(5):
                rnd.shuffle(vals)
                out = BitString(0)
                for v in sorted(vals):
                    out = out + v
                assert out == big_s(f, t, u)

    def test_big_s_t_zero(self, fa):
        for x in all_strings(4):
            assert big_s(fa, 0, x) == fa.value(x)

    @pytest.mark.parametrize("n", range(2, 8))
    def test_exhaustive_small(self, n):
        for t in range(0, n):
            for i in range(5):
                seed = derive_seed("thm1", n, t, i)
                f = generate(n, n + 1, None, seed)
                assert check_theorem1(f, t)
                s1, _ = f.hidden_s.split(n - t)
                if not s1.is_zero():
                    assert g_elements_distinct(f, t)

    def test_duplicates_when_s1_zero(self):
        # s = 0^(n-t) s2 with s2 != 0: every G(u) repeats a value
        f = generate(5, 6, bs("00011"), seed=4)
        assert not g_elements_distinct(f, 2)
        assert all(multiset_g(f, 2, u).has_duplicates() for u in all_strings(3))
        assert check_theorem1(f, 2)

    def test_detects_violation(self):
        f = generate(4, 5, bs("1100"), seed=2)
        broken = SimonFunction(4, 5, f.table, hidden_s=bs("1000"))
        assert not check_theorem1(broken, 2)

    def test_requires_nonzero_shift(self):
        with pytest.raises(ValueError):
            check_theorem1(generate(3, 3, bs("000"), 0), 1)


class TestTableFormat:
    def test_round_trip(self, fa):
        text = format_table(fa, reveal=True)
        assert text.splitlines()[:3] == ["4 6", "# s=1001", "100101"]
        g = parse_table(text)
        assert np.array_equal(g.table, fa.table) and g.hidden_s == fa.hidden_s

    def test_hidden_when_not_revealed(self, fa):
        g = parse_table(format_table(fa))
        assert g.hidden_s is None and len(format_table(fa).splitlines()) == 17

    def test_fixture_file_bytes(self, fa, fixture_path):
        assert fixture_path.read_text() == format_table(fa, reveal=True)

    @pytest.mark.parametrize(
        "text",
        ["", "4\n", "2 2\n00\n01\n10\n", "2 2\n00\n01\n10\n1x\n", "2 2\n00\n01\n10\n111\n", "2 2\n# s=1\n00\n01\n10\n11\n"],
    )
    def test_parse_errors(self, text):
        with pytest.raises(TableFormatError):
            parse_table(text)
