"""Distributed Simon's algorithm: exact simulator, solvers and benchmarks."""

from .gf2 import BitString, Gf2Basis, dot, insert, null_space, xor
from .instance import (
    Multiset,
    NodeOracle,
    SimonFunction,
    appendix_a,
    big_s,
    check_theorem1,
    generate,
    multiset_g,
    node_oracles,
    subfunction,
    verify_promise,
)
from .rng import Xoshiro256, derive_seed

__version__ = "0.1.0"
