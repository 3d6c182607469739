import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsmatch import kernels
from qsmatch.bitparallel import (
    Occurrence,
    Pattern,
    Text,
    brute_force_exact,
    brute_force_kmismatch,
    build_masks,
    counter_width,
    shift_add_search,
    shift_add_trace,
    shift_and_search,
    shift_and_trace,
)
from qsmatch.errors import DomainError


def starts(occ):
    return [o.start for o in occ]


@st.composite
def instances(draw, max_n=80, max_m=12, sigmas=(2, 3, 4, 26)):
    sigma = draw(st.sampled_from(sigmas))
    y = draw(st.lists(st.integers(0, sigma - 1), min_size=1, max_size=max_n))
    x = draw(st.lists(st.integers(0, sigma - 1), min_size=1, max_size=max_m))
    return Text(y, sigma), Pattern(x)


# -- masks -------------------------------------------------------------------

def test_masks_examples():
    assert build_masks(Pattern.of("ab"), 2).masks == (0b01, 0b10)
    assert build_masks(Pattern.of("aa"), 2).masks == (0b11, 0b00)
    assert build_masks(Pattern.of("ab"), 2, "mismatch").masks == (0b10, 0b01)


def test_masks_reject_out_of_range_symbol():
    with pytest.raises(DomainError):
        build_masks(Pattern([0, 2]), 2)
    with pytest.raises(DomainError):
        build_masks(Pattern([0]), 2, "sideways")


@given(st.lists(st.integers(0, 5), min_size=1, max_size=40))
def test_mask_completeness(xs):
    p = Pattern(xs)
    match = build_masks(p, 6)
    assert sum(bin(v).count("1") for v in match.masks) == p.m
    mism = build_masks(p, 6, "mismatch")
    full = (1 << p.m) - 1
    assert all(a ^ b == full for a, b in zip(match.masks, mism.masks))


def test_counter_width():
    assert [counter_width(m) for m in (1, 2, 3, 4, 7, 8)] == [1, 2, 2, 3, 3, 4]


# -- examples ----------------------------------------------------------------

def test_shift_and_examples(backend):
    assert starts(shift_and_search(Text.of("abab"), Pattern.of("ab"), backend)) == [0, 2]
    assert starts(shift_and_search(Text.of("aaaa", 2), Pattern.of("aa"), backend)) == [0, 1, 2]
    assert shift_and_search(Text.of("bbbb"), Pattern.of("a"), backend) == []
    assert shift_and_search(Text.of("ab"), Pattern.of("abb"), backend) == []


def test_shift_add_examples(backend):
    assert shift_add_search(Text.of("abcd"), Pattern.of("abd"), 1, backend) == [Occurrence(0, 1)]
    assert shift_add_search(Text.of("abc"), Pattern.of("abc"), 0, backend) == [Occurrence(0, 0)]
    assert shift_add_search(Text.of("aaa", 2), Pattern.of("bb"), 1, backend) == []


def test_shift_add_rejects_k_at_least_m():
    # every window is within m mismatches, so k >= m is refused
    with pytest.raises(DomainError):
        shift_add_search(Text.of("aaa", 2), Pattern.of("bb"), 2)


def test_brute_force_examples():
    assert starts(brute_force_exact(Text.of("abab"), Pattern.of("ab"))) == [0, 2]
    assert starts(brute_force_exact(Text.of("a"), Pattern.of("a"))) == [0]
    assert brute_force_exact(Text.of("ab"), Pattern.of("abc")) == []
    assert brute_force_kmismatch(Text.of("abcd"), Pattern.of("abd"), 1) == [Occurrence(0, 1)]
    assert brute_force_kmismatch(Text.of("aa", 2), Pattern.of("bb"), 1) == []
    assert brute_force_kmismatch(Text.of("aaa", 2), Pattern.of("bb"), 2) == [Occurrence(0, 2), Occurrence(1, 2)]


def test_domain_errors():
    with pytest.raises(DomainError):
        Pattern([])
    with pytest.raises(DomainError):
        Text([], 2)
    with pytest.raises(DomainError):
        Text([0, 3], 2)
    with pytest.raises(DomainError):
        shift_and_search(Text.of("ab"), Pattern([5]))


# -- properties --------------------------------------------------------------

def test_prefix_semantics_exhaustive():
    # bit i of d_j is set iff x[0..i] == y[j-i..j]; sigma=2, n <= 10, m <= 4
    for n in range(1, 11):
        for y in itertools.product((0, 1), repeat=n):
            text = Text(y, 2)
            for m in range(1, 5):
                for x in itertools.product((0, 1), repeat=m):
                    trace = shift_and_trace(text, Pattern(x))
                    for j, d in enumerate(trace):
                        for i in range(m):
                            want = i <= j and x[:i + 1] == y[j - i:j + 1]
                            assert bool(d >> i & 1) == want


@given(instances())
def test_oracle_equivalence(backend, inst):
    text, pattern = inst
    if max(pattern.symbols) >= text.sigma:
        return
    assert shift_and_search(text, pattern, backend) == brute_force_exact(text, pattern)
    for k in range(pattern.m):
        assert shift_add_search(text, pattern, k, backend) == brute_force_kmismatch(text, pattern, k)


@pytest.mark.parametrize("m", [63, 64, 65, 130, 200])
def test_multiword_paths(backend, m):
    # m > 64 uses word arrays for Shift-And; m * ell > 64 for Shift-Add
    rng = np.random.default_rng(m)
    y = rng.integers(0, 2, 900)
    x = y[300:300 + m].copy()
    x[5] ^= 1
    y[600:600 + m] = x
    text, pattern = Text(y, 2), Pattern(x)
    assert shift_and_search(text, pattern, backend) == brute_force_exact(text, pattern)
    for k in (0, 1, 3, m // 3):
        assert shift_add_search(text, pattern, k, backend) == brute_force_kmismatch(text, pattern, k)


@given(instances(max_n=40, max_m=9))
def test_shift_add_counter_bound(inst):
    text, pattern = inst
    if max(pattern.symbols) >= text.sigma:
        return
    for row in shift_add_trace(text, pattern):
        assert all(0 <= v <= pattern.m for v in row)


@given(instances(max_n=60, max_m=8))
def test_k_monotonicity(inst):
    text, pattern = inst
    if max(pattern.symbols) >= text.sigma:
        return
    prev = set()
    for k in range(pattern.m):
        cur = {o.start for o in shift_add_search(text, pattern, k)}
        assert prev <= cur
        prev = cur


@given(instances(max_n=120, max_m=10))
def test_shift_add_at_zero_is_exact(inst):
    text, pattern = inst
    if max(pattern.symbols) >= text.sigma:
        return
    assert shift_add_search(text, pattern, 0) == shift_and_search(text, pattern)


@pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="compiled kernels not built")
@given(instances(max_n=300, max_m=80))
def test_backends_agree(inst):
    text, pattern = inst
    if max(pattern.symbols) >= text.sigma:
        return
    assert shift_and_search(text, pattern, "python") == shift_and_search(text, pattern, "cython")
    k = pattern.m // 2
    assert shift_add_search(text, pattern, k, "python") == shift_add_search(text, pattern, k, "cython")
