import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsmatch.bitparallel import Pattern, Text, brute_force_exact, brute_force_kmismatch
from qsmatch.errors import DomainError
from qsmatch.grover import (
    BlockOracle,
    GroverPlan,
    count_occurrences,
    default_block_size,
    depth_totals,
    grover_circuit,
    grover_iterations,
    loglog_slope,
    plan_blocks,
    procedure_a,
    procedure_b,
    proc_a_depth,
    search_domain,
    simulate_grover,
    success_probability,
    verify_position,
)
from qsmatch.qcore import gates as g
from qsmatch.qcore.statevector import measure_register, run_statevector


def closed_form(N, r, t):
    return math.sin((2 * t + 1) * math.asin(math.sqrt(r / N))) ** 2


# -- planning ------------------------------------------------------------------

def test_plan_blocks_examples():
    p = plan_blocks(16, 3, 8)
    assert (p.stride, p.starts, p.N) == (6, (0, 6, 12), 4)
    p = plan_blocks(8, 3, 3)
    assert (p.stride, p.starts, p.N) == (1, tuple(range(6)), 8)


def test_plan_blocks_errors():
    with pytest.raises(DomainError):
        plan_blocks(16, 3, 2)
    with pytest.raises(DomainError):
        plan_blocks(8, 3, 9)
    with pytest.raises(DomainError):
        plan_blocks(2, 3, 3)


def test_block_coverage_exhaustive():
    for n in range(1, 41):
        for m in range(1, n + 1):
            for K in range(m, n + 1):
                plan = plan_blocks(n, m, K)
                for j in range(n - m + 1):
                    assert plan.blocks_covering(j), (n, m, K, j)
                # every block lies inside the text apart from sentinel padding
                assert all(s + m <= n for s in plan.starts)


def test_block_symbols_padding():
    text = Text.of("abcab")
    plan = plan_blocks(5, 2, 3)
    assert plan.starts == (0, 2)
    assert plan.block_symbols(text, 1) == (2, 0, 1)
    assert plan.block_symbols(text, 3) == (3, 3, 3)


def test_default_block_size():
    assert default_block_size(1 << 10, 4) == 10
    assert default_block_size(1 << 10, 16) == 16
    assert default_block_size(6, 2) == 3


def test_grover_iterations():
    assert grover_iterations(4, 1) == 1
    assert grover_iterations(16, 1) == 3
    assert grover_iterations(64, 64) == 0
    with pytest.raises(DomainError):
        grover_iterations(4, 5)
    with pytest.raises(DomainError):
        grover_iterations(4, 0)


def test_success_probability():
    assert success_probability(4, 1, 1) == pytest.approx(1.0, abs=1e-15)
    assert success_probability(16, 1, 3) == pytest.approx(0.9613, abs=5e-5)
    assert success_probability(16, 1, 3) == pytest.approx(math.sin(7 * math.asin(0.25)) ** 2, abs=1e-15)
    for N, r in [(8, 3), (1024, 7), (2, 1)]:
        assert success_probability(N, r, 0) == pytest.approx(r / N)


def test_padding_floor_keeps_mass_high():
    # N=2, r=1 would give sin^2(3 pi/4) = 0.5; padding to 4r avoids that
    assert success_probability(2, 1, grover_iterations(2, 1)) == pytest.approx(0.5)
    assert search_domain(2, 1) == 4
    for count in range(1, 300):
        for r in range(1, count + 1):
            plan = GroverPlan.make(count, r)
            assert plan.N >= count and plan.N & (plan.N - 1) == 0
            assert success_probability(plan.N, r, plan.t) >= 0.8


# -- simulation ------------------------------------------------------------------

def test_simulate_grover_examples():
    res = simulate_grover(lambda i: i == 2, 4, 1)
    assert res.marked_mass == 1.0 or abs(res.marked_mass - 1.0) < 1e-15
    assert res.sample == 2
    res = simulate_grover(lambda i: i in (1, 6), 8, 1)
    assert res.marked_mass == pytest.approx(1.0, abs=1e-14)
    res = simulate_grover(lambda i: i < 3, 16, 0)
    assert np.allclose(res.distribution, 1 / 16)
    res = simulate_grover(lambda i: False, 16, 5)
    assert np.allclose(res.distribution, 1 / 16)
    with pytest.raises(DomainError):
        simulate_grover(lambda i: True, 6, 1)


@given(st.integers(1, 12), st.data())
def test_grover_exactness(bits, data):
    N = 1 << bits
    r = data.draw(st.integers(0, N))
    t = data.draw(st.integers(0, 200))
    marked = np.zeros(N, dtype=bool)
    marked[np.random.default_rng(r).permutation(N)[:r]] = True
    res = simulate_grover(marked, N, t)
    assert abs(res.marked_mass - success_probability(N, r, t)) <= 1e-12
    assert abs(res.distribution.sum() - 1) <= 1e-12
    # uniform within the marked set and within the rest
    if r:
        assert np.ptp(res.distribution[marked]) <= 1e-15
    if r < N:
        assert np.ptp(res.distribution[~marked]) <= 1e-15


def test_seeded_sample_is_reproducible():
    a = simulate_grover(lambda i: i % 5 == 0, 64, 2, seed=11).sample
    b = simulate_grover(lambda i: i % 5 == 0, 64, 2, seed=11).sample
    assert a == b


@pytest.mark.parametrize("nbits,marked,t", [(2, {1}, 1), (4, {3, 9, 12}, 2), (5, {0}, 4), (6, set(range(10)), 3)])
def test_gate_level_grover_matches_recurrence(nbits, marked, t):
    pred = g.Predicate("marked", lambda v: v in marked)
    sv = run_statevector(grover_circuit(nbits, pred, t))
    dist, _ = measure_register(sv, "x")
    want = simulate_grover(pred, 1 << nbits, t).distribution
    assert np.max(np.abs(dist - want)) <= 1e-12


# -- oracles and procedures ---------------------------------------------------------

def test_count_occurrences():
    assert count_occurrences(Text.of("abab"), Pattern.of("ab")) == 2
    assert count_occurrences(Text.of("bbb", 2), Pattern.of("a")) == 0
    assert count_occurrences(Text.of("aaa"), Pattern.of("a")) == 3
    assert count_occurrences(Text.of("abcd"), Pattern.of("abd"), 1) == 1


def test_block_oracle_memoizes():
    oracle = BlockOracle(Pattern.of("ab"), 2)
    assert oracle((0, 1, 0)) and not oracle((1, 1, 2))
    assert oracle((0, 1, 0)) and oracle.circuit_runs == 2


def test_procedure_a_examples():
    rep = procedure_a(Text.of("abab"), Pattern.of("ab"))
    assert rep.found and rep.position in (0, 2) and rep.verified
    assert rep.marked == [0, 2]
    assert rep.distribution[[0, 2]].sum() == pytest.approx(rep.success_probability)
    assert rep.success_probability == pytest.approx(rep.closed_form, abs=1e-12)

    rep = procedure_a(Text.of("bbbb", 2), Pattern.of("a"))
    assert not rep.found and rep.position is None and rep.r == 0
    assert np.allclose(rep.distribution, 1 / rep.N)

    rep = procedure_a(Text.of("aab"), Pattern.of("ab"))
    assert (rep.N, rep.r, rep.iterations) == (4, 1, 1)
    assert rep.success_probability == pytest.approx(1.0, abs=1e-15)
    assert rep.position == 1


def test_procedure_a_region_and_errors():
    text = Text.of("abbaabba")
    rep = procedure_a(text, Pattern.of("ab"), region=(2, 6))
    assert rep.position == 4 and rep.marked == [4]
    with pytest.raises(DomainError):
        procedure_a(text, Pattern.of("ab"), region=(5, 7))
    with pytest.raises(DomainError):
        procedure_a(text, Pattern.of("ab"), k=2)


def test_procedure_b_planted():
    rng = np.random.default_rng(32)
    hits = 0
    while hits < 5:
        y = rng.integers(0, 2, 32)
        x = rng.integers(0, 2, 7)
        j = int(rng.integers(0, 26))
        y[j:j + 7] = x
        text, pattern = Text(y, 2), Pattern(x)
        if [o.start for o in brute_force_exact(text, pattern)] != [j]:
            continue
        rep = procedure_b(text, pattern, K=8)
        assert rep.found and rep.position == j and verify_position(text, pattern, j)
        assert all(s.success_probability >= 0.8 for s in rep.stages)
        assert rep.depth["total"] == rep.depth["stage1"]["total"] + rep.depth["stage2"]["total"]
        hits += 1


def test_procedure_b_absent():
    rep = procedure_b(Text([0, 1] * 20, 2), Pattern([1, 1]))
    assert not rep.found and rep.position is None and rep.depth["stage2"] is None


@pytest.mark.parametrize("n", [13, 29, 64])
@pytest.mark.parametrize("m", [2, 3, 5])
def test_procedure_b_every_position(n, m):
    # the only 1-run of length m sits at j; blocks of each size must still find it
    for K in sorted({m, m + 1, max(m, 8), n}):
        for j in range(n - m + 1):
            y = [0] * n
            y[j:j + m] = [1] * m
            rep = procedure_b(Text(y, 2), Pattern([1] * m), K=K)
            assert rep.found and rep.position == j, (n, m, K, j)


@given(st.lists(st.integers(0, 2), min_size=3, max_size=40), st.lists(st.integers(0, 2), min_size=1, max_size=4),
       st.integers(0, 2**31 - 1), st.booleans())
def test_soundness(y, x, seed, approx):
    if len(x) > len(y):
        return
    text, pattern = Text(y, 3), Pattern(x)
    k = min(1, pattern.m - 1) if approx else None
    for rep in (procedure_a(text, pattern, seed=seed, k=k), procedure_b(text, pattern, seed=seed, k=k)):
        truth = brute_force_kmismatch(text, pattern, k) if k else brute_force_exact(text, pattern)
        assert rep.found == bool(truth)
        if rep.found:
            assert verify_position(text, pattern, rep.position, k)


def test_kmismatch_procedures():
    text, pattern = Text.of("abcabdabc"), Pattern.of("abd")
    rep = procedure_a(text, pattern, k=1)
    assert rep.r == 3 and rep.found
    assert rep.position in {o.start for o in brute_force_kmismatch(text, pattern, 1)}
    rep = procedure_b(text, pattern, K=4, k=1)
    assert rep.found and verify_position(text, pattern, rep.position, 1)


# -- depth totals -------------------------------------------------------------------

def test_depth_totals_record():
    t = depth_totals(1 << 12, 4)
    assert t.K == 12
    assert max(t.proc_a, t.proc_b) < t.qsand_full
    assert proc_a_depth(1 << 12, 4, 2) == t.proc_a


def test_loglog_slope():
    xs = [2.0 ** e for e in range(10, 20)]
    assert loglog_slope(xs, [3 * x ** 0.5 for x in xs]) == pytest.approx(0.5)


def test_procedure_slopes_in_band():
    ns = [1 << e for e in range(10, 23)]
    rows = [depth_totals(n, 4) for n in ns]
    assert 0.45 <= loglog_slope(ns, [r.proc_a for r in rows]) <= 0.60
    assert 0.45 <= loglog_slope(ns, [r.proc_b for r in rows]) <= 0.60
