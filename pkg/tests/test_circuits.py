import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsmatch.bitparallel import Pattern, Text, brute_force_exact, shift_and_trace
from qsmatch.circuits import (
    address_width,
    build_qsadd,
    build_qsand,
    depth_report,
    occurrence_positions_from_trace,
    qsadd_depth,
    qsand_depth,
    run_qsadd,
    run_qsand,
)
from qsmatch.errors import DomainError, ResourceLimitError
from qsmatch.qcore.basis import BasisRunner, BasisState, run_basis
from qsmatch.qcore.depth import DepthModel, circuit_depth
from qsmatch.qcore.gatelist import dumps, loads

GOLDEN = Path(__file__).parent / "golden"


def window_counts(y, x):
    """Cell i after reading y[j]: mismatches of x[0..i] against y[j-i..j] (0 before the text starts)."""
    m = len(x)
    return [[sum(a != b for a, b in zip(x[:i + 1], y[j - i:j + 1])) if i <= j else 0 for i in range(m)]
            for j in range(len(y))]


@st.composite
def small_instances(draw, max_n=12, max_m=4):
    sigma = draw(st.integers(1, 4))
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, min(n, max_m)))
    y = draw(st.lists(st.integers(0, sigma - 1), min_size=n, max_size=n))
    x = draw(st.lists(st.integers(0, sigma - 1), min_size=m, max_size=m))
    return Text(y, sigma), Pattern(x)


# -- QSAnd --------------------------------------------------------------------

def test_qsand_examples(backend):
    assert run_qsand(Text.of("aab"), Pattern.of("ab"), backend).r == 1
    assert run_qsand(Text.of("bbb", 2), Pattern.of("a"), backend).r == 0


def test_qsand_trace_abab(backend):
    tr = run_qsand(Text.of("abab"), Pattern.of("ab"), backend)
    assert tr.configs == [0b01, 0b10, 0b01, 0b10]
    assert tr.blocks == tr.configs
    assert all(tr.boundary_clean)


def test_occurrence_positions(backend):
    assert occurrence_positions_from_trace(run_qsand(Text.of("abab"), Pattern.of("ab"), backend)) == [0, 2]
    assert occurrence_positions_from_trace(run_qsand(Text.of("aaa"), Pattern.of("aaa"), backend)) == [0]
    assert occurrence_positions_from_trace(run_qsand(Text.of("bbb", 2), Pattern.of("a"), backend)) == []


def test_qsand_rejects_bad_inputs():
    with pytest.raises(DomainError):
        build_qsand(Text.of("ab"), Pattern.of("aba"))
    with pytest.raises(DomainError):
        build_qsand(Text.of("ab"), Pattern([2]))
    with pytest.raises(DomainError):
        Pattern.of("")


def test_qsand_layout_sizes():
    _, lay = build_qsand(Text([0] * 10, 5), Pattern([1, 2, 3]))
    L = lay.layout
    sizes = {name: len(L[name]) for name in L.names}
    assert sizes == {"a": 30, "b": 3, "d": 3, "c": 3, "j": 4, "r": 1}
    assert list(lay.block(2)) == list(range(6, 9))


def test_qsand_budget():
    with pytest.raises(ResourceLimitError) as err:
        build_qsand(Text([0] * 20, 2), Pattern([0, 1, 1]), budget_qubits=50)
    assert err.value.required == 20 * 3 + 3 + 3 + 1 + 5 + 1
    assert "budget" in str(err.value)


@given(small_instances())
def test_qsand_strong_equivalence(backend, inst):
    text, pattern = inst
    tr = run_qsand(text, pattern, backend)
    exact = [o.start for o in brute_force_exact(text, pattern)]
    assert tr.configs == shift_and_trace(text, pattern)
    assert tr.blocks == tr.configs
    assert occurrence_positions_from_trace(tr) == exact
    assert tr.r == int(bool(exact))
    assert all(tr.boundary_clean)


def test_qsand_ancilla_ledger():
    # after iteration t, d_{s-1} (stored at iteration s) has rotated into block t-s+1
    text, pattern = Text([0, 1, 1, 0, 1, 0, 1], 2), Pattern([1, 0, 1])
    circ, lay = build_qsand(text, pattern)
    configs = shift_and_trace(text, pattern)
    runner = BasisRunner(circ)
    state = BasisState(lay.layout)
    n = text.n
    for t in range(n):
        runner.run(state, *circ.section_range(f"iter{t}")[:2])
        held = {(t - s + 1) % n: configs[s - 1] for s in range(1, t + 1)}
        for blk in range(n):
            assert state.slice_value(lay.block(blk)) == held.get(blk, 0)
        assert state.value("j") == (t + 1) % (1 << address_width(n))
    runner.run(state, circ.section_range("flush")[0])
    assert state.value("d") == 0 and state.value("b") == 0 and state.value("c") == 0


def test_qsand_golden_gate_list():
    circ, _ = build_qsand(Text.of("abab"), Pattern.of("ab"))
    assert dumps(circ) == (GOLDEN / "qsand_abab_ab.gates").read_text()
    circ, _ = build_qsadd(Text.of("abcd"), Pattern.of("abd"), 1)
    assert dumps(circ) == (GOLDEN / "qsadd_abcd_abd_k1.gates").read_text()


def test_dumped_circuit_runs_the_same():
    circ, lay = build_qsand(Text.of("abba"), Pattern.of("bb"))
    again = loads(dumps(circ))
    assert run_basis(again) == run_basis(circ)
    assert run_basis(again).get("r") == 1


# -- QSAdd --------------------------------------------------------------------

def test_qsadd_examples(backend):
    tr = run_qsadd(Text.of("abcd"), Pattern.of("abd"), 1, backend)
    assert tr.r == 1 and occurrence_positions_from_trace(tr) == [0]
    assert tr.counters == window_counts((0, 1, 2, 3), (0, 1, 3))
    tr = run_qsadd(Text.of("aa", 2), Pattern.of("bb"), 0, backend)
    assert tr.r == 0 and tr.flags == [0]
    tr = run_qsadd(Text.of("abab"), Pattern.of("ab"), 1, backend)
    assert tr.flags == [1, 0, 1] and tr.r == 1


def test_qsadd_rejects_k():
    with pytest.raises(DomainError):
        build_qsadd(Text.of("abab"), Pattern.of("ab"), 2)


def test_qsadd_layout_sizes():
    _, lay = build_qsadd(Text([0] * 9, 2), Pattern([1, 0, 1, 1]), 1)
    L = lay.layout
    sizes = {name: len(L[name]) for name in L.names}
    assert sizes == {"a": 3, "b": 4, "d": 27, "c": 1, "j": 4, "s": 9, "r": 1}


@given(small_instances(max_n=10), st.data())
def test_qsadd_strong_equivalence(backend, inst, data):
    text, pattern = inst
    k = data.draw(st.integers(0, pattern.m - 1))
    tr = run_qsadd(text, pattern, k, backend)
    counts = window_counts(text.symbols, pattern.symbols)
    assert tr.counters == counts
    m = pattern.m
    want = [int(counts[s + m - 1][m - 1] <= k) for s in range(text.n - m + 1)]
    assert tr.flags == want
    assert tr.r == int(any(want))
    assert all(tr.boundary_clean)


def test_qsadd_exhaustive_tiny(backend):
    for n in range(1, 6):
        for y in itertools.product((0, 1), repeat=n):
            for m in range(1, min(n, 3) + 1):
                for x in itertools.product((0, 1), repeat=m):
                    counts = window_counts(y, x)
                    for k in range(m):
                        tr = run_qsadd(Text(y, 2), Pattern(x), k, backend)
                        assert tr.counters == counts
                        assert tr.flags == [int(counts[s + m - 1][m - 1] <= k) for s in range(n - m + 1)]


# -- depth --------------------------------------------------------------------

def test_depth_report_fields():
    circ, _ = build_qsand(Text.of("abab"), Pattern.of("ab"))
    rep = depth_report(circ)
    assert rep["total"] == circuit_depth(circ)
    assert sum(rep["breakdown"].values()) == rep["total"]
    assert rep["qubits"] == circ.num_qubits and rep["gates"] == len(circ)
    assert set(rep["iteration"]["breakdown"]) <= {"fetch", "transition", "rotate", "counter"}


def test_iteration_depth_is_n_independent_apart_from_fetch_and_counter():
    model = DepthModel()
    rest = set()
    for n in (8, 16, 64, 256):
        circ, _ = build_qsand(Text([0, 1] * (n // 2), 2), Pattern([0, 1, 1]))
        it = depth_report(circ)["iteration"]["total"]
        rest.add(it - 2 * model.fetch(n) - model.increment(address_width(n)))
    assert len(rest) == 1


def test_qsadd_iteration_deeper_than_qsand():
    text, pattern = Text([0, 1] * 16, 2), Pattern([0, 1, 1, 0, 1])
    a = depth_report(build_qsand(text, pattern)[0])["iteration"]
    s = depth_report(build_qsadd(text, pattern, 2)[0])["iteration"]
    assert s["total"] > a["total"]
    assert s["breakdown"].get("increment", 0) + s["breakdown"].get("compare", 0) > 0


def test_qsand_total_growth():
    ns = (8, 32, 128, 512, 1024)
    depths = [qsand_depth(n, 3, 2) for n in ns]
    # bounded by c n (log n + log sigma + log m + const) over this range
    for n, d in zip(ns, depths):
        assert d <= 5 * n * (np.log2(n) + 1 + np.log2(3) + 1)
    # the exact per-step cost adds the counter increment, ceil(log n) * ceil(log log n)
    model = DepthModel()
    for n, d in zip(ns, depths):
        q = address_width(n)
        per_step = 2 * model.fetch(n) + 2 * model.fetch(2) + model.increment(q) + 1
        tail = model.rotation(3 * n) + 1 + model.gen_or(n)
        assert n * per_step <= d <= n * per_step + tail


@pytest.mark.parametrize("n,m,sigma", [(8, 3, 2), (32, 3, 2), (128, 2, 4), (512, 4, 2)])
def test_analytic_depth_matches_generated_circuit(n, m, sigma):
    rng = np.random.default_rng(n)
    text, pattern = Text(rng.integers(0, sigma, n), sigma), Pattern(rng.integers(0, sigma, m))
    circ, _ = build_qsand(text, pattern, budget_qubits=1 << 16)
    assert qsand_depth(n, m, sigma) == circuit_depth(circ)


models = st.builds(DepthModel, c_1q=st.integers(1, 3), c_2q=st.integers(1, 3), c_3q=st.integers(1, 3),
                   c_rot=st.integers(1, 6), rotate=st.sampled_from(["constant", "log"]))


@given(st.integers(1, 40), st.integers(1, 6), st.integers(1, 6), models, st.data())
def test_analytic_depth_property(n, m, sigma, model, data):
    m = min(m, n)
    text, pattern = Text([0] * n, sigma), Pattern([0] * m)
    assert qsand_depth(n, m, sigma, model) == circuit_depth(build_qsand(text, pattern)[0], model)
    k = data.draw(st.integers(0, m - 1))
    assert qsadd_depth(n, m, k, sigma, model) == circuit_depth(build_qsadd(text, pattern, k)[0], model)
