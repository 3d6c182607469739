"""Oracle-equivalence and scaling checks shared by ``qsmatch selftest`` and the test suite."""

from __future__ import annotations

import contextlib
import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bitparallel, circuits
from .bitparallel import (
    Pattern,
    Text,
    brute_force_exact,
    brute_force_kmismatch,
    shift_add_search,
    shift_add_trace,
    shift_and_search,
    shift_and_trace,
)
from .circuits import build_qsadd, build_qsand, occurrence_positions_from_trace, run_qsadd, run_qsand
from .grover import (
    depth_scan,
    grover_iterations,
    plan_blocks,
    procedure_a,
    procedure_b,
    simulate_grover,
    success_probability,
    verify_position,
)
from .qcore import gates as g
from .qcore.basis import BasisState, run_basis
from .qcore.depth import DEFAULT_MODEL, DepthModel
from .qcore.statevector import Statevector, run_statevector

DEFAULT_SEED = 7
SLOPE_BANDS = {"qsand_full": (0.95, 1.05), "proc_a": (0.45, 0.60), "proc_b": (0.45, 0.60)}
SCAN_EXPONENTS = range(10, 23)
SCAN_M = 4


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.criterion:>2} {self.name}: {self.detail} ({self.seconds:.1f}s)"


@contextlib.contextmanager
def _timed(result_box: list):
    t0 = time.perf_counter()
    yield
    result_box.append(time.perf_counter() - t0)


# ----------------------------------------------------------------------------
# instance generators


def small_domain(max_n: int, max_m: int, sigma: int = 2):
    """Every (text, pattern) over ``sigma`` with 1 <= m <= n <= max_n, m <= max_m."""
    for n in range(1, max_n + 1):
        texts = [Text(t, sigma) for t in itertools.product(range(sigma), repeat=n)]
        for m in range(1, min(n, max_m) + 1):
            pats = [Pattern(p) for p in itertools.product(range(sigma), repeat=m)]
            for t in texts:
                for p in pats:
                    yield t, p


def random_instance(rng: np.random.Generator, max_n: int, max_m: int, sigmas) -> tuple[Text, Pattern]:
    sigma = int(rng.choice(sigmas))
    # log-uniform length so short texts are as common as long ones
    n = int(np.exp(rng.uniform(0, np.log(max_n + 1))))
    n = min(max(n, 1), max_n)
    m = int(rng.integers(1, min(n, max_m) + 1))
    y = rng.integers(0, sigma, n)
    if rng.random() < 0.5 and n >= m:
        # copy a window and perturb it so near-occurrences are common
        s = int(rng.integers(0, n - m + 1))
        x = y[s:s + m].copy()
        flips = rng.random(m) < rng.uniform(0, 0.3)
        x[flips] = rng.integers(0, sigma, int(flips.sum()))
    else:
        x = rng.integers(0, sigma, m)
    return Text(y, sigma), Pattern(x)


def planted_instance(rng: np.random.Generator, max_n: int = 256) -> tuple[Text, Pattern, int]:
    """Random text holding the pattern at exactly one position."""
    while True:
        sigma = int(rng.choice([2, 3, 4]))
        n = int(rng.integers(4, max_n + 1))
        lo = min(n, math.ceil(math.log(n, sigma)) + 2)
        m = int(rng.integers(lo, min(n, lo + 4) + 1))
        y = rng.integers(0, sigma, n)
        x = rng.integers(0, sigma, m)
        j = int(rng.integers(0, n - m + 1))
        y[j:j + m] = x
        text, pattern = Text(y, sigma), Pattern(x)
        if [o.start for o in brute_force_exact(text, pattern)] == [j]:
            return text, pattern, j


def absent_instance(rng: np.random.Generator, max_n: int = 256) -> tuple[Text, Pattern]:
    while True:
        sigma = int(rng.choice([2, 3, 4]))
        n = int(rng.integers(2, max_n + 1))
        m = int(rng.integers(1, min(n, 10) + 1))
        text = Text(rng.integers(0, sigma, n), sigma)
        pattern = Pattern(rng.integers(0, sigma, m))
        if not brute_force_exact(text, pattern):
            return text, pattern


# ----------------------------------------------------------------------------
# criteria


def check_classical(seed: int = DEFAULT_SEED, random_instances: int = 10_000, backend: str | None = None,
                    max_n: int = 10, max_m: int = 4) -> CheckResult:
    t0 = time.perf_counter()
    bad: list[str] = []
    cases = 0

    def compare(text: Text, pattern: Pattern, ks) -> None:
        nonlocal cases
        cases += 1
        if shift_and_search(text, pattern, backend) != brute_force_exact(text, pattern):
            bad.append(f"exact {text.symbols[:12]}/{pattern.symbols}")
        for k in ks:
            if shift_add_search(text, pattern, k, backend) != brute_force_kmismatch(text, pattern, k):
                bad.append(f"k={k} {text.symbols[:12]}/{pattern.symbols}")

    for text, pattern in small_domain(max_n, max_m):
        compare(text, pattern, range(pattern.m))
    rng = np.random.default_rng(seed)
    for _ in range(random_instances):
        text, pattern = random_instance(rng, 4096, 96, (2, 4, 26))
        compare(text, pattern, [int(rng.integers(0, pattern.m))])
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    detail = f"{cases} instances, {len(bad)} discrepancies"
    if bad:
        detail += f" (first: {bad[0]})"
    return CheckResult(1, "classical oracle equivalence", ok, detail, dt)


def _qsand_case(text: Text, pattern: Pattern, backend) -> tuple[bool, bool]:
    tr = run_qsand(text, pattern, backend=backend)
    exact = [o.start for o in brute_force_exact(text, pattern)]
    ok = (tr.configs == shift_and_trace(text, pattern) and tr.blocks == tr.configs
          and tr.r == int(bool(exact)) and occurrence_positions_from_trace(tr) == exact)
    return ok, all(tr.boundary_clean)


def expected_qsadd_counters(text: Text, pattern: Pattern) -> list[list[int]]:
    """Classical Shift-Add counters with cells that start before the text zeroed."""
    return [[v if i <= j else 0 for i, v in enumerate(row)] for j, row in enumerate(shift_add_trace(text, pattern))]


def _qsadd_case(text: Text, pattern: Pattern, k: int, backend, counters=None) -> tuple[bool, bool]:
    tr = run_qsadd(text, pattern, k, backend=backend)
    expected = [o.start for o in brute_force_kmismatch(text, pattern, k)]
    counters = counters if counters is not None else expected_qsadd_counters(text, pattern)
    ok = (tr.counters == counters and occurrence_positions_from_trace(tr) == expected
          and tr.r == int(bool(expected)))
    return ok, all(tr.boundary_clean)


def check_circuits(seed: int = DEFAULT_SEED, random_instances: int = 1000, backend: str | None = None,
                   max_n: int = 8, max_m: int = 3) -> list[CheckResult]:
    """Criteria 2 (QSAnd), 3 (QSAdd) and 4 (uncompute) over one shared sweep."""
    rng = np.random.default_rng(seed)
    cases = list(small_domain(max_n, max_m))
    n_exhaustive = len(cases)
    cases += [random_instance(rng, 64, 8, (2, 3, 4)) for _ in range(random_instances)]

    t0 = time.perf_counter()
    and_bad, dirty = 0, 0
    for text, pattern in cases:
        ok, clean = _qsand_case(text, pattern, backend)
        and_bad += not ok
        dirty += not clean
    t_and = time.perf_counter() - t0

    t0 = time.perf_counter()
    add_bad, add_runs = 0, 0
    for text, pattern in cases:
        counters = expected_qsadd_counters(text, pattern)
        for k in range(pattern.m):
            ok, clean = _qsadd_case(text, pattern, k, backend, counters)
            add_bad += not ok
            dirty += not clean
            add_runs += 1
    t_add = time.perf_counter() - t0

    scope = f"{n_exhaustive} exhaustive + {random_instances} random"
    return [
        CheckResult(2, "QSAnd strong equivalence", and_bad == 0 and t_and < 300,
                    f"{scope} instances, {and_bad} discrepancies", t_and),
        CheckResult(3, "QSAdd strong equivalence", add_bad == 0,
                    f"{add_runs} runs (all k < m), {add_bad} discrepancies", t_add),
        CheckResult(4, "uncompute invariant", dirty == 0,
                    f"{len(cases) + add_runs} runs, {dirty} with |c> or |b> nonzero at a boundary", t_and + t_add),
    ]


def random_classical_circuit(rng: np.random.Generator, nqubits: int, ngates: int) -> g.Circuit:
    """Random mix of every reversible-classical gate kind over a flat register."""
    layout = g.RegisterLayout([("q", nqubits)])
    circ = g.Circuit(layout)
    while len(circ) < ngates:
        kind = rng.integers(0, 10)
        qs = [int(q) for q in rng.permutation(nqubits)]
        try:
            if kind == 0:
                op = g.x(qs[0])
            elif kind == 1:
                op = g.cx(qs[0], qs[1])
            elif kind == 2:
                op = g.ccx(qs[0], qs[1], qs[2])
            elif kind == 3:
                op = g.build_mcx(qs[1:1 + int(rng.integers(1, nqubits))], qs[0])
            elif kind == 4:
                op = g.swap(qs[0], qs[1])
            elif kind == 5:
                w = int(rng.integers(1, nqubits + 1))
                op = g.build_rotate(qs[:w], int(rng.integers(0, w)))
            elif kind == 6:
                na, nd = int(rng.integers(1, 4)), int(rng.integers(1, 4))
                size = int(rng.integers(1, (1 << na) + 1))
                op = g.build_qram_fetch(qs[:na], qs[na:na + nd], rng.integers(0, 1 << nd, size))
            elif kind == 7:
                w = int(rng.integers(1, 5))
                op = g.build_increment(qs[:w], qs[w:w + int(rng.integers(0, 3))])
                if rng.random() < 0.5:
                    op = g.inverse(op)
            elif kind == 8:
                w = int(rng.integers(1, 5))
                if rng.random() < 0.5:
                    op = g.build_compare_leq(qs[:w], int(rng.integers(0, 1 << w)), qs[w])
                else:
                    op = g.build_compare_leq(qs[:w], qs[w:2 * w], qs[2 * w])
            else:
                op = g.build_gen_or(qs[1:1 + int(rng.integers(1, nqubits))], qs[0])
        except (IndexError, ValueError):
            continue  # not enough qubits for this draw
        circ.append(op)
    return circ


def cross_sim_pool(rng: np.random.Generator, max_qubits: int = 14) -> list[g.Circuit]:
    pool = []
    for n in range(1, 5):
        for m in range(1, n + 1):
            for sigma in (1, 2, 3):
                text = Text(rng.integers(0, sigma, n), sigma)
                pattern = Pattern(rng.integers(0, sigma, m))
                circ, lay = build_qsand(text, pattern)
                if lay.total <= max_qubits:
                    pool.append(circ)
                for k in range(m):
                    circ, lay = build_qsadd(text, pattern, k)
                    if lay.total <= max_qubits:
                        pool.append(circ)
    for _ in range(20):
        pool.append(random_classical_circuit(rng, int(rng.integers(3, max_qubits + 1)), 30))
    return pool


def check_cross_sim(seed: int = DEFAULT_SEED, inputs: int = 1000, backend: str | None = None) -> CheckResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    pool = cross_sim_pool(rng)
    bad = 0
    for _ in range(inputs):
        circ = pool[int(rng.integers(0, len(pool)))]
        nq = circ.num_qubits
        index = int(rng.integers(0, 1 << nq))
        state = BasisState(circ.layout, bytearray((index >> q) & 1 for q in range(nq)))
        out = run_basis(circ, state, backend)
        sv = run_statevector(circ, Statevector.from_basis_state(state))
        bad += sv.basis_index() != out.index()
    dt = time.perf_counter() - t0
    return CheckResult(5, "cross-simulator agreement", bad == 0,
                       f"{inputs} basis inputs over {len(pool)} circuits (Q <= 14), {bad} disagreements", dt)


def check_grover_exactness(seed: int = DEFAULT_SEED, per_size: int = 24) -> CheckResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst, cases, nonuniform = 0.0, 0, 0
    for e in range(1, 13):
        N = 1 << e
        rs = {1, 2 if N >= 2 else 1, N // 2, N} | {int(v) for v in rng.integers(1, N + 1, per_size // 2)}
        for r in sorted(rs):
            ts = {0, 1, 200, grover_iterations(N, r)} | {int(v) for v in rng.integers(0, 201, 3)}
            marked = np.zeros(N, dtype=bool)
            marked[rng.choice(N, r, replace=False)] = True
            for t in sorted(ts):
                res = simulate_grover(marked, N, t, seed=seed)
                worst = max(worst, abs(res.marked_mass - success_probability(N, r, t)))
                inside = res.distribution[marked]
                nonuniform += bool(np.ptp(inside) > 1e-15)
                cases += 1
    exact = simulate_grover([False, True, False, False], 4, 1).marked_mass == 1.0
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and exact and nonuniform == 0
    return CheckResult(6, "Grover exactness", ok,
                       f"{cases} (N, r, t) cases, max |mass - closed form| = {worst:.2e}, "
                       f"N=4 r=1 t=1 exact: {exact}", dt)


def check_end_to_end(seed: int = DEFAULT_SEED, planted: int = 500, absent: int = 500, max_n: int = 256,
                     backend: str | None = None) -> CheckResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    misses, low_mass, false_pos = [], 0, 0
    min_mass = 1.0
    for i in range(planted):
        text, pattern, j = planted_instance(rng, max_n)
        K = None if i % 2 else int(rng.integers(pattern.m, min(text.n, 2 * pattern.m + 4) + 1))
        a = procedure_a(text, pattern, seed=seed + i, backend=backend)
        b = procedure_b(text, pattern, K=K, seed=seed + i, backend=backend)
        for rep in (a, b):
            if not (rep.found and rep.verified and rep.position == j and verify_position(text, pattern, j)):
                misses.append((text.n, pattern.m, j))
        masses = [a.success_probability] + [s.success_probability for s in b.stages]
        min_mass = min(min_mass, *masses)
        low_mass += any(p < 0.8 for p in masses)
    for i in range(absent):
        text, pattern = absent_instance(rng, max_n)
        for rep in (procedure_a(text, pattern, seed=seed + i, backend=backend),
                    procedure_b(text, pattern, seed=seed + i, backend=backend)):
            false_pos += rep.found or bool(rep.marked)
    dt = time.perf_counter() - t0
    ok = not misses and low_mass == 0 and false_pos == 0
    detail = (f"{planted} planted: {len(misses)} misses, min success mass {min_mass:.4f}; "
              f"{absent} absent: {false_pos} false positives")
    return CheckResult(7, "end-to-end soundness/completeness", ok, detail, dt)


def check_coverage(max_n: int = 64) -> CheckResult:
    t0 = time.perf_counter()
    triples, misses = 0, 0
    for n in range(1, max_n + 1):
        for m in range(1, n + 1):
            js = np.arange(n - m + 1)[:, None]
            for K in range(m, n + 1):
                starts = np.asarray(plan_blocks(n, m, K).starts)[None, :]
                inside = (starts <= js) & (js + m <= starts + K)
                misses += int((~inside.any(axis=1)).sum())
                triples += 1
    dt = time.perf_counter() - t0
    return CheckResult(8, "block boundary coverage", misses == 0,
                       f"{triples} (n, m, K) plans for n <= {max_n}, {misses} uncovered windows", dt)


def check_depth_scaling(model: DepthModel = DEFAULT_MODEL, m: int = SCAN_M) -> CheckResult:
    t0 = time.perf_counter()
    ns = [1 << e for e in SCAN_EXPONENTS]
    _, slopes = depth_scan(ns, m, None, model)
    verdicts = {k: lo <= slopes[k] <= hi for k, (lo, hi) in SLOPE_BANDS.items()}
    dt = time.perf_counter() - t0
    parts = ", ".join(f"{k} {slopes[k]:.3f} in [{lo}, {hi}]: {'yes' if verdicts[k] else 'no'}"
                      for k, (lo, hi) in SLOPE_BANDS.items())
    return CheckResult(9, "depth scaling slopes", all(verdicts.values()) and dt < 10, parts, dt,
                       {"slopes": slopes, "verdicts": verdicts})


@contextlib.contextmanager
def injected_fault(name: str | None):
    """Temporarily break a component so the self-test can show it notices."""
    if name is None:
        yield
        return
    if name != "masks":
        raise ValueError(f"unknown fault {name!r}")
    original = bitparallel.build_masks

    def off_by_one(pattern, sigma, polarity="match"):
        table = original(pattern, sigma, polarity)
        full = (1 << pattern.m) - 1
        return bitparallel.BitMaskTable(tuple((v << 1) & full for v in table.masks), table.m, table.polarity)

    bitparallel.build_masks = off_by_one
    circuits.build_masks = off_by_one
    try:
        yield
    finally:
        bitparallel.build_masks = original
        circuits.build_masks = original


def selftest(seed: int = DEFAULT_SEED, fault: str | None = None, backend: str | None = None,
             quick: bool = False) -> list[CheckResult]:
    """Criteria 1-6; ``quick`` shrinks every sweep for smoke runs."""
    scale = 20 if quick else 1
    with injected_fault(fault):
        results = [check_classical(seed, 10_000 // scale, backend, max_n=6 if quick else 10)]
        results += check_circuits(seed, 1000 // scale, backend, max_n=5 if quick else 8)
        results.append(check_cross_sim(seed, 1000 // scale, backend))
        results.append(check_grover_exactness(seed, 4 if quick else 24))
    return results
