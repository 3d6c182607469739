"""Grover search over text shifts and text blocks with QSAnd/QSAdd oracles.

The phase oracle is a fixed predicate over a padded power-of-two domain, so
the exact amplitude evolution only ever holds two values (marked and
unmarked) and is tracked by their recurrence. Oracle values come from basis
runs of the QSAnd (or QSAdd) circuit on each block, memoized by content.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bitparallel import (
    Pattern,
    Text,
    brute_force_exact,
    brute_force_kmismatch,
    shift_add_search,
    shift_and_search,
)
from .circuits import qsadd_depth, qsand_depth, run_qsadd, run_qsand
from .errors import DomainError
from .qcore import gates as g
from .qcore.depth import DEFAULT_MODEL, DepthModel, clog2

DEFAULT_SEED = 20250101
MAX_ATTEMPTS = 10


def pow2_at_least(x: int) -> int:
    return 1 << clog2(max(x, 1))


# ----------------------------------------------------------------------------
# planning


@dataclass(frozen=True)
class BlockPlan:
    n: int
    m: int
    K: int
    stride: int
    starts: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.starts)

    @property
    def N(self) -> int:
        return pow2_at_least(self.count)

    def block_symbols(self, text: Text, i: int) -> tuple[int, ...]:
        """Block i as K symbols; past the text end (and past ``count``) the sentinel ``sigma`` is used."""
        if i >= self.count:
            return (text.sigma,) * self.K
        s = self.starts[i]
        body = text.symbols[s:s + self.K]
        return body + (text.sigma,) * (self.K - len(body))

    def shifts(self, i: int) -> range:
        """Window starts (text positions) that lie inside block i."""
        s = self.starts[i]
        return range(s, min(s + self.K - self.m, self.n - self.m) + 1)

    def blocks_covering(self, start: int) -> list[int]:
        return [i for i in range(self.count) if start in self.shifts(i)]


def plan_blocks(n: int, m: int, K: int) -> BlockPlan:
    if not 1 <= m <= n:
        raise DomainError(f"need 1 <= m <= n (got m={m}, n={n})")
    if K < m:
        raise DomainError(f"block size K={K} is smaller than the pattern (m={m})")
    if K > n:
        raise DomainError(f"block size K={K} exceeds the text length n={n}")
    stride = K - m + 1
    count = -(-(n - m + 1) // stride)
    return BlockPlan(n, m, K, stride, tuple(i * stride for i in range(count)))


def default_block_size(n: int, m: int) -> int:
    return min(n, max(m, clog2(n)))


def grover_iterations(N: int, r: int) -> int:
    if not 1 <= r <= N:
        raise DomainError(f"need 1 <= r <= N (got r={r}, N={N})")
    return math.floor(math.pi / 4 * math.sqrt(N / r))


def success_probability(N: int, r: int, t: int) -> float:
    if r == 0:
        return 0.0
    theta = math.asin(math.sqrt(r / N))
    return math.sin((2 * t + 1) * theta) ** 2


def search_domain(count: int, r: int) -> int:
    """Padded Grover domain: a power of two holding every candidate and at least 4r entries.

    The 4r floor keeps the planned success probability at or above 0.81.
    """
    return pow2_at_least(max(count, 4 * r)) if r else pow2_at_least(count)


@dataclass(frozen=True)
class GroverPlan:
    N: int
    r: int
    t: int

    @property
    def theta(self) -> float:
        return math.asin(math.sqrt(self.r / self.N))

    @classmethod
    def make(cls, count: int, r: int) -> "GroverPlan":
        N = search_domain(count, r)
        return cls(N, r, grover_iterations(N, r) if r else 0)


# ----------------------------------------------------------------------------
# simulation


@dataclass
class GroverResult:
    distribution: np.ndarray
    sample: int
    marked: np.ndarray  # boolean mask over the domain
    t: int

    @property
    def marked_mass(self) -> float:
        return float(self.distribution[self.marked].sum())


def _marked_mask(predicate, N: int) -> np.ndarray:
    if callable(predicate):
        return np.fromiter((bool(predicate(i)) for i in range(N)), dtype=bool, count=N)
    marked = np.asarray(predicate, dtype=bool)
    if marked.shape != (N,):
        raise DomainError(f"marked set must have length {N}")
    return marked


def grover_amplitudes(N: int, r: int, t: int) -> tuple[float, float]:
    """(marked, unmarked) amplitude after t oracle+diffusion rounds."""
    alpha = beta = 1 / math.sqrt(N)
    for _ in range(t):
        alpha = -alpha
        mean = (r * alpha + (N - r) * beta) / N
        alpha, beta = 2 * mean - alpha, 2 * mean - beta
    return alpha, beta


def simulate_grover(predicate: Callable[[int], bool] | Sequence[bool], N: int, t: int,
                    seed: int | None = DEFAULT_SEED, rng: np.random.Generator | None = None) -> GroverResult:
    if N < 1 or N & (N - 1):
        raise DomainError(f"domain size must be a power of two, got {N}")
    marked = _marked_mask(predicate, N)
    alpha, beta = grover_amplitudes(N, int(marked.sum()), t)
    dist = np.where(marked, alpha * alpha, beta * beta)
    rng = rng if rng is not None else np.random.default_rng(seed)
    sample = int(rng.choice(N, p=dist / dist.sum()))
    return GroverResult(dist, sample, marked, t)


def grover_circuit(nbits: int, predicate: g.Predicate, t: int) -> g.Circuit:
    """Gate-level Grover over ``nbits`` qubits for statevector cross-checks.

    The diffusion is H^n, a phase flip of |0..0>, H^n, which equals the
    reflection about the uniform state up to a global sign.
    """
    layout = g.RegisterLayout([("x", nbits)])
    qs = list(layout["x"])
    zero = g.Predicate("zero", lambda v: v == 0)
    circ = g.Circuit(layout)
    circ.extend(g.h(q) for q in qs)
    for _ in range(t):
        circ.append(g.phase_flip_if(qs, predicate))
        circ.extend(g.h(q) for q in qs)
        circ.append(g.phase_flip_if(qs, zero))
        circ.extend(g.h(q) for q in qs)
    return circ


# ----------------------------------------------------------------------------
# oracles and procedures


def count_occurrences(text: Text, pattern: Pattern, k: int | None = None) -> int:
    if pattern.m > text.n:
        return 0
    if k:
        return len(shift_add_search(text, pattern, k))
    return len(shift_and_search(text, pattern))


def window_matches(text: Text, pattern: Pattern, start: int, k: int | None = None) -> bool:
    """Classical check of a single window."""
    m = pattern.m
    if not 0 <= start <= text.n - m:
        return False
    dist = sum(a != b for a, b in zip(text.symbols[start:start + m], pattern.symbols))
    return dist <= (k or 0)


class BlockOracle:
    """Memoized circuit evaluation: does the pattern occur in a symbol block?

    Blocks use the extended alphabet sigma+1 so the padding sentinel never
    matches. ``valid`` limits which window starts inside the block count,
    which matters for QSAdd where a window over padding may still have at
    most k mismatches.
    """

    def __init__(self, pattern: Pattern, sigma: int, k: int | None = None, backend: str | None = None):
        self.pattern = pattern
        self.sigma = sigma
        self.k = k
        self.backend = backend
        self.cache: dict[tuple, bool] = {}
        self.circuit_runs = 0

    def __call__(self, symbols: tuple[int, ...], valid: int | None = None) -> bool:
        key = (symbols, valid)
        if key not in self.cache:
            self.cache[key] = self._evaluate(symbols, valid)
        return self.cache[key]

    def _evaluate(self, symbols: tuple[int, ...], valid: int | None) -> bool:
        self.circuit_runs += 1
        text = Text(symbols, self.sigma + 1)
        if self.k:
            trace = run_qsadd(text, self.pattern, self.k, backend=self.backend)
            flags = trace.flags if valid is None else trace.flags[:valid]
            return any(flags)
        trace = run_qsand(text, self.pattern, backend=self.backend)
        return bool(trace.r)


@dataclass
class MatchReport:
    found: bool
    position: int | None
    verified: bool
    iterations: int
    attempts: int
    N: int
    r: int
    success_probability: float  # exact marked mass of the simulated state
    closed_form: float
    depth: dict
    distribution: np.ndarray = field(repr=False)
    marked: list[int] = field(default_factory=list)
    stages: list["MatchReport"] = field(default_factory=list)

    def to_dict(self, top: int = 8) -> dict:
        order = np.argsort(-self.distribution, kind="stable")[:top]
        out = {
            "found": self.found,
            "position": self.position,
            "verified": self.verified,
            "iterations": self.iterations,
            "attempts": self.attempts,
            "domain_size": self.N,
            "solutions": self.r,
            "success_probability": self.success_probability,
            "closed_form_probability": self.closed_form,
            "marked": self.marked,
            "top_outcomes": [{"index": int(i), "probability": float(self.distribution[i])} for i in order],
            "depth": self.depth,
        }
        if self.stages:
            out["stages"] = [s.to_dict(top) for s in self.stages]
        return out


def _oracle_depth(length: int, m: int, sigma: int, k: int | None, model: DepthModel) -> int:
    if k:
        return qsadd_depth(length, m, k, sigma, model)
    return qsand_depth(length, m, sigma, model)


def _depth_record(t: int, oracle: int, N: int) -> dict:
    diffusion = clog2(N)
    return {"oracle_per_iteration": oracle, "diffusion_per_iteration": diffusion,
            "iterations": t, "total": t * (oracle + diffusion)}


def _search(marked: np.ndarray, plan: GroverPlan, verify: Callable[[int], bool], rng: np.random.Generator,
            max_attempts: int) -> tuple[GroverResult, int | None, int]:
    res = None
    for attempt in range(1, max_attempts + 1):
        res = simulate_grover(marked, plan.N, plan.t, rng=rng)
        if verify(res.sample):
            return res, res.sample, attempt
        if not marked.any():
            # nothing is marked: re-measuring cannot help
            return res, None, attempt
    return res, None, max_attempts


def procedure_a(text: Text, pattern: Pattern, seed: int | None = DEFAULT_SEED, k: int | None = None,
                region: tuple[int, int] | None = None, model: DepthModel = DEFAULT_MODEL,
                backend: str | None = None, oracle: BlockOracle | None = None,
                rng: np.random.Generator | None = None, max_attempts: int = MAX_ATTEMPTS) -> MatchReport:
    """Grover over window starts; each candidate is checked by a circuit run on its m symbols.

    ``region`` restricts the search to starts ``lo..hi`` (inclusive).
    """
    m = pattern.m
    if m > text.n:
        raise DomainError(f"pattern longer than text (m={m}, n={text.n})")
    if k is not None and not 0 <= k < m:
        raise DomainError(f"k must satisfy 0 <= k < m (got k={k}, m={m})")
    lo, hi = region if region is not None else (0, text.n - m)
    if not 0 <= lo <= hi <= text.n - m:
        raise DomainError(f"bad search region {lo}..{hi}")
    rng = rng if rng is not None else np.random.default_rng(seed)
    oracle = oracle or BlockOracle(pattern, text.sigma, k, backend)
    count = hi - lo + 1
    r = sum(window_matches(text, pattern, s, k) for s in range(lo, hi + 1))
    plan = GroverPlan.make(count, r)
    marked = np.zeros(plan.N, dtype=bool)
    for i in range(count):
        s = lo + i
        marked[i] = oracle(text.symbols[s:s + m])
    res, idx, attempts = _search(marked, plan, lambda i: i < count and window_matches(text, pattern, lo + i, k),
                                 rng, max_attempts)
    depth = _depth_record(plan.t, _oracle_depth(m, m, text.sigma + 1, k, model), plan.N)
    position = None if idx is None else lo + idx
    return MatchReport(
        found=position is not None,
        position=position,
        verified=position is not None,
        iterations=plan.t,
        attempts=attempts,
        N=plan.N,
        r=r,
        success_probability=res.marked_mass,
        closed_form=success_probability(plan.N, r, plan.t),
        depth=depth,
        distribution=res.distribution,
        marked=[lo + int(i) for i in np.flatnonzero(marked)],
    )


def procedure_b(text: Text, pattern: Pattern, K: int | None = None, seed: int | None = DEFAULT_SEED,
                k: int | None = None, model: DepthModel = DEFAULT_MODEL, backend: str | None = None,
                max_attempts: int = MAX_ATTEMPTS) -> MatchReport:
    """Grover over overlapping blocks of size K, then Procedure A inside the block found."""
    n, m = text.n, pattern.m
    if m > n:
        raise DomainError(f"pattern longer than text (m={m}, n={n})")
    if k is not None and not 0 <= k < m:
        raise DomainError(f"k must satisfy 0 <= k < m (got k={k}, m={m})")
    K = default_block_size(n, m) if K is None else K
    blocks = plan_blocks(n, m, K)
    rng = np.random.default_rng(seed)
    oracle = BlockOracle(pattern, text.sigma, k, backend)

    def block_has_match(i: int) -> bool:
        return i < blocks.count and any(window_matches(text, pattern, s, k) for s in blocks.shifts(i))

    r = sum(block_has_match(i) for i in range(blocks.count))
    plan = GroverPlan.make(blocks.count, r)
    marked = np.zeros(plan.N, dtype=bool)
    for i in range(blocks.count):
        marked[i] = oracle(blocks.block_symbols(text, i), len(blocks.shifts(i)))
    res, idx, attempts = _search(marked, plan, block_has_match, rng, max_attempts)
    depth1 = _depth_record(plan.t, _oracle_depth(K, m, text.sigma + 1, k, model), plan.N)
    stage1 = MatchReport(idx is not None, idx, idx is not None, plan.t, attempts, plan.N, r, res.marked_mass,
                         success_probability(plan.N, r, plan.t), depth1, res.distribution,
                         [int(i) for i in np.flatnonzero(marked)])
    if idx is None:
        depth = {"stage1": depth1, "stage2": None, "total": depth1["total"]}
        return MatchReport(False, None, False, plan.t, attempts, plan.N, r, res.marked_mass,
                           stage1.closed_form, depth, res.distribution, stage1.marked, [stage1])
    shifts = blocks.shifts(idx)
    stage2 = procedure_a(text, pattern, k=k, region=(shifts.start, shifts.stop - 1), model=model,
                         oracle=oracle, rng=rng, max_attempts=max_attempts)
    depth = {"stage1": depth1, "stage2": stage2.depth, "total": depth1["total"] + stage2.depth["total"]}
    return MatchReport(
        found=stage2.found,
        position=stage2.position,
        verified=stage2.verified,
        iterations=plan.t + stage2.iterations,
        attempts=attempts + stage2.attempts,
        N=plan.N,
        r=r,
        success_probability=stage1.success_probability * stage2.success_probability,
        closed_form=stage1.closed_form * stage2.closed_form,
        depth=depth,
        distribution=res.distribution,
        marked=stage1.marked,
        stages=[stage1, stage2],
    )


def verify_position(text: Text, pattern: Pattern, position: int, k: int | None = None) -> bool:
    """Independent brute-force confirmation of a reported position."""
    found = brute_force_kmismatch(text, pattern, k) if k else brute_force_exact(text, pattern)
    return any(o.start == position for o in found)


# ----------------------------------------------------------------------------
# analytic depth totals


@dataclass(frozen=True)
class DepthTotals:
    n: int
    m: int
    K: int
    qsand_full: int
    proc_a: int
    proc_b: int


def proc_a_depth(n: int, m: int, sigma: int, model: DepthModel = DEFAULT_MODEL, k: int | None = None) -> int:
    """Procedure A depth for a single occurrence among n-m+1 shifts."""
    plan = GroverPlan.make(n - m + 1, 1)
    return _depth_record(plan.t, _oracle_depth(m, m, sigma + 1, k, model), plan.N)["total"]


def proc_b_depth(n: int, m: int, K: int, sigma: int, model: DepthModel = DEFAULT_MODEL, k: int | None = None) -> int:
    blocks = plan_blocks(n, m, K)
    plan = GroverPlan.make(blocks.count, 1)
    stage1 = _depth_record(plan.t, _oracle_depth(K, m, sigma + 1, k, model), plan.N)["total"]
    return stage1 + proc_a_depth(K, m, sigma, model, k)


def depth_totals(n: int, m: int, K: int | None = None, model: DepthModel = DEFAULT_MODEL, sigma: int = 2) -> DepthTotals:
    K = default_block_size(n, m) if K is None else K
    return DepthTotals(n, m, K, qsand_depth(n, m, sigma, model), proc_a_depth(n, m, sigma, model),
                       proc_b_depth(n, m, K, sigma, model))


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])


def depth_scan(ns: Sequence[int], m: int, K: int | None = None, model: DepthModel = DEFAULT_MODEL,
               sigma: int = 2) -> tuple[list[DepthTotals], dict[str, float]]:
    rows = [depth_totals(n, m, K, model, sigma) for n in ns]
    slopes = {
        "qsand_full": loglog_slope(ns, [r.qsand_full for r in rows]),
        "proc_a": loglog_slope(ns, [r.proc_a for r in rows]),
        "proc_b": loglog_slope(ns, [r.proc_b for r in rows]),
    }
    return rows, slopes
