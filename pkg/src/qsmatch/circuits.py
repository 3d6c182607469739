"""QSAnd and QSAdd circuits: layouts, per-iteration gate sequences, basis runs.

Both circuits keep a ring of per-position history (blocks of |a> for QSAnd,
counter cells of |d> for QSAdd) and rotate it one slot per text symbol, so
the working window is always slot 0. After the full run the history is
physically permuted; :meth:`QsandLayout.block_for_text_index` maps a text
index to the block that holds its configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bitparallel import Pattern, Text, build_masks, counter_width
from .errors import DomainError, ResourceLimitError
from .qcore import gates as g
from .qcore.basis import BasisRunner, BasisState
from .qcore.depth import DEFAULT_MODEL, DepthModel, circuit_depth, clog2, depth_breakdown

DEFAULT_BUDGET_QUBITS = 1 << 14


def address_width(size: int) -> int:
    """Qubits needed to address ``size`` cells (at least one)."""
    return max(1, clog2(size))


def _check_budget(required: int, budget: int | None) -> None:
    budget = DEFAULT_BUDGET_QUBITS if budget is None else budget
    if required > budget:
        raise ResourceLimitError(f"circuit needs {required} qubits, budget is {budget}", required, budget)


def _check_inputs(text: Text, pattern: Pattern) -> None:
    if pattern.m > text.n:
        raise DomainError(f"pattern longer than text (m={pattern.m}, n={text.n})")
    if max(pattern.symbols) >= text.sigma:
        raise DomainError("pattern uses a symbol outside the text alphabet")


# ----------------------------------------------------------------------------
# QSAnd


@dataclass(frozen=True)
class QsandLayout:
    n: int
    m: int
    sigma: int
    layout: g.RegisterLayout = field(init=False, compare=False)

    def __post_init__(self):
        spec = [
            ("a", self.n * self.m),
            ("b", self.m),
            ("d", self.m),
            ("c", address_width(self.sigma)),
            ("j", address_width(self.n)),
            ("r", 1),
        ]
        object.__setattr__(self, "layout", g.RegisterLayout(spec))

    @property
    def total(self) -> int:
        return self.layout.total

    def block(self, i: int) -> range:
        a = self.layout["a"]
        return a[i * self.m:(i + 1) * self.m]

    def block_for_text_index(self, j: int) -> int:
        """Physical block holding the configuration after y[j], once the run is complete."""
        return (self.n - j) % self.n


@dataclass
class QsandTrace:
    text: Text
    pattern: Pattern
    layout: QsandLayout
    configs: list[int]  # |d> after each iteration, i.e. after reading y[j]
    blocks: list[int]  # final contents of the block for text index j
    boundary_clean: list[bool]  # |c> and |b> were zero after each iteration
    r: int
    state: BasisState
    circuit: g.Circuit


def build_qsand(text: Text, pattern: Pattern, budget_qubits: int | None = None) -> tuple[g.Circuit, QsandLayout]:
    _check_inputs(text, pattern)
    n, m = text.n, pattern.m
    lay = QsandLayout(n, m, text.sigma)
    _check_budget(lay.total, budget_qubits)
    L = lay.layout
    a, b, d, c, j = L["a"], L["b"], L["d"], L["c"], L["j"]
    r = L.qubit("r")
    masks = build_masks(pattern, text.sigma, "match")
    a0 = lay.block(0)

    # every iteration uses the same gate objects
    fetch_y = g.build_qram_fetch(j, c, text.symbols).tagged("fetch")
    fetch_b = g.build_qram_fetch(c, b, masks.masks).tagged("fetch")
    swaps = [g.swap(d[i], a0[i]).tagged("transition") for i in range(m)]
    ands = [g.ccx(a0[i], b[i + 1], d[i + 1]).tagged("transition") for i in range(m - 1)]
    ands.append(g.cx(b[0], d[0]).tagged("transition"))
    rotate = g.build_rotate(a, m % len(a)).tagged("rotate")
    step = g.build_increment(j).tagged("counter")

    circ = g.Circuit(L)
    for t in range(n):
        with circ.section(f"iter{t}"):
            circ.extend([fetch_y, fetch_b])
            circ.extend(swaps)
            circ.extend(ands)
            circ.append(rotate)
            circ.extend([fetch_b, fetch_y])
            circ.append(step)
    with circ.section("flush"):
        # store the last configuration and return |d> to zero
        circ.extend(swaps)
        circ.append(rotate)
    with circ.section("readout"):
        sources = [lay.block(i)[m - 1] for i in range(n)]
        circ.append(g.build_gen_or(sources, r).tagged("readout"))
    return circ, lay


def run_qsand(text: Text, pattern: Pattern, backend: str | None = None, budget_qubits: int | None = None) -> QsandTrace:
    circ, lay = build_qsand(text, pattern, budget_qubits)
    runner = BasisRunner(circ, backend)
    state = BasisState(lay.layout)
    configs, clean = [], []
    for t in range(text.n):
        start, stop = circ.sections[t][1:]
        runner.run(state, start, stop)
        configs.append(state.value("d"))
        clean.append(state.value("c") == 0 and state.value("b") == 0)
    runner.run(state, circ.sections[text.n][1])
    blocks = [state.slice_value(lay.block(lay.block_for_text_index(jj))) for jj in range(text.n)]
    return QsandTrace(text, pattern, lay, configs, blocks, clean, state.get("r"), state, circ)


def occurrence_positions_from_trace(trace) -> list[int]:
    """Start positions read off the final QSAnd blocks or QSAdd occurrence flags."""
    if isinstance(trace, QsaddTrace):
        return [st for st, f in enumerate(trace.flags) if f]
    m = trace.pattern.m
    top = 1 << (m - 1)
    return [jj - m + 1 for jj, v in enumerate(trace.blocks) if v & top]


# ----------------------------------------------------------------------------
# QSAdd


@dataclass(frozen=True)
class QsaddLayout:
    n: int
    m: int
    sigma: int
    layout: g.RegisterLayout = field(init=False, compare=False)

    @property
    def ell(self) -> int:
        return counter_width(self.m)

    def __post_init__(self):
        spec = [
            ("a", self.ell),
            ("b", self.m),
            ("d", self.n * self.ell),
            ("c", address_width(self.sigma)),
            ("j", address_width(self.n)),
            ("s", self.n),
            ("r", 1),
        ]
        object.__setattr__(self, "layout", g.RegisterLayout(spec))

    @property
    def total(self) -> int:
        return self.layout.total

    def cell(self, i: int) -> range:
        d = self.layout["d"]
        i %= self.n
        return d[i * self.ell:(i + 1) * self.ell]

    def flag_for_start(self, start: int) -> int:
        """Index into |s> holding the flag of the window at ``start`` after the run."""
        return (self.n - start) % self.n


@dataclass
class QsaddTrace:
    text: Text
    pattern: Pattern
    k: int
    layout: QsaddLayout
    counters: list[list[int]]  # cells D_0..D_{m-1} after reading y[j]
    flags: list[int]  # per window start, 1 when it has <= k mismatches
    boundary_clean: list[bool]
    r: int
    state: BasisState
    circuit: g.Circuit


def build_qsadd(text: Text, pattern: Pattern, k: int, budget_qubits: int | None = None) -> tuple[g.Circuit, QsaddLayout]:
    _check_inputs(text, pattern)
    n, m = text.n, pattern.m
    if not 0 <= k < m:
        raise DomainError(f"k must satisfy 0 <= k < m (got k={k}, m={m})")
    lay = QsaddLayout(n, m, text.sigma)
    _check_budget(lay.total, budget_qubits)
    L = lay.layout
    bound, b, d, c, j, s = L["a"], L["b"], L["d"], L["c"], L["j"], L["s"]
    r = L.qubit("r")
    ell = lay.ell
    masks = build_masks(pattern, text.sigma, "mismatch")

    fetch_y = g.build_qram_fetch(j, c, text.symbols).tagged("fetch")
    fetch_b = g.build_qram_fetch(c, b, masks.masks).tagged("fetch")
    incs = [g.build_increment(lay.cell(i), [b[i]]).tagged("increment") for i in range(m)]
    compare = g.build_compare_leq(lay.cell(m - 1), bound, s[m - 1]).tagged("compare")
    rot_d = g.build_rotate(d, ell % len(d)).tagged("rotate")
    rot_s = g.build_rotate(s, 1 % n).tagged("rotate")
    step = g.build_increment(j).tagged("counter")

    circ = g.Circuit(L)
    with circ.section("init"):
        circ.extend(g.x(bound[i]).tagged("init") for i in range(ell) if (k >> i) & 1)
    for t in range(n):
        with circ.section(f"iter{t}"):
            circ.extend([fetch_y, fetch_b])
            # cells past the text start stay zero so nothing stale wraps around the ring
            circ.extend(incs[:min(t, m - 1) + 1])
            if t >= m - 1:
                circ.append(compare)
            circ.extend([rot_d, rot_s])
            circ.extend([fetch_b, fetch_y])
            circ.append(step)
    with circ.section("readout"):
        circ.append(g.build_gen_or(s, r).tagged("readout"))
    return circ, lay


def run_qsadd(text: Text, pattern: Pattern, k: int, backend: str | None = None,
              budget_qubits: int | None = None) -> QsaddTrace:
    circ, lay = build_qsadd(text, pattern, k, budget_qubits)
    runner = BasisRunner(circ, backend)
    state = BasisState(lay.layout)
    m = pattern.m
    runner.run(state, *circ.section_range("init")[:2])
    counters, clean = [], []
    for t in range(text.n):
        start, stop = circ.section_range(f"iter{t}")
        runner.run(state, start, stop)
        # the window moved one cell along the ring during the rotation
        counters.append([state.slice_value(lay.cell(i + 1)) for i in range(m)])
        clean.append(state.value("c") == 0 and state.value("b") == 0)
    runner.run(state, circ.section_range("readout")[0])
    sq = lay.layout["s"]
    flags = [state.bits[sq[lay.flag_for_start(st)]] for st in range(text.n - m + 1)]
    return QsaddTrace(text, pattern, k, lay, counters, flags, clean, state.get("r"), state, circ)


# ----------------------------------------------------------------------------
# depth


def depth_report(circuit: g.Circuit, model: DepthModel = DEFAULT_MODEL) -> dict:
    """Total layers, per-tag critical-path breakdown, and one-iteration figures."""
    report = {
        "total": circuit_depth(circuit, model),
        "breakdown": depth_breakdown(circuit, model),
        "qubits": circuit.num_qubits,
        "gates": len(circuit.gates),
    }
    try:
        start, stop = circuit.section_range("iter0")
    except KeyError:
        return report
    # the last iteration runs the full per-step sequence in both circuits
    last = max(i for i, (label, _, _) in enumerate(circuit.sections) if label.startswith("iter"))
    _, start, stop = circuit.sections[last]
    report["iteration"] = {
        "total": circuit_depth(circuit, model, start, stop),
        "breakdown": depth_breakdown(circuit, model, start, stop),
    }
    return report


# ----------------------------------------------------------------------------
# analytic depth
#
# The ring registers (|a> for QSAnd, |d> and |s> for QSAdd) are touched
# outside the working window only by the whole-register ROTATE and the final
# GEN_OR, so every qubit outside the window always has the same ready time.
# Folding them into one representative qubit gives the exact greedy depth on
# a handful of qubits; once the per-iteration pattern repeats, the remaining
# iterations are extrapolated.


class _Compressed:
    def __init__(self):
        self.size = 0

    def reg(self, size: int) -> list[int]:
        qs = list(range(self.size, self.size + size))
        self.size += size
        return qs


def _play(ready: list[int], ops) -> None:
    for qs, w in ops:
        t = max(ready[q] for q in qs) + w
        for q in qs:
            ready[q] = t


def _iterate(ready: list[int], n: int, ops_for, steady_from: int = 0) -> None:
    """Run iterations 0..n-1, skipping ahead once the relative schedule cycles."""
    seen: dict[tuple[int, ...], tuple[int, int]] = {}
    t = 0
    while t < n:
        if t >= steady_from:
            # qubits idle during the loop (the output qubit) keep their value
            active = sorted({q for qs, _ in ops_for(t) for q in qs})
            top = max(ready[q] for q in active)
            key = tuple(top - ready[q] for q in active)
            if key in seen:
                t0, top0 = seen[key]
                period, delta = t - t0, top - top0
                jumps = (n - t) // period
                if jumps:
                    for q in active:
                        ready[q] += jumps * delta
                    t += jumps * period
                seen.clear()
                if t >= n:
                    break
            else:
                seen[key] = (t, top)
        _play(ready, ops_for(t))
        t += 1


def qsand_depth(n: int, m: int, sigma: int, model: DepthModel = DEFAULT_MODEL) -> int:
    """Greedy depth of ``build_qsand`` for any text of length n, without building it."""
    if not 1 <= m <= n:
        raise DomainError(f"need 1 <= m <= n (got m={m}, n={n})")
    C = _Compressed()
    a0 = C.reg(m)
    arest = C.reg(1 if n > 1 else 0)
    b, d = C.reg(m), C.reg(m)
    c, j = C.reg(address_width(sigma)), C.reg(address_width(n))
    r = C.reg(1)
    fetch_y = (j + c, model.fetch(n))
    fetch_b = (c + b, model.fetch(sigma))
    swaps = [((d[i], a0[i]), model.c_2q) for i in range(m)]
    ands = [((a0[i], b[i + 1], d[i + 1]), model.c_3q) for i in range(m - 1)]
    ands.append(((b[0], d[0]), model.c_2q))
    rotate = (a0 + arest, model.rotation(n * m))
    step = (j, model.increment(len(j)))
    body = [fetch_y, fetch_b, *swaps, *ands, rotate, fetch_b, fetch_y, step]

    ready = [0] * C.size
    _iterate(ready, n, lambda t: body)
    _play(ready, swaps + [rotate])
    _play(ready, [([a0[m - 1]] + arest + r, model.gen_or(n))])
    return max(ready)


def qsadd_depth(n: int, m: int, k: int, sigma: int, model: DepthModel = DEFAULT_MODEL) -> int:
    """Greedy depth of ``build_qsadd`` for any text of length n, without building it."""
    if not 1 <= m <= n:
        raise DomainError(f"need 1 <= m <= n (got m={m}, n={n})")
    if not 0 <= k < m:
        raise DomainError(f"k must satisfy 0 <= k < m (got k={k}, m={m})")
    ell = counter_width(m)
    C = _Compressed()
    bound = C.reg(ell)
    b = C.reg(m)
    cells = [C.reg(ell) for _ in range(m)]
    drest = C.reg(1 if n > m else 0)
    c, j = C.reg(address_width(sigma)), C.reg(address_width(n))
    s_win = C.reg(1)
    srest = C.reg(1 if n > 1 else 0)
    r = C.reg(1)
    fetch_y = (j + c, model.fetch(n))
    fetch_b = (c + b, model.fetch(sigma))
    incs = [([b[i]] + cells[i], model.increment(ell)) for i in range(m)]
    compare = (cells[m - 1] + bound + s_win, model.compare(ell))
    rot_d = ([q for cell in cells for q in cell] + drest, model.rotation(n * ell))
    rot_s = (s_win + srest, model.rotation(n))
    step = (j, model.increment(len(j)))

    def ops_for(t: int):
        head = [fetch_y, fetch_b, *incs[:min(t, m - 1) + 1]]
        if t >= m - 1:
            head.append(compare)
        return head + [rot_d, rot_s, fetch_b, fetch_y, step]

    ready = [0] * C.size
    _play(ready, [([bound[i]], model.c_1q) for i in range(ell) if (k >> i) & 1])
    _iterate(ready, n, ops_for, steady_from=m - 1)
    _play(ready, [(s_win + srest + r, model.gen_or(n))])
    return max(ready)
