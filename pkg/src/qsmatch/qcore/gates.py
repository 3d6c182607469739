"""Gate vocabulary, register layouts, circuits and composite-gate builders."""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable, Iterator, Sequence

from ..errors import DomainError

X = "X"
H = "H"
Z = "Z"
CX = "CX"
CCX = "CCX"
MCX = "MCX"
SWAP = "SWAP"
ROTATE = "ROTATE"
QRAM_FETCH = "QRAM_FETCH"
COMPARE_LEQ = "COMPARE_LEQ"
INCREMENT = "INCREMENT"
GEN_OR = "GEN_OR"
PHASE_FLIP_IF = "PHASE_FLIP_IF"

KINDS = (X, H, Z, CX, CCX, MCX, SWAP, ROTATE, QRAM_FETCH, COMPARE_LEQ, INCREMENT, GEN_OR, PHASE_FLIP_IF)
COMPOSITE_KINDS = frozenset({COMPARE_LEQ, INCREMENT, GEN_OR})
NON_CLASSICAL_KINDS = frozenset({H, Z, PHASE_FLIP_IF})


@dataclass(frozen=True)
class Predicate:
    """Classical predicate on a register value, used by PHASE_FLIP_IF."""

    name: str
    fn: Callable[[int], bool] = field(compare=False, hash=False)

    def __call__(self, value: int) -> bool:
        return bool(self.fn(value))


@dataclass(frozen=True)
class GateOp:
    """One gate. Composite kinds carry their primitive expansion in ``body``.

    Payloads: ROTATE offset; QRAM_FETCH lookup table; COMPARE_LEQ
    ``(width, k)`` with ``k=None`` when the bound is a register (its qubits
    follow the value register in ``controls``); INCREMENT step (+1 or -1);
    PHASE_FLIP_IF a :class:`Predicate`.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    payload: Any = None
    body: tuple["GateOp", ...] = ()
    tag: str = ""

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def tagged(self, tag: str) -> "GateOp":
        if tag == self.tag:
            return self
        return GateOp(self.kind, self.targets, self.controls, self.payload, self.body, tag)


@dataclass(frozen=True)
class Register:
    name: str
    size: int
    offset: int

    @property
    def qubits(self) -> range:
        return range(self.offset, self.offset + self.size)


class RegisterLayout:
    """Named, contiguous, disjoint qubit registers in declaration order."""

    def __init__(self, spec: Iterable[tuple[str, int]]):
        regs: list[Register] = []
        offset = 0
        for name, size in spec:
            if size < 0:
                raise DomainError(f"register {name!r} has negative size")
            if any(r.name == name for r in regs):
                raise DomainError(f"duplicate register name {name!r}")
            regs.append(Register(name, size, offset))
            offset += size
        self.registers: tuple[Register, ...] = tuple(regs)
        self.total = offset
        self._by_name = {r.name: r for r in regs}

    def __getitem__(self, name: str) -> range:
        return self._by_name[name].qubits

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RegisterLayout) and self.registers == other.registers

    def __repr__(self) -> str:
        inner = ", ".join(f"{r.name}[{r.size}]" for r in self.registers)
        return f"RegisterLayout({inner})"

    def register(self, name: str) -> Register:
        return self._by_name[name]

    def qubit(self, name: str, index: int = 0) -> int:
        reg = self._by_name[name]
        if not 0 <= index < reg.size:
            raise IndexError(f"{name}[{index}] out of range (size {reg.size})")
        return reg.offset + index

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.registers)


class Circuit:
    """Ordered gate list over a register layout.

    Gates are validated on append. ``sections`` records labelled gate ranges
    (iteration boundaries, phases) so simulators can stop between them.
    """

    def __init__(self, layout: RegisterLayout):
        self.layout = layout
        self.gates: list[GateOp] = []
        self.sections: list[tuple[str, int, int]] = []

    @property
    def num_qubits(self) -> int:
        return self.layout.total

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[GateOp]:
        return iter(self.gates)

    def append(self, op: GateOp) -> None:
        validate(op, self.layout.total)
        self.gates.append(op)

    def extend(self, ops: Iterable[GateOp]) -> None:
        for op in ops:
            self.append(op)

    @contextmanager
    def section(self, label: str):
        start = len(self.gates)
        yield
        self.sections.append((label, start, len(self.gates)))

    def section_range(self, label: str) -> tuple[int, int]:
        for name, start, stop in self.sections:
            if name == label:
                return start, stop
        raise KeyError(label)

    def inverse(self) -> "Circuit":
        inv = Circuit(self.layout)
        for op in reversed(self.gates):
            inv.gates.append(inverse(op))
        return inv


def validate(op: GateOp, nqubits: int) -> None:
    if op.kind not in KINDS:
        raise DomainError(f"unknown gate kind {op.kind!r}")
    qs = op.qubits
    if len(set(qs)) != len(qs):
        raise DomainError(f"{op.kind}: operand qubits must be pairwise distinct, got {qs}")
    for q in qs:
        if not 0 <= q < nqubits:
            raise DomainError(f"{op.kind}: qubit {q} outside 0..{nqubits - 1}")
    if op.kind == ROTATE and not 0 <= op.payload < max(len(op.targets), 1):
        raise DomainError(f"ROTATE offset {op.payload} outside 0..{len(op.targets) - 1}")


def inverse(op: GateOp) -> GateOp:
    if op.kind == ROTATE:
        w = len(op.targets)
        return GateOp(ROTATE, op.targets, (), (w - op.payload) % w, (), op.tag)
    if op.kind in COMPOSITE_KINDS:
        body = tuple(inverse(g) for g in reversed(op.body))
        payload = -op.payload if op.kind == INCREMENT else op.payload
        return GateOp(op.kind, op.targets, op.controls, payload, body, op.tag)
    # every other kind is self-inverse
    return op


# ----------------------------------------------------------------------------
# primitive constructors


def x(q: int) -> GateOp:
    return GateOp(X, (q,))


def h(q: int) -> GateOp:
    return GateOp(H, (q,))


def z(q: int) -> GateOp:
    return GateOp(Z, (q,))


def cx(control: int, target: int) -> GateOp:
    return GateOp(CX, (target,), (control,))


def ccx(c1: int, c2: int, target: int) -> GateOp:
    return GateOp(CCX, (target,), (c1, c2))


def swap(a: int, b: int) -> GateOp:
    return GateOp(SWAP, (a, b))


def phase_flip_if(register: Sequence[int], predicate: Predicate) -> GateOp:
    return GateOp(PHASE_FLIP_IF, (), tuple(register), predicate)


def build_mcx(controls: Sequence[int], target: int) -> GateOp:
    controls = tuple(controls)
    if not controls:
        raise DomainError("MCX needs at least one control")
    if target in controls:
        raise DomainError(f"MCX target {target} is also a control")
    return GateOp(MCX, (target,), controls)


def build_rotate(register: Sequence[int], offset: int) -> GateOp:
    """Cyclic rotation: the qubit at position p moves to (p + offset) mod width."""
    register = tuple(register)
    if not 0 <= offset < max(len(register), 1):
        raise DomainError(f"rotation offset {offset} outside 0..{len(register) - 1}")
    return GateOp(ROTATE, register, (), offset)


def build_qram_fetch(address: Sequence[int], data: Sequence[int], table: Sequence[int]) -> GateOp:
    """data ^= table[address]; addresses past the table read as 0."""
    address, data, table = tuple(address), tuple(data), tuple(int(v) for v in table)
    if len(table) > 1 << len(address):
        raise DomainError(f"table of {len(table)} cells needs more than {len(address)} address qubits")
    if table and (min(table) < 0 or max(table) >= 1 << len(data)):
        raise DomainError(f"table entries must fit in {len(data)} data qubits")
    return GateOp(QRAM_FETCH, data, address, table)


def _polarized(term: Sequence[tuple[int, int]], target: int) -> list[GateOp]:
    # flip target iff every (qubit, wanted) pair holds; wanted=0 via X conjugation
    neg = [x(q) for q, want in term if not want]
    controls = [q for q, _ in term]
    core = build_mcx(controls, target) if controls else x(target)
    return neg + [core] + neg


def build_gen_or(sources: Sequence[int], target: int) -> GateOp:
    """target ^= OR(sources), through NOT-AND-NOT around one MCX."""
    return _gen_or(tuple(sources), target)


@lru_cache(maxsize=4096)
def _gen_or(sources: tuple[int, ...], target: int) -> GateOp:
    if not sources:
        raise DomainError("generalized OR needs at least one source")
    if target in sources:
        raise DomainError("generalized OR target overlaps its sources")
    flips = tuple(x(q) for q in sources)
    body = flips + (build_mcx(sources, target),) + flips + (x(target),)
    return GateOp(GEN_OR, (target,), sources, None, body)


def build_increment(register: Sequence[int], controls: Sequence[int] = ()) -> GateOp:
    """register += 1 (mod 2**width), optionally controlled.

    The body is an MCX cascade from the most to the least significant bit;
    bit i is flipped when all lower bits (and every extra control) are 1.
    """
    return _increment(tuple(register), tuple(controls))


@lru_cache(maxsize=4096)
def _increment(register: tuple[int, ...], controls: tuple[int, ...]) -> GateOp:
    if not register:
        raise DomainError("cannot increment an empty register")
    if set(register) & set(controls):
        raise DomainError("increment controls overlap the register")
    body = []
    for i in reversed(range(len(register))):
        ctl = controls + register[:i]
        body.append(build_mcx(ctl, register[i]) if ctl else x(register[i]))
    return GateOp(INCREMENT, register, controls, 1, tuple(body))


def build_compare_leq(register: Sequence[int], bound: int | Sequence[int], flag: int) -> GateOp:
    """flag ^= (value(register) <= bound); the register is left unchanged.

    ``bound`` is a classical constant or a second register of equal width.
    """
    register = tuple(register)
    if isinstance(bound, int):
        return _compare_const(register, bound, flag)
    return _compare_reg(register, tuple(bound), flag)


@lru_cache(maxsize=4096)
def _compare_const(register: tuple[int, ...], k: int, flag: int) -> GateOp:
    q = len(register)
    if not 0 <= k < 1 << q:
        raise DomainError(f"constant {k} does not fit in {q} bits")
    if flag in register:
        raise DomainError("comparison flag overlaps the register")
    body: list[GateOp] = []
    limit = k + 1
    if limit >= 1 << q:
        body.append(x(flag))
    else:
        # value < limit  <=>  for some bit i: limit_i = 1, value_i = 0, higher bits equal;
        # the terms are mutually exclusive so their XOR is their OR
        for i in reversed(range(q)):
            if (limit >> i) & 1:
                term = [(register[j], (limit >> j) & 1) for j in range(q - 1, i, -1)]
                term.append((register[i], 0))
                body.extend(_polarized(term, flag))
    return GateOp(COMPARE_LEQ, (flag,), register, (q, k), tuple(body))


@lru_cache(maxsize=4096)
def _compare_reg(register: tuple[int, ...], bound: tuple[int, ...], flag: int) -> GateOp:
    q = len(register)
    if len(bound) != q:
        raise DomainError("register and bound register widths differ")
    if len(set(register + bound + (flag,))) != 2 * q + 1:
        raise DomainError("comparison operands overlap")
    diff = tuple(cx(b, r) for r, b in zip(register, bound))
    body: list[GateOp] = list(diff)
    # after the CXs register holds value XOR bound; flag ^= (value > bound)
    for i in reversed(range(q)):
        term = [(register[j], 0) for j in range(q - 1, i, -1)]
        term += [(register[i], 1), (bound[i], 0)]
        body.extend(_polarized(term, flag))
    body.extend(diff)
    body.append(x(flag))
    return GateOp(COMPARE_LEQ, (flag,), register + bound, (q, None), tuple(body))


def expand(op: GateOp) -> Iterator[GateOp]:
    """Primitive gates of ``op`` in execution order."""
    if op.kind in COMPOSITE_KINDS:
        for g in op.body:
            yield from expand(g)
    else:
        yield op
