"""Exact basis-state simulation of reversible-classical circuits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from .._pykernels import OP_CCX, OP_CX, OP_FETCH, OP_MCX, OP_ROTATE, OP_SWAP, OP_X
from ..errors import DomainError, NonClassicalGateError
from . import gates as g


class BasisState:
    """One classical bit per qubit, addressable by register name."""

    __slots__ = ("layout", "bits")

    def __init__(self, layout: g.RegisterLayout, bits: bytearray | None = None):
        self.layout = layout
        if bits is None:
            bits = bytearray(layout.total)
        elif len(bits) != layout.total:
            raise DomainError(f"expected {layout.total} bits, got {len(bits)}")
        self.bits = bits

    @classmethod
    def from_values(cls, layout: g.RegisterLayout, **values: int) -> "BasisState":
        st = cls(layout)
        for name, v in values.items():
            st.set_value(name, v)
        return st

    def copy(self) -> "BasisState":
        return BasisState(self.layout, bytearray(self.bits))

    def get(self, name: str, index: int = 0) -> int:
        return self.bits[self.layout.qubit(name, index)]

    def value(self, name: str) -> int:
        """Register contents as an integer, qubit 0 least significant."""
        v = 0
        for i, q in enumerate(self.layout[name]):
            v |= self.bits[q] << i
        return v

    def set_value(self, name: str, v: int) -> None:
        qs = self.layout[name]
        if v < 0 or v >= 1 << len(qs):
            raise DomainError(f"value {v} does not fit register {name!r} of {len(qs)} qubits")
        for i, q in enumerate(qs):
            self.bits[q] = (v >> i) & 1

    def slice_value(self, qubits) -> int:
        v = 0
        for i, q in enumerate(qubits):
            v |= self.bits[q] << i
        return v

    def index(self) -> int:
        """Computational-basis index (qubit q is bit q)."""
        packed = np.packbits(np.frombuffer(bytes(self.bits), dtype=np.uint8), bitorder="little")
        return int.from_bytes(packed.tobytes(), "little")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BasisState) and self.layout == other.layout and self.bits == other.bits

    def __repr__(self) -> str:
        regs = ", ".join(f"{n}={self.value(n)}" for n in self.layout.names if len(self.layout[n]) <= 64)
        return f"BasisState({regs})"


@dataclass
class Program:
    code: np.ndarray
    tables: np.ndarray
    offsets: list[int]  # code position where gate i starts; len = ngates + 1


def _encode(op: g.GateOp, code: list[int], tables: list[int], table_ids: dict[int, tuple[int, int]]) -> None:
    k = op.kind
    if k == g.X:
        code += (OP_X, op.targets[0])
    elif k == g.CX:
        code += (OP_CX, op.controls[0], op.targets[0])
    elif k == g.CCX:
        code += (OP_CCX, op.controls[0], op.controls[1], op.targets[0])
    elif k == g.MCX:
        code += (OP_MCX, len(op.controls), *op.controls, op.targets[0])
    elif k == g.SWAP:
        code += (OP_SWAP, *op.targets)
    elif k == g.ROTATE:
        code += (OP_ROTATE, len(op.targets), op.payload, *op.targets)
    elif k == g.QRAM_FETCH:
        key = id(op.payload)
        if key not in table_ids:
            table_ids[key] = (len(tables), len(op.payload))
            tables.extend(op.payload)
        off, n = table_ids[key]
        code += (OP_FETCH, len(op.controls), len(op.targets), off, n, *op.controls, *op.targets)
    elif k in g.COMPOSITE_KINDS:
        for sub in op.body:
            _encode(sub, code, tables, table_ids)
    else:
        raise AssertionError(k)


def compile_program(circuit: g.Circuit) -> Program:
    code: list[int] = []
    tables: list[int] = []
    table_ids: dict[int, tuple[int, int]] = {}
    offsets = [0]
    for i, op in enumerate(circuit.gates):
        if op.kind in g.NON_CLASSICAL_KINDS:
            raise NonClassicalGateError(i, op.kind)
        _encode(op, code, tables, table_ids)
        offsets.append(len(code))
    return Program(np.asarray(code, dtype=np.int64), np.asarray(tables, dtype=np.uint64), offsets)


class BasisRunner:
    """Compiled circuit that can be executed gate-range by gate-range."""

    def __init__(self, circuit: g.Circuit, backend: str | None = None):
        self.circuit = circuit
        self.program = compile_program(circuit)
        self.impl = kernels.get(backend)

    def run(self, state: BasisState, start: int = 0, stop: int | None = None) -> BasisState:
        """Apply gates ``[start, stop)`` to ``state`` in place and return it."""
        if state.layout.total != self.circuit.num_qubits:
            raise DomainError("state and circuit have different qubit counts")
        stop = len(self.circuit.gates) if stop is None else stop
        p = self.program
        self.impl.run_program(state.bits, p.code, p.tables, p.offsets[start], p.offsets[stop])
        return state


def run_basis(circuit: g.Circuit, state: BasisState | None = None, backend: str | None = None) -> BasisState:
    """Run a reversible-classical circuit on a basis input; the input is not modified."""
    state = BasisState(circuit.layout) if state is None else state.copy()
    return BasisRunner(circuit, backend).run(state)
