"""Dense statevector simulator for small circuits.

Amplitude index bit q is qubit q. Reversible-classical gates act as basis
permutations computed over the whole index array at once; composite gates
use their arithmetic definition rather than their primitive body, so the
two simulators check each other.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DomainError, ResourceLimitError
from . import gates as g
from .basis import BasisState

DEFAULT_CAP = 22
NORM_TOL = 1e-12


class Statevector:
    """2**Q complex amplitudes, optionally tied to a register layout."""

    def __init__(self, nqubits: int, amplitudes: np.ndarray | None = None, cap: int = DEFAULT_CAP,
                 layout: g.RegisterLayout | None = None):
        if nqubits > cap:
            raise ResourceLimitError(f"statevector needs {nqubits} qubits, cap is {cap}", nqubits, cap)
        self.nqubits = nqubits
        self.cap = cap
        self.layout = layout
        if amplitudes is None:
            amplitudes = np.zeros(1 << nqubits, dtype=np.complex128)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.asarray(amplitudes, dtype=np.complex128)
            if amplitudes.shape != (1 << nqubits,):
                raise DomainError(f"expected {1 << nqubits} amplitudes, got {amplitudes.shape}")
        self.amplitudes = amplitudes

    @classmethod
    def basis(cls, nqubits: int, index: int = 0, cap: int = DEFAULT_CAP,
              layout: g.RegisterLayout | None = None) -> "Statevector":
        sv = cls(nqubits, cap=cap, layout=layout)
        sv.amplitudes[0] = 0.0
        sv.amplitudes[index] = 1.0
        return sv

    @classmethod
    def from_basis_state(cls, state: BasisState, cap: int = DEFAULT_CAP) -> "Statevector":
        return cls.basis(state.layout.total, state.index(), cap, state.layout)

    def copy(self) -> "Statevector":
        return Statevector(self.nqubits, self.amplitudes.copy(), self.cap, self.layout)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def basis_index(self, tol: float = NORM_TOL) -> int | None:
        """Index of the single populated basis state, or None for a superposition."""
        p = self.probabilities()
        i = int(p.argmax())
        return i if abs(p[i] - 1.0) <= tol else None

    def to_basis_state(self) -> BasisState:
        if self.layout is None:
            raise DomainError("statevector has no register layout")
        i = self.basis_index()
        if i is None:
            raise DomainError("statevector is not a computational basis state")
        bits = bytearray((i >> q) & 1 for q in range(self.nqubits))
        return BasisState(self.layout, bits)


def _bit(idx: np.ndarray, q: int) -> np.ndarray:
    return (idx >> q) & 1


def _gather(idx: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    v = np.zeros_like(idx)
    for i, q in enumerate(qubits):
        v |= _bit(idx, q) << i
    return v


def _scatter_xor(idx: np.ndarray, qubits: Sequence[int], value: np.ndarray) -> np.ndarray:
    out = idx.copy()
    for i, q in enumerate(qubits):
        out ^= ((value >> i) & 1) << q
    return out


def _all_set(idx: np.ndarray, controls: Sequence[int]) -> np.ndarray:
    cm = 0
    for q in controls:
        cm |= 1 << q
    return (idx & cm) == cm


def _image(op: g.GateOp, idx: np.ndarray) -> np.ndarray:
    """Where each basis index is sent by a reversible-classical gate."""
    k = op.kind
    if k == g.X:
        return idx ^ (1 << op.targets[0])
    if k in (g.CX, g.CCX, g.MCX):
        t = op.targets[0]
        return idx ^ (_all_set(idx, op.controls).astype(np.int64) << t)
    if k == g.SWAP:
        a, b = op.targets
        diff = _bit(idx, a) ^ _bit(idx, b)
        return idx ^ (diff << a) ^ (diff << b)
    if k == g.ROTATE:
        w, off = len(op.targets), op.payload
        old = _gather(idx, op.targets)
        new = np.zeros_like(old)
        for p in range(w):
            new |= ((old >> p) & 1) << ((p + off) % w)
        return _scatter_xor(idx, op.targets, old ^ new)
    if k == g.QRAM_FETCH:
        table = np.asarray(op.payload + (0,), dtype=np.int64)
        addr = _gather(idx, op.controls)
        addr = np.minimum(addr, len(op.payload))  # past-the-end reads the appended 0
        return _scatter_xor(idx, op.targets, table[addr])
    if k == g.INCREMENT:
        q = len(op.targets)
        v = _gather(idx, op.targets)
        nv = (v + op.payload) % (1 << q)
        if op.controls:
            nv = np.where(_all_set(idx, op.controls), nv, v)
        return _scatter_xor(idx, op.targets, v ^ nv)
    if k == g.COMPARE_LEQ:
        q, bound = op.payload
        v = _gather(idx, op.controls[:q])
        limit = bound if bound is not None else _gather(idx, op.controls[q:])
        return idx ^ ((v <= limit).astype(np.int64) << op.targets[0])
    if k == g.GEN_OR:
        any_set = (idx & sum(1 << q for q in op.controls)) != 0
        return idx ^ (any_set.astype(np.int64) << op.targets[0])
    raise AssertionError(k)


def apply_gate(sv: Statevector, op: g.GateOp, idx: np.ndarray | None = None) -> None:
    """Apply one gate to ``sv`` in place."""
    amp = sv.amplitudes
    k = op.kind
    if k == g.H:
        q = op.targets[0]
        view = amp.reshape(-1, 2, 1 << q)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        s = 1 / np.sqrt(2.0)
        view[:, 0, :] = (a0 + a1) * s
        view[:, 1, :] = (a0 - a1) * s
        return
    if idx is None:
        idx = np.arange(amp.size, dtype=np.int64)
    if k == g.Z:
        amp[_bit(idx, op.targets[0]) == 1] *= -1
        return
    if k == g.PHASE_FLIP_IF:
        w = len(op.controls)
        truth = np.fromiter((op.payload(v) for v in range(1 << w)), dtype=bool, count=1 << w)
        amp[truth[_gather(idx, op.controls)]] *= -1
        return
    out = np.empty_like(amp)
    out[_image(op, idx)] = amp
    sv.amplitudes = out


def run_statevector(circuit: g.Circuit, state: Statevector | None = None, cap: int = DEFAULT_CAP) -> Statevector:
    """Apply every gate of ``circuit``; the input state is not modified."""
    nq = circuit.num_qubits
    if nq > cap:
        raise ResourceLimitError(f"circuit has {nq} qubits, statevector cap is {cap}", nq, cap)
    if state is None:
        sv = Statevector(nq, cap=cap, layout=circuit.layout)
    else:
        if state.nqubits != nq:
            raise DomainError("state and circuit have different qubit counts")
        sv = state.copy()
        if sv.layout is None:
            sv.layout = circuit.layout
    idx = np.arange(1 << nq, dtype=np.int64)
    for op in circuit.gates:
        apply_gate(sv, op, idx)
    return sv


def measure_register(state: Statevector, register: str | Sequence[int], seed: int | None = 0,
                     rng: np.random.Generator | None = None) -> tuple[np.ndarray, int]:
    """Exact marginal distribution of ``register`` plus one seeded sample."""
    if isinstance(register, str):
        if state.layout is None:
            raise DomainError("register names need a statevector with a layout")
        qubits = list(state.layout[register])
    else:
        qubits = list(register)
    idx = np.arange(state.amplitudes.size, dtype=np.int64)
    values = _gather(idx, qubits)
    dist = np.bincount(values, weights=state.probabilities(), minlength=1 << len(qubits))
    rng = rng if rng is not None else np.random.default_rng(seed)
    sample = int(rng.choice(dist.size, p=dist / dist.sum()))
    return dist, sample
