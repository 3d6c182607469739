"""Layer-count cost model and greedy (ASAP) circuit scheduling."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..errors import DomainError
from . import gates as g


def clog2(x: int) -> int:
    """ceil(log2(x)) for x >= 1."""
    return (x - 1).bit_length()


@dataclass(frozen=True)
class DepthModel:
    """Depth weights in layers.

    Only the elementary-gate costs and the rotation construction are
    configurable; the composite formulas are fixed:

    * MCX with q controls: ceil(log2 max(q, 2))
    * QRAM fetch over N cells: ceil(log2 N) (at least 1)
    * INCREMENT of q qubits: q * ceil(log2 max(q, 2))
    * COMPARE_LEQ of q-bit values: q
    * GEN_OR over q sources: ceil(log2 max(q, 2)) + 2
    * ROTATE: ``c_rot`` when ``rotate == "constant"``, otherwise
      ceil(log2 max(width, 2)) for the SWAP-network construction
    """

    c_1q: int = 1
    c_2q: int = 1
    c_3q: int = 1
    c_rot: int = 2
    rotate: str = "constant"

    def __post_init__(self):
        for f in ("c_1q", "c_2q", "c_3q", "c_rot"):
            if getattr(self, f) < 1:
                raise DomainError(f"depth parameter {f} must be >= 1")
        if self.rotate not in ("constant", "log"):
            raise DomainError(f"rotate must be 'constant' or 'log', got {self.rotate!r}")

    # named costs, shared by the gate weights and the analytic formulas
    def mcx(self, q: int) -> int:
        return clog2(max(q, 2))

    def fetch(self, cells: int) -> int:
        return max(1, clog2(max(cells, 1)))

    def increment(self, q: int) -> int:
        return q * clog2(max(q, 2))

    def compare(self, q: int) -> int:
        return max(q, 1)

    def gen_or(self, q: int) -> int:
        return clog2(max(q, 2)) + 2

    def rotation(self, width: int) -> int:
        return self.c_rot if self.rotate == "constant" else clog2(max(width, 2))

    def weight(self, op: g.GateOp) -> int:
        k = op.kind
        if k in (g.X, g.H, g.Z):
            return self.c_1q
        if k in (g.CX, g.SWAP):
            return self.c_2q
        if k == g.CCX:
            return self.c_3q
        if k == g.MCX:
            return self.mcx(len(op.controls))
        if k == g.ROTATE:
            return self.rotation(len(op.targets))
        if k == g.QRAM_FETCH:
            return self.fetch(len(op.payload))
        if k == g.INCREMENT:
            return self.increment(len(op.targets))
        if k == g.COMPARE_LEQ:
            return self.compare(op.payload[0])
        if k == g.GEN_OR:
            return self.gen_or(len(op.controls))
        if k == g.PHASE_FLIP_IF:
            return self.mcx(len(op.controls))
        raise DomainError(f"no depth weight for {k}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "DepthModel":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown depth-model keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "DepthModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


DEFAULT_MODEL = DepthModel()


def schedule(ops: Iterable[tuple[Sequence[int], int]], nqubits: int, ready: np.ndarray | None = None) -> np.ndarray:
    """ASAP-schedule ``(qubits, weight)`` pairs; returns per-qubit ready times."""
    ready = np.zeros(nqubits, dtype=np.int64) if ready is None else ready.copy()
    for qs, w in ops:
        idx = np.asarray(qs, dtype=np.intp)
        if idx.size == 0:
            continue
        ready[idx] = ready[idx].max() + w
    return ready


def circuit_depth(circuit: g.Circuit, model: DepthModel = DEFAULT_MODEL, start: int = 0, stop: int | None = None) -> int:
    """Total layers under greedy layering of ``circuit.gates[start:stop]``."""
    ops = ((op.qubits, model.weight(op)) for op in circuit.gates[start:stop])
    ready = schedule(ops, circuit.num_qubits)
    return int(ready.max()) if ready.size else 0


def critical_path(circuit: g.Circuit, model: DepthModel = DEFAULT_MODEL, start: int = 0, stop: int | None = None) -> list[int]:
    """Gate indices along one longest chain, in execution order."""
    gates = circuit.gates[start:stop]
    nq = circuit.num_qubits
    ready = np.zeros(nq, dtype=np.int64)
    last = np.full(nq, -1, dtype=np.int64)
    pred = np.full(len(gates), -1, dtype=np.int64)
    end = np.zeros(len(gates), dtype=np.int64)
    for i, op in enumerate(gates):
        idx = np.asarray(op.qubits, dtype=np.intp)
        if idx.size == 0:
            continue
        times = ready[idx]
        j = int(times.argmax())
        s = int(times[j])
        if s > 0:
            pred[i] = last[idx[j]]
        end[i] = s + model.weight(op)
        ready[idx] = end[i]
        last[idx] = i
    if not gates:
        return []
    chain = []
    i = int(end.argmax())
    while i >= 0:
        chain.append(i + start)
        i = int(pred[i])
    return chain[::-1]


def depth_breakdown(circuit: g.Circuit, model: DepthModel = DEFAULT_MODEL, start: int = 0, stop: int | None = None) -> dict[str, int]:
    """Critical-path layers grouped by gate tag; values sum to the depth."""
    out: dict[str, int] = {}
    for i in critical_path(circuit, model, start, stop):
        op = circuit.gates[i]
        tag = op.tag or "other"
        out[tag] = out.get(tag, 0) + model.weight(op)
    return out
