"""Line-oriented gate-list text format.

    # qsmatch gate-list 1
    register <name> <size>
    table T<k> <v0> <v1> ...
    section <label> <start> <stop>
    <KIND> [c=<q,q,..>] [t=<q,q,..>] [p=<payload>] [tag=<tag>]

Payloads: ROTATE offset; QRAM_FETCH table name; INCREMENT step;
COMPARE_LEQ ``<width>:<k>`` or ``<width>:reg``; PHASE_FLIP_IF predicate name.
Composite bodies are not written; the parser rebuilds them.
"""

from __future__ import annotations

from typing import Mapping

from ..errors import DomainError
from . import gates as g

HEADER = "# qsmatch gate-list 1"


def _qs(qs) -> str:
    return ",".join(str(q) for q in qs)


def dumps(circuit: g.Circuit) -> str:
    lines = [HEADER]
    for reg in circuit.layout.registers:
        lines.append(f"register {reg.name} {reg.size}")
    tables: dict[tuple[int, ...], str] = {}
    body: list[str] = []
    for op in circuit.gates:
        fields = [op.kind]
        if op.controls:
            fields.append(f"c={_qs(op.controls)}")
        if op.targets:
            fields.append(f"t={_qs(op.targets)}")
        p = op.payload
        if op.kind == g.QRAM_FETCH:
            if p not in tables:
                tables[p] = f"T{len(tables)}"
            fields.append(f"p={tables[p]}")
        elif op.kind == g.COMPARE_LEQ:
            q, k = p
            fields.append(f"p={q}:{'reg' if k is None else k}")
        elif op.kind == g.PHASE_FLIP_IF:
            fields.append(f"p={p.name}")
        elif p is not None:
            fields.append(f"p={p}")
        if op.tag:
            fields.append(f"tag={op.tag}")
        body.append(" ".join(fields))
    for table, name in tables.items():
        lines.append(" ".join(["table", name, *map(str, table)]))
    for label, start, stop in circuit.sections:
        lines.append(f"section {label} {start} {stop}")
    lines.extend(body)
    return "\n".join(lines) + "\n"


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(v) for v in s.split(",")) if s else ()


def _gate(kind: str, c: tuple[int, ...], t: tuple[int, ...], p: str | None,
          tables: Mapping[str, tuple[int, ...]], predicates: Mapping[str, g.Predicate]) -> g.GateOp:
    if kind in (g.X, g.H, g.Z, g.SWAP):
        return g.GateOp(kind, t)
    if kind in (g.CX, g.CCX, g.MCX):
        return g.GateOp(kind, t, c)
    if kind == g.ROTATE:
        return g.build_rotate(t, int(p))
    if kind == g.QRAM_FETCH:
        return g.build_qram_fetch(c, t, tables[p])
    if kind == g.INCREMENT:
        step = int(p)
        if step not in (1, -1):
            raise DomainError(f"INCREMENT step must be +1 or -1, got {step}")
        op = g.build_increment(t, c)
        return op if step == 1 else g.inverse(op)
    if kind == g.COMPARE_LEQ:
        q, _, k = p.partition(":")
        q = int(q)
        if k == "reg":
            return g.build_compare_leq(c[:q], c[q:], t[0])
        return g.build_compare_leq(c, int(k), t[0])
    if kind == g.GEN_OR:
        return g.build_gen_or(c, t[0])
    if kind == g.PHASE_FLIP_IF:
        if p not in predicates:
            raise DomainError(f"unknown predicate {p!r}")
        return g.phase_flip_if(c, predicates[p])
    raise DomainError(f"unknown gate kind {kind!r}")


def loads(text: str, predicates: Mapping[str, g.Predicate] | None = None) -> g.Circuit:
    """Parse a gate list; PHASE_FLIP_IF predicates are looked up by name."""
    predicates = predicates or {}
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or lines[0] != HEADER:
        raise DomainError("not a qsmatch gate list (bad header)")
    regs: list[tuple[str, int]] = []
    tables: dict[str, tuple[int, ...]] = {}
    sections: list[tuple[str, int, int]] = []
    ops: list[g.GateOp] = []
    for lineno, ln in enumerate(lines[1:], start=2):
        if not ln or ln.startswith("#"):
            continue
        head, *rest = ln.split()
        if head == "register":
            regs.append((rest[0], int(rest[1])))
        elif head == "table":
            tables[rest[0]] = tuple(int(v) for v in rest[1:])
        elif head == "section":
            sections.append((rest[0], int(rest[1]), int(rest[2])))
        else:
            kv = dict(f.split("=", 1) for f in rest)
            unknown = set(kv) - {"c", "t", "p", "tag"}
            if unknown:
                raise DomainError(f"line {lineno}: unknown fields {sorted(unknown)}")
            op = _gate(head, _ints(kv.get("c", "")), _ints(kv.get("t", "")), kv.get("p"), tables, predicates)
            ops.append(op.tagged(kv.get("tag", "")))
    circuit = g.Circuit(g.RegisterLayout(regs))
    circuit.extend(ops)
    circuit.sections.extend(sections)
    return circuit
