"""Gate vocabulary, basis-state and statevector simulators, depth model."""

from .basis import BasisRunner, BasisState, compile_program, run_basis
from .depth import DEFAULT_MODEL, DepthModel, circuit_depth, clog2, critical_path, depth_breakdown
from .gatelist import dumps as dump_gate_list
from .gatelist import loads as load_gate_list
from .gates import (
    Circuit,
    GateOp,
    Predicate,
    RegisterLayout,
    build_compare_leq,
    build_gen_or,
    build_increment,
    build_mcx,
    build_qram_fetch,
    build_rotate,
    ccx,
    cx,
    h,
    phase_flip_if,
    swap,
    x,
    z,
)
from .statevector import Statevector, measure_register, run_statevector

__all__ = [
    "BasisRunner", "BasisState", "Circuit", "DEFAULT_MODEL", "DepthModel", "GateOp", "Predicate",
    "RegisterLayout", "Statevector", "build_compare_leq", "build_gen_or", "build_increment", "build_mcx",
    "build_qram_fetch", "build_rotate", "ccx", "circuit_depth", "clog2", "compile_program", "critical_path",
    "cx", "depth_breakdown", "dump_gate_list", "h", "load_gate_list", "measure_register", "phase_flip_if",
    "run_basis", "run_statevector", "swap", "x", "z",
]
