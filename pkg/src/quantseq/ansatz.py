"""Circuit programs for the three tensor-network topologies and their executor.

A circuit is an ordered list of ops over parameter slots.  Three builders are
provided:

* ``build_mps`` — a linear cascade: convolve a pair, pool the lower wire into
  the higher one, slide down the chain until one wire survives.
* ``build_ttn`` — a binary tree: convolve adjacent active pairs, pool half the
  wires away, repeat until one wire survives.
* ``build_reverse_mera`` — the tree with an extra offset (interleaving) layer
  of convolutions before each aligned layer.

Each convolution block is U3 (x) U3, IsingXX, IsingYY, IsingZZ, U3 (x) U3 on a
wire pair (15 parameter slots).  Pooling is a CNOT whose control wire is
discarded afterwards; no later op may touch it.  A two-qubit fully-parametrized
unitary acts on the last surviving pair before the final pool, and the single
survivor carries the Pauli-Z observable.

``stages`` records, after each conv / pool / dense stage, how many ops have
run and which wires are still active — the insertion points used by the noise
channels.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import gates
from .errors import CircuitSpecError, ParameterError, ShapeError
from .statevector import (
    MAX_QUBITS,
    MIN_QUBITS,
    QuantumState,
    _apply_1q_raw,
    _apply_2q_raw,
    _expectation_z_raw,
)

CONV_BLOCK_SLOTS = 15
DENSE_SLOTS = 15

# op kind -> (number of wires, number of parameter slots)
_OP_SHAPE = {
    "u3": (1, 3),
    "ising_xx": (2, 1),
    "ising_yy": (2, 1),
    "ising_zz": (2, 1),
    "pool": (2, 0),
    "unitary": (2, 15),
}


@dataclass(frozen=True)
class CircuitOp:
    """One gate in a circuit program.

    ``slots`` is the half-open [start, stop) range of trainable parameters
    consumed by the gate; a pool op consumes none.
    """

    kind: str
    wires: tuple[int, ...]
    slots: tuple[int, int]


@dataclass(frozen=True)
class CircuitSpec:
    """Immutable gate program with pooling schedule and measurement wire."""

    kind: str
    num_qubits: int
    ops: tuple[CircuitOp, ...]
    param_count: int
    measure_wire: int
    # (ops applied so far, wires still active) after each conv/pool/dense stage
    stages: tuple[tuple[int, tuple[int, ...]], ...]
    slot_to_op: tuple[int, ...] = field(repr=False)
    discard_order: tuple[int, ...] = field(repr=False)

    def validate(self) -> None:
        """Check slot coverage, wire liveness, and the single-survivor contract."""
        seen = np.zeros(self.param_count, dtype=np.int64)
        active = set(range(self.num_qubits))
        discards = []
        for idx, op in enumerate(self.ops):
            if op.kind not in _OP_SHAPE:
                raise CircuitSpecError(f"op {idx}: unknown kind {op.kind!r}")
            n_wires, n_slots = _OP_SHAPE[op.kind]
            if len(op.wires) != n_wires or len(set(op.wires)) != n_wires:
                raise CircuitSpecError(f"op {idx}: {op.kind} needs {n_wires} distinct wires")
            for w in op.wires:
                if not 0 <= w < self.num_qubits:
                    raise CircuitSpecError(f"op {idx}: wire {w} out of range")
                if w not in active:
                    raise CircuitSpecError(f"op {idx}: wire {w} was discarded by pooling")
            s0, s1 = op.slots
            if s1 - s0 != n_slots or s0 < 0 or s1 > self.param_count:
                raise CircuitSpecError(f"op {idx}: bad slot range {op.slots} for {op.kind}")
            seen[s0:s1] += 1
            if self.slot_to_op[s0:s1] != (idx,) * n_slots:
                raise CircuitSpecError(f"op {idx}: slot_to_op table out of sync")
            if op.kind == "pool":
                active.remove(op.wires[0])
                discards.append(op.wires[0])
        if self.param_count and not np.all(seen == 1):
            bad = int(np.flatnonzero(seen != 1)[0])
            raise CircuitSpecError(f"slot {bad} referenced {int(seen[bad])} times")
        if active != {self.measure_wire}:
            raise CircuitSpecError(
                f"expected single survivor {self.measure_wire}, got active set {sorted(active)}"
            )
        if tuple(discards) != self.discard_order:
            raise CircuitSpecError("discard_order out of sync with pool ops")
        prev = 0
        for count, wires in self.stages:
            if not prev < count <= len(self.ops):
                raise CircuitSpecError(f"stage boundary {count} not increasing")
            prev = count

    def observable_wires(self, k: int = 1) -> tuple[int, ...]:
        """The k wires that stayed active longest, survivor first."""
        if not 1 <= k <= self.num_qubits:
            raise ParameterError(f"k must be in [1, {self.num_qubits}]")
        return (self.measure_wire,) + tuple(reversed(self.discard_order))[: k - 1]

    def ops_as_text(self) -> str:
        """One op per line: kind, comma-joined wires, slot range."""
        lines = [
            f"{op.kind} {','.join(str(w) for w in op.wires)} {op.slots[0]}:{op.slots[1]}"
            for op in self.ops
        ]
        return "\n".join(lines) + "\n"

    def ops_as_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "num_qubits": self.num_qubits,
                "param_count": self.param_count,
                "measure_wire": self.measure_wire,
                "ops": [
                    {"kind": op.kind, "wires": list(op.wires), "slots": list(op.slots)}
                    for op in self.ops
                ],
            },
            indent=2,
        )


def conv_block(wire_a: int, wire_b: int, slot_base: int) -> list[CircuitOp]:
    """The 15-slot convolution block on a wire pair."""
    if wire_a == wire_b:
        raise CircuitSpecError("conv block needs two distinct wires")
    s = slot_base
    return [
        CircuitOp("u3", (wire_a,), (s, s + 3)),
        CircuitOp("u3", (wire_b,), (s + 3, s + 6)),
        CircuitOp("ising_xx", (wire_a, wire_b), (s + 6, s + 7)),
        CircuitOp("ising_yy", (wire_a, wire_b), (s + 7, s + 8)),
        CircuitOp("ising_zz", (wire_a, wire_b), (s + 8, s + 9)),
        CircuitOp("u3", (wire_a,), (s + 9, s + 12)),
        CircuitOp("u3", (wire_b,), (s + 12, s + 15)),
    ]


def pool(control_wire: int, target_wire: int) -> list[CircuitOp]:
    """CNOT from the to-be-discarded control into the retained target."""
    if control_wire == target_wire:
        raise CircuitSpecError("pool needs two distinct wires")
    return [CircuitOp("pool", (control_wire, target_wire), (0, 0))]


class _Builder:
    def __init__(self, kind: str, num_qubits: int):
        self.kind = kind
        self.num_qubits = num_qubits
        self.ops: list[CircuitOp] = []
        self.slots = 0
        self.active = list(range(num_qubits))
        self.stages: list[tuple[int, tuple[int, ...]]] = []
        self.discards: list[int] = []

    def conv(self, a: int, b: int) -> None:
        self.ops.extend(conv_block(a, b, self.slots))
        self.slots += CONV_BLOCK_SLOTS

    def pool(self, control: int, target: int) -> None:
        op = pool(control, target)[0]
        self.ops.append(CircuitOp(op.kind, op.wires, (self.slots, self.slots)))
        self.active.remove(control)
        self.discards.append(control)

    def dense(self, a: int, b: int) -> None:
        self.ops.append(CircuitOp("unitary", (a, b), (self.slots, self.slots + DENSE_SLOTS)))
        self.slots += DENSE_SLOTS

    def mark_stage(self) -> None:
        self.stages.append((len(self.ops), tuple(self.active)))

    def finish(self) -> CircuitSpec:
        slot_to_op = [0] * self.slots
        for idx, op in enumerate(self.ops):
            for s in range(op.slots[0], op.slots[1]):
                slot_to_op[s] = idx
        spec = CircuitSpec(
            kind=self.kind,
            num_qubits=self.num_qubits,
            ops=tuple(self.ops),
            param_count=self.slots,
            measure_wire=self.active[0],
            stages=tuple(self.stages),
            slot_to_op=tuple(slot_to_op),
            discard_order=tuple(self.discards),
        )
        spec.validate()
        return spec


def _check_qubit_count(n: int, require_power_of_two: bool) -> None:
    if not MIN_QUBITS <= n <= MAX_QUBITS:
        raise ParameterError(f"qubit count must be in [{MIN_QUBITS}, {MAX_QUBITS}], got {n}")
    if require_power_of_two and n & (n - 1) != 0:
        raise ParameterError(f"qubit count must be a power of two so halving ends at 1, got {n}")


def build_mps(num_qubits: int) -> CircuitSpec:
    """Linear cascade: each pair is convolved, then its lower wire pooled away."""
    _check_qubit_count(num_qubits, require_power_of_two=False)
    b = _Builder("mps", num_qubits)
    for i in range(num_qubits - 1):
        b.conv(i, i + 1)
        b.mark_stage()
        if i < num_qubits - 2:
            b.pool(i, i + 1)
            b.mark_stage()
    b.dense(num_qubits - 2, num_qubits - 1)
    b.mark_stage()
    b.pool(num_qubits - 2, num_qubits - 1)
    b.mark_stage()
    return b.finish()


def build_ttn(num_qubits: int) -> CircuitSpec:
    """Binary tree: convolve adjacent active pairs, pool half the wires, repeat."""
    _check_qubit_count(num_qubits, require_power_of_two=True)
    b = _Builder("ttn", num_qubits)
    while len(b.active) > 2:
        pairs = [(b.active[i], b.active[i + 1]) for i in range(0, len(b.active), 2)]
        for a, t in pairs:
            b.conv(a, t)
        b.mark_stage()
        for a, t in pairs:
            b.pool(a, t)
        b.mark_stage()
    a, t = b.active
    b.conv(a, t)
    b.mark_stage()
    b.dense(a, t)
    b.mark_stage()
    b.pool(a, t)
    b.mark_stage()
    return b.finish()


def build_reverse_mera(num_qubits: int) -> CircuitSpec:
    """The tree with an offset convolution layer interleaved before each aligned one."""
    _check_qubit_count(num_qubits, require_power_of_two=True)
    b = _Builder("mera", num_qubits)
    while len(b.active) > 2:
        offset = [(b.active[i], b.active[i + 1]) for i in range(1, len(b.active) - 1, 2)]
        for a, t in offset:
            b.conv(a, t)
        if offset:
            b.mark_stage()
        aligned = [(b.active[i], b.active[i + 1]) for i in range(0, len(b.active), 2)]
        for a, t in aligned:
            b.conv(a, t)
        b.mark_stage()
        for a, t in aligned:
            b.pool(a, t)
        b.mark_stage()
    a, t = b.active
    b.conv(a, t)
    b.mark_stage()
    b.dense(a, t)
    b.mark_stage()
    b.pool(a, t)
    b.mark_stage()
    return b.finish()


BUILDERS = {"mps": build_mps, "mera": build_reverse_mera, "ttn": build_ttn}


def build(kind: str, num_qubits: int) -> CircuitSpec:
    if kind not in BUILDERS:
        raise ParameterError(f"unknown ansatz kind {kind!r}; choose from {sorted(BUILDERS)}")
    return BUILDERS[kind](num_qubits)


# ---------------------------------------------------------------------------
# Execution.
# ---------------------------------------------------------------------------

def gate_matrix(op: CircuitOp, theta: np.ndarray) -> np.ndarray:
    """Dense matrix for one op at the given parameter vector."""
    s0, s1 = op.slots
    if op.kind == "u3":
        return gates.u3(theta[s0], theta[s0 + 1], theta[s0 + 2])
    if op.kind == "ising_xx":
        return gates.ising_xx(theta[s0])
    if op.kind == "ising_yy":
        return gates.ising_yy(theta[s0])
    if op.kind == "ising_zz":
        return gates.ising_zz(theta[s0])
    if op.kind == "pool":
        return gates.cnot()
    if op.kind == "unitary":
        return gates.arbitrary_unitary(theta[s0:s1], 2)
    raise CircuitSpecError(f"unknown op kind {op.kind!r}")


def materialize(spec: CircuitSpec, theta: np.ndarray) -> list[np.ndarray]:
    """All gate matrices for the program at this parameter vector."""
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if theta.shape[0] != spec.param_count:
        raise ShapeError(f"expected {spec.param_count} parameters, got {theta.shape[0]}")
    return [gate_matrix(op, theta) for op in spec.ops]


def apply_op_raw(
    amps: np.ndarray,
    op: CircuitOp,
    mat: np.ndarray,
    num_qubits: int,
    out: np.ndarray | None = None,
) -> np.ndarray:
    if len(op.wires) == 1:
        return _apply_1q_raw(amps, mat, op.wires[0], num_qubits, out=out)
    return _apply_2q_raw(amps, mat, op.wires[0], op.wires[1], num_qubits, out=out)


def run_ops_raw(
    amps: np.ndarray,
    spec: CircuitSpec,
    mats: list[np.ndarray],
    start: int = 0,
) -> np.ndarray:
    """Push a (batch, 2**n) amplitude block through ops[start:].

    Ping-pongs between two scratch buffers so large registers never allocate
    inside the gate loop; the input block is left untouched.
    """
    ops = spec.ops[start:]
    if not ops:
        return amps
    scratch = (np.empty_like(amps), np.empty_like(amps))
    current = amps
    for idx, (op, mat) in enumerate(zip(ops, mats[start:])):
        target = scratch[idx % 2]
        current = apply_op_raw(current, op, mat, spec.num_qubits, out=target)
    return current


def expectations_raw(amps: np.ndarray, wires: tuple[int, ...], num_qubits: int) -> np.ndarray:
    """Z expectations on several wires for a (batch, 2**n) block -> (batch, k)."""
    cols = [_expectation_z_raw(amps, w) for w in wires]
    return np.stack(cols, axis=1)


def run_circuit(spec: CircuitSpec, theta: np.ndarray, state: QuantumState) -> float:
    """Execute the program and return the Z expectation at the measure wire."""
    if state.num_qubits != spec.num_qubits:
        raise ShapeError(
            f"state has {state.num_qubits} qubits but circuit expects {spec.num_qubits}"
        )
    mats = materialize(spec, theta)
    out = run_ops_raw(state.amplitudes[None, :], spec, mats)
    return float(_expectation_z_raw(out, spec.measure_wire)[0])


def run_circuit_features(
    spec: CircuitSpec, theta: np.ndarray, state: QuantumState, wires: tuple[int, ...] | None = None
) -> np.ndarray:
    """Z expectations on the requested wires (default: just the measure wire)."""
    if state.num_qubits != spec.num_qubits:
        raise ShapeError(
            f"state has {state.num_qubits} qubits but circuit expects {spec.num_qubits}"
        )
    if wires is None:
        wires = (spec.measure_wire,)
    mats = materialize(spec, theta)
    out = run_ops_raw(state.amplitudes[None, :], spec, mats)
    return expectations_raw(out, tuple(wires), spec.num_qubits)[0]
