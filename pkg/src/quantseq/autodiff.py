"""Gradients of circuit expectations: two-point shift rule plus finite differences.

Every U3 angle and every Ising coupling angle enters the circuit through a
single rotation of the form exp(-i*(angle/2)*P) with P a Pauli string (the U3
matrix factors into phase-shift and axis rotations, and its global phase
cancels in any expectation), so the exact two-point rule

    df/da = [f(a + pi/2) - f(a - pi/2)] / 2

applies to those slots.  Slots of the fully-parametrized dense unitary are not
Pauli-generated; they fall back to central finite differences.

`frame_gradients` evaluates the shifted expectations for whole batches of
frames.  Up to 10 qubits it pulls the observable backward through the circuit
once (Heisenberg picture) so each shifted evaluation costs one gate
application plus one matrix-vector product; the values are identical to
replaying the circuit tail, which is what happens above 10 qubits where the
observable matrix would be too large.
"""

import math

import numpy as np

from .ansatz import (
    CircuitSpec,
    apply_op_raw,
    expectations_raw,
    gate_matrix,
    materialize,
    run_circuit,
    run_ops_raw,
)
from .errors import ShapeError, UnsupportedRuleError
from .statevector import QuantumState

FD_STEP = 1e-5

HEISENBERG_MAX_QUBITS = 10

_SHIFT = math.pi / 2.0


def _as_theta(spec: CircuitSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if theta.shape[0] != spec.param_count:
        raise ShapeError(f"expected {spec.param_count} parameters, got {theta.shape[0]}")
    return theta


def _check_state(spec: CircuitSpec, state: QuantumState) -> None:
    if state.num_qubits != spec.num_qubits:
        raise ShapeError(
            f"state has {state.num_qubits} qubits but circuit expects {spec.num_qubits}"
        )


def is_shift_rule_slot(spec: CircuitSpec, slot: int) -> bool:
    """True when the two-point rule is exact for this slot."""
    if not 0 <= slot < spec.param_count:
        raise ShapeError(f"slot {slot} out of range for {spec.param_count} parameters")
    return spec.ops[spec.slot_to_op[slot]].kind != "unitary"


def shift_rule_partial(spec: CircuitSpec, theta, state: QuantumState, slot: int) -> float:
    """Exact partial derivative of the circuit expectation for one Pauli slot."""
    theta = _as_theta(spec, theta)
    _check_state(spec, state)
    if not is_shift_rule_slot(spec, slot):
        raise UnsupportedRuleError(
            f"slot {slot} belongs to an arbitrary-unitary gate; use finite differences"
        )
    grads = frame_gradients(spec, theta, state.amplitudes[None, :], slots=(slot,))
    return float(grads[0, 0, 0])


def finite_diff_gradient(
    spec: CircuitSpec, theta, state: QuantumState, step: float = FD_STEP
) -> np.ndarray:
    """Central-difference gradient over every slot via plain circuit runs.

    Deliberately simple (2 * param_count executions through `run_circuit`):
    this is the oracle the shift-rule path is checked against.
    """
    if step <= 0:
        raise ShapeError("finite-difference step must be positive")
    theta = _as_theta(spec, theta)
    _check_state(spec, state)
    grads = np.empty(spec.param_count)
    shifted = theta.copy()
    for slot in range(spec.param_count):
        shifted[slot] = theta[slot] + step
        hi = run_circuit(spec, shifted, state)
        shifted[slot] = theta[slot] - step
        lo = run_circuit(spec, shifted, state)
        shifted[slot] = theta[slot]
        grads[slot] = (hi - lo) / (2.0 * step)
    return grads


def circuit_gradient(spec: CircuitSpec, theta, state: QuantumState) -> np.ndarray:
    """Gradient of the measure-wire expectation for every parameter slot.

    Shift rule on Pauli-generated slots, central finite differences (step
    1e-5) on dense-unitary slots.
    """
    theta = _as_theta(spec, theta)
    _check_state(spec, state)
    grads = frame_gradients(spec, theta, state.amplitudes[None, :])
    return grads[0, 0, :]


def hybrid_chain(upstream, frame_grads) -> np.ndarray:
    """Chain per-frame loss sensitivities into one circuit gradient.

    Circuit parameters are shared across frames, so the total derivative is
    the fixed-order sum over frames of upstream_t * grad_t.
    """
    upstream = np.asarray(upstream, dtype=np.float64).reshape(-1)
    frame_grads = [np.asarray(g, dtype=np.float64).reshape(-1) for g in frame_grads]
    if len(frame_grads) != upstream.shape[0]:
        raise ShapeError(
            f"{upstream.shape[0]} upstream values but {len(frame_grads)} frame gradients"
        )
    if not frame_grads:
        raise ShapeError("need at least one frame")
    width = frame_grads[0].shape[0]
    total = np.zeros(width)
    for u, g in zip(upstream, frame_grads):
        if g.shape[0] != width:
            raise ShapeError("frame gradients disagree on parameter count")
        total += u * g
    return total


def _slot_shift(spec: CircuitSpec, slot: int, step: float) -> tuple[float, float]:
    """(shift delta, output scale) for one slot."""
    if spec.ops[spec.slot_to_op[slot]].kind == "unitary":
        return step, 0.5 / step
    return _SHIFT, 0.5


def _conjugate_observables(obs: np.ndarray, op, mat: np.ndarray, num_qubits: int) -> np.ndarray:
    """Pull a stack of observables back through one gate: M -> E^dag M E.

    Uses the state kernels: applying gate g to the rows of X computes
    X @ embed(g)^T, and local embedding commutes with transpose/conjugation.
    """
    k, dim, _ = obs.shape
    right = apply_op_raw(obs.reshape(k * dim, dim), op, mat.T, num_qubits)
    right = np.ascontiguousarray(right.reshape(k, dim, dim).transpose(0, 2, 1))
    left = apply_op_raw(right.reshape(k * dim, dim), op, mat.conj().T, num_qubits)
    return np.ascontiguousarray(left.reshape(k, dim, dim).transpose(0, 2, 1))


def _gradients_heisenberg(spec, theta, frames, wires, slots, step, mats, out):
    dim = frames.shape[1]
    prefix = [frames]
    for op, mat in zip(spec.ops, mats):
        prefix.append(apply_op_raw(prefix[-1], op, mat, spec.num_qubits))

    obs = np.zeros((len(wires), dim, dim), dtype=np.complex128)
    for w, wire in enumerate(wires):
        bit = 1 << (spec.num_qubits - 1 - wire)
        signs = np.where((np.arange(dim) & bit) == 0, 1.0, -1.0)
        np.fill_diagonal(obs[w], signs)

    by_op = {}
    for col, slot in enumerate(slots):
        by_op.setdefault(spec.slot_to_op[slot], []).append((col, slot))

    shifted = theta.copy()
    for op_idx in range(len(spec.ops) - 1, -1, -1):
        op = spec.ops[op_idx]
        for col, slot in by_op.get(op_idx, ()):
            delta, scale = _slot_shift(spec, slot, step)
            vals = []
            for sign in (1.0, -1.0):
                shifted[slot] = theta[slot] + sign * delta
                psi = apply_op_raw(
                    prefix[op_idx], op, gate_matrix(op, shifted), spec.num_qubits
                )
                per_wire = np.empty((frames.shape[0], len(wires)))
                conj_psi = psi.conj()
                for w in range(len(wires)):
                    per_wire[:, w] = np.einsum(
                        "fd,fd->f", conj_psi @ obs[w], psi
                    ).real
                vals.append(per_wire)
            shifted[slot] = theta[slot]
            out[:, :, col] = (vals[0] - vals[1]) * scale
        if op_idx > 0:
            obs = _conjugate_observables(obs, op, mats[op_idx], spec.num_qubits)
    return out


def _gradients_replay(spec, theta, frames, wires, slots, step, mats, out):
    prefix = [frames]
    for op, mat in zip(spec.ops, mats):
        prefix.append(apply_op_raw(prefix[-1], op, mat, spec.num_qubits))
    shifted = theta.copy()
    for col, slot in enumerate(slots):
        op_idx = spec.slot_to_op[slot]
        op = spec.ops[op_idx]
        delta, scale = _slot_shift(spec, slot, step)
        vals = []
        for sign in (1.0, -1.0):
            shifted[slot] = theta[slot] + sign * delta
            amps = apply_op_raw(prefix[op_idx], op, gate_matrix(op, shifted), spec.num_qubits)
            amps = run_ops_raw(amps, spec, mats, start=op_idx + 1)
            vals.append(expectations_raw(amps, wires, spec.num_qubits))
        shifted[slot] = theta[slot]
        out[:, :, col] = (vals[0] - vals[1]) * scale
    return out


def frame_gradients(
    spec: CircuitSpec,
    theta,
    frames: np.ndarray,
    wires: tuple[int, ...] | None = None,
    slots: tuple[int, ...] | None = None,
    step: float = FD_STEP,
) -> np.ndarray:
    """Batched expectation gradients: (frames, observables, slots).

    ``frames`` is a (F, 2**n) block of already-encoded amplitudes.  Shift-rule
    deltas are used for Pauli-generated slots and central differences for
    dense-unitary slots; both evaluate the same pair of shifted expectations,
    through the Heisenberg cache at small widths and tail replay above
    HEISENBERG_MAX_QUBITS.
    """
    theta = _as_theta(spec, theta)
    frames = np.asarray(frames, dtype=np.complex128)
    if frames.ndim != 2 or frames.shape[1] != 1 << spec.num_qubits:
        raise ShapeError(f"frames must be (F, {1 << spec.num_qubits})")
    if wires is None:
        wires = (spec.measure_wire,)
    wires = tuple(wires)
    if slots is None:
        slots = tuple(range(spec.param_count))
    mats = materialize(spec, theta)
    out = np.empty((frames.shape[0], len(wires), len(slots)))
    if spec.num_qubits <= HEISENBERG_MAX_QUBITS:
        return _gradients_heisenberg(spec, theta, frames, wires, slots, step, mats, out)
    return _gradients_replay(spec, theta, frames, wires, slots, step, mats, out)
