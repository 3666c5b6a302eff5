"""Dense statevector register: gate application, measurement, amplitude encoding.

Basis convention (locked by tests): qubit 0 is the *most significant* bit of
the basis index.  For a 2-qubit register, index 1 is |01>, i.e. qubit 0 in
|0> and qubit 1 in |1>.  Wire ``w`` of an ``n``-qubit register therefore
occupies bit position ``n - 1 - w`` counted from the least significant bit.

All public operations are pure: they take a state and return a new one.
The private ``_apply_*_raw`` kernels operate on 2-D arrays of shape
``(batch, 2**n)`` so that many frames can be pushed through a circuit at
once; the public single-state API wraps them with a batch of one.
"""

import numpy as np

from .errors import DegenerateInputError, ParameterError, ShapeError

try:
    from . import _fastpath
except ImportError:  # pragma: no cover - numba not installed
    _fastpath = None

MIN_QUBITS = 2
MAX_QUBITS = 16

_NORM_TOL = 1e-10


class QuantumState:
    """Normalized complex amplitude vector for an ``num_qubits``-qubit register.

    Invariants enforced at construction: the vector has length exactly
    ``2**num_qubits`` and unit L2 norm within 1e-10.
    """

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes: np.ndarray):
        if not MIN_QUBITS <= num_qubits <= MAX_QUBITS:
            raise ParameterError(
                f"num_qubits must be in [{MIN_QUBITS}, {MAX_QUBITS}], got {num_qubits}"
            )
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << num_qubits:
            raise ShapeError(
                f"expected {1 << num_qubits} amplitudes for {num_qubits} qubits, "
                f"got {amps.shape[0]}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ParameterError(f"state vector norm {norm!r} deviates from 1")
        self.num_qubits = num_qubits
        self.amplitudes = amps

    def __repr__(self):
        return f"QuantumState(num_qubits={self.num_qubits})"


def _check_wire(wire: int, num_qubits: int) -> None:
    if not 0 <= wire < num_qubits:
        raise IndexError(f"wire {wire} out of range for {num_qubits} qubits")


def amplitude_encode(pixels: np.ndarray) -> QuantumState:
    """Encode a real vector of length 2**n as the amplitudes of an n-qubit state.

    The vector is L2-normalized; entry ``i`` becomes the amplitude of basis
    state ``|i>``.  Values need not lie in [0, 1] (only the direction matters).

    Raises:
        ShapeError: length is not a power of two in the supported range.
        DegenerateInputError: all entries are zero (no direction to encode).
    """
    vec = np.asarray(pixels, dtype=np.float64).reshape(-1)
    size = vec.shape[0]
    if size < (1 << MIN_QUBITS) or size & (size - 1) != 0:
        raise ShapeError(f"pixel count {size} is not a power of two >= 4")
    num_qubits = size.bit_length() - 1
    if num_qubits > MAX_QUBITS:
        raise ShapeError(f"pixel count {size} exceeds the {MAX_QUBITS}-qubit ceiling")
    if not np.all(np.isfinite(vec)):
        raise ParameterError("pixel values must be finite")
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise DegenerateInputError("all-zero input has no valid normalization")
    return QuantumState(num_qubits, (vec / norm).astype(np.complex128))


# ---------------------------------------------------------------------------
# Batched kernels.  `amps` has shape (batch, 2**n); gates are dense complex
# matrices.  Results land in `out` when given (must not alias the input),
# otherwise in a fresh array; single-state calls take the numba fast path.
# ---------------------------------------------------------------------------

def _apply_1q_raw(
    amps: np.ndarray, gate: np.ndarray, wire: int, num_qubits: int, out: np.ndarray | None = None
) -> np.ndarray:
    batch = amps.shape[0]
    # writing into a caller-supplied buffer keeps the hot loop allocation-free
    # (fresh large allocations fall into mmap territory and fault per call)
    target = np.empty_like(amps) if out is None else out
    if _fastpath is not None and batch == 1:
        _fastpath.apply_1q(amps[0], gate, wire, num_qubits, target[0])
        return target
    view = amps.reshape(batch, 1 << wire, 2, -1)
    a0 = view[:, :, 0, :]
    a1 = view[:, :, 1, :]
    tview = target.reshape(view.shape)
    tview[:, :, 0, :] = gate[0, 0] * a0 + gate[0, 1] * a1
    tview[:, :, 1, :] = gate[1, 0] * a0 + gate[1, 1] * a1
    return target.reshape(batch, -1)


def _apply_2q_raw(
    amps: np.ndarray,
    gate: np.ndarray,
    wire_a: int,
    wire_b: int,
    num_qubits: int,
    out: np.ndarray | None = None,
) -> np.ndarray:
    batch = amps.shape[0]
    if _fastpath is not None and batch == 1:
        target = np.empty_like(amps) if out is None else out
        _fastpath.apply_2q(
            amps[0], gate, num_qubits - 1 - wire_a, num_qubits - 1 - wire_b, target[0]
        )
        return target
    # expose both wire bits as explicit axes: (batch, pre, lo-bit, mid, hi-bit, post)
    lo, hi = (wire_a, wire_b) if wire_a < wire_b else (wire_b, wire_a)
    view = amps.reshape(batch, 1 << lo, 2, 1 << (hi - lo - 1), 2, -1)
    g = gate.reshape(2, 2, 2, 2)  # indexed [a_out, b_out, a_in, b_in]
    if wire_a > wire_b:
        g = g.transpose(1, 0, 3, 2)  # reindex to [lo_out, hi_out, lo_in, hi_in]
    blocks = [[view[:, :, i, :, j, :] for j in (0, 1)] for i in (0, 1)]
    target = np.empty_like(amps) if out is None else out
    tview = target.reshape(view.shape)
    for p in (0, 1):
        for q in (0, 1):
            acc = None
            for i in (0, 1):
                for j in (0, 1):
                    coeff = g[p, q, i, j]
                    if coeff == 0.0:
                        continue
                    if acc is None:
                        acc = coeff * blocks[i][j]
                    else:
                        acc += coeff * blocks[i][j]
            tview[:, :, p, :, q, :] = 0.0 if acc is None else acc
    return target.reshape(batch, -1)


def _prob_one_raw(amps: np.ndarray, wire: int) -> np.ndarray:
    batch, dim = amps.shape
    view = amps.reshape(batch, 1 << wire, 2, -1)
    ones = view[:, :, 1, :]
    return np.einsum("bij,bij->b", ones.real, ones.real) + np.einsum(
        "bij,bij->b", ones.imag, ones.imag
    )


def _expectation_z_raw(amps: np.ndarray, wire: int) -> np.ndarray:
    return 1.0 - 2.0 * _prob_one_raw(amps, wire)


# ---------------------------------------------------------------------------
# Public single-state operations.
# ---------------------------------------------------------------------------

def apply_1q(state: QuantumState, gate: np.ndarray, target: int) -> QuantumState:
    """Apply a single-qubit unitary to one wire; returns a new state."""
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        raise ShapeError(f"expected a 2x2 gate, got shape {gate.shape}")
    _check_wire(target, state.num_qubits)
    amps = _apply_1q_raw(state.amplitudes[None, :], gate, target, state.num_qubits)
    return QuantumState(state.num_qubits, amps[0])


def apply_2q(state: QuantumState, gate: np.ndarray, wire_a: int, wire_b: int) -> QuantumState:
    """Apply a two-qubit unitary; ``wire_a`` is the high-order bit of the gate index."""
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (4, 4):
        raise ShapeError(f"expected a 4x4 gate, got shape {gate.shape}")
    _check_wire(wire_a, state.num_qubits)
    _check_wire(wire_b, state.num_qubits)
    if wire_a == wire_b:
        raise IndexError("wire_a and wire_b must differ")
    amps = _apply_2q_raw(state.amplitudes[None, :], gate, wire_a, wire_b, state.num_qubits)
    return QuantumState(state.num_qubits, amps[0])


def prob_one(state: QuantumState, wire: int) -> float:
    """Probability of measuring |1> on the given wire."""
    _check_wire(wire, state.num_qubits)
    return float(_prob_one_raw(state.amplitudes[None, :], wire)[0])


def expectation_z(state: QuantumState, wire: int) -> float:
    """Analytic Pauli-Z expectation on the given wire: 1 - 2*P(1), in [-1, 1]."""
    _check_wire(wire, state.num_qubits)
    return float(_expectation_z_raw(state.amplitudes[None, :], wire)[0])


def sample_shots(state: QuantumState, wire: int, shots: int, rng: np.random.Generator) -> float:
    """Estimate the Z expectation from ``shots`` seeded single-qubit measurements.

    Each shot is a +/-1 Bernoulli draw with P(+1) = 1 - prob_one(state, wire).
    The analytic path is `expectation_z`; this one is opt-in for shot-noise
    studies and is reproducible given the generator's seed.
    """
    _check_wire(wire, state.num_qubits)
    if shots < 1:
        raise ParameterError("shots must be >= 1; use expectation_z for the analytic value")
    p1 = prob_one(state, wire)
    ones = int(np.count_nonzero(rng.random(shots) < p1))
    return (shots - 2 * ones) / shots
