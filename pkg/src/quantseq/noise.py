"""Single-qubit error channels, stochastic trajectories, and a density-matrix oracle.

Channels are inserted after each conv / pool / dense stage of a circuit, on
every wire still active at that point (the stage boundaries come from
``CircuitSpec.stages``).  Above 6 qubits the exact density-matrix evolution is
infeasible, so expectations are estimated by Monte-Carlo wavefunction
trajectories: one Kraus branch is sampled per channel application with its
Born probability, the state renormalized, and a single +/-1 measurement drawn
per trajectory.
"""

from dataclasses import dataclass

import numpy as np

from .ansatz import CircuitSpec, apply_op_raw, materialize
from .errors import CapacityError, ParameterError, ShapeError
from .statevector import QuantumState, _apply_1q_raw, _prob_one_raw

CHANNEL_NAMES = ("depolarizing", "amplitude_damping", "phase_damping", "bit_flip")

# fixed placement: channels fire after every conv/pool/dense stage, on every
# wire still active there (the trajectory and density-matrix paths share
# CircuitSpec.stages, so the two can be compared like for like)
CHANNEL_PLACEMENT = "after-each-gate-layer"

DENSITY_MATRIX_MAX_QUBITS = 6

DEFAULT_SHOTS = 1000

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_EYE2 = np.eye(2, dtype=np.complex128)


@dataclass(frozen=True)
class NoiseConfig:
    """Per-run channel selection: one shared strength, trajectory count."""

    strength: float
    channels: tuple[str, ...] = CHANNEL_NAMES
    shots: int = DEFAULT_SHOTS

    def __post_init__(self):
        if not 0.0 <= self.strength <= 1.0:
            raise ParameterError(f"noise strength must lie in [0, 1], got {self.strength}")
        if self.shots < 1:
            raise ParameterError("shots must be >= 1")
        for name in self.channels:
            if name not in CHANNEL_NAMES:
                raise ParameterError(f"unknown channel {name!r}; choose from {CHANNEL_NAMES}")


def kraus_ops(channel: str, lam: float) -> list[np.ndarray]:
    """Kraus operators for one channel at strength ``lam``.

    Conventions: depolarizing keeps the state with weight 1-lam and applies
    each Pauli with weight lam/3 (so lam = 0.75 is the fully depolarizing
    point and lam = 1.0 the uniform Pauli mixture); bit flip applies X with
    weight lam; the damping channels use the standard 2x2 pairs.
    """
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"channel strength must lie in [0, 1], got {lam}")
    if channel == "depolarizing":
        return [
            np.sqrt(1.0 - lam) * _EYE2,
            np.sqrt(lam / 3.0) * _PAULI_X,
            np.sqrt(lam / 3.0) * _PAULI_Y,
            np.sqrt(lam / 3.0) * _PAULI_Z,
        ]
    if channel == "bit_flip":
        return [np.sqrt(1.0 - lam) * _EYE2, np.sqrt(lam) * _PAULI_X]
    if channel == "amplitude_damping":
        return [
            np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - lam)]], dtype=np.complex128),
            np.array([[0.0, np.sqrt(lam)], [0.0, 0.0]], dtype=np.complex128),
        ]
    if channel == "phase_damping":
        return [
            np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - lam)]], dtype=np.complex128),
            np.array([[0.0, 0.0], [0.0, np.sqrt(lam)]], dtype=np.complex128),
        ]
    raise ParameterError(f"unknown channel {channel!r}; choose from {CHANNEL_NAMES}")


def _wire_density(amps: np.ndarray, wire: int) -> np.ndarray:
    """Reduced 2x2 density matrix of one wire for a (1, 2**n) block."""
    view = amps.reshape(amps.shape[0], 1 << wire, 2, -1)
    a0 = view[:, :, 0, :].reshape(-1)
    a1 = view[:, :, 1, :].reshape(-1)
    r00 = np.vdot(a0, a0).real
    r11 = np.vdot(a1, a1).real
    r01 = np.vdot(a1, a0)  # <a0 row, a1 col> term: sum a0 * conj(a1)
    return np.array([[r00, r01], [np.conj(r01), r11]], dtype=np.complex128)


def _sample_kraus_raw(
    amps: np.ndarray, ops: list[np.ndarray], wire: int, num_qubits: int, rng: np.random.Generator
) -> np.ndarray:
    """Apply one Born-sampled Kraus branch to a (1, 2**n) block and renormalize."""
    rho = _wire_density(amps, wire)
    probs = np.array([np.trace(k.conj().T @ k @ rho).real for k in ops])
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    choice = int(np.searchsorted(np.cumsum(probs), rng.random()))
    choice = min(choice, len(ops) - 1)
    out = _apply_1q_raw(amps, ops[choice], wire, num_qubits)
    return out / np.linalg.norm(out)


def apply_channel_trajectory(
    state: QuantumState, channel: str, lam: float, wire: int, rng: np.random.Generator
) -> QuantumState:
    """One stochastic unraveling step of a channel on one wire."""
    if not 0 <= wire < state.num_qubits:
        raise IndexError(f"wire {wire} out of range for {state.num_qubits} qubits")
    ops = kraus_ops(channel, lam)
    amps = _sample_kraus_raw(state.amplitudes[None, :], ops, wire, state.num_qubits, rng)
    return QuantumState(state.num_qubits, amps[0])


def _run_trajectory_raw(
    spec: CircuitSpec,
    mats: list[np.ndarray],
    amps: np.ndarray,
    noise: NoiseConfig,
    channel_ops: dict[str, list[np.ndarray]],
    rng: np.random.Generator,
) -> np.ndarray:
    """Run the circuit with channel sampling at each stage boundary."""
    inject = noise.strength > 0.0 and bool(noise.channels)
    stage_idx = 0
    for i, (op, mat) in enumerate(zip(spec.ops, mats)):
        amps = apply_op_raw(amps, op, mat, spec.num_qubits)
        while stage_idx < len(spec.stages) and spec.stages[stage_idx][0] == i + 1:
            if inject:
                for wire in spec.stages[stage_idx][1]:
                    for name in noise.channels:
                        amps = _sample_kraus_raw(
                            amps, channel_ops[name], wire, spec.num_qubits, rng
                        )
            stage_idx += 1
    return amps


def noisy_expectation(
    spec: CircuitSpec,
    theta,
    state: QuantumState,
    noise: NoiseConfig,
    rng: np.random.Generator,
) -> float:
    """Trajectory-averaged, shot-sampled Z expectation at the measure wire.

    Each of ``noise.shots`` trajectories gets its own child generator derived
    from ``rng``, so the estimate is reproducible under a fixed seed and
    independent of evaluation order.
    """
    if state.num_qubits != spec.num_qubits:
        raise ShapeError(
            f"state has {state.num_qubits} qubits but circuit expects {spec.num_qubits}"
        )
    mats = materialize(spec, theta)
    channel_ops = {name: kraus_ops(name, noise.strength) for name in noise.channels}
    seeds = rng.integers(0, 2**63 - 1, size=noise.shots)
    total = 0
    base = state.amplitudes[None, :]
    for seed in seeds:
        child = np.random.default_rng(int(seed))
        amps = _run_trajectory_raw(spec, mats, base, noise, channel_ops, child)
        p1 = float(_prob_one_raw(amps, spec.measure_wire)[0])
        total += -1 if child.random() < p1 else 1
    return total / noise.shots


# ---------------------------------------------------------------------------
# Exact density-matrix oracle (small qubit counts only).
# ---------------------------------------------------------------------------

def _embed_1q(mat: np.ndarray, wire: int, num_qubits: int) -> np.ndarray:
    return np.kron(
        np.kron(np.eye(1 << wire), mat), np.eye(1 << (num_qubits - 1 - wire))
    ).astype(np.complex128)


def _embed_2q(mat: np.ndarray, wire_a: int, wire_b: int, num_qubits: int) -> np.ndarray:
    dim = 1 << num_qubits
    pa = num_qubits - 1 - wire_a
    pb = num_qubits - 1 - wire_b
    full = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        a_in = (col >> pa) & 1
        b_in = (col >> pb) & 1
        base = col & ~(1 << pa) & ~(1 << pb)
        for a_out in (0, 1):
            for b_out in (0, 1):
                row = base | (a_out << pa) | (b_out << pb)
                full[row, col] = mat[(a_out << 1) | b_out, (a_in << 1) | b_in]
    return full


def _embed_op(op, mat: np.ndarray, num_qubits: int) -> np.ndarray:
    if len(op.wires) == 1:
        return _embed_1q(mat, op.wires[0], num_qubits)
    return _embed_2q(mat, op.wires[0], op.wires[1], num_qubits)


def density_matrix_expectation(
    spec: CircuitSpec, theta, state: QuantumState, noise: NoiseConfig
) -> float:
    """Exact noisy Z expectation by full density-matrix evolution (n <= 6).

    Gates act as rho -> U rho U^dag and each channel as rho -> sum_k K rho
    K^dag, at the same stage boundaries the trajectory path uses.  This is the
    validation oracle for `noisy_expectation`.
    """
    if spec.num_qubits > DENSITY_MATRIX_MAX_QUBITS:
        raise CapacityError(
            f"density-matrix oracle supports at most {DENSITY_MATRIX_MAX_QUBITS} qubits, "
            f"got {spec.num_qubits}"
        )
    if state.num_qubits != spec.num_qubits:
        raise ShapeError(
            f"state has {state.num_qubits} qubits but circuit expects {spec.num_qubits}"
        )
    mats = materialize(spec, theta)
    channel_full = {
        name: kraus_ops(name, noise.strength) for name in noise.channels
    }
    inject = noise.strength > 0.0 and bool(noise.channels)
    rho = np.outer(state.amplitudes, state.amplitudes.conj())
    stage_idx = 0
    for i, (op, mat) in enumerate(zip(spec.ops, mats)):
        full = _embed_op(op, mat, spec.num_qubits)
        rho = full @ rho @ full.conj().T
        while stage_idx < len(spec.stages) and spec.stages[stage_idx][0] == i + 1:
            if inject:
                for wire in spec.stages[stage_idx][1]:
                    for name in noise.channels:
                        acc = np.zeros_like(rho)
                        for k in channel_full[name]:
                            kf = _embed_1q(k, wire, spec.num_qubits)
                            acc += kf @ rho @ kf.conj().T
                        rho = acc
            stage_idx += 1
    bit = 1 << (spec.num_qubits - 1 - spec.measure_wire)
    signs = np.array([1.0 if (i & bit) == 0 else -1.0 for i in range(rho.shape[0])])
    return float(np.sum(signs * np.diag(rho).real))
