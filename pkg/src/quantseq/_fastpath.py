"""Numba-jitted single-statevector gate loops.

The numpy kernels amortize their dispatch overhead across frame batches, but
a lone 2**n vector pays ~15 microseconds per gate in pure numpy, which breaks
linear scaling at small n.  These loops keep per-call overhead near a
microsecond; `statevector` falls back to the numpy path when numba is absent
or when a batch is being processed.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def apply_1q(amps, gate, wire, num_qubits, out):
    post = 1 << (num_qubits - 1 - wire)
    g00 = gate[0, 0]
    g01 = gate[0, 1]
    g10 = gate[1, 0]
    g11 = gate[1, 1]
    dim = amps.shape[0]
    step = post << 1
    for base in range(0, dim, step):
        for j in range(base, base + post):
            a0 = amps[j]
            a1 = amps[j + post]
            out[j] = g00 * a0 + g01 * a1
            out[j + post] = g10 * a0 + g11 * a1


@numba.njit(cache=True)
def apply_2q(amps, gate, pos_a, pos_b, out):
    # pos_a / pos_b: LSB-relative bit positions; wire_a is the gate's high bit
    bit_a = 1 << pos_a
    bit_b = 1 << pos_b
    dim = amps.shape[0]
    for idx in range(dim):
        if idx & bit_a or idx & bit_b:
            continue
        i00 = idx
        i01 = idx | bit_b
        i10 = idx | bit_a
        i11 = i10 | bit_b
        a00 = amps[i00]
        a01 = amps[i01]
        a10 = amps[i10]
        a11 = amps[i11]
        out[i00] = gate[0, 0] * a00 + gate[0, 1] * a01 + gate[0, 2] * a10 + gate[0, 3] * a11
        out[i01] = gate[1, 0] * a00 + gate[1, 1] * a01 + gate[1, 2] * a10 + gate[1, 3] * a11
        out[i10] = gate[2, 0] * a00 + gate[2, 1] * a01 + gate[2, 2] * a10 + gate[2, 3] * a11
        out[i11] = gate[3, 0] * a00 + gate[3, 1] * a01 + gate[3, 2] * a10 + gate[3, 3] * a11


def warm_up() -> None:
    """Trigger JIT compilation so timing-sensitive callers pay it up front."""
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = 1.0
    out = np.empty_like(amps)
    apply_1q(amps, np.eye(2, dtype=np.complex128), 0, 2, out)
    apply_2q(amps, np.eye(4, dtype=np.complex128), 1, 0, out)
