"""Parametrized gate constructors.

Every constructor returns a dense complex unitary matrix (2x2 for one qubit,
4x4 for two).  Two-qubit matrices are indexed with the first wire as the
high-order bit, matching `statevector.apply_2q`.
"""

import math
from functools import lru_cache

import numpy as np

from .errors import ParameterError, ShapeError


def _check_finite(*angles: float) -> None:
    for a in angles:
        if not math.isfinite(a):
            raise ParameterError(f"gate angle must be finite, got {a!r}")


def u3(theta: float, phi: float, delta: float) -> np.ndarray:
    """General single-qubit rotation with polar, azimuthal, and phase angles.

    Equals exp(i*(phi+delta)/2) * RZ(phi) * RY(theta) * RZ(delta), so each
    angle sits in a single Pauli-generated rotation (the global phase cancels
    in any expectation value).
    """
    _check_finite(theta, phi, delta)
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array(
        [
            [c, -np.exp(1j * delta) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + delta)) * c],
        ],
        dtype=np.complex128,
    )


def ising_xx(phi: float) -> np.ndarray:
    """Two-qubit coupling exp(-i*(phi/2) * X (x) X)."""
    _check_finite(phi)
    c = math.cos(phi / 2.0)
    s = -1j * math.sin(phi / 2.0)
    return np.array(
        [[c, 0, 0, s], [0, c, s, 0], [0, s, c, 0], [s, 0, 0, c]],
        dtype=np.complex128,
    )


def ising_yy(phi: float) -> np.ndarray:
    """Two-qubit coupling exp(-i*(phi/2) * Y (x) Y).

    Note the corner entries carry +i*sin(phi/2): Y (x) Y has -1 at the
    anti-diagonal corners, which flips the sign relative to the XX coupling.
    """
    _check_finite(phi)
    c = math.cos(phi / 2.0)
    s = 1j * math.sin(phi / 2.0)
    return np.array(
        [[c, 0, 0, s], [0, c, -s, 0], [0, -s, c, 0], [s, 0, 0, c]],
        dtype=np.complex128,
    )


def ising_zz(phi: float) -> np.ndarray:
    """Two-qubit coupling exp(-i*(phi/2) * Z (x) Z): a diagonal phase gate."""
    _check_finite(phi)
    lo = np.exp(-0.5j * phi)
    hi = np.exp(0.5j * phi)
    return np.diag([lo, hi, hi, lo]).astype(np.complex128)


def cnot() -> np.ndarray:
    """Controlled-NOT; first wire controls, second is the target."""
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=np.complex128,
    )


@lru_cache(maxsize=None)
def gell_mann_basis(dim: int) -> tuple[np.ndarray, ...]:
    """Generalized Gell-Mann basis: dim**2 - 1 traceless Hermitian matrices.

    Ordering (documented and frozen): all symmetric off-diagonal generators
    E_jk + E_kj for j < k in row-major order, then the antisymmetric ones
    -i*(E_jk - E_kj) in the same order, then the dim-1 diagonal generators
    sqrt(2/(l*(l+1))) * (sum_{j<=l} E_jj - l*E_{l+1,l+1}).
    """
    sym = []
    asym = []
    for j in range(dim):
        for k in range(j + 1, dim):
            m = np.zeros((dim, dim), dtype=np.complex128)
            m[j, k] = 1.0
            m[k, j] = 1.0
            sym.append(m)
            m = np.zeros((dim, dim), dtype=np.complex128)
            m[j, k] = -1j
            m[k, j] = 1j
            asym.append(m)
    diag = []
    for l in range(1, dim):
        m = np.zeros((dim, dim), dtype=np.complex128)
        coeff = math.sqrt(2.0 / (l * (l + 1)))
        for j in range(l):
            m[j, j] = coeff
        m[l, l] = -l * coeff
        diag.append(m)
    return tuple(sym + asym + diag)


def arbitrary_unitary(params: np.ndarray, num_qubits: int) -> np.ndarray:
    """Fully general parametrized unitary on 1 or 2 qubits.

    Computes exp(-i * sum_j params[j] * G_j) over the generalized Gell-Mann
    basis, so the result is unitary for any real parameter values.  Requires
    exactly 4**num_qubits - 1 parameters (3 for one qubit, 15 for two).  The
    exponential is taken by eigendecomposition of the Hermitian generator,
    which is exact for these sizes.
    """
    if num_qubits not in (1, 2):
        raise ParameterError(f"arbitrary unitary supports 1 or 2 qubits, got {num_qubits}")
    params = np.asarray(params, dtype=np.float64).reshape(-1)
    expected = 4**num_qubits - 1
    if params.shape[0] != expected:
        raise ShapeError(
            f"{num_qubits}-qubit arbitrary unitary needs {expected} parameters, "
            f"got {params.shape[0]}"
        )
    if not np.all(np.isfinite(params)):
        raise ParameterError("arbitrary unitary parameters must be finite")
    dim = 1 << num_qubits
    basis = gell_mann_basis(dim)
    herm = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, gen in zip(params, basis):
        herm += coeff * gen
    eigvals, eigvecs = np.linalg.eigh(herm)
    return (eigvecs * np.exp(-1j * eigvals)) @ eigvecs.conj().T
