"""Dense linear algebra for states and operators on up to three qubits.

Operators and density matrices are plain complex ``numpy`` arrays. Qubit 1 is
the data qubit and is the leftmost tensor factor; qubits 2 and 3 are the
ancillae. Every function here is pure.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

MAX_DIM = 8
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-12
NEGATIVE_EIG_TOL = 1e-10

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)


class UnsupportedSizeError(ValueError):
    """Raised when an operator would exceed three qubits."""


class InvalidStateError(ValueError):
    """Raised when an array violates the density-matrix invariants."""


def _n_qubits(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or 2**n != dim:
        raise UnsupportedSizeError(f"dimension {dim} is not a power of 2")
    return n


def n_qubits(op: np.ndarray) -> int:
    """Number of qubits an operator acts on."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise UnsupportedSizeError(f"expected a square matrix, got shape {op.shape}")
    if op.shape[0] > MAX_DIM:
        raise UnsupportedSizeError(f"dimension {op.shape[0]} exceeds {MAX_DIM}")
    return _n_qubits(op.shape[0])


def dagger(op: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(op))


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product ``a ⊗ b``; the result may not exceed 8×8."""
    n_qubits(a)
    n_qubits(b)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise UnsupportedSizeError(
            f"tensor product of dims {a.shape[0]} and {b.shape[0]} exceeds {MAX_DIM}"
        )
    return np.kron(a, b)


def kron(*ops: np.ndarray) -> np.ndarray:
    """Tensor product of several factors, left to right."""
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = tensor_product(out, op)
    return out


def is_hermitian(op: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(op - dagger(op)), initial=0.0) <= tol)


def is_unitary(op: np.ndarray, tol: float = 1e-12) -> bool:
    eye = np.eye(op.shape[0])
    return bool(np.linalg.norm(op @ dagger(op) - eye) <= tol)


def check_density_matrix(rho: np.ndarray, tol: float = TRACE_TOL) -> np.ndarray:
    """Validate ``rho`` and return it as a complex array.

    Raises:
        InvalidStateError: if ``rho`` is not Hermitian, not unit trace, or has an
            eigenvalue below ``-1e-10``.
    """
    rho = np.asarray(rho, dtype=complex)
    n_qubits(rho)
    if not is_hermitian(rho, tol):
        raise InvalidStateError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise InvalidStateError(f"density matrix has trace {tr.real:.15g}, expected 1")
    if np.linalg.eigvalsh(rho)[0] < -NEGATIVE_EIG_TOL:
        raise InvalidStateError("density matrix has a negative eigenvalue")
    return rho


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    m = np.asarray(m, dtype=complex)
    n_qubits(m)
    if not is_hermitian(m):
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigvalsh(m)


def entropy_of_spectrum(eigs: Iterable[float] | np.ndarray) -> float:
    """Shannon entropy in bits of a (near-)probability vector.

    Entries in ``[-1e-10, 0)`` are clamped to zero; more negative entries are an
    error.
    """
    p = np.asarray(eigs, dtype=float)
    if p.size and p.min() < -NEGATIVE_EIG_TOL:
        raise InvalidStateError(f"eigenvalue {p.min():.3e} below clamping threshold")
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """``-Tr(rho log2 rho)`` in bits."""
    return entropy_of_spectrum(hermitian_eigenvalues(rho))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the sum of absolute eigenvalues of ``rho - sigma``."""
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduce ``rho`` to the qubits in ``keep``.

    Qubits are numbered from 1 (the data qubit, leftmost factor). The kept
    qubits stay in ascending order.
    """
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits(rho)
    keep_set = set(keep)
    if not keep_set or not keep_set < set(range(1, n + 1)) or len(keep_set) != len(keep):
        raise ValueError(f"keep={list(keep)} is not a nonempty proper subset of 1..{n}")
    kept = sorted(q - 1 for q in keep_set)
    traced = [q for q in range(n) if q not in kept]
    t = rho.reshape([2] * (2 * n))
    # trace out from the highest axis down so indices stay valid
    for q in sorted(traced, reverse=True):
        n_cur = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=q + n_cur)
    d = 2 ** len(kept)
    return t.reshape(d, d)


def bloch_to_density(n: Sequence[float]) -> np.ndarray:
    """Single-qubit state ``(σ0 + n·σ)/2``."""
    n = np.asarray(n, dtype=float)
    if n.shape != (3,):
        raise ValueError("Bloch vector must have 3 components")
    if np.linalg.norm(n) > 1 + 1e-12:
        raise InvalidStateError(f"|n| = {np.linalg.norm(n):.15g} exceeds 1")
    return 0.5 * (SIGMA_0 + n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z)


def density_to_bloch(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("density_to_bloch needs a single-qubit state")
    return np.array([np.trace(rho @ s).real for s in PAULIS[1:]])


def projector(m: Sequence[float], sign: int = 1) -> np.ndarray:
    """Rank-1 projector ``(σ0 ± m·σ)/2`` onto ``|±m⟩``."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (SIGMA_0 + sign * (m[0] * SIGMA_X + m[1] * SIGMA_Y + m[2] * SIGMA_Z))


def maximally_mixed(k: int) -> np.ndarray:
    return np.eye(2**k, dtype=complex) / 2**k


def uniform_mixture_check(n2: Sequence[float], n2p: Sequence[float]) -> np.ndarray:
    """Equal mixture of the four product states ``|±n2, ±n2'⟩``.

    For any pair of unit vectors this equals ``σ0⊗σ0/4``, which is why a QEC
    scheme that works for every pure ancilla also works for the maximally mixed
    one.
    """
    for v in (n2, n2p):
        if abs(np.linalg.norm(v) - 1) > 1e-12:
            raise ValueError(f"expected a unit vector, got |n| = {np.linalg.norm(v):.15g}")
    out = np.zeros((4, 4), dtype=complex)
    for s, t in ((1, 1), (-1, -1), (-1, 1), (1, -1)):
        out += np.kron(projector(n2, s), projector(n2p, t))
    return out / 4


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_bloch_vector(rng: np.random.Generator, pure: bool | None = None) -> np.ndarray:
    """Uniform direction; radius 1 if pure, uniform in [0, 1] if mixed, else either."""
    if pure is None:
        pure = bool(rng.random() < 0.5)
    r = 1.0 if pure else rng.random()
    return r * random_unit_vector(rng)


def random_density_matrix(k: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random ``k``-qubit state from a Ginibre matrix (full rank unless ``rank`` set)."""
    d = 2**k
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ dagger(g)
    return rho / np.trace(rho)
