"""Three-qubit encoder, fully correlated error channel, recovery and logical gates.

The encoder is ``U_E = CNOT(3→1) · CNOT(1→2)``: CNOT with control 1 and target 2
acts first. Under this encoder every fully correlated Pauli error
``σ^{⊗3}`` is mapped by ``U_E† · U_E`` onto ``σ0 ⊗ M_i``, an operator that
leaves the data qubit alone, so decoding restores the data qubit for any
ancilla state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from mixedqec.core import (
    SIGMA_0,
    PAULIS,
    bloch_to_density,
    check_density_matrix,
    dagger,
    kron,
    maximally_mixed,
    partial_trace,
    trace_distance,
)
from mixedqec.pauli import (
    PauliExpansion,
    PauliString,
    exp_pauli_rotation,
    pauli_string_matrix,
    single_term,
)

Axis = Literal["x", "y", "z"]

ERROR_WORDS = ("III", "XXX", "YYY", "ZZZ")
ERROR_OPERATORS = tuple(pauli_string_matrix(PauliString(w)) for w in ERROR_WORDS)

#: Expected ancilla factors ``M_i`` with ``U_E† X_i U_E = σ0 ⊗ M_i``.
ANCILLA_FACTORS = (
    PauliString("II"),
    PauliString("XX"),
    -PauliString("YX"),
    PauliString("ZI"),
)

LOGICAL_WORDS = {"x": PauliString("XXI"), "y": PauliString("YXZ"), "z": PauliString("ZIZ")}

CHANNEL_SUM_TOL = 1e-12


class FactorizationError(RuntimeError):
    """``U_E† X_i U_E`` does not act trivially on the data qubit."""


@dataclass(frozen=True)
class ErrorChannel:
    """Probabilities ``(p0, p1, p2, p3)`` of the errors ``I, XXX, YYY, ZZZ``."""

    p: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        p = tuple(float(x) for x in self.p)
        if len(p) != 4:
            raise ValueError(f"expected 4 probabilities, got {len(p)}")
        if min(p) < 0:
            raise ValueError(f"negative probability in {p}")
        if abs(sum(p) - 1) > CHANNEL_SUM_TOL:
            raise ValueError(f"probabilities sum to {sum(p):.15g}, expected 1")
        object.__setattr__(self, "p", p)

    @classmethod
    def uniform(cls) -> "ErrorChannel":
        return cls((0.25, 0.25, 0.25, 0.25))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "ErrorChannel":
        p = rng.dirichlet(np.ones(4))
        p[-1] = 1.0 - p[:-1].sum()
        return cls(tuple(np.clip(p, 0, None)))


@dataclass
class EncoderFactorization:
    index: int
    factor: PauliString
    residual: float


@dataclass
class LogicalGate:
    axis: str
    logical: np.ndarray
    physical: PauliString


@dataclass
class RoundtripReport:
    recovered: np.ndarray
    ancilla: np.ndarray
    expected_ancilla: np.ndarray
    trace_distance: float
    ancilla_error: float
    channel: ErrorChannel = field(repr=False)


def cnot_unitary(control: int, target: int, n_qubits: int = 3) -> np.ndarray:
    """Permutation matrix flipping ``target`` when ``control`` is 1 (qubits from 1)."""
    if control == target:
        raise ValueError("control and target must differ")
    for q in (control, target):
        if not 1 <= q <= n_qubits:
            raise ValueError(f"qubit index {q} outside 1..{n_qubits}")
    d = 2**n_qubits
    u = np.zeros((d, d), dtype=complex)
    for col in range(d):
        bits = [(col >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
        if bits[control - 1]:
            bits[target - 1] ^= 1
        row = int("".join(map(str, bits)), 2)
        u[row, col] = 1
    return u


def encoder_unitary(flip_cnots: bool = False) -> np.ndarray:
    """``U_E = CNOT(3→1)·CNOT(1→2)``.

    ``flip_cnots`` swaps control and target of both gates; it exists only to
    exercise the factorization check and does not give a working code.
    """
    if flip_cnots:
        return cnot_unitary(1, 3) @ cnot_unitary(2, 1)
    return cnot_unitary(3, 1) @ cnot_unitary(1, 2)


def recovery_unitary(flip_cnots: bool = False) -> np.ndarray:
    return dagger(encoder_unitary(flip_cnots))


def encode(rho1: np.ndarray, rho2: np.ndarray, encoder: np.ndarray | None = None) -> np.ndarray:
    """Codeword ``U_E (rho1 ⊗ rho2) U_E†``."""
    rho1 = check_density_matrix(rho1)
    rho2 = check_density_matrix(rho2)
    if rho1.shape != (2, 2) or rho2.shape != (4, 4):
        raise ValueError("encode expects a 1-qubit data state and a 2-qubit ancilla state")
    u = encoder_unitary() if encoder is None else encoder
    return u @ np.kron(rho1, rho2) @ dagger(u)


def apply_error_channel(rho3: np.ndarray, ch: ErrorChannel) -> np.ndarray:
    """``Σ p_i X_i ρ X_i†`` over the fully correlated Pauli errors."""
    out = np.zeros((8, 8), dtype=complex)
    for p, x in zip(ch.p, ERROR_OPERATORS):
        if p:
            out += p * (x @ rho3 @ dagger(x))
    return out


def recover(rho3p: np.ndarray, recovery: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Apply ``U_R`` and split into (data qubit, ancilla pair) marginals."""
    u = recovery_unitary() if recovery is None else recovery
    decoded = u @ rho3p @ dagger(u)
    return partial_trace(decoded, [1]), partial_trace(decoded, [2, 3])


def ancilla_residue(rho2: np.ndarray, ch: ErrorChannel) -> np.ndarray:
    """``ρ2' = Σ p_i M_i ρ2 M_i†``, the only thing the channel changes."""
    out = np.zeros((4, 4), dtype=complex)
    for p, m in zip(ch.p, ANCILLA_FACTORS):
        mm = pauli_string_matrix(m)
        out += p * (mm @ rho2 @ dagger(mm))
    return out


def roundtrip(rho1: np.ndarray, rho2: np.ndarray, ch: ErrorChannel) -> RoundtripReport:
    recovered, ancilla = recover(apply_error_channel(encode(rho1, rho2), ch))
    expected = ancilla_residue(rho2, ch)
    return RoundtripReport(
        recovered=recovered,
        ancilla=ancilla,
        expected_ancilla=expected,
        trace_distance=trace_distance(recovered, rho1),
        ancilla_error=float(np.max(np.abs(ancilla - expected))),
        channel=ch,
    )


def derive_error_factor(i: int, encoder: np.ndarray | None = None) -> EncoderFactorization:
    """Compute ``U_E† X_i U_E`` and read it off as ``σ0 ⊗ M_i``.

    Raises:
        FactorizationError: if the conjugated error touches the data qubit.
    """
    if i not in (1, 2, 3):
        raise ValueError("error index must be 1, 2 or 3")
    u = encoder_unitary() if encoder is None else encoder
    conj = dagger(u) @ ERROR_OPERATORS[i] @ u
    word, _ = single_term(conj)
    if word.letters[0] != "I":
        raise FactorizationError(f"U_E† X_{i} U_E = {word}, which acts on the data qubit")
    factor = PauliString(word.letters[1:], word.power)
    residual = float(np.linalg.norm(conj - kron(SIGMA_0, pauli_string_matrix(factor))))
    if residual > 1e-12:
        raise FactorizationError(f"factorization residual {residual:.3e} for X_{i}")
    return EncoderFactorization(i, factor, residual)


def encoded_state_closed_form(n) -> PauliExpansion:
    """Pauli expansion of the codeword for maximally mixed ancillae.

    ``(III + n_x XXI + n_y YXZ + n_z ZIZ) / 8``
    """
    n = np.asarray(n, dtype=float)
    if np.linalg.norm(n) > 1 + 1e-12:
        raise ValueError("|n| exceeds 1")
    coeffs = {"III": 1 / 8}
    for word, c in zip(("XXI", "YXZ", "ZIZ"), n):
        if c != 0:
            coeffs[word] = float(c) / 8
    return PauliExpansion(3, coeffs)


def codeword(n) -> np.ndarray:
    """Encoded state of Bloch vector ``n`` with maximally mixed ancillae."""
    return encode(bloch_to_density(n), maximally_mixed(2))


def logical_pauli(axis: Axis) -> LogicalGate:
    """Physical Pauli word implementing ``σ_axis`` on the encoded data qubit."""
    idx = "xyz".index(axis)
    return LogicalGate(axis, PAULIS[idx + 1], LOGICAL_WORDS[axis])


def logical_rotation(axis: Axis, angle: float) -> np.ndarray:
    """Physical unitary for the logical rotation ``exp(-i·angle·σ_axis)``."""
    return exp_pauli_rotation(angle, LOGICAL_WORDS[axis])


def conjugated_logical(v: np.ndarray, encoder: np.ndarray | None = None) -> np.ndarray:
    """``U_E (V ⊗ σ0 ⊗ σ0) U_E†`` computed by brute-force matrix products."""
    u = encoder_unitary() if encoder is None else encoder
    return u @ kron(v, SIGMA_0, SIGMA_0) @ dagger(u)


def thermal_pseudo_pure_state(epsilon: float) -> np.ndarray:
    """High-temperature NMR state ``σ0^{⊗3}/8 + (ε/8)(ZII + IZI + IIZ)``."""
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    dev = sum(pauli_string_matrix(PauliString(w)) for w in ("ZII", "IZI", "IIZ"))
    return maximally_mixed(3) + epsilon / 8 * dev


def roundtrip_three_qubit(rho3: np.ndarray, ch: ErrorChannel) -> np.ndarray:
    """Encode, apply ``ch`` and decode a full three-qubit input state."""
    u = encoder_unitary()
    return dagger(u) @ apply_error_channel(u @ rho3 @ dagger(u), ch) @ u
