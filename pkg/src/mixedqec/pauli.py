"""Signed Pauli words and Pauli-basis expansions of small operators."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from mixedqec.core import PAULIS, kron, n_qubits

LETTERS = "IXYZ"
_MATRIX = dict(zip(LETTERS, PAULIS))

# single-qubit products: (a, b) -> (power of i, letter) with σa·σb = i^k σc
_TABLE: dict[tuple[str, str], tuple[int, str]] = {}
for _a in LETTERS:
    _TABLE["I", _a] = (0, _a)
    _TABLE[_a, "I"] = (0, _a)
    _TABLE[_a, _a] = (0, "I")
for _a, _b, _c in ("XYZ", "YZX", "ZXY"):
    _TABLE[_a, _b] = (1, _c)
    _TABLE[_b, _a] = (3, _c)

_PHASES = (1, 1j, -1, -1j)
_PHASE_LABEL = ("+", "+i", "-", "-i")


@dataclass(frozen=True)
class PauliString:
    """A Pauli word with a phase ``i**power`` (power in 0..3).

    >>> PauliString("YX", 2)
    PauliString('-YX')
    >>> PauliString.parse("YYY") * PauliString.parse("XXX")
    PauliString('+iZZZ')
    """

    letters: str
    power: int = 0

    def __post_init__(self) -> None:
        if not self.letters or any(c not in LETTERS for c in self.letters):
            raise ValueError(f"invalid Pauli word {self.letters!r}")
        object.__setattr__(self, "power", self.power % 4)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse ``'XXI'``, ``'-YX'``, ``'+iZZZ'`` or ``'-iZZZ'``."""
        for power, label in sorted(enumerate(_PHASE_LABEL), key=lambda t: -len(t[1])):
            if text.startswith(label):
                return cls(text[len(label):], power)
        return cls(text, 0)

    @property
    def phase(self) -> complex:
        return _PHASES[self.power]

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def is_hermitian(self) -> bool:
        return self.power in (0, 2)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_product(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.letters, self.power + 2)

    def __str__(self) -> str:
        return _PHASE_LABEL[self.power] + self.letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def matrix(self) -> np.ndarray:
        return pauli_string_matrix(self)


def pauli_product(a: PauliString, b: PauliString) -> PauliString:
    if a.n_qubits != b.n_qubits:
        raise ValueError("Pauli words must have equal length")
    power = a.power + b.power
    letters = []
    for x, y in zip(a.letters, b.letters):
        k, c = _TABLE[x, y]
        power += k
        letters.append(c)
    return PauliString("".join(letters), power)


def commutes(a: PauliString, b: PauliString) -> bool:
    anti = sum(x != "I" and y != "I" and x != y for x, y in zip(a.letters, b.letters))
    return anti % 2 == 0


@lru_cache(maxsize=None)
def _word_matrix(letters: str) -> np.ndarray:
    m = kron(*(_MATRIX[c] for c in letters))
    m.setflags(write=False)
    return m


def pauli_string_matrix(p: PauliString) -> np.ndarray:
    """Phase times the tensor product of the letters' matrices."""
    if p.n_qubits > 3:
        raise ValueError("at most 3 qubits supported")
    return p.phase * _word_matrix(p.letters)


def words(k: int) -> list[str]:
    """All ``4**k`` Pauli words of length ``k`` in lexicographic IXYZ order."""
    return ["".join(w) for w in itertools.product(LETTERS, repeat=k)]


@dataclass
class PauliExpansion:
    """Real coefficients of a Hermitian operator in the Pauli-word basis.

    ``coefficients[w]`` multiplies the (unnormalised) word matrix, so a
    ``k``-qubit density matrix has ``1/2**k`` on the identity word.
    """

    n_qubits: int
    coefficients: dict[str, float]

    def matrix(self) -> np.ndarray:
        d = 2**self.n_qubits
        out = np.zeros((d, d), dtype=complex)
        for w, c in self.coefficients.items():
            out += c * _word_matrix(w)
        return out

    def nonzero(self, tol: float = 1e-12) -> dict[str, float]:
        return {w: c for w, c in self.coefficients.items() if abs(c) > tol}

    def __getitem__(self, word: str) -> float:
        return self.coefficients.get(word, 0.0)


def pauli_expansion(m: np.ndarray, tol: float = 1e-12) -> PauliExpansion:
    """Coefficients ``Tr(m·P_w)/dim`` for every word ``w``.

    Raises ``ValueError`` if a coefficient has an imaginary part above ``tol``,
    i.e. if ``m`` is not Hermitian.
    """
    k = n_qubits(m)
    d = 2**k
    coeffs = {}
    for w in words(k):
        c = np.trace(m @ _word_matrix(w)) / d
        if abs(c.imag) > tol:
            raise ValueError(f"non-Hermitian input: coefficient of {w} is {c}")
        coeffs[w] = float(c.real)
    return PauliExpansion(k, coeffs)


def single_term(m: np.ndarray, tol: float = 1e-12) -> tuple[PauliString, float]:
    """Identify ``m`` as a single signed Pauli word.

    Returns the word (with its phase) and the Frobenius residual
    ``‖m - word‖``. Raises ``ValueError`` if no word has unit-modulus overlap.
    """
    k = n_qubits(m)
    d = 2**k
    for w in words(k):
        c = np.trace(_word_matrix(w) @ m) / d
        if abs(abs(c) - 1) <= 1e-9:
            power = int(round(np.angle(c) / (np.pi / 2))) % 4
            p = PauliString(w, power)
            return p, float(np.linalg.norm(m - pauli_string_matrix(p)))
    raise ValueError("operator is not a single Pauli word")


def exp_pauli_rotation(angle: float, p: PauliString) -> np.ndarray:
    """``exp(-i·angle·P) = cos(angle)·I - i·sin(angle)·P`` for Hermitian ``P``."""
    if not p.is_hermitian:
        raise ValueError(f"{p} is not Hermitian; phase must be ±1")
    mat = pauli_string_matrix(p)
    return np.cos(angle) * np.eye(mat.shape[0]) - 1j * np.sin(angle) * mat


# CNOT·P·CNOT for single-qubit factors on (control, target); other letters are fixed
_CNOT_IMAGE = {
    ("X", "I"): "XX",
    ("Y", "I"): "YX",
    ("Z", "I"): "ZI",
    ("I", "X"): "IX",
    ("I", "Y"): "ZY",
    ("I", "Z"): "ZZ",
}


def conjugate_by_cnot(p: PauliString, control: int, target: int) -> PauliString:
    """``CNOT·P·CNOT`` by exact Clifford propagation (qubits numbered from 1)."""
    c, t = control - 1, target - 1
    out = PauliString("I" * p.n_qubits, p.power)
    for q, letter in enumerate(p.letters):
        if letter == "I":
            continue
        factor = ["I"] * p.n_qubits
        if q in (c, t):
            key = (letter, "I") if q == c else ("I", letter)
            factor[c], factor[t] = _CNOT_IMAGE[key]
        else:
            factor[q] = letter
        out = out * PauliString("".join(factor))
    return out
