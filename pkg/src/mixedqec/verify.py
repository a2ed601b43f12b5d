"""Invariant suite behind ``mixedqec verify``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mixedqec.core import (
    bloch_to_density,
    dagger,
    maximally_mixed,
    random_bloch_vector,
    random_density_matrix,
    random_unit_vector,
    uniform_mixture_check,
)
from mixedqec.pauli import PauliString, conjugate_by_cnot, exp_pauli_rotation, pauli_expansion
from mixedqec.qec import (
    ANCILLA_FACTORS,
    ERROR_WORDS,
    ErrorChannel,
    FactorizationError,
    apply_error_channel,
    conjugated_logical,
    derive_error_factor,
    encode,
    encoded_state_closed_form,
    encoder_unitary,
    logical_pauli,
    logical_rotation,
    recovery_unitary,
    roundtrip,
)


@dataclass
class Check:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    details: dict = field(default_factory=dict)


def encoder_pauli_images(flip_cnots: bool = False) -> list[PauliString]:
    """``U_E† X_i U_E`` for i = 1..3 by Clifford propagation (no matrices)."""
    # U_E† P U_E: conjugate by the later gate first
    gates = [(1, 3), (2, 1)] if flip_cnots else [(3, 1), (1, 2)]
    images = []
    for w in ERROR_WORDS[1:]:
        p = PauliString(w)
        for c, t in gates:
            p = conjugate_by_cnot(p, c, t)
        images.append(p)
    return images


def check_factorization(flip_cnots: bool = False) -> Check:
    details: dict = {"factors": {}, "pauli_images": {}}
    passed = True
    max_err = 0.0
    for i, image in enumerate(encoder_pauli_images(flip_cnots), start=1):
        details["pauli_images"][f"X_{i}"] = str(image)
        expected = PauliString("I" + ANCILLA_FACTORS[i].letters, ANCILLA_FACTORS[i].power)
        passed &= image == expected
    encoder = encoder_unitary(flip_cnots)
    for i in (1, 2, 3):
        try:
            f = derive_error_factor(i, encoder)
        except FactorizationError as exc:
            details["factors"][f"M_{i}"] = f"error: {exc}"
            passed = False
            max_err = max(max_err, 2.0)
            continue
        details["factors"][f"M_{i}"] = str(f.factor)
        passed &= f.factor == ANCILLA_FACTORS[i]
        max_err = max(max_err, f.residual)
    return Check("encoder_factorization", bool(passed and max_err <= 1e-12), max_err, 1e-12, details)


def check_roundtrips(rng: np.random.Generator, samples: int = 200) -> Check:
    worst_td = worst_anc = 0.0
    for _ in range(samples):
        rho1 = bloch_to_density(random_bloch_vector(rng))
        rho2 = random_density_matrix(2, rng)
        rep = roundtrip(rho1, rho2, ErrorChannel.random(rng))
        worst_td = max(worst_td, rep.trace_distance)
        worst_anc = max(worst_anc, rep.ancilla_error)
    err = max(worst_td, worst_anc)
    return Check(
        "qec_roundtrip",
        err <= 1e-10,
        err,
        1e-10,
        {"samples": samples, "max_trace_distance": worst_td, "max_ancilla_error": worst_anc},
    )


def check_fixed_point(rng: np.random.Generator, samples: int = 50) -> Check:
    u_e, u_r = encoder_unitary(), recovery_unitary()
    worst = 0.0
    for _ in range(samples):
        rho1 = bloch_to_density(random_bloch_vector(rng))
        start = np.kron(rho1, maximally_mixed(2))
        out = u_r @ apply_error_channel(u_e @ start @ dagger(u_e), ErrorChannel.random(rng)) @ dagger(u_r)
        worst = max(worst, float(np.max(np.abs(out - start))))
    return Check("fixed_point", worst <= 1e-12, worst, 1e-12, {"samples": samples})


def check_uniform_mixture(rng: np.random.Generator, samples: int = 100) -> Check:
    target = maximally_mixed(2)
    worst = max(
        float(np.max(np.abs(uniform_mixture_check(random_unit_vector(rng), random_unit_vector(rng)) - target)))
        for _ in range(samples)
    )
    return Check("uniform_mixture_decomposition", worst <= 1e-12, worst, 1e-12, {"samples": samples})


def check_encoded_state(rng: np.random.Generator, samples: int = 100) -> Check:
    worst = 0.0
    min_terms = 64
    for _ in range(samples):
        n = random_bloch_vector(rng)
        numeric = pauli_expansion(encode(bloch_to_density(n), maximally_mixed(2)))
        closed = encoded_state_closed_form(n)
        worst = max(worst, max(abs(numeric[w] - closed[w]) for w in numeric.coefficients))
        min_terms = min(min_terms, len(numeric.nonzero()))
    passed = worst <= 1e-12 and min_terms == 4
    return Check("encoded_state_expansion", passed, worst, 1e-12, {"samples": samples, "nonzero_terms": min_terms})


def check_logical_algebra(rng: np.random.Generator, samples: int = 20) -> Check:
    gates = {a: logical_pauli(a) for a in "xyz"}
    mats = {a: g.physical.matrix() for a, g in gates.items()}
    worst = 0.0
    for a, b, c in ("xyz", "yzx", "zxy"):
        worst = max(worst, float(np.max(np.abs(mats[a] @ mats[b] - mats[b] @ mats[a] - 2j * mats[c]))))
    for a, g in gates.items():
        worst = max(worst, float(np.max(np.abs(mats[a] @ mats[a] - np.eye(8)))))
        worst = max(worst, float(np.max(np.abs(conjugated_logical(g.logical) - mats[a]))))
        for angle in rng.uniform(-np.pi, np.pi, samples):
            single = exp_pauli_rotation(angle, PauliString(a.upper()))
            worst = max(worst, float(np.max(np.abs(logical_rotation(a, angle) - conjugated_logical(single)))))
    details = {f"L_{a}": str(g.physical) for a, g in gates.items()}
    return Check("logical_gate_algebra", worst <= 1e-12, worst, 1e-12, details)


def run_verification(seed: int = 0, samples: int = 200, flip_cnots: bool = False) -> list[Check]:
    rng = np.random.default_rng(seed)
    return [
        check_factorization(flip_cnots),
        check_roundtrips(rng, samples),
        check_fixed_point(rng),
        check_uniform_mixture(rng),
        check_encoded_state(rng),
        check_logical_algebra(rng),
    ]

