import numpy as np
import pytest

from mixedqec.core import (
    SIGMA_0,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    bloch_to_density,
    dagger,
    maximally_mixed,
    partial_trace,
    random_bloch_vector,
    random_density_matrix,
    von_neumann_entropy,
)
from mixedqec.pauli import PauliString, exp_pauli_rotation, pauli_expansion
from mixedqec.qec import (
    ANCILLA_FACTORS,
    ErrorChannel,
    FactorizationError,
    apply_error_channel,
    cnot_unitary,
    codeword,
    conjugated_logical,
    derive_error_factor,
    encode,
    encoded_state_closed_form,
    encoder_unitary,
    logical_pauli,
    logical_rotation,
    recover,
    recovery_unitary,
    roundtrip,
    roundtrip_three_qubit,
    thermal_pseudo_pure_state,
)


def ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def flip_bits(bits: str, control: int, target: int) -> str:
    """Reference CNOT on a classical bit string (qubits from 1)."""
    b = list(bits)
    if b[control - 1] == "1":
        b[target - 1] = "0" if b[target - 1] == "1" else "1"
    return "".join(b)


PURE_00 = np.outer(ket("00"), ket("00"))


class TestCnot:
    def test_examples(self):
        np.testing.assert_array_equal(cnot_unitary(1, 2) @ ket("100"), ket("110"))
        np.testing.assert_array_equal(cnot_unitary(3, 1) @ ket("001"), ket("101"))
        np.testing.assert_array_equal(cnot_unitary(1, 2) @ cnot_unitary(1, 2), np.eye(8))

    @pytest.mark.parametrize("bits", [f"{i:03b}" for i in range(8)])
    def test_against_bit_flips(self, bits):
        for c, t in ((1, 2), (3, 1), (2, 3)):
            np.testing.assert_array_equal(cnot_unitary(c, t) @ ket(bits), ket(flip_bits(bits, c, t)))

    @pytest.mark.parametrize("c,t", [(1, 1), (0, 2), (1, 4)])
    def test_bad_indices(self, c, t):
        with pytest.raises(ValueError):
            cnot_unitary(c, t)


class TestEncoder:
    def test_unitary_and_inverse(self):
        u_e, u_r = encoder_unitary(), recovery_unitary()
        np.testing.assert_allclose(u_e @ dagger(u_e), np.eye(8), atol=1e-12)
        np.testing.assert_array_equal(u_r @ u_e, np.eye(8))

    def test_basis_state_propagation(self):
        # |100> -> CNOT(1→2) -> |110> -> CNOT(3→1) does nothing since qubit 3 is 0
        expected = flip_bits(flip_bits("100", 1, 2), 3, 1)
        assert expected == "110"
        np.testing.assert_array_equal(encoder_unitary() @ ket("100"), ket(expected))

    def test_x3_conjugation(self):
        xs = PauliString("ZZZ").matrix()
        u = encoder_unitary()
        np.testing.assert_array_equal(dagger(u) @ xs @ u, np.kron(SIGMA_0, np.kron(SIGMA_Z, SIGMA_0)))

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_factor_table(self, i):
        f = derive_error_factor(i)
        assert f.factor == ANCILLA_FACTORS[i]
        assert f.residual < 1e-12

    def test_factor_values(self):
        assert str(derive_error_factor(1).factor) == "+XX"
        assert str(derive_error_factor(2).factor) == "-YX"
        assert str(derive_error_factor(3).factor) == "+ZI"

    def test_wrong_encoder_fails(self):
        # a single CNOT(1→2) leaves X_1 touching the data qubit
        with pytest.raises(FactorizationError):
            derive_error_factor(1, cnot_unitary(1, 2))

    def test_bad_index(self):
        with pytest.raises(ValueError):
            derive_error_factor(0)


class TestEncode:
    def test_closed_form_expansion(self):
        n = np.array([0.1, -0.7, 0.4])
        e = pauli_expansion(codeword(n))
        closed = encoded_state_closed_form(n)
        for w in e.coefficients:
            assert e[w] == pytest.approx(closed[w], abs=1e-12)

    def test_maximally_mixed_fixed(self):
        np.testing.assert_allclose(encode(SIGMA_0 / 2, maximally_mixed(2)), np.eye(8) / 8, atol=1e-15)

    def test_basis_state(self):
        out = encode(bloch_to_density([0, 0, -1]), PURE_00)
        np.testing.assert_array_equal(out, np.outer(ket("110"), ket("110")))

    def test_entropy_preserved(self, rng):
        rho1, rho2 = random_density_matrix(1, rng), random_density_matrix(2, rng)
        s = von_neumann_entropy(encode(rho1, rho2))
        assert s == pytest.approx(von_neumann_entropy(rho1) + von_neumann_entropy(rho2), abs=1e-10)

    def test_rejects_invalid_state(self):
        with pytest.raises(ValueError):
            encode(np.diag([1.0, 1.0]), maximally_mixed(2))


class TestChannel:
    def test_identity_channel(self, rng):
        rho = codeword(random_bloch_vector(rng))
        np.testing.assert_allclose(apply_error_channel(rho, ErrorChannel((1, 0, 0, 0))), rho)

    def test_unital(self):
        out = apply_error_channel(np.eye(8) / 8, ErrorChannel((0, 1, 0, 0)))
        np.testing.assert_allclose(out, np.eye(8) / 8)

    def test_yyy_on_codeword(self):
        # XXI, YXZ and ZIZ each anticommute with YYY on exactly two qubits,
        # so every sign is +1 and the codeword is unchanged
        n = (0.3, 0.4, -0.5)
        out = pauli_expansion(apply_error_channel(codeword(n), ErrorChannel((0, 0, 1, 0))))
        assert out["XXI"] == pytest.approx(+n[0] / 8)
        assert out["YXZ"] == pytest.approx(+n[1] / 8)
        assert out["ZIZ"] == pytest.approx(+n[2] / 8)

    @pytest.mark.parametrize(
        "p", [(0.5, 0.5, 0.1, -0.1), (0.5, 0.5, 0, 0.001), (1, 0, 0), (0.25, 0.25, 0.25, 0.25 + 1e-9)]
    )
    def test_validation(self, p):
        with pytest.raises(ValueError):
            ErrorChannel(p)

    def test_trace_preserved(self, rng):
        rho = random_density_matrix(3, rng)
        out = apply_error_channel(rho, ErrorChannel.random(rng))
        assert np.trace(out).real == pytest.approx(1, abs=1e-12)


class TestRecover:
    def test_noiseless_roundtrip(self, rng):
        rho1, rho2 = random_density_matrix(1, rng), random_density_matrix(2, rng)
        data, anc = recover(encode(rho1, rho2))
        np.testing.assert_allclose(data, rho1, atol=1e-14)
        np.testing.assert_allclose(anc, rho2, atol=1e-14)

    def test_x1_error(self, rng):
        rho1, rho2 = random_density_matrix(1, rng), random_density_matrix(2, rng)
        data, anc = recover(apply_error_channel(encode(rho1, rho2), ErrorChannel((0, 1, 0, 0))))
        m1 = np.kron(SIGMA_X, SIGMA_X)
        np.testing.assert_allclose(data, rho1, atol=1e-14)
        np.testing.assert_allclose(anc, m1 @ rho2 @ m1, atol=1e-14)

    def test_fixed_point(self, rng):
        for _ in range(20):
            rho1 = bloch_to_density(random_bloch_vector(rng))
            data, anc = recover(apply_error_channel(encode(rho1, maximally_mixed(2)), ErrorChannel.random(rng)))
            np.testing.assert_allclose(data, rho1, atol=1e-12)
            np.testing.assert_allclose(anc, maximally_mixed(2), atol=1e-12)


class TestRoundtrip:
    def test_random(self, rng):
        for _ in range(50):
            rho1 = bloch_to_density(random_bloch_vector(rng))
            rho2 = random_density_matrix(2, rng)
            rep = roundtrip(rho1, rho2, ErrorChannel.random(rng))
            assert rep.trace_distance <= 1e-10
            assert rep.ancilla_error <= 1e-10

    def test_z_error_on_pure_ancilla(self, rng):
        rho1 = bloch_to_density(random_bloch_vector(rng))
        rep = roundtrip(rho1, PURE_00, ErrorChannel((0, 0, 0, 1)))
        np.testing.assert_allclose(rep.ancilla, PURE_00, atol=1e-14)

    def test_y_error_on_pure_ancilla(self):
        # M_2 = -σy⊗σx sends |00> to -(i|1>)|1>, so the residue is |11><11|
        rep = roundtrip(bloch_to_density([1, 0, 0]), PURE_00, ErrorChannel((0, 0, 1, 0)))
        np.testing.assert_allclose(rep.ancilla, np.outer(ket("11"), ket("11")), atol=1e-14)

    def test_uniform_fixed_point(self):
        rep = roundtrip(SIGMA_0 / 2, maximally_mixed(2), ErrorChannel.uniform())
        np.testing.assert_allclose(rep.recovered, SIGMA_0 / 2, atol=1e-15)
        np.testing.assert_allclose(rep.ancilla, maximally_mixed(2), atol=1e-15)


class TestClosedForm:
    def test_x_axis(self):
        assert encoded_state_closed_form([1, 0, 0]).nonzero() == {"III": 1 / 8, "XXI": 1 / 8}

    def test_origin(self):
        assert encoded_state_closed_form([0, 0, 0]).nonzero() == {"III": 1 / 8}

    def test_random(self, rng):
        for _ in range(100):
            n = random_bloch_vector(rng)
            np.testing.assert_allclose(encoded_state_closed_form(n).matrix(), codeword(n), atol=1e-12)


class TestLogical:
    @pytest.mark.parametrize("axis,word", [("x", "XXI"), ("y", "YXZ"), ("z", "ZIZ")])
    def test_words(self, axis, word):
        gate = logical_pauli(axis)
        assert gate.physical == PauliString(word)
        np.testing.assert_allclose(conjugated_logical(gate.logical), gate.physical.matrix(), atol=1e-12)

    def test_su2(self):
        lx, ly, lz = (logical_pauli(a).physical.matrix() for a in "xyz")
        np.testing.assert_allclose(lx @ ly - ly @ lx, 2j * lz, atol=1e-12)
        np.testing.assert_allclose(ly @ lz - lz @ ly, 2j * lx, atol=1e-12)
        np.testing.assert_allclose(lz @ lx - lx @ lz, 2j * ly, atol=1e-12)
        for m in (lx, ly, lz):
            np.testing.assert_allclose(m @ m, np.eye(8), atol=1e-12)

    @pytest.mark.parametrize("axis,single", [("x", SIGMA_X), ("y", SIGMA_Y), ("z", SIGMA_Z)])
    def test_rotation_matches_conjugated(self, rng, axis, single):
        from scipy.linalg import expm

        for angle in rng.uniform(-np.pi, np.pi, 5):
            expected = conjugated_logical(expm(-1j * angle * single))
            np.testing.assert_allclose(logical_rotation(axis, angle), expected, atol=1e-12)

    def test_y_rotation_identity(self, rng):
        lz = PauliString("ZIZ")
        for beta in rng.uniform(-np.pi, np.pi, 5):
            rhs = (
                exp_pauli_rotation(np.pi / 4, lz)
                @ logical_rotation("x", beta)
                @ exp_pauli_rotation(-np.pi / 4, lz)
            )
            np.testing.assert_allclose(logical_rotation("y", beta), rhs, atol=1e-12)

    def test_z_zero(self):
        np.testing.assert_allclose(logical_rotation("z", 0.0), np.eye(8))

    def test_composition(self, rng):
        for axis in "xyz":
            a, b = rng.uniform(-np.pi, np.pi, 2)
            np.testing.assert_allclose(
                logical_rotation(axis, a) @ logical_rotation(axis, b),
                logical_rotation(axis, a + b),
                atol=1e-12,
            )


class TestThermalState:
    def test_zero(self):
        np.testing.assert_allclose(thermal_pseudo_pure_state(0), np.eye(8) / 8)

    def test_coefficients(self):
        eps = 1e-6
        e = pauli_expansion(thermal_pseudo_pure_state(eps))
        assert e.nonzero(tol=1e-15) == pytest.approx(
            {"III": 1 / 8, "ZII": eps / 8, "IZI": eps / 8, "IIZ": eps / 8}, rel=1e-9
        )

    def test_data_qubit_survives_any_channel(self, rng):
        rho = thermal_pseudo_pure_state(0.1)
        before = partial_trace(rho, [1])
        for _ in range(10):
            after = partial_trace(roundtrip_three_qubit(rho, ErrorChannel.random(rng)), [1])
            np.testing.assert_allclose(after, before, atol=1e-14)

    @pytest.mark.parametrize("eps", [-0.1, 1.5])
    def test_range(self, eps):
        with pytest.raises(ValueError):
            thermal_pseudo_pure_state(eps)
