import numpy as np
import pytest

from mixedqec.core import (
    PAULIS,
    SIGMA_X,
    SIGMA_Z,
    bloch_to_density,
    density_to_bloch,
    random_density_matrix,
    random_unit_vector,
)
from mixedqec.qec import ErrorChannel, cnot_unitary
from mixedqec.tomography import (
    CHANNELS,
    HARDWARE_REFERENCE,
    NoiseModel,
    SingularDesignError,
    apply_kraus,
    apply_ptm,
    chi_to_kraus,
    chi_to_ptm,
    depolarize_pair,
    entanglement_fidelity,
    map_trace,
    noisy_cnot,
    prepare_input_states,
    process_ptm,
    ptm_to_chi,
    reconstruct_ptm,
    run_pipeline,
    sphere_mapping,
    tomography_experiment,
)


def ptm_of(channel) -> np.ndarray:
    """Reference PTM computed straight from the definition on the Pauli basis."""
    return np.array([[np.trace(si @ channel(sj)).real / 2 for sj in PAULIS] for si in PAULIS])


def depolarizing(p):
    return lambda rho: (1 - p) * rho + p * np.trace(rho) * np.eye(2) / 2


class TestInputs:
    def test_states(self):
        states = prepare_input_states()
        assert len(states) == 4
        np.testing.assert_allclose(states[0], np.diag([1, 0]))
        np.testing.assert_allclose(states[1], np.diag([0, 1]))

    def test_informationally_complete(self):
        a = np.array([[np.trace(s @ rho).real for rho in prepare_input_states()] for s in PAULIS])
        assert np.linalg.matrix_rank(a) == 4


class TestPipeline:
    @pytest.mark.parametrize("label", "abc")
    def test_noiseless_identity(self, rng, label):
        rho1 = random_density_matrix(1, rng)
        np.testing.assert_allclose(run_pipeline(rho1, CHANNELS[label]), rho1, atol=1e-14)

    def test_depolarizing_shrinks(self):
        rho1 = bloch_to_density([0, 0, 1])
        out = run_pipeline(rho1, CHANNELS["a"], NoiseModel(depolarizing=0.05))
        assert 0 < np.linalg.norm(density_to_bloch(out)) < 1

    def test_noisy_cnot_reduces_to_cnot(self):
        np.testing.assert_allclose(noisy_cnot(1, 2), cnot_unitary(1, 2), atol=1e-15)
        u = noisy_cnot(3, 1, 0.2)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(8), atol=1e-14)

    def test_depolarize_pair_full_strength(self, rng):
        rho = np.kron(random_density_matrix(1, rng), np.kron(random_density_matrix(1, rng), np.eye(2) / 2))
        out = depolarize_pair(rho, 1, 2, 1.0)
        np.testing.assert_allclose(out, np.eye(8) / 8, atol=1e-14)

    def test_rotation_errors_deterministic(self):
        a = NoiseModel(rotation_error=0.05, seed=3).angle_errors(4)
        np.testing.assert_array_equal(a, NoiseModel(rotation_error=0.05, seed=3).angle_errors(4))
        assert np.any(a != 0)

    @pytest.mark.parametrize("kw", [{"depolarizing": -0.1}, {"depolarizing": 1.5}, {"rotation_error": -1}])
    def test_noise_validation(self, kw):
        with pytest.raises(ValueError):
            NoiseModel(**kw)


class TestPtm:
    def test_identity(self):
        pairs = [(rho, rho) for rho in prepare_input_states()]
        np.testing.assert_allclose(reconstruct_ptm(pairs), np.eye(4), atol=1e-14)

    def test_z_conjugation(self):
        pairs = [(rho, SIGMA_Z @ rho @ SIGMA_Z) for rho in prepare_input_states()]
        np.testing.assert_allclose(reconstruct_ptm(pairs), np.diag([1, -1, -1, 1]), atol=1e-14)

    def test_against_definition(self, rng):
        ch = depolarizing(0.3)
        pairs = [(rho, ch(rho)) for rho in prepare_input_states()]
        np.testing.assert_allclose(reconstruct_ptm(pairs), ptm_of(ch), atol=1e-14)

    def test_apply(self, rng):
        rho = random_density_matrix(1, rng)
        np.testing.assert_allclose(apply_ptm(np.diag([1, -1, -1, 1]), rho), SIGMA_Z @ rho @ SIGMA_Z, atol=1e-14)

    def test_singular_design(self):
        states = prepare_input_states()
        with pytest.raises(SingularDesignError):
            reconstruct_ptm([(states[0], states[0]), (states[1], states[1]), (states[2], states[2])])
        with pytest.raises(SingularDesignError):
            reconstruct_ptm([(s, s) for s in (states[0], states[1], states[0], states[1])])


class TestChi:
    def test_identity(self):
        expected = np.zeros((4, 4))
        expected[0, 0] = 1
        np.testing.assert_allclose(ptm_to_chi(np.eye(4)), expected, atol=1e-14)

    def test_bit_flip(self):
        r = ptm_of(lambda rho: SIGMA_X @ rho @ SIGMA_X)
        np.testing.assert_allclose(ptm_to_chi(r), np.diag([0, 1, 0, 0]), atol=1e-14)

    def test_depolarizing(self):
        p = 0.2
        chi = ptm_to_chi(ptm_of(depolarizing(p)))
        np.testing.assert_allclose(chi, np.diag([1 - 3 * p / 4, p / 4, p / 4, p / 4]), atol=1e-14)

    def test_round_trip(self, rng):
        for _ in range(10):
            u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
            q = rng.uniform()
            r = ptm_of(lambda rho: q * u @ rho @ u.conj().T + (1 - q) * SIGMA_Z @ rho @ SIGMA_Z)
            np.testing.assert_allclose(chi_to_ptm(ptm_to_chi(r)), r, atol=1e-12)

    def test_kraus(self, rng):
        u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
        ch = lambda rho: 0.7 * u @ rho @ u.conj().T + 0.3 * SIGMA_X @ rho @ SIGMA_X  # noqa: E731
        kraus = chi_to_kraus(ptm_to_chi(ptm_of(ch)))
        assert not kraus.nonphysical
        completeness = sum(a.conj().T @ a for a in kraus.operators)
        np.testing.assert_allclose(completeness, np.eye(2), atol=1e-8)
        for _ in range(5):
            rho = random_density_matrix(1, rng)
            np.testing.assert_allclose(apply_kraus(kraus, rho), ch(rho), atol=1e-8)

    def test_nonphysical_flag(self):
        # transpose map: positive but not completely positive
        kraus = chi_to_kraus(ptm_to_chi(np.diag([1.0, 1.0, -1.0, 1.0])))
        assert kraus.nonphysical


class TestFiguresOfMerit:
    def test_fidelity_and_trace(self):
        p = 0.1
        r = ptm_of(depolarizing(p))
        assert entanglement_fidelity(ptm_to_chi(r)) == pytest.approx(1 - 3 * p / 4)
        assert map_trace(r) == pytest.approx(1.0)

    def test_non_trace_preserving(self):
        r = ptm_of(lambda rho: 1.03 * rho)
        assert map_trace(r) == pytest.approx(1.03)


class TestSphereMapping:
    def test_identity(self):
        mesh = sphere_mapping(np.eye(4))
        np.testing.assert_allclose(mesh.outputs, mesh.inputs, atol=1e-15)
        assert len(mesh.rows()) == 32 * 64 and len(mesh.rows()[0]) == 8

    def test_depolarizing_radius(self):
        p = 0.2
        mesh = sphere_mapping(ptm_of(depolarizing(p)))
        np.testing.assert_allclose(np.linalg.norm(mesh.outputs, axis=1), 1 - p, atol=1e-14)

    def test_grid_minimum(self):
        with pytest.raises(ValueError):
            sphere_mapping(np.eye(4), (16, 32))


class TestExperiment:
    @pytest.mark.parametrize("label", "abc")
    def test_ideal(self, label):
        rep = tomography_experiment(CHANNELS[label])
        np.testing.assert_allclose(rep.ptm, np.eye(4), atol=1e-10)
        assert rep.entanglement_fidelity == pytest.approx(1.0, abs=1e-9)
        assert rep.map_trace == pytest.approx(1.0, abs=1e-9)
        assert label in HARDWARE_REFERENCE

    def test_random_channels_noiseless(self, rng):
        for _ in range(20):
            r = process_ptm(ErrorChannel.random(rng))
            np.testing.assert_allclose(r, np.eye(4), atol=1e-10)

    @pytest.mark.parametrize("label", "abc")
    def test_fidelity_monotone_in_depolarizing(self, label):
        fids = [
            tomography_experiment(CHANNELS[label], NoiseModel(depolarizing=s)).entanglement_fidelity
            for s in (0.0, 0.01, 0.02, 0.05, 0.10)
        ]
        assert all(a > b for a, b in zip(fids, fids[1:]))

    def test_channel_b_noisy(self):
        rep = tomography_experiment(CHANNELS["b"], NoiseModel(depolarizing=0.05))
        assert 0.5 < rep.entanglement_fidelity < 1
        assert rep.map_trace == pytest.approx(1.0, abs=1e-12)
        radii = np.linalg.norm(rep.mesh.outputs, axis=1)
        assert radii.max() < 1

    def test_over_rotation_lowers_fidelity(self):
        rep = tomography_experiment(CHANNELS["a"], NoiseModel(rotation_error=0.1, seed=1))
        assert rep.entanglement_fidelity < 1 - 1e-6
        assert not rep.kraus.nonphysical

    def test_mesh_never_inflates(self, rng):
        for _ in range(3):
            n = random_unit_vector(rng)
            r = process_ptm(CHANNELS["c"], NoiseModel(depolarizing=0.03, rotation_error=0.05))
            out = apply_ptm(r, bloch_to_density(n))
            assert np.linalg.norm(density_to_bloch(out)) <= 1 + 1e-12
