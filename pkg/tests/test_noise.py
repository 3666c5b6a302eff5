import numpy as np
import pytest

from quantseq.ansatz import build, build_mps, run_circuit
from quantseq.errors import CapacityError, ParameterError
from quantseq.noise import (
    CHANNEL_NAMES,
    NoiseConfig,
    apply_channel_trajectory,
    density_matrix_expectation,
    kraus_ops,
    noisy_expectation,
)
from quantseq.statevector import QuantumState, expectation_z

from oracles import random_state_vector

LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)


def zero_state(num_qubits):
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[0] = 1.0
    return QuantumState(num_qubits, amps)


class TestKrausOps:
    @pytest.mark.parametrize("channel", CHANNEL_NAMES)
    @pytest.mark.parametrize("lam", LEVELS)
    def test_completeness(self, channel, lam):
        ops = kraus_ops(channel, lam)
        total = sum(k.conj().T @ k for k in ops)
        np.testing.assert_allclose(total, np.eye(2), atol=1e-10)

    def test_lambda_zero_is_identity_only(self):
        for channel in CHANNEL_NAMES:
            ops = kraus_ops(channel, 0.0)
            np.testing.assert_allclose(ops[0], np.eye(2), atol=1e-15)
            for k in ops[1:]:
                np.testing.assert_allclose(k, np.zeros((2, 2)), atol=1e-15)

    def test_depolarizing_fully_mixing_point(self):
        # lambda = 0.75: applying the channel to any single-qubit density
        # matrix yields the maximally mixed state
        rng = np.random.default_rng(0)
        ops = kraus_ops("depolarizing", 0.75)
        for _ in range(10):
            z = rng.normal(size=2) + 1j * rng.normal(size=2)
            z /= np.linalg.norm(z)
            rho = np.outer(z, z.conj())
            out = sum(k @ rho @ k.conj().T for k in ops)
            np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-12)

    def test_depolarizing_uniform_pauli_point(self):
        ops = kraus_ops("depolarizing", 1.0)
        assert np.allclose(ops[0], 0.0)
        for k in ops[1:]:
            np.testing.assert_allclose(np.abs(k @ k.conj().T), np.eye(2) / 3, atol=1e-12)

    def test_out_of_range_strength(self):
        with pytest.raises(ParameterError):
            kraus_ops("bit_flip", 1.5)
        with pytest.raises(ParameterError):
            kraus_ops("bit_flip", -0.1)

    def test_unknown_channel(self):
        with pytest.raises(ParameterError):
            kraus_ops("thermal", 0.5)

    def test_phase_damping_shrinks_coherence(self):
        # hand evolution of the Kraus pair on |+><+|: diagonal fixed, the
        # off-diagonal scales by sqrt(1 - lambda)
        lam = 0.4
        ops = kraus_ops("phase_damping", lam)
        plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
        rho = np.outer(plus, plus)
        out = sum(k @ rho @ k.conj().T for k in ops)
        assert out[0, 0] == pytest.approx(0.5)
        assert out[1, 1] == pytest.approx(0.5)
        assert out[0, 1] == pytest.approx(0.5 * np.sqrt(1 - lam))
        # Z expectation untouched
        assert (out[0, 0] - out[1, 1]) == pytest.approx(0.0, abs=1e-15)


class TestTrajectory:
    def test_bitflip_certain(self):
        rng = np.random.default_rng(0)
        out = apply_channel_trajectory(zero_state(2), "bit_flip", 1.0, 0, rng)
        assert expectation_z(out, 0) == pytest.approx(-1.0)

    def test_amplitude_damping_collapses_to_ground(self):
        rng = np.random.default_rng(1)
        state = QuantumState(2, random_state_vector(2, rng))
        out = apply_channel_trajectory(state, "amplitude_damping", 1.0, 1, rng)
        assert expectation_z(out, 1) == pytest.approx(1.0)

    def test_wire_range_checked(self):
        with pytest.raises(IndexError):
            apply_channel_trajectory(zero_state(2), "bit_flip", 0.5, 5, np.random.default_rng(0))

    def test_depolarizing_mixes_z_to_zero(self):
        # single-wire depolarizing at the fully mixing point: averaged over
        # many trajectories the Z expectation vanishes
        rng = np.random.default_rng(7)
        total = 0.0
        shots = 20000
        for _ in range(shots):
            out = apply_channel_trajectory(zero_state(2), "depolarizing", 0.75, 0, rng)
            total += expectation_z(out, 0)
        assert abs(total / shots) < 3.0 / np.sqrt(shots) * 1.2


class TestNoiseConfig:
    def test_validation(self):
        with pytest.raises(ParameterError):
            NoiseConfig(strength=1.2)
        with pytest.raises(ParameterError):
            NoiseConfig(strength=0.5, shots=0)
        with pytest.raises(ParameterError):
            NoiseConfig(strength=0.5, channels=("bogus",))


class TestDensityMatrixOracle:
    def test_capacity_limit(self):
        spec = build("mps", 8)
        with pytest.raises(CapacityError):
            density_matrix_expectation(
                spec, np.zeros(spec.param_count), zero_state(8),
                NoiseConfig(strength=0.5),
            )

    @pytest.mark.parametrize("kind", ["mps", "mera", "ttn"])
    def test_noiseless_matches_analytic(self, kind):
        rng = np.random.default_rng(3)
        spec = build(kind, 4)
        for _ in range(5):
            theta = rng.uniform(-np.pi, np.pi, spec.param_count)
            state = QuantumState(4, random_state_vector(4, rng))
            dm = density_matrix_expectation(spec, theta, state, NoiseConfig(strength=0.0))
            assert dm == pytest.approx(run_circuit(spec, theta, state), abs=1e-10)

    def test_single_wire_depolarizing_075_kills_z(self):
        # 2-qubit chain, depolarizing on every wire after each stage: the
        # measure-wire expectation lands at exactly zero
        rng = np.random.default_rng(4)
        spec = build_mps(2)
        theta = rng.uniform(-np.pi, np.pi, spec.param_count)
        state = QuantumState(2, random_state_vector(2, rng))
        noise = NoiseConfig(strength=0.75, channels=("depolarizing",))
        assert density_matrix_expectation(spec, theta, state, noise) == pytest.approx(0.0, abs=1e-12)


class TestNoisyExpectation:
    def test_seeded_reproducibility(self):
        rng = np.random.default_rng(5)
        spec = build_mps(2)
        theta = rng.uniform(-np.pi, np.pi, spec.param_count)
        state = QuantumState(2, random_state_vector(2, rng))
        noise = NoiseConfig(strength=0.25, shots=200)
        a = noisy_expectation(spec, theta, state, noise, np.random.default_rng(11))
        b = noisy_expectation(spec, theta, state, noise, np.random.default_rng(11))
        assert a == b

    def test_noiseless_shots_converge_to_analytic(self):
        rng = np.random.default_rng(6)
        spec = build_mps(2)
        theta = rng.uniform(-np.pi, np.pi, spec.param_count)
        state = QuantumState(2, random_state_vector(2, rng))
        exact = run_circuit(spec, theta, state)
        noise = NoiseConfig(strength=0.0, shots=40000)
        est = noisy_expectation(spec, theta, state, noise, np.random.default_rng(12))
        assert est == pytest.approx(exact, abs=3.2 / np.sqrt(40000))

    @pytest.mark.parametrize("kind", ["mps", "ttn"])
    def test_matches_density_oracle_3sigma(self, kind):
        rng = np.random.default_rng(8)
        spec = build(kind, 4)
        theta = rng.uniform(-np.pi, np.pi, spec.param_count)
        state = QuantumState(4, random_state_vector(4, rng))
        noise = NoiseConfig(strength=0.5, channels=("depolarizing",), shots=4000)
        exact = density_matrix_expectation(spec, theta, state, noise)
        est = noisy_expectation(spec, theta, state, noise, np.random.default_rng(13))
        # each trajectory yields a +/-1 sample: sd <= 1/sqrt(shots)
        assert est == pytest.approx(exact, abs=3.0 / np.sqrt(4000))

    def test_unbiased_coverage_over_seeds(self):
        # the trajectory estimator stays within 3 standard errors of the
        # density-matrix value in at least 99 of 100 seeded repetitions
        rng = np.random.default_rng(9)
        spec = build("mps", 2)
        theta = rng.uniform(-np.pi, np.pi, spec.param_count)
        state = QuantumState(2, random_state_vector(2, rng))
        noise = NoiseConfig(strength=0.25, channels=CHANNEL_NAMES, shots=400)
        exact = density_matrix_expectation(spec, theta, state, noise)
        hits = 0
        for seed in range(100):
            est = noisy_expectation(spec, theta, state, noise, np.random.default_rng(seed))
            sample_std = np.sqrt(max(1.0 - est * est, 1e-12))  # std of +/-1 draws
            hits += abs(est - exact) < 3.0 * sample_std / np.sqrt(noise.shots)
        assert hits >= 99

    def test_fully_depolarizing_point_flattens_features(self):
        # at strength 0.75 the last-stage depolarizing channel hits the
        # measure wire directly, so the exact feature is 0 for any input (and
        # any score set built on it is all ties, AUC 0.5); the trajectory
        # features agree within shot noise
        from quantseq.metrics import roc_auc
        from quantseq.pipeline import init_model

        rng = np.random.default_rng(20)
        model = init_model("ttn", 4, hidden_dim=4, seed=21)
        noise = NoiseConfig(strength=0.75, channels=("depolarizing",), shots=2000)
        exact_feats, sampled_feats = [], []
        for i in range(6):
            frame = rng.random(16) * 0.6 + 0.2
            state = QuantumState(4, np.asarray(frame) / np.linalg.norm(frame))
            exact_feats.append(
                density_matrix_expectation(model.circuit, model.theta, state, noise)
            )
            sampled_feats.append(
                noisy_expectation(
                    model.circuit, model.theta, state, noise, np.random.default_rng([22, i])
                )
            )
        np.testing.assert_allclose(exact_feats, 0.0, atol=1e-12)
        assert roc_auc(exact_feats, [0, 1] * 3) == 0.5
        for est in sampled_feats:
            assert abs(est) < 3.0 / np.sqrt(noise.shots)

    def test_disabled_channels_bitwise_identical_to_analytic(self):
        # with no channels the trajectory path applies exactly the analytic
        # gate sequence; only the final shot sampling differs
        from quantseq.ansatz import materialize, run_ops_raw
        from quantseq.noise import _run_trajectory_raw, kraus_ops as _k

        rng = np.random.default_rng(10)
        spec = build("ttn", 4)
        theta = rng.uniform(-np.pi, np.pi, spec.param_count)
        state = QuantumState(4, random_state_vector(4, rng))
        mats = materialize(spec, theta)
        analytic = run_ops_raw(state.amplitudes[None, :], spec, mats)
        for noise in (
            NoiseConfig(strength=0.5, channels=(), shots=1),
            NoiseConfig(strength=0.0, channels=CHANNEL_NAMES, shots=1),
        ):
            channel_ops = {name: _k(name, noise.strength) for name in noise.channels}
            traj = _run_trajectory_raw(
                spec, mats, state.amplitudes[None, :], noise, channel_ops,
                np.random.default_rng(0),
            )
            assert np.array_equal(traj, analytic)
