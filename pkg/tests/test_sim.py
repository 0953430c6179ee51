"""Simulator vs dense matrix algebra, sampling, branching, readout noise."""

import math

import numpy as np
import pytest

from quantcut import circuit as cc
from quantcut import sim
from quantcut.errors import AsymmetricNoiseUnsupported, QubitCapExceeded

from oracles import PAULI, embed_1q, observable_matrix, simulate

KINDS_1Q = ["H", "X", "Y", "Z", "S", "Sdg"]
KINDS_ROT = ["Rx", "Ry", "Rz", "Phase"]


def _random_circuit(n, n_gates, rng):
    gates = []
    for _ in range(n_gates):
        r = rng.random() if n > 1 else rng.uniform(0, 0.6)
        if r < 0.35:
            gates.append(cc.Gate(str(rng.choice(KINDS_1Q)), (int(rng.integers(n)),)))
        elif r < 0.6:
            gates.append(
                cc.Gate(
                    str(rng.choice(KINDS_ROT)),
                    (int(rng.integers(n)),),
                    float(rng.uniform(-math.pi, math.pi)),
                )
            )
        else:
            q1, q2 = rng.choice(n, size=2, replace=False)
            kind = rng.random()
            if kind < 0.4:
                gates.append(cc.CX(int(q1), int(q2)))
            elif kind < 0.7:
                gates.append(cc.CRZ(float(rng.uniform(-2, 2)), int(q1), int(q2)))
            else:
                a1, a2 = rng.choice(list("XYZ"), size=2)
                gates.append(
                    cc.Interaction(
                        float(rng.uniform(-1, 1)), str(a1), str(a2), int(q1), int(q2)
                    )
                )
    return cc.Circuit(n, tuple(gates))


def test_run_matches_dense_oracle():
    rng = np.random.default_rng(21)
    for n in (1, 2, 3, 4, 6):
        for _ in range(4):
            c = _random_circuit(n, 12, rng)
            got = sim.run(c).amps
            want = simulate(c, cc.gate_matrix)
            np.testing.assert_allclose(got, want, atol=1e-10)


def test_bell_state_amplitudes():
    c = cc.Circuit(2, (cc.H(0), cc.CX(0, 1)))
    got = sim.run(c).amps
    s2 = 1 / math.sqrt(2)
    np.testing.assert_allclose(got, [s2, 0, 0, s2], atol=1e-12)


def test_bell_plus_free_qubit_has_four_half_amplitudes():
    c = cc.Circuit(3, (cc.H(0), cc.CX(0, 1), cc.H(2)))
    got = sim.run(c).amps
    want = np.zeros(8)
    want[[0, 3, 4, 7]] = 0.5
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_qubit_cap():
    c = cc.Circuit(5, (cc.H(0),))
    with pytest.raises(QubitCapExceeded):
        sim.run(c, max_qubits=4)
    assert sim.run(c, max_qubits=5).n_qubits == 5


def test_expectation_matches_dense_oracle():
    rng = np.random.default_rng(22)
    n = 4
    for _ in range(8):
        c = _random_circuit(n, 10, rng)
        state = sim.run(c)
        terms = []
        for _ in range(3):
            qs = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
            paulis = {int(q): str(rng.choice(list("XYZ"))) for q in qs}
            terms.append((float(rng.normal()), paulis))
        terms.append((0.5, {}))
        obs = cc.PauliObservable.from_terms(terms)
        dense = observable_matrix(obs, n)
        want = float(np.real(state.amps.conj() @ dense @ state.amps))
        assert sim.expectation(state, obs) == pytest.approx(want, abs=1e-10)


def test_sample_deterministic_and_complete():
    state = sim.run(cc.Circuit(2, (cc.H(0), cc.CX(0, 1))))
    a = sim.sample(state, 5000, rng=42)
    b = sim.sample(state, 5000, rng=42)
    assert a == b
    assert set(a) <= {"00", "11"}
    assert sum(a.values()) == 5000
    # balanced within 5 sigma of a fair coin
    p = a["00"] / 5000
    assert abs(p - 0.5) < 5 * math.sqrt(0.25 / 5000)


def test_sample_with_noise_flips_bits():
    state = sim.StateVector.zero(2)  # |00>
    noise = sim.ReadoutNoise.symmetric(0.2)
    counts = sim.sample(state, 40_000, noise=noise, rng=1)
    frac_q0_one = sum(v for k, v in counts.items() if k[-1] == "1") / 40_000
    assert frac_q0_one == pytest.approx(0.2, abs=5 * math.sqrt(0.16 / 40_000))


def test_branch_measure_probabilities_and_dephasing():
    rng = np.random.default_rng(23)
    for basis in ("Z", "X", "Y"):
        c = _random_circuit(3, 10, rng)
        state = sim.run(c)
        for q in range(3):
            branches = sim.branch_measure(state, q, basis)
            assert len(branches) == 2
            assert branches[0].sign == 1 and branches[1].sign == -1
            total = sum(b.probability for b in branches)
            assert total == pytest.approx(1.0, abs=1e-12)
            # mixture of collapse branches equals projector dephasing
            mix = sum(
                b.probability * np.outer(b.state.amps, b.state.amps.conj())
                for b in branches
                if not b.unused
            )
            a_full = embed_1q(PAULI[basis], q, 3)
            p_plus = (np.eye(8) + a_full) / 2
            p_minus = (np.eye(8) - a_full) / 2
            rho = np.outer(state.amps, state.amps.conj())
            want = p_plus @ rho @ p_plus + p_minus @ rho @ p_minus
            np.testing.assert_allclose(mix, want, atol=1e-10)
            # input state untouched
            assert abs(state.norm() - 1.0) < 1e-12


def test_branch_measure_zero_probability_placeholder():
    state = sim.StateVector.zero(2)  # |00>: outcome 1 on qubit 0 is impossible
    zero, one = sim.branch_measure(state, 0, "Z")
    assert not zero.unused and zero.probability == pytest.approx(1.0)
    assert one.unused and one.probability == 0.0
    assert abs(one.state.norm() - 1.0) < 1e-12


def test_branch_measure_post_states_are_eigenstates():
    rng = np.random.default_rng(24)
    state = sim.run(_random_circuit(2, 8, rng))
    for basis in ("X", "Y", "Z"):
        for b in sim.branch_measure(state, 1, basis):
            if b.unused:
                continue
            a_full = embed_1q(PAULI[basis], 1, 2)
            np.testing.assert_allclose(
                a_full @ b.state.amps, b.sign * b.state.amps, atol=1e-10
            )


def test_readout_attenuation_closed_form():
    noise = sim.ReadoutNoise.symmetric(0.01)
    assert sim.apply_readout_to_expectation(1.0, 2, noise) == pytest.approx(
        0.98**2, abs=1e-15
    )
    assert sim.apply_readout_to_expectation(0.5, 0, noise) == 0.5
    assert sim.apply_readout_to_expectation(0.5, 3, None) == 0.5
    with pytest.raises(AsymmetricNoiseUnsupported):
        sim.apply_readout_to_expectation(1.0, 1, sim.ReadoutNoise(0.01, 0.02))


def test_noisy_zz_matches_attenuated_ideal():
    # 5-sigma statistical agreement between sampled and analytic noisy <ZZ>
    eps = 0.05
    shots = 200_000
    state = sim.run(cc.Circuit(2, (cc.H(0), cc.CX(0, 1))))
    counts = sim.sample(state, shots, noise=sim.ReadoutNoise.symmetric(eps), rng=3)
    est = sim.expectation_from_counts(counts, [0, 1])
    want = (1 - 2 * eps) ** 2
    sigma = math.sqrt((1 - want**2) / shots)
    assert abs(est - want) < 5 * sigma


def test_expectation_from_counts_oracle():
    counts = {"00": 10, "01": 20, "10": 30, "11": 40}
    # parity over both qubits: even for 00/11, odd for 01/10
    assert sim.expectation_from_counts(counts, [0, 1]) == pytest.approx(
        (10 + 40 - 20 - 30) / 100
    )
    # single qubit 0 is the last character
    assert sim.expectation_from_counts(counts, [0]) == pytest.approx(
        (10 + 30 - 20 - 40) / 100
    )


def test_fidelity():
    a = sim.run(cc.Circuit(2, (cc.H(0), cc.CX(0, 1))))
    assert sim.fidelity(a, a) == pytest.approx(1.0)
    b = sim.StateVector.zero(2)
    assert sim.fidelity(a, b) == pytest.approx(0.5, abs=1e-12)
