import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import haar_qubit_pair_moments
from typent.ensemble import EnsembleSpec
from typent.graph import build_chain, build_cycle, interval_mask
from typent.montecarlo import (
    PurityStats,
    ResourceLimitError,
    StateVector,
    apply_two_site_gate,
    check_memory,
    is_unitary,
    reduced_purity,
    renyi2,
    run_ensemble,
    sample_haar_unitary,
    sample_purities,
    write_sample_csv,
)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def test_sampled_unitaries_are_unitary():
    U = sample_haar_unitary(4, np.random.default_rng(0), size=1000)
    assert U.shape == (1000, 4, 4)
    assert is_unitary(U, 1e-12)
    assert is_unitary(sample_haar_unitary(9, np.random.default_rng(1)), 1e-12)


def test_haar_first_moment_vanishes():
    # E[U] = 0 and E|U_ij|^2 = 1/dim for the Haar measure
    U = sample_haar_unitary(4, np.random.default_rng(2), size=20000)
    assert np.abs(U.mean(axis=0)).max() < 0.03
    assert np.abs((np.abs(U) ** 2).mean(axis=0) - 0.25).max() < 0.01


def test_bell_state_purity():
    s = StateVector.zero(2, 2)
    s = apply_two_site_gate(s, (0, 1), np.kron(H, np.eye(2)))
    s = apply_two_site_gate(s, (0, 1), CNOT)
    assert reduced_purity(s, 0b01) == pytest.approx(0.5, abs=1e-14)
    assert reduced_purity(s, 0b10) == pytest.approx(0.5, abs=1e-14)


def test_identity_and_swap_gates():
    v = [np.array([1, 0]), np.array([0.6, 0.8]), np.array([1, 1j])]
    s = StateVector.product(v)
    same = apply_two_site_gate(s, (0, 2), np.eye(4))
    assert np.allclose(same.amplitudes, s.amplitudes)
    swapped = apply_two_site_gate(s, (0, 1), SWAP)
    expect = StateVector.product([v[1], v[0], v[2]])
    assert np.allclose(swapped.amplitudes, expect.amplitudes)


def test_gate_order_of_sites_matters():
    # CNOT with control 1 differs from control 0
    s = StateVector.product([np.array([0, 1]), np.array([1, 0])])
    a = apply_two_site_gate(s, (0, 1), CNOT)
    b = apply_two_site_gate(s, (1, 0), CNOT)
    assert np.allclose(a.amplitudes, StateVector.product([[0, 1], [0, 1]]).amplitudes)
    assert np.allclose(b.amplitudes, s.amplitudes)


def test_product_state_purity_is_one():
    s = StateVector.zero(5, 3)
    assert reduced_purity(s, 0b00101) == pytest.approx(1.0)


def test_input_validation():
    s = StateVector.zero(3, 2)
    with pytest.raises(ValueError):
        apply_two_site_gate(s, (0, 1), np.eye(9))
    with pytest.raises(ValueError):
        apply_two_site_gate(s, (0, 3), np.eye(4))
    with pytest.raises(ValueError):
        reduced_purity(s, 0)
    with pytest.raises(ValueError):
        reduced_purity(s, 0b111)
    with pytest.raises(ValueError):
        StateVector(np.zeros(7, dtype=complex), 3, 2)


def test_renyi2():
    assert renyi2(0.8, base=2) == pytest.approx(0.3219, abs=1e-4)
    assert renyi2(1.0) == 0.0
    assert renyi2(0.25) == pytest.approx(math.log(4))
    with pytest.raises(ValueError):
        renyi2(0.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 6), st.integers(2, 3), st.integers(0, 2**31 - 1), st.data())
def test_gates_preserve_norm_and_purity_bounds(n, d, seed, data):
    rng = np.random.default_rng(seed)
    s = StateVector.zero(n, d)
    for _ in range(4):
        i = data.draw(st.integers(0, n - 1))
        j = data.draw(st.integers(0, n - 1).filter(lambda x: x != i))
        s = apply_two_site_gate(s, (i, j), sample_haar_unitary(d * d, rng))
    assert s.norm() == pytest.approx(1.0, abs=1e-12)
    A = data.draw(st.integers(1, (1 << n) - 2))
    la = bin(A).count("1")
    P = reduced_purity(s, A)
    assert d ** -min(la, n - la) - 1e-12 <= P <= 1 + 1e-12
    # purity is symmetric under complement for a pure state
    assert P == pytest.approx(reduced_purity(s, ((1 << n) - 1) ^ A), abs=1e-12)


def test_depth_zero_gives_unit_purity():
    spec = EnsembleSpec("chain", build_chain(4, 2), interval_mask(0, 2), 0)
    st_ = run_ensemble(spec, 50, seed=1)
    assert st_.mean == pytest.approx(1.0) and st_.var == pytest.approx(0.0, abs=1e-24)


@pytest.mark.parametrize("model,graph", [
    ("random-edge", build_cycle(6, 2)),
    ("chain", build_chain(5, 2)),
])
def test_determinism_across_workers_and_blocks(model, graph):
    spec = EnsembleSpec(model, graph, interval_mask(0, 2), 3)
    a = sample_purities(spec, 37, seed=5)
    b = sample_purities(spec, 37, seed=5, workers=3, block_size=4)
    c = sample_purities(spec, 37, seed=5, block_size=1)
    assert np.array_equal(a, b) and np.array_equal(a, c)
    assert not np.array_equal(a, sample_purities(spec, 37, seed=6))


def test_random_per_step_samples_prefix_stable():
    spec = EnsembleSpec("chain", build_chain(5, 2), interval_mask(0, 2), 2, "random-per-step")
    a = sample_purities(spec, 20, seed=3)
    b = sample_purities(spec, 10, seed=3)
    assert np.array_equal(a[:10], b)


def test_memory_cap():
    with pytest.raises(ResourceLimitError):
        check_memory(30, 2, mem_cap_gib=1.0)
    check_memory(20, 2, mem_cap_gib=1.0)
    spec = EnsembleSpec("chain", build_chain(10, 2), interval_mask(0, 5), 1)
    with pytest.raises(ResourceLimitError):
        sample_purities(spec, 1, seed=0, mem_cap_gib=1e-6)


def test_purity_stats():
    p = np.array([0.5, 0.75, 1.0, 0.25])
    s = PurityStats.from_samples(p)
    assert s.mean == pytest.approx(0.625)
    assert s.var == pytest.approx(np.var(p, ddof=1))
    assert s.stderr == pytest.approx(math.sqrt(s.var / 4))
    assert s.s2_of_mean == pytest.approx(-math.log(0.625))
    assert s.mean_s2 >= s.s2_of_mean
    one = PurityStats.from_samples([0.9])
    assert one.var == 0.0 and math.isnan(one.var_stderr)
    with pytest.raises(ValueError):
        PurityStats.from_samples([])


def test_single_edge_matches_haar_pair_oracle():
    mean, var = haar_qubit_pair_moments()
    assert mean == pytest.approx(0.8) and var == pytest.approx(3 / 175)
    spec = EnsembleSpec("single-edge", build_chain(2, 2), 0b01, 1)
    st_ = run_ensemble(spec, 20000, seed=12)
    assert abs(st_.mean - mean) <= 4 * st_.stderr
    assert abs(st_.var - var) <= 4 * st_.var_stderr


def test_left_invariance():
    # a fixed entangler applied before each Haar gate leaves the law unchanged
    W = CNOT @ np.kron(H, np.eye(2))
    rng = np.random.default_rng(21)
    U = sample_haar_unitary(4, rng, size=20000)

    def purities(G):
        M = G[:, :, 0].reshape(-1, 2, 2)
        rho = M @ np.conj(np.swapaxes(M, 1, 2))
        return np.einsum("bij,bij->b", rho, np.conj(rho)).real

    a = PurityStats.from_samples(purities(U))
    b = PurityStats.from_samples(purities(W @ sample_haar_unitary(4, rng, size=20000)))
    assert abs(a.mean - b.mean) <= 4 * math.hypot(a.stderr, b.stderr)


def test_jensen_on_samples():
    spec = EnsembleSpec("random-edge", build_cycle(6, 2), interval_mask(0, 3), 2)
    s = run_ensemble(spec, 500, seed=2)
    assert s.mean_s2 >= s.s2_of_mean - 1e-12


def test_write_sample_csv(tmp_path):
    path = tmp_path / "s.csv"
    write_sample_csv(path, [0.1, 1 / 3])
    lines = path.read_text().splitlines()
    assert lines[0] == "sample_index,purity"
    assert float(lines[2].split(",")[1]) == 1 / 3
