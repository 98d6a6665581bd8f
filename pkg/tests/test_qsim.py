import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from carmsim import qsim
from carmsim.errors import (
    CapacityError,
    DomainError,
    NormalizationError,
    ZeroProbabilityError,
)


def random_state(dims, seed):
    rng = np.random.default_rng(seed)
    layout = qsim.RegisterLayout(tuple(dims))
    amps = rng.normal(size=layout.dimension) + 1j * rng.normal(size=layout.dimension)
    amps /= np.linalg.norm(amps)
    return qsim.StateVector(layout, amps)


# ---------------------------------------------------------------- layout

def test_layout_validation():
    with pytest.raises(DomainError):
        qsim.RegisterLayout(())
    with pytest.raises(DomainError):
        qsim.RegisterLayout((4, 0))
    with pytest.raises(CapacityError):
        qsim.RegisterLayout((2,) * 27)
    assert qsim.RegisterLayout((3, 5)).dimension == 15


# ---------------------------------------------------------------- uniform

def test_uniform_examples():
    assert np.allclose(qsim.uniform_state(qsim.RegisterLayout((1,))).amplitudes, [1.0])
    state = qsim.uniform_state(qsim.RegisterLayout((4,)))
    assert np.allclose(state.amplitudes, [0.5] * 4)
    big = qsim.uniform_state(qsim.RegisterLayout((561,)))
    assert big.norm_sq() == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------- phase flip

def test_phase_flip_examples():
    state = qsim.uniform_state(qsim.RegisterLayout((4,)))
    unchanged = qsim.phase_flip(state, 0, lambda v: False)
    assert np.allclose(unchanged.amplitudes, state.amplitudes)
    global_flip = qsim.phase_flip(state, 0, lambda v: True)
    assert np.allclose(global_flip.amplitudes, -state.amplitudes)
    one = qsim.phase_flip(state, 0, lambda v: v == 3)
    assert np.allclose(one.amplitudes, [0.5, 0.5, 0.5, -0.5])


def test_phase_flip_register_range():
    state = qsim.uniform_state(qsim.RegisterLayout((4,)))
    with pytest.raises(DomainError):
        qsim.phase_flip(state, 1, lambda v: True)


# ---------------------------------------------------------------- diffusion

def test_diffusion_examples():
    state = qsim.uniform_state(qsim.RegisterLayout((561,)))
    assert np.allclose(qsim.diffusion(state, 0).amplitudes, state.amplitudes, atol=1e-14)
    basis = qsim.StateVector(qsim.RegisterLayout((2,)), np.array([1.0, 0.0], complex))
    assert np.allclose(qsim.diffusion(basis, 0).amplitudes, [0.0, 1.0])


@given(st.integers(0, 2**32 - 1))
def test_diffusion_preserves_norm(seed):
    state = random_state((561,), seed)
    out = qsim.diffusion(state, 0)
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-10)


def test_diffusion_acts_blockwise():
    # with two registers, diffusion on one register averages within blocks
    state = random_state((3, 4), 7)
    out = qsim.diffusion(state, 1)
    grid = state.grid()
    expected = 2 * grid.mean(axis=1, keepdims=True) - grid
    assert np.allclose(out.grid(), expected)


# ---------------------------------------------------------------- grover iterate

def test_grover_identity_when_no_marks():
    state = qsim.uniform_state(qsim.RegisterLayout((15,)))
    out = qsim.grover_iterate(state, 0, lambda v: False)
    assert np.allclose(out.amplitudes, state.amplitudes, atol=1e-14)


def test_grover_exact_search_d4():
    # D=4, t=1: theta = pi/6, one iteration reaches sin(3 theta) = 1
    state = qsim.uniform_state(qsim.RegisterLayout((4,)))
    out = qsim.grover_iterate(state, 0, lambda v: v == 1)
    assert abs(out.amplitudes[1]) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("dimension,marked", [(15, 4), (100, 7), (561, 320), (1000, 999)])
def test_grover_matches_two_plane(dimension, marked):
    angles = qsim.GroverAngles.from_counts(dimension, marked)
    state = qsim.uniform_state(qsim.RegisterLayout((dimension,)))
    for m in range(1, 17):
        state = qsim.grover_iterate(state, 0, lambda v: v < marked)
        marked_amp, unmarked_amp = qsim.two_plane_amplitudes(angles, m)
        assert np.allclose(state.amplitudes[:marked], marked_amp, atol=1e-10)
        assert np.allclose(state.amplitudes[marked:], unmarked_amp, atol=1e-10)


@pytest.mark.parametrize("dimension,marked", [(100, 1), (400, 3), (1000, 7)])
def test_grover_optimal_iterations(dimension, marked):
    angles = qsim.GroverAngles.from_counts(dimension, marked)
    best = math.floor(math.pi / (4 * angles.theta))
    state = qsim.uniform_state(qsim.RegisterLayout((dimension,)))
    masses = [float(marked / dimension)]
    for _ in range(best):
        state = qsim.grover_iterate(state, 0, lambda v: v < marked)
        masses.append(float(np.sum(np.abs(state.amplitudes[:marked]) ** 2)))
    assert masses[-1] == pytest.approx(max(masses), abs=1e-12)


# ---------------------------------------------------------------- qft

def test_qft_of_zero_is_uniform():
    basis = np.zeros(7, complex)
    basis[0] = 1.0
    state = qsim.StateVector(qsim.RegisterLayout((7,)), basis)
    out = qsim.qft(state, 0)
    assert np.allclose(out.amplitudes, 1 / math.sqrt(7), atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 8, 12, 17]))
def test_qft_inverse_roundtrip(seed, p):
    state = random_state((p,), seed)
    out = qsim.qft(qsim.qft(state, 0), 0, inverse=True)
    assert np.allclose(out.amplitudes, state.amplitudes, atol=1e-12)


def test_qft_p2_is_hadamard():
    for basis_vec, expected in [
        (np.array([1.0, 0.0], complex), np.array([1.0, 1.0]) / math.sqrt(2)),
        (np.array([0.0, 1.0], complex), np.array([1.0, -1.0]) / math.sqrt(2)),
    ]:
        state = qsim.StateVector(qsim.RegisterLayout((2,)), basis_vec)
        assert np.allclose(qsim.qft(state, 0).amplitudes, expected, atol=1e-14)


@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 5, 8, 11]))
def test_qft_squared_reverses_indices(seed, p):
    state = random_state((p,), seed)
    twice = qsim.qft(qsim.qft(state, 0), 0)
    expected = state.amplitudes[(-np.arange(p)) % p]
    assert np.allclose(twice.amplitudes, expected, atol=1e-12)


# ---------------------------------------------------------------- controlled powers

def test_controlled_powers_no_marks_factorizes():
    state = qsim.controlled_grover_powers((4, 4), 15, lambda v: False)
    grid = state.grid()
    base = np.full(15, 1 / math.sqrt(15))
    for m1 in range(4):
        for m2 in range(4):
            assert np.allclose(grid[m1, m2], base / 4.0, atol=1e-13)


def test_controlled_powers_single_register_structure():
    marked = lambda v: v < 4
    state = qsim.controlled_grover_powers((8,), 15, marked)
    grid = state.grid()
    cursor = qsim.uniform_state(qsim.RegisterLayout((15,)))
    for m in range(8):
        assert np.allclose(grid[m], cursor.amplitudes / math.sqrt(8), atol=1e-12)
        cursor = qsim.grover_iterate(cursor, 0, marked)


def test_controlled_powers_matches_two_plane_reconstruction():
    dimension, marked_count, p, r = 15, 4, 8, 2
    angles = qsim.GroverAngles.from_counts(dimension, marked_count)
    state = qsim.controlled_grover_powers((p,) * r, dimension, lambda v: v < marked_count)
    grid = state.grid()
    scale = 1 / math.sqrt(p**r)
    for m1 in range(p):
        for m2 in range(p):
            marked_amp, unmarked_amp = qsim.two_plane_amplitudes(angles, m1 + m2)
            expected = np.full(dimension, unmarked_amp, complex)
            expected[:marked_count] = marked_amp
            assert np.allclose(grid[m1, m2], expected * scale, atol=1e-10)


def test_controlled_powers_validation():
    with pytest.raises(DomainError):
        qsim.controlled_grover_powers((1,), 4, lambda v: False)
    with pytest.raises(CapacityError):
        qsim.controlled_grover_powers((1024,), 10**6, lambda v: False)


# ---------------------------------------------------------------- postselect

def test_postselect_examples():
    state = qsim.uniform_state(qsim.RegisterLayout((2,)))
    _, prob = qsim.postselect(state, 0, 1)
    assert prob == pytest.approx(0.5, abs=1e-14)

    k = 561
    uniform = qsim.uniform_state(qsim.RegisterLayout((k,)))
    coprime = np.gcd(np.arange(k), k) == 1
    flag = qsim.phase_flip(uniform, 0, lambda v: False)  # no-op; keep uniform
    mass = float(np.sum(np.abs(flag.amplitudes[coprime]) ** 2))
    assert mass == pytest.approx(320 / 561, abs=1e-12)

    sure = np.zeros(4, complex)
    sure[2] = 1.0
    state = qsim.StateVector(qsim.RegisterLayout((4,)), sure)
    post, prob = qsim.postselect(state, 0, 2)
    assert prob == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(post.amplitudes, sure)


def test_postselect_renormalizes_and_zero_mass():
    state = random_state((3, 4), 11)
    post, prob = qsim.postselect(state, 0, 1)
    assert post.norm_sq() == pytest.approx(1.0, abs=1e-12)
    grid = post.grid()
    assert np.allclose(grid[0], 0) and np.allclose(grid[2], 0)
    hole = np.zeros(4, complex)
    hole[1] = 1.0
    state = qsim.StateVector(qsim.RegisterLayout((4,)), hole)
    with pytest.raises(ZeroProbabilityError):
        qsim.postselect(state, 0, 3)


# ---------------------------------------------------------------- distributions

def test_exact_distribution_uniform():
    state = qsim.uniform_state(qsim.RegisterLayout((4,)))
    assert np.allclose(qsim.exact_distribution(state, [0]), 0.25)


def test_exact_distribution_product_factorizes():
    a = random_state((3,), 1).amplitudes
    b = random_state((5,), 2).amplitudes
    joint = qsim.StateVector(qsim.RegisterLayout((3, 5)), np.kron(a, b))
    table = qsim.exact_distribution(joint, [0, 1])
    outer = np.outer(np.abs(a) ** 2, np.abs(b) ** 2)
    assert np.allclose(table, outer, atol=1e-12)


def test_exact_distribution_register_order():
    state = random_state((3, 5), 9)
    fwd = qsim.exact_distribution(state, [0, 1])
    rev = qsim.exact_distribution(state, [1, 0])
    assert np.allclose(rev, fwd.T)
    with pytest.raises(DomainError):
        qsim.exact_distribution(state, [0, 0])


def test_exact_distribution_sums_to_one():
    state = random_state((4, 7, 3), 21)
    table = qsim.exact_distribution(state, [2, 0])
    assert table.sum() == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------- sampling

def test_sample_deterministic_distribution():
    sure = np.zeros(6, complex)
    sure[4] = 1.0
    state = qsim.StateVector(qsim.RegisterLayout((6,)), sure)
    draws = qsim.sample(state, [0], seed=5, n_samples=50)
    assert draws.shape == (50, 1)
    assert (draws == 4).all()


def test_sample_seed_reproducibility():
    state = random_state((8, 3), 13)
    a = qsim.sample(state, [0, 1], seed=99, n_samples=200)
    b = qsim.sample(state, [0, 1], seed=99, n_samples=200)
    assert (a == b).all()
    c = qsim.sample(state, [0, 1], seed=100, n_samples=200)
    assert (a != c).any()


def test_sample_frequencies_match_distribution():
    state = random_state((10,), 3)
    table = qsim.exact_distribution(state, [0])
    n = 10**5
    draws = qsim.sample(state, [0], seed=17, n_samples=n)[:, 0]
    counts = np.bincount(draws, minlength=10) / n
    sigma = np.sqrt(table * (1 - table) / n)
    assert (np.abs(counts - table) <= 5 * sigma + 1e-12).all()


# ---------------------------------------------------------------- serialization

def test_distribution_json_drops_dust():
    table = np.array([[0.5, 1e-13], [0.5 - 1e-13, 0.0]])
    payload = qsim.distribution_to_json([2, 2], table)
    assert payload["layout"] == [2, 2]
    indexes = [tuple(rec["index"]) for rec in payload["probs"]]
    assert (0, 0) in indexes and (1, 0) in indexes
    assert (0, 1) not in indexes and (1, 1) not in indexes
    with pytest.raises(DomainError):
        qsim.distribution_to_json([3], table)


# ---------------------------------------------------------------- angles

def test_grover_angles_edges():
    assert qsim.GroverAngles.from_counts(10, 0).theta == 0.0
    assert qsim.GroverAngles.from_counts(10, 10).theta == pytest.approx(math.pi / 2)
    with pytest.raises(DomainError):
        qsim.GroverAngles.from_counts(10, 11)


@given(st.integers(1, 100000), st.data())
def test_grover_angles_consistency(dimension, data):
    marked = data.draw(st.integers(0, dimension))
    angles = qsim.GroverAngles.from_counts(dimension, marked)
    assert 0.0 <= angles.theta <= math.pi / 2
    assert math.sin(angles.theta) ** 2 * dimension == pytest.approx(marked, abs=1e-12 * dimension)
    assert angles.peak_position(16) == pytest.approx(16 * angles.theta / math.pi)


# ---------------------------------------------------------------- norm policing

def test_operations_reject_denormalized_states():
    bad = qsim.StateVector(qsim.RegisterLayout((4,)), np.full(4, 0.4, complex))
    with pytest.raises(NormalizationError):
        qsim.phase_flip(bad, 0, lambda v: v == 0)
    with pytest.raises(NormalizationError):
        qsim.qft(bad, 0)
