import numpy as np
import pytest

from app.core.exceptions import (
    InvalidDigitError,
    InvalidDimensionError,
    NormalizationError,
)
from app.core.rng import RandomStream
from app.models.qudit import BasisChoice, DimensionParams
from app.services.quantum.qudit_math import (
    AmplitudeState,
    apply_fourier,
    apply_operator,
    bell_state,
    computational_state,
    fourier_matrix,
    fourier_state,
    inverse_fourier,
    measure,
    measure_pair_computational,
    mod_add,
    mod_sub,
    outcome_probabilities,
    phase_sum,
)
from tests.helpers import within_band

SQRT2 = 1 / np.sqrt(2)


@pytest.mark.unit
def test_mod_arithmetic_examples():
    """Test modular addition and subtraction."""
    assert mod_add(mod_add(9, 4, 11), 7, 11) == 9
    assert mod_add(6, 6, 11) == 1
    assert mod_add(5, 0, 11) == 5
    assert mod_sub(8, 9, 11) == 10
    assert mod_sub(0, 5, 11) == 6
    assert mod_sub(7, 7, 11) == 0


@pytest.mark.unit
def test_mod_arithmetic_rejects_bad_input():
    """Test digit and dimension validation."""
    with pytest.raises(InvalidDimensionError):
        mod_add(0, 0, 1)
    with pytest.raises(InvalidDigitError):
        mod_sub(11, 0, 11)


@pytest.mark.unit
def test_dimension_params_bound():
    """Test the input bound h for even and odd d."""
    assert DimensionParams(d=11).h == 5
    assert DimensionParams(d=8).h == 4
    with pytest.raises(ValueError):
        DimensionParams(d=1)


@pytest.mark.unit
def test_fourier_states():
    """Test Fourier basis amplitudes."""
    np.testing.assert_allclose(fourier_state(0, 2).amplitudes, [SQRT2, SQRT2])
    np.testing.assert_allclose(fourier_state(1, 2).amplitudes, [SQRT2, -SQRT2])
    omega = np.exp(2j * np.pi / 3)
    np.testing.assert_allclose(
        fourier_state(1, 3).amplitudes, np.array([1, omega, omega**2]) / np.sqrt(3)
    )
    with pytest.raises(InvalidDigitError):
        fourier_state(3, 3)


@pytest.mark.unit
def test_bell_states():
    """Test Bell state amplitudes."""
    np.testing.assert_allclose(bell_state(0, 0, 2).amplitudes, [SQRT2, 0, 0, SQRT2])
    np.testing.assert_allclose(
        bell_state(1, 0, 2).amplitudes, [SQRT2, 0, 0, -SQRT2], atol=1e-12
    )
    expected = np.zeros(9)
    expected[[1, 5, 6]] = 1 / np.sqrt(3)  # |01>, |12>, |20>
    np.testing.assert_allclose(bell_state(0, 1, 3).amplitudes, expected, atol=1e-12)
    with pytest.raises(InvalidDigitError):
        bell_state(0, 4, 4)


@pytest.mark.unit
@pytest.mark.parametrize('d', [2, 3, 5, 16])
def test_conjugate_bases_and_round_trip(d):
    """Test basis conjugacy and the Fourier round trip."""
    overlaps = np.abs(fourier_matrix(d)) ** 2
    np.testing.assert_allclose(overlaps, np.full((d, d), 1 / d), atol=1e-9)

    state = bell_state(1, 2 % d, d)
    back = inverse_fourier(apply_fourier(state, 0), 0)
    assert back.isclose(state)
    assert bell_state(d - 1, 1, d).is_normalized()


@pytest.mark.unit
def test_state_validation_and_pairs():
    """Test state validation and the (re, im) pair format."""
    with pytest.raises(InvalidDimensionError):
        AmplitudeState((2, 2), np.ones(3))
    with pytest.raises(NormalizationError):
        AmplitudeState.from_pairs([2], [[1.0, 0.0], [1.0, 0.0]])
    state = AmplitudeState.from_pairs([2], [[0.0, SQRT2], [SQRT2, 0.0]])
    assert state.to_pairs() == pytest.approx([[0.0, SQRT2], [SQRT2, 0.0]])


@pytest.mark.unit
def test_measure_own_basis_is_certain(rng):
    """Test measuring a Fourier state in its own basis."""
    for _ in range(20):
        record = measure(fourier_state(3, 7), 0, BasisChoice.T2, rng)
        assert record.outcome == 3
        assert record.post_state is None


@pytest.mark.unit
def test_measure_rejects_unnormalized_state(rng):
    """Test that measurement needs a normalized state."""
    state = AmplitudeState((2,), np.array([1.0, 1.0]))
    with pytest.raises(NormalizationError):
        measure(state, 0, BasisChoice.T1, rng)


@pytest.mark.unit
@pytest.mark.parametrize('d', range(2, 17))
def test_bell_state_joint_law_is_the_shift_correlation(d):
    """Test that T1 outcomes of every Bell state are (j, j + v) with weight 1/d."""
    expected = np.zeros((d, d))
    for v in range(d):
        expected[:] = 0
        for j in range(d):
            expected[j, mod_add(j, v, d)] = 1 / d
        for u in range(d):
            joint = bell_state(u, v, d).probabilities().reshape(d, d)
            np.testing.assert_allclose(joint, expected, atol=1e-12)


@pytest.mark.unit
@pytest.mark.parametrize('d', [2, 3, 7, 11, 16])
def test_bell_pair_sequential_measurement(d, rng):
    """Test measuring either half first through the statevector path."""
    for u in range(d):
        for v in range(d):
            first = measure(bell_state(u, v, d), 0, BasisChoice.T1, rng)
            second = measure(first.post_state, 0, BasisChoice.T1, rng)
            assert second.outcome == mod_add(first.outcome, v, d)

            last = measure(bell_state(u, v, d), 1, BasisChoice.T1, rng)
            other = measure(last.post_state, 0, BasisChoice.T1, rng)
            assert last.outcome == mod_add(other.outcome, v, d)


@pytest.mark.unit
def test_measure_uniform_superposition_frequency():
    """Test Born frequencies of a uniform superposition."""
    stream = RandomStream(7)
    trials = 10_000
    zeros = sum(
        measure(fourier_state(0, 2), 0, BasisChoice.T1, stream).outcome == 0
        for _ in range(trials)
    )
    assert within_band(zeros, trials, 0.5)


@pytest.mark.unit
@pytest.mark.parametrize('d', [2, 5, 11, 16])
def test_measure_pair_computational_correlation(d, rng):
    """Test the bulk pair sampler for every (u, v)."""
    for u in range(d):
        for v in range(d):
            m1, m2 = measure_pair_computational(u, v, d, rng)
            assert mod_add(mod_sub(m1, m2, d), v, d) == 0


@pytest.mark.unit
@pytest.mark.parametrize('d', [2, 5, 11, 16])
def test_pair_distribution_does_not_depend_on_u(d):
    """Test that the joint T1 law of both halves is the same for every u."""
    for v in range(d):
        reference = bell_state(0, v, d).probabilities().reshape(d, d)
        for u in range(1, d):
            joint = bell_state(u, v, d).probabilities().reshape(d, d)
            np.testing.assert_allclose(joint, reference, atol=1e-12)
        for half in (0, 1):
            marginal = outcome_probabilities(
                bell_state(d - 1, v, d), half, BasisChoice.T1
            )
            np.testing.assert_allclose(marginal, np.full(d, 1 / d), atol=1e-12)


@pytest.mark.unit
def test_apply_operator_on_second_subsystem():
    """Test applying an operator to one subsystem."""
    flip = np.array([[0, 1], [1, 0]])
    state = computational_state(0, 2).tensor(computational_state(0, 3))
    flipped = apply_operator(
        computational_state(0, 2).tensor(computational_state(0, 2)), flip, [1]
    )
    assert flipped.isclose(
        computational_state(0, 2).tensor(computational_state(1, 2))
    )
    with pytest.raises(InvalidDimensionError):
        apply_operator(state, flip, [1])


@pytest.mark.unit
def test_phase_sum_vanishes_off_diagonal():
    """Test the vanishing Fourier phase sum."""
    assert abs(phase_sum(2, 2, 7) - 7) < 1e-9
    assert abs(phase_sum(2, 5, 7)) < 1e-9
