import numpy as np
import pytest

from app.core.exceptions import ProtocolDesyncError
from app.models.qudit import BasisChoice
from app.services.quantum.bell_register import (
    BellPairRegister,
    LocalQudit,
    PairPhase,
)
from app.services.quantum.qudit_math import computational_state, mod_add
from app.services.quantum.unitaries import controlled_shift_unitary


@pytest.mark.unit
@pytest.mark.parametrize('exact', [False, True])
def test_halves_stay_correlated_whichever_is_measured_first(exact, rng):
    """Test Bell correlation in either measurement order."""
    register = BellPairRegister(7, exact=exact)
    for _ in range(50):
        first, second = register.prepare(rng.digit(7), 4)
        if rng.digit(2):
            m2 = second.measure(BasisChoice.T1, rng)
            m1 = first.measure(BasisChoice.T1, rng)
        else:
            m1 = first.measure(BasisChoice.T1, rng)
            m2 = second.measure(BasisChoice.T1, rng)
        assert m2 == mod_add(m1, 4, 7)


@pytest.mark.unit
def test_pin_forces_both_outcomes(rng):
    """Test pinned pair outcomes."""
    register = BellPairRegister(11)
    first, second = register.prepare(0, 3)
    register.pin(first.pair_id, 6)
    assert second.measure(BasisChoice.T1, rng) == 9
    assert first.measure(BasisChoice.T1, rng) == 6
    assert register.phase(first.pair_id) is PairPhase.SPLIT


@pytest.mark.unit
def test_consumed_half_cannot_be_measured_again(rng):
    """Test measuring a consumed half."""
    register = BellPairRegister(3)
    first, _ = register.prepare(1, 1)
    first.measure(BasisChoice.T1, rng)
    with pytest.raises(ProtocolDesyncError):
        first.measure(BasisChoice.T1, rng)
    with pytest.raises(ProtocolDesyncError):
        register.pin(first.pair_id, 0)


@pytest.mark.unit
def test_t2_measurement_materializes_the_pair(rng):
    """Test that a T2 measurement uses the statevector."""
    register = BellPairRegister(2)
    first, second = register.prepare(0, 0)
    first.measure(BasisChoice.T2, rng)
    assert register.phase(first.pair_id) is PairPhase.SPLIT
    # After a Fourier measurement on one half the other is a Fourier state,
    # so its computational outcome is unbiased.
    state = register.state_of(second.pair_id, 1)
    np.testing.assert_allclose(state.probabilities(), [0.5, 0.5], atol=1e-12)


@pytest.mark.unit
def test_discard_keeps_partner_consistent(rng):
    """Test that a discarded half leaves its partner valid."""
    register = BellPairRegister(5)
    first, second = register.prepare(2, 1)
    first.discard(rng)
    state = register.state_of(second.pair_id, 1)
    outcome = second.measure(BasisChoice.T1, rng)
    assert state.isclose(computational_state(outcome, 5))


@pytest.mark.unit
def test_probe_coupling_copies_computational_value(rng):
    """Test probe coupling with a controlled shift."""
    unitary = controlled_shift_unitary(3, 3)
    register = BellPairRegister(3)
    first, second = register.prepare(0, 2)
    probe, forwarded = first.couple_probe(unitary, 3, rng)
    m1 = forwarded.measure(BasisChoice.T1, rng)
    assert probe == m1
    assert second.measure(BasisChoice.T1, rng) == mod_add(m1, 2, 3)

    local = LocalQudit(computational_state(1, 3))
    probe, after = local.couple_probe(unitary, 3, rng)
    assert probe == 1
    assert after.measure(BasisChoice.T1, rng) == 1
