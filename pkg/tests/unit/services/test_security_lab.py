from fractions import Fraction

import numpy as np
import pytest

from app.core.exceptions import (
    EnumerationBudgetError,
    IncompleteRunError,
    InvalidAttackError,
    InvalidDimensionError,
    OutOfDomainError,
)
from app.core.rng import RandomStream
from app.models.protocol import Announcement, ProtocolParams, UserSecret
from app.models.security import CoalitionView, KnownValues, PartyRole, RoleKind
from app.services.channel.implementations.intercept_resend import InterceptResend
from app.services.channel.implementations.measure_resend import MeasureResend
from app.services.protocol.golden import golden_walkthrough
from app.services.protocol.protocol_engine import run_protocol
from app.services.quantum.unitaries import (
    controlled_shift_unitary,
    haar_unitary,
    stealth_unitary,
)
from app.services.security.attack_lab import attack_experiment
from app.services.security.entangle_audit import (
    audit_report,
    entangle_measure_audit,
    fourier_phase_sums_vanish,
    theorem_scan,
)
from app.services.security.privacy import (
    build_coalition_view,
    coalition_consistent_set,
    ordering_permitted_set,
    otp_bijection_check,
    otp_uniformity_test,
    tp1_r_distribution,
)


@pytest.mark.unit
def test_honest_attack_experiment_detects_nothing(rng):
    """Test that an honest channel is never detected."""
    result = attack_experiment('honest', 5, 4, 2_000, rng)
    assert result.detections == 0
    assert result.empirical_rate == 0
    assert result.theoretical_rate == 0


@pytest.mark.unit
def test_attack_experiment_is_independent_of_worker_count():
    """Test that results do not depend on the thread count."""
    one = attack_experiment('measure_resend', 3, 2, 12_000, RandomStream(5), workers=1)
    four = attack_experiment(
        'measure_resend', 3, 2, 12_000, RandomStream(5), workers=4
    )
    assert one == four
    assert one.theoretical_rate == pytest.approx(5 / 9)
    assert one.ci_low <= one.empirical_rate <= one.ci_high


@pytest.mark.unit
def test_attack_experiment_csv_row(rng):
    """Test the CSV row of an experiment."""
    result = attack_experiment('intercept_resend', 11, 1, 1_000, rng)
    row = result.csv_row()
    assert list(row) == [
        'model',
        'd',
        'L',
        'trials',
        'detections',
        'empirical',
        'theoretical',
        'std_error',
    ]
    assert row['model'] == 'intercept_resend'
    assert row['theoretical'] == '0.909090909'


@pytest.mark.unit
def test_attack_experiment_rejects_zero_trials(rng):
    """Test that an experiment needs at least one trial."""
    with pytest.raises(ValueError):
        attack_experiment('honest', 2, 1, 0, rng)


@pytest.mark.unit
def test_exact_backend_matches_closed_form(rng):
    """Test the statevector backend against the closed form."""
    result = attack_experiment(
        InterceptResend(), 3, 1, 3_000, rng, exact=True
    )
    assert result.within(4)


@pytest.mark.unit
def test_exact_experiment_keeps_no_outcomes_on_the_model(rng):
    """Test that trials run on per-chunk copies with bounded memory."""
    eve = MeasureResend()
    result = attack_experiment(eve, 2, 4, 1_500, rng, exact=True, workers=3)
    assert result.trials == 1_500
    assert eve.captured == []


@pytest.mark.unit
def test_entangle_measure_experiment_has_no_closed_form(rng):
    """Test entangle-measure experiments."""
    result = attack_experiment('entangle_measure', 2, 2, 500, rng)
    assert result.theoretical_rate is None
    assert 0 < result.detections < 500


@pytest.mark.unit
def test_stealth_unitary_audit(rng):
    """Test that a probe-only unitary is stealthy and independent."""
    verdict = entangle_measure_audit(stealth_unitary(3, haar_unitary(2, rng)), 3, 2)
    assert verdict.stealthy
    assert verdict.max_error_T1 <= 1e-9
    assert verdict.max_error_T2 <= 1e-9
    assert verdict.probe_independence >= 1 - 1e-6


@pytest.mark.unit
def test_controlled_shift_audit():
    """Test that copying the value is detectable."""
    verdict = entangle_measure_audit(controlled_shift_unitary(2, 2), 2, 2)
    assert verdict.max_error_T1 == pytest.approx(0, abs=1e-9)
    assert verdict.max_error_T2 == pytest.approx(0.5, abs=1e-9)
    assert not verdict.stealthy
    assert verdict.probe_independence is None


@pytest.mark.unit
def test_haar_unitaries_are_not_stealthy():
    """Test random unitaries."""
    stream = RandomStream(17)
    for sample in stream.spawn(20):
        verdict = entangle_measure_audit(haar_unitary(6, sample), 3, 2)
        assert max(verdict.max_error_T1, verdict.max_error_T2) > 1e-9


@pytest.mark.unit
def test_audit_rejects_bad_operators():
    """Test audit input validation."""
    with pytest.raises(InvalidAttackError):
        entangle_measure_audit(np.ones((4, 4)), 2, 2)
    with pytest.raises(InvalidAttackError):
        entangle_measure_audit(np.eye(3), 2, 2)


@pytest.mark.unit
def test_theorem_scan_families(rng):
    """Test both scan families."""
    stealth = theorem_scan(2, 2, 10, rng, family='stealth')
    assert stealth.stealthy == 10
    assert stealth.violating == 0
    haar = theorem_scan(2, 2, 25, rng)
    assert haar.violating == 0
    assert haar.passed
    with pytest.raises(InvalidAttackError):
        theorem_scan(2, 2, 1, rng, family='clifford')


@pytest.mark.unit
def test_audit_report(rng):
    """Test the full audit report."""
    report = audit_report(2, 2, 5, rng)
    assert report.identity.stealthy
    assert report.identity.probe_independence == pytest.approx(1.0)
    assert report.controlled_shift.max_error_T2 == pytest.approx(0.5)
    assert report.violations == 0
    with pytest.raises(InvalidDimensionError):
        audit_report(33, 2, 1, rng)


@pytest.mark.unit
def test_fourier_phase_sums():
    """Test the phase sum identity."""
    assert all(fourier_phase_sums_vanish(d) for d in range(2, 17))


@pytest.mark.unit
def test_one_time_pad_masking(rng):
    """Test the one-time pad checks."""
    assert all(otp_bijection_check(d) for d in range(2, 17))
    assert otp_uniformity_test(11, 100_000, RandomStream(1)) > 0.01
    with pytest.raises(OutOfDomainError):
        otp_uniformity_test(11, 500, rng)


@pytest.mark.unit
def test_tp1_sees_a_coset_of_size_d_minus_h():
    """Test the distribution of r as seen by TP1."""
    law = tp1_r_distribution(p=4, v=3, d=11)
    assert len(law) == 6
    assert set(law.values()) == {Fraction(1, 6)}
    assert sum(law.values()) == 1
    shifted = tp1_r_distribution(p=0, v=3, d=11)
    assert {(r - 4) % 11 for r in shifted} == set(law)


@pytest.mark.unit
def test_ordering_permitted_set():
    """Test the values an ordering allows for one user."""
    announcement = Announcement.from_values([8, 7, 5, 9])
    assert ordering_permitted_set(announcement, 1, 5) == {2, 3, 4}
    assert ordering_permitted_set(announcement, 4, 5) == {3, 4, 5}
    assert ordering_permitted_set(announcement, 3, 5) == {0, 1, 2}


@pytest.mark.unit
def test_outside_observer_learns_only_the_ordering():
    """Test what an outside observer can infer."""
    result = golden_walkthrough()
    view = build_coalition_view(result, ['observer'])
    for target in range(1, 5):
        assert coalition_consistent_set(view, target, 11) == ordering_permitted_set(
            result.outcome, target, 5
        )
    assert len(coalition_consistent_set(view, 1, 11)) > 1


@pytest.mark.unit
def test_tp2_cannot_narrow_any_user():
    """Test that TP2 alone learns nothing about p."""
    result = golden_walkthrough()
    view = build_coalition_view(result, ['tp2'], hears_announcement=False)
    for target in range(1, 5):
        assert coalition_consistent_set(view, target, 11) == set(range(6))


@pytest.mark.unit
def test_colluding_users_keep_target_within_ordering():
    """Test collusion of all users but one."""
    result = golden_walkthrough()
    view = build_coalition_view(result, ['P1', 'P2', 'P4'])
    assert view.known.p == {1: 4, 2: 3, 4: 5}
    candidates = coalition_consistent_set(view, 3, 11)
    assert 1 in candidates
    assert candidates <= set(range(3))


@pytest.mark.unit
def test_coalition_preconditions():
    """Test coalition validation."""
    result = golden_walkthrough()
    users = build_coalition_view(result, ['P1', 'P2', 'P3', 'P4'])
    with pytest.raises(OutOfDomainError):
        coalition_consistent_set(users, 2, 11)
    with pytest.raises(ValueError):
        build_coalition_view(result, ['tp1', 'tp2'])
    with pytest.raises(EnumerationBudgetError):
        coalition_consistent_set(
            build_coalition_view(result, ['observer']), 1, 11, budget=10
        )


@pytest.mark.unit
def test_coalition_view_needs_completed_run():
    """Test that an aborted run has no coalition view."""
    params = ProtocolParams.build(d=11, n=2, L=20, seed=3)
    aborted = run_protocol(params, [UserSecret(p=1)] * 2, InterceptResend())
    with pytest.raises(IncompleteRunError):
        build_coalition_view(aborted, ['observer'])


@pytest.mark.unit
def test_party_roles():
    """Test parsing party roles."""
    assert PartyRole.parse('P3') == PartyRole(kind=RoleKind.USER, user=3)
    assert str(PartyRole.parse('TP1')) == 'tp1'
    with pytest.raises(ValueError):
        PartyRole(kind=RoleKind.TP2, user=1)
    known = KnownValues(d=3, n=2, r2=[0, 0], r=[0, 0])
    with pytest.raises(ValueError):
        CoalitionView(
            coalition=frozenset({PartyRole.parse('tp1'), PartyRole.parse('tp2')}),
            known=known,
        )
