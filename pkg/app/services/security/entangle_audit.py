"""Numeric audit of entangling attacks on decoy qudits.

An attack U_E on (system ⊗ probe) that never disturbs a decoy in either
basis must leave the probe in the same state whatever the decoy was. The
audit computes the exact disturbance of every basis state and, for
undisturbing attacks, the overlap of the probe states conditioned on each
prepared value.
"""

import itertools
import logging

import numpy as np

from app.core.config import settings
from app.core.exceptions import InvalidAttackError, InvalidDimensionError
from app.core.rng import RandomStream
from app.models.qudit import BasisChoice
from app.models.security import (
    AuditReport,
    EntangleMeasureVerdict,
    TheoremScanSummary,
)
from app.services.quantum.qudit_math import (
    AmplitudeState,
    apply_operator,
    basis_state,
    check_dimension,
    is_unitary,
    outcome_probabilities,
    phase_sum,
)
from app.services.quantum.unitaries import (
    controlled_shift_unitary,
    haar_unitary,
    stealth_unitary,
)

logger = logging.getLogger(__name__)

SCAN_FAMILIES = ('haar', 'stealth')


def _evolve(
    unitary: np.ndarray, basis: BasisChoice, t: int, d: int, probe_dim: int
) -> AmplitudeState:
    probe = np.zeros(probe_dim, dtype=np.complex128)
    probe[0] = 1.0
    start = basis_state(basis, t, d).tensor(AmplitudeState((probe_dim,), probe))
    return apply_operator(start, unitary, [0, 1])


def _conditioned_probe(
    state: AmplitudeState, basis: BasisChoice, t: int, d: int
) -> np.ndarray | None:
    """Probe state left after projecting the system back onto its preparation."""
    bra = basis_state(basis, t, d).amplitudes.conj()
    probe = bra @ state.as_tensor()
    norm = np.linalg.norm(probe)
    return None if norm == 0 else probe / norm


def entangle_measure_audit(
    attack_unitary: np.ndarray,
    d: int,
    probe_dim: int,
    tol: float | None = None,
) -> EntangleMeasureVerdict:
    """Exact per-basis error rates of ``attack_unitary`` and probe independence."""
    check_dimension(d)
    tol = settings.STEALTH_TOL if tol is None else tol
    unitary = np.asarray(attack_unitary, dtype=np.complex128)
    size = d * probe_dim
    if unitary.shape != (size, size):
        raise InvalidAttackError(
            f'Attack operator has shape {unitary.shape}, expected ({size}, {size})'
        )
    if not is_unitary(unitary):
        raise InvalidAttackError('Attack operator is not unitary')

    max_error = {BasisChoice.T1: 0.0, BasisChoice.T2: 0.0}
    probes: list[np.ndarray | None] = []
    for basis in (BasisChoice.T1, BasisChoice.T2):
        for t in range(d):
            evolved = _evolve(unitary, basis, t, d, probe_dim)
            kept = outcome_probabilities(evolved, 0, basis)[t]
            max_error[basis] = max(max_error[basis], float(1 - kept))
            probes.append(_conditioned_probe(evolved, basis, t, d))

    stealthy = max(max_error.values()) <= tol
    independence = None
    if stealthy:
        vectors = [p for p in probes if p is not None]
        pairs = itertools.combinations(vectors, 2)
        independence = min(
            (float(abs(np.vdot(a, b)) ** 2) for a, b in pairs), default=1.0
        )
    return EntangleMeasureVerdict(
        d=d,
        probe_dim=probe_dim,
        max_error_T1=max_error[BasisChoice.T1],
        max_error_T2=max_error[BasisChoice.T2],
        stealthy=stealthy,
        probe_independence=independence,
    )


def theorem_scan(
    d: int,
    probe_dim: int,
    samples: int,
    rng: RandomStream,
    tol: float | None = None,
    fidelity_tol: float | None = None,
    family: str = 'haar',
) -> TheoremScanSummary:
    """Audit ``samples`` random attacks; a stealthy attack must leave the probe
    independent of the decoy, anything else counts as a violation.
    """
    if samples < 1:
        raise ValueError(f'samples must be >= 1, got {samples}')
    if family not in SCAN_FAMILIES:
        raise InvalidAttackError(f'Unknown unitary family: {family!r}')
    fidelity_tol = settings.FIDELITY_TOL if fidelity_tol is None else fidelity_tol

    stealthy = violating = 0
    for stream in rng.spawn(samples):
        if family == 'stealth':
            unitary = stealth_unitary(d, haar_unitary(probe_dim, stream))
        else:
            unitary = haar_unitary(d * probe_dim, stream)
        verdict = entangle_measure_audit(unitary, d, probe_dim, tol)
        if verdict.stealthy:
            stealthy += 1
            assert verdict.probe_independence is not None
            if verdict.probe_independence < 1 - fidelity_tol:
                violating += 1
                logger.error('Stealthy attack with informative probe found')
    logger.info(
        'Theorem scan d=%d probe=%d family=%s: %d/%d stealthy, %d violating',
        d,
        probe_dim,
        family,
        stealthy,
        samples,
        violating,
    )
    return TheoremScanSummary(
        d=d,
        probe_dim=probe_dim,
        family=family,
        samples=samples,
        stealthy=stealthy,
        violating=violating,
    )


def fourier_phase_sums_vanish(d: int, tol: float | None = None) -> bool:
    """Phase sums over alpha vanish for t != gamma and equal d otherwise."""
    tol = settings.NORM_TOL if tol is None else tol
    for t in range(d):
        for gamma in range(d):
            expected = d if t == gamma else 0
            if abs(phase_sum(t, gamma, d) - expected) > tol:
                return False
    return True


def audit_report(
    d: int, probe_dim: int, samples: int, rng: RandomStream
) -> AuditReport:
    """Audit the identity and controlled-shift attacks and scan both families."""
    size = d * probe_dim
    if size > settings.MAX_DIMENSION:
        raise InvalidDimensionError(
            f'd * probe_dim = {size} exceeds the audit limit {settings.MAX_DIMENSION}'
        )
    return AuditReport(
        identity=entangle_measure_audit(np.eye(size), d, probe_dim),
        controlled_shift=entangle_measure_audit(
            controlled_shift_unitary(d, probe_dim), d, probe_dim
        ),
        scans=[
            theorem_scan(d, probe_dim, samples, rng.child(family), family=family)
            for family in SCAN_FAMILIES
        ],
    )
