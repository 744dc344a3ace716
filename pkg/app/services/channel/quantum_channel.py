"""Decoy-photon dressing, transmission and the two-sided security check."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from app.core.exceptions import NoClosedFormError, ProtocolDesyncError
from app.core.rng import RandomStream
from app.models.channel import AttackKind, DecoySpec, SecurityCheckReport
from app.models.qudit import BasisChoice
from app.services.channel.base.eavesdropper_abstract import Eavesdropper
from app.services.quantum.bell_register import LocalQudit, Qudit
from app.services.quantum.qudit_math import basis_state, check_dimension

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DressedSequence:
    """Carriers interleaved with decoys; ``ledger`` stays with the sender."""

    slots: tuple[Qudit, ...]
    ledger: tuple[DecoySpec, ...]

    def __post_init__(self) -> None:
        positions = [spec.position for spec in self.ledger]
        if len(set(positions)) != len(positions):
            raise ProtocolDesyncError('Decoy positions must be unique')
        if any(p >= len(self.slots) for p in positions):
            raise ProtocolDesyncError('Decoy position outside the sequence')

    @property
    def carrier_count(self) -> int:
        return len(self.slots) - len(self.ledger)


def insert_decoys(
    carriers: Sequence[Qudit], L: int, d: int, rng: RandomStream
) -> DressedSequence:
    """Interleave ``L`` random T1/T2 decoys at uniformly random positions."""
    if L < 0:
        raise ValueError(f'Decoy count must be >= 0, got {L}')
    check_dimension(d)
    total = len(carriers) + L
    positions = rng.sample_positions(total, L)
    ledger = []
    decoys: dict[int, Qudit] = {}
    for position in positions:
        basis = BasisChoice.T1 if rng.digit(2) == 0 else BasisChoice.T2
        value = rng.digit(d)
        ledger.append(DecoySpec(basis=basis, value=value, position=position))
        decoys[position] = LocalQudit(basis_state(basis, value, d))

    remaining = iter(carriers)
    slots = tuple(decoys[i] if i in decoys else next(remaining) for i in range(total))
    return DressedSequence(slots=slots, ledger=tuple(ledger))


def transmit(
    seq: DressedSequence, model: Eavesdropper, rng: RandomStream
) -> DressedSequence:
    """Send every slot through ``model``; the sender's ledger is unchanged."""
    if model.kind is AttackKind.HONEST:
        return seq
    forwarded = tuple(model.forward(slot, rng) for slot in seq.slots)
    return DressedSequence(slots=forwarded, ledger=seq.ledger)


def security_check(
    ledger: Sequence[DecoySpec], received: DressedSequence, rng: RandomStream
) -> SecurityCheckReport:
    """Measure each announced decoy in its preparation basis and compare.

    Collapses the three logical messages (announce positions and bases,
    return outcomes, compare) into one call; carriers are not touched.
    """
    mismatches = 0
    for spec in ledger:
        if not 0 <= spec.position < len(received.slots):
            raise ProtocolDesyncError(
                f'Decoy position {spec.position} outside received sequence '
                f'of length {len(received.slots)}'
            )
        outcome = received.slots[spec.position].measure(spec.basis, rng)
        if outcome != spec.value:
            mismatches += 1
    report = SecurityCheckReport(checked=len(ledger), mismatches=mismatches)
    if not report.passed:
        logger.debug(
            'Security check failed: %d of %d decoys disturbed',
            report.mismatches,
            report.checked,
        )
    return report


def strip_decoys(seq: DressedSequence, ledger: Sequence[DecoySpec]) -> list[Qudit]:
    """Carriers in their original order."""
    decoy_positions = {spec.position for spec in ledger}
    return [slot for i, slot in enumerate(seq.slots) if i not in decoy_positions]


def _attack_kind(model: Eavesdropper | AttackKind) -> tuple[AttackKind, Fraction]:
    if isinstance(model, AttackKind):
        return model, Fraction(1)
    return model.kind, Fraction(model.attack_probability).limit_denominator(10**9)


def per_decoy_detection_probability(
    model: Eavesdropper | AttackKind, d: int
) -> Fraction:
    """Probability that one attacked decoy shows a mismatch."""
    check_dimension(d)
    kind, rate = _attack_kind(model)
    if kind is AttackKind.INTERCEPT_RESEND:
        return rate * Fraction(d - 1, d)
    if kind is AttackKind.MEASURE_RESEND:
        return rate * Fraction(d - 1, 2 * d)
    raise NoClosedFormError(f'No closed-form detection probability for {kind.value}')


def detection_probability(model: Eavesdropper | AttackKind, d: int, L: int) -> Fraction:
    """Probability that at least one of ``L`` decoys reveals the attack."""
    if L < 0:
        raise ValueError(f'Decoy count must be >= 0, got {L}')
    return 1 - (1 - per_decoy_detection_probability(model, d)) ** L
