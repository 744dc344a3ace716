"""Eve couples each particle to a private probe through a unitary U_E."""

import numpy as np

from app.core.exceptions import InvalidAttackError
from app.core.rng import RandomStream
from app.models.channel import AttackKind
from app.services.channel.base.eavesdropper_abstract import Eavesdropper
from app.services.quantum.bell_register import Qudit
from app.services.quantum.qudit_math import is_unitary


class EntangleMeasure(Eavesdropper):
    """Probes start in |0>; U_E acts on (system, probe) in that order.

    Each probe is read out in the computational basis at interception and
    the outcome kept in ``captured``.
    """

    kind = AttackKind.ENTANGLE_MEASURE

    def __init__(
        self,
        attack_unitary: np.ndarray,
        d: int,
        probe_dim: int,
        attack_probability: float = 1.0,
    ) -> None:
        super().__init__(attack_probability)
        unitary = np.asarray(attack_unitary, dtype=np.complex128)
        size = d * probe_dim
        if unitary.shape != (size, size):
            raise InvalidAttackError(
                f'Attack operator has shape {unitary.shape}, expected ({size}, {size})'
            )
        if not is_unitary(unitary):
            raise InvalidAttackError('Attack operator is not unitary')
        self.attack_unitary = unitary
        self.d = d
        self.probe_dim = probe_dim
        self.captured: list[int] = []

    def intercept(self, slot: Qudit, rng: RandomStream) -> Qudit:
        if slot.d != self.d:
            raise InvalidAttackError(
                f'Attack built for d={self.d} applied to a d={slot.d} qudit'
            )
        outcome, forwarded = slot.couple_probe(
            self.attack_unitary, self.probe_dim, rng
        )
        self.captured.append(outcome)
        return forwarded

    def reset(self) -> None:
        self.captured = []
