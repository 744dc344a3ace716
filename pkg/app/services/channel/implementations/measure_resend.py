"""Eve measures every particle in a random conjugate basis and resends it."""

from app.core.rng import RandomStream
from app.models.channel import AttackKind
from app.models.qudit import BasisChoice
from app.services.channel.base.eavesdropper_abstract import Eavesdropper
from app.services.quantum.bell_register import LocalQudit, Qudit
from app.services.quantum.qudit_math import basis_state


class MeasureResend(Eavesdropper):
    kind = AttackKind.MEASURE_RESEND

    def __init__(self, attack_probability: float = 1.0) -> None:
        super().__init__(attack_probability)
        self.captured: list[tuple[BasisChoice, int]] = []

    def intercept(self, slot: Qudit, rng: RandomStream) -> Qudit:
        basis = BasisChoice.T1 if rng.digit(2) == 0 else BasisChoice.T2
        outcome = slot.measure(basis, rng)
        self.captured.append((basis, outcome))
        return LocalQudit(basis_state(basis, outcome, slot.d))

    def reset(self) -> None:
        self.captured = []
