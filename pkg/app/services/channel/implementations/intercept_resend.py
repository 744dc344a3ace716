"""Eve keeps every intercepted particle and forwards a forged one."""

from app.core.rng import RandomStream
from app.models.channel import AttackKind
from app.models.qudit import BasisChoice
from app.services.channel.base.eavesdropper_abstract import Eavesdropper
from app.services.quantum.bell_register import LocalQudit, Qudit
from app.services.quantum.qudit_math import basis_state


class InterceptResend(Eavesdropper):
    kind = AttackKind.INTERCEPT_RESEND

    def intercept(self, slot: Qudit, rng: RandomStream) -> Qudit:
        d = slot.d
        slot.discard(rng)
        basis = BasisChoice.T1 if rng.digit(2) == 0 else BasisChoice.T2
        return LocalQudit(basis_state(basis, rng.digit(d), d))
