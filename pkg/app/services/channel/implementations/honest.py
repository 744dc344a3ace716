from app.core.rng import RandomStream
from app.models.channel import AttackKind
from app.services.channel.base.eavesdropper_abstract import Eavesdropper
from app.services.quantum.bell_register import Qudit


class HonestChannel(Eavesdropper):
    """Identity channel: nobody listens."""

    kind = AttackKind.HONEST

    def intercept(self, slot: Qudit, rng: RandomStream) -> Qudit:
        return slot

    def forward(self, slot: Qudit, rng: RandomStream) -> Qudit:
        return slot
