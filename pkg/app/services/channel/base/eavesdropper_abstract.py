from abc import ABC, abstractmethod

from app.core.rng import RandomStream
from app.models.channel import AttackKind
from app.services.quantum.bell_register import Qudit


class Eavesdropper(ABC):
    """Interface for an attack on qudits in flight."""

    kind: AttackKind

    def __init__(self, attack_probability: float = 1.0) -> None:
        if not 0.0 <= attack_probability <= 1.0:
            raise ValueError(
                f'attack_probability must lie in [0, 1], got {attack_probability}'
            )
        self.attack_probability = attack_probability

    @abstractmethod
    def intercept(self, slot: Qudit, rng: RandomStream) -> Qudit:
        """Attack one slot and return what is forwarded to the receiver."""
        pass

    def forward(self, slot: Qudit, rng: RandomStream) -> Qudit:
        """Attack ``slot`` with probability ``attack_probability``."""
        if self.attack_probability >= 1.0 or rng.random() < self.attack_probability:
            return self.intercept(slot, rng)
        return slot

    def reset(self) -> None:
        """Forget anything kept from earlier interceptions."""
        pass

    @property
    def name(self) -> str:
        return self.kind.value
