"""Per-party state for one protocol run.

Each party moves through its phases in protocol order; an out-of-order
transition means the simulation lost step with the protocol.
"""

from dataclasses import dataclass, field
from enum import Enum

from app.core.exceptions import OutOfDomainError, ProtocolDesyncError
from app.models.protocol import UserSecret
from app.services.quantum.bell_register import CarrierRef, Qudit


class Tp1Phase(str, Enum):
    PREPARED = 'prepared'
    S1_SENT = 's1_sent'
    DISTRIBUTED = 'distributed'
    ANNOUNCED = 'announced'
    ABORTED = 'aborted'


class Tp2Phase(str, Enum):
    WAITING = 'waiting'
    HOLDS_S1 = 'holds_s1'
    SENT_R = 'sent_r'
    ABORTED = 'aborted'


class UserPhase(str, Enum):
    WAITING = 'waiting'
    HOLDS_QUDIT = 'holds_qudit'
    SENT_R2 = 'sent_r2'
    INFORMED = 'informed'


_TP1_FLOW = {
    Tp1Phase.PREPARED: {Tp1Phase.S1_SENT, Tp1Phase.ABORTED},
    Tp1Phase.S1_SENT: {Tp1Phase.DISTRIBUTED, Tp1Phase.ABORTED},
    Tp1Phase.DISTRIBUTED: {Tp1Phase.ANNOUNCED},
}
_TP2_FLOW = {
    Tp2Phase.WAITING: {Tp2Phase.HOLDS_S1, Tp2Phase.ABORTED},
    Tp2Phase.HOLDS_S1: {Tp2Phase.SENT_R, Tp2Phase.ABORTED},
}
_USER_FLOW = {
    UserPhase.WAITING: {UserPhase.HOLDS_QUDIT},
    UserPhase.HOLDS_QUDIT: {UserPhase.SENT_R2},
    UserPhase.SENT_R2: {UserPhase.INFORMED},
}


def _check_transition(party: str, flow: dict, current: Enum, target: Enum) -> None:
    if target not in flow.get(current, set()):
        raise ProtocolDesyncError(
            f'{party} cannot move from {current.value} to {target.value}'
        )


@dataclass
class Tp1State:
    v_list: list[int]
    u_list: list[int]
    s1_carriers: list[CarrierRef]
    r_vector_received: list[int] | None = None
    phase: Tp1Phase = Tp1Phase.PREPARED

    def advance(self, target: Tp1Phase) -> None:
        _check_transition('TP1', _TP1_FLOW, self.phase, target)
        self.phase = target


@dataclass
class Tp2State:
    d: int
    k_list: list[int]
    q: int | None = None
    s1_received: list[Qudit] = field(default_factory=list)
    m1_list: list[int] = field(default_factory=list)
    r2_received: list[int] = field(default_factory=list)
    phase: Tp2Phase = Tp2Phase.WAITING

    def advance(self, target: Tp2Phase) -> None:
        _check_transition('TP2', _TP2_FLOW, self.phase, target)
        self.phase = target

    def set_q(self, q: int) -> None:
        h = self.d // 2
        if not h <= q <= self.d - 1:
            raise OutOfDomainError(f'q must lie in [{h}, {self.d - 1}], got {q}')
        self.q = q


@dataclass
class UserState:
    index: int
    secret: UserSecret
    qudit: Qudit | None = None
    m2: int | None = None
    r2: int | None = None
    announcement: str | None = None
    phase: UserPhase = UserPhase.WAITING

    @property
    def name(self) -> str:
        return f'P{self.index}'

    def advance(self, target: UserPhase) -> None:
        _check_transition(self.name, _USER_FLOW, self.phase, target)
        self.phase = target
