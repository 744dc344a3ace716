import json
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.channel import SecurityCheckReport
from app.models.qudit import DimensionParams


class ProtocolParams(BaseModel):
    """Public configuration of one protocol run."""

    dims: DimensionParams
    n: int = Field(ge=2)
    L: int = Field(ge=0)
    seed: int = 0
    test_mode: bool = False
    exact_pairs: bool = False

    model_config = ConfigDict(frozen=True)

    @model_validator(mode='after')
    def _decoys_required(self) -> 'ProtocolParams':
        if self.L < 1 and not self.test_mode:
            raise ValueError('L must be >= 1 outside test mode')
        return self

    @classmethod
    def build(
        cls, d: int, n: int, L: int, seed: int = 0, **kwargs: Any
    ) -> 'ProtocolParams':
        return cls(dims=DimensionParams(d=d), n=n, L=L, seed=seed, **kwargs)

    @property
    def d(self) -> int:
        return self.dims.d

    @property
    def h(self) -> int:
        return self.dims.h


class UserSecret(BaseModel):
    """A user's private integer and, once distributed, the key shared with TP2."""

    p: int = Field(ge=0)
    k: int | None = Field(default=None, ge=0)

    model_config = ConfigDict(frozen=True)


class Announcement(BaseModel):
    """Tie-aware descending ordering of users (1-based indices)."""

    classes: list[list[int]]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode='after')
    def _partition(self) -> 'Announcement':
        members = [i for cls in self.classes for i in cls]
        if any(not cls for cls in self.classes):
            raise ValueError('Equivalence classes must be non-empty')
        if sorted(members) != list(range(1, len(members) + 1)):
            raise ValueError('Classes must partition the users 1..n')
        return self

    @classmethod
    def from_values(cls, values: list[int]) -> 'Announcement':
        """Group users by value, largest first."""
        groups: dict[int, list[int]] = {}
        for index, value in enumerate(values, start=1):
            groups.setdefault(value, []).append(index)
        return cls(classes=[groups[v] for v in sorted(groups, reverse=True)])

    @property
    def n(self) -> int:
        return sum(len(cls) for cls in self.classes)

    def class_of(self, user: int) -> int:
        for rank, cls in enumerate(self.classes):
            if user in cls:
                return rank
        raise ValueError(f'User {user} not in announcement')

    def render(self) -> str:
        return '>'.join('='.join(f'P{i}' for i in cls) for cls in self.classes)


class TranscriptEvent(BaseModel):
    """One logical message on a quantum or classical channel."""

    step: int
    channel: Literal['quantum', 'classical']
    sender: str = Field(serialization_alias='from')
    receiver: str = Field(serialization_alias='to')
    summary: str
    payload: dict[str, Any] = Field(default_factory=dict)
    check_traffic: bool = False

    def export(self) -> dict[str, Any]:
        return self.model_dump(
            by_alias=True, include={'step', 'channel', 'sender', 'receiver', 'summary'}
        )


class Transcript(BaseModel):
    """Append-only record of a run plus resource counters."""

    events: list[TranscriptEvent] = Field(default_factory=list)
    n: int = 0
    qudit_count: int = 0
    classical_dit_count: int = 0
    completed: bool = False

    def classical_payloads(self, step: int) -> list[dict[str, Any]]:
        return [
            e.payload
            for e in self.events
            if e.step == step and e.channel == 'classical' and not e.check_traffic
        ]

    def to_jsonl(self) -> str:
        lines = [json.dumps(event.export()) for event in self.events]
        lines.append(
            json.dumps(
                {
                    'summary': True,
                    'completed': self.completed,
                    'qudit_count': self.qudit_count,
                    'classical_dit_count': self.classical_dit_count,
                }
            )
        )
        return '\n'.join(lines) + '\n'


class Aborted(BaseModel):
    """Run stopped because an eavesdropping check failed."""

    outcome: Literal['aborted'] = 'aborted'
    step: int
    channel: str
    report: SecurityCheckReport


class PinnedValues(BaseModel):
    """Values injected in place of random draws (fixture runs)."""

    v: list[int]
    k: list[int]
    q: int
    m1: list[int]
    m2: list[int] | None = None
    u: list[int] | None = None


class ProtocolInternals(BaseModel):
    """Omniscient view of a run; no single party sees all of it."""

    d: int | None = None
    u: list[int] = Field(default_factory=list)
    v: list[int] = Field(default_factory=list)
    k: list[int] = Field(default_factory=list)
    q: int | None = None
    m1: list[int] = Field(default_factory=list)
    m2: list[int] = Field(default_factory=list)
    r2: list[int] = Field(default_factory=list)
    r1: list[int] = Field(default_factory=list)
    r: list[int] = Field(default_factory=list)
    M: list[int] = Field(default_factory=list)


class RunResult(BaseModel):
    outcome: Announcement | Aborted
    transcript: Transcript
    internals: ProtocolInternals

    @property
    def completed(self) -> bool:
        return isinstance(self.outcome, Announcement)

    def summary(self) -> dict[str, Any]:
        """Party-visible result: announcement or abort record, transcript, counters."""
        outcome = self.outcome
        if isinstance(outcome, Announcement):
            announcement, aborted = outcome.render(), None
        else:
            announcement, aborted = None, outcome.model_dump()
        return {
            'outcome': 'completed' if aborted is None else 'aborted',
            'announcement': announcement,
            'aborted': aborted,
            'events': [event.export() for event in self.transcript.events],
            'qudit_count': self.transcript.qudit_count,
            'classical_dit_count': self.transcript.classical_dit_count,
        }


class RunConfig(BaseModel):
    """Run configuration file / request body."""

    d: int = Field(ge=2)
    n: int = Field(ge=2)
    L: int = Field(ge=1)
    seed: int = 0
    p: list[int]
    attack: str = 'honest'
    attack_params: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode='after')
    def _secrets_in_domain(self) -> 'RunConfig':
        if len(self.p) != self.n:
            raise ValueError(f'Expected {self.n} private integers, got {len(self.p)}')
        h = self.d // 2
        if any(not 0 <= p <= h for p in self.p):
            raise ValueError(f'Private integers must lie in [0, {h}]')
        return self

    def to_params(self) -> ProtocolParams:
        return ProtocolParams.build(self.d, self.n, self.L, self.seed)

    def to_secrets(self) -> list[UserSecret]:
        return [UserSecret(p=p) for p in self.p]
