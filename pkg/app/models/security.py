from enum import Enum
from typing import Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    model_validator,
)

from app.models.protocol import Announcement


class AttackExperimentResult(BaseModel):
    """Monte Carlo detection rate of one attack against L decoys."""

    model: str
    d: int
    L: int
    trials: int = Field(ge=1)
    detections: int = Field(ge=0)
    theoretical_rate: float | None = None
    std_error: float = Field(ge=0.0)
    ci_low: float
    ci_high: float

    @model_validator(mode='after')
    def _detections_bounded(self) -> 'AttackExperimentResult':
        if self.detections > self.trials:
            raise ValueError('detections cannot exceed trials')
        return self

    @computed_field  # type: ignore[prop-decorator]
    @property
    def empirical_rate(self) -> float:
        return self.detections / self.trials

    def within(self, standard_errors: float) -> bool:
        """Whether the empirical rate lies within k standard errors of theory."""
        if self.theoretical_rate is None:
            return True
        band = standard_errors * self.std_error + 1 / self.trials
        return abs(self.empirical_rate - self.theoretical_rate) <= band

    def csv_row(self) -> dict[str, str | int]:
        theoretical = self.theoretical_rate
        return {
            'model': self.model,
            'd': self.d,
            'L': self.L,
            'trials': self.trials,
            'detections': self.detections,
            'empirical': f'{self.empirical_rate:.9g}',
            'theoretical': '' if theoretical is None else f'{theoretical:.9g}',
            'std_error': f'{self.std_error:.9g}',
        }


CSV_FIELDS = [
    'model',
    'd',
    'L',
    'trials',
    'detections',
    'empirical',
    'theoretical',
    'std_error',
]


class EntangleMeasureVerdict(BaseModel):
    """Exact error rates of an entangling attack and, if stealthy, probe overlap."""

    d: int
    probe_dim: int
    max_error_T1: float
    max_error_T2: float
    stealthy: bool
    probe_independence: float | None = None

    @model_validator(mode='after')
    def _independence_when_stealthy(self) -> 'EntangleMeasureVerdict':
        if self.stealthy and self.probe_independence is None:
            raise ValueError('A stealthy verdict must report probe independence')
        return self


class TheoremScanSummary(BaseModel):
    d: int
    probe_dim: int
    family: str
    samples: int
    stealthy: int
    violating: int

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return self.violating == 0


class RoleKind(str, Enum):
    OBSERVER = 'observer'
    TP1 = 'tp1'
    TP2 = 'tp2'
    USER = 'user'


class PartyRole(BaseModel):
    """A participant, or an outside observer who hears classical traffic."""

    kind: RoleKind
    user: int | None = Field(default=None, ge=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode='after')
    def _user_index(self) -> 'PartyRole':
        if (self.kind is RoleKind.USER) != (self.user is not None):
            raise ValueError('Only user roles carry a user index')
        return self

    @classmethod
    def parse(cls, text: str) -> 'PartyRole':
        """Parse ``observer``, ``tp1``, ``tp2`` or ``P<i>``."""
        label = text.strip()
        if label[:1] in ('P', 'p') and label[1:].isdigit():
            return cls(kind=RoleKind.USER, user=int(label[1:]))
        return cls(kind=RoleKind(label.lower()))

    def __str__(self) -> str:
        return f'P{self.user}' if self.kind is RoleKind.USER else self.kind.value


class KnownValues(BaseModel):
    """Everything a coalition has seen or holds, keyed by 1-based user index."""

    d: int = Field(ge=2)
    n: int = Field(ge=2)
    r2: list[int]
    r: list[int]
    announcement: Announcement | None = None
    p: dict[int, int] = Field(default_factory=dict)
    k: dict[int, int] = Field(default_factory=dict)
    m1: dict[int, int] = Field(default_factory=dict)
    m2: dict[int, int] = Field(default_factory=dict)
    v: dict[int, int] = Field(default_factory=dict)
    q: int | None = None


class CoalitionView(BaseModel):
    coalition: frozenset[PartyRole]
    known: KnownValues
    hears_announcement: bool = True

    @model_validator(mode='after')
    def _third_parties_apart(self) -> 'CoalitionView':
        kinds = {role.kind for role in self.coalition}
        if {RoleKind.TP1, RoleKind.TP2} <= kinds:
            raise ValueError('TP1 and TP2 never collude')
        return self

    @property
    def user_indices(self) -> set[int]:
        return {r.user for r in self.coalition if r.user is not None}


class AttackRequest(BaseModel):
    attack: str
    d: int = Field(ge=2)
    L: int = Field(ge=0)
    trials: int = Field(ge=1)
    seed: int = 0
    exact: bool = False
    attack_params: dict[str, Any] = Field(default_factory=dict)


class AuditRequest(BaseModel):
    d: int = Field(ge=2)
    probe_dim: int = Field(default=2, ge=1)
    samples: int = Field(default=100, ge=1)
    seed: int = 0


class AuditReport(BaseModel):
    """Canonical entangling attacks plus a random scan for one (d, probe_dim)."""

    identity: EntangleMeasureVerdict
    controlled_shift: EntangleMeasureVerdict
    scans: list[TheoremScanSummary]

    @computed_field  # type: ignore[prop-decorator]
    @property
    def violations(self) -> int:
        return sum(scan.violating for scan in self.scans)
