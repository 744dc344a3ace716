from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from app.models.qudit import BasisChoice


class AttackKind(str, Enum):
    """Eavesdropper strategies on a quantum channel."""

    HONEST = 'honest'
    INTERCEPT_RESEND = 'intercept_resend'
    MEASURE_RESEND = 'measure_resend'
    ENTANGLE_MEASURE = 'entangle_measure'


class DecoySpec(BaseModel):
    """Preparation record of one decoy photon, private to the sender."""

    basis: BasisChoice
    value: int = Field(ge=0)
    position: int = Field(ge=0)

    model_config = ConfigDict(frozen=True)


class SecurityCheckReport(BaseModel):
    """Outcome of comparing measured decoys with their preparation."""

    checked: int = Field(ge=0)
    mismatches: int = Field(ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode='after')
    def _mismatches_bounded(self) -> 'SecurityCheckReport':
        if self.mismatches > self.checked:
            raise ValueError('mismatches cannot exceed checked decoys')
        return self

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return self.mismatches == 0
