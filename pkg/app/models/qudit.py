from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, computed_field


class BasisChoice(str, Enum):
    """The two conjugate measurement bases."""

    T1 = 'T1'  # computational basis
    T2 = 'T2'  # discrete Fourier basis


class DimensionParams(BaseModel):
    """Qudit dimension ``d`` and the matching input bound ``h``."""

    d: int = Field(ge=2)

    model_config = ConfigDict(frozen=True)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def h(self) -> int:
        return self.d // 2
