from fractions import Fraction

from pydantic import BaseModel, Field, computed_field


class EfficiencyReport(BaseModel):
    """Qudit efficiency eta = z / (x + y), kept as an exact rational."""

    x: int = Field(ge=0, description='Qudits consumed, decoys excluded')
    y: int = Field(ge=0, description='Classical dits, check traffic excluded')
    z: int = Field(default=1, ge=1, description='Length of the compared integer')

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.z, self.x + self.y)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def eta(self) -> str:
        value = self.fraction
        return f'{value.numerator}/{value.denominator}'

    @computed_field  # type: ignore[prop-decorator]
    @property
    def eta_decimal(self) -> str:
        return f'{float(self.fraction):.9g}'
