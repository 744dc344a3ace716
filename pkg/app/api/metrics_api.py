from fastapi import APIRouter, HTTPException, status

from app.models.metrics import EfficiencyReport
from app.services.metrics_service import efficiency_closed_form

router = APIRouter(prefix='/metrics', tags=['metrics'])


@router.get('/efficiency/{n}')
async def efficiency(n: int) -> EfficiencyReport:
    """Closed-form qudit efficiency for n users."""
    try:
        return efficiency_closed_form(n)
    except ValueError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST, detail=str(e)
        ) from e
