import logging
from typing import Any

from fastapi import APIRouter, HTTPException, status

from app.core.exceptions import MQPCError
from app.models.protocol import RunConfig
from app.services.protocol.golden import golden_walkthrough, walkthrough_report
from app.services.protocol.protocol_engine import run_from_config

logger = logging.getLogger(__name__)

router = APIRouter(prefix='/protocol', tags=['protocol'])


@router.get('/demo')
async def demo() -> dict[str, Any]:
    """Four-user walkthrough with every intermediate value."""
    return walkthrough_report(golden_walkthrough())


@router.post('/run')
def run(config: RunConfig) -> dict[str, Any]:
    """Execute the seven protocol steps for one configuration."""
    try:
        result = run_from_config(config)
    except MQPCError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST, detail=str(e)
        ) from e
    except Exception as e:
        logger.error('Protocol run failed: %s', e)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f'Protocol run failed: {e!s}',
        ) from e
    return result.summary()
