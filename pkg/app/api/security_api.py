import logging

from fastapi import APIRouter, HTTPException, status

from app.core.exceptions import MQPCError
from app.core.rng import RandomStream
from app.models.security import (
    AttackExperimentResult,
    AttackRequest,
    AuditReport,
    AuditRequest,
)
from app.services.channel.factory import create_eavesdropper
from app.services.security.attack_lab import attack_experiment
from app.services.security.entangle_audit import audit_report

logger = logging.getLogger(__name__)

router = APIRouter(prefix='/security', tags=['security'])


@router.post('/attack')
def attack(request: AttackRequest) -> AttackExperimentResult:
    """Monte Carlo detection rate of an attack against L decoys."""
    rng = RandomStream(request.seed)
    try:
        model = create_eavesdropper(
            request.attack,
            d=request.d,
            params=request.attack_params,
            rng=rng.child('attack-unitary'),
        )
        return attack_experiment(
            model, request.d, request.L, request.trials, rng, exact=request.exact
        )
    except MQPCError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST, detail=str(e)
        ) from e
    except Exception as e:
        logger.error('Attack experiment failed: %s', e)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f'Attack experiment failed: {e!s}',
        ) from e


@router.post('/audit')
def audit(request: AuditRequest) -> AuditReport:
    """Audit canonical entangling attacks and scan random ones."""
    try:
        return audit_report(
            request.d, request.probe_dim, request.samples, RandomStream(request.seed)
        )
    except MQPCError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST, detail=str(e)
        ) from e
