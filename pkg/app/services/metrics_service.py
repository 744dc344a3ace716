import logging

from app.core.exceptions import IncompleteRunError
from app.models.metrics import EfficiencyReport
from app.models.protocol import Transcript

logger = logging.getLogger(__name__)


def efficiency_closed_form(n: int) -> EfficiencyReport:
    """2n qudits and 2n classical dits per comparison of one integer."""
    if n < 2:
        raise ValueError(f'Need at least two users, got n={n}')
    return EfficiencyReport(x=2 * n, y=2 * n, z=1)


def efficiency_from_transcript(transcript: Transcript) -> EfficiencyReport:
    """Count the resources a completed run actually logged."""
    if not transcript.completed:
        raise IncompleteRunError('Efficiency is undefined for an aborted run')
    report = EfficiencyReport(
        x=transcript.qudit_count, y=transcript.classical_dit_count, z=1
    )
    logger.debug('Transcript efficiency for n=%d: %s', transcript.n, report.eta)
    return report
