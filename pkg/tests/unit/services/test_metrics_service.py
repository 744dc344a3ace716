from fractions import Fraction

import pytest

from app.core.exceptions import IncompleteRunError
from app.models.metrics import EfficiencyReport
from app.models.protocol import ProtocolParams, UserSecret
from app.services.channel.implementations.intercept_resend import InterceptResend
from app.services.metrics_service import (
    efficiency_closed_form,
    efficiency_from_transcript,
)
from app.services.protocol.golden import golden_walkthrough
from app.services.protocol.protocol_engine import run_protocol


@pytest.mark.unit
def test_closed_form_examples():
    """Test the closed form for small n."""
    assert efficiency_closed_form(4).fraction == Fraction(1, 16)
    assert efficiency_closed_form(2).eta == '1/8'
    report = efficiency_closed_form(3)
    assert report.x + report.y == 12
    with pytest.raises(ValueError):
        efficiency_closed_form(1)


@pytest.mark.unit
def test_report_serialization():
    """Test the efficiency report serialization."""
    report = EfficiencyReport(x=8, y=8, z=1)
    assert report.model_dump() == {
        'x': 8,
        'y': 8,
        'z': 1,
        'eta': '1/16',
        'eta_decimal': '0.0625',
    }
    assert EfficiencyReport(x=6, y=6).eta_decimal == '0.0833333333'


@pytest.mark.unit
def test_transcript_matches_closed_form():
    """Test that a completed transcript counts 2n qudits and 2n dits."""
    result = golden_walkthrough()
    assert efficiency_from_transcript(result.transcript) == efficiency_closed_form(4)


@pytest.mark.unit
def test_aborted_transcript_has_no_efficiency():
    """Test that an aborted run has no efficiency."""
    params = ProtocolParams.build(d=11, n=2, L=20, seed=8)
    result = run_protocol(params, [UserSecret(p=0)] * 2, InterceptResend())
    with pytest.raises(IncompleteRunError):
        efficiency_from_transcript(result.transcript)
