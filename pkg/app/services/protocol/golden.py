"""Fixed four-user walkthrough with d = 11, used as a regression fixture."""

from typing import Any

from app.models.protocol import (
    Announcement,
    PinnedValues,
    ProtocolParams,
    RunResult,
    UserSecret,
)
from app.services.protocol.protocol_engine import run_protocol

GOLDEN_D = 11
GOLDEN_P = (4, 3, 1, 5)
GOLDEN_PINNED = PinnedValues(
    v=[3, 4, 5, 6],
    k=[7, 8, 6, 2],
    q=6,
    m1=[6, 9, 8, 3],
    m2=[9, 2, 2, 9],
)

# Expected intermediate values of the walkthrough
GOLDEN_R2 = (9, 2, 9, 5)
GOLDEN_R1 = (8, 1, 9, 0)
GOLDEN_R = (10, 10, 0, 6)
GOLDEN_M = (8, 7, 5, 9)
GOLDEN_ANNOUNCEMENT = 'P4>P1>P2>P3'


def golden_walkthrough(L: int = 4, seed: int = 0) -> RunResult:
    """Run the walkthrough over honest channels with every draw pinned."""
    params = ProtocolParams.build(GOLDEN_D, len(GOLDEN_P), L, seed)
    secrets = [UserSecret(p=p) for p in GOLDEN_P]
    return run_protocol(params, secrets, pinned=GOLDEN_PINNED)


def reference_mismatches(result: RunResult) -> list[str]:
    """Names of intermediates that differ from the expected walkthrough."""
    internals = result.internals
    expected = {
        'v': tuple(GOLDEN_PINNED.v),
        'k': tuple(GOLDEN_PINNED.k),
        'm1': tuple(GOLDEN_PINNED.m1),
        'm2': tuple(GOLDEN_PINNED.m2 or ()),
        'q': GOLDEN_PINNED.q,
        'r2': GOLDEN_R2,
        'r1': GOLDEN_R1,
        'r': GOLDEN_R,
        'M': GOLDEN_M,
    }
    mismatches = []
    for name, want in expected.items():
        got = getattr(internals, name)
        got = tuple(got) if isinstance(got, list) else got
        if got != want:
            mismatches.append(f'{name}: expected {want}, got {got}')
    rendered = (
        result.outcome.render() if isinstance(result.outcome, Announcement) else None
    )
    if rendered != GOLDEN_ANNOUNCEMENT:
        mismatches.append(
            f'announcement: expected {GOLDEN_ANNOUNCEMENT}, got {rendered}'
        )
    return mismatches


def walkthrough_report(result: RunResult) -> dict[str, Any]:
    internals = result.internals
    mismatches = reference_mismatches(result)
    return {
        'd': GOLDEN_D,
        'p': list(GOLDEN_P),
        **internals.model_dump(
            include={'v', 'k', 'm1', 'm2', 'q', 'r2', 'r1', 'r', 'M'}
        ),
        'announcement': (
            result.outcome.render()
            if isinstance(result.outcome, Announcement)
            else None
        ),
        'matches_reference': not mismatches,
        'mismatches': mismatches,
    }
