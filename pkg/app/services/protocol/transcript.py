from typing import Any

from app.models.protocol import Transcript, TranscriptEvent


class TranscriptRecorder:
    """Append-only writer for a run's transcript.

    Qudits are counted when carriers are prepared and classical dits when the
    r values are sent; check traffic and key pre-sharing are logged but not
    counted.
    """

    def __init__(self, n: int) -> None:
        self.transcript = Transcript(n=n)

    def quantum(
        self, step: int, sender: str, receiver: str, summary: str, qudits: int = 0
    ) -> None:
        self.transcript.events.append(
            TranscriptEvent(
                step=step,
                channel='quantum',
                sender=sender,
                receiver=receiver,
                summary=summary,
            )
        )
        self.transcript.qudit_count += qudits

    def classical(
        self,
        step: int,
        sender: str,
        receiver: str,
        summary: str,
        payload: dict[str, Any] | None = None,
        dits: int = 0,
        check_traffic: bool = False,
    ) -> None:
        self.transcript.events.append(
            TranscriptEvent(
                step=step,
                channel='classical',
                sender=sender,
                receiver=receiver,
                summary=summary,
                payload=payload or {},
                check_traffic=check_traffic,
            )
        )
        self.transcript.classical_dit_count += dits

    def complete(self) -> Transcript:
        self.transcript.completed = True
        return self.transcript
