"""Run-scoped register of the Bell pairs prepared in Step 1.

Carriers travel through channels as ``CarrierRef`` handles into the register,
so an operation on one half is reflected in its partner. Decoys and qudits
forged by an eavesdropper travel as ``LocalQudit`` values.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from app.core.exceptions import InvalidDimensionError, ProtocolDesyncError
from app.core.rng import RandomStream
from app.models.qudit import BasisChoice
from app.services.quantum.qudit_math import (
    AmplitudeState,
    apply_operator,
    bell_state,
    check_digit,
    computational_state,
    measure,
    measure_pair_computational,
    mod_add,
)

logger = logging.getLogger(__name__)


class PairPhase(str, Enum):
    LAZY = 'lazy'  # only (u, v) known
    JOINT = 'joint'  # two-qudit statevector materialized
    SPLIT = 'split'  # halves independent, possibly consumed


@dataclass
class _PairEntry:
    u: int
    v: int
    phase: PairPhase = PairPhase.LAZY
    joint: AmplitudeState | None = None
    halves: list[AmplitudeState | None] = field(default_factory=lambda: [None, None])
    consumed: list[bool] = field(default_factory=lambda: [False, False])
    pinned_m1: int | None = None


def _probe_ground_state(probe_dim: int) -> AmplitudeState:
    if probe_dim < 1:
        raise InvalidDimensionError(f'Probe dimension must be >= 1, got {probe_dim}')
    amps = np.zeros(probe_dim, dtype=np.complex128)
    amps[0] = 1.0
    return AmplitudeState((probe_dim,), amps)


class BellPairRegister:
    """Holds every pair of one protocol run.

    Untouched pairs stay lazy; a T1 measurement on a lazy pair goes through
    ``measure_pair_computational``. Anything else, or ``exact=True``,
    materializes the statevector.
    """

    def __init__(self, d: int, exact: bool = False) -> None:
        self.d = d
        self.exact = exact
        self._pairs: list[_PairEntry] = []

    def __len__(self) -> int:
        return len(self._pairs)

    def prepare(self, u: int, v: int) -> tuple['CarrierRef', 'CarrierRef']:
        check_digit(u, self.d, 'u')
        check_digit(v, self.d, 'v')
        entry = _PairEntry(u=u, v=v)
        self._pairs.append(entry)
        pair_id = len(self._pairs) - 1
        return CarrierRef(self, pair_id, 0), CarrierRef(self, pair_id, 1)

    def pin(self, pair_id: int, m1: int) -> None:
        """Force the T1 outcome of the first particle (fixture runs)."""
        check_digit(m1, self.d, 'm1')
        entry = self._entry(pair_id)
        if entry.phase is PairPhase.SPLIT:
            raise ProtocolDesyncError(f'Pair {pair_id} was already measured')
        entry.pinned_m1 = m1

    def params(self, pair_id: int) -> tuple[int, int]:
        entry = self._entry(pair_id)
        return entry.u, entry.v

    def phase(self, pair_id: int) -> PairPhase:
        return self._entry(pair_id).phase

    def state_of(self, pair_id: int, half: int) -> AmplitudeState | None:
        """Single-qudit state of a half once the pair has split."""
        entry = self._entry(pair_id)
        return entry.halves[half] if entry.phase is PairPhase.SPLIT else None

    def _entry(self, pair_id: int) -> _PairEntry:
        if not 0 <= pair_id < len(self._pairs):
            raise ProtocolDesyncError(f'Unknown pair {pair_id}')
        return self._pairs[pair_id]

    def _materialize(self, entry: _PairEntry) -> None:
        if entry.phase is PairPhase.LAZY:
            entry.joint = bell_state(entry.u, entry.v, self.d)
            entry.phase = PairPhase.JOINT

    def _check_live(self, pair_id: int, half: int) -> _PairEntry:
        entry = self._entry(pair_id)
        if half not in (0, 1):
            raise ProtocolDesyncError(f'Pair half must be 0 or 1, got {half}')
        if entry.consumed[half]:
            raise ProtocolDesyncError(f'Half {half} of pair {pair_id} already consumed')
        return entry

    def measure(
        self, pair_id: int, half: int, basis: BasisChoice, rng: RandomStream
    ) -> int:
        entry = self._check_live(pair_id, half)
        basis = BasisChoice(basis)

        lazy_t1 = entry.phase is PairPhase.LAZY and basis is BasisChoice.T1
        if lazy_t1 and (not self.exact or entry.pinned_m1 is not None):
            if entry.pinned_m1 is not None:
                outcomes = (entry.pinned_m1, mod_add(entry.pinned_m1, entry.v, self.d))
            else:
                outcomes = measure_pair_computational(entry.u, entry.v, self.d, rng)
            entry.phase = PairPhase.SPLIT
            entry.consumed[half] = True
            entry.halves[1 - half] = computational_state(outcomes[1 - half], self.d)
            return outcomes[half]

        self._materialize(entry)
        if entry.phase is PairPhase.JOINT:
            assert entry.joint is not None
            record = measure(entry.joint, half, basis, rng)
            entry.phase = PairPhase.SPLIT
            entry.joint = None
            entry.consumed[half] = True
            entry.halves[1 - half] = record.post_state
            return record.outcome

        state = entry.halves[half]
        assert state is not None
        record = measure(state, 0, basis, rng)
        entry.consumed[half] = True
        entry.halves[half] = None
        return record.outcome

    def couple_probe(
        self,
        pair_id: int,
        half: int,
        unitary: np.ndarray,
        probe_dim: int,
        rng: RandomStream,
    ) -> int:
        """Entangle a fresh probe |0> with one half and read the probe out in T1."""
        entry = self._check_live(pair_id, half)
        probe = _probe_ground_state(probe_dim)
        self._materialize(entry)
        if entry.phase is PairPhase.JOINT:
            assert entry.joint is not None
            extended = apply_operator(entry.joint.tensor(probe), unitary, [half, 2])
            record = measure(extended, 2, BasisChoice.T1, rng)
            entry.joint = record.post_state
            return record.outcome

        state = entry.halves[half]
        assert state is not None
        extended = apply_operator(state.tensor(probe), unitary, [0, 1])
        record = measure(extended, 1, BasisChoice.T1, rng)
        entry.halves[half] = record.post_state
        return record.outcome

    def discard(self, pair_id: int, half: int, rng: RandomStream) -> None:
        """Remove a half from play (kept by an eavesdropper).

        The kept half is read out immediately; no measurement on it can change
        the partner's outcome statistics.
        """
        self.measure(pair_id, half, BasisChoice.T1, rng)
        logger.debug('Half %d of pair %d left the simulation', half, pair_id)


@dataclass(frozen=True)
class CarrierRef:
    """Handle to one half of a registered Bell pair."""

    register: BellPairRegister
    pair_id: int
    half: int

    @property
    def d(self) -> int:
        return self.register.d

    def measure(self, basis: BasisChoice, rng: RandomStream) -> int:
        return self.register.measure(self.pair_id, self.half, basis, rng)

    def couple_probe(
        self, unitary: np.ndarray, probe_dim: int, rng: RandomStream
    ) -> tuple[int, 'CarrierRef']:
        outcome = self.register.couple_probe(
            self.pair_id, self.half, unitary, probe_dim, rng
        )
        return outcome, self

    def discard(self, rng: RandomStream) -> None:
        self.register.discard(self.pair_id, self.half, rng)


@dataclass(frozen=True)
class LocalQudit:
    """A standalone single qudit (decoy or forged particle)."""

    state: AmplitudeState

    @property
    def d(self) -> int:
        return self.state.subsystem_dims[0]

    def measure(self, basis: BasisChoice, rng: RandomStream) -> int:
        return measure(self.state, 0, basis, rng).outcome

    def couple_probe(
        self, unitary: np.ndarray, probe_dim: int, rng: RandomStream
    ) -> tuple[int, 'LocalQudit']:
        extended = apply_operator(
            self.state.tensor(_probe_ground_state(probe_dim)), unitary, [0, 1]
        )
        record = measure(extended, 1, BasisChoice.T1, rng)
        assert record.post_state is not None
        return record.outcome, LocalQudit(record.post_state)

    def discard(self, rng: RandomStream) -> None:
        return None


Qudit = LocalQudit | CarrierRef
