"""The seven-step comparison protocol with two semi-honest third parties.

TP1 prepares Bell pairs and announces the result, TP2 unmasks the users'
values with the pre-shared keys, and each user P_i contributes one masked
digit. Every message goes through a ``TranscriptRecorder``.
"""

import logging
from collections.abc import Collection, Sequence
from dataclasses import dataclass
from pathlib import Path

from app.core.exceptions import (
    OutOfDomainError,
    ProtocolDesyncError,
)
from app.core.rng import RandomStream
from app.models.protocol import (
    Aborted,
    Announcement,
    PinnedValues,
    ProtocolInternals,
    ProtocolParams,
    RunConfig,
    RunResult,
    UserSecret,
)
from app.models.qudit import BasisChoice
from app.services.channel.base.eavesdropper_abstract import Eavesdropper
from app.services.channel.factory import create_eavesdropper
from app.services.channel.implementations.honest import HonestChannel
from app.services.channel.quantum_channel import (
    insert_decoys,
    security_check,
    strip_decoys,
    transmit,
)
from app.services.protocol.parties import (
    Tp1Phase,
    Tp1State,
    Tp2Phase,
    Tp2State,
    UserPhase,
    UserState,
)
from app.services.protocol.transcript import TranscriptRecorder
from app.services.quantum.bell_register import BellPairRegister, CarrierRef, Qudit
from app.services.quantum.qudit_math import check_digit, mod_add, mod_sub

logger = logging.getLogger(__name__)

_HONEST = HonestChannel()


@dataclass(frozen=True)
class Tp2Computation:
    q: int
    m1_list: list[int]
    r1_list: list[int]
    r_vector: list[int]


def simulated_qkd(n: int, d: int, rng: RandomStream) -> list[int]:
    """Stand-in for QKD: n independent uniform key digits."""
    if n < 1:
        raise ValueError(f'Need at least one key, got n={n}')
    check_digit(0, d)
    return [rng.digit(d) for _ in range(n)]


def step1_prepare(
    params: ProtocolParams,
    rng: RandomStream,
    pinned: PinnedValues | None = None,
    recorder: TranscriptRecorder | None = None,
) -> tuple[Tp1State, list[CarrierRef], list[CarrierRef]]:
    """TP1 prepares n Bell pairs and splits them into S1 and S2."""
    d, n = params.d, params.n
    register = BellPairRegister(d, exact=params.exact_pairs)
    u_list = list(pinned.u) if pinned and pinned.u else [rng.digit(d) for _ in range(n)]
    v_list = list(pinned.v) if pinned else [rng.digit(d) for _ in range(n)]

    s1: list[CarrierRef] = []
    s2: list[CarrierRef] = []
    for i in range(n):
        first, second = register.prepare(u_list[i], v_list[i])
        if pinned:
            register.pin(first.pair_id, pinned.m1[i])
        s1.append(first)
        s2.append(second)

    if recorder:
        recorder.quantum(
            1, 'TP1', 'TP1', f'prepared {n} Bell pairs (S1, S2)', qudits=2 * n
        )
    logger.debug('Step 1: prepared %d Bell pairs', n)
    return Tp1State(v_list=v_list, u_list=u_list, s1_carriers=s1), s1, s2


def _send_checked(
    carriers: Sequence[Qudit],
    params: ProtocolParams,
    model: Eavesdropper,
    rng: RandomStream,
    recorder: TranscriptRecorder | None,
    step: int,
    receiver: str,
    channel: str,
    check_step: int | None = None,
) -> list[Qudit] | Aborted:
    """Dress, transmit, check and strip one quantum transmission."""
    check_step = step if check_step is None else check_step
    seq = insert_decoys(carriers, params.L, params.d, rng.child('decoys'))
    received = transmit(seq, model, rng.child('eavesdropper'))
    report = security_check(seq.ledger, received, rng.child('check'))

    if recorder:
        recorder.quantum(
            step,
            'TP1',
            receiver,
            f'{channel}: {len(carriers)} carriers + {len(seq.ledger)} decoys',
        )
        recorder.classical(
            check_step,
            'TP1',
            receiver,
            f'{channel}: decoy positions and bases',
            check_traffic=True,
        )
        recorder.classical(
            check_step,
            receiver,
            'TP1',
            f'{channel}: decoy outcomes',
            check_traffic=True,
        )
        recorder.classical(
            check_step,
            'TP1',
            receiver,
            f'{channel}: check {"passed" if report.passed else "failed"}',
            payload=report.model_dump(),
            check_traffic=True,
        )

    if not report.passed:
        logger.info('Channel %s aborted at step %d', channel, check_step)
        return Aborted(step=check_step, channel=channel, report=report)
    return strip_decoys(received, seq.ledger)


def step2_send_s1(
    s1: Sequence[Qudit],
    params: ProtocolParams,
    model: Eavesdropper,
    rng: RandomStream,
    recorder: TranscriptRecorder | None = None,
) -> list[Qudit] | Aborted:
    """S1 (dressed as S1') goes from TP1 to TP2 and is checked."""
    return _send_checked(s1, params, model, rng, recorder, 2, 'TP2', 's1')


def step3_4_distribute(
    s2: Sequence[Qudit],
    params: ProtocolParams,
    model: Eavesdropper,
    rng: RandomStream,
    recorder: TranscriptRecorder | None = None,
    attacked_channels: Collection[str] | None = None,
) -> list[Qudit] | Aborted:
    """Each |m_2^i> goes to P_i inside its own group G_i of decoys.

    All n checks run; any failure aborts the run.
    """
    delivered: list[Qudit] = []
    first_abort: Aborted | None = None
    for i, carrier in enumerate(s2, start=1):
        channel = f'g{i}'
        channel_model = (
            model
            if attacked_channels is None or channel in attacked_channels
            else _HONEST
        )
        outcome = _send_checked(
            [carrier],
            params,
            channel_model,
            rng.child(channel),
            recorder,
            3,
            f'P{i}',
            channel,
            check_step=4,
        )
        if isinstance(outcome, Aborted):
            first_abort = first_abort or outcome
        else:
            delivered.extend(outcome)
    return first_abort or delivered


def step5_user_compute(m2: int, secret: UserSecret, d: int) -> int:
    """r_2 = m_2 ⊕ p ⊕ k."""
    h = d // 2
    if not 0 <= secret.p <= h:
        raise OutOfDomainError(f'p must lie in [0, {h}], got {secret.p}')
    if secret.k is None:
        raise OutOfDomainError('User key has not been distributed')
    check_digit(secret.k, d, 'k')
    return mod_add(mod_add(m2, secret.p, d), secret.k, d)


def step6_tp2_compute(
    s1_delivered: Sequence[Qudit],
    k_list: Sequence[int],
    r2_list: Sequence[int],
    d: int,
    rng: RandomStream,
    q: int | None = None,
) -> Tp2Computation:
    """TP2 measures S1 in T1, draws q and forms r_i = (m1 ⊕ q ⊕ k) ⊖ r2."""
    n = len(s1_delivered)
    if len(k_list) != n or len(r2_list) != n:
        raise ProtocolDesyncError(
            f'TP2 holds {n} particles, {len(k_list)} keys and {len(r2_list)} r2 values'
        )
    h = d // 2
    if q is None:
        q = int(rng.integers(h, d))
    elif not h <= q <= d - 1:
        raise OutOfDomainError(f'q must lie in [{h}, {d - 1}], got {q}')

    m1_list = [carrier.measure(BasisChoice.T1, rng) for carrier in s1_delivered]
    r1_list = [mod_add(mod_add(m1, q, d), k, d) for m1, k in zip(m1_list, k_list)]
    r_vector = [mod_sub(r1, r2, d) for r1, r2 in zip(r1_list, r2_list)]
    return Tp2Computation(q=q, m1_list=m1_list, r1_list=r1_list, r_vector=r_vector)


def step7_tp1_compute(
    r_vector: Sequence[int], v_list: Sequence[int], d: int
) -> tuple[list[int], Announcement]:
    """M_i = (d - 1) - (r_i ⊕ v_i); only the ordering of M is announced."""
    if len(r_vector) != len(v_list):
        raise ProtocolDesyncError(
            f'{len(r_vector)} r values for {len(v_list)} recorded shifts'
        )
    m_vector = [(d - 1) - mod_add(r, v, d) for r, v in zip(r_vector, v_list)]
    return m_vector, Announcement.from_values(m_vector)


def _validate_inputs(
    params: ProtocolParams, secrets: Sequence[UserSecret], pinned: PinnedValues | None
) -> None:
    d, n, h = params.d, params.n, params.h
    if len(secrets) != n:
        raise OutOfDomainError(f'Expected {n} user secrets, got {len(secrets)}')
    for i, secret in enumerate(secrets, start=1):
        if secret.p > h:
            raise OutOfDomainError(f'p_{i} = {secret.p} exceeds h = {h}')
        if secret.k is not None and secret.k >= d:
            raise OutOfDomainError(f'k_{i} = {secret.k} is not a digit mod {d}')
    with_key = [i for i, s in enumerate(secrets, start=1) if s.k is not None]
    if with_key and len(with_key) != n:
        raise OutOfDomainError(
            f'Keys supplied for users {with_key} only; give every user a key or none'
        )
    if pinned is None:
        return
    for name in ('v', 'k', 'm1', 'm2', 'u'):
        values = getattr(pinned, name)
        if values is not None and len(values) != n:
            raise ProtocolDesyncError(f'Pinned {name} has {len(values)} entries')
    if pinned.m2 is not None:
        for i in range(n):
            if pinned.m2[i] != mod_add(pinned.m1[i], pinned.v[i], d):
                raise ProtocolDesyncError(
                    f'Pinned m2_{i + 1} contradicts the Bell correlation'
                )


def run_protocol(
    params: ProtocolParams,
    secrets: Sequence[UserSecret],
    model: Eavesdropper | None = None,
    pinned: PinnedValues | None = None,
    attacked_channels: Collection[str] | None = None,
) -> RunResult:
    """Execute Steps 1-7 end to end.

    ``attacked_channels`` restricts the eavesdropper to ``'s1'`` and/or
    ``'g<i>'``; ``None`` attacks every channel.
    """
    model = model or _HONEST
    _validate_inputs(params, secrets, pinned)
    d, n = params.d, params.n
    rng = RandomStream(params.seed)
    recorder = TranscriptRecorder(n)
    internals = ProtocolInternals(d=d)
    logger.info(
        'Starting run: d=%d n=%d L=%d attack=%s', d, n, params.L, model.name
    )

    if pinned:
        keys = list(pinned.k)
    elif all(s.k is not None for s in secrets):
        keys = [int(s.k) for s in secrets]  # type: ignore[arg-type]
    else:
        keys = simulated_qkd(n, d, rng.child('qkd'))
    recorder.quantum(0, 'TP2', 'P1..Pn', 'keys k_i pre-shared (simulated QKD)')
    internals.k = keys
    users = [
        UserState(index=i, secret=UserSecret(p=s.p, k=keys[i - 1]))
        for i, s in enumerate(secrets, start=1)
    ]
    tp2 = Tp2State(d=d, k_list=keys)

    tp1, s1, s2 = step1_prepare(params, rng.child('tp1'), pinned, recorder)
    internals.u, internals.v = tp1.u_list, tp1.v_list

    s1_model = (
        model if attacked_channels is None or 's1' in attacked_channels else _HONEST
    )
    s1_outcome = step2_send_s1(
        s1, params, s1_model, rng.child('channel:s1'), recorder
    )
    if isinstance(s1_outcome, Aborted):
        return _aborted(tp1, tp2, s1_outcome, recorder, internals)
    tp1.advance(Tp1Phase.S1_SENT)
    tp2.s1_received = s1_outcome
    tp2.advance(Tp2Phase.HOLDS_S1)

    g_outcome = step3_4_distribute(
        s2, params, model, rng.child('channel:g'), recorder, attacked_channels
    )
    if isinstance(g_outcome, Aborted):
        return _aborted(tp1, tp2, g_outcome, recorder, internals)
    tp1.advance(Tp1Phase.DISTRIBUTED)
    for user, qudit in zip(users, g_outcome):
        user.qudit = qudit
        user.advance(UserPhase.HOLDS_QUDIT)

    for user in users:
        assert user.qudit is not None
        user.m2 = user.qudit.measure(BasisChoice.T1, rng.child(f'user:{user.index}'))
        user.r2 = step5_user_compute(user.m2, user.secret, d)
        recorder.classical(
            5,
            user.name,
            'TP2',
            f'r2 from {user.name}',
            payload={'user': user.index, 'r2': user.r2},
            dits=1,
        )
        user.advance(UserPhase.SENT_R2)
    tp2.r2_received = [int(u.r2) for u in users if u.r2 is not None]
    internals.m2 = [int(u.m2) for u in users if u.m2 is not None]
    internals.r2 = tp2.r2_received

    computation = step6_tp2_compute(
        tp2.s1_received,
        tp2.k_list,
        tp2.r2_received,
        d,
        rng.child('tp2'),
        q=pinned.q if pinned else None,
    )
    tp2.set_q(computation.q)
    tp2.m1_list = computation.m1_list
    recorder.classical(
        6, 'TP2', 'TP1', 'R', payload={'R': computation.r_vector}, dits=n
    )
    tp2.advance(Tp2Phase.SENT_R)
    tp1.r_vector_received = computation.r_vector
    internals.q = computation.q
    internals.m1 = computation.m1_list
    internals.r1 = computation.r1_list
    internals.r = computation.r_vector

    m_vector, announcement = step7_tp1_compute(tp1.r_vector_received, tp1.v_list, d)
    internals.M = m_vector
    recorder.classical(
        7,
        'TP1',
        'broadcast',
        f'size relationship {announcement.render()}',
        payload={'announcement': announcement.classes},
    )
    tp1.advance(Tp1Phase.ANNOUNCED)
    for user in users:
        user.announcement = announcement.render()
        user.advance(UserPhase.INFORMED)

    logger.info('Run completed: %s', announcement.render())
    return RunResult(
        outcome=announcement, transcript=recorder.complete(), internals=internals
    )


def _aborted(
    tp1: Tp1State,
    tp2: Tp2State,
    outcome: Aborted,
    recorder: TranscriptRecorder,
    internals: ProtocolInternals,
) -> RunResult:
    tp1.advance(Tp1Phase.ABORTED)
    tp2.advance(Tp2Phase.ABORTED)
    recorder.classical(
        outcome.step,
        'TP1',
        'broadcast',
        f'protocol aborted on channel {outcome.channel}',
        check_traffic=True,
    )
    logger.info('Run aborted at step %d (%s)', outcome.step, outcome.channel)
    return RunResult(
        outcome=outcome, transcript=recorder.transcript, internals=internals
    )


def correctness_violations(
    internals: ProtocolInternals, secrets: Sequence[UserSecret], d: int
) -> list[str]:
    """Check the algebra of a completed run against the plaintext inputs."""
    if internals.q is None or len(internals.M) != len(secrets):
        return ['run did not complete']
    q = internals.q
    violations = []
    for i, secret in enumerate(secrets):
        p = secret.p
        if q - p < 0:
            violations.append(f'user {i + 1}: q - p wraps around')
        if mod_add(internals.r[i], internals.v[i], d) != mod_sub(q, p, d):
            violations.append(f'user {i + 1}: r ⊕ v != q ⊖ p')
        if internals.M[i] != p + d - 1 - q:
            violations.append(f'user {i + 1}: M != p + d - 1 - q')
        if not 0 <= internals.M[i] <= d - 1:
            violations.append(f'user {i + 1}: M out of range')
    expected = Announcement.from_values([s.p for s in secrets])
    if Announcement.from_values(internals.M) != expected:
        violations.append('announced ordering differs from the plaintext ordering')
    return violations


def load_run_config(path: str | Path) -> RunConfig:
    return RunConfig.model_validate_json(Path(path).read_text(encoding='utf-8'))


def run_from_config(config: RunConfig) -> RunResult:
    """Build the eavesdropper named in ``config`` and run the protocol."""
    params = config.to_params()
    attack_params = dict(config.attack_params)
    channels = attack_params.pop('channels', None)
    model = create_eavesdropper(
        config.attack,
        d=config.d,
        params=attack_params,
        rng=RandomStream(config.seed).child('attack-unitary'),
    )
    return run_protocol(
        params,
        config.to_secrets(),
        model,
        attacked_channels=set(channels) if channels is not None else None,
    )
