"""Monte Carlo detection experiments for attacks on decoy-dressed channels."""

import copy
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import stats

from app.core.config import settings
from app.core.exceptions import NoClosedFormError
from app.core.rng import RandomStream
from app.models.channel import AttackKind
from app.models.security import AttackExperimentResult
from app.services.channel.base.eavesdropper_abstract import Eavesdropper
from app.services.channel.factory import create_eavesdropper
from app.services.channel.quantum_channel import (
    detection_probability,
    insert_decoys,
    security_check,
    transmit,
)

logger = logging.getLogger(__name__)

_BATCHED = {
    AttackKind.HONEST,
    AttackKind.INTERCEPT_RESEND,
    AttackKind.MEASURE_RESEND,
}


def _batched_chunk(
    model: Eavesdropper, d: int, L: int, trials: int, rng: RandomStream
) -> int:
    """Failed checks among ``trials`` cycles, sampled from the per-decoy Born law.

    A qudit prepared in one basis and measured in the same basis returns its
    value; measured in the other basis the outcome is uniform.
    """
    if L == 0 or model.kind is AttackKind.HONEST:
        return 0
    gen = rng.generator
    shape = (trials, L)
    basis = gen.integers(2, size=shape)
    value = gen.integers(d, size=shape)
    attacked = gen.random(shape) < model.attack_probability

    eve_basis = gen.integers(2, size=shape)
    uniform = gen.integers(d, size=shape)
    if model.kind is AttackKind.INTERCEPT_RESEND:
        forged = gen.integers(d, size=shape)
        received = np.where(eve_basis == basis, forged, uniform)
    else:
        received = np.where(eve_basis == basis, value, uniform)

    mismatch = attacked & (received != value)
    return int(mismatch.any(axis=1).sum())


def _exact_chunk(
    model: Eavesdropper, d: int, L: int, trials: int, rng: RandomStream
) -> int:
    # Chunks never share an eavesdropper instance.
    eve = copy.copy(model)
    detections = 0
    for stream in rng.spawn(trials):
        eve.reset()
        seq = insert_decoys([], L, d, stream.child('decoys'))
        received = transmit(seq, eve, stream.child('eavesdropper'))
        report = security_check(seq.ledger, received, stream.child('check'))
        detections += not report.passed
    return detections


def _theoretical_rate(model: Eavesdropper, d: int, L: int) -> float | None:
    if model.kind is AttackKind.HONEST:
        return 0.0
    try:
        return float(detection_probability(model, d, L))
    except NoClosedFormError:
        return None


def attack_experiment(
    model: Eavesdropper | AttackKind | str,
    d: int,
    L: int,
    trials: int,
    rng: RandomStream,
    exact: bool = False,
    workers: int | None = None,
) -> AttackExperimentResult:
    """Run ``trials`` independent dress, transmit and check cycles.

    Trials are split into chunks of ``settings.TRIAL_CHUNK_SIZE``, each with
    its own substream, so the result does not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError(f'trials must be >= 1, got {trials}')
    if not isinstance(model, Eavesdropper):
        model = create_eavesdropper(model, d=d, rng=rng.child('attack-unitary'))
    use_exact = exact or model.kind not in _BATCHED
    run_chunk = _exact_chunk if use_exact else _batched_chunk

    chunk = settings.TRIAL_CHUNK_SIZE
    sizes = [min(chunk, trials - start) for start in range(0, trials, chunk)]
    streams = rng.child('trials').spawn(len(sizes))
    logger.info(
        'Attack experiment: %s d=%d L=%d trials=%d (%s backend)',
        model.name,
        d,
        L,
        trials,
        'exact' if use_exact else 'batched',
    )
    with ThreadPoolExecutor(max_workers=workers or settings.MAX_WORKERS) as pool:
        counts = list(
            pool.map(
                lambda job: run_chunk(model, d, L, job[0], job[1]),
                zip(sizes, streams),
            )
        )

    detections = sum(counts)
    rate = detections / trials
    std_error = math.sqrt(rate * (1 - rate) / trials)
    z = float(stats.norm.ppf(0.975))
    return AttackExperimentResult(
        model=model.name,
        d=d,
        L=L,
        trials=trials,
        detections=detections,
        theoretical_rate=_theoretical_rate(model, d, L),
        std_error=std_error,
        ci_low=max(0.0, rate - z * std_error),
        ci_high=min(1.0, rate + z * std_error),
    )
