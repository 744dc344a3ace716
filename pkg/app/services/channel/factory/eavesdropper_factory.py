"""Factory module to create eavesdropper instances from a name and parameters,
as found in run configuration files and CLI flags.
"""

from typing import Any

import numpy as np

from app.core.exceptions import InvalidAttackError
from app.core.rng import RandomStream
from app.models.channel import AttackKind
from app.services.channel.base.eavesdropper_abstract import Eavesdropper
from app.services.channel.implementations.entangle_measure import EntangleMeasure
from app.services.channel.implementations.honest import HonestChannel
from app.services.channel.implementations.intercept_resend import InterceptResend
from app.services.channel.implementations.measure_resend import MeasureResend
from app.services.quantum.unitaries import (
    controlled_shift_unitary,
    haar_unitary,
    stealth_unitary,
    unitary_from_pairs,
)


def _attack_unitary(
    d: int, probe_dim: int, params: dict[str, Any], rng: RandomStream | None
) -> np.ndarray:
    source = params.get('unitary', 'controlled_shift')
    if isinstance(source, list):
        return unitary_from_pairs(source)
    if source == 'identity':
        return np.eye(d * probe_dim, dtype=np.complex128)
    if source == 'controlled_shift':
        return controlled_shift_unitary(d, probe_dim)
    if source == 'stealth':
        stream = rng or RandomStream(int(params.get('unitary_seed', 0)))
        return stealth_unitary(d, haar_unitary(probe_dim, stream))
    if source == 'haar':
        stream = rng or RandomStream(int(params.get('unitary_seed', 0)))
        return haar_unitary(d * probe_dim, stream)
    raise InvalidAttackError(f'Unknown attack unitary: {source!r}')


def create_eavesdropper(
    name: str | AttackKind = AttackKind.HONEST,
    d: int | None = None,
    params: dict[str, Any] | None = None,
    rng: RandomStream | None = None,
) -> Eavesdropper:
    """
    Create an Eavesdropper for the named attack.
    ``d`` is required for entangle_measure; ``rng`` seeds random unitaries.
    """
    params = params or {}
    probability = float(params.get('attack_probability', 1.0))
    raw = name.value if isinstance(name, AttackKind) else str(name)
    try:
        kind = AttackKind(raw.lower())
    except ValueError as e:
        raise InvalidAttackError(f'Unknown attack model: {name}') from e

    if kind is AttackKind.HONEST:
        return HonestChannel()
    elif kind is AttackKind.INTERCEPT_RESEND:
        return InterceptResend(attack_probability=probability)
    elif kind is AttackKind.MEASURE_RESEND:
        return MeasureResend(attack_probability=probability)
    else:
        if d is None:
            raise InvalidAttackError('entangle_measure needs the qudit dimension d')
        probe_dim = int(params.get('probe_dim', 2))
        return EntangleMeasure(
            attack_unitary=_attack_unitary(d, probe_dim, params, rng),
            d=d,
            probe_dim=probe_dim,
            attack_probability=probability,
        )
