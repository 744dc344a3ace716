"""Modulo-d arithmetic and a small statevector engine for qudits.

States are pure and immutable; measurement returns new values. Outcomes of a
multi-qudit state are indexed row-major over ``subsystem_dims``.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache
from math import prod

import numpy as np

from app.core.config import settings
from app.core.exceptions import (
    InvalidDigitError,
    InvalidDimensionError,
    NormalizationError,
)
from app.core.rng import RandomStream
from app.models.qudit import BasisChoice


def check_dimension(d: int) -> None:
    if isinstance(d, bool) or not isinstance(d, int | np.integer) or d < 2:
        raise InvalidDimensionError(f'Dimension must be an integer >= 2, got {d!r}')


def check_digit(value: int, d: int, name: str = 'digit') -> None:
    check_dimension(d)
    if not 0 <= value < d:
        raise InvalidDigitError(f'{name} must lie in [0, {d}), got {value}')


def mod_add(a: int, b: int, d: int) -> int:
    """Return ``a ⊕ b`` in Z_d."""
    check_digit(a, d, 'a')
    check_digit(b, d, 'b')
    return (a + b) % d


def mod_sub(a: int, b: int, d: int) -> int:
    """Return ``a ⊖ b`` in Z_d."""
    check_digit(a, d, 'a')
    check_digit(b, d, 'b')
    return (a - b) % d


@dataclass(frozen=True, eq=False)
class AmplitudeState:
    """Pure state over ``prod(subsystem_dims)`` outcomes."""

    subsystem_dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        dims = tuple(int(x) for x in self.subsystem_dims)
        if not dims or any(x < 1 for x in dims):
            raise InvalidDimensionError(f'Invalid subsystem dimensions: {dims}')
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != prod(dims):
            raise InvalidDimensionError(
                f'{amps.size} amplitudes do not fit subsystem dimensions {dims}'
            )
        amps.flags.writeable = False
        object.__setattr__(self, 'subsystem_dims', dims)
        object.__setattr__(self, 'amplitudes', amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def is_normalized(self, tol: float | None = None) -> bool:
        tol = settings.NORM_TOL if tol is None else tol
        return abs(self.norm() ** 2 - 1.0) <= tol

    def probabilities(self) -> np.ndarray:
        """Born probabilities in the computational basis, row-major."""
        return np.abs(self.amplitudes) ** 2

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.subsystem_dims)

    def tensor(self, other: 'AmplitudeState') -> 'AmplitudeState':
        return AmplitudeState(
            self.subsystem_dims + other.subsystem_dims,
            np.kron(self.amplitudes, other.amplitudes),
        )

    def overlap(self, other: 'AmplitudeState') -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: 'AmplitudeState') -> float:
        return abs(self.overlap(other)) ** 2

    def isclose(self, other: 'AmplitudeState', tol: float = 1e-9) -> bool:
        return self.subsystem_dims == other.subsystem_dims and bool(
            np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=tol)
        )

    def to_pairs(self) -> list[list[float]]:
        """Serialize as ``[[re, im], ...]`` in row-major outcome order."""
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]

    @classmethod
    def from_pairs(
        cls, subsystem_dims: Sequence[int], pairs: Sequence[Sequence[float]]
    ) -> 'AmplitudeState':
        state = cls(
            tuple(subsystem_dims),
            np.array([complex(re, im) for re, im in pairs], dtype=np.complex128),
        )
        _require_normalized(state)
        return state


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: int
    post_state: AmplitudeState | None


def _require_normalized(state: AmplitudeState) -> None:
    if not state.is_normalized():
        raise NormalizationError(
            f'State is not normalized (norm^2 = {state.norm() ** 2:.12g})'
        )


@lru_cache(maxsize=128)
def fourier_matrix(d: int) -> np.ndarray:
    """``F[alpha, t] = exp(2*pi*i*alpha*t/d) / sqrt(d)``; column t is F|t>."""
    check_dimension(d)
    alpha = np.arange(d)
    matrix = np.exp(2j * np.pi * np.outer(alpha, alpha) / d) / np.sqrt(d)
    matrix.flags.writeable = False
    return matrix


@lru_cache(maxsize=4096)
def _basis_vector(basis: BasisChoice, t: int, d: int) -> AmplitudeState:
    if basis is BasisChoice.T1:
        amps = np.zeros(d, dtype=np.complex128)
        amps[t] = 1.0
    else:
        amps = fourier_matrix(d)[:, t]
    return AmplitudeState((d,), amps)


def computational_state(t: int, d: int) -> AmplitudeState:
    """|t> in the T1 basis."""
    check_digit(t, d, 't')
    return _basis_vector(BasisChoice.T1, int(t), int(d))


def fourier_state(t: int, d: int) -> AmplitudeState:
    """F|t> in the T2 basis."""
    check_digit(t, d, 't')
    return _basis_vector(BasisChoice.T2, int(t), int(d))


def basis_state(basis: BasisChoice, t: int, d: int) -> AmplitudeState:
    check_digit(t, d, 't')
    return _basis_vector(BasisChoice(basis), int(t), int(d))


def bell_state(u: int, v: int, d: int) -> AmplitudeState:
    """Two-qudit Bell state with phase index ``u`` and shift index ``v``."""
    check_digit(u, d, 'u')
    check_digit(v, d, 'v')
    amps = np.zeros((d, d), dtype=np.complex128)
    j = np.arange(d)
    amps[j, (j + v) % d] = np.exp(2j * np.pi * j * u / d) / np.sqrt(d)
    return AmplitudeState((d, d), amps)


def phase_sum(t: int, gamma: int, d: int) -> complex:
    """``sum_alpha exp(2*pi*i*alpha*(t - gamma)/d)``; zero whenever t != gamma."""
    check_dimension(d)
    alpha = np.arange(d)
    return complex(np.exp(2j * np.pi * alpha * (t - gamma) / d).sum())


def is_unitary(operator: np.ndarray, tol: float | None = None) -> bool:
    tol = settings.NORM_TOL if tol is None else tol
    op = np.asarray(operator)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    return bool(np.allclose(op.conj().T @ op, np.eye(op.shape[0]), rtol=0, atol=tol))


def apply_operator(
    state: AmplitudeState, operator: np.ndarray, targets: Sequence[int]
) -> AmplitudeState:
    """Apply ``operator`` to the listed subsystems (in that order)."""
    dims = state.subsystem_dims
    targets = [int(i) for i in targets]
    if not targets or any(not 0 <= i < len(dims) for i in targets):
        raise InvalidDimensionError(f'Invalid target subsystems {targets} for {dims}')
    target_dims = [dims[i] for i in targets]
    size = prod(target_dims)
    op = np.asarray(operator, dtype=np.complex128)
    if op.shape != (size, size):
        raise InvalidDimensionError(
            f'Operator shape {op.shape} does not match target dimension {size}'
        )
    front = list(range(len(targets)))
    psi = np.moveaxis(state.as_tensor(), targets, front)
    rest_shape = psi.shape[len(targets) :]
    psi = (op @ psi.reshape(size, -1)).reshape(*target_dims, *rest_shape)
    psi = np.moveaxis(psi, front, targets)
    return AmplitudeState(dims, psi.reshape(-1))


def apply_fourier(state: AmplitudeState, subsystem: int) -> AmplitudeState:
    d = state.subsystem_dims[subsystem]
    return apply_operator(state, fourier_matrix(d), [subsystem])


def inverse_fourier(state: AmplitudeState, subsystem: int) -> AmplitudeState:
    d = state.subsystem_dims[subsystem]
    return apply_operator(state, fourier_matrix(d).conj().T, [subsystem])


def outcome_probabilities(
    state: AmplitudeState, subsystem: int, basis: BasisChoice
) -> np.ndarray:
    """Exact Born distribution of measuring ``subsystem`` in ``basis``."""
    if not 0 <= subsystem < len(state.subsystem_dims):
        raise InvalidDimensionError(
            f'No subsystem {subsystem} in {state.subsystem_dims}'
        )
    if BasisChoice(basis) is BasisChoice.T2:
        state = inverse_fourier(state, subsystem)
    psi = np.moveaxis(state.as_tensor(), subsystem, 0)
    d = psi.shape[0]
    probs = (np.abs(psi.reshape(d, -1)) ** 2).sum(axis=1)
    return probs / probs.sum()


def measure(
    state: AmplitudeState, subsystem: int, basis: BasisChoice, rng: RandomStream
) -> MeasurementRecord:
    """Projective measurement of one subsystem; the others are renormalized."""
    _require_normalized(state)
    if not 0 <= subsystem < len(state.subsystem_dims):
        raise InvalidDimensionError(
            f'No subsystem {subsystem} in {state.subsystem_dims}'
        )
    rotated = state
    if BasisChoice(basis) is BasisChoice.T2:
        rotated = inverse_fourier(state, subsystem)
    probs = outcome_probabilities(rotated, subsystem, BasisChoice.T1)
    outcome = rng.choice(probs.size, p=probs)

    rest_dims = tuple(
        dim for i, dim in enumerate(state.subsystem_dims) if i != subsystem
    )
    if not rest_dims:
        return MeasurementRecord(outcome=outcome, post_state=None)

    rest = np.moveaxis(rotated.as_tensor(), subsystem, 0)[outcome].reshape(-1)
    rest = rest / np.linalg.norm(rest)
    return MeasurementRecord(
        outcome=outcome, post_state=AmplitudeState(rest_dims, rest)
    )


def measure_pair_computational(
    u: int, v: int, d: int, rng: RandomStream
) -> tuple[int, int]:
    """T1 outcomes of both halves of ``bell_state(u, v, d)`` without a statevector."""
    check_digit(u, d, 'u')
    check_digit(v, d, 'v')
    m1 = rng.digit(d)
    return m1, mod_add(m1, v, d)
