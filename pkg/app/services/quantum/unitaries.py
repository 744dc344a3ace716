"""Attack operators on (system ⊗ probe), system index first."""

from collections.abc import Sequence

import numpy as np

from app.core.exceptions import InvalidAttackError
from app.core.rng import RandomStream


def haar_unitary(dim: int, rng: RandomStream) -> np.ndarray:
    """Haar-random unitary: QR of a complex Gaussian matrix, phases fixed by R."""
    z = rng.standard_complex_normal((dim, dim))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def controlled_shift_unitary(d: int, probe_dim: int) -> np.ndarray:
    """|t>|e> -> |t>|e ⊕ t>, the probe copying the computational value."""
    size = d * probe_dim
    op = np.zeros((size, size), dtype=np.complex128)
    for t in range(d):
        for e in range(probe_dim):
            op[t * probe_dim + (e + t) % probe_dim, t * probe_dim + e] = 1.0
    return op


def stealth_unitary(d: int, probe_unitary: np.ndarray) -> np.ndarray:
    """Identity on the system tensored with an arbitrary probe unitary."""
    return np.kron(np.eye(d, dtype=np.complex128), np.asarray(probe_unitary))


def unitary_from_pairs(rows: Sequence[Sequence[Sequence[float]]]) -> np.ndarray:
    """Matrix given as rows of ``[re, im]`` pairs."""
    try:
        return np.array(
            [[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128
        )
    except (TypeError, ValueError) as e:
        raise InvalidAttackError(f'Malformed attack matrix: {e!s}') from e
