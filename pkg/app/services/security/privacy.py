"""Brute-force checks of what each party can learn about a user's integer.

Every value a coalition sees is an equation over the unknowns of the run;
the consistent set is the projection onto p of all assignments satisfying
them. The run equations are

    r2 = m1 ⊕ v ⊕ p ⊕ k    (user, with m2 = m1 ⊕ v)
    r  = (m1 ⊕ q ⊕ k) ⊖ r2 (TP2)

with q shared by every user and drawn from [h, d - 1].
"""

import logging
from collections.abc import Iterable
from fractions import Fraction

import numpy as np
from scipy import stats

from app.core.config import settings
from app.core.exceptions import (
    EnumerationBudgetError,
    IncompleteRunError,
    OutOfDomainError,
)
from app.core.rng import RandomStream
from app.models.protocol import Announcement, RunResult
from app.models.security import CoalitionView, KnownValues, PartyRole, RoleKind
from app.services.quantum.qudit_math import check_dimension, mod_add, mod_sub

logger = logging.getLogger(__name__)


def otp_uniformity_test(
    d: int,
    samples: int,
    rng: RandomStream,
    m2: int | None = None,
    p: int | None = None,
) -> float:
    """Chi-square p-value of r2 = m2 ⊕ p ⊕ k against uniform, k uniform."""
    check_dimension(d)
    if samples < 100 * d:
        raise OutOfDomainError(f'Need at least {100 * d} samples, got {samples}')
    h = d // 2
    m2 = rng.digit(d) if m2 is None else m2
    p = int(rng.integers(0, h + 1)) if p is None else p
    keys = rng.integers(0, d, size=samples)
    r2 = (m2 + p + keys) % d
    counts = np.bincount(r2, minlength=d)
    return float(stats.chisquare(counts).pvalue)


def otp_bijection_check(d: int) -> bool:
    """For every (m2, p), k -> m2 ⊕ p ⊕ k is a permutation of Z_d."""
    check_dimension(d)
    keys = np.arange(d)
    for m2 in range(d):
        for p in range(d // 2 + 1):
            if len(np.unique((m2 + p + keys) % d)) != d:
                return False
    return True


def tp1_r_distribution(p: int, v: int, d: int) -> dict[int, Fraction]:
    """Exact law of r = q ⊖ v ⊖ p as seen by TP1, q uniform over [h, d - 1]."""
    check_dimension(d)
    h = d // 2
    weight = Fraction(1, d - h)
    law: dict[int, Fraction] = {}
    for q in range(h, d):
        r = mod_sub(mod_sub(q, v, d), p, d)
        law[r] = law.get(r, Fraction(0)) + weight
    return law


def ordering_permitted_set(announcement: Announcement, target: int, h: int) -> set[int]:
    """Values of p_target compatible with the announced ordering alone."""
    rank = announcement.class_of(target)
    above = rank
    below = len(announcement.classes) - rank - 1
    return set(range(below, h - above + 1))


def build_coalition_view(
    result: RunResult,
    coalition: Iterable[PartyRole | str],
    hears_announcement: bool = True,
) -> CoalitionView:
    """Collect what ``coalition`` holds after a completed run.

    Everyone overhears the classical r2 and R messages; TP1 adds v, TP2 adds
    the keys, q and m1, and each user adds its own p, k and m2.
    """
    if not result.completed or result.internals.d is None:
        raise IncompleteRunError('Coalition views need a completed run')
    internals = result.internals
    d = internals.d
    assert internals.q is not None
    roles = frozenset(
        role if isinstance(role, PartyRole) else PartyRole.parse(role)
        for role in coalition
    )
    r2 = [int(payload['r2']) for payload in result.transcript.classical_payloads(5)]
    r_vector = [int(x) for x in result.transcript.classical_payloads(6)[0]['R']]
    n = len(r2)
    announcement = result.outcome if hears_announcement else None

    known = KnownValues(
        d=d,
        n=n,
        r2=r2,
        r=r_vector,
        announcement=announcement,  # type: ignore[arg-type]
    )
    for role in roles:
        if role.kind is RoleKind.TP1:
            known.v.update(enumerate(internals.v, start=1))
        elif role.kind is RoleKind.TP2:
            known.k.update(enumerate(internals.k, start=1))
            known.m1.update(enumerate(internals.m1, start=1))
            known.q = internals.q
        elif role.kind is RoleKind.USER:
            i = int(role.user)  # type: ignore[arg-type]
            if i > n:
                raise OutOfDomainError(f'No user P{i} in a run with n={n}')
            known.p[i] = internals.M[i - 1] - (d - 1) + internals.q
            known.k[i] = internals.k[i - 1]
            known.m2[i] = internals.m2[i - 1]
    return CoalitionView(
        coalition=roles, known=known, hears_announcement=hears_announcement
    )


class _Budget:
    def __init__(self, limit: int) -> None:
        self.limit = limit
        self.used = 0

    def spend(self, steps: int) -> None:
        self.used += steps
        if self.used > self.limit:
            raise EnumerationBudgetError(
                f'Enumeration exceeded {self.limit} steps'
            )


def _user_candidates(
    known: KnownValues, user: int, q: int, budget: _Budget
) -> set[int]:
    """p values of one user consistent with its own equations for this q."""
    d, h = known.d, known.d // 2
    i = user
    r2, r = known.r2[i - 1], known.r[i - 1]
    p_range = [known.p[i]] if i in known.p else range(h + 1)
    v_range = [known.v[i]] if i in known.v else range(d)
    m1_range = [known.m1[i]] if i in known.m1 else range(d)
    budget.spend(len(p_range) * len(v_range) * len(m1_range))

    found = set()
    for p in p_range:
        for v in v_range:
            for m1 in m1_range:
                m2 = mod_add(m1, v, d)
                if i in known.m2 and known.m2[i] != m2:
                    continue
                k = mod_sub(mod_sub(r2, m2, d), p, d)
                if i in known.k and known.k[i] != k:
                    continue
                if mod_sub(mod_add(mod_add(m1, q, d), k, d), r2, d) != r:
                    continue
                found.add(p)
                break
            if p in found:
                break
    return found


def _ordering_feasible(
    candidates: list[set[int]], announcement: Announcement, target: int, value: int
) -> bool:
    """Strictly decreasing class values, target's class pinned to ``value``."""
    classes = announcement.classes
    allowed = []
    for cls in classes:
        common = set.intersection(*(candidates[i - 1] for i in cls))
        allowed.append(common)
    rank = announcement.class_of(target)
    if value not in allowed[rank]:
        return False

    previous = value
    for common in allowed[rank + 1 :]:
        lower = [x for x in common if x < previous]
        if not lower:
            return False
        previous = max(lower)
    following = value
    for common in reversed(allowed[:rank]):
        higher = [x for x in common if x > following]
        if not higher:
            return False
        following = min(higher)
    return True


def coalition_consistent_set(
    view: CoalitionView, target: int, d: int, budget: int | None = None
) -> set[int]:
    """Every p_target some assignment of the hidden values explains."""
    known = view.known
    if d != known.d:
        raise OutOfDomainError(f'View was built for d={known.d}, not d={d}')
    if d > settings.MAX_DIMENSION:
        raise EnumerationBudgetError(
            f'd={d} exceeds the enumeration limit {settings.MAX_DIMENSION}'
        )
    if not 1 <= target <= known.n:
        raise OutOfDomainError(f'No user P{target} in a run with n={known.n}')
    if target in view.user_indices:
        raise OutOfDomainError(f'P{target} belongs to the coalition')

    h = d // 2
    counter = _Budget(settings.ENUMERATION_BUDGET if budget is None else budget)
    q_range = [known.q] if known.q is not None else range(h, d)
    users = range(1, known.n + 1)
    consistent: set[int] = set()
    for q in q_range:
        if view.hears_announcement and known.announcement is not None:
            candidates = [_user_candidates(known, j, q, counter) for j in users]
            consistent |= {
                value
                for value in candidates[target - 1]
                if _ordering_feasible(candidates, known.announcement, target, value)
            }
        else:
            candidates_target = _user_candidates(known, target, q, counter)
            if candidates_target and all(
                _user_candidates(known, j, q, counter) for j in users if j != target
            ):
                consistent |= candidates_target
    logger.debug(
        'Consistent set for P%d under %s: %s',
        target,
        sorted(str(r) for r in view.coalition),
        sorted(consistent),
    )
    return consistent
