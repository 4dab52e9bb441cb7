"""Copy-aware voting: source ordering and discounted value confidence.

Even a copier contributes some independent values, so instead of
dropping suspected copiers we count only the independent fraction of
each vote. Sources voting for a value are placed in a greedy order
(originals before their copiers, strongest dependencies first); each
source's vote is then discounted by the probability that it copied from
some earlier source.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Set
from dataclasses import dataclass

from .copydetect import CopyEstimate, CopyMatrix
from .errors import CyclicDirection, MissingInput
from .model import SourceId, Value


@dataclass(frozen=True)
class Directed:
    """A pair whose copy direction is confidently resolved."""

    original: SourceId
    copier: SourceId
    total_copy_probability: float


@dataclass(frozen=True)
class Undirected:
    """A dependent pair with no resolved direction."""

    total_copy_probability: float


DirectionClass = Directed | Undirected


def classify_direction(
    s1: SourceId,
    s2: SourceId,
    estimate: CopyEstimate,
    threshold: float = 2.0 / 3.0,
) -> DirectionClass:
    """Resolve a pair's copy direction when one direction dominates.

    The pair is directed when one direction holds more than
    ``threshold`` of the total copy probability; otherwise both
    directions stay equally possible.
    """
    total = estimate.total_copy_probability
    if estimate.first_copies_second > threshold * total:
        return Directed(original=s2, copier=s1, total_copy_probability=total)
    if estimate.second_copies_first > threshold * total:
        return Directed(original=s1, copier=s2, total_copy_probability=total)
    return Undirected(total_copy_probability=total)


@dataclass(frozen=True)
class SourceOrdering:
    """A voter order with, per source, the set of sources placed before it."""

    order: tuple[SourceId, ...]
    pre_sets: Mapping[SourceId, frozenset[SourceId]]


def _greedy_order(
    voters: list[SourceId],
    directed: dict[tuple[SourceId, SourceId], float],
    copy_prob: dict[tuple[SourceId, SourceId], float],
) -> list[SourceId] | None:
    """Kahn-style placement; None when the directed edges are cyclic.

    Ties are broken by ascending source id everywhere, so the order is
    a deterministic function of its inputs.
    """
    blockers: dict[SourceId, set[SourceId]] = {s: set() for s in voters}
    for original, copier in directed:
        blockers[copier].add(original)
    placed: list[SourceId] = []
    placed_set: set[SourceId] = set()
    remaining = set(voters)
    while remaining:
        candidates = sorted(
            s for s in remaining if blockers[s] <= placed_set
        )
        if not candidates:
            return None
        if placed:
            # strongest dependency with an already placed source first
            def score(s: SourceId) -> float:
                return max(
                    (
                        copy_prob.get((min(s, p), max(s, p)), 0.0)
                        for p in placed
                    ),
                    default=0.0,
                )
        else:
            # start from the strongest undirected dependency overall
            def score(s: SourceId) -> float:
                return max(
                    (
                        prob
                        for (a, b), prob in copy_prob.items()
                        if (a == s or b == s) and (a, b) not in directed
                        and (b, a) not in directed
                    ),
                    default=0.0,
                )
        best = min(candidates, key=lambda s: (-score(s), s))
        placed.append(best)
        placed_set.add(best)
        remaining.remove(best)
    return placed


def order_sources(
    voters: Set[SourceId] | Iterable[SourceId],
    matrix: CopyMatrix,
    threshold: float = 2.0 / 3.0,
) -> SourceOrdering:
    """Greedy voter ordering honoring resolved copy directions.

    Directed pairs place the original before the copier. Among the
    remaining freedom the first pick is the source in the strongest
    undirected pair, and each later pick maximizes the copy probability
    to some already placed source. If the directed constraints are
    cyclic, the weakest directed edge is demoted to undirected and
    placement retries; demotion removes one edge per attempt, so the
    loop always terminates.
    """
    voter_list = sorted(set(voters))
    directed: dict[tuple[SourceId, SourceId], float] = {}
    copy_prob: dict[tuple[SourceId, SourceId], float] = {}
    for i, a in enumerate(voter_list):
        for b in voter_list[i + 1 :]:
            est = matrix.get(a, b)
            if est is None:
                continue
            copy_prob[(a, b)] = est.total_copy_probability
            direction = classify_direction(a, b, est, threshold)
            if isinstance(direction, Directed):
                directed[(direction.original, direction.copier)] = (
                    direction.total_copy_probability
                )

    for _ in range(len(directed) + 1):
        order = _greedy_order(voter_list, directed, copy_prob)
        if order is not None:
            pre_sets = {
                s: frozenset(order[:i]) for i, s in enumerate(order)
            }
            return SourceOrdering(tuple(order), pre_sets)
        weakest = min(directed.items(), key=lambda kv: (kv[1], kv[0]))[0]
        del directed[weakest]
    raise CyclicDirection(
        f"could not break direction cycle among {voter_list!r}"
    )


def independence_factor(
    source: SourceId,
    pre: Set[SourceId] | Iterable[SourceId],
    matrix: CopyMatrix,
    c: float,
) -> float:
    """Probability that ``source`` voted independently of all earlier sources.

    Each earlier source contributes the factor
    1 - c * (total copy probability of the pair); pairs absent from the
    matrix contribute 1.
    """
    factor = 1.0
    for earlier in sorted(set(pre)):
        factor *= 1.0 - c * matrix.total_copy_probability(source, earlier)
    return factor


def value_confidence(
    voters: Set[SourceId] | Iterable[SourceId],
    scores: Mapping[SourceId, float],
    factors: Mapping[SourceId, float],
) -> float:
    """Sum of accuracy scores weighted by independence factors."""
    terms = []
    for source in sorted(set(voters)):
        try:
            terms.append(scores[source] * factors[source])
        except KeyError as exc:
            raise MissingInput(f"no score or factor for source {source!r}") from exc
    return math.fsum(terms)


def discounted_confidences(
    votemap: Mapping[Value, Set[SourceId]],
    scores: Mapping[SourceId, float],
    matrix: CopyMatrix,
    c: float,
    threshold: float,
    per_object: bool = False,
) -> dict[Value, float]:
    """Copy-discounted confidence of every value of one object.

    By default each value's voter group is ordered on its own, so a
    vote is only discounted against sources asserting the same value;
    disagreeing sources cannot erode it. With ``per_object`` all voters
    of the object are ordered once and every earlier voter discounts,
    whichever value it voted for.
    """
    confidences: dict[Value, float] = {}
    if per_object:
        everyone = sorted({s for group in votemap.values() for s in group})
        ordering = order_sources(everyone, matrix, threshold)
        factors = {
            s: independence_factor(s, ordering.pre_sets[s], matrix, c)
            for s in everyone
        }
        for value in sorted(votemap):
            confidences[value] = value_confidence(votemap[value], scores, factors)
        return confidences
    for value in sorted(votemap):
        group = votemap[value]
        ordering = order_sources(group, matrix, threshold)
        factors = {
            s: independence_factor(s, ordering.pre_sets[s], matrix, c)
            for s in ordering.order
        }
        confidences[value] = value_confidence(group, scores, factors)
    return confidences
