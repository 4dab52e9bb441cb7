"""The iterative fusion fixpoint and the model-variant ladder.

Each round (1) re-estimates copying between source pairs from the
previous round's beliefs, (2) recomputes value confidences with copy
discounts, and (3) re-estimates source accuracies from the new value
posteriors. Variants toggle the three mechanisms:

    vote         one uniform-accuracy round, no copy discount
    sim          vote plus similarity propagation between values
    accu         iterate accuracy only, no copy detection
    copy         iterate copy detection with accuracy frozen at 1 - eps
    accucopy     iterate accuracy and copy detection together
    accucopysim  accucopy plus similarity propagation

The round loop is sequential; within a round, pair estimation and
per-object confidence work fan out to a thread pool when asked and the
results merge in sorted order, so reports are identical at any thread
count.
"""

from __future__ import annotations

import hashlib
import math
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from .accuracy import (
    SourceAccuracy,
    ValuePosterior,
    posterior_from_confidences,
    select_truth,
    source_accuracy,
)
from .copydetect import EMPTY_COPY_MATRIX, CopyMatrix, detect_all
from .errors import InvalidConfig
from .model import Dataset, FusionConfig, ObjectId, SourceId, Value
from .similarity import NGramJaccard, SimilarityFunction, adjust_confidences
from .vote import discounted_confidences


class ModelVariant(Enum):
    VOTE = "vote"
    SIM = "sim"
    ACCU = "accu"
    COPY = "copy"
    ACCUCOPY = "accucopy"
    ACCUCOPYSIM = "accucopysim"

    @classmethod
    def from_string(cls, name: str) -> "ModelVariant":
        try:
            return cls(name.strip().lower())
        except ValueError:
            choices = ", ".join(v.value for v in cls)
            raise InvalidConfig(f"unknown variant {name!r}; choose from {choices}") from None

    @property
    def uses_copy_detection(self) -> bool:
        return self in (ModelVariant.COPY, ModelVariant.ACCUCOPY, ModelVariant.ACCUCOPYSIM)

    @property
    def updates_accuracy(self) -> bool:
        return self in (ModelVariant.ACCU, ModelVariant.ACCUCOPY, ModelVariant.ACCUCOPYSIM)

    @property
    def uses_similarity(self) -> bool:
        return self in (ModelVariant.SIM, ModelVariant.ACCUCOPYSIM)

    @property
    def single_round(self) -> bool:
        return self in (ModelVariant.VOTE, ModelVariant.SIM)


class Termination(Enum):
    CONVERGED = "converged"
    OSCILLATION = "oscillation"
    MAX_ROUNDS = "max_rounds"
    CONTINUE = "continue"


@dataclass(frozen=True)
class FusionState:
    """One round's complete snapshot."""

    round: int
    accuracies: Mapping[SourceId, SourceAccuracy]
    posteriors: Mapping[ObjectId, ValuePosterior]
    truths: Mapping[ObjectId, Value]
    copy_matrix: CopyMatrix
    fingerprint: str


@dataclass(frozen=True)
class FusionReport:
    """Final state plus termination diagnostics."""

    state: FusionState
    rounds_run: int
    termination: Termination
    accuracy_trajectory: tuple[float, ...]
    ops_count: int

    @property
    def truths(self) -> Mapping[ObjectId, Value]:
        return self.state.truths

    def to_dict(self) -> dict:
        """Canonical, JSON-ready representation (sorted keys throughout)."""
        return {
            "rounds_run": self.rounds_run,
            "termination": self.termination.value,
            "accuracy_trajectory": list(self.accuracy_trajectory),
            "ops_count": self.ops_count,
            "truths": {
                obj: {
                    "value": value,
                    "probability": self.state.posteriors[obj].probability(value),
                }
                for obj, value in sorted(self.state.truths.items())
            },
            "accuracies": {
                source: acc.accuracy
                for source, acc in sorted(self.state.accuracies.items())
            },
            "copy_pairs": [
                [a, b, est.independent, est.first_copies_second, est.second_copies_first]
                for (a, b), est in self.state.copy_matrix.items()
            ],
        }


def truth_fingerprint(truths: Mapping[ObjectId, Value]) -> str:
    """Stable digest of a truth assignment (process-independent)."""
    digest = hashlib.sha256()
    for obj, value in sorted(truths.items()):
        digest.update(obj.encode("utf-8"))
        digest.update(b"\x1f")
        digest.update(value.encode("utf-8"))
        digest.update(b"\x1e")
    return digest.hexdigest()


def initial_state(dataset: Dataset, config: FusionConfig) -> FusionState:
    """Uniform starting point: accuracy 1 - eps, per-object uniform beliefs."""
    accuracies = {
        source: SourceAccuracy.from_accuracy(
            config.initial_accuracy, config.n, config.accuracy_clamp
        )
        for source in dataset.sources()
    }
    posteriors: dict[ObjectId, ValuePosterior] = {}
    truths: dict[ObjectId, Value] = {}
    for obj in dataset.objects():
        values = sorted(dataset.voters[obj])
        share = 1.0 / len(values)
        posterior = ValuePosterior(
            confidences={v: 0.0 for v in values},
            probabilities={v: share for v in values},
            unasserted_probability=0.0,
            n=config.n_for(obj),
        )
        posteriors[obj] = posterior
        truths[obj] = select_truth(posterior)
    return FusionState(
        round=0,
        accuracies=accuracies,
        posteriors=posteriors,
        truths=truths,
        copy_matrix=EMPTY_COPY_MATRIX,
        fingerprint=truth_fingerprint(truths),
    )


def _object_posterior(
    dataset: Dataset,
    obj: ObjectId,
    scores: Mapping[SourceId, float],
    matrix: CopyMatrix,
    config: FusionConfig,
    similarity: SimilarityFunction | None,
) -> ValuePosterior:
    """Copy-discounted (and optionally similarity-adjusted) posterior of one object."""
    votemap = dataset.voters[obj]
    confidences = discounted_confidences(
        votemap,
        scores,
        matrix,
        config.c,
        config.direction_threshold,
        per_object=config.per_object_ordering,
    )
    if similarity is not None:
        confidences = adjust_confidences(confidences, similarity, config.rho)
    return posterior_from_confidences(confidences, config.n_for(obj), obj)


def step_round(
    state: FusionState,
    dataset: Dataset,
    variant: ModelVariant,
    config: FusionConfig,
    similarity: SimilarityFunction | None = None,
    threads: int = 1,
) -> FusionState:
    """Apply one full round to a state.

    Round zero feeds the probabilistic round-zero copy estimator; later
    rounds classify shared values hard against the selected truths.
    Returns the state unchanged when the dataset holds no claims.
    """
    if not dataset.claims:
        return state

    if variant.uses_copy_detection:
        beliefs = state.posteriors if state.round == 0 else state.truths
        matrix = detect_all(
            dataset, beliefs, state.accuracies, config, threads=threads
        )
    else:
        matrix = EMPTY_COPY_MATRIX

    scores = {source: acc.score for source, acc in state.accuracies.items()}
    sim = similarity if variant.uses_similarity else None
    objects = dataset.objects()

    def compute(obj: ObjectId) -> ValuePosterior:
        return _object_posterior(dataset, obj, scores, matrix, config, sim)

    if threads > 1 and len(objects) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(compute, objects))
    else:
        results = [compute(obj) for obj in objects]
    posteriors = dict(zip(objects, results))
    truths = {obj: select_truth(posteriors[obj]) for obj in objects}

    if variant.updates_accuracy:
        accuracies = {
            source: SourceAccuracy.from_accuracy(
                source_accuracy(source, dataset, posteriors, config.accuracy_clamp),
                config.n,
                config.accuracy_clamp,
            )
            for source in dataset.sources()
        }
    else:
        accuracies = state.accuracies

    return FusionState(
        round=state.round + 1,
        accuracies=accuracies,
        posteriors=posteriors,
        truths=truths,
        copy_matrix=matrix,
        fingerprint=truth_fingerprint(truths),
    )


def check_termination(
    history: Sequence[tuple[str, float]], config: FusionConfig
) -> Termination:
    """Decide whether the round loop should stop.

    ``history`` holds one (truth fingerprint, stability delta) entry per
    executed round. Converged when the last delta is within tolerance;
    oscillation when the latest truth assignment changed this round yet
    matches an earlier round's (a revisited assignment, i.e. a cycle of
    period two or more; an unchanged assignment is a fixpoint in the
    making, not a cycle); the cap ends everything else.
    """
    if not history:
        raise InvalidConfig("termination check on empty history")
    fingerprint, delta = history[-1]
    if delta <= config.stability_tol:
        return Termination.CONVERGED
    if len(history) >= 2 and fingerprint != history[-2][0]:
        if any(f == fingerprint for f, _ in history[:-1]):
            return Termination.OSCILLATION
    if len(history) >= config.max_rounds:
        return Termination.MAX_ROUNDS
    return Termination.CONTINUE


def _total_truth_confidence(state: FusionState) -> float:
    return math.fsum(
        state.posteriors[obj].confidence(value)
        for obj, value in sorted(state.truths.items())
    )


def _best_cycle_state(states: list[FusionState]) -> FusionState:
    """The cycle member with the highest total truth confidence.

    Called when the latest state's truths revisit an earlier round's;
    the cycle spans that earlier round through the round before the
    revisit. Confidence ties go to the later round, whose accuracy
    estimates have seen more rounds of refinement.
    """
    last = states[-1]
    start = max(
        i for i in range(len(states) - 1) if states[i].fingerprint == last.fingerprint
    )
    cycle = states[start : len(states) - 1]
    best = cycle[0]
    best_score = _total_truth_confidence(best)
    for candidate in cycle[1:]:
        score = _total_truth_confidence(candidate)
        if score >= best_score:
            best, best_score = candidate, score
    return best


def _round_ops(dataset: Dataset, config: FusionConfig, variant: ModelVariant) -> int:
    """Elementary operations one round costs, for the scaling check.

    Copy detection walks each eligible pair's common objects; confidence
    computation orders each voter group (quadratic in its size) and sums
    its scores. Both totals are fixed by the dataset, so they are
    counted once and charged per round.
    """
    ops = 0
    if variant.uses_copy_detection:
        ops += sum(
            count
            for count in dataset.pair_overlap_counts().values()
            if count >= config.min_overlap
        )
    ops += sum(
        len(group) * (len(group) + 1)
        for votemap in dataset.voters.values()
        for group in votemap.values()
    )
    return ops


def run(
    dataset: Dataset,
    variant: ModelVariant,
    config: FusionConfig | None = None,
    similarity: SimilarityFunction | None = None,
    threads: int = 1,
) -> FusionReport:
    """Run a fusion variant to termination and report the outcome.

    Accuracy-updating variants stop when the largest per-source accuracy
    change falls within ``stability_tol``; the frozen-accuracy copy
    variant stops when the selected truths repeat the previous round's
    (its accuracies never move, so accuracy stability would be vacuous).
    Either way a revisited truth assignment stops the loop as an
    oscillation, and the reported state is the cycle member with the
    highest total truth confidence.
    """
    if config is None:
        config = FusionConfig()
    config.validate()
    if not dataset.claims:
        raise InvalidConfig("cannot fuse an empty dataset")
    if variant.uses_similarity and similarity is None:
        similarity = NGramJaccard(2)

    per_round_ops = _round_ops(dataset, config, variant)
    state = initial_state(dataset, config)
    states: list[FusionState] = []
    history: list[tuple[str, float]] = []
    trajectory: list[float] = []
    ops = 0
    termination = Termination.MAX_ROUNDS

    previous = state
    for _ in range(config.max_rounds):
        current = step_round(
            previous, dataset, variant, config, similarity=similarity, threads=threads
        )
        ops += per_round_ops
        accuracy_delta = max(
            (
                abs(current.accuracies[s].accuracy - previous.accuracies[s].accuracy)
                for s in sorted(current.accuracies)
            ),
            default=0.0,
        )
        trajectory.append(accuracy_delta)
        if variant.updates_accuracy:
            effective_delta = accuracy_delta
        else:
            # frozen accuracies: stability means the truths stopped moving
            effective_delta = (
                0.0
                if states and current.fingerprint == previous.fingerprint
                else 1.0
            )
        states.append(current)
        history.append((current.fingerprint, effective_delta))
        previous = current
        if variant.single_round:
            termination = Termination.CONVERGED
            break
        verdict = check_termination(history, config)
        if verdict is not Termination.CONTINUE:
            termination = verdict
            break

    final = previous
    if termination is Termination.OSCILLATION:
        final = _best_cycle_state(states)
    return FusionReport(
        state=final,
        rounds_run=len(states),
        termination=termination,
        accuracy_trajectory=tuple(trajectory),
        ops_count=ops,
    )
