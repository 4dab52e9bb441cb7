"""Accuracy-weighted Bayesian value posteriors and truth selection.

A source with accuracy A contributes the weight w = n*A / (1 - A) to
every value it votes for; the posterior probability of a value is its
voters' weight product normalized over the whole domain of n+1 values
(unasserted values contribute an empty product of 1). All arithmetic
runs in the log domain: the accuracy score ln(w) of a source adds, and
value confidences normalize through a max-shifted softmax.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

from .errors import (
    DomainOverflow,
    EmptySource,
    InvalidParameter,
    MissingAccuracy,
    MissingInput,
    NoValues,
    UnknownObject,
)
from .logspace import domain_posteriors
from .model import Dataset, ObjectId, SourceId, Value

DEFAULT_ACCURACY_CLAMP = 0.01


def clamp_accuracy(accuracy: float, clamp: float = DEFAULT_ACCURACY_CLAMP) -> float:
    """Clamp an accuracy estimate into [clamp, 1 - clamp]."""
    if not 0.0 < clamp < 0.5:
        raise InvalidParameter(f"clamp must be in (0, 0.5), got {clamp!r}")
    return min(max(accuracy, clamp), 1.0 - clamp)


def accuracy_score(
    accuracy: float, n: int, clamp: float = DEFAULT_ACCURACY_CLAMP
) -> float:
    """ln(n * A / (1 - A)) after clamping A into [clamp, 1 - clamp].

    Positive exactly when the (clamped) source is good, i.e. more likely
    to provide the true value than any particular false one
    (A > 1 / (1 + n)); zero at that boundary.
    """
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n!r}")
    a = clamp_accuracy(accuracy, clamp)
    return math.log(n * a / (1.0 - a))


@dataclass(frozen=True)
class SourceAccuracy:
    """A source's estimated accuracy and its additive log weight."""

    accuracy: float
    score: float

    @classmethod
    def from_accuracy(
        cls, accuracy: float, n: int, clamp: float = DEFAULT_ACCURACY_CLAMP
    ) -> "SourceAccuracy":
        a = clamp_accuracy(accuracy, clamp)
        return cls(a, accuracy_score(a, n, clamp))


@dataclass(frozen=True)
class ValuePosterior:
    """Per-value confidences and probabilities for one object.

    ``unasserted_probability`` is the shared posterior mass of each of
    the n+1-k domain values nobody asserted, so the full-domain
    probabilities sum to one.
    """

    confidences: Mapping[Value, float]
    probabilities: Mapping[Value, float]
    unasserted_probability: float
    n: int

    def confidence(self, value: Value) -> float:
        return self.confidences[value]

    def probability(self, value: Value) -> float:
        return self.probabilities[value]

    def total_probability(self) -> float:
        k = len(self.probabilities)
        return math.fsum(
            p for _, p in sorted(self.probabilities.items())
        ) + (self.n + 1 - k) * self.unasserted_probability


def posterior_from_confidences(
    confidences: Mapping[Value, float], n: int, obj: ObjectId | None = None
) -> ValuePosterior:
    """Normalize value confidences over the n+1-value domain."""
    if len(confidences) > n + 1:
        where = f" for object {obj!r}" if obj is not None else ""
        raise DomainOverflow(
            f"{len(confidences)} distinct values asserted{where} but the domain "
            f"holds only {n + 1}"
        )
    probs, unasserted = domain_posteriors(confidences, n)
    return ValuePosterior(dict(sorted(confidences.items())), probs, unasserted, n)


def value_posteriors(
    obj: ObjectId,
    dataset: Dataset,
    accuracies: Mapping[SourceId, SourceAccuracy],
    n: int,
) -> ValuePosterior:
    """Posterior of every value asserted for ``obj`` given source accuracies."""
    votemap = dataset.voters.get(obj)
    if votemap is None:
        raise UnknownObject(f"object {obj!r} not in dataset")
    confidences: dict[Value, float] = {}
    for value in sorted(votemap):
        total = 0.0
        for source in sorted(votemap[value]):
            entry = accuracies.get(source)
            if entry is None:
                raise MissingAccuracy(
                    f"no accuracy for source {source!r} voting on {obj!r}"
                )
            total += entry.score
        confidences[value] = total
    return posterior_from_confidences(confidences, n, obj)


def source_accuracy(
    source: SourceId,
    dataset: Dataset,
    posteriors: Mapping[ObjectId, ValuePosterior],
    clamp: float = DEFAULT_ACCURACY_CLAMP,
) -> float:
    """Mean truth probability of the source's values, clamped.

    This is the estimator used between rounds: the fraction of true
    values a source provides, approximated by averaging the current
    posterior probability of each of its asserted values.
    """
    claims = dataset.by_source.get(source)
    if not claims:
        raise EmptySource(f"source {source!r} provides no values")
    total = []
    for obj, value in sorted(claims.items()):
        posterior = posteriors.get(obj)
        if posterior is None:
            raise MissingInput(f"no posterior for object {obj!r}")
        total.append(posterior.probability(value))
    return clamp_accuracy(math.fsum(total) / len(total), clamp)


def select_truth(posterior: ValuePosterior) -> Value:
    """The asserted value with the highest confidence.

    Ties break toward the lexicographically smallest value text, which
    keeps every downstream result deterministic.
    """
    if not posterior.confidences:
        raise NoValues("no asserted values to select from")
    return min(posterior.confidences.items(), key=lambda kv: (-kv[1], kv[0]))[0]
