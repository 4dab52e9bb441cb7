import random

import pytest

from truthfuse import (
    CopyEstimate,
    CopyMatrix,
    Directed,
    FusionConfig,
    SourceAccuracy,
    Undirected,
    classify_direction,
    detect_all,
    independence_factor,
    order_sources,
    value_confidence,
    value_posteriors,
)
from truthfuse.errors import MissingInput
from truthfuse.vote import discounted_confidences

from conftest import TABLE1_TRUTHS


def matrix_of(entries):
    """entries: {(a, b): (p_indep, p_a_copies_b, p_b_copies_a)} with a < b."""
    return CopyMatrix({pair: CopyEstimate(*triple) for pair, triple in entries.items()})


def _has_cycle(edges):
    graph = {}
    for a, b in edges:
        graph.setdefault(a, set()).add(b)
    visiting, done = set(), set()

    def visit(node):
        if node in done:
            return False
        if node in visiting:
            return True
        visiting.add(node)
        found = any(visit(nxt) for nxt in graph.get(node, ()))
        visiting.discard(node)
        done.add(node)
        return found

    return any(visit(node) for node in list(graph))


class TestClassifyDirection:
    def test_dominant_direction_resolves(self):
        estimate = CopyEstimate(0.2, 0.7, 0.1)
        direction = classify_direction("S1", "S2", estimate, 2 / 3)
        assert direction == Directed(original="S2", copier="S1", total_copy_probability=pytest.approx(0.8))

    def test_symmetric_pair_stays_undirected(self):
        estimate = CopyEstimate(0.2, 0.4, 0.4)
        direction = classify_direction("S1", "S2", estimate, 2 / 3)
        assert direction == Undirected(total_copy_probability=pytest.approx(0.8))

    def test_independent_pair_is_undirected_zero(self):
        direction = classify_direction("S1", "S2", CopyEstimate(1.0, 0.0, 0.0), 2 / 3)
        assert direction == Undirected(total_copy_probability=0.0)

    def test_reverse_direction(self):
        estimate = CopyEstimate(0.2, 0.1, 0.7)
        direction = classify_direction("S1", "S2", estimate, 2 / 3)
        assert isinstance(direction, Directed)
        assert direction.original == "S1"
        assert direction.copier == "S2"


class TestOrderSources:
    def test_original_placed_first(self):
        matrix = matrix_of(
            {
                ("S3", "S4"): (0.1, 0.05, 0.85),  # S4 copies S3
                ("S3", "S5"): (0.1, 0.05, 0.85),  # S5 copies S3
                ("S4", "S5"): (0.2, 0.4, 0.4),
            }
        )
        ordering = order_sources({"S3", "S4", "S5"}, matrix, 2 / 3)
        assert ordering.order[0] == "S3"
        assert ordering.pre_sets["S3"] == frozenset()
        assert "S3" in ordering.pre_sets[ordering.order[1]]

    def test_single_voter(self):
        ordering = order_sources({"S1"}, CopyMatrix({}), 2 / 3)
        assert ordering.order == ("S1",)
        assert ordering.pre_sets["S1"] == frozenset()

    def test_empty_matrix_orders_by_id(self):
        ordering = order_sources({"S3", "S1", "S2"}, CopyMatrix({}), 2 / 3)
        assert ordering.order == ("S1", "S2", "S3")

    def test_strongest_undirected_pair_starts(self):
        matrix = matrix_of(
            {
                ("A", "B"): (0.5, 0.25, 0.25),
                ("C", "D"): (0.1, 0.45, 0.45),  # strongest dependence
            }
        )
        ordering = order_sources({"A", "B", "C", "D"}, matrix, 2 / 3)
        assert ordering.order[0] == "C"
        assert ordering.order[1] == "D"

    def test_deterministic_for_fixed_inputs(self):
        rng = random.Random(5)
        for _ in range(50):
            sources = [f"S{i}" for i in range(rng.randint(2, 7))]
            entries = {}
            for i, a in enumerate(sources):
                for b in sources[i + 1 :]:
                    if rng.random() < 0.6:
                        p12 = rng.uniform(0, 0.9)
                        p21 = rng.uniform(0, 0.9 - p12)
                        entries[(a, b)] = (1 - p12 - p21, p12, p21)
            matrix = matrix_of(entries)
            first = order_sources(set(sources), matrix, 2 / 3)
            second = order_sources(list(reversed(sources)), matrix, 2 / 3)
            assert first == second
            directions = [
                classify_direction(a, b, matrix.get(a, b), 2 / 3) for a, b in entries
            ]
            edges = {
                (d.original, d.copier) for d in directions if isinstance(d, Directed)
            }
            if not _has_cycle(edges):
                # absent demotion, an original always precedes its copier,
                # so its pre set can never contain that copier
                for original, copier in edges:
                    assert copier not in first.pre_sets[original]
                    assert original in first.pre_sets[copier]

    def test_direction_cycle_demotes_weakest_edge(self):
        # A copies B, B copies C, C copies A: cycle; weakest edge drops
        matrix = matrix_of(
            {
                ("A", "B"): (0.1, 0.9, 0.0),  # A copies B (strength .9)
                ("B", "C"): (0.2, 0.8, 0.0),  # B copies C (strength .8)
                ("A", "C"): (0.3, 0.0, 0.7),  # C copies A (strength .7, weakest)
            }
        )
        ordering = order_sources({"A", "B", "C"}, matrix, 2 / 3)
        # with the weakest constraint demoted, C precedes B precedes A
        assert ordering.order.index("C") < ordering.order.index("B")
        assert ordering.order.index("B") < ordering.order.index("A")


class TestIndependenceFactor:
    def test_empty_pre_set(self):
        assert independence_factor("S", set(), CopyMatrix({}), 0.8) == 1.0

    def test_single_discount(self):
        matrix = matrix_of({("S0", "S1"): (0.5, 0.25, 0.25)})
        assert independence_factor("S1", {"S0"}, matrix, 0.8) == pytest.approx(0.6)

    def test_certain_copier_contributes_nothing(self):
        matrix = matrix_of(
            {("S0", "S2"): (0.0, 1.0, 0.0), ("S1", "S2"): (0.0, 1.0, 0.0)}
        )
        assert independence_factor("S2", {"S0", "S1"}, matrix, 1.0) == pytest.approx(0.0)

    def test_absent_pairs_contribute_one(self):
        matrix = matrix_of({("S0", "S1"): (0.5, 0.25, 0.25)})
        assert independence_factor("S9", {"S0", "S1"}, matrix, 0.8) == 1.0

    def test_bounded_and_non_increasing(self):
        rng = random.Random(6)
        for _ in range(100):
            entries = {}
            pre = [f"P{i}" for i in range(rng.randint(1, 6))]
            for p in pre:
                p12 = rng.uniform(0, 1)
                entries[(p, "X")] = (1 - p12, p12 * 0.5, p12 * 0.5)
            matrix = matrix_of(dict(sorted(entries.items())))
            c = rng.uniform(0.1, 1.0)
            factors = [
                independence_factor("X", set(pre[:k]), matrix, c)
                for k in range(len(pre) + 1)
            ]
            assert all(0.0 <= f <= 1.0 for f in factors)
            assert all(a >= b for a, b in zip(factors, factors[1:]))


class TestValueConfidence:
    def test_single_undiscounted_voter(self):
        assert value_confidence({"S"}, {"S": 2.0149}, {"S": 1.0}) == pytest.approx(2.0149)

    def test_weighted_sum(self):
        confidence = value_confidence(
            {"a", "b"}, {"a": 2.0, "b": 2.0}, {"a": 1.0, "b": 0.5}
        )
        assert confidence == pytest.approx(3.0)

    def test_degenerates_to_vote_count(self):
        voters = {f"S{i}" for i in range(7)}
        scores = {s: 1.0 for s in voters}
        factors = {s: 1.0 for s in voters}
        assert value_confidence(voters, scores, factors) == pytest.approx(7.0)

    def test_missing_input(self):
        with pytest.raises(MissingInput):
            value_confidence({"S"}, {}, {"S": 1.0})


class TestEmptyMatrixEquivalence:
    def test_reproduces_plain_posterior_confidences(self, table1_dataset):
        rng = random.Random(17)
        for _ in range(20):
            accuracies = {
                s: SourceAccuracy.from_accuracy(rng.uniform(0.1, 0.9), 5)
                for s in table1_dataset.sources()
            }
            scores = {s: a.score for s, a in accuracies.items()}
            for obj in table1_dataset.objects():
                plain = value_posteriors(obj, table1_dataset, accuracies, 5)
                discounted = discounted_confidences(
                    table1_dataset.voters[obj], scores, CopyMatrix({}), 0.8, 2 / 3
                )
                for value, confidence in discounted.items():
                    assert confidence == pytest.approx(plain.confidence(value), abs=1e-12)


class TestPerObjectOrderingSwitch:
    def test_disagreeing_dependent_source_discounts_only_per_object(self):
        # A and B vote different values but are strongly dependent; the
        # per-value default never discounts across the disagreement, the
        # per-object alternative does
        votemap = {"x": frozenset({"A"}), "y": frozenset({"B"})}
        scores = {"A": 2.0, "B": 2.0}
        matrix = matrix_of({("A", "B"): (0.0, 0.5, 0.5)})
        per_value = discounted_confidences(votemap, scores, matrix, 1.0, 2 / 3)
        assert per_value == {"x": pytest.approx(2.0), "y": pytest.approx(2.0)}
        per_object = discounted_confidences(
            votemap, scores, matrix, 1.0, 2 / 3, per_object=True
        )
        assert per_object["x"] == pytest.approx(2.0)  # A placed first
        assert per_object["y"] == pytest.approx(0.0)  # B fully discounted

    def test_engine_honors_the_config_switch(self, table1_dataset):
        from truthfuse import ModelVariant, run

        base = dict(n=5, alpha=0.5, c=0.8, eps=0.2, min_overlap=1)
        default = run(table1_dataset, ModelVariant.ACCUCOPY, FusionConfig(**base))
        alternative = run(
            table1_dataset,
            ModelVariant.ACCUCOPY,
            FusionConfig(**base, per_object_ordering=True),
        )
        # both orderings recover the correct truths on the affiliation table
        assert dict(default.truths) == dict(alternative.truths)


class TestOrderingProtectsOriginal:
    def test_original_factor_ignores_its_copiers(self, table1_dataset):
        config = FusionConfig(n=5, alpha=0.5, c=0.8, eps=0.2)
        accuracies = {
            s: SourceAccuracy.from_accuracy(0.8, 5) for s in table1_dataset.sources()
        }
        matrix = detect_all(table1_dataset, TABLE1_TRUTHS, accuracies, config, min_overlap=1)
        # BEA's voters are the copier cluster; the ordering must place some
        # source first with an empty pre set, and every later voter's factor
        # reflects its dependence on the earlier ones
        ordering = order_sources({"S3", "S4", "S5"}, matrix, config.direction_threshold)
        first = ordering.order[0]
        assert independence_factor(first, ordering.pre_sets[first], matrix, 0.8) == 1.0
        for later in ordering.order[1:]:
            factor = independence_factor(later, ordering.pre_sets[later], matrix, 0.8)
            assert factor < 0.5  # strongly discounted: the cluster is flagged
