"""Classifier behaviour, model persistence, and agreement with references."""

import json
import random

import pytest

from cfbench.datasets import Dataset, generate_fixed_node_two_class, generate_tree_cycles
from cfbench.graphs import GraphInstance, edge_slots
from cfbench.oracles import (
    CountingOracle,
    EdgeRuleOracle,
    NearestCentroidOracle,
    OracleError,
    ensure_oracle,
    model_path,
    oracle_accuracy,
    structural_features,
)
from reference import RefEdgeRule, RefNearestCentroid, ref_structural_features


def G(id=0, n=3, edges=((0, 1),), label=0):
    return GraphInstance(id=id, num_nodes=n, edges=edges, label=label)


class TestStructuralFeatures:
    def test_triangle_graph_by_hand(self):
        g = G(n=3, edges=[(0, 1), (1, 2), (0, 2)])
        # 3 nodes, 3 edges, every degree 2, one triangle, one component, cyclic
        assert structural_features(g) == [3.0, 3.0, 2.0, 0.0, 1.0, 1.0, 1.0]

    def test_star_graph_by_hand(self):
        g = G(n=4, edges=[(0, 1), (0, 2), (0, 3)])
        feats = structural_features(g)
        assert feats[:3] == [4.0, 3.0, 1.5]
        assert feats[3] == pytest.approx(0.75)  # degrees 3,1,1,1
        assert feats[4:] == [0.0, 1.0, 0.0]

    def test_matches_reference_on_random_graphs(self):
        rng = random.Random(3)
        for _ in range(200):
            n = rng.randint(1, 10)
            edges = {s for s in edge_slots(n) if rng.random() < 0.4}
            g = G(n=n, edges=edges)
            ref = ref_structural_features(g)
            assert structural_features(g) == pytest.approx(list(ref), abs=1e-12)


class TestNearestCentroid:
    def fit(self, seed=0):
        d = generate_tree_cycles(40, 12, 2, rng_seed=seed)
        return d, NearestCentroidOracle.fit({}, d)

    def test_predictions_match_numpy_reference(self):
        d, oracle = self.fit()
        ref = RefNearestCentroid(d)
        for inst in d.instances:
            assert oracle.classify(inst) == ref.predict(inst)

    def test_separates_trees_from_cycles(self):
        d, oracle = self.fit(seed=8)
        assert oracle_accuracy(oracle, d) == 1.0

    def test_tie_goes_to_class_zero(self):
        oracle = NearestCentroidOracle(
            params={},
            means=[0.0] * 7,
            stds=[1.0] * 7,
            centroids=[[1.0] + [0.0] * 6, [-1.0] + [0.0] * 6],
        )
        g = G(n=0, edges=(), label=0)  # every feature 0 -> equidistant
        assert oracle.classify(g) == 0

    def test_constant_features_are_ignored(self):
        """All instances share num_nodes, so that feature has std 0 and must
        not poison distances with a division by zero."""
        d, oracle = self.fit()
        assert oracle.stds[0] == 0.0
        assert oracle.classify(d.instances[0]) in (0, 1)

    def test_fit_is_instance_order_independent(self):
        d, oracle = self.fit()
        reversed_instances = tuple(
            GraphInstance(id=i, num_nodes=g.num_nodes, edges=g.edges, label=g.label)
            for i, g in enumerate(reversed(d.instances))
        )
        other = NearestCentroidOracle.fit({}, Dataset(name="r", instances=reversed_instances))
        assert oracle.means == other.means
        assert oracle.stds == other.stds
        assert oracle.centroids == other.centroids

    def test_requires_both_classes(self):
        single = Dataset(name="s", instances=(G(id=0), G(id=1)))
        with pytest.raises(Exception, match="single-class"):
            NearestCentroidOracle.fit({}, single)

    def test_json_round_trip_is_exact(self):
        _, oracle = self.fit()
        clone = NearestCentroidOracle.from_json_obj(
            json.loads(json.dumps(oracle.to_json_obj()))
        )
        assert clone.means == oracle.means
        assert clone.stds == oracle.stds
        assert clone.centroids == oracle.centroids


class TestEdgeRule:
    def fit(self, k=6, seed=1):
        d = generate_fixed_node_two_class(60, 10, 0.3, 6, 0.5, rng_seed=seed)
        return d, EdgeRuleOracle.fit({"k": k}, d)

    def test_predictions_match_reference_voter(self):
        d, oracle = self.fit()
        ref = RefEdgeRule(d, k=6)
        assert oracle.slots0 == frozenset(ref.slots0)
        assert oracle.slots1 == frozenset(ref.slots1)
        for inst in d.instances:
            assert oracle.classify(inst) == ref.predict(inst)

    def test_finds_planted_slots_and_classifies_well(self):
        d, oracle = self.fit(seed=4)
        assert oracle_accuracy(oracle, d) >= 0.9

    def test_vote_tie_goes_to_class_zero(self):
        oracle = EdgeRuleOracle({"k": 1}, num_nodes=3, slots0=[(0, 1)], slots1=[(1, 2)])
        assert oracle.classify(G(n=3, edges=[(0, 1), (1, 2)])) == 0  # 1 vs 1
        assert oracle.classify(G(n=3, edges=())) == 0  # 0 vs 0
        assert oracle.classify(G(n=3, edges=[(1, 2)])) == 1

    def test_rejects_bad_k(self):
        d = generate_fixed_node_two_class(10, 5, 0.3, 2, 0.4, rng_seed=0)
        with pytest.raises(OracleError):
            EdgeRuleOracle.fit({"k": 0}, d)
        with pytest.raises(OracleError):
            EdgeRuleOracle.fit({"k": 999}, d)
        with pytest.raises(OracleError):
            EdgeRuleOracle.fit({"k": "3"}, d)

    def test_json_round_trip(self):
        _, oracle = self.fit()
        clone = EdgeRuleOracle.from_json_obj(json.loads(json.dumps(oracle.to_json_obj())))
        assert clone.slots0 == oracle.slots0
        assert clone.slots1 == oracle.slots1
        assert clone.num_nodes == oracle.num_nodes


class TestCountingOracle:
    def test_counts_every_predict(self):
        d, oracle = TestNearestCentroid().fit()
        handle = CountingOracle(oracle)
        for inst in d.instances[:5]:
            handle.predict(inst)
        assert handle.calls == 5
        # direct classify is the uncounted path
        oracle.classify(d.instances[0])
        assert handle.calls == 5

    def test_handles_are_independent(self):
        _, oracle = TestNearestCentroid().fit()
        a, b = CountingOracle(oracle), CountingOracle(oracle)
        a.predict(G())
        assert (a.calls, b.calls) == (1, 0)


class TestEnsureOracle:
    def test_fits_then_loads(self, tmp_path):
        d = generate_tree_cycles(20, 10, 2, rng_seed=2)
        oracle = ensure_oracle("nearest-centroid", {}, d, tmp_path)
        path = model_path("nearest-centroid", {}, d, tmp_path)
        assert path.exists()
        stamp = path.stat().st_mtime_ns
        again = ensure_oracle("nearest-centroid", {}, d, tmp_path)
        assert path.stat().st_mtime_ns == stamp
        assert again.centroids == oracle.centroids

    def test_key_includes_dataset_content(self, tmp_path):
        d1 = generate_tree_cycles(20, 10, 2, rng_seed=2)
        d2 = generate_tree_cycles(20, 10, 2, rng_seed=3)
        assert model_path("nearest-centroid", {}, d1, tmp_path) != model_path(
            "nearest-centroid", {}, d2, tmp_path
        )

    def test_stored_mismatch_is_an_error(self, tmp_path):
        d = generate_tree_cycles(20, 10, 2, rng_seed=2)
        path = model_path("nearest-centroid", {}, d, tmp_path)
        ensure_oracle("nearest-centroid", {}, d, tmp_path)
        obj = json.loads(path.read_text())
        obj["params"] = {"sneaky": True}
        path.write_text(json.dumps(obj))
        with pytest.raises(OracleError, match="stored model"):
            ensure_oracle("nearest-centroid", {}, d, tmp_path)

    def test_unknown_oracle_name(self, tmp_path):
        d = generate_tree_cycles(4, 6, 1, rng_seed=0)
        with pytest.raises(OracleError, match="unknown oracle"):
            ensure_oracle("svm", {}, d, tmp_path)


def test_oracle_accuracy_counts_matches():
    d = generate_tree_cycles(30, 10, 2, rng_seed=5)

    class Constant:
        def classify(self, g):
            return 0

    c0, c1 = d.class_counts()
    assert oracle_accuracy(Constant(), d) == pytest.approx(c0 / (c0 + c1))
