from collections import Counter

import pytest
from scipy import stats

from qldpc_map.benchgen import gen_all_to_all, gen_clustered, gen_random_ppr, generate, planted_groups
from qldpc_map.hypergraph import (
    Clustering, build_interaction_hypergraph, connectivity_objective, partition,
)
from qldpc_map.pauli import RZ


class TestClustered:
    def test_deterministic(self):
        assert gen_clustered(22, 2, seed=3) == gen_clustered(22, 2, seed=3)
        assert gen_clustered(22, 2, seed=3) != gen_clustered(22, 2, seed=4)

    def test_zero_inter_weight_has_zero_cut(self):
        blocks = planted_groups(22, 2, seed=1)
        c = gen_clustered(22, 2, inter_weight=0, seed=1)
        labels = [0] * 22
        for g, block in enumerate(blocks):
            for q in block:
                labels[q] = g
        h = build_interaction_hypergraph(c)
        assert connectivity_objective(h, Clustering(tuple(labels), 2, 11)) == 0

    def test_partitioner_recovers_planted_groups(self):
        for seed in range(5):
            c = gen_clustered(12, 2, intra_weight=20, inter_weight=0, seed=seed)
            h = build_interaction_hypergraph(c)
            assert connectivity_objective(h, partition(h, 2, capacity=6, seed=seed)) == 0

    def test_counts_and_widths(self):
        c = gen_clustered(33, 3, intra_weight=10, inter_weight=4, seed=0, max_width=3)
        assert len(c.rotations) == 34
        assert all(1 <= len(r.support) <= 3 for r in c.rotations)

    def test_groups_not_index_contiguous(self):
        blocks = planted_groups(22, 2, seed=0)
        assert sorted(q for b in blocks for q in b) == list(range(22))
        assert blocks[0] != list(range(11))

    def test_rejects(self):
        with pytest.raises(ValueError):
            gen_clustered(10, 1, inter_weight=2)
        with pytest.raises(ValueError):
            gen_clustered(10, 11)


class TestAllToAll:
    def test_wide_spans_all_modules(self):
        c = gen_all_to_all(6, "wide", seed=0, depth=5)
        h = build_interaction_hypergraph(c)
        for labels in [(0, 0, 0, 1, 1, 1), (0, 1, 0, 1, 0, 1)]:
            assert connectivity_objective(h, Clustering(labels, 2, 3)) == 5

    def test_pairwise_count(self):
        for n in (2, 5, 9):
            c = gen_all_to_all(n, "pairwise")
            assert len(c.rotations) == n * (n - 1) // 2
            assert {r.support for r in c.rotations} == {frozenset({i, j}) for i in range(n) for j in range(i + 1, n)}

    def test_deterministic(self):
        assert gen_all_to_all(7, "wide", seed=2) == gen_all_to_all(7, "wide", seed=2)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            gen_all_to_all(4, "star")


class TestRandomPpr:
    def test_fixed_width_two(self):
        c = gen_random_ppr(10, 50, 2, seed=0)
        assert all(len(r.support) == 2 for r in c.rotations)

    def test_width_histogram(self):
        law = {2: 0.5, 3: 0.3, 5: 0.2}
        c = gen_random_ppr(12, 4000, law, seed=1)
        hist = Counter(len(r.support) for r in c.rotations)
        observed = [hist[w] for w in sorted(law)]
        expected = [4000 * law[w] for w in sorted(law)]
        assert stats.chisquare(observed, expected).pvalue > 1e-3

    def test_deterministic(self):
        assert gen_random_ppr(8, 30, {2: 1, 3: 1}, seed=5) == gen_random_ppr(8, 30, {2: 1, 3: 1}, seed=5)

    def test_rz_fraction(self):
        c = gen_random_ppr(6, 200, 2, seed=0, rz_fraction=0.5)
        share = sum(r.angle == RZ for r in c.rotations) / 200
        assert 0.35 < share < 0.65

    @pytest.mark.parametrize("law", [{}, {2: -1}, {9: 1}, 0])
    def test_rejects(self, law):
        with pytest.raises(ValueError):
            gen_random_ppr(8, 5, law)


class TestGenerate:
    def test_dispatch(self):
        assert generate({"kind": "all_to_all", "n": 4, "mode": "pairwise"}) == gen_all_to_all(4, "pairwise")

    def test_string_width_keys(self):
        a = generate({"kind": "random_ppr", "n": 6, "depth": 10, "width_distribution": {"2": 1}})
        assert a == gen_random_ppr(6, 10, {2: 1})

    def test_unknown(self):
        with pytest.raises(ValueError):
            generate({"kind": "qasm"})
