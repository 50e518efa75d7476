import math

import numpy as np
import pytest

from jurisim.errors import (
    ConstantInput,
    DroppedLabelWarning,
    EmptyInput,
    InsufficientOverlap,
    LengthMismatch,
)
from jurisim.evaluate import (
    PairwiseComparison,
    align_pairs,
    correlation,
    describe,
    read_comparisons,
    stats_payload,
    threshold_report,
    write_comparisons,
)
from jurisim.sim import similarity_matrix


def random_sym_matrix(labels, seed):
    rng = np.random.default_rng(seed)
    return similarity_matrix({lab: rng.random(6) + 0.05 for lab in labels})


class TestAlignPairs:
    def test_three_cases_three_pairs(self):
        labels = ["x", "y", "z"]
        pairs = align_pairs(random_sym_matrix(labels, 0), random_sym_matrix(labels, 1))
        assert [(c.case_a, c.case_b) for c in pairs] == [("x", "y"), ("x", "z"), ("y", "z")]

    def test_124_cases_give_7626_pairs(self):
        labels = [f"c{i:03d}" for i in range(124)]
        pairs = align_pairs(random_sym_matrix(labels, 2), random_sym_matrix(labels, 3))
        assert len(pairs) == 124 * 123 // 2 == 7626

    def test_disjoint_labels(self):
        with pytest.warns(DroppedLabelWarning), pytest.raises(InsufficientOverlap):
            align_pairs(
                random_sym_matrix(["a", "b"], 0), random_sym_matrix(["c", "d"], 1)
            )

    def test_partial_overlap_warns_and_drops(self):
        left = random_sym_matrix(["a", "b", "c"], 0)
        right = random_sym_matrix(["b", "c", "d"], 1)
        with pytest.warns(DroppedLabelWarning):
            pairs = align_pairs(left, right)
        assert [(c.case_a, c.case_b) for c in pairs] == [("b", "c")]

    def test_pairs_are_canonical_and_unique(self):
        labels = [f"c{i}" for i in range(9)]
        pairs = align_pairs(random_sym_matrix(labels, 4), random_sym_matrix(labels, 5))
        keys = [(c.case_a, c.case_b) for c in pairs]
        assert len(keys) == len(set(keys)) == math.comb(9, 2)
        assert all(a < b for a, b in keys)

    def test_abs_diff_range_for_nonnegative_matrices(self):
        labels = [f"c{i}" for i in range(10)]
        pairs = align_pairs(random_sym_matrix(labels, 6), random_sym_matrix(labels, 7))
        assert all(0.0 <= c.abs_diff <= 1.0 for c in pairs)


def describe_oracle(values):
    """Definitional oracle: sorted-order statistics with linear interpolation."""
    xs = sorted(values)
    n = len(xs)

    def quantile(p):
        pos = p * (n - 1)
        lo = int(math.floor(pos))
        hi = int(math.ceil(pos))
        return xs[lo] + (xs[hi] - xs[lo]) * (pos - lo)

    mean = sum(xs) / n
    var = sum((x - mean) ** 2 for x in xs) / (n - 1) if n > 1 else 0.0
    return {
        "count": n, "mean": mean, "std": math.sqrt(var),
        "min": xs[0], "q25": quantile(0.25), "median": quantile(0.5),
        "q75": quantile(0.75), "max": xs[-1],
    }


class TestDescribe:
    def test_hand_computed(self):
        stats = describe([0.1, 0.2, 0.3])
        assert stats.mean == pytest.approx(0.2)
        assert stats.median == pytest.approx(0.2)
        assert stats.min == pytest.approx(0.1)
        assert stats.max == pytest.approx(0.3)
        assert stats.count == 3

    def test_single_value(self):
        stats = describe([0.5])
        assert (stats.mean, stats.std, stats.min, stats.max) == (0.5, 0.0, 0.5, 0.5)
        assert (stats.q25, stats.median, stats.q75) == (0.5, 0.5, 0.5)

    def test_matches_definitional_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            values = rng.normal(size=int(rng.integers(2, 50))).tolist()
            got = describe(values).to_dict()
            want = describe_oracle(values)
            for key, v in want.items():
                assert got[key] == pytest.approx(v, abs=1e-9), key

    def test_permutation_invariant(self):
        values = [0.4, 0.1, 0.9, 0.3, 0.3]
        assert describe(values) == describe(list(reversed(values)))

    def test_quartiles_ordered(self):
        rng = np.random.default_rng(21)
        stats = describe(rng.random(37).tolist())
        assert stats.min <= stats.q25 <= stats.median <= stats.q75 <= stats.max
        assert stats.std >= 0

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            describe([])


def pearson_oracle(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = sum((x - mx) ** 2 for x in xs)
    vy = sum((y - my) ** 2 for y in ys)
    return cov / math.sqrt(vx * vy)


def ranks_oracle(xs):
    out = [0.0] * len(xs)
    for i, x in enumerate(xs):
        less = sum(1 for y in xs if y < x)
        equal = sum(1 for y in xs if y == x)
        out[i] = less + (equal + 1) / 2.0
    return out


class TestCorrelation:
    def test_perfect_linear(self):
        x = [1.0, 2.0, 3.0, 4.0]
        y = [2 * v + 1 for v in x]
        result = correlation(x, y)
        assert result["pearson"] == pytest.approx(1.0)
        assert result["spearman"] == pytest.approx(1.0)

    def test_perfect_negative(self):
        x = [1.0, 2.0, 3.0]
        result = correlation(x, [-v for v in x])
        assert result["pearson"] == pytest.approx(-1.0)
        assert result["spearman"] == pytest.approx(-1.0)

    def test_matches_definitional_oracle(self):
        rng = np.random.default_rng(31)
        xs = rng.normal(size=20).tolist()
        ys = (np.asarray(xs) * 0.5 + rng.normal(size=20)).tolist()
        result = correlation(xs, ys)
        assert result["pearson"] == pytest.approx(pearson_oracle(xs, ys), abs=1e-9)
        assert result["spearman"] == pytest.approx(
            pearson_oracle(ranks_oracle(xs), ranks_oracle(ys)), abs=1e-9
        )

    def test_ties_are_rank_averaged(self):
        xs = [1.0, 1.0, 2.0, 3.0]
        ys = [4.0, 5.0, 6.0, 7.0]
        result = correlation(xs, ys)
        assert result["spearman"] == pytest.approx(
            pearson_oracle(ranks_oracle(xs), ranks_oracle(ys)), abs=1e-12
        )

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            correlation([1, 2, 3], [1, 2])
        with pytest.raises(LengthMismatch):
            correlation([1, 2], [1, 2])
        with pytest.raises(ConstantInput):
            correlation([1, 1, 1], [1, 2, 3])


def make_comparisons(diffs):
    return [
        PairwiseComparison(case_a=f"a{i}", case_b=f"b{i}", sim_expert=0.5 + d, sim_embed=0.5)
        for i, d in enumerate(diffs)
    ]


class TestThresholdReport:
    def test_hand_counted(self):
        report = threshold_report(make_comparisons([0.05, 0.15, 0.09]), tau=0.1)
        assert len(report["pairs_below"]) == 2
        assert report["fraction"] == pytest.approx(2 / 3)
        assert [c.abs_diff for c in report["pairs_below"]] == pytest.approx([0.05, 0.09])

    def test_tau_above_max_keeps_everything(self):
        comps = make_comparisons([0.2, 0.4, 0.1])
        report = threshold_report(comps, tau=0.5)
        assert len(report["pairs_below"]) == 3
        assert report["fraction"] == 1.0

    def test_sorted_ascending(self):
        report = threshold_report(make_comparisons([0.09, 0.01, 0.05]), tau=0.1)
        diffs = [c.abs_diff for c in report["pairs_below"]]
        assert diffs == sorted(diffs)

    def test_invalid_tau(self):
        with pytest.raises(ValueError):
            threshold_report([], tau=0.0)


def test_comparisons_csv_round_trip(tmp_path):
    comps = make_comparisons([0.05, 0.3])
    path = tmp_path / "cmp.csv"
    write_comparisons(comps, str(path))
    back = read_comparisons(str(path))
    assert [(c.case_a, c.case_b) for c in back] == [(c.case_a, c.case_b) for c in comps]
    assert back[0].sim_expert == pytest.approx(comps[0].sim_expert, abs=5e-7)


def test_stats_payload_shape():
    labels = [f"c{i}" for i in range(6)]
    pairs = align_pairs(random_sym_matrix(labels, 8), random_sym_matrix(labels, 9))
    payload = stats_payload(pairs, tau=0.1)
    assert payload["pairs"] == math.comb(6, 2)
    for key in ("embed_similarity", "expert_similarity", "abs_diff"):
        assert set(payload[key]) == {"count", "mean", "std", "min", "q25", "median", "q75", "max"}
    assert payload["threshold"]["tau"] == 0.1
    assert set(payload["correlation"]) == {"pearson", "spearman"}
