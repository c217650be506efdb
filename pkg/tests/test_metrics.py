import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fedroc.curves import exact_pr
from fedroc.metrics import CurveFunction, abs_point_error, area_error, auc_roc, average_precision
from fedroc.score_data import LabeledScores


def grid_curve(fn, n=2001):
    x = np.linspace(0, 1, n)
    return x, fn(x)


def random_roc(rng, n):
    x = np.r_[0.0, np.sort(rng.random(n)), 1.0]
    y = np.r_[0.0, np.sort(rng.random(n)), 1.0]
    return x, y


def sweep_ap(scores, labels):
    """Oracle: AP = mean precision at the rank of each positive (no ties)."""
    order = np.argsort(-np.asarray(scores))
    lab = np.asarray(labels)[order]
    hits = np.cumsum(lab)
    ranks = np.arange(1, lab.size + 1)
    return float(np.mean((hits / ranks)[lab == 1]))


class TestCurveFunction:
    def test_vertical_segment_supremum(self):
        c = CurveFunction([0, 0, 0, 1], [0, 0.3, 0.6, 1])
        assert c(0.0) == 0.6
        assert c(0.5) == pytest.approx(0.8)

    def test_end_extension(self):
        c = CurveFunction([0.2, 0.8], [0.4, 0.6])
        assert c(0.0) == 0.4 and c(1.0) == 0.6

    def test_step_right_end_constant(self):
        c = CurveFunction([0, 0.5, 1], [1, 0.8, 0.6], step=True)
        assert c(0.25) == 0.8 and c(0.75) == 0.6
        assert c(0.5) == 0.8

    def test_rejects_decreasing_x(self):
        with pytest.raises(ValueError):
            CurveFunction([0, 1, 0.5], [0, 1, 1])


class TestAreaError:
    def test_identity_zero(self):
        c = grid_curve(np.sqrt)
        assert area_error(c, c) == 0.0

    def test_square_vs_identity(self):
        assert area_error(grid_curve(lambda x: x), grid_curve(lambda x: x**2), G=10_000) == pytest.approx(1 / 6, abs=1e-4)

    def test_constant_gap(self):
        assert area_error(([0, 1], [1, 1]), ([0, 1], [0, 0])) == pytest.approx(1.0)

    def test_crossing_lines_exact(self):
        # |x - (1 - x)| integrates to 1/2 with a crossing inside a single cell
        assert area_error(([0, 1], [0, 1]), ([0, 1], [1, 0]), G=2) == pytest.approx(0.5)

    def test_step_against_linear(self):
        step = CurveFunction([0, 0.5, 1], [1, 1, 0], step=True)
        line = CurveFunction([0, 1], [1, 1])
        assert area_error(step, line) == pytest.approx(0.5)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**20), st.integers(1, 40), st.integers(1, 40))
    def test_symmetric_and_bounds_auc_gap(self, seed, n1, n2):
        rng = np.random.default_rng(seed)
        a, b = random_roc(rng, n1), random_roc(rng, n2)
        ae = area_error(a, b, G=500)
        assert ae == pytest.approx(area_error(b, a, G=500), abs=1e-12)
        assert ae + 1e-12 >= abs(auc_roc(a) - auc_roc(b))

    def test_hundred_random_pairs(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            a, b = random_roc(rng, 20), random_roc(rng, 7)
            assert area_error(a, b) + 1e-12 >= abs(auc_roc(a) - auc_roc(b))

    def test_grid_refinement_stable(self):
        a = grid_curve(lambda x: np.sin(np.pi * x / 2), n=997)
        b = grid_curve(lambda x: x**1.5, n=613)
        coarse = area_error(a, b, G=5000)
        fine = area_error(a, b, G=10_000)
        assert abs(coarse - fine) < 1e-3

    def test_zero_iff_agree(self):
        a = ([0, 0.5, 1], [0, 0.8, 1])
        b = ([0, 0.25, 0.5, 1], [0, 0.4, 0.8, 1])
        assert area_error(a, b) == pytest.approx(0.0, abs=1e-15)
        assert area_error(a, ([0, 0.5, 1], [0, 0.81, 1])) > 0


class TestAuc:
    def test_diagonal(self):
        assert auc_roc(([0, 1], [0, 1])) == 0.5

    def test_perfect(self):
        assert auc_roc(([0, 0, 1], [0, 1, 1])) == 1.0


class TestAveragePrecision:
    def test_constant_one(self):
        assert average_precision(CurveFunction([0, 0.3, 1], [1, 1, 1], step=True)) == 1.0

    def test_four_record_example(self):
        d = LabeledScores([0.9, 0.8, 0.7, 0.6], [1, 1, 0, 1])
        ap = average_precision(exact_pr(d))
        assert ap == pytest.approx(sweep_ap(d.scores, d.labels))
        assert ap == pytest.approx(11 / 12)

    def test_random_matches_sweep_oracle(self):
        rng = np.random.default_rng(1)
        s = rng.permutation(1000) / 1000
        y = rng.integers(0, 2, 1000)
        assert average_precision(exact_pr(LabeledScores(s, y))) == pytest.approx(sweep_ap(s, y), abs=1e-12)

    def test_flat_random_classifier(self):
        d = LabeledScores([0.5] * 10, [1, 1, 1] + [0] * 7)
        assert average_precision(exact_pr(d)) == pytest.approx(0.3)


class TestPointError:
    def test_identical(self):
        f = lambda s: np.asarray(s) ** 2  # noqa: E731
        assert abs_point_error(f, f, np.linspace(0, 1, 11)) == (0.0, 0.0)

    def test_constant_offset(self):
        mx, mean = abs_point_error(lambda s: np.asarray(s), lambda s: np.asarray(s) + 0.05, np.linspace(0, 1, 11))
        assert mx == pytest.approx(0.05) and mean == pytest.approx(0.05)

    @pytest.mark.parametrize("Q", [11, 101])
    def test_exact_quantile_tpr_point_error(self, Q):
        from fedroc.curves import build_ecdf, exact_rates
        from fedroc.quantile_est import exact_quantiles
        from fedroc.score_data import SyntheticSpec, generate

        d = generate(SyntheticSpec(n_pos=4000, n_neg=4000, seed=Q))
        ecdf = build_ecdf(exact_quantiles(d.positives, Q))
        _, tpr = exact_rates(d)
        s = np.linspace(0, 1, 2001)
        mx, _ = abs_point_error(tpr, lambda t: 1 - ecdf(t), s)
        assert mx <= 1 / (2 * (Q - 1)) + 1 / (Q - 1)
