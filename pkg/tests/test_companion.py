import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crl import (
    CompanionEvaluator,
    CompanionModel,
    DataError,
    PredictionVector,
    Rule,
    RuleList,
    predict_companion_instance,
)
from crl.bits import unpack_bool
from crl.rules import exclusive_covers

from conftest import make_random_dataset, make_random_preds


def fixed_model(seed=11, n_rows=240):
    """A five-rule list with strictly increasing coverage on a fixed dataset."""
    data = make_random_dataset(seed, n_rows=n_rows, n_features=8, p=0.45)
    preds = make_random_preds(seed + 1, data, accuracy=0.8)
    rl = RuleList(
        (
            Rule((0, 1), 1),
            Rule((2, 3), 0),
            Rule((4,), 1),
            Rule((5,), 0),
            Rule((6,), 1),
        )
    )
    return CompanionEvaluator(rl, data, preds)


class TestLevelPredictions:
    def test_level_zero_is_blackbox_verbatim(self, d4):
        data, preds, rl = d4
        ev = CompanionEvaluator(rl, data, preds)
        out, prov = ev.level_predictions(0)
        assert out.tolist() == preds.preds.tolist()
        assert (prov == -1).all()

    def test_full_level_uses_rules_with_fallback(self, d4):
        data, preds, rl = d4
        ev = CompanionEvaluator(rl, data, preds)
        out, prov = ev.level_predictions(2)
        # rows 0,1 match rule 0; row 2 matches rule 1; row 3 falls back
        assert prov.tolist() == [0, 0, 1, -1]
        assert out.tolist() == [1, 1, 1, 1]

    def test_level_accuracy_matches_curve(self):
        ev = fixed_model()
        labels = ev.data.labels
        for m in range(ev.n_levels + 1):
            out, _ = ev.level_predictions(m)
            assert (out == labels).sum() / len(labels) == ev.curve.points[m][1]

    def test_provenance_counts_match_exclusive_covers(self):
        ev = fixed_model()
        excl = exclusive_covers(ev.rule_list, ev.data)
        _, prov = ev.level_predictions(ev.n_levels)
        for k, exc in enumerate(excl):
            assert int((prov == k).sum()) == exc.bit_count()

    def test_residual_fraction(self):
        ev = fixed_model()
        _, prov = ev.rule_predictions()
        assert float((prov == -1).mean()) == pytest.approx(ev.residual_fraction())

    def test_level_out_of_range(self):
        ev = fixed_model()
        with pytest.raises(DataError):
            ev.level_predictions(6)


class TestStochasticPredictions:
    def test_boundary_equals_level_for_any_seed(self):
        ev = fixed_model()
        for m in range(ev.n_levels + 1):
            t = ev.curve.points[m][0]
            lvl_out, lvl_prov = ev.level_predictions(m)
            for seed in (0, 1, 99):
                out, prov = ev.stochastic_predictions(t, np.random.default_rng(seed))
                assert out.tolist() == lvl_out.tolist()
                assert prov.tolist() == lvl_prov.tolist()

    def test_beyond_coverage_raises(self):
        ev = fixed_model()
        with pytest.raises(DataError, match="exceeds list coverage"):
            ev.stochastic_predictions(ev.curve.coverage + 0.01, np.random.default_rng(0))

    def test_expected_transparency_midpoint(self):
        ev = fixed_model()
        ts = ev.curve.transparency
        t = (ts[2] + ts[3]) / 2
        rng = np.random.default_rng(123)
        draws = 20_000
        total = 0.0
        for _ in range(draws):
            _, prov = ev.stochastic_predictions(t, rng)
            total += (prov >= 0).mean()
        assert abs(total / draws - t) <= 0.01

    def test_matches_per_instance_reference(self):
        # the vectorized path must agree with the branch-by-branch instance rule
        ev = fixed_model(n_rows=60)
        ts = ev.curve.transparency
        t = (ts[1] + ts[2]) / 2
        seed = 5
        rng = np.random.default_rng(seed)
        out, prov = ev.stochastic_predictions(t, rng)
        eps = np.random.default_rng(seed).random(ev.data.n_rows)
        for i in range(ev.data.n_rows):
            pred, who = predict_companion_instance(
                ev.rule_list,
                ev.data.row(i),
                int(ev.preds.preds[i]),
                transparency=t,
                level_transparencies=ts,
                epsilon=float(eps[i]),
            )
            assert pred == out[i]
            assert who == prov[i]


class TestCompanionModel:
    def test_evaluator_requires_vector(self, d4):
        data, _, rl = d4
        model = CompanionModel(rl, blackbox=lambda bits: 1)
        with pytest.raises(DataError):
            model.evaluator(data)

    def test_instance_level_prediction_with_callback(self, d4):
        data, preds, rl = d4
        # uncovered row 3 goes to the callback
        pred, who = predict_companion_instance(rl, data.row(3), 0, level=2)
        assert (pred, who) == (0, -1)
        pred, who = predict_companion_instance(rl, data.row(0), 0, level=2)
        assert (pred, who) == (1, 0)
        pred, who = predict_companion_instance(rl, data.row(0), 0, level=0)
        assert (pred, who) == (0, -1)


class TestAlignment:
    def test_misaligned_predictions_rejected(self, d4):
        data, _, rl = d4
        with pytest.raises(DataError, match="align"):
            CompanionEvaluator(rl, data, PredictionVector(np.array([1], dtype=np.uint8)))

    @given(seed=st.integers(0, 2**31))
    @settings(max_examples=20, deadline=None)
    def test_level_predictions_reproduce_accuracy_decomposition(self, seed):
        data = make_random_dataset(seed, n_rows=30, n_features=6)
        preds = make_random_preds(seed + 2, data)
        rl = RuleList((Rule((0,), 1), Rule((1,), 0), Rule((2, 3), 1)))
        ev = CompanionEvaluator(rl, data, preds)
        for m in range(len(rl) + 1):
            out, prov = ev.level_predictions(m)
            rule_part = int(((prov >= 0) & (out == data.labels)).sum())
            bb_part = int(((prov == -1) & (out == data.labels)).sum())
            assert rule_part == ev.curve.rule_correct_counts[m]
            total = ev.curve.points[m][1] * data.n_rows
            assert rule_part + bb_part == round(total)
