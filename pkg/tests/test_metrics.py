"""Scoring: confusion matrix, per-class PRF, macro-F1, ablation harness."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracer.config import ABLATION_CONFIGS
from tracer.corpus import LABELS, ClaimRecord, Label
from tracer.errors import EmptyInput, LengthMismatch
from tracer.fixtures import generate_random_fixture
from tracer.gateway import Gateway, MockScript, ResponseCache
from tracer.metrics import (
    confusion_matrix,
    format_table,
    per_class_prf,
    run_ablation,
    score_labels,
    summarize,
)

T, H, F = Label.TRUE, Label.HALF_TRUE, Label.FALSE


# -- worked example ----------------------------------------------------------
# gold (T, H, H, F) vs pred (T, H, F, H): one exact hit per class except
# False, whose only instance was called Half-True.


def test_confusion_matrix_cells():
    matrix = confusion_matrix([T, H, H, F], [T, H, F, H])
    assert matrix.cell(T, T) == 1
    assert matrix.cell(H, H) == 1
    assert matrix.cell(H, F) == 1
    assert matrix.cell(F, H) == 1
    assert matrix.cell(T, F) == 0
    assert matrix.total == 4


def test_worked_example_metrics():
    report = score_labels([T, H, H, F], [T, H, F, H])
    assert report.accuracy == pytest.approx(0.5)
    assert report.n == 4
    assert report.per_class[T] == {"precision": 1.0, "recall": 1.0, "f1": 1.0}
    assert report.per_class[H]["precision"] == pytest.approx(0.5)
    assert report.per_class[H]["recall"] == pytest.approx(0.5)
    assert report.f1_half_true == pytest.approx(0.5)
    assert report.per_class[F] == {"precision": 0.0, "recall": 0.0, "f1": 0.0}
    assert report.macro_f1 == pytest.approx((1.0 + 0.5 + 0.0) / 3)


def test_perfect_predictions():
    gold = [T, H, F, T, H, F]
    report = score_labels(gold, list(gold))
    assert report.accuracy == 1.0
    assert report.macro_f1 == 1.0
    assert report.f1_half_true == 1.0


def test_single_class_macro_averages_all_three_labels():
    report = score_labels([T, T, T], [T, T, T])
    assert report.accuracy == 1.0
    # absent labels contribute zero F1 by definition, not NaN
    assert report.macro_f1 == pytest.approx(1.0 / 3)


def test_zero_denominator_class_scores_zero():
    matrix = confusion_matrix([T, T], [T, T])
    assert per_class_prf(matrix, F) == (0.0, 0.0, 0.0)
    assert per_class_prf(matrix, H) == (0.0, 0.0, 0.0)


def test_all_wrong_predictions():
    report = score_labels([T, H, F], [H, F, T])
    assert report.accuracy == 0.0
    assert report.macro_f1 == 0.0


def test_length_mismatch_rejected():
    with pytest.raises(LengthMismatch):
        confusion_matrix([T, H], [T])


def test_empty_input_rejected():
    with pytest.raises(EmptyInput):
        confusion_matrix([], [])


# -- brute-force oracle over seeded fixtures ----------------------------------


def _oracle(gold, pred):
    tp = {label: 0 for label in LABELS}
    fp = {label: 0 for label in LABELS}
    fn = {label: 0 for label in LABELS}
    correct = 0
    for g, p in zip(gold, pred):
        if g == p:
            correct += 1
            tp[g] += 1
        else:
            fp[p] += 1
            fn[g] += 1
    per = {}
    for label in LABELS:
        precision = tp[label] / (tp[label] + fp[label]) if tp[label] + fp[label] else 0.0
        recall = tp[label] / (tp[label] + fn[label]) if tp[label] + fn[label] else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall
            else 0.0
        )
        per[label] = (precision, recall, f1)
    macro = sum(v[2] for v in per.values()) / len(LABELS)
    return correct / len(gold), per, macro


def test_matches_brute_force_oracle_across_seeds():
    for seed in range(200):
        fixture = generate_random_fixture(seed, n=(seed % 37) + 1)
        report = score_labels(fixture.gold, fixture.pred)
        accuracy, per, macro = _oracle(fixture.gold, fixture.pred)
        assert report.accuracy == pytest.approx(accuracy, abs=1e-9), f"seed {seed}"
        assert report.macro_f1 == pytest.approx(macro, abs=1e-9), f"seed {seed}"
        for label in LABELS:
            got = report.per_class[label]
            assert got["precision"] == pytest.approx(per[label][0], abs=1e-9)
            assert got["recall"] == pytest.approx(per[label][1], abs=1e-9)
            assert got["f1"] == pytest.approx(per[label][2], abs=1e-9)
        assert report.f1_half_true == pytest.approx(per[H][2], abs=1e-9)


def test_metrics_are_permutation_invariant():
    fixture = generate_random_fixture(42, n=60)
    baseline = score_labels(fixture.gold, fixture.pred).as_dict()
    pairs = list(zip(fixture.gold, fixture.pred))
    for seed in range(10):
        random.Random(seed).shuffle(pairs)
        shuffled = score_labels([g for g, _ in pairs], [p for _, p in pairs]).as_dict()
        assert shuffled == baseline


_pairs = st.lists(
    st.tuples(st.sampled_from(LABELS), st.sampled_from(LABELS)),
    min_size=1,
    max_size=60,
)


@given(pairs=_pairs)
def test_metric_bounds_property(pairs):
    gold = [g for g, _ in pairs]
    pred = [p for _, p in pairs]
    report = score_labels(gold, pred)
    assert 0.0 <= report.accuracy <= 1.0
    assert 0.0 <= report.macro_f1 <= 1.0
    for label in LABELS:
        row = report.per_class[label]
        assert 0.0 <= row["precision"] <= 1.0
        assert 0.0 <= row["recall"] <= 1.0
        # harmonic mean lies between its arguments
        assert row["f1"] <= max(row["precision"], row["recall"]) + 1e-12
        assert row["f1"] >= min(row["precision"], row["recall"]) - 1e-12


@given(pairs=_pairs)
def test_accuracy_is_micro_recall(pairs):
    gold = [g for g, _ in pairs]
    pred = [p for _, p in pairs]
    matrix = confusion_matrix(gold, pred)
    diagonal = sum(matrix.cell(label, label) for label in LABELS)
    assert summarize(matrix).accuracy == pytest.approx(diagonal / matrix.total)


# -- table rendering -----------------------------------------------------------


def test_format_table_contains_every_figure():
    report = score_labels([T, H, H, F], [T, H, F, H])
    table = format_table(report)
    for label in LABELS:
        assert label.value in table
    assert "accuracy      0.500" in table
    assert "macro_f1      0.500" in table
    assert "f1_half_true  0.500" in table
    assert "n             4" in table


# -- ablation harness ------------------------------------------------------------

_ABLATION_SCRIPT = {
    "rules": [
        {"template": "relevance", "response": "A"},
        {"template": "presentation", "contains": "E1", "response": "A"},
        {"template": "presentation", "response": "B"},
        {"template": "cot_verdict", "response": "Base reasoning.\nAnswer: A"},
        {"template": "intent_generation", "response": "Because. <I.>"},
        {"template": "plausibility", "response": "1"},
        {"template": "implicity", "response": "1"},
        {"template": "sufficiency", "response": "1"},
        {"template": "readability", "response": "1"},
        {"template": "implicit_questions", "response": "<Q1?>"},
        {"template": "assumptions", "response": "Thinking. <A1. || A2.>"},
        {"template": "counterfactual", "response": "C"},
        {"template": "nli", "response": "B"},
        {"template": "reassessment", "response": "B"},
    ],
    "embeddings": [
        {"text": "C.", "vector": [1.0, 0.0]},
        {"text": "E1 presented.", "vector": [0.9, 0.4358898943540673]},
        {"text": "E2 hidden.", "vector": [0.2, 0.9797958971132712]},
        {"text": "A1.", "vector": [0.2, 0.9797958971132712]},
        {"text": "A2.", "vector": [0.3, 0.9539392014169456]},
        {"text": "I.", "vector": [0.2, 0.9797958971132712]},
    ],
}


def _records(gold=Label.HALF_TRUE):
    return [
        ClaimRecord(
            id="t-1",
            claim="C.",
            date=None,
            raw_rating="Half True",
            gold_label=gold,
            evidence=["E1 presented.", "E2 hidden."],
            ruling=["Our ruling", "R."],
        )
    ]


def _factory():
    return Gateway(backend=MockScript.from_dict(_ABLATION_SCRIPT), cache=ResponseCache())


def test_run_ablation_requires_factory():
    with pytest.raises(ValueError):
        run_ablation(_records())


def test_run_ablation_covers_all_configs_by_default():
    results = run_ablation(_records(), gateway_factory=_factory)
    assert list(results) == ["cfg1", "cfg2", "cfg3", "cfg4"]
    for name, result in results.items():
        assert result.config is ABLATION_CONFIGS[name]
        assert len(result.reports) == 1


def test_run_ablation_call_counts_reflect_gating():
    results = run_ablation(_records(), gateway_factory=_factory)
    cfg1 = results["cfg1"].call_counts
    cfg2 = results["cfg2"].call_counts
    cfg3 = results["cfg3"].call_counts
    cfg4 = results["cfg4"].call_counts

    assert "intent_generation" not in cfg1
    assert "reassessment" not in cfg1

    assert cfg2["intent_generation"] == 1
    assert "assumptions" not in cfg2
    assert "counterfactual" not in cfg2
    assert cfg2["reassessment"] == 1

    assert cfg3["assumptions"] == 1
    assert "counterfactual" not in cfg3
    assert cfg3["nli"] == 2  # both assumptions treated critical

    assert cfg4["counterfactual"] == 2  # one do-operation per assumption
    assert cfg4["reassessment"] == 1


def test_run_ablation_scores_against_gold():
    results = run_ablation(_records(gold=Label.HALF_TRUE), gateway_factory=_factory)
    # base CoT says True; the full pipeline revises to Half-True
    assert results["cfg1"].metrics.accuracy == 0.0
    assert results["cfg4"].metrics.accuracy == 1.0


def test_run_ablation_without_gold_labels_skips_metrics():
    records = _records()
    records[0] = ClaimRecord(
        id=records[0].id,
        claim=records[0].claim,
        date=None,
        raw_rating=None,
        gold_label=None,
        evidence=records[0].evidence,
        ruling=records[0].ruling,
    )
    results = run_ablation(records, gateway_factory=_factory)
    assert all(result.metrics is None for result in results.values())
    assert all(len(result.reports) == 1 for result in results.values())


def test_run_ablation_subset_of_configs():
    results = run_ablation(
        _records(),
        configs=[ABLATION_CONFIGS["cfg1"], ABLATION_CONFIGS["cfg4"]],
        gateway_factory=_factory,
    )
    assert list(results) == ["cfg1", "cfg4"]
