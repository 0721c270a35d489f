import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from claimsift.metrics import MetricsError, class_counts, evaluate

from oracles import metrics_oracle

# Worked golden case: gold p1={A}, p2={A,B}; pred p1={A}, p2={A} with A=0, B=1.
GOLD = {"p1": {0}, "p2": {0, 1}}
PRED = {"p1": {0}, "p2": {0}}


class TestClassCounts:
    def test_golden_counts(self):
        counts = class_counts(PRED, GOLD)
        assert (counts.tp[0], counts.fp[0], counts.fn[0]) == (2, 0, 0)
        assert (counts.tp[1], counts.fp[1], counts.fn[1]) == (0, 0, 1)

    def test_pred_equals_gold(self):
        counts = class_counts(GOLD, GOLD)
        assert all(v == 0 for v in counts.fp.values())
        assert all(v == 0 for v in counts.fn.values())

    def test_all_empty_pred(self):
        pred = {pid: set() for pid in GOLD}
        counts = class_counts(pred, GOLD)
        assert all(counts.tp[c] == 0 and counts.fp[c] == 0 for c in counts.tp)
        assert counts.fn[0] == 2 and counts.fn[1] == 1

    def test_id_mismatch_lists_difference(self):
        with pytest.raises(MetricsError, match=r"\['p3'\]"):
            class_counts({"p1": set(), "p2": set(), "p3": set()}, GOLD)

    def test_exhaustive_single_class_masks(self):
        # All 16 x 16 single-class membership patterns over 4 passages.
        pids = [f"p{i}" for i in range(4)]
        for pred_mask in range(16):
            for gold_mask in range(16):
                pred = {pid: ({0} if pred_mask >> i & 1 else set()) for i, pid in enumerate(pids)}
                gold = {pid: ({0} if gold_mask >> i & 1 else set()) for i, pid in enumerate(pids)}
                counts = class_counts(pred, gold)
                both = bin(pred_mask & gold_mask).count("1")
                if pred_mask == 0 and gold_mask == 0:
                    assert counts.tp == {}
                    continue
                assert counts.tp[0] == both
                assert counts.fp[0] == bin(pred_mask).count("1") - both
                assert counts.fn[0] == bin(gold_mask).count("1") - both


class TestEvaluate:
    def test_golden_aggregates(self):
        report = evaluate(PRED, GOLD)
        assert report.micro["f1"] == pytest.approx(0.8, abs=0)
        assert report.macro["f1"] == pytest.approx(0.5, abs=0)
        assert report.weighted["f1"] == pytest.approx(2 / 3, abs=0)

    def test_perfect_prediction_all_ones(self):
        report = evaluate(GOLD, GOLD)
        for agg in (report.micro, report.macro, report.weighted):
            assert agg == {"precision": 1.0, "recall": 1.0, "f1": 1.0}

    def test_disjoint_prediction_all_zero(self):
        pred = {"p1": {2}, "p2": {2}}
        report = evaluate(pred, GOLD)
        for agg in (report.micro, report.macro, report.weighted):
            assert agg == {"precision": 0.0, "recall": 0.0, "f1": 0.0}

    def test_zero_gold_errors(self):
        with pytest.raises(MetricsError, match="weighted"):
            evaluate({"p1": {0}}, {"p1": set()})

    def test_macro_between_min_and_max(self):
        rng = random.Random(0)
        for _ in range(200):
            pred, gold = _random_pair(rng, n_passages=5, n_classes=4)
            report = evaluate(pred, gold)
            f1s = [v["f1"] for v in report.per_class.values()]
            assert min(f1s) - 1e-12 <= report.macro["f1"] <= max(f1s) + 1e-12
            supported = [v["f1"] for v in report.per_class.values() if v["support"] > 0]
            assert min(supported) - 1e-12 <= report.weighted["f1"] <= max(supported) + 1e-12

    def test_micro_identity_when_fp_equals_fn(self):
        rng = random.Random(1)
        checked = 0
        for _ in range(500):
            pred, gold = _random_pair(rng, n_passages=4, n_classes=3)
            counts = class_counts(pred, gold)
            if sum(counts.fp.values()) != sum(counts.fn.values()):
                continue
            report = evaluate(pred, gold)
            assert report.micro["precision"] == report.micro["recall"]
            # F1 equals them mathematically; the 2PR/(P+R) form may differ by 1 ulp
            assert report.micro["f1"] == pytest.approx(report.micro["precision"], rel=1e-14)
            checked += 1
        assert checked > 20

    def test_passage_permutation_invariance(self):
        rng = random.Random(2)
        pred, gold = _random_pair(rng, n_passages=6, n_classes=3)
        renamed_pred = {f"z{pid}": labels for pid, labels in pred.items()}
        renamed_gold = {f"z{pid}": labels for pid, labels in gold.items()}
        assert evaluate(pred, gold) == evaluate(renamed_pred, renamed_gold)

    @given(st.integers(min_value=0, max_value=2**12 - 1), st.integers(min_value=1, max_value=2**12 - 1))
    @settings(max_examples=300, deadline=None)
    def test_matches_oracle_on_random_pairs(self, pred_bits, gold_bits):
        pred, gold = _masks_to_maps(pred_bits, gold_bits)
        report = evaluate(pred, gold)
        expected = metrics_oracle(pred, gold)
        assert (report.micro["precision"], report.micro["recall"], report.micro["f1"]) == expected["micro"]
        assert (report.macro["precision"], report.macro["recall"], report.macro["f1"]) == expected["macro"]
        assert (
            report.weighted["precision"],
            report.weighted["recall"],
            report.weighted["f1"],
        ) == expected["weighted"]
        for cid, (p, r, f, support) in expected["per_class"].items():
            got = report.per_class[cid]
            assert (got["precision"], got["recall"], got["f1"], got["support"]) == (p, r, f, support)

    def test_serialization_round_trip(self):
        report = evaluate(PRED, GOLD)
        data = report.to_json_dict()
        assert data["macro"]["f1"] == 0.5
        text = report.to_kv_text()
        assert "macro_f1=0.500000" in text
        assert "class_1_support=1" in text


def _random_pair(rng, n_passages, n_classes):
    while True:
        gold = {
            f"p{i}": {c for c in range(n_classes) if rng.random() < 0.4} for i in range(n_passages)
        }
        if any(gold.values()):
            break
    pred = {
        f"p{i}": {c for c in range(n_classes) if rng.random() < 0.4} for i in range(n_passages)
    }
    return pred, gold


def _masks_to_maps(pred_bits, gold_bits, n_passages=4, n_classes=3):
    pred = {}
    gold = {}
    for i in range(n_passages):
        pred[f"p{i}"] = {c for c in range(n_classes) if pred_bits >> (i * n_classes + c) & 1}
        gold[f"p{i}"] = {c for c in range(n_classes) if gold_bits >> (i * n_classes + c) & 1}
    return pred, gold
