import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from claimsift.classify import (
    PredictionSet,
    ScoreMatrix,
    ScoreMatrixError,
    export_scores,
    import_scores,
    keyword_classify,
    sigmoid,
    threshold_predict,
)
from claimsift.schema import Passage


def passage(text):
    return Passage(id="p", document_id="d", sentence_indices=(0, 0), text=text)


def logits(rows, kind="logit"):
    arr = np.array(rows, dtype=float)
    return ScoreMatrix(
        passage_ids=tuple(f"p{i}" for i in range(arr.shape[0])), scores=arr, score_kind=kind
    )


class TestKeywordClassify:
    def test_two_classes(self, lexicon):
        labels = keyword_classify(
            passage("Reports of child labor and a factory fire spread."), lexicon
        )
        assert labels == {1, 4}

    def test_no_keywords(self, lexicon):
        assert keyword_classify(passage("The weather was nice."), lexicon) == set()

    def test_multiple_phrases_same_class_no_duplicates(self, lexicon):
        labels = keyword_classify(
            passage("Overtime pay and a living wage were denied."), lexicon
        )
        assert labels == {0}

    def test_empty_text_rejected(self, lexicon):
        with pytest.raises(ValueError):
            keyword_classify(passage(""), lexicon)

    def test_subset_of_filter_matches(self, lexicon, demo_passages):
        for p in demo_passages:
            assert keyword_classify(p, lexicon) <= set(p.matched_issue_keywords) | set()


class TestThresholdPredict:
    def test_worked_logit_triple(self):
        matrix = logits([[0.0, -1.0, 1.0] + [-50.0] * 16])
        result = threshold_predict(matrix, 0.33)
        assert result.labels["p0"] == {0, 2}
        assert result.threshold_used == 0.33

    def test_sigmoid_identity(self):
        assert sigmoid(0.0) == 0.5
        assert sigmoid(1.0) == pytest.approx(0.7310585786300049, abs=1e-12)
        assert sigmoid(-1.0) == pytest.approx(0.2689414213699951, abs=1e-12)

    def test_threshold_zero_predicts_everything(self):
        matrix = logits([[float(v) for v in range(-9, 10)]])
        result = threshold_predict(matrix, 0.0)
        assert result.labels["p0"] == set(range(19))

    def test_boundary_inclusive(self):
        matrix = logits([[0.0] * 19])
        assert threshold_predict(matrix, 0.5).labels["p0"] == set(range(19))
        assert threshold_predict(matrix, 0.5000001).labels["p0"] == set()

    def test_decision_kind_rejected(self):
        matrix = logits([[0.0] * 19], kind="decision")
        with pytest.raises(ScoreMatrixError, match="svm_predict"):
            threshold_predict(matrix, 0.33)

    def test_threshold_range_checked(self):
        matrix = logits([[0.0] * 19])
        for bad in (-0.1, 1.1):
            with pytest.raises(ValueError):
                threshold_predict(matrix, bad)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=60, deadline=None)
    def test_monotonicity(self, seed):
        rng = np.random.default_rng(seed)
        matrix = logits(rng.normal(0, 3, size=(4, 19)))
        t_low, t_high = sorted(rng.uniform(0, 1, size=2))
        low = threshold_predict(matrix, float(t_low)).labels
        high = threshold_predict(matrix, float(t_high)).labels
        for pid in low:
            assert high[pid] <= low[pid]

    def test_empty_prediction_is_representable(self):
        matrix = logits([[-30.0] * 19])
        result = threshold_predict(matrix, 0.9)
        assert result.labels["p0"] == set()
        assert isinstance(result, PredictionSet)


class TestScoreMatrixIO:
    def test_import_two_rows(self, tmp_path):
        path = tmp_path / "scores.csv"
        header = "passage_id,kind," + ",".join(f"c{i}" for i in range(19))
        row = ",".join(str(float(i)) for i in range(19))
        path.write_text(f"{header}\npa,logit,{row}\npb,logit,{row}\n")
        matrix = import_scores(path)
        assert matrix.passage_ids == ("pa", "pb")
        assert matrix.scores.shape == (2, 19)
        assert matrix.score_kind == "logit"

    def test_round_trip_identity(self, tmp_path):
        rng = np.random.default_rng(3)
        matrix = logits(rng.normal(size=(5, 19)))
        path = tmp_path / "scores.csv"
        export_scores(matrix, path)
        loaded = import_scores(path)
        assert loaded.passage_ids == matrix.passage_ids
        assert loaded.score_kind == matrix.score_kind
        assert np.array_equal(loaded.scores, matrix.scores)

    def test_short_row_names_passage(self, tmp_path):
        path = tmp_path / "scores.csv"
        header = "passage_id,kind," + ",".join(f"c{i}" for i in range(19))
        short = ",".join("0.0" for _ in range(18))
        path.write_text(f"{header}\npx,logit,{short}\n")
        with pytest.raises(ScoreMatrixError, match="px"):
            import_scores(path)

    def test_duplicate_row_rejected(self, tmp_path):
        path = tmp_path / "scores.csv"
        header = "passage_id,kind," + ",".join(f"c{i}" for i in range(19))
        row = ",".join("0.0" for _ in range(19))
        path.write_text(f"{header}\npa,logit,{row}\npa,logit,{row}\n")
        with pytest.raises(ScoreMatrixError, match="duplicate"):
            import_scores(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "scores.csv"
        path.write_text("passage_id,kind,c0\npa,logit,0.0\n")
        with pytest.raises(ScoreMatrixError, match="header"):
            import_scores(path)

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "scores.csv"
        header = "passage_id,kind," + ",".join(f"c{i}" for i in range(19))
        row = ",".join("0.0" for _ in range(19))
        path.write_text(f"{header}\npa,margin,{row}\n")
        with pytest.raises(ScoreMatrixError, match="kind"):
            import_scores(path)

    def test_mixed_kinds_rejected(self, tmp_path):
        path = tmp_path / "scores.csv"
        header = "passage_id,kind," + ",".join(f"c{i}" for i in range(19))
        row = ",".join("0.0" for _ in range(19))
        path.write_text(f"{header}\npa,logit,{row}\npb,decision,{row}\n")
        with pytest.raises(ScoreMatrixError, match="mixed"):
            import_scores(path)
