"""Evaluation harness: majority vote, agreement, distributions, and CSV I/O."""

from __future__ import annotations

import itertools

import pytest

from aspectsum.domain import AnnotationRecord, ErrorLabel
from aspectsum.evaluation import (
    agreement_rate,
    classify_severity,
    error_distribution,
    load_annotations,
    majority_vote,
    resolve_final_labels,
    save_annotations,
)

NE = ErrorLabel.NO_ERRORS
EX = ErrorLabel.EXAGGERATION_UNDERSTATEMENT
MINOR_MIS = ErrorLabel.MINOR_MISREPRESENTATION
MAJOR_MIS = ErrorLabel.MAJOR_MISREPRESENTATION
MINOR_OM = ErrorLabel.MINOR_OMISSION
MAJOR_OM = ErrorLabel.MAJOR_OMISSION


def paper_scale_label_sets():
    """Final label sets reproducing the published evaluation counts: 285
    clean, 12 minor misrepresentation, 21 minor omission, and 15 products
    carrying the 5 + 9 + 6 major-tier labels (multi-label where needed).

    The tiers cover 333 of the 341 evaluated products; the remaining 8 are
    the no-majority items excluded from the finals but still in the
    percentage denominator.
    """
    finals = [frozenset({NE})] * 285
    finals += [frozenset({MINOR_MIS})] * 12
    finals += [frozenset({MINOR_OM})] * 21
    finals += [frozenset({EX})] * 5
    finals += [frozenset({MAJOR_MIS})] * 4
    finals += [frozenset({MAJOR_OM})] * 1
    finals += [frozenset({MAJOR_MIS, MAJOR_OM})] * 5
    assert len(finals) == 333
    return finals


class TestMajorityVote:
    def test_two_of_three_agree(self):
        result = majority_vote([{NE}, {NE}, {MINOR_OM}])
        assert result == frozenset({NE})

    def test_three_disjoint_labels_no_majority(self):
        assert majority_vote([{EX}, {MINOR_OM}, {MAJOR_MIS}]) is None

    def test_symmetric_in_annotator_order(self):
        label_sets = [{NE}, {MINOR_OM}, {MINOR_OM}]
        expected = majority_vote(label_sets)
        for permutation in itertools.permutations(label_sets):
            assert majority_vote(list(permutation)) == expected

    def test_label_level_agreement_on_multilabel_sets(self):
        result = majority_vote(
            [{MINOR_OM, MAJOR_MIS}, {MINOR_OM}, {MAJOR_OM}]
        )
        assert result == frozenset({MINOR_OM})

    def test_needs_two_annotators(self):
        with pytest.raises(ValueError):
            majority_vote([{NE}])

    def test_invalid_label_set_rejected(self):
        with pytest.raises(ValueError):
            majority_vote([{NE, MINOR_OM}, {NE}])


class TestAgreementRate:
    def test_all_identical_is_one(self):
        items = [[{NE}, {NE}, {NE}]] * 5
        assert agreement_rate(items) == 1.0

    def test_all_disjoint_is_zero(self):
        items = [[{EX}, {MINOR_OM}, {MAJOR_MIS}]] * 4
        assert agreement_rate(items) == 0.0

    def test_thirty_four_item_fixture_near_seventy_percent(self):
        # 24 agreeing triples out of 34 is the closest attainable encoding of
        # a 70% agreement rate on a 34-item sample (23.8 is not an integer).
        agreeing = [[{NE}, {NE}, {MINOR_OM}]] * 24
        disagreeing = [[{EX}, {MINOR_OM}, {MAJOR_MIS}]] * 10
        rate = agreement_rate(agreeing + disagreeing)
        assert abs(rate - 0.70) <= 0.01

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            agreement_rate([])


class TestClassifySeverity:
    def test_tiers(self):
        assert classify_severity({NE}) == "no_error"
        assert classify_severity({MINOR_OM}) == "minor"
        assert classify_severity({MINOR_MIS, MINOR_OM}) == "minor"
        assert classify_severity({EX}) == "major"
        assert classify_severity({MAJOR_MIS, MAJOR_OM}) == "major"

    def test_minor_plus_major_is_major(self):
        assert classify_severity({MINOR_OM, MAJOR_OM}) == "major"


class TestErrorDistribution:
    def test_paper_scale_fixture(self):
        report = error_distribution(paper_scale_label_sets(), total_products=341)
        assert report.total == 341
        assert report.tier_counts == {"no_error": 285, "minor": 33, "major": 15}
        assert abs(report.tier_percentages["no_error"] - 84) <= 1
        assert abs(report.tier_percentages["minor"] - 11) <= 1
        assert abs(report.tier_percentages["major"] - 5) <= 1
        assert report.label_counts[MINOR_MIS] == 12
        assert report.label_counts[MINOR_OM] == 21
        assert report.label_counts[EX] == 5
        assert report.label_counts[MAJOR_MIS] == 9
        assert report.label_counts[MAJOR_OM] == 6

    def test_all_clean(self):
        report = error_distribution([{NE}] * 10)
        assert report.tier_percentages == {"no_error": 100, "minor": 0, "major": 0}

    def test_tiers_partition_labeled_products(self):
        report = error_distribution(paper_scale_label_sets())
        assert sum(report.tier_counts.values()) == report.total

    def test_total_override_cannot_undercount(self):
        with pytest.raises(ValueError):
            error_distribution([{NE}] * 5, total_products=3)

    def test_matches_reclassification_oracle_on_random_sets(self):
        import random

        rng = random.Random(4)
        non_clean = [EX, MINOR_MIS, MAJOR_MIS, MINOR_OM, MAJOR_OM]
        label_sets = []
        for _ in range(200):
            if rng.random() < 0.4:
                label_sets.append(frozenset({NE}))
            else:
                label_sets.append(
                    frozenset(rng.sample(non_clean, k=rng.randint(1, 3)))
                )
        report = error_distribution(label_sets)
        majors = {EX, MAJOR_MIS, MAJOR_OM}
        oracle = {"no_error": 0, "minor": 0, "major": 0}
        for labels in label_sets:
            if labels == {NE}:
                oracle["no_error"] += 1
            elif labels & majors:
                oracle["major"] += 1
            else:
                oracle["minor"] += 1
        assert report.tier_counts == oracle


class TestAnnotationCsv:
    def _records(self):
        return [
            AnnotationRecord("p1", "ann1", frozenset({MINOR_MIS}), "one aspect overstated"),
            AnnotationRecord("p2", "ann1", frozenset({MINOR_OM}), "durability not extracted"),
            AnnotationRecord("p3", "ann2", frozenset({EX}), "issues downplayed overall"),
        ]

    def test_round_trip(self, tmp_path):
        path = tmp_path / "annotations.csv"
        save_annotations(path, self._records())
        loaded, report = load_annotations(path)
        assert loaded == self._records()
        assert not report.rejects

    def test_unknown_label_rejected(self, tmp_path):
        path = tmp_path / "annotations.csv"
        path.write_text(
            "product_id,annotator_id,labels,reason\np1,a1,SEVERE,bad\n",
            encoding="utf-8",
        )
        records, report = load_annotations(path)
        assert records == []
        assert len(report.rejects) == 1

    def test_invalid_combination_rejected(self, tmp_path):
        path = tmp_path / "annotations.csv"
        path.write_text(
            "product_id,annotator_id,labels,reason\n"
            "p1,a1,NO_ERRORS;MINOR_OMISSION,contradiction\n",
            encoding="utf-8",
        )
        records, report = load_annotations(path)
        assert records == []
        assert len(report.rejects) == 1

    def test_missing_columns_fatal(self, tmp_path):
        path = tmp_path / "annotations.csv"
        path.write_text("product_id,labels\np1,NO_ERRORS\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_annotations(path)


class TestResolveFinalLabels:
    def test_single_annotator_passes_through(self):
        records = [AnnotationRecord("p1", "a1", frozenset({NE}))]
        finals, no_majority = resolve_final_labels(records)
        assert finals == {"p1": frozenset({NE})}
        assert no_majority == []

    def test_majorities_and_exclusions(self):
        records = [
            AnnotationRecord("p1", "a1", frozenset({NE})),
            AnnotationRecord("p1", "a2", frozenset({NE})),
            AnnotationRecord("p1", "a3", frozenset({MINOR_OM})),
            AnnotationRecord("p2", "a1", frozenset({EX})),
            AnnotationRecord("p2", "a2", frozenset({MINOR_OM})),
            AnnotationRecord("p2", "a3", frozenset({MAJOR_MIS})),
        ]
        finals, no_majority = resolve_final_labels(records)
        assert finals == {"p1": frozenset({NE})}
        assert no_majority == ["p2"]
