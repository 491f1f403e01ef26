import pytest

from pavecorpus.errors import UnknownLabel
from pavecorpus.models.annotation import ConditionClass, ConditionLabel, Severity
from pavecorpus.vocabulary import (
    canonicalize_label,
    condition_from_color,
    default_alias_table,
    normalize_key,
    treatment_for,
)


def test_normalize_key_collapses_separators_and_case():
    assert normalize_key("  Crack_Longitudinal ") == "crack longitudinal"
    assert normalize_key("alligator--high") == "alligator high"


def test_dataset_alias_maps_to_canonical():
    distress = canonicalize_label("D00", "rdd2022")
    assert distress.canonical_label == "longitudinal crack"
    assert distress.source_label == "D00"
    assert distress.source_dataset == "rdd2022"


def test_canonical_name_is_accepted_for_any_dataset():
    assert canonicalize_label("Pothole", "no_such_dataset").canonical_label == "pothole"


def test_unknown_label_raises():
    with pytest.raises(UnknownLabel) as info:
        canonicalize_label("tree shadow", "pid")
    assert "tree shadow" in str(info.value)


def test_alias_table_is_versioned_and_lists_13_labels():
    table = default_alias_table()
    assert table.version
    assert len(table.canonical) == 13
    assert table.is_canonical("Alligator Crack")
    assert not table.is_canonical("crocodile crack")


@pytest.mark.parametrize(
    "color, label",
    [("Green", ConditionLabel.GOOD), ("Blue", ConditionLabel.FAIR), ("Yellow", ConditionLabel.POOR), ("Red", ConditionLabel.FAILED)],
)
def test_condition_from_color(color, label):
    assert condition_from_color(color).label is label


@pytest.mark.parametrize(
    "score, label",
    [(100, ConditionLabel.GOOD), (70, ConditionLabel.GOOD), (69.5, ConditionLabel.FAIR), (41, ConditionLabel.POOR), (0, ConditionLabel.FAILED)],
)
def test_condition_from_pci(score, label):
    assert ConditionClass.from_pci(score).label is label


def test_treatment_table_covers_severity_and_fallbacks():
    assert treatment_for("alligator crack", Severity.HIGH) == "full-depth patching"
    assert treatment_for("oblique crack", Severity.MEDIUM) == "crack sealing"
    assert treatment_for("pothole") == "pothole patching"
    assert treatment_for(None) == "routine monitoring"
