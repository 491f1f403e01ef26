"""Plain-text and CSV renderings of corpus statistics and metric reports"""

import csv
import io
from typing import Dict, List, Tuple

from pavecorpus.models.evaluation import MetricReport
from pavecorpus.report.stats import CorpusStats

FORMATS = ("table", "csv")
CSV_COLUMNS = ("section", "key", "value")
CLASS_KEY_SEPARATOR = "|"

# section name, attribute, value type
_SECTIONS: Tuple[Tuple[str, str, type], ...] = (
    ("dataset", "per_dataset_counts", int),
    ("distress", "global_distress_frequencies", float),
    ("category", "per_category_counts", int),
    ("turn_style", "turn_style_fractions", float),
    ("turn_count", "turn_count_histogram", int),
    ("word_count", "answer_word_count_histogram", int),
    ("answer_format", "answer_format_fractions", float),
)


def _rows(stats: CorpusStats) -> List[Tuple[str, str, str]]:
    rows = [
        ("summary", "total_records", str(stats.total_records)),
        ("summary", "total_answers", str(stats.total_answers)),
    ]
    for section, attr, kind in _SECTIONS:
        for key, value in getattr(stats, attr).items():
            rows.append((section, key, repr(float(value)) if kind is float else str(value)))
            if section == "dataset":
                for label, count in stats.per_dataset_class_counts.get(key, {}).items():
                    rows.append(("dataset_class", f"{key}{CLASS_KEY_SEPARATOR}{label}", str(count)))
    return rows


def render_csv(stats: CorpusStats) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(_rows(stats))
    return buffer.getvalue()


def parse_stats_csv(text: str) -> CorpusStats:
    """Inverse of render_csv"""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"stats CSV must have columns {','.join(CSV_COLUMNS)}")
    sections = {section: (attr, kind) for section, attr, kind in _SECTIONS}
    stats = CorpusStats()
    for row in reader:
        section, key, value = row["section"], row["key"], row["value"]
        if section == "summary":
            setattr(stats, key, int(value))
        elif section == "dataset_class":
            dataset, _, label = key.rpartition(CLASS_KEY_SEPARATOR)
            stats.per_dataset_class_counts.setdefault(dataset, {})[label] = int(value)
        elif section in sections:
            attr, kind = sections[section]
            getattr(stats, attr)[key] = kind(value)
        else:
            raise ValueError(f"unknown stats section '{section}'")
    return stats


# =========================================================
# TABLE
# =========================================================

def _block(title: str, values: Dict[str, float], percent: bool) -> List[str]:
    lines = [title, "-" * len(title)]
    if not values:
        lines.append("  (none)")
    width = max((len(k) for k in values), default=0)
    for key, value in values.items():
        shown = f"{value * 100:6.2f}%" if percent else f"{value:>7d}"
        lines.append(f"  {key:<{width}}  {shown}")
    lines.append("")
    return lines


def render_table(stats: CorpusStats) -> str:
    lines = [
        "Corpus statistics",
        "=================",
        f"Records: {stats.total_records}",
        f"Answers: {stats.total_answers}",
        f"Multi-turn fraction: {stats.multi_turn_fraction:.3f}",
        "",
    ]
    lines += _block("Records per source dataset", stats.per_dataset_counts, percent=False)
    for dataset, counts in stats.per_dataset_class_counts.items():
        lines += _block(f"Distress labels in {dataset}", counts, percent=False)
    lines += _block("Distress frequencies", stats.global_distress_frequencies, percent=True)
    lines += _block("Records per task category", stats.per_category_counts, percent=False)
    lines += _block("Turn style", stats.turn_style_fractions, percent=True)
    lines += _block("Exchanges per record", stats.turn_count_histogram, percent=False)
    if stats.turn_count_overflow:
        lines.append(f"WARNING: {stats.turn_count_overflow} record(s) outside the 1-8 exchange range")
        lines.append("")
    lines += _block("Answer word counts", stats.answer_word_count_histogram, percent=False)
    lines += _block("Answer formats", stats.answer_format_fractions, percent=True)
    return "\n".join(lines)


def render_report(stats: CorpusStats, fmt: str = "table") -> str:
    if fmt == "table":
        return render_table(stats)
    if fmt == "csv":
        return render_csv(stats)
    raise ValueError(f"unknown report format '{fmt}' (expected one of {', '.join(FORMATS)})")


# =========================================================
# METRICS
# =========================================================

def _metric_value(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def render_metric_table(report: MetricReport) -> str:
    """Grouped metric listing for a terminal or a text file"""
    lines = ["Evaluation", "==========", f"Parsing rate: {_metric_value(report.parsing_rate)}", ""]
    for group, families in (
        ("Perception", report.perception),
        ("Understanding", report.understanding),
        ("Explanatory", report.explanatory),
    ):
        lines += [group, "-" * len(group)]
        if not families:
            lines.append("  (no records)")
        for family, metrics in families.items():
            lines.append(f"  {family}")
            for name, value in metrics.items():
                if isinstance(value, dict):
                    for sub, sub_value in value.items():
                        lines.append(f"    {name}.{sub}: {_metric_value(sub_value)}")
                else:
                    lines.append(f"    {name}: {_metric_value(value)}")
        lines.append("")
    if report.errors:
        lines += ["Errors", "------", *(f"  {e}" for e in report.errors), ""]
    return "\n".join(lines)
