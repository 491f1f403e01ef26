from pavecorpus.report.render import (
    FORMATS,
    parse_stats_csv,
    render_csv,
    render_metric_table,
    render_report,
    render_table,
)
from pavecorpus.report.stats import CorpusStats, compute_stats

__all__ = [
    "CorpusStats",
    "FORMATS",
    "compute_stats",
    "parse_stats_csv",
    "render_csv",
    "render_metric_table",
    "render_report",
    "render_table",
]
