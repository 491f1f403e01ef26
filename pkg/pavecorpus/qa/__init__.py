from pavecorpus.qa.codes import FAILURE_CODES, describe
from pavecorpus.qa.review import (
    ReviewBundle,
    export_review_bundle,
    load_verdicts,
    merge_verdicts,
    sample_for_review,
)
from pavecorpus.qa.validator import CorpusValidation, validate_corpus, validate_record

__all__ = [
    "CorpusValidation",
    "FAILURE_CODES",
    "ReviewBundle",
    "describe",
    "export_review_bundle",
    "load_verdicts",
    "merge_verdicts",
    "sample_for_review",
    "validate_corpus",
    "validate_record",
]
