"""Versioned tokenizer shared by the generation metrics and corpus statistics"""

import re
from typing import List

TOKENIZER_VERSION = "v1"

# v1: lowercase, every punctuation mark its own token, split on whitespace
_TOKEN = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str) -> List[str]:
    return _TOKEN.findall(text.lower())


def word_count(text: str) -> int:
    return sum(1 for token in tokenize(text) if token[0].isalnum() or token[0] == "_")
