"""Evaluation metrics: multiple-choice accuracy, extractive EM, character-level F1.

Normalization for the extractive metrics removes all whitespace and Unicode
punctuation before comparison; F1 is computed on character multisets, which is
the usual convention for Chinese span answers.
"""

from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Sequence

from .errors import ValidationError


@dataclass
class EvalReport:
    """One evaluated metric on one split for one seed."""

    metric: str
    value: float  # percentage in [0, 100]
    n: int
    seed: int
    split: str

    def to_dict(self) -> dict:
        return asdict(self)


def _normalize(text: str) -> str:
    # Drop whitespace and anything in a Unicode punctuation category.
    return "".join(
        c for c in text
        if not c.isspace() and not unicodedata.category(c).startswith("P")
    )


def accuracy(predictions: Sequence[int], gold: Sequence[int]) -> float:
    """Percentage of positions where prediction equals gold."""
    if len(predictions) != len(gold):
        raise ValidationError(
            f"prediction/gold length mismatch: {len(predictions)} vs {len(gold)}"
        )
    if len(gold) == 0:
        raise ValidationError("accuracy is undefined on empty inputs")
    correct = sum(1 for p, g in zip(predictions, gold) if p == g)
    return 100.0 * correct / len(gold)


def exact_match(pred: str, gold: str) -> int:
    """1 iff the normalized strings are equal, else 0."""
    return int(_normalize(pred) == _normalize(gold))


def char_f1(pred: str, gold: str) -> float:
    """Character-multiset F1 after normalization.

    Both sides empty after normalization -> 1.0; exactly one empty -> 0.0.
    """
    p = _normalize(pred)
    g = _normalize(gold)
    if not p and not g:
        return 1.0
    if not p or not g:
        return 0.0
    overlap = sum((Counter(p) & Counter(g)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(p)
    recall = overlap / len(g)
    return 2 * precision * recall / (precision + recall)


def aggregate_seeds(values: Sequence[float]) -> tuple[float, float]:
    """Arithmetic mean and population standard deviation across seed runs."""
    if len(values) == 0:
        raise ValidationError("aggregate_seeds needs at least one value")
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, math.sqrt(var)
