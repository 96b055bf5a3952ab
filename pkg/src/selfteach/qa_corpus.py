"""Ingest, deduplicate, and characterize multiple-choice QA datasets.

The on-disk format is JSONL, one object per line:

    {"id": str, "question": str, "options": [str, ...], "answer_index": int,
     "exam_title": str?, "subject": str?}

All lengths are counted in Unicode code points, which matches character-based
statistics for Chinese text.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError, ValidationError

_WS_RE = re.compile(r"\s+")


@dataclass
class QAInstance:
    """A multiple-choice question with its gold option and exam metadata."""

    id: str
    question: str
    options: list[str]
    answer_index: int
    exam_title: str | None = None
    subject: str | None = None


@dataclass
class CoverageReport:
    """Lower-bound estimate of how many subjects a set of exam titles mentions."""

    covered_subjects: set[str]
    total_subjects: int
    fraction_titled: float

    def to_dict(self) -> dict:
        return {
            "covered_subjects": sorted(self.covered_subjects),
            "total_subjects": self.total_subjects,
            "fraction_titled": self.fraction_titled,
        }


@dataclass
class StatsReport:
    """Corpus-level statistics of a weakly-labeled multiple-choice dataset."""

    avg_num_options: float
    avg_question_len_chars: float
    avg_option_len_chars: float
    avg_context_len_chars: float
    char_vocab_size: int
    non_extractive_pct: float

    def to_dict(self) -> dict:
        return {
            "avg_num_options": self.avg_num_options,
            "avg_question_len_chars": self.avg_question_len_chars,
            "avg_option_len_chars": self.avg_option_len_chars,
            "avg_context_len_chars": self.avg_context_len_chars,
            "char_vocab_size": self.char_vocab_size,
            "non_extractive_pct": self.non_extractive_pct,
        }


def validate_qa(instance: QAInstance, where: str = "") -> None:
    """Raise ValidationError naming the offending field."""
    loc = f"{where}: " if where else ""
    if not instance.id:
        raise ValidationError(f"{loc}id must be a non-empty string")
    if not isinstance(instance.question, str):
        raise ValidationError(f"{loc}question must be a string")
    if len(instance.options) < 2:
        raise ValidationError(f"{loc}options must contain at least 2 entries")
    for i, opt in enumerate(instance.options):
        if not isinstance(opt, str) or not opt:
            raise ValidationError(f"{loc}options[{i}] must be a non-empty string")
    if not isinstance(instance.answer_index, int) or isinstance(instance.answer_index, bool):
        raise ValidationError(f"{loc}answer_index must be an integer")
    if not 0 <= instance.answer_index < len(instance.options):
        raise ValidationError(f"{loc}answer_index out of range")


def parse_qa(path: str | Path) -> list[QAInstance]:
    """Parse a QA JSONL file, validating every record.

    Errors carry the 1-based line number.  Blank lines are skipped; an empty
    file yields an empty list.  Record ids must be unique within the file.
    """
    instances: list[QAInstance] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"line {lineno}: malformed JSON ({e.msg})") from e
            if not isinstance(raw, dict):
                raise ParseError(f"line {lineno}: expected a JSON object")
            try:
                inst = QAInstance(
                    id=raw["id"],
                    question=raw["question"],
                    options=list(raw["options"]),
                    answer_index=raw["answer_index"],
                    exam_title=raw.get("exam_title"),
                    subject=raw.get("subject"),
                )
            except (KeyError, TypeError) as e:
                raise ValidationError(f"line {lineno}: missing or invalid field ({e})") from e
            validate_qa(inst, where=f"line {lineno}")
            if inst.id in seen_ids:
                raise ValidationError(f"line {lineno}: id duplicated within dataset: {inst.id!r}")
            seen_ids.add(inst.id)
            instances.append(inst)
    return instances


def _normalize_text(text: str) -> str:
    return _WS_RE.sub(" ", unicodedata.normalize("NFC", text).strip())


def dedupe_key(instance: QAInstance) -> tuple:
    """Duplicate key: normalized question + normalized sorted options.

    Option order and answer_index are deliberately ignored: aggregators shuffle
    options, and records that differ only in the marked answer are duplicates
    of unknown correctness.
    """
    return (
        _normalize_text(instance.question),
        tuple(sorted(_normalize_text(o) for o in instance.options)),
    )


def dedupe(instances: Sequence[QAInstance]) -> list[QAInstance]:
    """Keep the first occurrence per duplicate key, preserving input order."""
    seen: set[tuple] = set()
    out: list[QAInstance] = []
    for inst in instances:
        key = dedupe_key(inst)
        if key in seen:
            continue
        seen.add(key)
        out.append(inst)
    return out


@lru_cache(maxsize=4096)
def _fold_char(c: str) -> str:
    # Latin letters compare case-insensitively; any other script is left alone.
    if "LATIN" in unicodedata.name(c, ""):
        return c.lower()
    return c


def _fold(text: str) -> str:
    return "".join(_fold_char(c) for c in text)


def estimate_subject_coverage(
    exam_titles: Sequence[str], subjects: Sequence[str]
) -> CoverageReport:
    """Count a subject as covered iff its name is a substring of any title.

    ``fraction_titled`` is the share of titles containing at least one subject
    name; it is 0 when there are no titles.
    """
    unique_subjects = list(dict.fromkeys(subjects))
    if not unique_subjects:
        raise ValidationError("subjects must be non-empty")
    folded_titles = [_fold(t) for t in exam_titles]
    folded_subjects = {s: _fold(s) for s in unique_subjects}
    covered = {
        s for s, fs in folded_subjects.items() if any(fs in t for t in folded_titles)
    }
    if folded_titles:
        titled = sum(
            1
            for t in folded_titles
            if any(fs in t for fs in folded_subjects.values())
        )
        fraction = titled / len(folded_titles)
    else:
        fraction = 0.0
    return CoverageReport(
        covered_subjects=covered,
        total_subjects=len(unique_subjects),
        fraction_titled=fraction,
    )


def corpus_stats(dataset: Sequence) -> StatsReport:
    """Statistics over weakly-labeled multiple-choice instances.

    Accepts any records exposing ``question``, ``options``, ``answer_index``
    and ``context``.  An instance counts as non-extractive when its correct
    option string is not a substring of its context.
    """
    if len(dataset) == 0:
        raise ValidationError("corpus_stats needs a non-empty dataset")
    n = len(dataset)
    total_options = 0
    total_option_chars = 0
    chars: set[str] = set()
    question_chars = 0
    context_chars = 0
    non_extractive = 0
    for inst in dataset:
        total_options += len(inst.options)
        question_chars += len(inst.question)
        context_chars += len(inst.context)
        chars.update(inst.question)
        chars.update(inst.context)
        for opt in inst.options:
            total_option_chars += len(opt)
            chars.update(opt)
        if inst.options[inst.answer_index] not in inst.context:
            non_extractive += 1
    return StatsReport(
        avg_num_options=total_options / n,
        avg_question_len_chars=question_chars / n,
        avg_option_len_chars=total_option_chars / total_options,
        avg_context_len_chars=context_chars / n,
        char_vocab_size=len(chars),
        non_extractive_pct=100.0 * non_extractive / n,
    )
