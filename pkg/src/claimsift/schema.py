"""Domain types shared across the pipeline: label schema, keyword lexicon,
documents, passages and dataset splits, plus their JSON (Lines) formats.

Lexicon matching is phrase-based: case-insensitive, anchored at word
boundaries, with runs of whitespace inside multi-word phrases treated as a
single separator.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional

SOCIAL = "social"
ENVIRONMENTAL = "environmental"

N_CLASSES = 19
N_SOCIAL = 11
N_ENVIRONMENTAL = 8


class SchemaError(ValueError):
    """A schema, lexicon or record violates a structural invariant."""


@dataclass(frozen=True)
class LabelClass:
    class_id: int
    name: str
    dimension: str


@dataclass(frozen=True)
class LabelSchema:
    """The fixed 19-class catalogue: 11 social and 8 environmental issues."""

    classes: tuple[LabelClass, ...]

    def __post_init__(self):
        if len(self.classes) != N_CLASSES:
            raise SchemaError(f"schema must define exactly {N_CLASSES} classes, got {len(self.classes)}")
        ids = [c.class_id for c in self.classes]
        if sorted(ids) != list(range(N_CLASSES)):
            raise SchemaError("class ids must be exactly 0..18")
        names = [c.name for c in self.classes]
        if len(set(names)) != len(names):
            raise SchemaError("class names must be unique")
        n_social = sum(1 for c in self.classes if c.dimension == SOCIAL)
        n_env = sum(1 for c in self.classes if c.dimension == ENVIRONMENTAL)
        if (n_social, n_env) != (N_SOCIAL, N_ENVIRONMENTAL):
            raise SchemaError(
                f"schema must hold {N_SOCIAL} social + {N_ENVIRONMENTAL} environmental classes, "
                f"got {n_social} + {n_env}"
            )

    @property
    def class_ids(self) -> list[int]:
        return [c.class_id for c in self.classes]

    def name_of(self, class_id: int) -> str:
        for c in self.classes:
            if c.class_id == class_id:
                return c.name
        raise KeyError(class_id)

    def to_dict(self) -> dict:
        return {
            "classes": [
                {"class_id": c.class_id, "name": c.name, "dimension": c.dimension}
                for c in self.classes
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "LabelSchema":
        try:
            classes = tuple(
                LabelClass(int(c["class_id"]), str(c["name"]), str(c["dimension"]))
                for c in data["classes"]
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed schema record: {exc}") from exc
        return cls(classes)


def _phrase_pattern(phrase: str) -> re.Pattern:
    # Word-boundary anchors that also work for phrases starting/ending in
    # non-word characters ("H&M", "Levi's"); internal whitespace matches any run.
    words = phrase.split()
    body = r"\s+".join(re.escape(w) for w in words)
    return re.compile(r"(?<!\w)" + body + r"(?!\w)", re.IGNORECASE)


@dataclass
class KeywordLexicon:
    """Expert keyword lists: brand names plus per-class issue phrases."""

    brands: list[str]
    issue_keywords: dict[int, list[str]]
    _brand_patterns: list[tuple[str, re.Pattern]] = field(default=None, repr=False, compare=False)
    _issue_patterns: dict[int, list[tuple[str, re.Pattern]]] = field(
        default=None, repr=False, compare=False
    )

    def validate(self, schema: LabelSchema) -> None:
        known = set(schema.class_ids)
        for cid in self.issue_keywords:
            if cid not in known:
                raise SchemaError(f"lexicon references unknown class_id {cid}")
        for cid in known:
            if not self.issue_keywords.get(cid):
                raise SchemaError(f"class {cid} has no issue keywords")

    def _compiled(self):
        if self._brand_patterns is None:
            self._brand_patterns = [(b, _phrase_pattern(b)) for b in self.brands]
            self._issue_patterns = {
                cid: [(kw, _phrase_pattern(kw)) for kw in kws]
                for cid, kws in self.issue_keywords.items()
            }
        return self._brand_patterns, self._issue_patterns

    def find_brands(self, text: str) -> set[str]:
        brand_patterns, _ = self._compiled()
        return {brand for brand, pat in brand_patterns if pat.search(text)}

    def find_issues(self, text: str) -> dict[int, set[str]]:
        """Map class_id -> matched keyword phrases; classes without a hit are absent."""
        _, issue_patterns = self._compiled()
        hits: dict[int, set[str]] = {}
        for cid, pats in issue_patterns.items():
            matched = {kw for kw, pat in pats if pat.search(text)}
            if matched:
                hits[cid] = matched
        return hits

    def to_dict(self) -> dict:
        return {
            "brands": list(self.brands),
            "issues": {str(cid): list(kws) for cid, kws in sorted(self.issue_keywords.items())},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "KeywordLexicon":
        try:
            brands = [str(b) for b in data["brands"]]
            issues = {int(cid): [str(k) for k in kws] for cid, kws in data["issues"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed lexicon record: {exc}") from exc
        return cls(brands=brands, issue_keywords=issues)


SOURCE_TYPES = ("scientific", "ngo", "upload")


@dataclass
class Document:
    """A source text: a scientific publication, an NGO report or a user upload."""

    id: str
    title: str
    source_type: str
    text: str
    doi: Optional[str] = None
    website: Optional[str] = None
    filename: Optional[str] = None

    def validate(self) -> None:
        if self.source_type not in SOURCE_TYPES:
            raise SchemaError(f"document {self.id!r}: unknown source_type {self.source_type!r}")
        required = {"scientific": "doi", "ngo": "website", "upload": "filename"}[self.source_type]
        if not getattr(self, required):
            raise SchemaError(
                f"document {self.id!r}: source_type={self.source_type} requires {required}"
            )

    def to_dict(self) -> dict:
        rec = {"id": self.id, "title": self.title, "source_type": self.source_type}
        for key in ("doi", "website", "filename"):
            value = getattr(self, key)
            if value is not None:
                rec[key] = value
        rec["text"] = self.text
        return rec

    @classmethod
    def from_dict(cls, data: Mapping) -> "Document":
        try:
            doc = cls(
                id=str(data["id"]),
                title=str(data["title"]),
                source_type=str(data["source_type"]),
                text=str(data["text"]),
                doi=data.get("doi"),
                website=data.get("website"),
                filename=data.get("filename"),
            )
        except KeyError as exc:
            raise SchemaError(f"document record missing field {exc}") from exc
        doc.validate()
        return doc


@dataclass
class Passage:
    """A window of 1..window consecutive sentences, the classification unit."""

    id: str
    document_id: str
    sentence_indices: tuple[int, int]  # inclusive
    text: str
    matched_brands: set[str] = field(default_factory=set)
    matched_issue_keywords: dict[int, set[str]] = field(default_factory=dict)
    gold_labels: Optional[set[int]] = None

    def with_matches(self, brands: set[str], issues: dict[int, set[str]]) -> "Passage":
        return replace(self, matched_brands=brands, matched_issue_keywords=issues)

    def to_dict(self) -> dict:
        rec = {
            "id": self.id,
            "document_id": self.document_id,
            "sentence_indices": list(self.sentence_indices),
            "text": self.text,
            "matched_brands": sorted(self.matched_brands),
            "matched_issue_keywords": {
                str(cid): sorted(kws) for cid, kws in sorted(self.matched_issue_keywords.items())
            },
        }
        if self.gold_labels is not None:
            rec["gold_labels"] = sorted(self.gold_labels)
        return rec

    @classmethod
    def from_dict(cls, data: Mapping) -> "Passage":
        try:
            first, last = data["sentence_indices"]
            gold = data.get("gold_labels")
            return cls(
                id=str(data["id"]),
                document_id=str(data["document_id"]),
                sentence_indices=(int(first), int(last)),
                text=str(data["text"]),
                matched_brands=set(data.get("matched_brands", [])),
                matched_issue_keywords={
                    int(cid): set(kws)
                    for cid, kws in data.get("matched_issue_keywords", {}).items()
                },
                gold_labels=None if gold is None else {int(c) for c in gold},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed passage record: {exc}") from exc


@dataclass(frozen=True)
class DatasetSplit:
    """Seeded 70/30 train-pool/test split, pool further split 80/20 train/val."""

    seed: int
    train_ids: tuple[str, ...]
    val_ids: tuple[str, ...]
    test_ids: tuple[str, ...]


def _data_path(name: str):
    return resources.files("claimsift.data").joinpath(name)


def load_schema(path: str | Path) -> LabelSchema:
    with open(path, encoding="utf-8") as fh:
        return LabelSchema.from_dict(json.load(fh))


def load_lexicon(path: str | Path) -> KeywordLexicon:
    with open(path, encoding="utf-8") as fh:
        return KeywordLexicon.from_dict(json.load(fh))


def default_schema() -> LabelSchema:
    return LabelSchema.from_dict(json.loads(_data_path("default_schema.json").read_text("utf-8")))


def default_lexicon() -> KeywordLexicon:
    return KeywordLexicon.from_dict(
        json.loads(_data_path("default_lexicon.json").read_text("utf-8"))
    )


def default_stopwords() -> frozenset[str]:
    words = []
    for line in _data_path("stopwords.txt").read_text("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line.lower())
    return frozenset(words)


def default_abbreviations() -> tuple[frozenset[str], frozenset[str]]:
    """Returns (always-suppress, suppress-only-before-digit) token sets, lowercased."""
    always: list[str] = []
    numeric: list[str] = []
    target = always
    for line in _data_path("abbreviations.txt").read_text("utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[numeric]":
            target = numeric
            continue
        target.append(line.lower())
    return frozenset(always), frozenset(numeric)


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def read_jsonl(path: str | Path) -> Iterable[tuple[int, dict]]:
    """Yield (1-based line number, parsed object); raises with the line number on bad JSON."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
