"""Corpus construction: document loading, English filtering, sentence
segmentation, three-sentence windowing, keyword filtering and seeded splits.

Everything here is pure given its inputs; segmentation and splitting are
deterministic, so the same corpus and seed always reproduce the same dataset.
"""

from __future__ import annotations

import random
import re
from pathlib import Path

from .schema import (
    DatasetSplit,
    Document,
    KeywordLexicon,
    Passage,
    SchemaError,
    default_abbreviations,
    default_stopwords,
    read_jsonl,
)

_STOPWORDS = default_stopwords()
_ABBREV_ALWAYS, _ABBREV_NUMERIC = default_abbreviations()

_TERMINATORS = ".!?"
_OPEN_QUOTES = "\"'“‘"
_TOKEN_TRIM = "\"'“”‘’.,;:!?()[]{}"

ENGLISH_STOPWORD_RATIO = 0.05
ENGLISH_MIN_TOKENS = 10
ENGLISH_WINDOW_TOKENS = 200


class CorpusError(ValueError):
    """Raised for unreadable inputs or records violating the document schema."""


def load_documents(path: str | Path, format: str = "jsonl") -> list[Document]:
    """Load documents from a JSON Lines file or from plain-text file(s).

    txt mode accepts a single file or a directory of ``*.txt`` files; each file
    becomes one upload-type document named after the file.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"unreadable path: {path}")
    if format == "jsonl":
        docs = []
        seen: set[str] = set()
        for lineno, rec in read_jsonl(path):
            try:
                doc = Document.from_dict(rec)
            except SchemaError as exc:
                raise CorpusError(f"{path}: line {lineno}: {exc}") from exc
            if doc.id in seen:
                raise CorpusError(f"{path}: line {lineno}: duplicate document id {doc.id!r}")
            seen.add(doc.id)
            docs.append(doc)
        return docs
    if format == "txt":
        files = sorted(path.glob("*.txt")) if path.is_dir() else [path]
        docs = []
        for f in files:
            try:
                text = f.read_text("utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                raise CorpusError(f"unreadable text file {f}: {exc}") from exc
            docs.append(
                Document(
                    id=f.stem,
                    title=f.stem,
                    source_type="upload",
                    filename=f.name,
                    text=text,
                )
            )
        return docs
    raise CorpusError(f"unknown document format {format!r}")


def is_english(text: str) -> bool:
    """Stopword-ratio heuristic over the first 200 whitespace tokens.

    Texts shorter than 10 tokens pass by default; otherwise at least 5% of the
    inspected tokens must hit the built-in English stopword list.
    """
    tokens = text.split()[:ENGLISH_WINDOW_TOKENS]
    if len(tokens) < ENGLISH_MIN_TOKENS:
        return True
    hits = sum(1 for tok in tokens if tok.strip(_TOKEN_TRIM).lower() in _STOPWORDS)
    return hits / len(tokens) >= ENGLISH_STOPWORD_RATIO


def segment_sentences(text: str) -> list[tuple[int, int]]:
    """Split text into sentence spans of character offsets [start, end).

    A boundary is a terminator (. ! ?) followed by whitespace and then an
    uppercase letter, a digit or an opening quote. A trailing token found in
    the abbreviation list suppresses the boundary; numero-style abbreviations
    ("No.") suppress only when a digit follows. Spans partition the
    non-whitespace content in order.
    """
    n = len(text)
    spans: list[tuple[int, int]] = []
    start = 0
    while start < n and text[start].isspace():
        start += 1
    if start == n:
        return []
    i = start
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS and i + 1 < n and text[i + 1].isspace():
            k = i + 1
            while k < n and text[k].isspace():
                k += 1
            if k < n and (text[k].isupper() or text[k].isdigit() or text[k] in _OPEN_QUOTES):
                if ch == "." and _is_abbreviation(text, i, next_char=text[k]):
                    i += 1
                    continue
                spans.append((start, i + 1))
                start = k
                i = k
                continue
        i += 1
    end = n
    while end > start and text[end - 1].isspace():
        end -= 1
    if end > start:
        spans.append((start, end))
    return spans


def _is_abbreviation(text: str, dot_index: int, next_char: str) -> bool:
    tok_start = dot_index
    while tok_start > 0 and not text[tok_start - 1].isspace():
        tok_start -= 1
    token = text[tok_start : dot_index + 1].lstrip("\"'“‘([{").lower()
    if token in _ABBREV_ALWAYS:
        return True
    if token in _ABBREV_NUMERIC and next_char.isdigit():
        return True
    return False


def window_passages(document: Document, window: int = 3) -> list[Passage]:
    """Cut the document into consecutive non-overlapping windows of sentences.

    The final window may be shorter. Passage text joins its sentences with a
    single space; sentence_indices records the inclusive sentence range.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    spans = segment_sentences(document.text)
    sentences = [document.text[a:b] for a, b in spans]
    passages = []
    for first in range(0, len(sentences), window):
        last = min(first + window, len(sentences)) - 1
        passages.append(
            Passage(
                id=f"{document.id}#s{first}-{last}",
                document_id=document.id,
                sentence_indices=(first, last),
                text=" ".join(sentences[first : last + 1]),
            )
        )
    return passages


def filter_passages(passages: list[Passage], lexicon: KeywordLexicon) -> list[Passage]:
    """Keep passages containing at least one brand or issue keyword.

    Kept passages carry their matches; the originals are not mutated.
    """
    kept = []
    for passage in passages:
        brands = lexicon.find_brands(passage.text)
        issues = lexicon.find_issues(passage.text)
        if brands or issues:
            kept.append(passage.with_matches(brands, issues))
    return kept


def split_dataset(labeled: list[Passage], seed: int) -> DatasetSplit:
    """Shuffle labeled passages and split 70/30, then the pool 80/20.

    Passages are order-normalized by id, then shuffled with Python's seeded
    Mersenne-Twister Fisher-Yates (``random.Random(seed).shuffle``), so the
    split is a pure function of the id set and the seed.
    """
    for p in labeled:
        if p.gold_labels is None:
            raise CorpusError(f"passage {p.id!r} has no gold_labels; cannot split")
    ids = sorted(p.id for p in labeled)
    if len(ids) != len(set(ids)):
        raise CorpusError("duplicate passage ids in labeled set")
    n = len(ids)
    if n < 10:
        raise CorpusError(f"need at least 10 labeled passages to split, got {n}")
    rng = random.Random(seed)
    rng.shuffle(ids)
    n_pool = (7 * n) // 10  # exact floor(0.7 * n), no float rounding
    pool, test = ids[:n_pool], ids[n_pool:]
    n_train = (8 * len(pool)) // 10
    train, val = pool[:n_train], pool[n_train:]
    return DatasetSplit(
        seed=seed, train_ids=tuple(train), val_ids=tuple(val), test_ids=tuple(test)
    )


def load_passages(path: str | Path) -> list[Passage]:
    passages = []
    seen: set[str] = set()
    for lineno, rec in read_jsonl(path):
        try:
            passage = Passage.from_dict(rec)
        except SchemaError as exc:
            raise CorpusError(f"{path}: line {lineno}: {exc}") from exc
        if passage.id in seen:
            raise CorpusError(f"{path}: line {lineno}: duplicate passage id {passage.id!r}")
        seen.add(passage.id)
        passages.append(passage)
    return passages


_WORD_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase word-character tokens; the shared tokenizer for TF-IDF and friends."""
    return _WORD_RE.findall(text.lower())


def stopwords() -> frozenset[str]:
    return _STOPWORDS
