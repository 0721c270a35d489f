"""Seeded synthetic demo corpus: ~200 three-sentence passages over the
19-class schema with planted, class-correlated keyword phrases.

The generator is self-checking: every passage is re-segmented, windowed and
keyword-matched through the real pipeline, and generation fails if the
planted phrases do not reproduce the intended gold labels exactly. Class
frequencies follow a 1/(rank+2) profile, so the corpus is imbalanced by
design and byte-identical for a given seed.
"""

from __future__ import annotations

import random
from pathlib import Path

from .classify import keyword_classify
from .corpus import filter_passages, is_english, window_passages
from .schema import (
    Document,
    KeywordLexicon,
    LabelSchema,
    Passage,
    default_lexicon,
    default_schema,
    write_jsonl,
)

# Filler material; none of these words may form part of a lexicon phrase.
_ADJECTIVES = [
    "recent", "annual", "detailed", "independent", "public", "new",
    "thorough", "quarterly", "external", "updated",
]
_NOUNS = [
    "report", "supplier", "retailer", "summary", "review", "statement",
    "analysis", "disclosure", "assessment", "investigation", "survey",
    "chapter", "overview", "briefing",
]
_VERBS = [
    "describes", "notes", "highlights", "examines", "discusses", "mentions",
    "outlines", "confirms", "states", "finds",
]
_TAILS = [
    "last year", "this quarter", "across the sector", "at several sites",
    "according to the review", "for the second time", "with further detail",
    "despite earlier findings", "in the latest update", "over recent months",
]

N_DOCUMENTS = 42
PASSAGES_PER_DOC = 5
WINDOW = 3
BRAND_PROB = 0.35
EMPTY_GOLD_PROB = 0.08


class DemoGenerationError(RuntimeError):
    pass


def _check_filler_words(lexicon: KeywordLexicon) -> None:
    keyword_tokens = set()
    for phrases in lexicon.issue_keywords.values():
        for phrase in phrases:
            keyword_tokens.update(w.lower() for w in phrase.split())
    keyword_tokens.discard("of")  # harmless alone; phrases need their rare tokens too
    fillers = set()
    for pool in (_ADJECTIVES, _NOUNS, _VERBS):
        fillers.update(pool)
    for tail in _TAILS:
        fillers.update(tail.split())
    clash = fillers & keyword_tokens
    if clash:
        raise DemoGenerationError(f"filler words collide with lexicon tokens: {sorted(clash)}")


def _class_weights(n_classes: int) -> list[float]:
    return [1.0 / (c + 2) for c in range(n_classes)]


def _keyword_sentence(rng: random.Random, phrase: str, brand: str | None) -> str:
    noun = rng.choice(_NOUNS)
    verb = rng.choice(_VERBS)
    adj = rng.choice(_ADJECTIVES)
    tail = rng.choice(_TAILS)
    if brand is not None:
        body = f"The {adj} {noun} about {brand} {verb} that {phrase} was a concern {tail}"
    else:
        body = f"The {adj} {noun} {verb} that {phrase} remained a concern {tail}"
    return body + "."

def _filler_sentence(rng: random.Random, brand: str | None) -> str:
    noun = rng.choice(_NOUNS)
    verb = rng.choice(_VERBS)
    adj = rng.choice(_ADJECTIVES)
    tail = rng.choice(_TAILS)
    article = "An" if adj[0] in "aeiou" else "A"
    if brand is not None:
        return f"{article} {adj} {noun} about {brand} {verb} the broader picture {tail}."
    return f"{article} {adj} {noun} {verb} the broader picture {tail}."


def _plan_passage(
    rng: random.Random, schema: LabelSchema, lexicon: KeywordLexicon, weights: list[float]
) -> tuple[list[str], set[int], str | None]:
    """Returns (three sentences, gold labels, brand or None)."""
    brand = rng.choice(lexicon.brands) if rng.random() < BRAND_PROB else None
    if rng.random() < EMPTY_GOLD_PROB:
        # Brand-only passage: kept by filtering but belongs to no class.
        brand = brand or rng.choice(lexicon.brands)
        sentences = [_filler_sentence(rng, brand if i == 0 else None) for i in range(WINDOW)]
        return sentences, set(), brand

    n_labels = rng.choices([1, 2, 3], weights=[0.6, 0.3, 0.1])[0]
    class_ids = schema.class_ids
    gold: set[int] = set()
    while len(gold) < n_labels:
        gold.add(rng.choices(class_ids, weights=weights)[0])

    phrases = [(c, rng.choice(lexicon.issue_keywords[c])) for c in sorted(gold)]
    slots = list(range(WINDOW))
    rng.shuffle(slots)
    sentences: list[str] = []
    per_slot: dict[int, list[str]] = {i: [] for i in range(WINDOW)}
    for i, (_, phrase) in enumerate(phrases):
        per_slot[slots[i % WINDOW]].append(phrase)
    brand_slot = rng.randrange(WINDOW) if brand is not None else -1
    for i in range(WINDOW):
        slot_brand = brand if i == brand_slot else None
        phrases_here = per_slot[i]
        if not phrases_here:
            sentences.append(_filler_sentence(rng, slot_brand))
            continue
        sentence = _keyword_sentence(rng, phrases_here[0], slot_brand)
        if len(phrases_here) > 1:
            body = sentence[:-1]
            for phrase in phrases_here[1:]:
                body += (
                    f", and the same {rng.choice(_NOUNS)} {rng.choice(_VERBS)}"
                    f" that {phrase} was noted as well"
                )
            sentence = body + "."
        sentences.append(sentence)
    return sentences, gold, brand


def generate_demo_corpus(
    seed: int,
    out_dir: str | Path,
    n_documents: int = N_DOCUMENTS,
    passages_per_doc: int = PASSAGES_PER_DOC,
) -> dict:
    """Write schema.json, lexicon.json, documents.jsonl and passages.jsonl.

    Returns generation statistics (documents, passages, label histogram).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    schema = default_schema()
    lexicon = default_lexicon()
    lexicon.validate(schema)
    _check_filler_words(lexicon)

    rng = random.Random(seed)
    weights = _class_weights(len(schema.classes))

    documents: list[Document] = []
    passages: list[Passage] = []
    histogram = {c: 0 for c in schema.class_ids}
    for d in range(n_documents):
        golds: list[set[int]] = []
        doc_sentences: list[str] = []
        for _ in range(passages_per_doc):
            sentences, gold, _brand = _plan_passage(rng, schema, lexicon, weights)
            doc_sentences.extend(sentences)
            golds.append(gold)
            for c in gold:
                histogram[c] += 1
        if d % 2 == 0:
            doc = Document(
                id=f"demo-{d:03d}",
                title=f"Supply chain study {d}",
                source_type="scientific",
                doi=f"10.5555/demo.{seed}.{d}",
                text=" ".join(doc_sentences),
            )
        else:
            doc = Document(
                id=f"demo-{d:03d}",
                title=f"Field report {d}",
                source_type="ngo",
                website=f"https://example.org/reports/{d}",
                text=" ".join(doc_sentences),
            )
        if not is_english(doc.text):
            raise DemoGenerationError(f"generated document {doc.id} failed the English check")
        windows = window_passages(doc, WINDOW)
        if len(windows) != passages_per_doc:
            raise DemoGenerationError(
                f"document {doc.id}: expected {passages_per_doc} windows, got {len(windows)}"
            )
        kept = filter_passages(windows, lexicon)
        if len(kept) != len(windows):
            raise DemoGenerationError(f"document {doc.id}: a generated passage had no keyword")
        for passage, gold in zip(kept, golds):
            passage.gold_labels = gold
            if keyword_classify(passage, lexicon) != gold:
                raise DemoGenerationError(
                    f"passage {passage.id}: keyword labels do not reproduce the plan"
                )
        documents.append(doc)
        passages.extend(kept)

    (out_dir / "schema.json").write_text(
        _stable_json(schema.to_dict()), encoding="utf-8"
    )
    (out_dir / "lexicon.json").write_text(
        _stable_json(lexicon.to_dict()), encoding="utf-8"
    )
    write_jsonl(out_dir / "documents.jsonl", (doc.to_dict() for doc in documents))
    write_jsonl(out_dir / "passages.jsonl", (p.to_dict() for p in passages))
    return {
        "documents": len(documents),
        "passages": len(passages),
        "labeled_nonempty": sum(1 for p in passages if p.gold_labels),
        "label_histogram": {str(c): histogram[c] for c in schema.class_ids},
    }


def _stable_json(obj) -> str:
    import json

    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
