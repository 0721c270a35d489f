"""Walkthrough: from raw documents to classified passages.

Builds the seeded demo corpus, then replays each pipeline stage on one
document (language check, sentence segmentation, three-sentence windows,
keyword filtering) and compares the keyword baseline with a trained
TF-IDF + one-vs-rest SVM on a held-out test split.

Run:  python demos/01_corpus_to_classifiers.py
"""

import tempfile
from pathlib import Path

from claimsift import (
    evaluate,
    fit_tfidf,
    filter_passages,
    is_english,
    keyword_classify,
    load_documents,
    load_passages,
    segment_sentences,
    svm_predict,
    tfidf_transform,
    train_ovr_svm,
    window_passages,
)
from claimsift.demo import generate_demo_corpus
from claimsift.hpo import split_passages
from claimsift.schema import default_lexicon, default_schema

workdir = Path(tempfile.mkdtemp(prefix="claimsift-demo-"))
stats = generate_demo_corpus(seed=7, out_dir=workdir)
print(f"demo corpus: {stats['documents']} documents, {stats['passages']} passages -> {workdir}")

schema = default_schema()
lexicon = default_lexicon()

# --- one document through the pipeline -------------------------------------
doc = load_documents(workdir / "documents.jsonl")[0]
print(f"\ndocument {doc.id!r} ({doc.source_type}), English: {is_english(doc.text)}")
spans = segment_sentences(doc.text)
print(f"segmented into {len(spans)} sentences; first: {doc.text[spans[0][0]:spans[0][1]]!r}")
windows = window_passages(doc, window=3)
kept = filter_passages(windows, lexicon)
print(f"{len(windows)} three-sentence windows, {len(kept)} kept by keyword filter")
example = kept[0]
print(f"first passage matches: brands={sorted(example.matched_brands)} "
      f"issues={ {c: sorted(k) for c, k in example.matched_issue_keywords.items()} }")

# --- baselines on the labeled corpus ----------------------------------------
passages = load_passages(workdir / "passages.jsonl")
train, val, test = split_passages(passages, split_seed=0)
print(f"\nsplit sizes: train={len(train)} val={len(val)} test={len(test)}")

gold = {p.id: p.gold_labels for p in test}
keyword_pred = {p.id: keyword_classify(p, lexicon) for p in test}
report = evaluate(keyword_pred, gold)
print(f"keyword baseline   weighted-F1={report.weighted['f1']:.3f} "
      f"macro-F1={report.macro['f1']:.3f} micro-F1={report.micro['f1']:.3f}")

tfidf = fit_tfidf([p.text for p in train], max_ngram=1)
X = [tfidf_transform(tfidf, p.text) for p in train]
svm = train_ovr_svm(X, [p.gold_labels for p in train], C=8.0,
                    class_ids=list(range(19)), n_features=tfidf.n_features)
svm_pred = {p.id: svm_predict(svm, tfidf_transform(tfidf, p.text))[1] for p in test}
report = evaluate(svm_pred, gold)
print(f"tf-idf + linear svm weighted-F1={report.weighted['f1']:.3f} "
      f"macro-F1={report.macro['f1']:.3f} micro-F1={report.micro['f1']:.3f}")
