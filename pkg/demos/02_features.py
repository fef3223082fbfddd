"""Vocabulary construction plus count and TF-IDF vectors on a tiny corpus.

Run: python demos/02_features.py
"""

import numpy as np

from verinews import build_vocabulary, count_transform, fit_idf, tfidf_transform
from verinews.textprep import CleanDoc

corpus = [
    CleanDoc(id="d1", tokens=("cat", "dog")),
    CleanDoc(id="d2", tokens=("dog",)),
    CleanDoc(id="d3", tokens=("dog", "fish", "fish")),
]

# Terms index in lexicographic order, so the matrix layout is independent
# of document order.
vocab = build_vocabulary(corpus)
print("vocabulary:", vocab.term_to_index)

for doc in corpus:
    v = count_transform(doc, vocab)
    print(f"counts {doc.id}: {dict(zip(v.indices.tolist(), v.values.tolist()))}")
print()

# Smoothed IDF: ln((1+N)/(1+df)) + 1. A term in every document gets
# exactly 1.0; rarer terms score higher.
idf = fit_idf(corpus, vocab)
for term, i in vocab.term_to_index.items():
    print(f"idf[{term}] = {idf.idf[i]:.6f}")
print()

# TF-IDF vectors are L2-normalized, so every non-empty document sits on
# the unit sphere.
for doc in corpus:
    v = tfidf_transform(doc, vocab, idf)
    dense = v.to_dense()
    print(f"tfidf {doc.id}: {np.round(dense, 5).tolist()}  |norm {np.linalg.norm(dense):.9f}")

# Out-of-vocabulary tokens are silently dropped at transform time: the
# vocabulary is frozen after fitting.
oov = tfidf_transform(CleanDoc(id="oov", tokens=("zebra",)), vocab, idf)
print("all-OOV doc nnz:", oov.nnz)
