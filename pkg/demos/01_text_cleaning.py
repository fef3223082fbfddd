"""Walk through the deterministic cleaning pipeline step by step.

Run: python demos/01_text_cleaning.py
"""

from verinews import Document, normalize_text, preprocess_document, tokenize_and_filter
from verinews.textprep import PipelineConfig, lemmatize_token

cfg = PipelineConfig.default()
print(f"bundled stop words: {len(cfg.stopword_list)}")
print(f"bundled lemma exceptions: {len(cfg.lemma_exceptions)}")
print()

# The normalizer applies, in order: URL removal, email removal, tag
# removal, non-ASCII removal, lowercasing, digit-run replacement with the
# placeholder token, punctuation to spaces.
samples = [
    "Home Alone 2",
    "Visit https://x.io or mail a@b.com!",
    "<b>BREAKING:</b> You Can Be Fined $1,500!!!",
    "café costs 3.50 today",
]
for raw in samples:
    print(f"{raw!r:55} -> {normalize_text(raw, cfg)!r}")
print()

# Tokens under 3 characters and stop words fall out, then each token is
# lemmatized (exceptions table first, suffix rules second).
normalized = normalize_text("Obama's Daughters Caught Burning US Flag", cfg)
tokens = tokenize_and_filter(normalized, cfg)
print("after tokenize_and_filter:", tokens)
print("after lemmatization:      ", [lemmatize_token(t, cfg) for t in tokens])
print()

# preprocess_document runs the whole thing over title + " " + body and
# re-applies the filters (a lemma can become short or become a stop word).
doc = Document(
    id="demo-1",
    title="Missouri lawmakers condemn Las Vegas shooting",
    body="Missouri politicians have made statements after the mass shooting.",
)
clean = preprocess_document(doc, cfg)
print("document tokens:", ",".join(clean.tokens))
