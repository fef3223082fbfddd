"""Deterministic text cleaning and tokenization.

The cleaning pipeline applies, in order: URL removal, email removal, markup
tag removal, non-ASCII removal, lowercasing, numeric-run replacement with a
placeholder token, and punctuation-to-space substitution. Tokens shorter
than the configured minimum or on the stop-word list are dropped, and the
survivors are lemmatized with an exceptions table plus suffix rules.

Everything here is a pure function of (input, config): same bytes in, same
tokens out, on any machine.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .corpus import Document, Label

DEFAULT_PLACEHOLDER = "somenuber"
DEFAULT_MIN_TOKEN_LEN = 3

_URL_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.-]*://\S*|www\.\S*")
_EMAIL_RE = re.compile(r"\S*@\S*\.\S*")
# Greedy [^<]* deletes the maximal span without a nested '<'; an unclosed
# '<' never matches, so pathological input survives to the punctuation pass.
_TAG_RE = re.compile(r"<[^<]*>")
_DIGIT_RUN_RE = re.compile(r"\d+(?:[.,]\d+)*")
_NON_ALNUM_RE = re.compile(r"[^a-z0-9]")
_TOKEN_SHAPE_RE = re.compile(r"[a-z]+")

_VOWELS = frozenset("aeiou")


@dataclass(frozen=True)
class PipelineConfig:
    """Immutable cleaning configuration.

    The numeric placeholder must itself survive the pipeline: lowercase
    alphabetic, at least min_token_len long, and not a stop word.
    """

    stopword_list: frozenset[str] = field(default_factory=frozenset)
    lemma_exceptions: dict[str, str] = field(default_factory=dict)
    numeric_placeholder: str = DEFAULT_PLACEHOLDER
    min_token_len: int = DEFAULT_MIN_TOKEN_LEN

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")
        p = self.numeric_placeholder
        if not _TOKEN_SHAPE_RE.fullmatch(p):
            raise ValueError(f"numeric_placeholder must be lowercase alphabetic: {p!r}")
        if len(p) < self.min_token_len:
            raise ValueError(f"numeric_placeholder shorter than min_token_len: {p!r}")
        if p in self.stopword_list:
            raise ValueError(f"numeric_placeholder is a stop word: {p!r}")

    @classmethod
    def default(cls) -> "PipelineConfig":
        """Config backed by the bundled stop-word and lemma tables."""
        data = resources.files("verinews.data")
        return cls(
            stopword_list=parse_stopwords((data / "stopwords_english.txt").read_text("utf-8")),
            lemma_exceptions=parse_lemma_exceptions(
                (data / "lemma_exceptions.tsv").read_text("utf-8")
            ),
        )

    def digest(self) -> str:
        """SHA-256 over the canonical form of the full rule set.

        Bundles embed this digest so a trained model is pinned to the exact
        stop-word list and lemma table it was built with.
        """
        h = hashlib.sha256()
        h.update(self.numeric_placeholder.encode())
        h.update(b"\x00")
        h.update(str(self.min_token_len).encode())
        for word in sorted(self.stopword_list):
            h.update(b"\x00" + word.encode())
        for surface in sorted(self.lemma_exceptions):
            h.update(b"\x01" + surface.encode() + b"\t" + self.lemma_exceptions[surface].encode())
        return h.hexdigest()


@dataclass(frozen=True)
class CleanDoc:
    """Preprocessed document: ordered lowercase tokens plus optional label."""

    id: str
    tokens: tuple[str, ...]
    label: Label | None = None


def parse_stopwords(text: str) -> frozenset[str]:
    """Stop-word list format: one token per line, '#' starts a comment."""
    words = set()
    for line in text.splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            words.add(entry)
    return frozenset(words)


def parse_lemma_exceptions(text: str) -> dict[str, str]:
    """Lemma table format: surface<TAB>lemma per line, '#' comments allowed."""
    table = {}
    for line in text.splitlines():
        entry = line.split("#", 1)[0].rstrip()
        if not entry.strip():
            continue
        surface, sep, lemma = entry.partition("\t")
        if not sep or not surface.strip() or not lemma.strip():
            raise ValueError(f"bad lemma exceptions line: {line!r}")
        table[surface.strip()] = lemma.strip()
    return table


def load_stopwords(path: str | Path) -> frozenset[str]:
    return parse_stopwords(Path(path).read_text("utf-8"))


def load_lemma_exceptions(path: str | Path) -> dict[str, str]:
    return parse_lemma_exceptions(Path(path).read_text("utf-8"))


def normalize_text(raw: str, cfg: PipelineConfig) -> str:
    """Apply the ordered cleaning rules; total on any input string.

    Order: URLs, emails, markup tags, non-ASCII, lowercase, digit runs to
    the placeholder token, remaining non-alphanumerics to spaces.
    """
    s = _URL_RE.sub("", raw)
    s = _EMAIL_RE.sub("", s)
    s = _TAG_RE.sub("", s)
    s = s.encode("ascii", "ignore").decode("ascii")
    s = s.lower()
    s = _DIGIT_RUN_RE.sub(_placeholder_sub(cfg.numeric_placeholder), s)
    return _NON_ALNUM_RE.sub(" ", s)


def _placeholder_sub(placeholder: str):
    # Pad with a space only against an alphanumeric neighbor, so an already
    # delimited digit run substitutes 1:1 ("alone 2" -> "alone somenuber")
    # while "78visits" still splits into two tokens.
    def sub(m: re.Match) -> str:
        s = m.string
        left = " " if m.start() > 0 and s[m.start() - 1].isalnum() else ""
        right = " " if m.end() < len(s) and s[m.end()].isalnum() else ""
        return left + placeholder + right

    return sub


def tokenize_and_filter(normalized: str, cfg: PipelineConfig) -> list[str]:
    """Split on whitespace runs, dropping short tokens and stop words."""
    return [
        t
        for t in normalized.split()
        if len(t) >= cfg.min_token_len and t not in cfg.stopword_list
    ]


def lemmatize_token(token: str, cfg: PipelineConfig) -> str:
    """Exceptions-table lookup, then the first applicable suffix rule.

    Suffix rules in order: -ies>-y; -sses>-ss; strip -es, -s (not after
    -ss), -ing, -ed, each only when the remaining stem has >= 3 characters.
    Stripping -ing/-ed collapses a doubled final consonant (running > run).
    """
    exception = cfg.lemma_exceptions.get(token)
    if exception is not None:
        return exception
    if token.endswith("ies"):
        return token[:-3] + "y"
    if token.endswith("sses"):
        return token[:-2]
    if token.endswith("es") and len(token) - 2 >= 3:
        return token[:-2]
    if token.endswith("s") and not token.endswith("ss") and len(token) - 1 >= 3:
        return token[:-1]
    if token.endswith("ing") and len(token) - 3 >= 3:
        return _undouble(token[:-3])
    if token.endswith("ed") and len(token) - 2 >= 3:
        return _undouble(token[:-2])
    return token


def _undouble(stem: str) -> str:
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS:
        return stem[:-1]
    return stem


def _lemmatize_stable(token: str, cfg: PipelineConfig) -> str:
    # Iterate to a fixed point so preprocessing its own output is a no-op
    # ("houses" -> "hous" -> "hou" in one call, not across two passes).
    # Every suffix rule shortens the token; the bound guards exception
    # tables that map between surfaces.
    for _ in range(len(token) + 1):
        lemma = lemmatize_token(token, cfg)
        if lemma == token:
            return token
        token = lemma
    return token


def preprocess_document(doc: Document, cfg: PipelineConfig) -> CleanDoc:
    """Run the full pipeline over title + " " + body.

    Lemmas are re-checked against the length and stop-word filters since
    lemmatization can shorten a token or surface a stop word.
    """
    normalized = normalize_text(doc.title + " " + doc.body, cfg)
    tokens = tokenize_and_filter(normalized, cfg)
    lemmas = (_lemmatize_stable(t, cfg) for t in tokens)
    kept = tuple(
        t for t in lemmas if len(t) >= cfg.min_token_len and t not in cfg.stopword_list
    )
    return CleanDoc(id=doc.id, tokens=kept, label=doc.label)


def preprocess_corpus(docs: list[Document], cfg: PipelineConfig) -> list[CleanDoc]:
    return [preprocess_document(d, cfg) for d in docs]
