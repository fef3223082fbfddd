import struct

import numpy as np
import pytest

from verinews.corpus import Label
from verinews.errors import (
    BundleIntegrityError,
    BundleValidationError,
    BundleVersionError,
)
from verinews.features import IdfWeights, SparseVector, Vocabulary, build_vocabulary, fit_idf, tfidf_transform, count_transform
from verinews.models import TrainConfig, linear_decision, lr_fit, nb_fit, nb_log_posterior, sgd_fit
from verinews.persistence import (
    FORMAT_VERSION,
    MAGIC,
    ModelBundle,
    load_bundle,
    read_bundle,
    save_bundle_bytes,
    write_bundle,
)
from verinews.textprep import CleanDoc, PipelineConfig


def _corpus(n=12, vocab_terms=("alpha", "beta", "gamma", "delta")):
    docs = []
    for i in range(n):
        tokens = tuple(vocab_terms[j] for j in range((i % len(vocab_terms)) + 1))
        docs.append(CleanDoc(id=str(i), tokens=tokens, label=Label(i % 4)))
    return docs


def _pipeline():
    return PipelineConfig(
        stopword_list=frozenset({"the", "and"}),
        lemma_exceptions={"went": "go"},
    )


def _nb_bundle():
    docs = _corpus()
    vocab = build_vocabulary(docs)
    X = [count_transform(d, vocab) for d in docs]
    model = nb_fit(X, [d.label for d in docs])
    return ModelBundle(
        pipeline=_pipeline(),
        vocab=vocab,
        idf=None,
        model=model,
        feature_kind="count",
        n_train_docs=len(docs),
    ), X


def _linear_bundle(fit):
    docs = _corpus()
    vocab = build_vocabulary(docs)
    idf = fit_idf(docs, vocab)
    X = [tfidf_transform(d, vocab, idf) for d in docs]
    model = fit(X, [d.label for d in docs], TrainConfig())
    return ModelBundle(
        pipeline=_pipeline(),
        vocab=vocab,
        idf=idf,
        model=model,
        feature_kind="tfidf",
        n_train_docs=len(docs),
    ), X


class TestDeterminism:
    def test_same_bundle_same_bytes(self):
        bundle, _ = _nb_bundle()
        assert save_bundle_bytes(bundle) == save_bundle_bytes(bundle)

    def test_save_load_save_identical(self):
        for bundle, _ in (_nb_bundle(), _linear_bundle(lr_fit), _linear_bundle(sgd_fit)):
            first = save_bundle_bytes(bundle)
            second = save_bundle_bytes(load_bundle(first))
            assert first == second


class TestRoundTrip:
    def test_empty_vocabulary_nb_bundle(self):
        X = [SparseVector.from_counts({}, 0)] * 2
        model = nb_fit(X, [Label.FALSE, Label.TRUE])
        bundle = ModelBundle(
            pipeline=_pipeline(),
            vocab=Vocabulary(term_to_index={}),
            idf=None,
            model=model,
            feature_kind="count",
            n_train_docs=2,
        )
        again = load_bundle(save_bundle_bytes(bundle))
        assert again.vocab.size == 0
        assert again.model.class_log_prior.tolist() == model.class_log_prior.tolist()

    def test_nb_scores_bit_identical(self):
        bundle, X = _nb_bundle()
        again = load_bundle(save_bundle_bytes(bundle))
        for x in X:
            a = nb_log_posterior(bundle.model, x)
            b = nb_log_posterior(again.model, x)
            assert a.tobytes() == b.tobytes()

    @pytest.mark.parametrize("fit", [lr_fit, sgd_fit])
    def test_linear_scores_bit_identical(self, fit):
        bundle, X = _linear_bundle(fit)
        again = load_bundle(save_bundle_bytes(bundle))
        for x in X:
            assert linear_decision(bundle.model, x).tobytes() == linear_decision(again.model, x).tobytes()

    def test_pipeline_tables_embedded(self):
        bundle, _ = _nb_bundle()
        again = load_bundle(save_bundle_bytes(bundle))
        assert again.pipeline == bundle.pipeline
        assert again.pipeline_digest == bundle.pipeline_digest

    def test_metadata_round_trip(self):
        bundle, _ = _nb_bundle()
        stamped = ModelBundle(
            pipeline=bundle.pipeline,
            vocab=bundle.vocab,
            idf=None,
            model=bundle.model,
            feature_kind="count",
            n_train_docs=bundle.n_train_docs,
            created_at=1700000000,
        )
        again = load_bundle(save_bundle_bytes(stamped))
        assert again.created_at == 1700000000
        assert again.n_train_docs == bundle.n_train_docs
        assert again.feature_kind == "count"

    def test_file_round_trip(self, tmp_path):
        bundle, _ = _nb_bundle()
        path = tmp_path / "m.bundle"
        write_bundle(bundle, path)
        assert save_bundle_bytes(read_bundle(path)) == save_bundle_bytes(bundle)


class TestCorruption:
    def test_truncated_raises_integrity(self):
        raw = save_bundle_bytes(_nb_bundle()[0])
        for cut in (4, len(raw) // 2, len(raw) - 1):
            with pytest.raises(BundleIntegrityError):
                load_bundle(raw[:cut])

    def test_every_region_checksummed(self):
        raw = bytearray(save_bundle_bytes(_nb_bundle()[0]))
        for pos in (9, 25, len(raw) // 2, len(raw) - 5):
            corrupted = bytearray(raw)
            corrupted[pos] ^= 0x40
            with pytest.raises((BundleIntegrityError, BundleVersionError)):
                load_bundle(bytes(corrupted))

    def test_bad_magic(self):
        raw = bytearray(save_bundle_bytes(_nb_bundle()[0]))
        raw[:8] = b"NOTMAGIC"
        with pytest.raises(BundleIntegrityError, match="magic"):
            load_bundle(bytes(raw))

    def test_trailing_garbage_rejected(self):
        raw = save_bundle_bytes(_nb_bundle()[0])
        with pytest.raises(BundleIntegrityError, match="trailing"):
            load_bundle(raw + b"x")

    def test_newer_version_rejected_before_checksum(self):
        raw = bytearray(save_bundle_bytes(_nb_bundle()[0]))
        raw[8:12] = struct.pack("<I", FORMAT_VERSION + 1)
        with pytest.raises(BundleVersionError, match="newer"):
            load_bundle(bytes(raw))

    def test_magic_constant_is_eight_bytes(self):
        assert len(MAGIC) == 8


class TestValidation:
    def test_idf_must_accompany_tfidf(self):
        bundle, _ = _nb_bundle()
        with pytest.raises(BundleValidationError, match="idf"):
            ModelBundle(
                pipeline=bundle.pipeline,
                vocab=bundle.vocab,
                idf=None,
                model=bundle.model,
                feature_kind="tfidf",
                n_train_docs=1,
            )

    def test_idf_forbidden_for_count(self):
        bundle, _ = _linear_bundle(lr_fit)
        with pytest.raises(BundleValidationError, match="idf"):
            ModelBundle(
                pipeline=bundle.pipeline,
                vocab=bundle.vocab,
                idf=bundle.idf,
                model=bundle.model,
                feature_kind="count",
                n_train_docs=1,
            )

    def test_idf_below_one_rejected_on_load(self):
        bundle, _ = _linear_bundle(lr_fit)
        bad = ModelBundle(
            pipeline=bundle.pipeline,
            vocab=bundle.vocab,
            idf=IdfWeights(idf=np.full(bundle.vocab.size, 0.5), n_docs=3),
            model=bundle.model,
            feature_kind="tfidf",
            n_train_docs=1,
        )
        with pytest.raises(BundleValidationError, match="idf"):
            load_bundle(save_bundle_bytes(bad))

    def test_unknown_feature_kind_rejected(self):
        bundle, _ = _nb_bundle()
        with pytest.raises(BundleValidationError, match="feature_kind"):
            ModelBundle(
                pipeline=bundle.pipeline,
                vocab=bundle.vocab,
                idf=None,
                model=bundle.model,
                feature_kind="hashing",
                n_train_docs=1,
            )
