import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbrescore.embeddings import (
    EmbeddingFormatError,
    cosine_similarity,
    load_embeddings_text,
    lookup,
    mean_vector,
    write_embeddings_text,
)


def load(text):
    return load_embeddings_text(text.splitlines())


def test_load_basic():
    t = load("2 3\nfoo 1 2 3\nbar 0.5 0 -1")
    assert t.dim == 3 and t.vocab_size == 2
    assert np.array_equal(t.entries["foo"], [1, 2, 3])


def test_load_dim_mismatch_names_word():
    with pytest.raises(EmbeddingFormatError, match="bar"):
        load("2 3\nfoo 1 2 3\nbar 1 2")


def test_load_duplicate_keeps_first():
    t = load("2 2\nfoo 1 2\nfoo 9 9")
    assert np.array_equal(lookup(t, "foo"), [1, 2])
    assert t.duplicate_rows == 1


def test_load_empty_file():
    with pytest.raises(EmbeddingFormatError, match="empty"):
        load_embeddings_text([])


def test_load_non_numeric():
    with pytest.raises(EmbeddingFormatError, match="non-numeric"):
        load("1 2\nfoo 1 x")


def test_write_round_trip():
    t = load("2 2\nfoo 0.1 -2.5\nbar 3 4")
    t2 = load(write_embeddings_text(t))
    assert t2.dim == t.dim
    for w in t.entries:
        assert np.array_equal(t.entries[w], t2.entries[w])


def test_lookup_exact_and_missing():
    t = load("1 2\nfoo 1 2")
    assert np.array_equal(lookup(t, "foo"), [1, 2])
    assert lookup(t, "baz") is None


def test_lookup_normalizes_case():
    t = load("1 2\nthe 1 2")
    assert np.array_equal(lookup(t, "The"), [1, 2])


def test_mean_vector_single_word():
    t = load("1 2\na 1 2")
    assert np.array_equal(mean_vector(t, ["a"]), [1, 2])


def test_mean_vector_average():
    t = load("2 2\na 1 0\nb 0 1")
    assert np.allclose(mean_vector(t, ["a", "b"]), [0.5, 0.5])


def test_mean_vector_all_oov_is_zero():
    t = load("1 2\na 1 2")
    assert np.array_equal(mean_vector(t, ["x", "y"]), [0, 0])
    assert np.array_equal(mean_vector(t, []), [0, 0])


def test_mean_vector_multiplicity():
    t = load("2 2\na 1 0\nb 0 1")
    # two copies of a, one of b
    assert np.allclose(mean_vector(t, ["a", "a", "b"]), [2 / 3, 1 / 3])


def test_mean_vector_repeated_word_identity():
    t = load("1 3\na 1 2 3")
    assert np.allclose(mean_vector(t, ["a"] * 5), [1, 2, 3])


def test_mean_vector_convexity():
    rng = np.random.default_rng(0)
    t = load("3 2\na 1 0\nb 0 1\nc -1 2")
    for _ in range(50):
        words = [("a", "b", "c")[k] for k in rng.integers(3, size=rng.integers(1, 8))]
        m = mean_vector(t, words)
        comps = np.array([t.entries[w] for w in words])
        assert np.all(m >= comps.min(axis=0) - 1e-12)
        assert np.all(m <= comps.max(axis=0) + 1e-12)


def test_cosine_basics():
    assert cosine_similarity([3, 4], [3, 4]) == pytest.approx(1.0)
    assert cosine_similarity([1, 0], [0, 1]) == 0
    assert cosine_similarity([0, 0], [1, 2]) == 0


def test_cosine_length_mismatch():
    with pytest.raises(ValueError):
        cosine_similarity([1, 2], [1, 2, 3])


# components either zero or of sane magnitude: squaring subnormal floats
# loses precision that has nothing to do with the cosine's math
_comp = st.one_of(st.just(0.0), st.floats(1e-3, 1e3), st.floats(-1e3, -1e-3))
_vec = st.lists(_comp, min_size=3, max_size=3)


@given(_vec, _vec, st.floats(1e-3, 1e3))
@settings(max_examples=200)
def test_cosine_bounded_and_scale_invariant(u, v, c):
    s = cosine_similarity(u, v)
    assert abs(s) <= 1 + 1e-12
    su = cosine_similarity([c * x for x in u], v)
    if any(u) and any(v):
        assert su == pytest.approx(s, abs=1e-9)


@given(_vec)
def test_cosine_self_is_one(u):
    # squared norms of subnormal inputs underflow to 0; the property holds
    # whenever u.u is representable as nonzero
    if np.dot(u, u) > 0:
        assert cosine_similarity(u, u) == pytest.approx(1.0)
