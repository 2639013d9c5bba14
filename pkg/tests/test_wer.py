import math
from functools import lru_cache

import numpy as np
import pytest

from conftest import make_list
from nbrescore.wer import (
    Op,
    align,
    corpus_wer,
    matched_pairs_test,
    oracle_select,
    wer,
)


def dp_distance(ref, hyp):
    """Independent edit-distance oracle: plain full-matrix DP, no backtrace."""
    n, m = len(ref), len(hyp)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            d[i][j] = min(
                d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]),
                d[i - 1][j] + 1,
                d[i][j - 1] + 1,
            )
    return d[n][m]


def replay(ops, reference):
    """Apply the op sequence to the reference; must yield the hypothesis."""
    out = []
    it = iter(reference)
    for op in ops:
        if op is Op.MATCH:
            out.append(next(it))
        elif op is Op.SUB:
            next(it)
            out.append(None)  # placeholder, checked by count only
        elif op is Op.DEL:
            next(it)
        else:  # INS
            out.append(None)
    assert next(it, None) is None
    return out


# --------------------------------------------------------------------- align


def test_align_identity():
    r = align(["a", "b", "c"], ["a", "b", "c"])
    assert r.distance == 0
    assert r.aligned_ops == (Op.MATCH,) * 3


def test_align_single_substitution():
    r = align(["a", "b", "c"], ["a", "x", "c"])
    assert (r.substitutions, r.insertions, r.deletions) == (1, 0, 0)


def test_align_insertions_from_empty():
    r = align([], ["a", "b"])
    assert r.insertions == 2 and r.distance == 2


def test_align_matches_oracle_randomly():
    rng = np.random.default_rng(7)
    vocab = "abcde"
    for _ in range(300):
        ref = [vocab[k] for k in rng.integers(5, size=rng.integers(0, 9))]
        hyp = [vocab[k] for k in rng.integers(5, size=rng.integers(0, 9))]
        r = align(ref, hyp)
        assert r.distance == dp_distance(ref, hyp)
        # op sequence must consume the whole reference and emit len(hyp) tokens
        assert len(replay(r.aligned_ops, ref)) == len(hyp)


def test_align_symmetry_and_triangle():
    rng = np.random.default_rng(11)
    vocab = "abc"
    for _ in range(100):
        seqs = [[vocab[k] for k in rng.integers(3, size=rng.integers(0, 7))] for _ in range(3)]
        x, y, z = seqs
        assert align(x, y).distance == align(y, x).distance
        assert align(x, z).distance <= align(x, y).distance + align(y, z).distance
        assert align(x, x).distance == 0


# ----------------------------------------------------------------------- wer


def test_wer_identity():
    assert wer(["a"], ["a"]).wer == 0


def test_wer_one_third():
    s = wer(["a", "b", "c"], ["a", "x", "c"])
    assert s.errors == 1 and s.ref_words == 3
    assert s.wer == pytest.approx(1 / 3)


def test_wer_empty_reference_is_inf():
    s = wer([], ["a", "b"])
    assert s.errors == 2 and s.ref_words == 0
    assert s.wer == math.inf


def test_wer_both_empty():
    assert wer([], []).wer == 0


# ---------------------------------------------------------------- corpus_wer


def test_corpus_wer_sums_not_mean():
    s = corpus_wer([(["a"] * 4, ["a", "a", "a", "x"]), (["b"] * 6, ["b"] * 6)])
    assert s.errors == 1 and s.ref_words == 10
    assert s.wer == pytest.approx(0.1)


def test_corpus_wer_perfect():
    assert corpus_wer([(["a"], ["a"]), (["b", "c"], ["b", "c"])]).wer == 0


def test_corpus_wer_single_pair_reduction():
    pair = (["a", "b"], ["a", "x"])
    assert corpus_wer([pair]) == wer(*pair)


def test_corpus_wer_permutation_invariant():
    pairs = [(["a", "b"], ["a"]), (["c"], ["c", "d"]), (["e", "e"], ["e", "f"])]
    assert corpus_wer(pairs) == corpus_wer(list(reversed(pairs)))


def test_corpus_wer_all_empty_refs():
    with pytest.raises(ValueError):
        corpus_wer([([], ["a"])])


def test_corpus_wer_skips_empty_refs():
    s = corpus_wer([([], ["a"]), (["b"], ["b"])])
    assert s.errors == 0 and s.ref_words == 1


# ------------------------------------------------------------- oracle_select


def test_oracle_finds_exact_match():
    lst = make_list(
        "u",
        [(["a", "x"], 0, 0), (["a", "y"], 0, 0), (["a", "b"], 0, 0)],
        reference=["a", "b"],
    )
    assert oracle_select(lst) == 2


def test_oracle_tie_goes_to_lower_rank():
    lst = make_list("u", [(["a", "x"], 0, 0), (["a", "y"], 0, 0)], reference=["a", "b"])
    assert oracle_select(lst) == 0


def test_oracle_requires_reference():
    lst = make_list("u", [(["a"], 0, 0)])
    with pytest.raises(ValueError):
        oracle_select(lst)


def test_oracle_matches_brute_force():
    rng = np.random.default_rng(3)
    vocab = ["a", "b", "c"]
    for _ in range(100):
        n = int(rng.integers(1, 6))
        specs = [
            ([vocab[k] for k in rng.integers(3, size=rng.integers(0, 5))], 0.0, 0.0)
            for _ in range(n)
        ]
        ref = [vocab[k] for k in rng.integers(3, size=rng.integers(1, 5))]
        lst = make_list("u", specs, reference=ref)
        chosen = oracle_select(lst)
        best = min(wer(ref, h.tokens).wer for h in lst.hypotheses)
        assert wer(ref, lst.hypotheses[chosen].tokens).wer == best


# -------------------------------------------------------------- matched pairs


def test_matched_pairs_identical():
    r = matched_pairs_test([3, 1, 4, 1], [3, 1, 4, 1])
    assert r.z_statistic == 0 and r.p_value == 1


def test_matched_pairs_degenerate_variance():
    r = matched_pairs_test([2, 2, 2, 2], [1, 1, 1, 1])
    assert r.degenerate_variance
    assert r.p_value == 0


def test_matched_pairs_frozen_oracle_value():
    # expected z/p computed with a 50-digit erfc evaluation (mpmath) over
    # this fixed n=30 difference sequence
    d = [1, -1, 2, 0, 1, 3, -2, 1, 0, 2, 1, -1, 0, 1, 2, -3, 1, 1, 0, 2,
         -1, 1, 2, 0, 1, -2, 3, 1, 0, 1]
    r = matched_pairs_test(d, [0] * 30)
    assert r.z_statistic == pytest.approx(2.169281740075978, abs=1e-12)
    assert r.p_value == pytest.approx(0.030061300665211833, abs=1e-6)
    assert r.n_segments == 30


def test_matched_pairs_antisymmetry():
    rng = np.random.default_rng(5)
    a = list(rng.integers(0, 6, size=20))
    b = list(rng.integers(0, 6, size=20))
    r1 = matched_pairs_test(a, b)
    r2 = matched_pairs_test(b, a)
    assert r1.z_statistic == pytest.approx(-r2.z_statistic)
    assert r1.p_value == pytest.approx(r2.p_value)


def test_matched_pairs_input_validation():
    with pytest.raises(ValueError):
        matched_pairs_test([1, 2], [1])
    with pytest.raises(ValueError):
        matched_pairs_test([1], [1])
