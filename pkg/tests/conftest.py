import numpy as np
import pytest

from nbrescore.embeddings import EmbeddingTable
from nbrescore.nbest import Corpus, Hypothesis, NBestList


def make_list(utt_id, hyp_specs, reference=None):
    """hyp_specs: list of (tokens, ac, lm); ranks assigned in order."""
    hyps = tuple(
        Hypothesis(tokens=tuple(tokens), ac_logscore=ac, lm_logscore=lm, rank=r + 1)
        for r, (tokens, ac, lm) in enumerate(hyp_specs)
    )
    return NBestList(utt_id=utt_id, hypotheses=hyps, reference=tuple(reference) if reference else None)


def make_table(dim, **vectors):
    return EmbeddingTable(dim=dim, entries={w: np.asarray(v, dtype=np.float64) for w, v in vectors.items()})


def random_nbest(rng, utt_id="u", n=None, vocab=("a", "b", "c", "d", "e"), with_ref=True,
                 max_len=6):
    n = n or int(rng.integers(1, 8))
    specs = []
    for _ in range(n):
        length = int(rng.integers(0, max_len + 1))
        tokens = [vocab[int(k)] for k in rng.integers(len(vocab), size=length)]
        specs.append((tokens, float(rng.normal()), float(rng.normal())))
    ref = None
    if with_ref:
        ref = [vocab[int(k)] for k in rng.integers(len(vocab), size=int(rng.integers(1, max_len + 1)))]
    return make_list(utt_id, specs, ref)


def random_corpus(rng, n_lists=5, **kwargs):
    return Corpus(tuple(random_nbest(rng, utt_id=f"u{i}", **kwargs) for i in range(n_lists)))
