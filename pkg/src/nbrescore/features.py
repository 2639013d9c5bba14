"""Context/possibility decomposition, comparator input features, pair labeling.

The context part of an N-best list is the multiset of words common to all
hypotheses (per-word minimum count, position-ignorant).  The remainder of
each hypothesis is its possibility zone.  Both are embedded by averaging
word vectors; the three feature configurations combine those vectors and
cosines with the decoder scores.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

import numpy as np

from .embeddings import EmbeddingTable, cosine_similarity, mean_vector
from .nbest import Corpus, NBestList
from .wer import wer


class _Equal:
    """Sentinel returned by label_pair for equal-WER pairs."""

    def __repr__(self):
        return "EQUAL"


EQUAL = _Equal()


class Variant(Enum):
    CONFIG1 = 1  # score differences + cosine difference
    CONFIG2 = 2  # both scores + both cosines
    CONFIG3 = 3  # full vectors + cosines + scores


@dataclass(frozen=True)
class FeatureConfig:
    variant: Variant
    embedding_dim: int

    @property
    def length(self) -> int:
        if self.variant is Variant.CONFIG1:
            return 3
        if self.variant is Variant.CONFIG2:
            return 6
        return 3 * self.embedding_dim + 6


@dataclass(frozen=True)
class SemanticDecomposition:
    context_words: Counter
    possibility_words: tuple[Counter, ...]  # one zone per hypothesis

    @property
    def nbrw_context(self) -> int:
        return sum(self.context_words.values())

    def nbrw_poss(self, h: int) -> int:
        return sum(self.possibility_words[h].values())


@dataclass(frozen=True)
class PairSample:
    utt_id: str
    i: int
    j: int
    features: Optional[np.ndarray]
    label: Optional[int]  # 1, 0, or None for unlabeled evaluation pairs


def decompose(nbest: NBestList) -> SemanticDecomposition:
    """Split a list into its context multiset and per-hypothesis zones."""
    counters = [Counter(h.tokens) for h in nbest.hypotheses]
    context = counters[0].copy()
    for c in counters[1:]:
        context &= c
    zones = tuple(c - context for c in counters)
    return SemanticDecomposition(context_words=context, possibility_words=zones)


def context_vector(dec: SemanticDecomposition, table: EmbeddingTable) -> np.ndarray:
    return mean_vector(table, dec.context_words.elements())


def possibility_vector(dec: SemanticDecomposition, h: int, table: EmbeddingTable) -> np.ndarray:
    return mean_vector(table, dec.possibility_words[h].elements())


def normalized_scores(nbest: NBestList) -> tuple[np.ndarray, np.ndarray]:
    """Length-normalized log scores, standardized within the list.

    Each score is divided by max(1, sentence length), then the list mean is
    subtracted and the list stddev divided out (a zero stddev maps the
    whole column to zeros).  Argmax within the list is unaffected.
    """
    lens = np.array([max(1, len(h.tokens)) for h in nbest.hypotheses], dtype=np.float64)
    ac = np.array([h.ac_logscore for h in nbest.hypotheses]) / lens
    lm = np.array([h.lm_logscore for h in nbest.hypotheses]) / lens

    def standardize(x):
        sd = x.std()
        return (x - x.mean()) / sd if sd > 0 else np.zeros_like(x)

    return standardize(ac), standardize(lm)


class FeatureContext:
    """Per-list cache of the quantities every pair's features reuse."""

    def __init__(self, nbest: NBestList, table: EmbeddingTable, config: FeatureConfig):
        self.nbest = nbest
        self.config = config
        self.dec = decompose(nbest)
        self.v_ctx = context_vector(self.dec, table)
        self.v_poss = [possibility_vector(self.dec, h, table) for h in range(len(nbest))]
        self.cos = [cosine_similarity(self.v_ctx, v) for v in self.v_poss]
        self.ac, self.lm = normalized_scores(nbest)

    def features(self, i: int, j: int) -> np.ndarray:
        if i == j:
            raise ValueError("pair indices must differ")
        n = len(self.nbest)
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"pair indices ({i}, {j}) out of range for list of {n}")
        v = self.config.variant
        if v is Variant.CONFIG1:
            return np.array(
                [self.ac[i] - self.ac[j], self.lm[i] - self.lm[j], self.cos[i] - self.cos[j]]
            )
        if v is Variant.CONFIG2:
            return np.array(
                [self.ac[i], self.ac[j], self.lm[i], self.lm[j], self.cos[i], self.cos[j]]
            )
        return np.concatenate(
            [
                self.v_ctx,
                self.v_poss[i],
                self.v_poss[j],
                [self.cos[i], self.cos[j], self.ac[i], self.ac[j], self.lm[i], self.lm[j]],
            ]
        )


def build_features(nbest, i, j, table, config) -> np.ndarray:
    """One-off feature vector for a single pair (use FeatureContext for many)."""
    return FeatureContext(nbest, table, config).features(i, j)


def label_pair(reference, hyp_i, hyp_j):
    """1 if hyp_i has strictly lower WER against the reference, 0 if higher,
    EQUAL otherwise."""
    if reference is None:
        raise ValueError("reference required for pair labeling")
    wi = wer(reference, hyp_i).wer
    wj = wer(reference, hyp_j).wer
    if wi < wj:
        return 1
    if wi > wj:
        return 0
    return EQUAL


def generate_pairs(
    corpus: Corpus,
    config: FeatureConfig,
    table: EmbeddingTable,
    mode: str = "train",
) -> Iterator[PairSample]:
    """All ordered pairs (i, j), i != j, per list.

    In "train" mode pairs need references; equal-WER pairs are dropped.  In
    "eval" mode every pair is emitted unlabeled.
    """
    if mode not in ("train", "eval"):
        raise ValueError(f"unknown mode {mode!r}")
    for nbest in corpus:
        if mode == "train" and nbest.reference is None:
            raise ValueError(f"{nbest.utt_id}: reference required in train mode")
        ctx = FeatureContext(nbest, table, config)
        n = len(nbest)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                if mode == "train":
                    label = label_pair(
                        nbest.reference, nbest.hypotheses[i].tokens, nbest.hypotheses[j].tokens
                    )
                    if label is EQUAL:
                        continue
                    yield PairSample(nbest.utt_id, i, j, ctx.features(i, j), label)
                else:
                    yield PairSample(nbest.utt_id, i, j, ctx.features(i, j), None)


def write_pair_samples(samples, fh) -> int:
    """Serialize samples as `utt_id <TAB> i <TAB> j <TAB> label <TAB> f1 f2 ...`."""
    count = 0
    for s in samples:
        label = "-" if s.label is None else str(s.label)
        feats = " ".join(repr(float(x)) for x in s.features)
        fh.write(f"{s.utt_id}\t{s.i}\t{s.j}\t{label}\t{feats}\n")
        count += 1
    return count


def read_pair_samples(fh) -> Iterator[PairSample]:
    for line in fh:
        if not line.strip():
            continue
        utt_id, i, j, label, feats = line.rstrip("\n").split("\t")
        yield PairSample(
            utt_id,
            int(i),
            int(j),
            np.array([float(x) for x in feats.split()]),
            None if label == "-" else int(label),
        )


def write_text_pairs(corpus: Corpus, fh, include_equal: bool = False) -> int:
    """Token-level pair file for external fine-tuning:
    `utt_id <TAB> i <TAB> j <TAB> label <TAB> tokens_i <TAB> tokens_j`
    with label one of 1, 0, EQ.  Equal-WER rows are skipped unless asked for.
    """
    count = 0
    for nbest in corpus:
        if nbest.reference is None:
            raise ValueError(f"{nbest.utt_id}: reference required for text pairs")
        n = len(nbest)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                label = label_pair(
                    nbest.reference, nbest.hypotheses[i].tokens, nbest.hypotheses[j].tokens
                )
                if label is EQUAL and not include_equal:
                    continue
                tag = "EQ" if label is EQUAL else str(label)
                fh.write(
                    f"{nbest.utt_id}\t{i}\t{j}\t{tag}\t"
                    f"{' '.join(nbest.hypotheses[i].tokens)}\t"
                    f"{' '.join(nbest.hypotheses[j].tokens)}\n"
                )
                count += 1
    return count
