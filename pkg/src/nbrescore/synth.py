"""Deterministic synthetic benchmark: topic-clustered vocabulary, noisy
N-best lists whose decoder scores track the true error counts, and a
matching embedding table.

Scores are ac = -2.0 * (true substitution errors) + N(0, sigma), lm
likewise with independent noise, so with sigma = 0 the baseline selector
provably picks a minimum-error hypothesis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingTable
from .nbest import Corpus, Hypothesis, NBestList
from .wer import align

SCORE_PER_ERROR = 2.0
INTRA_TOPIC_COS_MIN = 0.8
INTER_TOPIC_COS_MAX = 0.2


@dataclass(frozen=True)
class SynthConfig:
    n_utts: int = 100
    n_topics: int = 4
    words_per_topic: int = 30
    sentence_len: int = 8
    n_best: int = 20
    error_rate: float = 0.15
    offtopic_rate: float = 0.5
    score_noise_sigma: float = 1.0
    embedding_dim: int = 16
    seed: int = 0

    def __post_init__(self):
        for name in ("n_utts", "n_topics", "words_per_topic", "sentence_len", "n_best", "embedding_dim"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("error_rate", "offtopic_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.score_noise_sigma < 0:
            raise ValueError("score_noise_sigma must be non-negative")
        if self.n_topics >= self.embedding_dim:
            raise ValueError("need n_topics < embedding_dim for separated topic clusters")


def _topic_word(topic: int, k: int) -> str:
    return f"t{topic}w{k}"


PERTURB_RADIUS = 0.1  # intra-topic cos >= 1 - 2r^2 = 0.98, inter-topic <= r^2 = 0.01


def _make_embeddings(cfg: SynthConfig, rng) -> EmbeddingTable:
    # Orthonormal topic centers; each word sits at sqrt(1-r^2)*center + r*q
    # with q a unit vector orthogonal to every center, which makes the
    # cluster-separation bounds hold by construction.
    basis = np.linalg.qr(rng.normal(size=(cfg.embedding_dim, cfg.embedding_dim)))[0]
    centers = basis[: cfg.n_topics]
    r = PERTURB_RADIUS
    table = EmbeddingTable(dim=cfg.embedding_dim)
    vectors = []
    for t in range(cfg.n_topics):
        for k in range(cfg.words_per_topic):
            q = rng.normal(size=cfg.embedding_dim)
            q -= centers.T @ (centers @ q)
            q /= np.linalg.norm(q)
            v = np.sqrt(1.0 - r * r) * centers[t] + r * q
            table.entries[_topic_word(t, k)] = v
            vectors.append((t, v))
    # checked exhaustively: the bounds are part of the generator's contract
    mat = np.array([v for _, v in vectors])
    topics = np.array([t for t, _ in vectors])
    cos = mat @ mat.T
    same = topics[:, None] == topics[None, :]
    assert cos[same].min() > INTRA_TOPIC_COS_MIN, "intra-topic cosine bound violated"
    if (~same).any():
        assert cos[~same].max() < INTER_TOPIC_COS_MAX, "inter-topic cosine bound violated"
    return table


def _word_frequencies(n: int) -> np.ndarray:
    # Zipf-like frequencies (p_k proportional to 1/rank), as in natural
    # language. Frequent words recur across hypotheses, so N-best lists keep
    # a non-empty common-word context even after heavy corruption.
    p = 1.0 / np.arange(1, n + 1)
    return p / p.sum()


def generate(cfg: SynthConfig):
    """Build (corpus with references, embedding table), deterministic per seed."""
    rng = np.random.default_rng(cfg.seed)
    table = _make_embeddings(cfg, rng)
    freqs = _word_frequencies(cfg.words_per_topic)

    lists = []
    width = len(str(cfg.n_utts - 1))
    for u in range(cfg.n_utts):
        topic = int(rng.integers(cfg.n_topics))
        ref = tuple(
            _topic_word(topic, int(k))
            for k in rng.choice(cfg.words_per_topic, size=cfg.sentence_len, p=freqs)
        )
        raw = []
        for _ in range(cfg.n_best):
            words = list(ref)
            for pos in range(len(words)):
                if rng.random() < cfg.error_rate:
                    if cfg.n_topics > 1 and rng.random() < cfg.offtopic_rate:
                        t = int((topic + 1 + rng.integers(cfg.n_topics - 1)) % cfg.n_topics)
                    else:
                        t = topic
                    words[pos] = _topic_word(t, int(rng.choice(cfg.words_per_topic, p=freqs)))
            errors = align(ref, words).distance  # scores encode true edit errors
            ac = -SCORE_PER_ERROR * errors + cfg.score_noise_sigma * rng.normal()
            lm = -SCORE_PER_ERROR * errors + cfg.score_noise_sigma * rng.normal()
            raw.append((tuple(words), ac, lm))
        order = sorted(range(cfg.n_best), key=lambda k: -(raw[k][1] + raw[k][2]))
        hyps = tuple(
            Hypothesis(tokens=raw[k][0], ac_logscore=raw[k][1], lm_logscore=raw[k][2], rank=r + 1)
            for r, k in enumerate(order)
        )
        lists.append(NBestList(utt_id=f"utt{u:0{width}d}", hypotheses=hyps, reference=ref))
    return Corpus(tuple(lists)), table
