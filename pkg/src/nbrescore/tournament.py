"""All-pairs tournament rescoring, score combination, selector zoo, grid search.

Every ordered pair (i, j), i != j, is scored; the verdict v is added to
hypothesis i and 1-v to hypothesis j, so the scores of a list of N
hypotheses always sum to N(N-1).  Ties everywhere go to the lowest
original decoder rank.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .nbest import Corpus, NBestList
from .wer import corpus_wer, oracle_select

PSEUDO_PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class SelectionWeights:
    alpha: float = 1.0  # acoustic
    beta: float = 1.0  # linguistic
    lam: float = 0.0  # tournament pseudo-probability

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.lam < 0:
            raise ValueError("weights must be non-negative")


@dataclass(frozen=True)
class TournamentResult:
    scores: tuple[float, ...]
    selected: int
    n_pairs_evaluated: int


def _argmax_lowest_rank(values, nbest: NBestList) -> int:
    return max(range(len(values)), key=lambda k: (values[k], -nbest.hypotheses[k].rank))


def baseline_select(nbest: NBestList, weights: SelectionWeights) -> int:
    """argmax of alpha*ac + beta*lm in the log domain."""
    if weights.alpha == 0 and weights.beta == 0:
        raise ValueError("alpha and beta must not both be zero")
    values = [
        weights.alpha * h.ac_logscore + weights.beta * h.lm_logscore for h in nbest.hypotheses
    ]
    return _argmax_lowest_rank(values, nbest)


def random_select(nbest: NBestList, seed: int) -> int:
    """Uniform choice, deterministic per (seed, utt_id)."""
    return random.Random(f"{seed}:{nbest.utt_id}").randrange(len(nbest.hypotheses))


def tournament_scores(nbest: NBestList, scorer, table=None) -> TournamentResult:
    """Run the comparator on all ordered pairs and accumulate verdicts."""
    n = len(nbest.hypotheses)
    if n == 1:
        return TournamentResult(scores=(0.0,), selected=0, n_pairs_evaluated=0)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    verdicts = scorer.score_pairs(nbest, pairs, table)
    scores = np.zeros(n)
    for (i, j), v in zip(pairs, verdicts):
        scores[i] += v
        scores[j] += 1.0 - v
    result_scores = tuple(float(s) for s in scores)
    return TournamentResult(
        scores=result_scores,
        selected=_argmax_lowest_rank(result_scores, nbest),
        n_pairs_evaluated=len(pairs),
    )


def select_tournament(result: TournamentResult, nbest: NBestList) -> int:
    return _argmax_lowest_rank(result.scores, nbest)


def combine_scores(result: TournamentResult, nbest: NBestList, weights: SelectionWeights) -> int:
    """argmax of lam*ln(pseudo-prob) + alpha*ac + beta*lm.

    The pseudo-probability is score(h)/(N(N-1)), floored at 1e-12 before
    the log.  A single-hypothesis list is selected trivially.
    """
    n = len(nbest.hypotheses)
    if n == 1:
        return 0
    total = n * (n - 1)
    values = []
    for h, s in zip(nbest.hypotheses, result.scores):
        p = max(s / total, PSEUDO_PROB_FLOOR)
        values.append(weights.lam * math.log(p) + weights.alpha * h.ac_logscore + weights.beta * h.lm_logscore)
    return _argmax_lowest_rank(values, nbest)


def rescore_corpus(corpus: Corpus, scorer, table=None) -> dict:
    """utt_id -> TournamentResult for every list in the corpus."""
    return {nbest.utt_id: tournament_scores(nbest, scorer, table) for nbest in corpus}


def _selector_wer(corpus: Corpus, select) -> float:
    pairs = [
        (nbest.reference, nbest.hypotheses[select(nbest)].tokens)
        for nbest in corpus
        if nbest.reference is not None
    ]
    return corpus_wer(pairs).wer


def grid_search_weights(
    dev_corpus: Corpus,
    scorer,
    table,
    lam_grid: Sequence[float] = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0),
    alpha_grid: Sequence[float] = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0),
    beta_grid: Sequence[float] = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0),
):
    """Exhaustive grid minimization of dev corpus WER under combine_scores.

    Tournaments are computed once and reused across grid points.  Ties go
    to the lexicographically smallest (lam, alpha, beta); the all-zero
    point is skipped.  Returns (SelectionWeights, dev WerSummary).
    """
    if any(nbest.reference is None for nbest in dev_corpus):
        raise ValueError("grid search requires references on every list")
    if not lam_grid or not alpha_grid or not beta_grid:
        raise ValueError("grids must be non-empty")
    results = rescore_corpus(dev_corpus, scorer, table)

    best = None
    for lam, alpha, beta in itertools.product(sorted(lam_grid), sorted(alpha_grid), sorted(beta_grid)):
        if lam == 0 and alpha == 0 and beta == 0:
            continue
        weights = SelectionWeights(alpha=alpha, beta=beta, lam=lam)
        summary = corpus_wer(
            (
                nbest.reference,
                nbest.hypotheses[combine_scores(results[nbest.utt_id], nbest, weights)].tokens,
            )
            for nbest in dev_corpus
        )
        if best is None or summary.wer < best[1].wer:
            best = (weights, summary)
    if best is None:
        raise ValueError("grid contained only the all-zero point")
    return best
