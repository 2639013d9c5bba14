"""Word-level edit alignment, WER, oracle selection, matched-pairs test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .nbest import NBestList


class Op(Enum):
    MATCH = "match"
    SUB = "sub"
    INS = "ins"
    DEL = "del"


@dataclass(frozen=True)
class AlignmentResult:
    substitutions: int
    insertions: int
    deletions: int
    aligned_ops: tuple[Op, ...]

    @property
    def distance(self) -> int:
        return self.substitutions + self.insertions + self.deletions


@dataclass(frozen=True)
class WerSummary:
    errors: int
    ref_words: int

    @property
    def wer(self) -> float:
        """errors / ref_words; +inf when the reference is empty but errors exist."""
        if self.ref_words == 0:
            return 0.0 if self.errors == 0 else math.inf
        return self.errors / self.ref_words


@dataclass(frozen=True)
class SignificanceResult:
    z_statistic: float
    p_value: float
    n_segments: int
    degenerate_variance: bool = False


def align(reference: Sequence[str], hypothesis: Sequence[str]) -> AlignmentResult:
    """Minimal unit-cost edit alignment transforming reference into hypothesis.

    Backtrace ties are broken in the order MATCH > SUB > DEL > INS so the
    op sequence is deterministic; the distance is unique regardless.
    """
    n, m = len(reference), len(hypothesis)
    # dist[i][j]: distance between reference[:i] and hypothesis[:j]
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        ri = reference[i - 1]
        row, prev = dist[i], dist[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (0 if ri == hypothesis[j - 1] else 1)
            row[j] = min(sub, prev[j] + 1, row[j - 1] + 1)

    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and reference[i - 1] == hypothesis[j - 1] and dist[i][j] == dist[i - 1][j - 1]:
            ops.append(Op.MATCH)
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + 1:
            ops.append(Op.SUB)
            i, j = i - 1, j - 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            ops.append(Op.DEL)
            i -= 1
        else:
            ops.append(Op.INS)
            j -= 1
    ops.reverse()
    return AlignmentResult(
        substitutions=sum(1 for o in ops if o is Op.SUB),
        insertions=sum(1 for o in ops if o is Op.INS),
        deletions=sum(1 for o in ops if o is Op.DEL),
        aligned_ops=tuple(ops),
    )


def wer(reference: Sequence[str], hypothesis: Sequence[str]) -> WerSummary:
    return WerSummary(errors=align(reference, hypothesis).distance, ref_words=len(reference))


def corpus_wer(pairs) -> WerSummary:
    """Aggregate WER: summed errors over summed reference words.

    Pairs with an empty reference are excluded from the sums; it is an
    error for every reference to be empty.
    """
    errors = 0
    ref_words = 0
    any_ref = False
    for reference, hypothesis in pairs:
        if len(reference) == 0:
            continue
        any_ref = True
        errors += align(reference, hypothesis).distance
        ref_words += len(reference)
    if not any_ref:
        raise ValueError("all references are empty")
    return WerSummary(errors=errors, ref_words=ref_words)


def oracle_select(nbest: NBestList) -> int:
    """Index of the minimum-WER hypothesis; ties go to the lowest rank."""
    if nbest.reference is None:
        raise ValueError(f"{nbest.utt_id}: reference required for oracle selection")
    ref = nbest.reference
    best = min(
        range(len(nbest.hypotheses)),
        key=lambda k: (wer(ref, nbest.hypotheses[k].tokens).wer, nbest.hypotheses[k].rank),
    )
    return best


def matched_pairs_test(errors_a: Sequence[float], errors_b: Sequence[float]) -> SignificanceResult:
    """Matched-pairs significance test on per-segment error counts.

    z = mean(d) / (sample stddev(d) / sqrt(n)) with d = a - b, p two-sided
    under the normal approximation.  Zero variance with a nonzero mean is
    flagged degenerate (p reported as 0).
    """
    if len(errors_a) != len(errors_b):
        raise ValueError("error sequences differ in length")
    n = len(errors_a)
    if n < 2:
        raise ValueError("need at least 2 segments")
    d = [a - b for a, b in zip(errors_a, errors_b)]
    mean = sum(d) / n
    var = sum((x - mean) ** 2 for x in d) / (n - 1)
    if var == 0.0:
        z = 0.0 if mean == 0.0 else math.copysign(math.inf, mean)
        return SignificanceResult(z, math.erfc(abs(z) / math.sqrt(2)) if math.isfinite(z) else 0.0,
                                  n, degenerate_variance=mean != 0.0)
    z = mean / math.sqrt(var / n)
    p = math.erfc(abs(z) / math.sqrt(2))
    return SignificanceResult(z, p, n)
