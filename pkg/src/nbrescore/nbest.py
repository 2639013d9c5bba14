"""Data model for N-best hypothesis lists and the line-oriented corpus format.

Corpus format, one record per line (UTF-8):

    utt_id <TAB> rank <TAB> ac_logscore <TAB> lm_logscore <TAB> token token ...
    utt_id <TAB> REF <TAB> token token ...

Blank lines and lines starting with ``#`` are ignored.  Acoustic and
language-model scores are natural-log values; products of per-word
probabilities are stored as log-domain sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class CorpusFormatError(ValueError):
    """Raised on any malformed corpus input; carries the offending line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


def norm_token(text: str) -> str:
    """Normalize a raw token: strip surrounding whitespace, lowercase.

    Normalization is idempotent.  The result must be non-empty and contain
    no internal whitespace.
    """
    t = text.strip().lower()
    if not t:
        raise ValueError("token is empty after normalization")
    if any(c.isspace() for c in t):
        raise ValueError(f"token {text!r} contains internal whitespace")
    return t


def norm_tokens(words: Iterable[str]) -> tuple[str, ...]:
    return tuple(norm_token(w) for w in words)


def tokenize(text: str) -> tuple[str, ...]:
    """Split a sentence on whitespace and normalize each token."""
    return norm_tokens(text.split())


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[str, ...]
    ac_logscore: float
    lm_logscore: float
    rank: int

    def __post_init__(self):
        if not math.isfinite(self.ac_logscore) or not math.isfinite(self.lm_logscore):
            raise ValueError("hypothesis scores must be finite")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")


@dataclass(frozen=True)
class NBestList:
    utt_id: str
    hypotheses: tuple[Hypothesis, ...]
    reference: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if not self.utt_id:
            raise ValueError("utt_id must be non-empty")
        if not self.hypotheses:
            raise ValueError(f"{self.utt_id}: hypothesis list is empty")
        ranks = sorted(h.rank for h in self.hypotheses)
        if ranks != list(range(1, len(self.hypotheses) + 1)):
            raise ValueError(f"{self.utt_id}: ranks are not exactly 1..{len(self.hypotheses)}")

    def __len__(self):
        return len(self.hypotheses)


@dataclass(frozen=True)
class Corpus:
    lists: tuple[NBestList, ...]

    def __post_init__(self):
        seen = set()
        for lst in self.lists:
            if lst.utt_id in seen:
                raise ValueError(f"duplicate utt_id {lst.utt_id!r}")
            seen.add(lst.utt_id)

    def __len__(self):
        return len(self.lists)

    def __iter__(self):
        return iter(self.lists)


def _parse_score(field: str, what: str, line_no: int) -> float:
    try:
        value = float(field)
    except ValueError:
        raise CorpusFormatError(f"non-numeric {what} {field!r}", line_no) from None
    if not math.isfinite(value):
        raise CorpusFormatError(f"non-finite {what} {field!r}", line_no)
    return value


def parse_corpus(lines: Iterable[str]) -> Corpus:
    """Parse the line format into a validated Corpus.

    Records for one utterance may appear in any order and need not be
    contiguous.  Hypotheses are returned sorted by rank.
    """
    hyps: dict[str, list[Hypothesis]] = {}
    refs: dict[str, tuple[str, ...]] = {}
    order: list[str] = []

    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise CorpusFormatError("expected tab-separated fields", line_no)
        utt_id = fields[0]
        if not utt_id:
            raise CorpusFormatError("empty utt_id", line_no)

        if fields[1] == "REF":
            if len(fields) > 3:
                raise CorpusFormatError("REF line has extra fields", line_no)
            if utt_id in refs:
                raise CorpusFormatError(f"duplicate REF for utt_id {utt_id!r}", line_no)
            text = fields[2] if len(fields) == 3 else ""
            try:
                refs[utt_id] = tokenize(text)
            except ValueError as exc:
                raise CorpusFormatError(str(exc), line_no) from None
            if utt_id not in hyps:
                order.append(utt_id)
                hyps[utt_id] = []
            continue

        if len(fields) not in (4, 5):
            raise CorpusFormatError(f"expected 4 or 5 fields, got {len(fields)}", line_no)
        try:
            rank = int(fields[1])
        except ValueError:
            raise CorpusFormatError(f"non-integer rank {fields[1]!r}", line_no) from None
        ac = _parse_score(fields[2], "acoustic score", line_no)
        lm = _parse_score(fields[3], "linguistic score", line_no)
        try:
            tokens = tokenize(fields[4]) if len(fields) == 5 else ()
        except ValueError as exc:
            raise CorpusFormatError(str(exc), line_no) from None

        if utt_id not in hyps:
            order.append(utt_id)
            hyps[utt_id] = []
        if any(h.rank == rank for h in hyps[utt_id]):
            raise CorpusFormatError(f"duplicate rank {rank} for utt_id {utt_id!r}", line_no)
        try:
            hyps[utt_id].append(Hypothesis(tokens, ac, lm, rank))
        except ValueError as exc:
            raise CorpusFormatError(str(exc), line_no) from None

    lists = []
    for utt_id in order:
        entries = sorted(hyps[utt_id], key=lambda h: h.rank)
        try:
            lists.append(NBestList(utt_id, tuple(entries), refs.get(utt_id)))
        except ValueError as exc:
            raise CorpusFormatError(str(exc)) from None
    return Corpus(tuple(lists))


def write_corpus(corpus: Corpus) -> str:
    """Serialize a Corpus so that parse_corpus(write_corpus(c)) == c.

    Scores use repr(), which round-trips 64-bit floats exactly.
    """
    out = []
    for lst in corpus:
        for h in lst.hypotheses:
            out.append(
                f"{lst.utt_id}\t{h.rank}\t{h.ac_logscore!r}\t{h.lm_logscore!r}\t{' '.join(h.tokens)}"
            )
        if lst.reference is not None:
            out.append(f"{lst.utt_id}\tREF\t{' '.join(lst.reference)}")
    return "\n".join(out) + ("\n" if out else "")


def truncate_lists(corpus: Corpus, n: int) -> Corpus:
    """Keep each list's n lowest-rank hypotheses (all, if fewer)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lists = []
    for lst in corpus:
        kept = tuple(sorted(lst.hypotheses, key=lambda h: h.rank)[:n])
        lists.append(NBestList(lst.utt_id, kept, lst.reference))
    return Corpus(tuple(lists))


def parse_corpus_file(path) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh)


def write_corpus_file(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_corpus(corpus))
