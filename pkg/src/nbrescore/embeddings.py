"""Static word-embedding table: text-format loading, lookup, averaging, cosine."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .nbest import norm_token

log = logging.getLogger(__name__)


class EmbeddingFormatError(ValueError):
    pass


@dataclass
class EmbeddingTable:
    dim: int
    entries: dict = field(default_factory=dict)  # word -> np.ndarray of shape (dim,)
    duplicate_rows: int = 0

    @property
    def vocab_size(self) -> int:
        return len(self.entries)


def load_embeddings_text(lines: Iterable[str]) -> EmbeddingTable:
    """Load the word2vec plain-text format: header `vocab_size dim`, then
    one `word v1 ... v_dim` row per line.  Duplicate words keep the first
    occurrence; the number of dropped rows is recorded and logged.
    """
    it = iter(lines)
    try:
        header = next(it)
    except StopIteration:
        raise EmbeddingFormatError("empty embedding file") from None
    parts = header.split()
    if len(parts) != 2:
        raise EmbeddingFormatError(f"bad header {header!r}: expected 'vocab_size dim'")
    try:
        declared_vocab, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise EmbeddingFormatError(f"bad header {header!r}") from None
    if dim < 1:
        raise EmbeddingFormatError(f"dimension must be positive, got {dim}")

    table = EmbeddingTable(dim=dim)
    for row_no, raw in enumerate(it, start=2):
        if not raw.strip():
            continue
        fields = raw.split()
        word = norm_token(fields[0])
        if len(fields) - 1 != dim:
            raise EmbeddingFormatError(
                f"row {row_no} ({word!r}): {len(fields) - 1} components, expected {dim}"
            )
        try:
            vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
        except ValueError:
            raise EmbeddingFormatError(f"row {row_no} ({word!r}): non-numeric component") from None
        if word in table.entries:
            table.duplicate_rows += 1
            continue
        table.entries[word] = vec
    if table.duplicate_rows:
        log.warning("embedding file had %d duplicate rows (first kept)", table.duplicate_rows)
    if table.vocab_size != declared_vocab:
        log.warning("header declared %d words, loaded %d", declared_vocab, table.vocab_size)
    return table


def load_embeddings_file(path) -> EmbeddingTable:
    with open(path, encoding="utf-8") as fh:
        return load_embeddings_text(fh)


def write_embeddings_text(table: EmbeddingTable) -> str:
    out = [f"{table.vocab_size} {table.dim}"]
    for word, vec in table.entries.items():
        out.append(word + " " + " ".join(repr(float(x)) for x in vec))
    return "\n".join(out) + "\n"


def lookup(table: EmbeddingTable, word: str) -> Optional[np.ndarray]:
    """Vector for a word after normalization, or None when out of vocabulary."""
    try:
        key = norm_token(word)
    except ValueError:
        return None
    return table.entries.get(key)


def mean_vector(table: EmbeddingTable, words) -> np.ndarray:
    """Average of the vectors of all in-vocabulary occurrences (with
    multiplicity).  Zero vector when nothing is in vocabulary."""
    total = np.zeros(table.dim)
    count = 0
    for w in words:
        vec = lookup(table, w)
        if vec is not None:
            total += vec
            count += 1
    return total / count if count else total


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """u.v / (|u||v|); defined as 0 when either norm is zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))
